"""Shared builders for hand-rolled test scenes."""
import pytest

from ifg_explorer.scene_model import (
    EVERYTHING,
    Box,
    Collider,
    GameObjectDef,
    InteractableSpec,
    SceneDefinition,
    SocketSpec,
    Sphere,
    Vec3,
)


def vec(x=0.0, y=0.0, z=0.0):
    return Vec3(float(x), float(y), float(z))


def sphere(radius=0.1, offset=None, trigger=False):
    return Collider(Sphere(radius), offset or Vec3(0, 0, 0), trigger)


def box(hx=0.1, hy=0.1, hz=0.1, offset=None, trigger=False):
    return Collider(Box(Vec3(hx, hy, hz)), offset or Vec3(0, 0, 0), trigger)


def grabbable(oid, pos, *, activatable=False, layers=EVERYTHING, collider=None):
    return GameObjectDef(
        id=oid,
        name=oid,
        position=vec(*pos),
        colliders=(collider or sphere(),),
        interactable=InteractableSpec(
            grabbable=True, activatable=activatable, interaction_layers=layers
        ),
    )


def socket_holder(oid, pos, *, layers=EVERYTHING, locking=False, zone=0.15,
                  attach=(0.0, 0.16, 0.0), grab_layers=None):
    """A socket owner; optionally itself grabbable (grab_layers not None)."""
    interactable = None
    if grab_layers is not None:
        interactable = InteractableSpec(grabbable=True, interaction_layers=grab_layers)
    return GameObjectDef(
        id=oid,
        name=oid,
        position=vec(*pos),
        colliders=(box(),),
        interactable=interactable,
        socket=SocketSpec(
            attach_point=vec(*attach),
            zone_radius=zone,
            interaction_layers=layers,
            locking=locking,
        ),
    )


def custom_object(oid, pos, tag="Pressable"):
    return GameObjectDef(
        id=oid,
        name=oid,
        position=vec(*pos),
        colliders=(sphere(),),
        interactable=InteractableSpec(custom_tag=tag),
    )


def make_scene(objects, spawns=((0.0, 0.0, 0.0),), layers=("Default",), scene_id="t",
               ground_y=0.0):
    return SceneDefinition(
        scene_id=scene_id,
        layer_registry=tuple(layers),
        objects=tuple(objects),
        spawn_points=tuple(vec(*s) for s in spawns),
        ground_y=ground_y,
    )


@pytest.fixture
def basic_scene():
    """One of each flavor: plain grabbable, fire object, socket pair."""
    return make_scene(
        [
            grabbable("cube", (1.0, 1.0, 0.0)),
            grabbable("gun", (0.0, 1.0, 1.2), activatable=True),
            grabbable("key", (-1.2, 1.0, 0.0)),
            socket_holder("hole", (-1.2, 0.8, 1.2)),
        ]
    )
