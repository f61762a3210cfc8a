"""Procedural benchmark scenes with exact ground truth.

Generates open-floor desk-scale scenes: every object sits at a reachable
height on its own patch of floor space, socket pairs get dedicated layers
so the flow counts follow the spec arithmetic exactly, and seeded defects
(trigger-only colliders, Nothing masks, Everything sockets) are recorded
in a ground-truth document for scoring oracles against.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .errors import PackingError
from .scene_model import (
    EVERYTHING,
    NOTHING,
    Box,
    Collider,
    GameObjectDef,
    InteractableSpec,
    SceneDefinition,
    SocketSpec,
    Sphere,
    Vec3,
    layers_overlap,
)
from .sim import CONTROLLER_OFFSET

BUG_IS_TRIGGER = "IsTrigger"
BUG_NOTHING_MASK = "NothingMask"

# Spacing keeps every object uniquely touchable: the controller can overlap
# at most one collider at a time, and nothing intersects the controller's
# home pose at spawn.
SPAWN_CLEARANCE = 0.6
SURFACE_GAP = 0.4
PLACEMENT_ATTEMPTS = 1000
MIN_HEIGHT, MAX_HEIGHT = 0.5, 1.5
MAX_SOCKET_PAIRS = 31  # layer registry holds Default + one layer per pair


@dataclass(frozen=True)
class BenchSpec:
    """Category counts plus seeded defects for one generated scene.

    `manipulate` is the total number of Manipulate flows; since every fire
    object and every socket broker is itself grabbable, the number of
    plain grab-only objects is manipulate - fire - socket.
    """

    fire: int = 0
    manipulate: int = 0
    socket: int = 0
    custom: int = 0
    area: float = 10.0
    seed: int = 0
    scene_id: str = ""
    is_trigger_bugs: tuple = ()
    nothing_mask_bugs: tuple = ()
    everything_sockets: tuple = ()
    locking_fraction: float = 0.0

    def __post_init__(self) -> None:
        for name in ("fire", "manipulate", "socket", "custom"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} count must be >= 0")
        if self.manipulate < self.fire + self.socket:
            raise ValueError("manipulate total must cover fire objects and socket brokers")
        if self.socket > MAX_SOCKET_PAIRS:
            raise ValueError(f"at most {MAX_SOCKET_PAIRS} socket pairs supported")
        if self.area < 2.0:
            raise ValueError("area side must be at least 2 m")
        if not 0 <= self.locking_fraction <= 1:
            raise ValueError("locking_fraction must be in [0, 1]")
        plain = self.manipulate_only
        for name in ("is_trigger_bugs", "nothing_mask_bugs", "everything_sockets"):
            values = getattr(self, name)
            limit = self.socket if name == "everything_sockets" else plain
            if any(not isinstance(i, int) or not 0 <= i < limit for i in values):
                raise ValueError(f"{name} indices out of range")
            if len(set(values)) != len(values):
                raise ValueError(f"{name} indices must be unique")
        if set(self.is_trigger_bugs) & set(self.nothing_mask_bugs):
            raise ValueError("an object cannot carry both seeded bug kinds")

    @property
    def manipulate_only(self) -> int:
        return self.manipulate - self.fire - self.socket


def spec_from_dict(doc: dict) -> BenchSpec:
    if not isinstance(doc, dict):
        raise ValueError("bench spec must be a JSON object")
    known = {
        "sceneId",
        "fire",
        "manipulate",
        "socket",
        "custom",
        "area",
        "seed",
        "isTriggerBugs",
        "nothingMaskBugs",
        "everythingSockets",
        "lockingFraction",
    }
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"unknown bench spec fields: {', '.join(unknown)}")
    return BenchSpec(
        fire=int(doc.get("fire", 0)),
        manipulate=int(doc.get("manipulate", 0)),
        socket=int(doc.get("socket", 0)),
        custom=int(doc.get("custom", 0)),
        area=float(doc.get("area", 10.0)),
        seed=int(doc.get("seed", 0)),
        scene_id=str(doc.get("sceneId", "")),
        is_trigger_bugs=tuple(doc.get("isTriggerBugs", ())),
        nothing_mask_bugs=tuple(doc.get("nothingMaskBugs", ())),
        everything_sockets=tuple(doc.get("everythingSockets", ())),
        locking_fraction=float(doc.get("lockingFraction", 0.0)),
    )


def generate_scene(spec: BenchSpec):
    """Build (SceneDefinition, ground truth) deterministically from the spec."""
    rng = random.Random(spec.seed)
    scene_id = spec.scene_id or f"bench-s{spec.seed}"
    layers = ["Default"] + [f"Pair{i}" for i in range(spec.socket)]
    default_mask = 1
    spawn = Vec3(0.0, 0.0, 0.0)
    homes = [spawn + CONTROLLER_OFFSET]
    placed: list = []
    objects: list = []

    def place(bound: float) -> Vec3:
        half = spec.area / 2.0 - 0.5
        for _ in range(PLACEMENT_ATTEMPTS):
            pos = Vec3(
                rng.uniform(-half, half),
                rng.uniform(MIN_HEIGHT, MAX_HEIGHT),
                rng.uniform(-half, half),
            )
            if any(pos.distance_to(h) < SPAWN_CLEARANCE for h in homes):
                continue
            if any(
                pos.distance_to(p) < bound + other + SURFACE_GAP for p, other in placed
            ):
                continue
            placed.append((pos, bound))
            return pos
        raise PackingError(
            f"could not place object {len(objects)} after {PLACEMENT_ATTEMPTS} attempts"
        )

    flows = {"Fire": [], "Manipulate": [], "Socket": [], "Custom": []}
    unresponsive: list = []
    bugged: list = []

    for i in range(spec.fire):
        oid = f"fire{i}"
        objects.append(
            GameObjectDef(
                id=oid,
                name=oid,
                position=place(0.1),
                colliders=(Collider(Sphere(0.1)),),
                interactable=InteractableSpec(True, True, None, default_mask),
            )
        )
        flows["Manipulate"].append(f"User->{oid}#0")
        flows["Fire"].append(f"User->{oid}#1")

    for i in range(spec.manipulate_only):
        oid = f"manip{i}"
        is_trigger = i in spec.is_trigger_bugs
        mask = NOTHING if i in spec.nothing_mask_bugs else default_mask
        objects.append(
            GameObjectDef(
                id=oid,
                name=oid,
                position=place(0.1),
                colliders=(Collider(Sphere(0.1), is_trigger=is_trigger),),
                interactable=InteractableSpec(True, False, None, mask),
            )
        )
        flows["Manipulate"].append(f"User->{oid}#0")
        if is_trigger:
            bugged.append({"id": oid, "kind": BUG_IS_TRIGGER})
            unresponsive.append(f"User->{oid}#0")
        elif mask == NOTHING:
            bugged.append({"id": oid, "kind": BUG_NOTHING_MASK})
            unresponsive.append(f"User->{oid}#0")

    locked_count = round(spec.locking_fraction * spec.socket)
    smell_sockets: list = []
    locking_sockets: list = []
    for i in range(spec.socket):
        pair_mask = 1 << (i + 1)
        broker_id = f"broker{i}"
        owner_id = f"socket{i}"
        objects.append(
            GameObjectDef(
                id=broker_id,
                name=broker_id,
                position=place(0.08),
                colliders=(Collider(Sphere(0.08)),),
                interactable=InteractableSpec(True, False, None, pair_mask),
            )
        )
        socket_mask = EVERYTHING if i in spec.everything_sockets else pair_mask
        locking = i < locked_count
        objects.append(
            GameObjectDef(
                id=owner_id,
                name=owner_id,
                position=place(0.18),
                colliders=(Collider(Box(Vec3(0.1, 0.1, 0.1))),),
                socket=SocketSpec(Vec3(0.0, 0.16, 0.0), 0.15, socket_mask, locking),
            )
        )
        flows["Manipulate"].append(f"User->{broker_id}#0")
        if i in spec.everything_sockets:
            smell_sockets.append(owner_id)
        if locking:
            locking_sockets.append(owner_id)

    for i in range(spec.custom):
        oid = f"custom{i}"
        objects.append(
            GameObjectDef(
                id=oid,
                name=oid,
                position=place(0.1),
                colliders=(Collider(Sphere(0.1)),),
                interactable=InteractableSpec(False, False, f"custom{i}", default_mask),
            )
        )
        flows["Custom"].append(f"User->{oid}#0")

    # Socket flows follow the same layer-overlap rule the graph builder uses,
    # so Everything-masked sockets legitimately multiply the expected count.
    for owner in objects:
        if owner.socket is None:
            continue
        for grab in objects:
            if grab.interactable is None or not grab.interactable.grabbable:
                continue
            if grab.id == owner.id:
                continue
            if layers_overlap(
                grab.interactable.interaction_layers, owner.socket.interaction_layers
            ):
                flows["Socket"].append(f"{grab.id}->{owner.id}#0")

    scene = SceneDefinition(
        scene_id=scene_id,
        layer_registry=tuple(layers),
        objects=tuple(objects),
        spawn_points=(spawn,),
        ground_y=0.0,
    )
    truth = {
        "sceneId": scene_id,
        "counts": {cat: len(ids) for cat, ids in flows.items()},
        "flows": {cat: sorted(ids) for cat, ids in flows.items()},
        "unresponsive": sorted(unresponsive),
        "buggedObjects": sorted(bugged, key=lambda b: b["id"]),
        "smellSockets": smell_sockets,
        "lockingSockets": locking_sockets,
    }
    return scene, truth


def truth_to_json(truth: dict) -> str:
    return json.dumps(truth, indent=2) + "\n"
