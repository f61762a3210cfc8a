"""Core domain types shared by every other module.

Scenes are flat lists of world-positioned objects.  Colliders are
axis-aligned (object yaw affects forward vectors only, never collider
orientation), which keeps the overlap tests exact and cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

# Interaction layer masks are 32-bit sets resolved against the scene's
# ordered layer registry.
EVERYTHING = 0xFFFFFFFF
NOTHING = 0
MAX_LAYERS = 32


@dataclass(frozen=True)
class Vec3:
    """Point or direction in meters, world frame, y up."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def length(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).length()

    def normalized(self) -> "Vec3":
        n = self.length()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def to_list(self) -> list:
        # float() so that int-built vectors serialize identically to parsed ones
        return [float(self.x), float(self.y), float(self.z)]

    @staticmethod
    def from_seq(seq) -> "Vec3":
        x, y, z = seq
        return Vec3(float(x), float(y), float(z))


ORIGIN = Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Sphere:
    """Sphere collider shape, radius in meters."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"sphere radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box collider shape, half extents in meters."""

    half_extents: Vec3

    def __post_init__(self):
        h = self.half_extents
        if not (h.x > 0.0 and h.y > 0.0 and h.z > 0.0 and h.is_finite()):
            raise ValueError(f"box half extents must be positive, got {h}")


Shape = Union[Sphere, Box]


@dataclass(frozen=True)
class Collider:
    """A shape attached to an object at a local offset from its origin."""

    shape: Shape
    offset: Vec3 = ORIGIN
    is_trigger: bool = False

    def world_center(self, owner_pos: Vec3) -> Vec3:
        return owner_pos + self.offset

    def bound_radius(self) -> float:
        """Radius of a sphere (around the owner origin) enclosing this collider."""
        if isinstance(self.shape, Sphere):
            return self.offset.length() + self.shape.radius
        return self.offset.length() + self.shape.half_extents.length()

    def bottom(self) -> float:
        """Lowest local y reached by this collider."""
        if isinstance(self.shape, Sphere):
            return self.offset.y - self.shape.radius
        return self.offset.y - self.shape.half_extents.y


def intersects(shape_a: Shape, center_a: Vec3, shape_b: Shape, center_b: Vec3) -> bool:
    """True iff the two world-space volumes overlap or touch.

    Centers are the shapes' world positions (owner position plus collider
    offset).  Symmetric; touching surfaces count as intersecting.
    """
    if isinstance(shape_a, Sphere) and isinstance(shape_b, Sphere):
        reach = shape_a.radius + shape_b.radius
        return center_a.distance_to(center_b) <= reach
    if isinstance(shape_a, Sphere):
        return _sphere_box(shape_a.radius, center_a, shape_b, center_b)
    if isinstance(shape_b, Sphere):
        return _sphere_box(shape_b.radius, center_b, shape_a, center_a)
    ha, hb = shape_a.half_extents, shape_b.half_extents
    return (
        abs(center_a.x - center_b.x) <= ha.x + hb.x
        and abs(center_a.y - center_b.y) <= ha.y + hb.y
        and abs(center_a.z - center_b.z) <= ha.z + hb.z
    )


def _sphere_box(radius: float, center: Vec3, box: Box, box_center: Vec3) -> bool:
    h = box.half_extents
    cx = min(max(center.x, box_center.x - h.x), box_center.x + h.x)
    cy = min(max(center.y, box_center.y - h.y), box_center.y + h.y)
    cz = min(max(center.z, box_center.z - h.z), box_center.z + h.z)
    dx, dy, dz = center.x - cx, center.y - cy, center.z - cz
    return dx * dx + dy * dy + dz * dz <= radius * radius


def layers_overlap(a: int, b: int) -> bool:
    """True iff the two layer masks share at least one layer."""
    return (a & b) != 0


class ActionKind(str, Enum):
    GRAB_PRESS = "grab_press"
    GRAB_RELEASE = "grab_release"
    TRIGGER_PRESS = "trigger_press"
    TRIGGER_RELEASE = "trigger_release"
    MOVE = "move"
    ROTATE = "rotate"
    TELEPORT = "teleport"


@dataclass(frozen=True)
class ActionAtom:
    """One atomic controller input.

    Button atoms are instantaneous; continuous grabs/triggers hold between a
    press and the matching release.  Move/rotate atoms describe motion at
    nominal speed for ``duration`` seconds; the simulator consumes them one
    timestep at a time.
    """

    kind: ActionKind
    direction: Optional[Vec3] = None
    duration: float = 0.0
    axis_sign: int = 0
    spawn_index: int = 0

    @staticmethod
    def move(direction: Vec3, duration: float) -> "ActionAtom":
        if duration <= 0.0:
            raise ValueError("move duration must be positive")
        return ActionAtom(ActionKind.MOVE, direction=direction.normalized(), duration=duration)

    @staticmethod
    def rotate(axis_sign: int, duration: float) -> "ActionAtom":
        if duration <= 0.0:
            raise ValueError("rotate duration must be positive")
        return ActionAtom(ActionKind.ROTATE, axis_sign=1 if axis_sign >= 0 else -1, duration=duration)

    @staticmethod
    def teleport(spawn_index: int) -> "ActionAtom":
        return ActionAtom(ActionKind.TELEPORT, spawn_index=spawn_index)


GRAB_PRESS = ActionAtom(ActionKind.GRAB_PRESS)
GRAB_RELEASE = ActionAtom(ActionKind.GRAB_RELEASE)
TRIGGER_PRESS = ActionAtom(ActionKind.TRIGGER_PRESS)
TRIGGER_RELEASE = ActionAtom(ActionKind.TRIGGER_RELEASE)


@dataclass(frozen=True)
class InteractableSpec:
    """Interaction capabilities of an object.

    ``activatable`` implies ``grabbable``: firing requires a persistent grab.
    ``custom_tag`` declares a scene-specific interaction that is modeled and
    counted but never executed.
    """

    grabbable: bool = False
    activatable: bool = False
    custom_tag: Optional[str] = None
    interaction_layers: int = EVERYTHING

    def __post_init__(self):
        if self.activatable and not self.grabbable:
            raise ValueError("activatable requires grabbable")


@dataclass(frozen=True)
class SocketSpec:
    """A dedicated receptacle that snaps a matching held object in place."""

    attach_point: Vec3
    zone_radius: float
    interaction_layers: int = EVERYTHING
    locking: bool = False

    def __post_init__(self):
        if not (self.zone_radius > 0.0 and math.isfinite(self.zone_radius)):
            raise ValueError(f"zone radius must be positive, got {self.zone_radius}")
        if not self.attach_point.is_finite():
            raise ValueError("attach point must be finite")


@dataclass(frozen=True)
class GameObjectDef:
    """A world object: unique id, pose, colliders, optional capabilities."""

    id: str
    name: str
    position: Vec3
    yaw_deg: float = 0.0
    colliders: tuple = ()
    go_layer: str = "Default"
    interactable: Optional[InteractableSpec] = None
    socket: Optional[SocketSpec] = None

    def has_interaction(self) -> bool:
        return self.interactable is not None or self.socket is not None

    def bound_radius(self) -> float:
        return max((c.bound_radius() for c in self.colliders), default=0.0)

    def bottom_offset(self) -> float:
        """Lowest local y over all colliders (resting height is -bottom)."""
        return min((c.bottom() for c in self.colliders), default=0.0)

    def is_trigger_only(self) -> bool:
        return bool(self.colliders) and all(c.is_trigger for c in self.colliders)


@dataclass(frozen=True)
class SceneDefinition:
    """A parsed, validated scene: layer registry, objects, spawn points."""

    scene_id: str
    layer_registry: tuple
    objects: tuple
    spawn_points: tuple
    ground_y: float = 0.0

    def objects_by_id(self) -> dict:
        return {o.id: o for o in self.objects}

    def layer_bit(self, name: str) -> int:
        return 1 << self.layer_registry.index(name)

    def mask_names(self, mask: int) -> list:
        """Named layers present in a mask (unnamed high bits ignored)."""
        return [name for i, name in enumerate(self.layer_registry) if mask & (1 << i)]
