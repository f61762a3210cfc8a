"""Deterministic fixed-timestep kinematic world for VR-style interaction.

One `World` is one session: an avatar walking a ground plane with a single
controller (a small sphere) that can grab, trigger-activate and socket
objects.  There is no physics integration — motion is kinematic, dropped
objects rest where released — so identical inputs always produce identical
event logs, which the oracle relies on.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import SpawnIndexError
from .scene_model import (
    EVERYTHING,
    ActionAtom,
    ActionKind,
    SceneDefinition,
    Sphere,
    Vec3,
    intersects,
    layers_overlap,
)

# Controller rest pose relative to the avatar's feet; `reach` is measured
# from this home point, not from the avatar origin (the offset itself is
# longer than the default reach).
CONTROLLER_OFFSET = Vec3(0.3, 1.0, 0.3)
CONTROLLER_MASK = EVERYTHING
YAW_RATE_DEG = 90.0

ACT_GRAB = "grab"
ACT_TRIGGER = "trigger"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.02
    avatar_speed: float = 2.0
    controller_speed: float = 1.0
    reach: float = 1.0
    controller_radius: float = 0.05
    budget_seconds: float = 600.0

    def __post_init__(self) -> None:
        for name in ("dt", "avatar_speed", "controller_speed", "reach", "controller_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.budget_seconds < 0:
            raise ValueError("budget_seconds must be >= 0")
        steps = self.budget_seconds / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("dt must divide budget_seconds evenly")

    @property
    def budget_steps(self) -> int:
        return round(self.budget_seconds / self.dt)

    @property
    def steps_per_second(self) -> int:
        return max(1, round(1.0 / self.dt))


class EventKind(str, Enum):
    HOVER_ENTER = "HoverEnter"
    HOVER_EXIT = "HoverExit"
    SELECT_ENTER = "SelectEnter"
    SELECT_EXIT = "SelectExit"
    ACTIVATED = "Activated"
    SOCKET_SNAPPED = "SocketSnapped"
    CONTACT_WHILE_ACTING = "ContactWhileActing"
    RUNTIME_ERROR = "RuntimeError"


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: EventKind
    subject: str = ""
    socket: str = ""
    action: str = ""
    message: str = ""


def event_to_dict(event: SimEvent) -> dict:
    out = {"t": event.time, "kind": event.kind.value}
    if event.subject:
        out["subject"] = event.subject
    if event.socket:
        out["socket"] = event.socket
    if event.action:
        out["action"] = event.action
    if event.message:
        out["message"] = event.message
    return out


@dataclass(frozen=True)
class Locomotion:
    """Desired ground-plane displacement for one tick (clamped to speed*dt)."""

    delta: Vec3


class World:
    """Mutable session state; advanced in place, one input per tick."""

    def __init__(self, scene: SceneDefinition, spawn_index: int, config: SimConfig, seed: int):
        if not 0 <= spawn_index < len(scene.spawn_points):
            raise SpawnIndexError(spawn_index, len(scene.spawn_points))
        self.scene = scene
        self.config = config
        self.seed = seed
        self.rng = random.Random(seed)
        self.step_count = 0
        self.avatar_pos = scene.spawn_points[spawn_index]
        self.avatar_yaw = 0.0
        self.controller_pos = self.avatar_pos + CONTROLLER_OFFSET
        self.held_object_id: Optional[str] = None
        self.grab_down = False
        self.trigger_down = False
        self.poses = {obj.id: obj.position for obj in scene.objects}
        self.occupancy = {obj.id: None for obj in scene.objects if obj.socket is not None}
        self.events: list = []
        self._defs = scene.objects_by_id()
        self._interactables = tuple(
            (obj.id, obj, obj.bound_radius()) for obj in scene.objects if obj.interactable is not None
        )
        self._sockets = tuple(obj for obj in scene.objects if obj.socket is not None)
        self._probe = Sphere(config.controller_radius)
        self._prev_touched: set = set()
        self._touched: dict = {}

    # -- queries ------------------------------------------------------------

    @property
    def sim_time(self) -> float:
        return round(self.step_count * self.config.dt, 9)

    @property
    def controller_home(self) -> Vec3:
        return self.avatar_pos + CONTROLLER_OFFSET

    def is_touching(self, object_id: str) -> bool:
        """True if the controller overlapped the object after the last step."""
        return object_id in self._touched

    def object_def(self, object_id: str):
        return self._defs[object_id]

    def socket_of(self, object_id: str) -> Optional[str]:
        for owner, occupant in self.occupancy.items():
            if occupant == object_id:
                return owner
        return None

    def attach_point_world(self, owner_id: str) -> Vec3:
        owner = self._defs[owner_id]
        return self.poses[owner_id] + owner.socket.attach_point

    def state_signature(self) -> tuple:
        return (
            self.step_count,
            self.avatar_pos,
            self.avatar_yaw,
            self.controller_pos,
            self.held_object_id,
            self.grab_down,
            self.trigger_down,
            tuple(sorted(self.poses.items())),
            tuple(sorted(self.occupancy.items())),
        )

    # -- stepping -----------------------------------------------------------

    def step(self, inp=None) -> list:
        """Advance one tick with a single input; returns the new events."""
        self.step_count += 1
        t = self.sim_time
        out: list = []

        atom = inp if isinstance(inp, ActionAtom) else None
        if isinstance(inp, Locomotion):
            self._locomote(inp.delta)
        elif atom is not None:
            kind = atom.kind
            if kind is ActionKind.MOVE:
                self._move_controller(atom.direction)
            elif kind is ActionKind.ROTATE:
                self.avatar_yaw = (self.avatar_yaw + atom.axis_sign * YAW_RATE_DEG * self.config.dt) % 360.0
            elif kind is ActionKind.TELEPORT:
                self._teleport(atom.spawn_index, t, out)
        elif inp is not None:
            out.append(SimEvent(t, EventKind.RUNTIME_ERROR, message=f"unknown input {inp!r}"))

        if self.held_object_id is not None:
            self.poses[self.held_object_id] = self.controller_pos

        if atom is not None:
            if atom.kind is ActionKind.GRAB_PRESS:
                self._grab_press(t, out)
            elif atom.kind is ActionKind.GRAB_RELEASE:
                self._grab_release(t, out)
            elif atom.kind is ActionKind.TRIGGER_PRESS:
                self._trigger_press(t, out)
            elif atom.kind is ActionKind.TRIGGER_RELEASE:
                self.trigger_down = False

        touched = self._sweep()
        self._touched = {oid: solid for _, oid, solid in touched}
        now = set(self._touched)
        for oid in sorted(self._prev_touched - now):
            out.append(SimEvent(t, EventKind.HOVER_EXIT, subject=oid))
        for oid in sorted(now - self._prev_touched):
            out.append(SimEvent(t, EventKind.HOVER_ENTER, subject=oid))
        self._prev_touched = now

        self.events.extend(out)
        return out

    # -- motion -------------------------------------------------------------

    def _locomote(self, delta: Vec3) -> None:
        dx, dz = delta.x, delta.z
        dist = math.sqrt(dx * dx + dz * dz)
        if dist <= 0:
            return
        max_step = self.config.avatar_speed * self.config.dt
        scale = min(1.0, max_step / dist)
        move = Vec3(dx * scale, 0.0, dz * scale)
        self.avatar_pos = self.avatar_pos + move
        self.controller_pos = self.controller_pos + move

    def _move_controller(self, direction: Vec3) -> None:
        step = direction.scaled(self.config.controller_speed * self.config.dt)
        pos = self.controller_pos + step
        home = self.controller_home
        offset = pos - home
        length = offset.length()
        if length > self.config.reach:
            pos = home + offset.scaled(self.config.reach / length)
        self.controller_pos = pos

    def _teleport(self, spawn_index: int, t: float, out: list) -> None:
        if not 0 <= spawn_index < len(self.scene.spawn_points):
            out.append(
                SimEvent(t, EventKind.RUNTIME_ERROR, message=f"teleport to invalid spawn {spawn_index}")
            )
            return
        self.avatar_pos = self.scene.spawn_points[spawn_index]
        self.controller_pos = self.avatar_pos + CONTROLLER_OFFSET

    # -- buttons ------------------------------------------------------------

    def _grab_press(self, t: float, out: list) -> None:
        if self.grab_down:
            return
        self.grab_down = True
        if self.held_object_id is not None:
            return
        contacts = self._sweep()
        locked = {
            occupant
            for owner, occupant in self.occupancy.items()
            if occupant is not None and self._defs[owner].socket.locking
        }
        nearest_contact = None
        for _, oid, solid in contacts:
            if nearest_contact is None:
                nearest_contact = oid
            spec = self._defs[oid].interactable
            if spec is None or not spec.grabbable:
                continue
            if not solid or oid in locked:
                continue
            if not layers_overlap(spec.interaction_layers, CONTROLLER_MASK):
                continue
            for owner, occupant in self.occupancy.items():
                if occupant == oid:
                    self.occupancy[owner] = None
            self.held_object_id = oid
            self.poses[oid] = self.controller_pos
            out.append(SimEvent(t, EventKind.SELECT_ENTER, subject=oid))
            return
        if nearest_contact is not None:
            out.append(
                SimEvent(t, EventKind.CONTACT_WHILE_ACTING, subject=nearest_contact, action=ACT_GRAB)
            )

    def _trigger_press(self, t: float, out: list) -> None:
        if self.trigger_down:
            return
        self.trigger_down = True
        held = self.held_object_id
        if held is not None:
            if self._defs[held].interactable.activatable:
                out.append(SimEvent(t, EventKind.ACTIVATED, subject=held))
            else:
                out.append(SimEvent(t, EventKind.CONTACT_WHILE_ACTING, subject=held, action=ACT_TRIGGER))
            return
        contacts = self._sweep()
        if contacts:
            out.append(
                SimEvent(t, EventKind.CONTACT_WHILE_ACTING, subject=contacts[0][1], action=ACT_TRIGGER)
            )

    def _grab_release(self, t: float, out: list) -> None:
        if not self.grab_down:
            return
        self.grab_down = False
        oid = self.held_object_id
        if oid is None:
            return
        self.held_object_id = None
        out.append(SimEvent(t, EventKind.SELECT_EXIT, subject=oid))

        pos = self.poses[oid]
        spec = self._defs[oid].interactable
        best = None
        for owner in self._sockets:
            if owner.id == oid or self.occupancy[owner.id] is not None:
                continue
            if not layers_overlap(spec.interaction_layers, owner.socket.interaction_layers):
                continue
            attach = self.poses[owner.id] + owner.socket.attach_point
            dist = pos.distance_to(attach)
            if dist <= owner.socket.zone_radius and (best is None or (dist, owner.id) < best[:2]):
                best = (dist, owner.id, attach)
        if best is not None:
            _, owner_id, attach = best
            self.poses[oid] = attach
            self.occupancy[owner_id] = oid
            out.append(SimEvent(t, EventKind.SOCKET_SNAPPED, subject=oid, socket=owner_id))
            return
        rest_y = self.scene.ground_y - self._defs[oid].bottom_offset()
        if pos.y < rest_y:
            self.poses[oid] = Vec3(pos.x, rest_y, pos.z)

    # -- collision sweep ----------------------------------------------------

    def _sweep(self) -> list:
        """Interactables overlapping the controller: sorted (dist, id, solid)."""
        c = self.controller_pos
        cx, cy, cz = c.x, c.y, c.z
        radius = self.config.controller_radius
        probe = self._probe
        poses = self.poses
        found = []
        for oid, obj, cull in self._interactables:
            p = poses[oid]
            dx = p.x - cx
            dy = p.y - cy
            dz = p.z - cz
            d2 = dx * dx + dy * dy + dz * dz
            rr = cull + radius
            if d2 > rr * rr:
                continue
            hit = False
            solid = False
            for col in obj.colliders:
                center = Vec3(p.x + col.offset.x, p.y + col.offset.y, p.z + col.offset.z)
                if intersects(probe, c, col.shape, center):
                    hit = True
                    if not col.is_trigger:
                        solid = True
                        break
            if hit:
                found.append((math.sqrt(d2), oid, solid))
        found.sort()
        return found


def spawn(
    scene: SceneDefinition,
    spawn_index: int,
    config: Optional[SimConfig] = None,
    seed: int = 0,
) -> World:
    """Create a session world with the avatar at the given spawn point."""
    return World(scene, spawn_index, config or SimConfig(), seed)
