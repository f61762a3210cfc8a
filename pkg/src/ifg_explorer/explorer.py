"""Graph-guided greedy test agent.

Repeatedly picks the nearest pending executable flow (by avatar distance to
the object the user must touch first), walks there, runs the flow's action
script, and records the outcome.  A flow that fails once is requeued and
retried; a second failure finalizes it as InitiatedNotActivated when
contact evidence exists, Unreachable otherwise.
"""
from __future__ import annotations

import time
from typing import Callable, Optional

from .errors import NotExecutableError
from .ifg import Category, InteractionFlowGraph, build_ifg
from .metrics import FlowState, TestReport
from .scene_model import (
    GRAB_PRESS,
    GRAB_RELEASE,
    TRIGGER_PRESS,
    TRIGGER_RELEASE,
    ActionAtom,
    Vec3,
)
from .session import Session
from .sim import CONTROLLER_OFFSET, EventKind, Locomotion, SimConfig

DEFAULT_FLOW_TIMEOUT = 30.0
HOLD_SECONDS = 0.5
CLEAR_DISTANCE = 0.6
MAX_ATTEMPTS = 2


class _BudgetExhausted(Exception):
    pass


class _Abort(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class GreedyExplorer:
    def __init__(
        self,
        scene,
        graph: InteractionFlowGraph,
        config: Optional[SimConfig] = None,
        seed: int = 0,
        spawn_index: int = 0,
        flow_timeout: float = DEFAULT_FLOW_TIMEOUT,
        flow_filter: Optional[Callable] = None,
    ):
        self.session = Session(scene, graph, config, seed, spawn_index)
        self.flow_timeout = flow_timeout
        self.flow_filter = flow_filter
        self._evidence: dict = {}

    # -- planning -----------------------------------------------------------

    def plan_next(self) -> Optional[str]:
        """Nearest pending flow id (ties by id), or None when done."""
        sess = self.session
        avatar = sess.world.avatar_pos
        best_key = None
        best_id = None
        for flow_id, flow in sess.flows_by_id.items():
            if sess.statuses[flow_id].state is not FlowState.PENDING:
                continue
            if self.flow_filter is not None and not self.flow_filter(flow):
                continue
            key = (avatar.distance_to(sess.world.poses[flow.subject_id]), flow_id)
            if best_key is None or key < best_key:
                best_key, best_id = key, flow_id
        return best_id

    # -- execution ----------------------------------------------------------

    def execute_flow(self, flow_id: str):
        sess = self.session
        flow = sess.flows_by_id.get(flow_id)
        if flow is None:
            sess.graph.interaction(flow_id)  # KeyError for unknown ids
            raise NotExecutableError(flow_id)
        status = sess.statuses[flow_id]
        status.attempts += 1
        deadline = sess.world.step_count + round(self.flow_timeout / sess.config.dt)
        try:
            if flow.category is Category.SOCKET:
                self._socket_script(flow, deadline)
            elif flow.category is Category.FIRE:
                self._fire_script(flow, deadline)
            else:
                self._manipulate_script(flow, deadline)
        except _BudgetExhausted:
            return status
        except _Abort as abort:
            if abort.reason == "locked":
                status.mark_unreachable("locking-socket")
            elif status.attempts >= MAX_ATTEMPTS:
                evidence = sorted(self._evidence.get(flow_id, ()))
                if evidence:
                    status.mark_initiated(evidence)
                else:
                    status.mark_unreachable(abort.reason)
            return status
        return status

    def run(self) -> Session:
        sess = self.session
        while not sess.exhausted:
            flow_id = self.plan_next()
            if flow_id is None:
                break
            self.execute_flow(flow_id)
        sess.finish()
        return sess

    # -- flow scripts -------------------------------------------------------

    def _manipulate_script(self, flow, deadline: int) -> None:
        self._acquire(flow, deadline)
        for _ in range(round(HOLD_SECONDS / self.session.config.dt)):
            self._tick(None, flow)
        self._tick(GRAB_RELEASE, flow)
        self._require_activated(flow)

    def _fire_script(self, flow, deadline: int) -> None:
        self._acquire(flow, deadline)
        self._tick(TRIGGER_PRESS, flow)
        self._tick(TRIGGER_RELEASE, flow)
        self._tick(GRAB_RELEASE, flow)
        self._require_activated(flow)

    def _socket_script(self, flow, deadline: int) -> None:
        sess = self.session
        world = sess.world
        owner_id = flow.socket_owner_id
        owner = world.object_def(owner_id)
        occupant = world.occupancy[owner_id]
        if occupant is not None:
            if owner.socket.locking:
                raise _Abort("locked")
            self._clear_socket(owner_id, occupant, flow, deadline)
        self._acquire(flow, deadline)
        attach = world.attach_point_world(owner_id)
        zone = owner.socket.zone_radius
        self._walk_stance(attach, flow, deadline)
        self._reach_point(attach, min(zone * 0.5, max(zone - 0.03, 0.01)), flow, deadline)
        self._tick(GRAB_RELEASE, flow)
        self._require_activated(flow)

    def _require_activated(self, flow) -> None:
        if self.session.statuses[flow.flow_id].state is not FlowState.ACTIVATED:
            raise _Abort("no-activation")

    # -- navigation and manipulation primitives -----------------------------

    def _tick(self, inp, flow):
        events = self.session.tick(inp)
        if events is None:
            raise _BudgetExhausted
        if flow is not None:
            for ev in events:
                if (
                    ev.kind is EventKind.CONTACT_WHILE_ACTING
                    and ev.subject == flow.subject_id
                ):
                    self._evidence.setdefault(flow.flow_id, []).append(ev.time)
        return events

    def _walk_stance(self, point: Vec3, flow, deadline: int) -> None:
        """Walk until the controller home sits over the target's column."""
        world = self.session.world
        tx = point.x - CONTROLLER_OFFSET.x
        tz = point.z - CONTROLLER_OFFSET.z
        while True:
            dx = tx - world.avatar_pos.x
            dz = tz - world.avatar_pos.z
            if dx * dx + dz * dz <= 1e-12:
                return
            if world.step_count >= deadline:
                raise _Abort("timeout")
            self._tick(Locomotion(Vec3(dx, 0.0, dz)), flow)

    def _reach_point(self, point: Vec3, tolerance: float, flow, deadline: int) -> None:
        world = self.session.world
        dt = self.session.config.dt
        while True:
            delta = point - world.controller_pos
            if delta.length() <= tolerance:
                return
            if world.step_count >= deadline:
                raise _Abort("timeout")
            self._tick(ActionAtom.move(delta, dt), flow)

    def _acquire(self, flow, deadline: int) -> None:
        """Navigate to the flow's subject and grab it; aborts on failure."""
        sess = self.session
        world = sess.world
        subject = flow.subject_id
        holder = world.socket_of(subject)
        if holder is not None and world.object_def(holder).socket.locking:
            raise _Abort("locked")
        target = world.poses[subject]
        self._walk_stance(target, flow, deadline)
        dt = sess.config.dt
        while not world.is_touching(subject):
            if world.step_count >= deadline:
                raise _Abort("timeout")
            delta = world.poses[subject] - world.controller_pos
            if delta.length() <= 1e-9:
                raise _Abort("timeout")
            self._tick(ActionAtom.move(delta, dt), flow)
        press_events = self._tick(GRAB_PRESS, flow)
        if world.held_object_id == subject:
            return
        contacted = any(
            ev.kind is EventKind.CONTACT_WHILE_ACTING and ev.subject == subject
            for ev in press_events
        )
        grabbed_other = world.held_object_id is not None
        self._tick(GRAB_RELEASE, flow)
        if grabbed_other:
            raise _Abort("misgrab")
        raise _Abort("contact" if contacted else "timeout")

    def _clear_socket(self, owner_id: str, occupant: str, flow, deadline: int) -> None:
        """Move a non-locking socket's occupant aside to free the zone."""
        sess = self.session
        world = sess.world
        target = world.poses[occupant]
        self._walk_stance(target, flow, deadline)
        dt = sess.config.dt
        while not world.is_touching(occupant):
            if world.step_count >= deadline:
                raise _Abort("timeout")
            delta = world.poses[occupant] - world.controller_pos
            if delta.length() <= 1e-9:
                raise _Abort("timeout")
            self._tick(ActionAtom.move(delta, dt), flow)
        self._tick(GRAB_PRESS, flow)
        if world.held_object_id != occupant:
            self._tick(GRAB_RELEASE, flow)
            raise _Abort("timeout")
        attach = world.attach_point_world(owner_id)
        away = Vec3(world.avatar_pos.x - attach.x, 0.0, world.avatar_pos.z - attach.z)
        if away.length() <= 1e-9:
            away = Vec3(1.0, 0.0, 0.0)
        drop = attach + away.normalized().scaled(CLEAR_DISTANCE)
        self._walk_stance(drop, flow, deadline)
        self._reach_point(drop, 0.03, flow, deadline)
        self._tick(GRAB_RELEASE, flow)
        if world.occupancy[owner_id] is not None:
            raise _Abort("timeout")


def run_greedy_session(
    scene,
    graph: Optional[InteractionFlowGraph] = None,
    config: Optional[SimConfig] = None,
    seed: int = 0,
    spawn_index: int = 0,
    flow_timeout: float = DEFAULT_FLOW_TIMEOUT,
    smell_threshold: Optional[int] = None,
):
    """Run one full greedy session; returns (TestReport, timeline rows)."""
    if graph is None:
        graph = build_ifg(scene)
    started = time.perf_counter()
    explorer = GreedyExplorer(
        scene, graph, config, seed, spawn_index, flow_timeout=flow_timeout
    )
    explorer.run()
    kwargs = {} if smell_threshold is None else {"smell_threshold": smell_threshold}
    report = explorer.session.build_report(
        "greedy", wall_clock_seconds=time.perf_counter() - started, **kwargs
    )
    return report, explorer.session.rows
