"""Session plumbing shared by the greedy explorer and the random baseline.

A Session owns one world plus the per-flow status table, translates world
events into flow activations as they happen, and samples the coverage
timeline once per simulated second.  Strategies only decide which input to
feed each tick.
"""
from __future__ import annotations

import math
from typing import Optional

from .ifg import Category, InteractionFlowGraph
from .metrics import (
    FlowState,
    TestReport,
    TimelineRow,
    compute_ifc,
    detect_unresponsive,
    fresh_statuses,
)
from .ifg import DEFAULT_BROKER_EDGE_THRESHOLD, detect_smells
from .scene_model import SceneDefinition
from .sim import EventKind, SimConfig, spawn


class Session:
    def __init__(
        self,
        scene: SceneDefinition,
        graph: InteractionFlowGraph,
        config: Optional[SimConfig] = None,
        seed: int = 0,
        spawn_index: int = 0,
    ):
        self.scene = scene
        self.graph = graph
        self.config = config or SimConfig()
        self.seed = seed
        self.world = spawn(scene, spawn_index, self.config, seed)
        self.statuses = fresh_statuses(graph)
        self.flows_by_id = {flow.flow_id: flow for flow in graph.flows()}

        self._manip_flow = {}
        self._fire_flow = {}
        self._socket_flow = {}
        self._totals = {Category.FIRE: 0, Category.MANIPULATE: 0, Category.SOCKET: 0}
        for flow in graph.flows():
            self._totals[flow.category] += 1
            if flow.category is Category.MANIPULATE:
                self._manip_flow[flow.subject_id] = flow.flow_id
            elif flow.category is Category.FIRE:
                self._fire_flow[flow.subject_id] = flow.flow_id
            elif flow.category is Category.SOCKET:
                self._socket_flow[(flow.subject_id, flow.socket_owner_id)] = flow.flow_id
        self._activated = {Category.FIRE: 0, Category.MANIPULATE: 0, Category.SOCKET: 0}

        self.rows: list = []
        self._sampled_through = -1
        self._record_second(0)

    # -- stepping -----------------------------------------------------------

    @property
    def exhausted(self) -> bool:
        return self.world.step_count >= self.config.budget_steps

    def tick(self, inp=None):
        """Advance one step; returns the new events, or None past the budget."""
        if self.exhausted:
            return None
        events = self.world.step(inp)
        for ev in events:
            self._account(ev)
        if self.world.step_count % self.config.steps_per_second == 0:
            self._record_second(self.world.step_count // self.config.steps_per_second)
        return events

    def idle(self, ticks: int) -> None:
        for _ in range(ticks):
            if self.tick() is None:
                return

    def finish(self) -> None:
        """Pad the timeline out to the budget; coverage no longer changes."""
        whole = math.floor(self.config.budget_seconds)
        for second in range(self._sampled_through + 1, whole + 1):
            self._record_second(second)
        if self.config.budget_seconds > whole and (
            not self.rows or self.rows[-1].t_seconds < self.config.budget_seconds
        ):
            self.rows.append(self._row(self.config.budget_seconds))

    # -- accounting ---------------------------------------------------------

    def _account(self, ev) -> None:
        flow_id = None
        if ev.kind is EventKind.SELECT_ENTER:
            flow_id = self._manip_flow.get(ev.subject)
        elif ev.kind is EventKind.ACTIVATED:
            flow_id = self._fire_flow.get(ev.subject)
        elif ev.kind is EventKind.SOCKET_SNAPPED:
            flow_id = self._socket_flow.get((ev.subject, ev.socket))
        if flow_id is None:
            return
        status = self.statuses[flow_id]
        if status.state is not FlowState.ACTIVATED:
            status.mark_activated(ev.time)
            self._activated[self.flows_by_id[flow_id].category] += 1

    def _ratio(self, category: Category) -> Optional[float]:
        total = self._totals[category]
        return None if total == 0 else self._activated[category] / total

    def _row(self, t: float) -> TimelineRow:
        total = sum(self._totals.values())
        overall = None if total == 0 else sum(self._activated.values()) / total
        return TimelineRow(
            t,
            self._ratio(Category.FIRE),
            self._ratio(Category.MANIPULATE),
            self._ratio(Category.SOCKET),
            overall,
        )

    def _record_second(self, second: int) -> None:
        if second <= self._sampled_through:
            return
        self._sampled_through = second
        self.rows.append(self._row(float(second)))

    # -- report -------------------------------------------------------------

    def build_report(
        self,
        strategy: str,
        wall_clock_seconds: Optional[float] = None,
        smell_threshold: int = DEFAULT_BROKER_EDGE_THRESHOLD,
    ) -> TestReport:
        coverage = compute_ifc(self.graph, self.statuses)
        findings = detect_unresponsive(self.world.events, self.graph, self.statuses)
        smells = detect_smells(self.scene, self.graph, smell_threshold)
        errors = [
            {"t": ev.time, "message": ev.message}
            for ev in self.world.events
            if ev.kind is EventKind.RUNTIME_ERROR
        ]
        return TestReport(
            scene_id=self.scene.scene_id,
            strategy=strategy,
            seed=self.seed,
            config=self.config,
            coverage=coverage,
            unresponsive=findings,
            smells=smells,
            runtime_errors=errors,
            simulated_seconds=self.world.sim_time,
            wall_clock_seconds=wall_clock_seconds,
        )
