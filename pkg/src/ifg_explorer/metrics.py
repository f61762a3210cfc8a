"""Coverage accounting, the unresponsive-interaction oracle, and reports.

Interaction Flow Coverage (IFC) is activated/total per category over the
executable flows of a graph; the headline "prevalent" ratio spans Fire,
Manipulate and Socket (Custom flows are counted but not executable, so
they are excluded from the denominator).  Degenerate 0/0 categories render
as null, never as 0 or 1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

from .errors import IdMismatchError, SchemaError
from .ifg import CATEGORY_ORDER, PREVALENT_CATEGORIES, Category, InteractionFlowGraph
from .sim import ACT_GRAB, ACT_TRIGGER, EventKind, SimConfig

REPORT_SCHEMA_VERSION = 1


class FlowState(str, Enum):
    PENDING = "Pending"
    ACTIVATED = "Activated"
    INITIATED_NOT_ACTIVATED = "InitiatedNotActivated"
    UNREACHABLE = "Unreachable"


@dataclass
class FlowStatus:
    """Per-flow session outcome; Activated is absorbing."""

    flow_id: str
    state: FlowState = FlowState.PENDING
    activated_at: Optional[float] = None
    initiated_at: tuple = ()
    attempts: int = 0
    reason: str = ""

    def mark_activated(self, t: float) -> None:
        if self.state is not FlowState.ACTIVATED:
            self.state = FlowState.ACTIVATED
            self.activated_at = t
            self.attempts = max(self.attempts, 1)

    def mark_initiated(self, times) -> None:
        if self.state is FlowState.ACTIVATED:
            return
        self.state = FlowState.INITIATED_NOT_ACTIVATED
        self.initiated_at = tuple(times)
        self.attempts = max(self.attempts, 1)

    def mark_unreachable(self, reason: str) -> None:
        if self.state is FlowState.ACTIVATED:
            return
        self.state = FlowState.UNREACHABLE
        self.reason = reason
        self.attempts = max(self.attempts, 1)


def fresh_statuses(graph: InteractionFlowGraph) -> dict:
    return {flow.flow_id: FlowStatus(flow.flow_id) for flow in graph.flows()}


class CategoryCoverage(NamedTuple):
    activated: int
    total: int

    @property
    def ratio(self) -> Optional[float]:
        if self.total == 0:
            return None
        return self.activated / self.total


@dataclass
class FlowCoverage:
    per_flow: dict
    per_category: dict
    prevalent: CategoryCoverage
    objects: CategoryCoverage


def compute_ifc(graph: InteractionFlowGraph, statuses: dict) -> FlowCoverage:
    """Category and headline ratios from per-flow statuses.

    Every object contributes one unit per interaction, not one per object;
    see object coverage below for the blunter metric.
    """
    flows = graph.flows()
    expected = {flow.flow_id for flow in flows}
    if expected != set(statuses):
        missing = sorted(expected - set(statuses))[:3]
        extra = sorted(set(statuses) - expected)[:3]
        raise IdMismatchError(f"status ids do not match graph flows (missing={missing}, extra={extra})")

    per_category = {}
    for cat in CATEGORY_ORDER:
        cat_flows = [f for f in flows if f.category is cat]
        activated = sum(
            1 for f in cat_flows if statuses[f.flow_id].state is FlowState.ACTIVATED
        )
        per_category[cat] = CategoryCoverage(activated, len(cat_flows))
    prevalent = CategoryCoverage(
        sum(per_category[c].activated for c in PREVALENT_CATEGORIES),
        sum(per_category[c].total for c in PREVALENT_CATEGORIES),
    )
    return FlowCoverage(dict(statuses), per_category, prevalent, object_coverage(graph, statuses))


def object_coverage(graph: InteractionFlowGraph, statuses: dict) -> CategoryCoverage:
    """Objects with at least one activated flow / objects with any flow.

    Deliberately coarser than IFC: an object whose grab works but whose
    fire never ran still counts as covered here.
    """
    subjects = {}
    for flow in graph.flows():
        status = statuses.get(flow.flow_id)
        done = status is not None and status.state is FlowState.ACTIVATED
        subjects[flow.subject_id] = subjects.get(flow.subject_id, False) or done
    return CategoryCoverage(sum(1 for v in subjects.values() if v), len(subjects))


# ---------------------------------------------------------------------------
# unresponsive-interaction oracle

@dataclass(frozen=True)
class UnresponsiveFinding:
    interactable_id: str
    interaction_id: str
    action: str
    evidence_times: tuple


def detect_unresponsive(events, graph: InteractionFlowGraph, statuses=None) -> list:
    """Flows with contact-while-acting evidence but no activation event.

    Works purely off the event log: activation events are matched per flow,
    grab contacts attach to the subject's Manipulate flow, and trigger
    contacts attach to its Fire flow only when they fell inside one of the
    object's hold intervals (reconstructed from SelectEnter/SelectExit).
    Flows with zero recorded intersections are never flagged — those are
    unreached, not unresponsive.
    """
    activations: dict = {}
    grab_contacts: dict = {}
    trigger_contacts: dict = {}
    holds: dict = {}
    open_holds: dict = {}
    for ev in events:
        if ev.kind is EventKind.SELECT_ENTER:
            activations.setdefault(("manipulate", ev.subject), []).append(ev.time)
            open_holds[ev.subject] = ev.time
        elif ev.kind is EventKind.SELECT_EXIT:
            start = open_holds.pop(ev.subject, None)
            if start is not None:
                holds.setdefault(ev.subject, []).append((start, ev.time))
        elif ev.kind is EventKind.ACTIVATED:
            activations.setdefault(("fire", ev.subject), []).append(ev.time)
        elif ev.kind is EventKind.SOCKET_SNAPPED:
            activations.setdefault(("socket", ev.subject, ev.socket), []).append(ev.time)
        elif ev.kind is EventKind.CONTACT_WHILE_ACTING:
            if ev.action == ACT_GRAB:
                grab_contacts.setdefault(ev.subject, []).append(ev.time)
            elif ev.action == ACT_TRIGGER:
                trigger_contacts.setdefault(ev.subject, []).append(ev.time)
    for subject, start in open_holds.items():
        holds.setdefault(subject, []).append((start, float("inf")))

    def held_at(subject: str, t: float) -> bool:
        return any(lo <= t <= hi for lo, hi in holds.get(subject, ()))

    findings = []
    for flow in graph.flows():
        subject = flow.subject_id
        if flow.category is Category.MANIPULATE:
            key = ("manipulate", subject)
            evidence = grab_contacts.get(subject, [])
            action = ACT_GRAB
        elif flow.category is Category.FIRE:
            key = ("fire", subject)
            evidence = [t for t in trigger_contacts.get(subject, []) if held_at(subject, t)]
            action = ACT_TRIGGER
        else:
            continue
        if evidence and not activations.get(key):
            findings.append(
                UnresponsiveFinding(subject, flow.flow_id, action, tuple(sorted(evidence)))
            )
    findings.sort(key=lambda f: (f.interactable_id, f.interaction_id))
    if statuses is not None:
        findings = [
            f
            for f in findings
            if statuses.get(f.interaction_id) is None
            or statuses[f.interaction_id].state is not FlowState.ACTIVATED
        ]
    return findings


def recount_activated_flows(events, graph: InteractionFlowGraph) -> dict:
    """Activated flow ids per category straight from an event log."""
    seen = {cat: set() for cat in CATEGORY_ORDER}
    manipulate = {}
    fire = {}
    socket = {}
    for flow in graph.flows():
        if flow.category is Category.MANIPULATE:
            manipulate[flow.subject_id] = flow.flow_id
        elif flow.category is Category.FIRE:
            fire[flow.subject_id] = flow.flow_id
        elif flow.category is Category.SOCKET:
            socket[(flow.subject_id, flow.socket_owner_id)] = flow.flow_id
    for ev in events:
        if ev.kind is EventKind.SELECT_ENTER and ev.subject in manipulate:
            seen[Category.MANIPULATE].add(manipulate[ev.subject])
        elif ev.kind is EventKind.ACTIVATED and ev.subject in fire:
            seen[Category.FIRE].add(fire[ev.subject])
        elif ev.kind is EventKind.SOCKET_SNAPPED and (ev.subject, ev.socket) in socket:
            seen[Category.SOCKET].add(socket[(ev.subject, ev.socket)])
    return seen


# ---------------------------------------------------------------------------
# timeline

@dataclass(frozen=True)
class TimelineRow:
    t_seconds: float
    fire: Optional[float]
    manipulate: Optional[float]
    socket: Optional[float]
    total: Optional[float]


def timeline_to_csv(rows) -> str:
    def cell(value) -> str:
        return "" if value is None else "%.6f" % value

    lines = ["t_seconds,fire,manipulate,socket,total"]
    for row in rows:
        lines.append(
            "%g,%s,%s,%s,%s"
            % (row.t_seconds, cell(row.fire), cell(row.manipulate), cell(row.socket), cell(row.total))
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# test report

@dataclass
class TestReport:
    scene_id: str
    strategy: str
    seed: int
    config: SimConfig
    coverage: FlowCoverage
    unresponsive: list
    smells: list
    runtime_errors: list
    simulated_seconds: float
    wall_clock_seconds: Optional[float] = None


def _ratio(value: Optional[float]):
    return None if value is None else round(value, 6)


def report_to_dict(report: TestReport, reproducible: bool = False) -> dict:
    cov = report.coverage
    per_category = {}
    for cat in CATEGORY_ORDER:
        cc = cov.per_category[cat]
        per_category[cat.value] = {
            "activated": cc.activated,
            "total": cc.total,
            "ratio": _ratio(cc.ratio),
        }
    per_flow = {}
    for flow_id in sorted(cov.per_flow):
        status = cov.per_flow[flow_id]
        entry = {"state": status.state.value, "attempts": status.attempts}
        if status.activated_at is not None:
            entry["activatedAt"] = status.activated_at
        if status.initiated_at:
            entry["initiatedAt"] = list(status.initiated_at)
        if status.reason:
            entry["reason"] = status.reason
        per_flow[flow_id] = entry
    durations = {"simulatedSeconds": report.simulated_seconds}
    if not reproducible and report.wall_clock_seconds is not None:
        durations["wallClockSeconds"] = round(report.wall_clock_seconds, 3)
    return {
        "schemaVersion": REPORT_SCHEMA_VERSION,
        "sceneId": report.scene_id,
        "strategy": report.strategy,
        "seed": report.seed,
        "config": {
            "dt": report.config.dt,
            "avatarSpeed": report.config.avatar_speed,
            "controllerSpeed": report.config.controller_speed,
            "reach": report.config.reach,
            "controllerRadius": report.config.controller_radius,
            "budgetSeconds": report.config.budget_seconds,
        },
        "coverage": {
            "perCategory": per_category,
            "prevalent": {
                "activated": cov.prevalent.activated,
                "total": cov.prevalent.total,
                "ratio": _ratio(cov.prevalent.ratio),
            },
            "objects": {
                "covered": cov.objects.activated,
                "total": cov.objects.total,
                "ratio": _ratio(cov.objects.ratio),
            },
            "perFlow": per_flow,
        },
        "unresponsive": [
            {
                "objectId": f.interactable_id,
                "interactionId": f.interaction_id,
                "action": f.action,
                "evidenceTimes": list(f.evidence_times),
            }
            for f in report.unresponsive
        ],
        "smells": [
            {
                "kind": s.kind,
                "socketId": s.socket_id,
                "brokerEdgeCount": s.broker_edge_count,
                "details": s.details,
            }
            for s in report.smells
        ],
        "runtimeErrors": list(report.runtime_errors),
        "durations": durations,
    }


def report_to_json(report: TestReport, reproducible: bool = False) -> str:
    return json.dumps(report_to_dict(report, reproducible), indent=2) + "\n"


def load_report(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid report JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("report must be a JSON object")
    version = doc.get("schemaVersion")
    if version != REPORT_SCHEMA_VERSION:
        raise SchemaError(f"unsupported report schema version {version!r}")
    return doc
