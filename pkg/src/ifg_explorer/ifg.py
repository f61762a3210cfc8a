"""Interaction Flow Graph: static construction, socket math, smell detection.

The graph is a DAG rooted at the single User node.  Every object with an
interactable or socket spec becomes a node; objects with neither are
excluded.  Edges carry an ordered label of Interactions; each executable
interaction is one test "flow".  Grabbables that overlap a socket's layer
mask get a brokerage edge from the grabbable to the socket owner.
"""
from __future__ import annotations

import graphlib
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .errors import CycleError, SchemaError
from .scene_model import EVERYTHING, NOTHING, SceneDefinition, layers_overlap

USER_NODE = "User"

GRAB_HOLD = "GrabPress(hold)"
TRIGGER_PULSE = ("TriggerPress", "TriggerRelease")
SOCKET_DELIVERY = ("Move(attachPoint)", "GrabRelease")


class Category(str, Enum):
    FIRE = "Fire"
    MANIPULATE = "Manipulate"
    SOCKET = "Socket"
    CUSTOM = "Custom"


CATEGORY_ORDER = (Category.FIRE, Category.MANIPULATE, Category.SOCKET, Category.CUSTOM)
# Categories every scene is expected to exercise; Custom flows are counted
# but cannot be executed without app-specific drivers.
PREVALENT_CATEGORIES = (Category.FIRE, Category.MANIPULATE, Category.SOCKET)


@dataclass(frozen=True)
class Interaction:
    """One (actions, conditions) tuple on an edge label."""

    interaction_id: str
    category: Category
    actions: tuple
    conditions: tuple = ()
    executable: bool = True


@dataclass(frozen=True)
class IfgEdge:
    edge_id: str
    source: str
    target: str
    label: tuple

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError(f"edge {self.edge_id} has an empty label")


@dataclass(frozen=True)
class Flow:
    """An executable interaction paired with the edge that carries it."""

    interaction: Interaction
    edge: IfgEdge

    @property
    def flow_id(self) -> str:
        return self.interaction.interaction_id

    @property
    def category(self) -> Category:
        return self.interaction.category

    @property
    def subject_id(self) -> str:
        """Object the user must physically engage (the broker for sockets)."""
        return self.edge.target if self.edge.source == USER_NODE else self.edge.source

    @property
    def socket_owner_id(self) -> Optional[str]:
        return self.edge.target if self.category == Category.SOCKET else None


class InteractionFlowGraph:
    """Immutable interaction graph with id-based lookups."""

    def __init__(self, nodes: tuple, edges: tuple):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        self._edges_by_id = {e.edge_id: e for e in edges}
        self._interactions = {}
        for edge in edges:
            for inter in edge.label:
                if inter.interaction_id in self._interactions:
                    raise ValueError(f"duplicate interaction id {inter.interaction_id}")
                self._interactions[inter.interaction_id] = (inter, edge)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InteractionFlowGraph)
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __repr__(self) -> str:
        return f"InteractionFlowGraph(nodes={len(self.nodes)}, edges={len(self.edges)})"

    def edge(self, edge_id: str) -> IfgEdge:
        return self._edges_by_id[edge_id]

    def interaction(self, interaction_id: str) -> Interaction:
        return self._interactions[interaction_id][0]

    def edge_of(self, interaction_id: str) -> IfgEdge:
        return self._interactions[interaction_id][1]

    def interactions(self) -> Iterator:
        for edge in self.edges:
            yield from edge.label

    def flows(self) -> tuple:
        """All executable interactions in stable graph order."""
        return tuple(
            Flow(inter, edge)
            for edge in self.edges
            for inter in edge.label
            if inter.executable
        )

    def category_counts(self) -> dict:
        counts = {cat: 0 for cat in CATEGORY_ORDER}
        for inter in self.interactions():
            counts[inter.category] += 1
        return counts

    def broker_edges_into(self, socket_owner_id: str) -> tuple:
        return tuple(
            e for e in self.edges if e.source != USER_NODE and e.target == socket_owner_id
        )

    def ensure_acyclic(self) -> None:
        sorter = graphlib.TopologicalSorter({n: set() for n in self.nodes})
        for edge in self.edges:
            sorter.add(edge.target, edge.source)
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            raise CycleError(f"interaction graph contains a cycle: {exc.args[1]}") from exc


def build_ifg(scene: SceneDefinition) -> InteractionFlowGraph:
    """Statically derive the interaction graph for a scene.

    Raises CycleError when socket layer wiring makes two objects mutually
    socketable (the resulting graph would not be a DAG).
    """
    nodes = [USER_NODE] + [o.id for o in scene.objects if o.has_interaction()]
    edges = []
    grab_ids = {}

    for obj in scene.objects:
        spec = obj.interactable
        if spec is None:
            continue
        edge_id = f"{USER_NODE}->{obj.id}"
        label = []
        if spec.grabbable:
            gid = f"{edge_id}#{len(label)}"
            grab_ids[obj.id] = gid
            label.append(Interaction(gid, Category.MANIPULATE, (GRAB_HOLD,)))
        if spec.activatable:
            fid = f"{edge_id}#{len(label)}"
            label.append(Interaction(fid, Category.FIRE, TRIGGER_PULSE, (grab_ids[obj.id],)))
        if spec.custom_tag is not None:
            cid = f"{edge_id}#{len(label)}"
            label.append(
                Interaction(cid, Category.CUSTOM, (f"Custom({spec.custom_tag})",), (), False)
            )
        if label:
            edges.append(IfgEdge(edge_id, USER_NODE, obj.id, tuple(label)))

    for obj in scene.objects:
        if obj.interactable is None or not obj.interactable.grabbable:
            continue
        for owner in scene.objects:
            if owner.socket is None or owner.id == obj.id:
                continue
            if not layers_overlap(
                obj.interactable.interaction_layers, owner.socket.interaction_layers
            ):
                continue
            edge_id = f"{obj.id}->{owner.id}"
            inter = Interaction(
                f"{edge_id}#0", Category.SOCKET, SOCKET_DELIVERY, (grab_ids[obj.id],)
            )
            edges.append(IfgEdge(edge_id, obj.id, owner.id, (inter,)))

    graph = InteractionFlowGraph(tuple(nodes), tuple(edges))
    graph.ensure_acyclic()
    return graph


# ---------------------------------------------------------------------------
# socket permutation counting

@dataclass(frozen=True)
class SocketGroup:
    """A maximal set of grabbables and sockets linked by layer overlap."""

    layer_group: str
    interactables: tuple
    sockets: tuple
    count: int

    @property
    def b(self) -> int:
        return len(self.interactables)

    @property
    def k(self) -> int:
        return len(self.sockets)


def count_socket_permutations(scene: SceneDefinition) -> list:
    """Injective-assignment count P(max(b,k), min(b,k)) per layer group.

    With b grabbables and k compatible sockets there are max!/(max-min)!
    distinct ways to fill the scarcer side — 2 paintings on 4 hooks give
    P(4,2) = 12 orderings, which is the per-group socket test burden rather
    than the graph's pair-edge count (b*k).
    """
    grabbables = [
        o
        for o in scene.objects
        if o.interactable is not None and o.interactable.grabbable
    ]
    sockets = [o for o in scene.objects if o.socket is not None]

    pairs = []
    for g in grabbables:
        for s in sockets:
            if g.id == s.id:
                continue
            if layers_overlap(g.interactable.interaction_layers, s.socket.interaction_layers):
                pairs.append((g, s))

    # union-find over the bipartite overlap graph
    parent = {}

    def find(key):
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    for g, s in pairs:
        parent.setdefault(("b", g.id), ("b", g.id))
        parent.setdefault(("k", s.id), ("k", s.id))
        ra, rb = find(("b", g.id)), find(("k", s.id))
        if ra != rb:
            parent[rb] = ra

    components = {}
    for g, s in pairs:
        root = find(("b", g.id))
        comp = components.setdefault(root, {"b": set(), "k": set(), "mask": 0})
        comp["b"].add(g.id)
        comp["k"].add(s.id)
        comp["mask"] |= g.interactable.interaction_layers & s.socket.interaction_layers

    order = {o.id: i for i, o in enumerate(scene.objects)}
    groups = []
    for comp in components.values():
        b_ids = tuple(sorted(comp["b"], key=order.__getitem__))
        k_ids = tuple(sorted(comp["k"], key=order.__getitem__))
        hi, lo = max(len(b_ids), len(k_ids)), min(len(b_ids), len(k_ids))
        groups.append(
            SocketGroup(_group_name(comp["mask"], scene), b_ids, k_ids, math.perm(hi, lo))
        )
    groups.sort(key=lambda grp: (grp.interactables, grp.sockets))
    return groups


def total_socket_permutations(scene: SceneDefinition) -> int:
    return sum(g.count for g in count_socket_permutations(scene))


def _group_name(mask: int, scene: SceneDefinition) -> str:
    if mask == EVERYTHING:
        return "Everything"
    if mask == NOTHING:
        return "Nothing"
    names = scene.mask_names(mask)
    return "+".join(names) if names else f"0x{mask:08x}"


# ---------------------------------------------------------------------------
# design smells

SMELL_SOCKET_EVERYTHING = "SocketEverythingMask"
SMELL_EDGE_EXPLOSION = "EdgeExplosion"

DEFAULT_BROKER_EDGE_THRESHOLD = 5


@dataclass(frozen=True)
class Smell:
    kind: str
    socket_id: str
    broker_edge_count: int
    details: str


def detect_smells(
    scene: SceneDefinition,
    graph: InteractionFlowGraph,
    broker_edge_threshold: int = DEFAULT_BROKER_EDGE_THRESHOLD,
) -> list:
    """Flag Everything-masked sockets and the edge explosions they cause."""
    smells = []
    for obj in scene.objects:
        if obj.socket is None or obj.socket.interaction_layers != EVERYTHING:
            continue
        count = len(graph.broker_edges_into(obj.id))
        smells.append(
            Smell(
                SMELL_SOCKET_EVERYTHING,
                obj.id,
                count,
                f"socket '{obj.id}' accepts every interaction layer",
            )
        )
        if count > broker_edge_threshold:
            smells.append(
                Smell(
                    SMELL_EDGE_EXPLOSION,
                    obj.id,
                    count,
                    f"socket '{obj.id}' draws {count} brokerage edges "
                    f"(threshold {broker_edge_threshold})",
                )
            )
    return smells


# ---------------------------------------------------------------------------
# JSON round-trip

def ifg_to_dict(graph: InteractionFlowGraph) -> dict:
    nodes = []
    for key in graph.nodes:
        if key == USER_NODE:
            nodes.append({"kind": "User"})
        else:
            nodes.append({"kind": "Interactable", "objectId": key})
    edges = []
    for edge in graph.edges:
        edges.append(
            {
                "edgeId": edge.edge_id,
                "source": edge.source,
                "target": edge.target,
                "label": [
                    {
                        "interactionId": inter.interaction_id,
                        "category": inter.category.value,
                        "actions": list(inter.actions),
                        "conditions": list(inter.conditions),
                        "executable": inter.executable,
                    }
                    for inter in edge.label
                ],
            }
        )
    return {"nodes": nodes, "edges": edges}


def ifg_to_json(graph: InteractionFlowGraph) -> str:
    return json.dumps(ifg_to_dict(graph), indent=2) + "\n"


def ifg_from_dict(doc) -> InteractionFlowGraph:
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise SchemaError("graph document must contain 'nodes' and 'edges'")
    nodes = []
    for raw in _expect_list(doc["nodes"], "nodes"):
        if not isinstance(raw, dict):
            raise SchemaError("node entries must be objects")
        kind = raw.get("kind")
        if kind == "User":
            nodes.append(USER_NODE)
        elif kind == "Interactable":
            object_id = raw.get("objectId")
            if not isinstance(object_id, str) or not object_id:
                raise SchemaError("Interactable node missing objectId")
            nodes.append(object_id)
        else:
            raise SchemaError(f"unknown node kind {kind!r}")
    if nodes.count(USER_NODE) != 1:
        raise SchemaError("graph must contain exactly one User node")
    if len(set(nodes)) != len(nodes):
        raise SchemaError("duplicate node entries")

    node_set = set(nodes)
    edges = []
    for raw in _expect_list(doc["edges"], "edges"):
        if not isinstance(raw, dict):
            raise SchemaError("edge entries must be objects")
        edge_id = raw.get("edgeId")
        source, target = raw.get("source"), raw.get("target")
        if not isinstance(edge_id, str):
            raise SchemaError("edge missing edgeId")
        if source not in node_set or target not in node_set:
            raise SchemaError(f"edge {edge_id} references unknown node")
        label = []
        for entry in _expect_list(raw.get("label"), f"label of {edge_id}"):
            if not isinstance(entry, dict):
                raise SchemaError(f"label entries of {edge_id} must be objects")
            try:
                category = Category(entry.get("category"))
            except ValueError:
                raise SchemaError(
                    f"unknown category {entry.get('category')!r} in {edge_id}"
                ) from None
            interaction_id = entry.get("interactionId")
            actions = entry.get("actions")
            conditions = entry.get("conditions", [])
            executable = entry.get("executable", True)
            if not isinstance(interaction_id, str):
                raise SchemaError(f"interaction in {edge_id} missing interactionId")
            if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
                raise SchemaError(f"actions of {interaction_id} must be strings")
            if not isinstance(conditions, list) or not all(
                isinstance(c, str) for c in conditions
            ):
                raise SchemaError(f"conditions of {interaction_id} must be strings")
            if not isinstance(executable, bool):
                raise SchemaError(f"executable flag of {interaction_id} must be boolean")
            label.append(
                Interaction(interaction_id, category, tuple(actions), tuple(conditions), executable)
            )
        if not label:
            raise SchemaError(f"edge {edge_id} has an empty label")
        edges.append(IfgEdge(edge_id, source, target, tuple(label)))

    try:
        graph = InteractionFlowGraph(tuple(nodes), tuple(edges))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    known = {i.interaction_id for i in graph.interactions()}
    for inter in graph.interactions():
        for cond in inter.conditions:
            if cond not in known:
                raise SchemaError(
                    f"interaction {inter.interaction_id} conditions on unknown {cond}"
                )
    try:
        graph.ensure_acyclic()
    except CycleError as exc:
        raise SchemaError(str(exc)) from None
    return graph


def ifg_from_json(text: str) -> InteractionFlowGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return ifg_from_dict(doc)


def _expect_list(value, what: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"{what} must be a list")
    return value
