"""Scene-graph driven testing of 3D interaction flows.

Parses declarative scene descriptions, derives an interaction flow graph
(IFG), executes grab/trigger/socket flows in a deterministic kinematic
simulation, and scores sessions with coverage and responsiveness metrics.
"""
from .benchgen import BenchSpec, generate_scene, spec_from_dict
from .errors import (
    CycleError,
    EngineError,
    IdMismatchError,
    NotExecutableError,
    PackingError,
    SceneError,
    SchemaError,
    SpawnIndexError,
)
from .explorer import GreedyExplorer, run_greedy_session
from .ifg import (
    Category,
    Flow,
    IfgEdge,
    Interaction,
    InteractionFlowGraph,
    build_ifg,
    count_socket_permutations,
    detect_smells,
    ifg_from_json,
    ifg_to_json,
    total_socket_permutations,
)
from .metrics import (
    FlowState,
    TestReport,
    compute_ifc,
    detect_unresponsive,
    load_report,
    report_to_json,
    timeline_to_csv,
)
from .random_baseline import RandomParams, drive_random_session, run_random_session
from .scene_model import (
    EVERYTHING,
    NOTHING,
    ActionAtom,
    Collider,
    GameObjectDef,
    InteractableSpec,
    SceneDefinition,
    SocketSpec,
    Vec3,
    layers_overlap,
)
from .scene_parser import (
    load_scene,
    parse_scene,
    parse_scene_file,
    scene_to_json,
    validate_scene,
)
from .session import Session
from .sim import SimConfig, SimEvent, World, spawn

__version__ = "0.1.0"

__all__ = [
    "ActionAtom",
    "BenchSpec",
    "Category",
    "Collider",
    "CycleError",
    "EVERYTHING",
    "EngineError",
    "Flow",
    "FlowState",
    "GameObjectDef",
    "GreedyExplorer",
    "IdMismatchError",
    "IfgEdge",
    "Interaction",
    "InteractableSpec",
    "InteractionFlowGraph",
    "NOTHING",
    "NotExecutableError",
    "PackingError",
    "RandomParams",
    "SceneDefinition",
    "SceneError",
    "SchemaError",
    "Session",
    "SimConfig",
    "SimEvent",
    "SocketSpec",
    "SpawnIndexError",
    "TestReport",
    "Vec3",
    "World",
    "build_ifg",
    "compute_ifc",
    "count_socket_permutations",
    "detect_smells",
    "detect_unresponsive",
    "drive_random_session",
    "generate_scene",
    "ifg_from_json",
    "ifg_to_json",
    "layers_overlap",
    "load_report",
    "load_scene",
    "parse_scene",
    "parse_scene_file",
    "report_to_json",
    "run_greedy_session",
    "run_random_session",
    "scene_to_json",
    "spawn",
    "spec_from_dict",
    "timeline_to_csv",
    "total_socket_permutations",
    "validate_scene",
    "__version__",
]
