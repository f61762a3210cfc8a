"""Parse, validate and serialize the JSON scene-definition format.

The format is documented in README.md.  Parsing is strict about structure
(errors reject the document) but tolerant of extra keys, which are reported
as ``W_UNKNOWN_FIELD`` warnings rather than silently dropped.  Object ids
are mandatory and authoritative; display names may repeat.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .errors import SceneError
from .scene_model import (
    EVERYTHING,
    MAX_LAYERS,
    NOTHING,
    Box,
    Collider,
    GameObjectDef,
    InteractableSpec,
    SceneDefinition,
    SocketSpec,
    Sphere,
    Vec3,
)

ERROR = "error"
WARNING = "warning"

# "User" is the reserved graph-node key for the simulated user; allowing it
# as an object id would make serialized graphs ambiguous.
RESERVED_IDS = ("User",)

_TOP_KEYS = {"sceneId", "layers", "groundY", "spawnPoints", "objects"}
_OBJECT_KEYS = {"id", "name", "position", "yawDeg", "goLayer", "colliders", "interactable", "socket"}
_COLLIDER_KEYS = {"shape", "params", "offset", "isTrigger"}
_INTERACTABLE_KEYS = {"grabbable", "activatable", "customTag", "layers"}
_SOCKET_KEYS = {"attachPoint", "zoneRadius", "layers", "locking"}


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    object_id: Optional[str] = None

    def __str__(self) -> str:
        where = f" [{self.object_id}]" if self.object_id else ""
        return f"{self.severity} {self.code}{where}: {self.message}"


@dataclass
class ParseResult:
    scene: Optional[SceneDefinition]
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.scene is not None

    def errors(self) -> list:
        return [d for d in self.diagnostics if d.severity == ERROR]


def parse_scene(text: str) -> ParseResult:
    """Parse a scene document; returns the scene or error diagnostics."""
    diags: list = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"invalid JSON: {exc}"))
        return ParseResult(None, diags)
    if not isinstance(doc, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "top level must be an object"))
        return ParseResult(None, diags)

    _warn_unknown(doc, _TOP_KEYS, "document", None, diags)

    scene_id = doc.get("sceneId", "scene")
    if not isinstance(scene_id, str):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "sceneId must be a string"))
        scene_id = "scene"

    registry = _parse_registry(doc.get("layers", ["Default"]), diags)
    ground_y = _number(doc.get("groundY", 0.0), "groundY", diags)

    spawns = []
    raw_spawns = doc.get("spawnPoints", [])
    if not isinstance(raw_spawns, list):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "spawnPoints must be a list"))
        raw_spawns = []
    for i, entry in enumerate(raw_spawns):
        v = _vec3(entry, f"spawnPoints[{i}]", None, diags)
        if v is not None:
            spawns.append(v)
    if not spawns:
        diags.append(Diagnostic(ERROR, "E_NO_SPAWN", "scene has no spawn points"))

    objects = []
    seen_ids = set()
    raw_objects = doc.get("objects", [])
    if not isinstance(raw_objects, list):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "objects must be a list"))
        raw_objects = []
    for i, raw in enumerate(raw_objects):
        obj = _parse_object(raw, i, registry, diags)
        if obj is None:
            continue
        if obj.id in seen_ids:
            diags.append(Diagnostic(ERROR, "E_DUP_ID", f"duplicate object id '{obj.id}'", obj.id))
            continue
        seen_ids.add(obj.id)
        objects.append(obj)

    if any(d.severity == ERROR for d in diags):
        return ParseResult(None, diags)
    scene = SceneDefinition(
        scene_id=scene_id,
        layer_registry=tuple(registry),
        objects=tuple(objects),
        spawn_points=tuple(spawns),
        ground_y=ground_y if ground_y is not None else 0.0,
    )
    return ParseResult(scene, diags)


def parse_scene_file(path) -> ParseResult:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene(fh.read())


def load_scene(path) -> SceneDefinition:
    """Parse a scene file, raising SceneError on any error diagnostic."""
    result = parse_scene_file(path)
    if not result.ok:
        raise SceneError(result.diagnostics)
    return result.scene


def validate_scene(scene: SceneDefinition) -> list:
    """Semantic lint over a parsed scene; returns warnings only.

    Trigger-only and nothing-mask interactables load fine but cannot be
    engaged at runtime, so they are warnings here and bugs for the dynamic
    oracle to confirm.
    """
    warnings = []
    for obj in scene.objects:
        if obj.interactable is None:
            continue
        if obj.is_trigger_only():
            warnings.append(
                Diagnostic(
                    WARNING,
                    "W_TRIGGER_ONLY",
                    "all colliders have isTrigger=true; grabs will not engage",
                    obj.id,
                )
            )
        if obj.interactable.interaction_layers == NOTHING:
            warnings.append(
                Diagnostic(
                    WARNING,
                    "W_NOTHING_MASK",
                    "interaction layer mask is Nothing; no interactor can match",
                    obj.id,
                )
            )
    return warnings


# ---------------------------------------------------------------------------
# serializer (inverse of parse_scene; parse(serialize(s)) == s)

def scene_to_dict(scene: SceneDefinition) -> dict:
    return {
        "sceneId": scene.scene_id,
        "layers": list(scene.layer_registry),
        "groundY": float(scene.ground_y),
        "spawnPoints": [p.to_list() for p in scene.spawn_points],
        "objects": [_object_to_dict(o, scene) for o in scene.objects],
    }


def scene_to_json(scene: SceneDefinition) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def _object_to_dict(obj: GameObjectDef, scene: SceneDefinition) -> dict:
    out = {
        "id": obj.id,
        "name": obj.name,
        "position": obj.position.to_list(),
        "yawDeg": float(obj.yaw_deg),
        "goLayer": obj.go_layer,
        "colliders": [_collider_to_dict(c) for c in obj.colliders],
    }
    if obj.interactable is not None:
        spec = obj.interactable
        out["interactable"] = {
            "grabbable": spec.grabbable,
            "activatable": spec.activatable,
            "customTag": spec.custom_tag,
            "layers": _mask_to_value(spec.interaction_layers, scene),
        }
    if obj.socket is not None:
        out["socket"] = {
            "attachPoint": obj.socket.attach_point.to_list(),
            "zoneRadius": float(obj.socket.zone_radius),
            "layers": _mask_to_value(obj.socket.interaction_layers, scene),
            "locking": obj.socket.locking,
        }
    return out


def _collider_to_dict(col: Collider) -> dict:
    if isinstance(col.shape, Sphere):
        shape, params = "sphere", {"radius": float(col.shape.radius)}
    else:
        shape, params = "box", {"halfExtents": col.shape.half_extents.to_list()}
    return {
        "shape": shape,
        "params": params,
        "offset": col.offset.to_list(),
        "isTrigger": col.is_trigger,
    }


def _mask_to_value(mask: int, scene: SceneDefinition):
    if mask == EVERYTHING:
        return "Everything"
    if mask == NOTHING:
        return "Nothing"
    return scene.mask_names(mask)


# ---------------------------------------------------------------------------
# parsing helpers

def _warn_unknown(raw: dict, allowed: set, where: str, object_id, diags: list) -> None:
    for key in raw:
        if key not in allowed:
            diags.append(
                Diagnostic(WARNING, "W_UNKNOWN_FIELD", f"unknown field '{key}' in {where}", object_id)
            )


def _parse_registry(raw, diags: list) -> list:
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "layers must be a list of names"))
        return ["Default"]
    if len(raw) > MAX_LAYERS:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"more than {MAX_LAYERS} layers"))
        return raw[:MAX_LAYERS]
    if len(set(raw)) != len(raw):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "duplicate layer names in registry"))
    if not raw:
        return ["Default"]
    return raw


def _number(value, path: str, diags: list, positive: bool = False) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{path} must be a finite number"))
        return None
    if positive and value <= 0:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{path} must be positive"))
        return None
    return float(value)


def _vec3(value, path: str, object_id, diags: list) -> Optional[Vec3]:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{path} must be [x, y, z]", object_id))
        return None
    v = Vec3.from_seq(value)
    if not v.is_finite():
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{path} must be finite", object_id))
        return None
    return v


def _mask(value, registry: list, path: str, object_id, diags: list) -> Optional[int]:
    if value == "Everything":
        return EVERYTHING
    if value == "Nothing":
        return NOTHING
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        diags.append(
            Diagnostic(ERROR, "E_SYNTAX", f"{path} must be 'Everything', 'Nothing' or a name list", object_id)
        )
        return None
    mask = 0
    for name in value:
        if name not in registry:
            diags.append(Diagnostic(ERROR, "E_LAYER", f"unknown layer '{name}' in {path}", object_id))
            return None
        mask |= 1 << registry.index(name)
    return mask


def _parse_object(raw, index: int, registry: list, diags: list) -> Optional[GameObjectDef]:
    where = f"objects[{index}]"
    if not isinstance(raw, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} must be an object"))
        return None
    obj_id = raw.get("id")
    if not isinstance(obj_id, str) or not obj_id:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} missing string 'id'"))
        return None
    if obj_id in RESERVED_IDS:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"object id '{obj_id}' is reserved", obj_id))
        return None
    _warn_unknown(raw, _OBJECT_KEYS, where, obj_id, diags)

    position = _vec3(raw.get("position", [0, 0, 0]), f"{where}.position", obj_id, diags)
    yaw = _number(raw.get("yawDeg", 0.0), f"{where}.yawDeg", diags)

    go_layer = raw.get("goLayer", registry[0])
    if not isinstance(go_layer, str):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.goLayer must be a string", obj_id))
        go_layer = registry[0]
    elif go_layer not in registry:
        diags.append(Diagnostic(ERROR, "E_LAYER", f"unknown goLayer '{go_layer}'", obj_id))

    colliders = []
    raw_colliders = raw.get("colliders", [])
    if not isinstance(raw_colliders, list):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.colliders must be a list", obj_id))
        raw_colliders = []
    for ci, rc in enumerate(raw_colliders):
        col = _parse_collider(rc, f"{where}.colliders[{ci}]", obj_id, diags)
        if col is not None:
            colliders.append(col)

    interactable = None
    if raw.get("interactable") is not None:
        interactable = _parse_interactable(raw["interactable"], f"{where}.interactable", obj_id, registry, diags)
    socket = None
    if raw.get("socket") is not None:
        socket = _parse_socket(raw["socket"], f"{where}.socket", obj_id, registry, diags)

    if (interactable is not None or socket is not None) and not colliders:
        diags.append(
            Diagnostic(ERROR, "E_NO_COLLIDER", "interactable/socket object needs at least one collider", obj_id)
        )

    if position is None or yaw is None:
        return None
    return GameObjectDef(
        id=obj_id,
        name=raw.get("name", obj_id) if isinstance(raw.get("name", obj_id), str) else obj_id,
        position=position,
        yaw_deg=yaw,
        colliders=tuple(colliders),
        go_layer=go_layer,
        interactable=interactable,
        socket=socket,
    )


def _parse_collider(raw, where: str, obj_id, diags: list) -> Optional[Collider]:
    if not isinstance(raw, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} must be an object", obj_id))
        return None
    _warn_unknown(raw, _COLLIDER_KEYS, where, obj_id, diags)
    shape_kind = raw.get("shape")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.params must be an object", obj_id))
        return None
    offset = _vec3(raw.get("offset", [0, 0, 0]), f"{where}.offset", obj_id, diags)
    is_trigger = raw.get("isTrigger", False)
    if not isinstance(is_trigger, bool):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.isTrigger must be a boolean", obj_id))
        return None

    if shape_kind == "sphere":
        radius = _number(params.get("radius"), f"{where}.params.radius", diags, positive=True)
        if radius is None or offset is None:
            return None
        return Collider(Sphere(radius), offset, is_trigger)
    if shape_kind == "box":
        half = _vec3(params.get("halfExtents"), f"{where}.params.halfExtents", obj_id, diags)
        if half is None or offset is None:
            return None
        if min(half.x, half.y, half.z) <= 0:
            diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.params.halfExtents must be positive", obj_id))
            return None
        return Collider(Box(half), offset, is_trigger)
    diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.shape must be 'sphere' or 'box'", obj_id))
    return None


def _parse_interactable(raw, where: str, obj_id, registry: list, diags: list) -> Optional[InteractableSpec]:
    if not isinstance(raw, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} must be an object", obj_id))
        return None
    _warn_unknown(raw, _INTERACTABLE_KEYS, where, obj_id, diags)
    grabbable = raw.get("grabbable", False)
    activatable = raw.get("activatable", False)
    custom_tag = raw.get("customTag")
    if not isinstance(grabbable, bool) or not isinstance(activatable, bool):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} flags must be booleans", obj_id))
        return None
    if custom_tag is not None and not isinstance(custom_tag, str):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.customTag must be a string", obj_id))
        return None
    mask = _mask(raw.get("layers", "Everything"), registry, f"{where}.layers", obj_id, diags)
    if mask is None:
        return None
    if activatable and not grabbable:
        diags.append(Diagnostic(ERROR, "E_SYNTAX", "activatable requires grabbable", obj_id))
        return None
    return InteractableSpec(grabbable, activatable, custom_tag, mask)


def _parse_socket(raw, where: str, obj_id, registry: list, diags: list) -> Optional[SocketSpec]:
    if not isinstance(raw, dict):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where} must be an object", obj_id))
        return None
    _warn_unknown(raw, _SOCKET_KEYS, where, obj_id, diags)
    attach = _vec3(raw.get("attachPoint"), f"{where}.attachPoint", obj_id, diags)
    zone = _number(raw.get("zoneRadius", 0.15), f"{where}.zoneRadius", diags, positive=True)
    mask = _mask(raw.get("layers", "Everything"), registry, f"{where}.layers", obj_id, diags)
    locking = raw.get("locking", False)
    if not isinstance(locking, bool):
        diags.append(Diagnostic(ERROR, "E_SYNTAX", f"{where}.locking must be a boolean", obj_id))
        return None
    if attach is None or zone is None or mask is None:
        return None
    return SocketSpec(attach, zone, mask, locking)
