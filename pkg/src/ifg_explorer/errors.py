"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` so the CLI can emit
parsable diagnostics.
"""
from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "E_GENERIC"


class SceneError(EngineError):
    """A scene document failed to parse or validate.

    Carries the full diagnostic list; ``code`` reflects the first error.
    """

    code = "E_SYNTAX"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        if errors:
            self.code = errors[0].code
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class CycleError(EngineError):
    """Socket layer wiring induces a cycle in the interaction flow graph."""

    code = "E_CYCLE"


class SchemaError(EngineError):
    """A serialized graph or report document violates its schema."""

    code = "E_SCHEMA"


class SpawnIndexError(EngineError):
    """Spawn point index outside the scene's spawn list."""

    code = "E_SPAWN_OOB"


class NotExecutableError(EngineError):
    """Attempt to execute a custom (non-executable) interaction flow."""

    code = "E_NOT_EXECUTABLE"


class IdMismatchError(EngineError):
    """Flow status ids do not line up with the graph's executable flows."""

    code = "E_ID_MISMATCH"


class PackingError(EngineError):
    """Benchmark generator could not place objects without overlap."""

    code = "E_PACKING"
