"""Exception types shared across the planning pipeline."""

from __future__ import annotations


class PdnError(Exception):
    """Base class for every error raised by pdnplan."""


class TraceParseError(PdnError):
    """Trace file is malformed (bad header, ragged row, unparseable cell)."""


class ValidationError(PdnError, ValueError):
    """Well-formed input carrying an illegal value (negative power, bad rect)."""


class DomainError(PdnError, ValueError):
    """An operation was called with arguments outside its domain."""


class MappingError(PdnError):
    """Power entries exist for components that are not placed on the die."""


class ConstraintError(PdnError):
    """A geometric or selection constraint cannot be met (pitch, stride, coverage)."""


class GraphError(PdnError):
    """The resistive graph is structurally unusable (no pads, disconnected,
    tiles with current demand but no grid node to carry it)."""


class SolverError(PdnError):
    """The linear solve did not converge to the requested tolerance."""

    def __init__(self, message: str, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ComparisonError(PdnError):
    """Two reports cannot be compared (different floorplan or tiling)."""


class ConfigError(PdnError):
    """A run configuration failed validation; all problems are reported together."""

    def __init__(self, problems: list[str]):
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(problems))
        self.problems = list(problems)


class PipelineError(PdnError):
    """A pipeline stage failed; carries the stage name and the original cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
