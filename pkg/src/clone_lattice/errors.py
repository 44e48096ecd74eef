"""Exception types raised across the pipeline."""

from __future__ import annotations


class CloneLatticeError(Exception):
    """Base class for all engine errors."""


class CSyntaxError(SyntaxError, CloneLatticeError):
    """Source text falls outside the supported C subset."""

    def __init__(self, message: str, file: str, line: int, col: int):
        super().__init__(f"{file}:{line}:{col}: {message}")
        self.filename = file
        self.lineno = line
        self.offset = col
        self.file = file
        self.line = line
        self.col = col
        self.reason = message


class PointerNotInFunction(CloneLatticeError):
    pass


class EmptySlice(CloneLatticeError):
    """The pointer is declared but nothing survives slicing; callers skip it."""


class DimensionMismatch(CloneLatticeError, ValueError):
    pass


class UnsupportedConstruct(CloneLatticeError):
    """The symbolic executor cannot model this slice; the pair is skipped."""


class PathLimitExceeded(UnsupportedConstruct):
    pass


class NoMatching(CloneLatticeError):
    """Two constraint sets have no role-respecting variable bijection."""


class DomainTooLarge(CloneLatticeError):
    pass


class NonSeparable(CloneLatticeError):
    """Feedback weighting cannot push a false-positive pair beyond the threshold."""


class EmptyCorpus(CloneLatticeError):
    pass
