"""Exception types shared across the package."""

from __future__ import annotations


class DimerlabError(Exception):
    """Base class for all package-specific errors."""


class CapExceededError(DimerlabError):
    """A configured size cap (sequence length, lattice width) was exceeded."""


class CheckpointError(DimerlabError):
    """A tally or checkpoint file is malformed or incompatible.

    ``field`` names the offending header field, line, or section so callers
    can report exactly what mismatched.
    """

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field


class IncompleteTallyError(DimerlabError):
    """An operation that requires a complete tally received a checkpoint."""


class MissingTallyError(DimerlabError):
    """A required (d, s) tally was not supplied."""

    def __init__(self, d: int, s: int):
        super().__init__(f"missing tally for d={d}, s={s}")
        self.d = d
        self.s = s


class UndefinedWeightError(DimerlabError):
    """A weight functional has no value for one or more patterns."""

    def __init__(self, keys: list[str]):
        self.keys = list(keys)
        listing = ", ".join(self.keys)
        super().__init__(f"weight undefined for pattern keys: {listing}")
