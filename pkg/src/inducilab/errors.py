"""Exception types shared across the toolkit."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class StructuralError(ValueError):
    """Objects with incompatible shapes were combined, or an invariant is broken."""


class CapacityError(RuntimeError):
    """A request exceeds a hard enumeration or search cap."""


class Graph6Error(ValueError):
    """Malformed graph6 input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
