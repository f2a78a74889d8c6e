"""Finite abelian groups given as products of cyclic factors.

Elements are addressed by a mixed-radix index in ``range(order)``; index 0 is
the identity.  Coordinate 0 is the most significant digit, so the index order
agrees with lexicographic order on coordinate tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, StructuralError


@dataclass(frozen=True)
class AbelianGroup:
    factor_orders: tuple[int, ...]
    order: int = field(init=False)

    def __post_init__(self) -> None:
        factors = tuple(int(d) for d in self.factor_orders)
        if any(d < 1 for d in factors):
            raise DomainError(f"cyclic factor orders must be >= 1, got {factors}")
        object.__setattr__(self, "factor_orders", factors)
        object.__setattr__(self, "order", prod(factors))

    @classmethod
    def cyclic(cls, n: int) -> "AbelianGroup":
        return cls((n,))

    # -- indexing -------------------------------------------------------
    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.factor_orders):
            raise StructuralError(
                f"element has {len(coords)} coordinates, group has {len(self.factor_orders)} factors"
            )
        idx = 0
        for c, d in zip(coords, self.factor_orders):
            idx = idx * d + (int(c) % d)
        return idx

    def coords(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.order:
            raise DomainError(f"element index {idx} out of range for group of order {self.order}")
        out = []
        for d in reversed(self.factor_orders):
            idx, r = divmod(idx, d)
            out.append(r)
        return tuple(reversed(out))

    def element(self, *coords: int) -> "GroupElement":
        if len(coords) == 1 and not isinstance(coords[0], int):
            coords = tuple(coords[0])
        return GroupElement(self, tuple(int(c) % d for c, d in zip(coords, self.factor_orders)))

    def elements(self) -> Iterator["GroupElement"]:
        for i in range(self.order):
            yield GroupElement(self, self.coords(i))

    # -- arithmetic on indices (hot path) --------------------------------
    @cached_property
    def _add_table(self) -> tuple[tuple[int, ...], ...]:
        rows = []
        cs = [self.coords(i) for i in range(self.order)]
        for a in cs:
            rows.append(tuple(
                self.index([(x + y) for x, y in zip(a, b)]) for b in cs
            ))
        return tuple(rows)

    @cached_property
    def _neg_table(self) -> tuple[int, ...]:
        return tuple(self.index([-c for c in self.coords(i)]) for i in range(self.order))

    def add_idx(self, a: int, b: int) -> int:
        return self._add_table[a][b]

    def neg_idx(self, a: int) -> int:
        return self._neg_table[a]

    def sub_idx(self, a: int, b: int) -> int:
        return self._add_table[a][self._neg_table[b]]

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        return {"factors": list(self.factor_orders)}

    @classmethod
    def from_json(cls, data: dict | str) -> "AbelianGroup":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["factors"]))

    def __repr__(self) -> str:
        return "AbelianGroup(" + " x ".join(f"Z/{d}" for d in self.factor_orders) + ")"


@dataclass(frozen=True)
class GroupElement:
    group: AbelianGroup
    coordinates: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coordinates) != len(self.group.factor_orders):
            raise StructuralError("coordinate count does not match group shape")
        for c, d in zip(self.coordinates, self.group.factor_orders):
            if not 0 <= c < d:
                raise DomainError(f"coordinate {c} not reduced modulo {d}")

    @property
    def index(self) -> int:
        return self.group.index(self.coordinates)

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __neg__(self) -> "GroupElement":
        return neg(self)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return add(self, neg(other))

    def to_json(self) -> list[int]:
        return list(self.coordinates)


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.group.factor_orders != h.group.factor_orders:
        raise StructuralError(
            f"cannot add elements of {g.group!r} and {h.group!r}"
        )
    return GroupElement(
        g.group,
        tuple((a + b) % d for a, b, d in zip(g.coordinates, h.coordinates, g.group.factor_orders)),
    )


def neg(g: GroupElement) -> GroupElement:
    return GroupElement(g.group, tuple((-a) % d for a, d in zip(g.coordinates, g.group.factor_orders)))


def kappa(g: GroupElement) -> frozenset[GroupElement]:
    """The unordered pair {g, -g}; a singleton when g is an involution."""
    if g.is_zero():
        raise DomainError("kappa is defined on nonzero elements only")
    return frozenset({g, neg(g)})


def kappa_classes(G: AbelianGroup) -> list[GroupElement]:
    """Representatives of the classes {g, -g} of nonzero elements.

    Each class is represented by its element of smallest index and the list is
    sorted by that index, which fixes the draw order used when sampling.
    """
    reps = []
    for i in range(1, G.order):
        if i <= G.neg_idx(i):
            reps.append(GroupElement(G, G.coords(i)))
    return reps


def kappa_class_indices(G: AbelianGroup) -> list[tuple[int, ...]]:
    """Index form of :func:`kappa_classes`: each class as a sorted tuple."""
    out = []
    for i in range(1, G.order):
        j = G.neg_idx(i)
        if i <= j:
            out.append((i,) if i == j else (i, j))
    return out


def doubling_solutions(G: AbelianGroup, t: GroupElement) -> set[GroupElement]:
    """All x with x + x = t.

    Per cyclic factor of order d, 2x = t mod d is solved directly; the full
    solution set is the product of the per-factor sets.
    """
    if t.group.factor_orders != G.factor_orders:
        raise StructuralError("target element is not in this group")
    per_factor: list[list[int]] = []
    for c, d in zip(t.coordinates, G.factor_orders):
        if d % 2:
            per_factor.append([(c * (d + 1) // 2) % d])
        elif c % 2:
            return set()
        else:
            per_factor.append([c // 2, c // 2 + d // 2])
    out: set[GroupElement] = set()

    def build(i: int, acc: list[int]) -> None:
        if i == len(per_factor):
            out.add(GroupElement(G, tuple(acc)))
            return
        for v in per_factor[i]:
            build(i + 1, acc + [v])

    build(0, [])
    return out


def subgroup_closure(G: AbelianGroup, gens: Iterable[int]) -> set[int]:
    """Indices of the subgroup generated by ``gens`` (given as indices)."""
    gens = [g for g in set(gens) if g != 0]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.add_idx(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def is_generating(G: AbelianGroup, S: Iterable[GroupElement | int]) -> bool:
    idx = [s if isinstance(s, int) else s.index for s in S]
    return len(subgroup_closure(G, idx)) == G.order
