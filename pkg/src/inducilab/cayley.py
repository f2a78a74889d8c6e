"""Cayley graphs of finite abelian groups, random connection sets, and the
rotations x -> x+g and reflections x -> -x+g."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Literal

from . import config
from .errors import DomainError, StructuralError
from .graph import Graph, bits, induced_subgraph, to_mask
from .groups import AbelianGroup, GroupElement, kappa_class_indices


@dataclass(frozen=True)
class ConnectionSet:
    group: AbelianGroup
    members: frozenset[int]

    def __post_init__(self) -> None:
        G = self.group
        for g in self.members:
            if not 0 <= g < G.order:
                raise DomainError(f"element index {g} outside the group")
        if 0 in self.members:
            raise DomainError("connection set must not contain 0")
        for g in self.members:
            if G.neg_idx(g) not in self.members:
                raise DomainError(f"connection set not closed under negation at {G.coords(g)}")

    @classmethod
    def from_elements(cls, group: AbelianGroup, elems: Iterable[GroupElement | int | Iterable[int]]) -> "ConnectionSet":
        idx = set()
        for e in elems:
            if isinstance(e, GroupElement):
                idx.add(e.index)
            elif isinstance(e, int):
                idx.add(e)
            else:
                idx.add(group.index(list(e)))
        return cls(group, frozenset(idx))

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self.group, self.group.coords(i)) for i in sorted(self.members)]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CayleyGraph:
    group: AbelianGroup
    connection_set: ConnectionSet
    graph: Graph
    p: float | None = None
    seed: int | None = None

    @property
    def order(self) -> int:
        return self.group.order

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "lambda": [list(self.group.coords(i)) for i in sorted(self.connection_set.members)],
            "p": self.p,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "CayleyGraph":
        if isinstance(data, str):
            data = json.loads(data)
        G = AbelianGroup.from_json(data["group"])
        lam = ConnectionSet.from_elements(G, [tuple(c) for c in data["lambda"]])
        return build_cayley(G, lam, p=data.get("p"), seed=data.get("seed"))


def sample_connection_set(G: AbelianGroup, p: float, seed: int) -> ConnectionSet:
    """Include each class {g, -g} independently with probability p.

    The draw for a class depends only on (seed, smallest index in the class).
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p}")
    members: set[int] = set()
    for cls in kappa_class_indices(G):
        if config.substream_uniform(seed, "lambda", cls[0]) < p:
            members.update(cls)
    return ConnectionSet(G, frozenset(members))


def build_cayley(
    G: AbelianGroup, lam: ConnectionSet, p: float | None = None, seed: int | None = None
) -> CayleyGraph:
    if lam.group.factor_orders != G.factor_orders:
        raise DomainError("connection set belongs to a different group")
    n = G.order
    lam_mask = to_mask(lam.members)
    adj = []
    for x in range(n):
        m = 0
        for d in bits(lam_mask):
            m |= 1 << G.add_idx(x, d)
        adj.append(m)
    return CayleyGraph(G, lam, Graph(n, adj), p=p, seed=seed)


def cayley(factors: Iterable[int], lam: Iterable) -> CayleyGraph:
    """Convenience constructor from factor orders and element coordinates or indices."""
    G = AbelianGroup(tuple(factors))
    elems = []
    for e in lam:
        elems.append(e if isinstance(e, int) else tuple(e))
    return build_cayley(G, ConnectionSet.from_elements(G, elems))


def random_cayley(G: AbelianGroup, p: float, seed: int) -> CayleyGraph:
    return build_cayley(G, sample_connection_set(G, p, seed), p=p, seed=seed)


@dataclass(frozen=True)
class VertexMap:
    kind: Literal["rotation", "reflection", "generic"]
    shift: int | None
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    def image_mask(self, X: int) -> int:
        return to_mask(self.images[x] for x in bits(X))

    def is_automorphism(self, H: Graph) -> bool:
        im = self.images
        return all(
            H.has_edge(im[x], im[y]) == H.has_edge(x, y)
            for x in range(H.n) for y in range(x + 1, H.n)
        )


def rotations_reflections(G: AbelianGroup) -> list[VertexMap]:
    """All k rotations by g-index, then all k reflections by g-index.

    Coinciding maps (groups with 2-torsion) are kept; the list always has 2|G| entries.
    """
    n = G.order
    rots = [VertexMap("rotation", g, tuple(G.add_idx(x, g) for x in range(n))) for g in range(n)]
    refs = [
        VertexMap("reflection", g, tuple(G.add_idx(G.neg_idx(x), g) for x in range(n)))
        for g in range(n)
    ]
    return rots + refs


def distinct_map_count(G: AbelianGroup) -> int:
    return len({m.images for m in rotations_reflections(G)})


def maps_hitting_vertex(G: AbelianGroup, H_vertices: int | Iterable[int], x: int) -> int:
    X = H_vertices if isinstance(H_vertices, int) else to_mask(H_vertices)
    return sum(1 for m in rotations_reflections(G) if (m.image_mask(X) >> x) & 1)


def delete_vertices(H: CayleyGraph, D: int | Iterable[int]) -> tuple[Graph, list[int]]:
    Dm = D if isinstance(D, int) else to_mask(D)
    keep = H.graph.full_mask & ~Dm
    if not keep:
        raise DomainError("cannot delete every vertex")
    if Dm & ~H.graph.full_mask:
        raise StructuralError("deletion set contains vertices outside the graph")
    return induced_subgraph(H.graph, keep)


def deletion_budget(ktilde: int) -> int:
    """Largest |D| with k >= ktilde - (1/4) log ktilde, in the configured log base."""
    return math.floor(0.25 * config.log(ktilde))


def is_cayley_connected(H: CayleyGraph) -> bool:
    return H.graph.is_connected()
