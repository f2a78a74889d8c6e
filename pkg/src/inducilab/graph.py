"""Dense simple graphs on vertices ``0..n-1`` with per-vertex bitset adjacency."""

from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, StructuralError


def bits(mask: int) -> Iterator[int]:
    """Yield the positions of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Immutable undirected simple graph.

    ``adj[v]`` is an int whose bit ``u`` is set iff ``u`` and ``v`` are adjacent.
    """

    __slots__ = ("n", "adj", "_hash")

    def __init__(self, n: int, adj: Sequence[int]):
        if len(adj) != n:
            raise StructuralError(f"adjacency has {len(adj)} rows for {n} vertices")
        full = (1 << n) - 1
        adj = tuple(int(a) for a in adj)
        for v, a in enumerate(adj):
            if a & ~full:
                raise StructuralError(f"vertex {v} has a neighbor outside range")
            if (a >> v) & 1:
                raise StructuralError(f"self-loop at vertex {v}")
            for u in bits(a):
                if not (adj[u] >> v) & 1:
                    raise StructuralError(f"asymmetric adjacency between {v} and {u}")
        self.n = n
        self.adj = adj
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def _trusted(cls, n: int, adj: Sequence[int]) -> "Graph":
        g = object.__new__(cls)
        g.n = n
        g.adj = tuple(adj)
        g._hash = None
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise StructuralError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls._trusted(n, adj)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls._trusted(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls._trusted(n, [full & ~(1 << v) for v in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    # -- basic queries --------------------------------------------------
    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def complement(self) -> "Graph":
        full = self.full_mask
        return Graph._trusted(self.n, [full & ~a & ~(1 << v) for v, a in enumerate(self.adj)])

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen == self.full_mask

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which old vertex ``v`` becomes ``perm[v]``."""
        adj = [0] * self.n
        for v in range(self.n):
            m = 0
            for u in bits(self.adj[v]):
                m |= 1 << perm[u]
            adj[perm[v]] = m
        return Graph._trusted(self.n, adj)

    def disjoint_union(self, other: "Graph") -> "Graph":
        shift = self.n
        return Graph._trusted(self.n + other.n, list(self.adj) + [a << shift for a in other.adj])

    # -- dunder ---------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.adj))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"

    def to_json(self) -> dict:
        return {"n": self.n, "adjacency": [self.neighbors(v) for v in range(self.n)]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Graph":
        if isinstance(data, str):
            data = json.loads(data)
        n = data["n"]
        edges = [(u, v) for u, nb in enumerate(data["adjacency"]) for v in nb if u < v]
        return cls.from_edges(n, edges)


# ---------------------------------------------------------------------------
# adjacency notation


def adjacency(G: Graph, x: int, y: int) -> int:
    if x == y:
        raise DomainError("adjacency is defined for distinct vertices")
    return int(G.has_edge(x, y))


def _as_mask(S: int | Iterable[int]) -> int:
    return S if isinstance(S, int) else to_mask(S)


def block_adjacency(G: Graph, X: int | Iterable[int], Y: int | Iterable[int]) -> int:
    """Density between X and Y rounded to 0/1; a tie counts as 1."""
    xm, ym = _as_mask(X), _as_mask(Y)
    if not xm or not ym:
        raise DomainError("block adjacency needs non-empty vertex sets")
    if xm & ym:
        raise DomainError("block adjacency needs disjoint vertex sets")
    edges = sum((G.adj[x] & ym).bit_count() for x in bits(xm))
    return int(2 * edges >= xm.bit_count() * ym.bit_count())


def induced_subgraph(G: Graph, X: int | Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on X, relabelled in increasing order, plus the back-map."""
    verts = sorted(bits(X)) if isinstance(X, int) else sorted(set(X))
    if not verts:
        raise DomainError("induced subgraph of an empty vertex set")
    pos = {v: i for i, v in enumerate(verts)}
    adj = []
    for v in verts:
        m = 0
        for u in bits(G.adj[v]):
            if u in pos:
                m |= 1 << pos[u]
        adj.append(m)
    return Graph._trusted(len(verts), adj), verts


# ---------------------------------------------------------------------------
# modules and primality


def is_module(G: Graph, U: int) -> bool:
    """Every vertex outside U is complete or empty to U."""
    outside = G.full_mask & ~U
    for z in bits(outside):
        hit = G.adj[z] & U
        if hit and hit != U:
            return False
    return True


def _module_closure(G: Graph, seed: int) -> int:
    """Smallest module containing ``seed``: absorb splitters until none remain."""
    M = seed
    while True:
        outside = G.full_mask & ~M
        grown = M
        for z in bits(outside):
            hit = G.adj[z] & M
            if hit and hit != M:
                grown |= 1 << z
        if grown == M:
            return M
        M = grown


def _prime_witness_bruteforce(G: Graph) -> int | None:
    n = G.n
    for size in range(2, n):
        for U in combinations(range(n), size):
            m = to_mask(U)
            if is_module(G, m):
                return m
    return None


def _prime_witness_closure(G: Graph) -> int | None:
    # A nontrivial module exists iff the closure of some pair is proper.
    for u, v in combinations(range(G.n), 2):
        M = _module_closure(G, (1 << u) | (1 << v))
        if M != G.full_mask:
            return M
    return None


BRUTE_FORCE_PRIME_MAX_N = 10


def prime_witness(G: Graph, method: str = "auto") -> int | None:
    """A module U with 2 <= |U| < n as a bitmask, or None when G is prime."""
    if G.n < 1:
        raise DomainError("primality needs at least one vertex")
    if method == "brute" or (method == "auto" and G.n <= BRUTE_FORCE_PRIME_MAX_N):
        return _prime_witness_bruteforce(G)
    return _prime_witness_closure(G)


def is_prime(G: Graph, method: str = "auto") -> tuple[bool, frozenset[int] | None]:
    w = prime_witness(G, method)
    return (w is None, None if w is None else frozenset(bits(w)))
