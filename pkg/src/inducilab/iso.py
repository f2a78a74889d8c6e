"""Isomorphism testing and exhaustive enumeration of small graphs."""

from __future__ import annotations

import os
from collections import defaultdict
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from .embed import iter_embeddings
from .errors import CapacityError
from .graph import Graph, bits
from . import graph6

LABELED_CAP = 8
CANONICAL_CAP = 9
DISK_CACHE_MIN_N = 8


def cache_dir() -> Path:
    """Where class lists for n >= 8 are stored (INDUCILAB_CACHE overrides)."""
    return Path(os.environ.get("INDUCILAB_CACHE", Path.home() / ".cache" / "inducilab"))


def vertex_invariants(G: Graph, rounds: int = 2) -> list[tuple]:
    """Colour refinement seeded with (degree, triangles through v)."""
    tri = []
    for v in range(G.n):
        a = G.adj[v]
        tri.append(sum((G.adj[u] & a).bit_count() for u in bits(a)) // 2)
    colors: list[tuple] = [(G.degree(v), tri[v]) for v in range(G.n)]
    for _ in range(rounds):
        colors = [
            (colors[v], tuple(sorted(colors[u] for u in bits(G.adj[v]))))
            for v in range(G.n)
        ]
    return colors


def _refine(nbrs: list[list[int]], colors: list[int]) -> list[int]:
    """Refine to the coarsest equitable partition; colours renumbered canonically."""
    ncol = len(set(colors))
    while True:
        sigs = [(colors[v], tuple(sorted([colors[u] for u in nb]))) for v, nb in enumerate(nbrs)]
        order = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        colors = [order[sig] for sig in sigs]
        if len(order) == ncol:
            return colors
        ncol = len(order)


def stable_coloring(G: Graph) -> list[int]:
    """Colour refinement started from degrees."""
    return _refine([list(bits(a)) for a in G.adj], [a.bit_count() for a in G.adj])


CANON_LEAF_CAP = 256


def refined_canonical_code(G: Graph, leaf_cap: int = CANON_LEAF_CAP) -> tuple[int, ...] | None:
    """Canonical form by individualisation-refinement, or None past ``leaf_cap`` leaves.

    Refinement commutes with isomorphisms and the branching cell is chosen
    from colour data only, so the minimum adjacency tuple over all leaves is
    the same for isomorphic graphs.  Graphs whose search tree is too large
    (large symmetric cells) return None and are compared by backtracking.
    """
    n = G.n
    nbrs = [list(bits(a)) for a in G.adj]
    best: tuple[int, ...] | None = None
    leaves = 0

    def relabel(colors: list[int]) -> tuple[int, ...]:
        adj = [0] * n
        for v in range(n):
            m = 0
            for u in nbrs[v]:
                m |= 1 << colors[u]
            adj[colors[v]] = m
        return tuple(adj)

    def search(colors: list[int]) -> bool:
        nonlocal best, leaves
        colors = _refine(nbrs, colors)
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        if len(counts) == n:
            leaves += 1
            code = relabel(colors)
            if best is None or code < best:
                best = code
            return leaves <= leaf_cap
        target = min((size, c) for c, size in counts.items() if size > 1)[1]
        for v in range(n):
            if colors[v] != target:
                continue
            ind = [2 * c + 1 for c in colors]
            ind[v] = 2 * target
            if not search(ind):
                return False
        return True

    if not search([a.bit_count() for a in G.adj]):
        return None
    return best


def graph_invariant(G: Graph) -> tuple:
    return (G.n, G.num_edges(), tuple(sorted(vertex_invariants(G))))


def find_isomorphism(G1: Graph, G2: Graph) -> tuple[int, ...] | None:
    """A bijection ``p`` with ``G1 ~ G2`` via ``v -> p[v]``, or None."""
    if G1.n != G2.n or G1.num_edges() != G2.num_edges():
        return None
    inv1, inv2 = vertex_invariants(G1), vertex_invariants(G2)
    if sorted(inv1) != sorted(inv2):
        return None
    by_color: dict[tuple, int] = defaultdict(int)
    for w, c in enumerate(inv2):
        by_color[c] |= 1 << w
    domains = [by_color[c] for c in inv1]
    for theta in iter_embeddings(G1, G2, domains=domains):
        return theta
    return None


def are_isomorphic(G1: Graph, G2: Graph) -> bool:
    return find_isomorphism(G1, G2) is not None


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for j in range(1, n) for i in range(j)]


def graph_from_index(n: int, code: int) -> Graph:
    """Labelled graph whose bit t says whether the t-th pair (column-major) is an edge."""
    adj = [0] * n
    for t, (i, j) in enumerate(_pairs(n)):
        if (code >> t) & 1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return Graph._trusted(n, adj)


def enumerate_graphs(
    n: int, canonical: bool = False, part: tuple[int, int] = (0, 1)
) -> Iterator[Graph]:
    """Every labelled graph on n vertices, or one representative per isomorphism class.

    ``part=(i, m)`` restricts the stream to the i-th of m interleaved slices so
    workers can cover disjoint ranges.
    """
    i, m = part
    if canonical:
        if n > CANONICAL_CAP:
            raise CapacityError(f"isomorphism-class enumeration capped at n={CANONICAL_CAP}")
        for t, G in enumerate(graph_classes(n)):
            if t % m == i:
                yield G
        return
    if n > LABELED_CAP:
        raise CapacityError(f"labelled enumeration capped at n={LABELED_CAP}")
    total = 1 << (n * (n - 1) // 2)
    for code in range(i, total, m):
        yield graph_from_index(n, code)


@lru_cache(maxsize=None)
def graph_classes(n: int) -> tuple[Graph, ...]:
    """One representative per isomorphism class on n vertices, in graph6 order.

    Lists for n >= 8 are cached on disk as graph6 files; n = 9 takes minutes
    to build the first time.
    """
    if n > CANONICAL_CAP:
        raise CapacityError(f"isomorphism-class enumeration capped at n={CANONICAL_CAP}")
    if n < DISK_CACHE_MIN_N:
        return _build_classes(n)
    path = cache_dir() / f"classes_{n}.g6"
    if path.exists():
        graphs = tuple(graph6.read_file(path))
        if len(graphs) == _KNOWN_CLASS_COUNTS.get(n, len(graphs)):
            return graphs
    graphs = _build_classes(n)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        graph6.write_file(tmp, graphs)
        tmp.replace(path)
    except OSError:
        pass
    return graphs


# used only to reject truncated cache files
_KNOWN_CLASS_COUNTS = {8: 12346, 9: 274668}


def _build_classes(n: int) -> tuple[Graph, ...]:
    """One representative per isomorphism class, built by vertex augmentation.

    Every graph on n vertices arises from a graph on n-1 vertices by adding a
    vertex.  Candidates that colour refinement fully separates are deduplicated
    by their canonical code; the rest are bucketed by invariant and compared
    by backtracking.
    """
    if n <= 0:
        return (Graph.empty(0),)
    if n == 1:
        return (Graph.empty(1),)
    buckets: dict[tuple, list[Graph]] = defaultdict(list)
    codes: set[tuple[int, ...]] = set()
    reps: list[Graph] = []
    for base in graph_classes(n - 1):
        for S in range(1 << (n - 1)):
            adj = list(base.adj) + [S]
            for u in bits(S):
                adj[u] |= 1 << (n - 1)
            cand = Graph._trusted(n, adj)
            code = refined_canonical_code(cand)
            if code is not None:
                if code not in codes:
                    codes.add(code)
                    reps.append(cand)
                continue
            key = graph_invariant(cand)
            bucket = buckets[key]
            if any(are_isomorphic(cand, other) for other in bucket):
                continue
            bucket.append(cand)
            reps.append(cand)
    reps.sort(key=graph6.encode)
    return tuple(reps)


def dedupe_isomorphic(graphs) -> list[Graph]:
    """Keep one graph per isomorphism class, sorted by graph6 string."""
    buckets: dict[tuple, list[Graph]] = defaultdict(list)
    out = []
    for G in graphs:
        key = graph_invariant(G)
        if any(are_isomorphic(G, o) for o in buckets[key]):
            continue
        buckets[key].append(G)
        out.append(G)
    out.sort(key=graph6.encode)
    return out


def permutation_canonical_form(G: Graph) -> tuple[int, ...]:
    """Oracle canonical form: lexicographically smallest adjacency over all relabellings."""
    from itertools import permutations

    best = None
    for perm in permutations(range(G.n)):
        code = G.relabel(perm).adj
        if best is None or code < best:
            best = code
    return best


def labeled_graphs_count(n: int) -> int:
    return 1 << (n * (n - 1) // 2)


__all__ = [
    "are_isomorphic",
    "enumerate_graphs",
    "find_isomorphism",
    "graph_classes",
    "dedupe_isomorphic",
]
