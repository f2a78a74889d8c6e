"""Finite-n extremal values emb(H, n) and ind(H, n).

Exhaustive mode scans one representative per isomorphism class (emb is an
isomorphism invariant).  Local-search mode only ever produces lower bounds.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Literal

from . import config, graph6
from .embed import count_automorphisms, count_embeddings, per_vertex_embedding_counts
from .errors import CapacityError, DomainError
from .graph import Graph, bits
from .iso import CANONICAL_CAP, enumerate_graphs

EXHAUSTIVE_CAP = CANONICAL_CAP


@dataclass
class EmbMax:
    value: int
    witnesses: list[Graph]
    exact: bool
    mode: str
    n: int
    notes: list[str] = field(default_factory=list)


def _scan(args: tuple[str, int, int, int]) -> tuple[int, list[str]]:
    h6, n, i, m = args
    H = graph6.decode(h6)
    best = -1
    wit: list[str] = []
    for G in enumerate_graphs(n, canonical=True, part=(i, m)):
        c = count_embeddings(H, G)
        if c > best:
            best, wit = c, [graph6.encode(G)]
        elif c == best:
            wit.append(graph6.encode(G))
    return best, wit


def _exhaustive(H: Graph, n: int, workers: int = 1) -> tuple[int, list[Graph]]:
    if n > EXHAUSTIVE_CAP:
        raise CapacityError(f"exhaustive emb(H, n) is capped at n={EXHAUSTIVE_CAP}")
    if n < 0:
        raise DomainError("n must be non-negative")
    h6 = graph6.encode(H)
    jobs = [(h6, n, i, workers) for i in range(workers)]
    if workers == 1:
        results = [_scan(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan, jobs))
    best = max(r[0] for r in results)
    wit = sorted(w for r in results if r[0] == best for w in r[1])
    return best, [graph6.decode(w) for w in wit]


@lru_cache(maxsize=None)
def _exhaustive_cached(h6: str, n: int) -> tuple[int, tuple[str, ...]]:
    best, wit = _exhaustive(graph6.decode(h6), n)
    return best, tuple(graph6.encode(w) for w in wit)


def emb_max(
    H: Graph,
    n: int,
    mode: Literal["exhaustive", "local_search"] = "exhaustive",
    workers: int = 1,
    seed: int = 0,
    restarts: int = 8,
    max_steps: int = 200,
) -> EmbMax:
    """emb(H, n): the maximum number of embeddings of H into an n-vertex graph.

    Exhaustive witnesses are one graph per maximizing isomorphism class, in
    graph6 order.  Local search returns a labelled lower bound.
    """
    if n < H.n:
        return EmbMax(0, [Graph.empty(n)] if n >= 0 else [], True, mode, n,
                      ["n < |H|: no injective map exists"])
    if mode == "exhaustive":
        if workers == 1:
            best, wit = _exhaustive_cached(graph6.encode(H), n)
            return EmbMax(best, [graph6.decode(w) for w in wit], True, mode, n)
        best, wits = _exhaustive(H, n, workers)
        return EmbMax(best, wits, True, mode, n)
    if mode == "local_search":
        val, G = local_search(H, n, seed=seed, restarts=restarts, max_steps=max_steps)
        return EmbMax(val, [G], False, mode, n, ["lower bound from local search"])
    raise DomainError(f"unknown mode {mode!r}")


def emb_value(H: Graph, n: int) -> int:
    return emb_max(H, n).value


def ind_value(H: Graph, n: int) -> int:
    emb = emb_value(H, n)
    q, r = divmod(emb, count_automorphisms(H))
    assert r == 0
    return q


def emb_sequence(H: Graph, m_lo: int, m_hi: int) -> list[int]:
    if m_hi > EXHAUSTIVE_CAP:
        raise CapacityError(f"emb_sequence is exhaustive and capped at m={EXHAUSTIVE_CAP}")
    return [emb_value(H, m) for m in range(m_lo, m_hi + 1)]


def sequence_rows(H: Graph, m_lo: int, m_hi: int) -> list[dict]:
    """Rows for the sequence CSV: m, emb, ind, and ind / C(m, k) as a fraction."""
    aut = count_automorphisms(H)
    k = H.n
    rows = []
    for m, e in zip(range(m_lo, m_hi + 1), emb_sequence(H, m_lo, m_hi)):
        ind = e // aut
        denom = comb(m, k)
        ratio = Fraction(ind, denom) if denom else Fraction(0)
        rows.append({"m": m, "emb": e, "ind": ind,
                     "ratio_num": ratio.numerator, "ratio_den": ratio.denominator})
    return rows


# ---------------------------------------------------------------------------
# local search


def delete_vertex(G: Graph, v: int) -> Graph:
    from .graph import induced_subgraph

    return induced_subgraph(G, G.full_mask & ~(1 << v))[0]


def clone_vertex(G: Graph, w: int) -> Graph:
    """Add a twin of w that is not adjacent to w."""
    n = G.n
    adj = list(G.adj) + [G.adj[w]]
    for u in bits(G.adj[w]):
        adj[u] |= 1 << n
    return Graph._trusted(n + 1, adj)


def local_search_step(G: Graph, H: Graph) -> Graph:
    """Delete the least-covered vertex, clone the most-covered survivor.

    The new graph is returned when emb(H, .) does not decrease, otherwise G.
    """
    if G.n < 2:
        raise DomainError("local search step needs at least two vertices")
    before = count_embeddings(H, G)
    cover = per_vertex_embedding_counts(H, G)
    v = min(range(G.n), key=lambda u: (cover[u], u))
    smaller = delete_vertex(G, v)
    cover2 = per_vertex_embedding_counts(H, smaller)
    w = max(range(smaller.n), key=lambda u: (cover2[u], -u))
    cand = clone_vertex(smaller, w)
    return cand if count_embeddings(H, cand) >= before else G


def _random_graph(n: int, rng, p: float = 0.5) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def _flip(G: Graph, i: int, j: int) -> Graph:
    adj = list(G.adj)
    adj[i] ^= 1 << j
    adj[j] ^= 1 << i
    return Graph._trusted(G.n, adj)


def local_search(
    H: Graph, n: int, seed: int = 0, restarts: int = 8, max_steps: int = 200
) -> tuple[int, Graph]:
    """Hill climbing with clone/delete steps and single edge flips from random starts."""
    rng = config.substream(seed, "local_search")
    best_val, best_G = -1, Graph.empty(n)
    for _ in range(restarts):
        G = _random_graph(n, rng, rng.uniform(0.2, 0.8))
        val = count_embeddings(H, G)
        for _ in range(max_steps):
            improved = False
            if n >= 2:
                G2 = local_search_step(G, H)
                v2 = count_embeddings(H, G2)
                if v2 > val:
                    G, val, improved = G2, v2, True
            if not improved:
                pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
                for t in rng.permutation(len(pairs)):
                    i, j = pairs[t]
                    G2 = _flip(G, i, j)
                    v2 = count_embeddings(H, G2)
                    if v2 > val:
                        G, val, improved = G2, v2, True
                        break
            if not improved:
                break
        if val > best_val or (val == best_val and graph6.encode(G) < graph6.encode(best_G)):
            best_val, best_G = val, G
    return best_val, best_G
