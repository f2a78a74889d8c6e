"""Exact counting of induced embeddings H -> Gamma.

Embeddings are enumerated by backtracking over the vertices of H in a fixed
order.  Every already-placed vertex constrains every later one (edges to
neighbourhoods, non-edges to non-neighbourhoods), so candidate sets are kept
as bitmasks and narrowed by one AND per placed vertex.  The last level is
counted with a popcount instead of being expanded.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence

from .graph import Graph


def search_order(H: Graph) -> list[int]:
    """Greedy order: next vertex has the most neighbours already placed.

    Ties go to higher degree, then lower index.
    """
    k = H.n
    if k == 0:
        return []
    placed = 0
    order: list[int] = []
    remaining = set(range(k))
    while remaining:
        best = max(
            remaining,
            key=lambda v: ((H.adj[v] & placed).bit_count(), H.degree(v), -v),
        )
        order.append(best)
        placed |= 1 << best
        remaining.discard(best)
    return order


class _Plan:
    """Per-(H, Gamma) data shared by the counting and listing routines."""

    __slots__ = ("H", "G", "order", "k", "nb", "nn", "edge_to_later", "domains")

    def __init__(self, H: Graph, G: Graph, domains: Sequence[int] | None = None):
        self.H = H
        self.G = G
        self.order = search_order(H)
        self.k = H.n
        full = G.full_mask
        self.nb = G.adj
        self.nn = tuple(full & ~a & ~(1 << v) for v, a in enumerate(G.adj))
        # edge_to_later[i][t] says whether order[i] ~ order[t] for t > i
        self.edge_to_later = [
            [H.has_edge(self.order[i], self.order[t]) for t in range(self.k)]
            for i in range(self.k)
        ]
        if domains is None:
            self.domains = [full] * self.k
        else:
            self.domains = [domains[self.order[i]] & full for i in range(self.k)]


def _constraint_domains(
    H: Graph, G: Graph, constraints: Mapping[int, int] | None, domains: Sequence[int] | None
) -> list[int] | None:
    """Fold a partial map into per-vertex candidate masks; None if inconsistent."""
    full = G.full_mask
    doms = list(domains) if domains is not None else [full] * H.n
    if not constraints:
        return doms
    images = list(constraints.values())
    if len(set(images)) != len(images):
        return None
    for x, y in constraints.items():
        if not (0 <= x < H.n and 0 <= y < G.n):
            return None
        doms[x] &= 1 << y
    items = list(constraints.items())
    for i, (x, y) in enumerate(items):
        for x2, y2 in items[i + 1:]:
            if H.has_edge(x, x2) != G.has_edge(y, y2):
                return None
    return doms


def count_embeddings(
    H: Graph,
    G: Graph,
    constraints: Mapping[int, int] | None = None,
    domains: Sequence[int] | None = None,
) -> int:
    """Number of induced embeddings of H into G extending ``constraints``.

    ``domains`` optionally restricts the image of each H-vertex to a bitmask.
    An inconsistent partial map yields 0.
    """
    k = H.n
    if k == 0:
        return 1
    if k > G.n:
        return 0
    doms = _constraint_domains(H, G, constraints, domains)
    if doms is None:
        return 0
    plan = _Plan(H, G, doms)
    return _count(plan)


def _count(plan: _Plan) -> int:
    k = plan.k
    nb, nn, e2l = plan.nb, plan.nn, plan.edge_to_later
    last = k - 1

    def rec(i: int, cands: list[int], used: int) -> int:
        avail = cands[i] & ~used
        if i == last:
            return avail.bit_count()
        total = 0
        row = e2l[i]
        while avail:
            low = avail & -avail
            w = low.bit_length() - 1
            avail ^= low
            u2 = used | low
            nw, nnw = nb[w], nn[w]
            new = cands[:]
            ok = True
            for t in range(i + 1, k):
                m = new[t] & (nw if row[t] else nnw)
                if not m & ~u2:
                    ok = False
                    break
                new[t] = m
            if ok:
                total += rec(i + 1, new, u2)
        return total

    return rec(0, list(plan.domains), 0)


def iter_embeddings(
    H: Graph,
    G: Graph,
    constraints: Mapping[int, int] | None = None,
    domains: Sequence[int] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield embeddings as tuples ``theta`` with ``theta[x]`` the image of x."""
    k = H.n
    if k == 0:
        yield ()
        return
    if k > G.n:
        return
    doms = _constraint_domains(H, G, constraints, domains)
    if doms is None:
        return
    plan = _Plan(H, G, doms)
    order = plan.order
    nb, nn, e2l = plan.nb, plan.nn, plan.edge_to_later
    image = [0] * k

    def rec(i: int, cands: list[int], used: int) -> Iterator[tuple[int, ...]]:
        avail = cands[i] & ~used
        row = e2l[i]
        while avail:
            low = avail & -avail
            w = low.bit_length() - 1
            avail ^= low
            image[order[i]] = w
            if i == k - 1:
                yield tuple(image)
                continue
            u2 = used | low
            nw, nnw = nb[w], nn[w]
            new = cands[:]
            ok = True
            for t in range(i + 1, k):
                m = new[t] & (nw if row[t] else nnw)
                if not m & ~u2:
                    ok = False
                    break
                new[t] = m
            if ok:
                yield from rec(i + 1, new, u2)

    yield from rec(0, list(plan.domains), 0)


def count_embeddings_bruteforce(H: Graph, G: Graph) -> int:
    """Oracle: test every injective map.  Only for tiny graphs."""
    from itertools import permutations

    k = H.n
    pairs = [(x, y, H.has_edge(x, y)) for x in range(k) for y in range(x + 1, k)]
    total = 0
    for img in permutations(range(G.n), k):
        if all(G.has_edge(img[x], img[y]) == e for x, y, e in pairs):
            total += 1
    return total


def exists_embedding(
    H: Graph,
    G: Graph,
    constraints: Mapping[int, int] | None = None,
    domains: Sequence[int] | None = None,
) -> bool:
    for _ in iter_embeddings(H, G, constraints, domains):
        return True
    return False


def count_automorphisms(H: Graph) -> int:
    """aut(H) = emb(H, H), computed as a product of orbit sizes along a stabiliser chain.

    Fixing vertices one at a time, the orbit of the next vertex under the
    pointwise stabiliser is found with first-hit searches, so graphs with huge
    groups (K_n, empty graphs) never have their automorphisms listed.
    """
    n = H.n
    fixed: dict[int, int] = {}
    total = 1
    for v in search_order(H):
        orbit = 0
        taken = set(fixed.values())
        for w in range(n):
            if w in taken or H.degree(w) != H.degree(v):
                continue
            trial = dict(fixed)
            trial[v] = w
            if exists_embedding(H, H, trial):
                orbit += 1
        total *= orbit
        fixed[v] = v
    return total


def count_induced_copies(H: Graph, G: Graph) -> int:
    emb = count_embeddings(H, G)
    aut = count_automorphisms(H)
    q, r = divmod(emb, aut)
    if r:
        raise AssertionError(f"emb={emb} is not divisible by aut={aut}")
    return q


def per_vertex_embedding_counts(H: Graph, G: Graph) -> list[int]:
    """For each w in G, the number of embeddings whose image contains w."""
    total = count_embeddings(H, G)
    out = []
    full = G.full_mask
    for w in range(G.n):
        avoid = count_embeddings(H, G, domains=[full & ~(1 << w)] * H.n)
        out.append(total - avoid)
    return out


def embeddings_with_image_in(H: Graph, G: Graph, fixed: Mapping[int, int], free_mask: int) -> int:
    """Embeddings agreeing with ``fixed`` and sending every other vertex into ``free_mask``."""
    full = G.full_mask
    doms = [free_mask & full] * H.n
    for x in fixed:
        doms[x] = full
    return count_embeddings(H, G, constraints=fixed, domains=doms)


def is_embedding(H: Graph, G: Graph, theta: Sequence[int]) -> bool:
    if len(set(theta)) != len(theta) or len(theta) != H.n:
        return False
    for x in range(H.n):
        for y in range(x + 1, H.n):
            if H.has_edge(x, y) != G.has_edge(theta[x], theta[y]):
                return False
    return True
