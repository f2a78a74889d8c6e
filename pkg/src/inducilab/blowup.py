"""Balanced and iterated blow-ups, embedding counts into them, and the
part-size objective T.

A blow-up of a pattern graph B replaces vertex j of B by a non-empty part
W_j; two parts are completely joined when the pattern vertices are adjacent
and have no edges between them otherwise.  Parts are either leaves
(explicit graphs) or blow-ups themselves.

Counting rests on one structural fact: if H is prime and |H| >= 2, the
trace of an embedded copy of H on any part is a module of H, so each copy
either lies inside a single part or meets every part at most once.  In the
second case, collapsing parts gives an embedding H -> B.
"""

from __future__ import annotations

import itertools
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from . import graph6
from .cayley import CayleyGraph, VertexMap, rotations_reflections
from .embed import count_embeddings, iter_embeddings
from .errors import CapacityError, DomainError, StructuralError
from .extremal import EXHAUSTIVE_CAP, emb_max
from .graph import Graph, is_prime


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Leaf:
    graph: Graph

    @property
    def size(self) -> int:
        return self.graph.n

    def to_json(self) -> dict:
        return {"leaf": graph6.encode(self.graph)}


@dataclass(frozen=True)
class BlowupTree:
    """A blow-up of ``base``; part j replaces base vertex j."""

    base: Graph
    parts: tuple[Union[Leaf, "BlowupTree"], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) != self.base.n:
            raise StructuralError(
                f"blow-up of a {self.base.n}-vertex base needs {self.base.n} parts, got {len(self.parts)}"
            )
        for j, part in enumerate(self.parts):
            if not isinstance(part, (Leaf, BlowupTree)):
                raise StructuralError(f"part {j} is neither a Leaf nor a BlowupTree")
            if part.size == 0:
                raise StructuralError(f"part {j} is empty; blow-up parts must be non-empty")

    @property
    def size(self) -> int:
        return sum(p.size for p in self.parts)

    @property
    def part_sizes(self) -> list[int]:
        return [p.size for p in self.parts]

    def is_balanced(self) -> bool:
        """Part sizes differ by at most one at every level."""
        sizes = self.part_sizes
        if max(sizes) - min(sizes) > 1:
            return False
        return all(p.is_balanced() for p in self.parts if isinstance(p, BlowupTree))

    def depth(self) -> int:
        return 1 + max((p.depth() for p in self.parts if isinstance(p, BlowupTree)), default=0)

    def to_json(self) -> dict:
        return {"base": graph6.encode(self.base), "parts": [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, data: dict | str) -> "BlowupTree":
        if isinstance(data, str):
            data = json.loads(data)
        node = tree_from_json(data)
        if not isinstance(node, BlowupTree):
            raise StructuralError("top-level JSON object is a leaf, not a blow-up")
        return node


def tree_from_json(data: dict) -> Leaf | BlowupTree:
    if "leaf" in data:
        return Leaf(graph6.decode(data["leaf"]))
    if "base" in data and "parts" in data:
        return BlowupTree(graph6.decode(data["base"]), tuple(tree_from_json(p) for p in data["parts"]))
    raise StructuralError("blow-up JSON node needs either 'leaf' or 'base' and 'parts'")


@dataclass(frozen=True)
class LeafPolicy:
    """What occupies a part that is too small to be blown up further.

    ``empty``: the edgeless graph.  ``maximizer``: an emb(H, n)-maximizer
    from exhaustive search (first witness in graph6 order).  ``explicit``:
    the first supplied graph of the right order.
    """

    kind: str = "empty"
    H: Graph | None = None
    graphs: tuple[Graph, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("empty", "maximizer", "explicit"):
            raise DomainError(f"unknown leaf policy {self.kind!r}")
        if self.kind == "maximizer" and self.H is None:
            raise DomainError("maximizer leaf policy needs the pattern graph H")

    @classmethod
    def empty_graph(cls) -> "LeafPolicy":
        return cls("empty")

    @classmethod
    def emb_maximizer(cls, H: Graph) -> "LeafPolicy":
        return cls("maximizer", H=H)

    @classmethod
    def explicit(cls, graphs: Iterable[Graph]) -> "LeafPolicy":
        return cls("explicit", graphs=tuple(graphs))

    def leaf_graph(self, n: int) -> Graph:
        if self.kind == "empty":
            return Graph.empty(n)
        if self.kind == "maximizer":
            if n > EXHAUSTIVE_CAP:
                warnings.warn(
                    f"leaf of order {n} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; using the empty graph",
                    stacklevel=2,
                )
                return Graph.empty(n)
            return emb_max(self.H, n).witnesses[0]
        for G in self.graphs:
            if G.n == n:
                return G
        raise StructuralError(f"explicit leaf policy has no graph of order {n}")


# ---------------------------------------------------------------------------
# construction


def balanced_parts(n: int, ktilde: int) -> list[int]:
    """Sizes ceil(n/k~) (n mod k~ times), then floor(n/k~), on parts 0..k~-1."""
    if n < 0 or ktilde < 1:
        raise DomainError("need n >= 0 and ktilde >= 1")
    q, r = divmod(n, ktilde)
    return [q + 1] * r + [q] * (ktilde - r)


def blowup_parts(n: int, ktilde: int) -> list[int]:
    """Balanced part sizes for an actual blow-up; every part must be non-empty."""
    if n < ktilde:
        raise DomainError(
            f"{n} vertices cannot be split into {ktilde} non-empty parts; such a node is a leaf"
        )
    return balanced_parts(n, ktilde)


def _base_graph(Ht: CayleyGraph | Graph) -> Graph:
    return Ht.graph if isinstance(Ht, CayleyGraph) else Ht


def balanced_iterated_tree(
    base: CayleyGraph | Graph, n: int, leaf_policy: LeafPolicy | None = None
) -> Leaf | BlowupTree:
    """The balanced iterated blow-up of ``base`` on n vertices.

    Nodes with fewer vertices than the base become leaves filled by the
    leaf policy (empty graphs by default).
    """
    B = _base_graph(base)
    policy = leaf_policy or LeafPolicy.empty_graph()
    cache: dict[int, Leaf | BlowupTree] = {}

    def node(m: int) -> Leaf | BlowupTree:
        if m not in cache:
            if m < B.n:
                cache[m] = Leaf(policy.leaf_graph(m))
            else:
                cache[m] = BlowupTree(B, tuple(node(s) for s in blowup_parts(m, B.n)))
        return cache[m]

    if n < 0:
        raise DomainError("n must be non-negative")
    return node(n)


def blowup_from_sizes(
    base: CayleyGraph | Graph, sizes: Sequence[int], leaf_policy: LeafPolicy | None = None
) -> BlowupTree:
    """One-level blow-up with the given (positive) part sizes and policy leaves."""
    policy = leaf_policy or LeafPolicy.empty_graph()
    return BlowupTree(_base_graph(base), tuple(Leaf(policy.leaf_graph(s)) for s in sizes))


def build_blowup_with_parts(spec: Leaf | BlowupTree) -> tuple[Graph, list[int]]:
    """Materialize the spec; also return the top-level part of every vertex.

    Parts occupy contiguous vertex ranges in part order.  For a leaf every
    vertex is reported in part 0.
    """
    if isinstance(spec, Leaf):
        return spec.graph, [0] * spec.size
    blocks = [build_blowup(p) for p in spec.parts]
    offsets = list(itertools.accumulate([0] + [b.n for b in blocks]))
    n = offsets[-1]
    block_mask = [((1 << b.n) - 1) << off for b, off in zip(blocks, offsets)]
    adj = [0] * n
    part_of = [0] * n
    for j, (b, off) in enumerate(zip(blocks, offsets)):
        outside = 0
        for i in spec.base.neighbors(j):
            outside |= block_mask[i]
        for v in range(b.n):
            adj[off + v] = (b.adj[v] << off) | outside
            part_of[off + v] = j
    return Graph._trusted(n, adj), part_of


def build_blowup(spec: Leaf | BlowupTree) -> Graph:
    return build_blowup_with_parts(spec)[0]


# ---------------------------------------------------------------------------
# counting


def closed_form_blowup_count(ktilde: int, k: int, m: int) -> int:
    """2 k~^m (k~^{(k-1)(m-1)} + ... + k~^{k-1} + 1)."""
    if m < 1:
        raise DomainError("m must be at least 1")
    if not 1 <= k <= ktilde:
        raise DomainError("need 1 <= k <= ktilde")
    return 2 * ktilde**m * sum(ktilde ** ((k - 1) * i) for i in range(m))


def closed_form_ratio(ktilde: int, k: int, m: int) -> Fraction:
    """closed_form / k~^{mk}, exactly."""
    return Fraction(closed_form_blowup_count(ktilde, k, m), ktilde ** (m * k))


def emb_limit(ktilde: int, k: int) -> Fraction:
    """The limit 2 / (k~^{k-1} - 1) of the blow-up density."""
    return Fraction(2, ktilde ** (k - 1) - 1)


@lru_cache(maxsize=256)
def _embeddings_cached(h6: str, b6: str) -> tuple[tuple[int, ...], ...]:
    return tuple(iter_embeddings(graph6.decode(h6), graph6.decode(b6)))


def base_embeddings(H: Graph, base: Graph) -> tuple[tuple[int, ...], ...]:
    """Emb(H, base) as tuples, cached by graph6 strings."""
    return _embeddings_cached(graph6.encode(H), graph6.encode(base))


@lru_cache(maxsize=256)
def _prime_cached(h6: str) -> bool:
    return is_prime(graph6.decode(h6))[0]


def placement_sum(H: Graph, base: Graph, sizes: Sequence[int]) -> int:
    """Sum over psi in Emb(H, base) of prod_x sizes[psi(x)]."""
    total = 0
    for psi in base_embeddings(H, base):
        prod = 1
        for y in psi:
            prod *= sizes[y]
            if not prod:
                break
        total += prod
    return total


DIRECT_CAP = 400


def count_into_blowup(
    H: Graph, Ht: CayleyGraph | Graph, spec: Leaf | BlowupTree, direct_cap: int = DIRECT_CAP
) -> int:
    """emb(H, build_blowup(spec)) without materializing the blow-up when H is prime.

    At each node the count is placement_sum over the part sizes plus the
    counts inside the parts.  For non-prime H the blow-up is materialized and
    counted directly, refused above ``direct_cap`` vertices.
    """
    B = _base_graph(Ht)
    if isinstance(spec, BlowupTree) and spec.base != B:
        raise StructuralError("blow-up spec is not built over the given base graph")
    if H.n == 0:
        return 1
    if H.n == 1:
        return spec.size
    if not _prime_cached(graph6.encode(H)):
        if spec.size > direct_cap:
            raise CapacityError(
                f"H is not prime; direct counting on {spec.size} vertices exceeds the cap {direct_cap}"
            )
        return count_embeddings(H, build_blowup(spec))
    return _count_prime(H, spec, {})


def _count_prime(H: Graph, node: Leaf | BlowupTree, memo: dict) -> int:
    key = id(node)
    if key in memo:
        return memo[key][1]
    if isinstance(node, Leaf):
        val = count_embeddings(H, node.graph)
    else:
        val = placement_sum(H, node.base, node.part_sizes)
        val += sum(_count_prime(H, p, memo) for p in node.parts)
    memo[key] = (node, val)  # keep node alive so id() stays unique
    return val


# ---------------------------------------------------------------------------
# classification of embeddings into a blow-up


@dataclass(frozen=True)
class InPart:
    part: int


@dataclass(frozen=True)
class FollowsMap:
    map: VertexMap


@dataclass(frozen=True)
class Violation:
    pair: tuple[int, int] | None
    reason: str


def base_maps(Ht: CayleyGraph | Graph) -> list[VertexMap]:
    """Rotations and reflections of a Cayley base; all automorphisms of a plain base."""
    if isinstance(Ht, CayleyGraph):
        return rotations_reflections(Ht.group)
    return [VertexMap("generic", None, theta) for theta in iter_embeddings(Ht, Ht)]


def default_iota(H: Graph, Ht: CayleyGraph | Graph) -> tuple[int, ...]:
    """The identity when H is the base itself, otherwise the first embedding H -> base."""
    B = _base_graph(Ht)
    if H == B:
        return tuple(range(H.n))
    for theta in iter_embeddings(H, B):
        return theta
    raise StructuralError("H is not an induced subgraph of the base")


def classify_embedding(
    H: Graph,
    Ht: CayleyGraph | Graph,
    part_of: Sequence[int],
    theta: Sequence[int],
    iota: Sequence[int] | None = None,
    maps: Sequence[VertexMap] | None = None,
) -> InPart | FollowsMap | Violation:
    """Tag one embedding into a materialized blow-up (top-level parts only)."""
    iota = tuple(iota) if iota is not None else default_iota(H, Ht)
    maps = maps if maps is not None else base_maps(Ht)
    parts = [part_of[v] for v in theta]
    if len(set(parts)) == 1:
        return InPart(parts[0])
    seen: dict[int, int] = {}
    for x, j in enumerate(parts):
        if j in seen:
            return Violation((seen[j], x), f"vertices {seen[j]} and {x} share part {j}")
        seen[j] = x
    for phi in maps:
        if all(phi(iota[x]) == parts[x] for x in range(H.n)):
            return FollowsMap(phi)
    return Violation(None, "injective on parts but follows no rotation or reflection")


@dataclass
class ClassificationSummary:
    total: int = 0
    in_part: int = 0
    follows_map: int = 0
    violations: list[tuple[tuple[int, ...], Violation]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def classify_embeddings(
    H: Graph,
    Ht: CayleyGraph | Graph,
    spec: BlowupTree,
    iota: Sequence[int] | None = None,
    max_violations: int = 10,
) -> ClassificationSummary:
    """Enumerate every embedding of H into the blow-up and tag it."""
    G, part_of = build_blowup_with_parts(spec)
    iota = tuple(iota) if iota is not None else default_iota(H, Ht)
    maps = base_maps(Ht)
    out = ClassificationSummary()
    violations = 0
    for theta in iter_embeddings(H, G):
        tag = classify_embedding(H, Ht, part_of, theta, iota, maps)
        out.total += 1
        if isinstance(tag, InPart):
            out.in_part += 1
        elif isinstance(tag, FollowsMap):
            out.follows_map += 1
        else:
            violations += 1
            if len(out.violations) < max_violations:
                out.violations.append((tuple(theta), tag))
    if violations > len(out.violations):
        out.violations.append(((), Violation(None, f"{violations} violations in total")))
    return out


def rigidity_certificate(H: Graph, Ht: CayleyGraph | Graph, iota: Sequence[int] | None = None) -> dict:
    """Does every embedding H -> base extend to a rotation/reflection (automorphism)?"""
    B = _base_graph(Ht)
    iota = tuple(iota) if iota is not None else default_iota(H, Ht)
    restricted = {tuple(phi(y) for y in iota) for phi in base_maps(Ht)}
    embs = set(base_embeddings(H, B))
    return {
        "prime": _prime_cached(graph6.encode(H)),
        "rigid": embs == restricted,
        "embeddings": len(embs),
        "distinct_restricted_maps": len(restricted),
    }


# ---------------------------------------------------------------------------
# the objective T and composition search


class _LeafValues:
    """emb(H, m) as realized by a leaf policy, with an exactness flag.

    Maximizer leaves above the exhaustive cap get a certified lower bound:
    the best T over compositions with at least two non-empty parts.
    """

    def __init__(self, H: Graph, base: Graph, policy: LeafPolicy, leaf_cap: int = EXHAUSTIVE_CAP):
        self.H, self.base, self.policy = H, base, policy
        self.leaf_cap = min(leaf_cap, EXHAUSTIVE_CAP)
        self.cache: dict[int, tuple[int, bool]] = {}

    def __call__(self, m: int) -> tuple[int, bool]:
        if m in self.cache:
            return self.cache[m]
        H, pol = self.H, self.policy
        if m < H.n:
            res = (0, True)
        elif pol.kind == "maximizer" and m <= self.leaf_cap:
            res = (emb_max(H, m).value, True)
        elif pol.kind == "maximizer":
            res = (self._lower_bound(m), False)
        else:
            res = (count_embeddings(H, pol.leaf_graph(m)), True)
        self.cache[m] = res
        return res

    def _lower_bound(self, m: int) -> int:
        best = 0
        for sizes in compositions(m, self.base.n):
            if max(sizes) == m:
                continue
            best = max(best, self.T(sizes)[0])
        return best

    def T(self, sizes: Sequence[int]) -> tuple[int, bool]:
        val = placement_sum(self.H, self.base, sizes)
        exact = True
        for s in sizes:
            v, e = self(s)
            val += v
            exact &= e
        return val, exact


def objective_T(
    H: Graph, Ht: CayleyGraph | Graph, sizes: Sequence[int], leaf_policy: LeafPolicy | None = None
) -> int:
    """sum_psi prod_x n_{psi(x)} + sum_j emb(H, n_j), with emb realized by the policy.

    The first sum runs over Emb(H, base), i.e. the distinct restrictions of
    the rotations and reflections when H is rigid.
    """
    B = _base_graph(Ht)
    if len(sizes) != B.n or any(s < 0 for s in sizes):
        raise DomainError("need one non-negative size per base vertex")
    policy = leaf_policy or LeafPolicy.emb_maximizer(H)
    if policy.kind == "maximizer" and max(sizes, default=0) > EXHAUSTIVE_CAP:
        raise CapacityError(f"emb(H, n_j) is exhaustive only up to n_j = {EXHAUSTIVE_CAP}")
    return _LeafValues(H, B, policy).T(sizes)[0]


def compositions(n: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to n (stars and bars)."""
    for bars in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield tuple(out)


def sorted_compositions(n: int, parts: int) -> Iterable[tuple[int, ...]]:
    """Non-increasing compositions: one per multiset of part sizes."""

    def rec(rem: int, k: int, cap: int):
        if k == 1:
            if rem <= cap:
                yield (rem,)
            return
        for first in range(min(rem, cap), -1, -1):
            if first * k < rem:
                break
            for rest in rec(rem - first, k - 1, first):
                yield (first,) + rest

    if parts == 0:
        if n == 0:
            yield ()
        return
    yield from rec(n, parts, n)


MAX_KTILDE = 6
MAX_N = 20
# 9-vertex leaves need all 274668 classes; the optimizer stops one short by default
LEAF_EXHAUSTIVE_CAP = 8


def _scan_compositions(args) -> tuple[int, list[tuple[int, ...]], bool]:
    h6, b6, policy_json, n, symmetric, i, m, leaf_cap = args
    H, B = graph6.decode(h6), graph6.decode(b6)
    policy = _policy_from_json(policy_json)
    lv = _LeafValues(H, B, policy, leaf_cap)
    gen = sorted_compositions(n, B.n) if symmetric else compositions(n, B.n)
    best, wit, exact = -1, [], True
    for t, sizes in enumerate(gen):
        if t % m != i:
            continue
        val, e = lv.T(sizes)
        exact &= e
        if val > best:
            best, wit = val, [sizes]
        elif val == best:
            wit.append(sizes)
    return best, wit, exact


def _policy_to_json(p: LeafPolicy) -> dict:
    return {
        "kind": p.kind,
        "H": graph6.encode(p.H) if p.H is not None else None,
        "graphs": [graph6.encode(g) for g in p.graphs],
    }


def _policy_from_json(d: dict) -> LeafPolicy:
    H = graph6.decode(d["H"]) if d.get("H") else None
    return LeafPolicy(d["kind"], H=H, graphs=tuple(graph6.decode(g) for g in d.get("graphs", [])))


def optimize_partition(
    H: Graph,
    Ht: CayleyGraph | Graph,
    n: int,
    leaf_policy: LeafPolicy | None = None,
    symmetric: bool = False,
    workers: int = 1,
    leaf_cap: int = LEAF_EXHAUSTIVE_CAP,
) -> dict:
    """All T-maximizing part-size vectors for n vertices, and whether they are balanced.

    Without ``symmetric`` every composition is tried, guarded by k~ <= 6 and
    n <= 20.  With ``symmetric`` only non-increasing vectors are tried; that
    is exact when the placement sum is a symmetric function of the sizes,
    which holds when k = k~ (every placement covers all parts).

    Maximizer leaves larger than ``leaf_cap`` are valued by a blow-up lower
    bound instead of an exhaustive search, and the report is then marked
    inexact.
    """
    B = _base_graph(Ht)
    policy = leaf_policy or LeafPolicy.emb_maximizer(H)
    if n < 0:
        raise DomainError("n must be non-negative")
    if not symmetric and (B.n > MAX_KTILDE or n > MAX_N):
        raise CapacityError(
            f"composition search is guarded at k~ <= {MAX_KTILDE}, n <= {MAX_N}; "
            "use the symmetric reduction for larger instances"
        )
    notes = []
    reduction_exact = True
    if symmetric:
        if H.n == B.n:
            notes.append("symmetric reduction: every placement covers all parts, T is symmetric in the sizes")
        else:
            reduction_exact = False
            notes.append("symmetric reduction with k < k~: T is not symmetric, maximum is a lower bound")
    jobs = [
        (graph6.encode(H), graph6.encode(B), _policy_to_json(policy), n, symmetric, i, workers, leaf_cap)
        for i in range(workers)
    ]
    if workers == 1:
        results = [_scan_compositions(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_compositions, jobs))
    best = max(r[0] for r in results)
    maximizers = sorted(
        (s for r in results if r[0] == best for s in r[1]), reverse=True
    )
    leaves_exact = all(r[2] for r in results)
    if not leaves_exact:
        notes.append(
            f"leaf values above n={min(leaf_cap, EXHAUSTIVE_CAP)} are blow-up lower bounds, not exhaustive maxima"
        )
    return {
        "n": n,
        "ktilde": B.n,
        "maximizers": [{"sizes": list(s), "T": best} for s in maximizers],
        "max_T": best,
        "all_balanced": all(max(s) - min(s) <= 1 for s in maximizers),
        "balanced_attains_max": any(
            sorted(s) == sorted(balanced_parts(n, B.n)) for s in maximizers
        ),
        "exact": leaves_exact and reduction_exact,
        "symmetric_reduction": symmetric,
        "notes": notes,
    }


def induced_copy_count(H: Graph, G: Graph) -> int:
    """Induced copies of H in G = emb(H, G) / aut(H)."""
    from .embed import count_induced_copies

    return count_induced_copies(H, G)


__all__ = [
    "BlowupTree",
    "Leaf",
    "LeafPolicy",
    "InPart",
    "FollowsMap",
    "Violation",
    "balanced_parts",
    "balanced_iterated_tree",
    "build_blowup",
    "build_blowup_with_parts",
    "blowup_from_sizes",
    "classify_embedding",
    "rigidity_certificate",
    "compositions",
    "closed_form_blowup_count",
    "count_into_blowup",
    "classify_embeddings",
    "objective_T",
    "optimize_partition",
]
