"""Checkers for typicality of Cayley graphs, reasonableness of induced
subgraphs, and (super-)signatures.

Every failing verdict carries a concrete witness that can be replayed with
the ``*_witness_fails`` functions.  Conditions that need an exponential
search take a budget and come back as ``Skipped`` when it runs out.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

from . import config
from .cayley import CayleyGraph, random_cayley, rotations_reflections
from .errors import CapacityError, DomainError
from .graph import Graph, bits, induced_subgraph, is_prime, to_mask
from .groups import AbelianGroup

EXACT_ISO_CAP = 12


# ---------------------------------------------------------------------------
# verdicts and reports


@dataclass
class Verdict:
    status: str  # "Pass" | "Fail" | "Skipped"
    witness: object = None
    reason: str = ""
    exact: bool = True
    elapsed_ms: float = 0.0

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, dict):
            w = sorted([int(a), int(b)] for a, b in w.items())
        elif isinstance(w, (tuple, list, frozenset, set)):
            w = _jsonable(w)
        return {
            "verdict": self.status,
            "witness": w,
            "reason": self.reason,
            "exact": self.exact,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _jsonable(x):
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    return x


def _overall(verdicts: Iterable[Verdict]) -> str:
    vs = list(verdicts)
    if any(v.status == "Fail" for v in vs):
        return "Fail"
    if any(v.status == "Skipped" for v in vs):
        return "Skipped"
    return "Pass"


@dataclass
class TypicalityReport:
    q0: float
    delta0: float
    ktilde: int
    conditions: dict[str, Verdict] = field(default_factory=dict)

    @property
    def overall(self) -> str:
        """Verdict over (i)-(iv); (iv') is informational."""
        return _overall(v for k, v in self.conditions.items() if k != "iv_prime")

    def to_json(self) -> dict:
        return {
            "q0": self.q0,
            "delta0": self.delta0,
            "ktilde": self.ktilde,
            "overall": self.overall,
            "conditions": {k: v.to_json() for k, v in self.conditions.items()},
        }


@dataclass
class ReasonableReport:
    q: float
    delta: float
    k: int
    ktilde: int
    conditions: dict[str, Verdict] = field(default_factory=dict)
    size_precondition: bool = True

    @property
    def overall(self) -> str:
        return _overall(self.conditions.values())

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "delta": self.delta,
            "k": self.k,
            "ktilde": self.ktilde,
            "size_precondition": self.size_precondition,
            "overall": self.overall,
            "conditions": {k: v.to_json() for k, v in self.conditions.items()},
        }


class _Budget:
    def __init__(self, budget_ms: float | None, max_nodes: int | None):
        self.deadline = None if budget_ms is None else time.perf_counter() + budget_ms / 1000
        self.max_nodes = max_nodes
        self.nodes = 0
        self.exhausted = False

    def tick(self) -> bool:
        """Count a node; True when the search must stop."""
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            self.exhausted = True
        elif self.deadline is not None and (self.nodes & 1023) == 0 and time.perf_counter() > self.deadline:
            self.exhausted = True
        return self.exhausted


def _check_q(name: str, q: float) -> None:
    if not 0 < q < 0.5:
        raise DomainError(f"{name} must lie in (0, 1/2), got {q}")


def _check_delta(name: str, d: float) -> None:
    if not 0 < d < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {d}")


# ---------------------------------------------------------------------------
# distinguishers and signatures


def distinguisher_count(H: Graph, v: int, w: int, restrict: int | Iterable[int] | None = None) -> int:
    """Vertices of ``restrict`` other than v, w adjacent to exactly one of v and w."""
    if v == w:
        raise DomainError("distinguishers need two distinct vertices")
    R = H.full_mask if restrict is None else (restrict if isinstance(restrict, int) else to_mask(restrict))
    return ((H.adj[v] ^ H.adj[w]) & R & ~((1 << v) | (1 << w))).bit_count()


def min_distinguishers(H: Graph) -> tuple[int, tuple[int, int] | None]:
    best, pair = None, None
    for v in range(H.n):
        for w in range(v + 1, H.n):
            c = distinguisher_count(H, v, w)
            if best is None or c < best:
                best, pair = c, (v, w)
    return (best if best is not None else H.n), pair


def is_signature(H: Graph, S: int | Iterable[int]) -> tuple[bool, tuple[int, int] | None]:
    """Outside vertices must have pairwise distinct traces on S; returns a clashing pair if not."""
    Sm = S if isinstance(S, int) else to_mask(S)
    seen: dict[int, int] = {}
    for v in range(H.n):
        if (Sm >> v) & 1:
            continue
        trace = H.adj[v] & Sm
        if trace in seen:
            return False, (seen[trace], v)
        seen[trace] = v
    return True, None


def is_super_signature(H: Graph, S: int | Iterable[int], r: float) -> tuple[bool, tuple[int, int] | None]:
    """|(N(v) xor N(w)) & S| >= r|S| for all distinct v, w outside S."""
    Sm = S if isinstance(S, int) else to_mask(S)
    if not Sm:
        raise DomainError("a super-signature must be non-empty")
    need = r * Sm.bit_count()
    outside = [v for v in range(H.n) if not (Sm >> v) & 1]
    for i, v in enumerate(outside):
        for w in outside[i + 1:]:
            if ((H.adj[v] ^ H.adj[w]) & Sm).bit_count() < need:
                return False, (v, w)
    return True, None


@dataclass
class SignatureSearch:
    found: bool
    S: frozenset[int] | None
    t: int
    trials_used: int


def signature_sample_size(q: float, k: int) -> int:
    return math.floor(5 / q * config.log(k)) if k > 1 else 0


def super_signature_sample_size(q: float, k: int) -> int:
    return math.floor(33 / q * config.log(k)) if k > 1 else 0


def find_signature(
    H: Graph, X: Iterable[int] | None, q: float, trials: int = 20, seed: int = 0
) -> SignatureSearch:
    """Sample t = floor((5/q) log k) vertices of X with repetition, keep the first signature."""
    Xs = sorted(range(H.n)) if X is None else sorted(set(X))
    t = signature_sample_size(q, H.n)
    for trial in range(trials):
        if Xs and t:
            rng = config.substream(seed, "signature", trial)
            picks = rng.integers(0, len(Xs), size=t)
            S = frozenset(Xs[int(i)] for i in picks)
        else:
            S = frozenset()
        if is_signature(H, S)[0]:
            return SignatureSearch(True, S, t, trial + 1)
    return SignatureSearch(False, None, t, trials)


def find_super_signature(
    H: Graph,
    X: Iterable[int] | None,
    q: float,
    trials: int = 20,
    seed: int = 0,
    t: int | None = None,
) -> SignatureSearch:
    """Sample t vertices of X with repetition; succeed when they are distinct
    and form a q/4-super-signature.

    ``t`` defaults to floor((33/q) log k); small graphs need an override,
    since that value exceeds |X| unless k is astronomically large.
    """
    Xs = sorted(range(H.n)) if X is None else sorted(set(X))
    t = super_signature_sample_size(q, H.n) if t is None else t
    if t < 1:
        raise DomainError("super-signature sample size must be at least 1")
    for trial in range(trials):
        if not Xs:
            break
        rng = config.substream(seed, "super_signature", trial)
        picks = [Xs[int(i)] for i in rng.integers(0, len(Xs), size=t)]
        if len(set(picks)) < t:
            continue
        S = frozenset(picks)
        if is_super_signature(H, S, q / 4)[0]:
            return SignatureSearch(True, S, t, trial + 1)
    return SignatureSearch(False, None, t, trials)


# ---------------------------------------------------------------------------
# typicality conditions (i)-(iii)


def _cond_i(G: Graph, q0: float, k: int) -> Verdict:
    lo, hi = q0 * k, (1 - q0) * k
    for v in range(G.n):
        d = G.degree(v)
        if not lo <= d <= hi:
            return Verdict("Fail", v, f"deg({v}) = {d} outside [{lo:.4g}, {hi:.4g}]")
    return Verdict("Pass")


def cond_i_witness_fails(Ht: CayleyGraph, q0: float, v: int) -> bool:
    k = Ht.order
    return not q0 * k <= Ht.graph.degree(v) <= (1 - q0) * k


def _pairs_for(Ht: CayleyGraph) -> Iterable[tuple[int, int]]:
    # distinguishers are translation invariant, so pairs (0, g) suffice
    return ((0, g) for g in range(1, Ht.order))


def _cond_ii(Ht: CayleyGraph, q0: float) -> Verdict:
    G, need = Ht.graph, q0 * Ht.order
    for v, w in _pairs_for(Ht):
        c = distinguisher_count(G, v, w)
        if c < need:
            return Verdict("Fail", (v, w), f"pair ({v},{w}) has {c} < {need:.4g} distinguishers")
    return Verdict("Pass")


def cond_ii_witness_fails(Ht: CayleyGraph, q0: float, pair: tuple[int, int]) -> bool:
    return distinguisher_count(Ht.graph, *pair) < q0 * Ht.order


def homogeneous_side(ktilde: int) -> int:
    """ceil(2 k~^{4/5})."""
    return math.ceil(2 * ktilde ** 0.8 - 1e-12)


def find_homogeneous_pair(
    G: Graph, side: int, budget: _Budget | None = None
) -> tuple[str, tuple[frozenset[int], frozenset[int]]] | None:
    """Disjoint X, Y with |X|, |Y| >= side and G complete or empty between them.

    Branch and bound over X in increasing vertex order, keeping the common
    (non-)neighbourhood of X as the candidate pool for Y.  Returns
    ("complete" | "empty", (X, Y)) or None; check ``budget.exhausted``.
    """
    n = G.n
    if side < 1:
        side = 1
    if 2 * side > n:
        return None
    budget = budget or _Budget(None, None)
    full = G.full_mask
    for kind, nb in (("complete", G.adj), ("empty", [full & ~a & ~(1 << v) for v, a in enumerate(G.adj)])):

        def rec(start: int, X: int, common: int):
            if budget.tick():
                return None
            if X.bit_count() >= side:
                Y = 0
                for u in bits(common):
                    Y |= 1 << u
                    if Y.bit_count() == side:
                        return X, Y
            for v in range(start, n):
                c2 = common & nb[v]
                if c2.bit_count() < side:
                    continue
                # X can only grow with vertices that would keep enough room
                res = rec(v + 1, X | (1 << v), c2)
                if res is not None or budget.exhausted:
                    return res
            return None

        res = rec(0, 0, full)
        if res is not None:
            X, Y = res
            return kind, (frozenset(bits(X)), frozenset(bits(Y)))
        if budget.exhausted:
            return None
    return None


def homogeneous_pair_witness_fails(G: Graph, side: int, witness) -> bool:
    kind, (X, Y) = witness
    if X & Y or len(X) < side or len(Y) < side:
        return False
    want = kind == "complete"
    return all(G.has_edge(x, y) == want for x in X for y in Y)


# ---------------------------------------------------------------------------
# partial isomorphism search for (iv), (iv') and (c)


def _map_tables(maps: Sequence[tuple[int, ...]], n: int) -> list[list[int]]:
    """M[x][y] = bitmask of maps phi with phi(x) = y."""
    M = [[0] * n for _ in range(n)]
    for i, phi in enumerate(maps):
        for x, y in enumerate(phi):
            M[x][y] |= 1 << i
    return M


def _partial_iso_counterexample(
    G: Graph,
    domain: Sequence[int],
    min_size: int,
    maps: Sequence[tuple[int, ...]],
    budget: _Budget,
    weak_need: int | None = None,
    pin_first_image: bool = True,
    pin_first_vertex: bool = False,
) -> dict[int, int] | None:
    """Search for an adjacency-preserving injection f on some X within ``domain``,
    |X| >= min_size, that is a counterexample:

    * exact mode (weak_need None): f is not the restriction of any map;
    * weak mode: every map agrees with f on fewer than ``weak_need`` vertices.

    Symmetry: composing f with a rotation keeps it a counterexample, so the
    first assigned vertex is sent to 0.  When the domain is the whole group,
    rotating the domain also preserves counterexamples, so vertex ``domain[0]``
    can be forced into X.
    """
    n = G.n
    D = list(domain)
    skips_allowed = len(D) - min_size
    if skips_allowed < 0:
        return None
    M = _map_tables(maps, n)
    nb = G.adj
    nn = [G.full_mask & ~a & ~(1 << v) for v, a in enumerate(nb)]
    all_maps = (1 << len(maps)) - 1
    f: dict[int, int] = {}
    cands = {x: G.full_mask for x in D}
    agree = [0] * len(maps)

    def rec(i: int, skips: int, used: int, consistent: int, cands: dict[int, int]):
        if budget.tick():
            return None
        if weak_need is None:
            if not consistent and len(f) >= min_size:
                return dict(f)
        if i == len(D):
            if weak_need is not None and len(f) >= min_size:
                return dict(f)
            return None
        x = D[i]
        avail = cands[x] & ~used
        if pin_first_image and not f:
            avail &= 1
        while avail:
            low = avail & -avail
            y = low.bit_length() - 1
            avail ^= low
            new_cons = consistent & M[x][y]
            if weak_need is not None:
                hit = list(bits(M[x][y]))
                if any(agree[j] + 1 >= weak_need for j in hit):
                    continue  # some map already agrees enough: no counterexample below
                for j in hit:
                    agree[j] += 1
            new = {x2: cands[x2] & (nb[y] if G.has_edge(x, x2) else nn[y]) for x2 in D[i + 1:]}
            f[x] = y
            res = rec(i + 1, skips, used | low, new_cons, new)
            del f[x]
            if weak_need is not None:
                for j in hit:
                    agree[j] -= 1
            if res is not None or budget.exhausted:
                return res
        if skips < skips_allowed and not (pin_first_vertex and i == 0):
            return rec(i + 1, skips + 1, used, consistent, cands)
        return None

    return rec(0, 0, 0, all_maps, cands)


def partial_iso_witness_fails(
    G: Graph, maps: Sequence[tuple[int, ...]], f: dict[int, int], min_size: int, weak_need: int | None = None
) -> bool:
    """Replay: f is adjacency preserving, large enough, and escapes every map."""
    if len(f) < min_size or len(set(f.values())) != len(f):
        return False
    items = list(f.items())
    for a, (x, y) in enumerate(items):
        for x2, y2 in items[a + 1:]:
            if G.has_edge(x, x2) != G.has_edge(y, y2):
                return False
    if weak_need is None:
        return not any(all(phi[x] == y for x, y in items) for phi in maps)
    return all(sum(phi[x] == y for x, y in items) < weak_need for phi in maps)


def _distinct_maps(Ht: CayleyGraph) -> list[tuple[int, ...]]:
    return sorted({m.images for m in rotations_reflections(Ht.group)})


def _iso_condition(
    Ht: CayleyGraph,
    domain: Sequence[int],
    min_size: int,
    budget: _Budget,
    weak_need: int | None,
    cap: int,
) -> Verdict:
    t0 = time.perf_counter()
    if Ht.order > cap:
        return Verdict("Skipped", reason=f"exact search limited to k~ <= {cap}", exact=False)
    full_domain = len(domain) == Ht.order
    f = _partial_iso_counterexample(
        Ht.graph, domain, min_size, _distinct_maps(Ht), budget, weak_need,
        pin_first_image=True, pin_first_vertex=full_domain,
    )
    ms = (time.perf_counter() - t0) * 1000
    if f is not None:
        what = "no rotation/reflection restricts to it" if weak_need is None else (
            f"every rotation/reflection agrees on fewer than {weak_need} vertices")
        return Verdict("Fail", f, f"adjacency-preserving injection on {len(f)} vertices: {what}",
                       elapsed_ms=ms)
    if budget.exhausted:
        return Verdict("Skipped", reason=f"budget exhausted after {budget.nodes} nodes",
                       exact=False, elapsed_ms=ms)
    return Verdict("Pass", elapsed_ms=ms)


def check_iv_prime_variant(
    Ht: CayleyGraph,
    delta0: float,
    q0: float | None = None,
    budget_ms: float | None = 10_000,
    max_nodes: int | None = None,
    cap: int = EXACT_ISO_CAP,
) -> Verdict:
    """The weak rigidity condition: every large partial isomorphism agrees with
    some rotation/reflection on at least (1 - 2 delta0) k~ vertices.

    With q0 given and 2 delta0 <= q0, the reason also records whether (ii)
    holds, in which case (iv) follows.
    """
    _check_delta("delta0", delta0)
    if Ht.order > cap:
        raise CapacityError(f"(iv') is exact only up to k~ = {cap}")
    k = Ht.order
    min_size = math.ceil((1 - delta0) * k - 1e-12)
    need = math.ceil((1 - 2 * delta0) * k - 1e-12)
    v = _iso_condition(Ht, range(k), min_size, _Budget(budget_ms, max_nodes), need, cap)
    if q0 is not None and 2 * delta0 <= q0 and v.status == "Pass":
        ii = _cond_ii(Ht, q0)
        v.reason = "(ii) holds too, so (iv) follows" if ii.status == "Pass" else "(ii) fails"
    return v


def check_typical(
    Ht: CayleyGraph,
    q0: float,
    delta0: float,
    budget_ms: float | None = 10_000,
    max_nodes: int | None = None,
    side: int | None = None,
    cap: int = EXACT_ISO_CAP,
    include_iv_prime: bool = True,
) -> TypicalityReport:
    """Check conditions (i)-(iv) (and (iv')) of typicality.

    ``side`` overrides the homogeneous-pair threshold ceil(2 k~^{4/5}) for
    testing; at k~ < 1024 the true threshold exceeds k~/2 and (iii) holds
    vacuously.  ``budget_ms`` applies separately to each search.
    """
    _check_q("q0", q0)
    _check_delta("delta0", delta0)
    k = Ht.order
    rep = TypicalityReport(q0, delta0, k)

    t0 = time.perf_counter()
    v = _cond_i(Ht.graph, q0, k)
    v.elapsed_ms = (time.perf_counter() - t0) * 1000
    rep.conditions["i"] = v

    t0 = time.perf_counter()
    v = _cond_ii(Ht, q0)
    v.elapsed_ms = (time.perf_counter() - t0) * 1000
    rep.conditions["ii"] = v

    s = homogeneous_side(k) if side is None else side
    t0 = time.perf_counter()
    b = _Budget(budget_ms, max_nodes)
    found = find_homogeneous_pair(Ht.graph, s, b)
    ms = (time.perf_counter() - t0) * 1000
    if found is not None:
        v = Verdict("Fail", found, f"{found[0]} between two sets of size >= {s}", elapsed_ms=ms)
    elif b.exhausted:
        v = Verdict("Skipped", reason=f"budget exhausted after {b.nodes} nodes", exact=False, elapsed_ms=ms)
    else:
        note = "vacuous: 2*side > k~" if 2 * s > k else ""
        v = Verdict("Pass", reason=note, elapsed_ms=ms)
    rep.conditions["iii"] = v

    min_size = math.ceil((1 - delta0) * k - 1e-12)
    rep.conditions["iv"] = _iso_condition(Ht, range(k), min_size, _Budget(budget_ms, max_nodes), None, cap)
    if include_iv_prime:
        if k <= cap:
            rep.conditions["iv_prime"] = check_iv_prime_variant(Ht, delta0, q0, budget_ms, max_nodes, cap)
        else:
            rep.conditions["iv_prime"] = Verdict("Skipped", reason=f"exact search limited to k~ <= {cap}",
                                                 exact=False)
    return rep


# ---------------------------------------------------------------------------
# reasonableness


def check_reasonable(
    Ht: CayleyGraph,
    H_vertices: Iterable[int],
    q: float,
    delta: float,
    budget_ms: float | None = 10_000,
    max_nodes: int | None = None,
    cap: int = EXACT_ISO_CAP,
) -> ReasonableReport:
    """Conditions (a)-(c) for the induced subgraph on ``H_vertices``.

    (b) ranges over all pairs of vertices of the Cayley graph but counts
    distinguishers inside V(H) only.  (c) searches partial isomorphisms whose
    domain lies in V(H).  Witnesses use the Cayley graph's vertex labels.
    """
    _check_q("q", q)
    _check_delta("delta", delta)
    Hv = sorted(set(H_vertices))
    k, kt = len(Hv), Ht.order
    if k < 1:
        raise DomainError("H needs at least one vertex")
    if any(not 0 <= v < kt for v in Hv):
        raise DomainError("H vertices must be vertices of the Cayley graph")
    rep = ReasonableReport(q, delta, k, kt)
    rep.size_precondition = k >= kt - 0.25 * config.log(kt)

    t0 = time.perf_counter()
    H, back = induced_subgraph(Ht.graph, to_mask(Hv))
    prime, wit = is_prime(H)
    ms = (time.perf_counter() - t0) * 1000
    if prime:
        rep.conditions["a"] = Verdict("Pass", elapsed_ms=ms)
    else:
        rep.conditions["a"] = Verdict("Fail", frozenset(back[i] for i in wit),
                                      "module of H", elapsed_ms=ms)

    t0 = time.perf_counter()
    Hm = to_mask(Hv)
    need = q * k
    v = Verdict("Pass")
    G = Ht.graph
    for a in range(kt):
        for b in range(a + 1, kt):
            c = distinguisher_count(G, a, b, Hm)
            if c < need:
                v = Verdict("Fail", (a, b), f"pair ({a},{b}) has {c} < {need:.4g} distinguishers in V(H)")
                break
        if v.status == "Fail":
            break
    v.elapsed_ms = (time.perf_counter() - t0) * 1000
    rep.conditions["b"] = v

    min_size = math.ceil((1 - delta) * k - 1e-12)
    rep.conditions["c"] = _iso_condition(Ht, Hv, min_size, _Budget(budget_ms, max_nodes), None, cap)
    return rep


def reasonable_b_witness_fails(Ht: CayleyGraph, H_vertices: Iterable[int], q: float, pair) -> bool:
    Hv = to_mask(H_vertices)
    return distinguisher_count(Ht.graph, pair[0], pair[1], Hv) < q * Hv.bit_count()


def lemma_typical_reasonable_parameters(ktilde: int, q0: float, delta0: float) -> dict:
    """The largest (q, delta) allowed by the typical-to-reasonable lemma, and
    whether its lower bound on q0 holds."""
    slack = config.log(ktilde) / (4 * ktilde)
    return {
        "q": q0 - slack,
        "delta": delta0 - slack,
        "q0_lower_bound_holds": q0 >= 4 * ktilde ** (-0.2) + slack,
        "min_k": ktilde - 0.25 * config.log(ktilde),
    }


# ---------------------------------------------------------------------------
# Monte Carlo sweep


def wilson_interval(successes: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(1 - alpha / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class SweepRow:
    ktilde: int
    p: float
    samples: int
    q0: float
    delta0: float
    counts: dict[str, int]
    skipped: dict[str, int]
    typical: int
    undecided: int
    aut_rigid: int
    wilson_lo: float
    wilson_hi: float
    label: str

    def to_csv_row(self) -> dict:
        row = {
            "ktilde": self.ktilde, "p": self.p, "samples": self.samples,
            "q0": self.q0, "delta0": self.delta0, "typical": self.typical,
            "undecided": self.undecided,
            "aut_rigid": self.aut_rigid,
            "wilson_lo": round(self.wilson_lo, 6), "wilson_hi": round(self.wilson_hi, 6),
            "label": self.label,
        }
        for c in ("i", "ii", "iii", "iv"):
            row[f"pass_{c}"] = self.counts.get(c, 0)
            row[f"skipped_{c}"] = self.skipped.get(c, 0)
        return row


def typicality_sweep(
    ktildes: Sequence[int],
    ps: Sequence[float],
    samples: int,
    seed: int = 0,
    q0: float | None = None,
    delta0: float | None = None,
    alpha: float = 0.05,
    target: float = 0.5,
    budget_ms: float | None = 2_000,
) -> list[SweepRow]:
    """Frequencies of (i)-(iv) over sampled connection sets of Z_k~.

    Defaults q0 = p'/50, delta0 = p'/100.  The label says whether the
    observed typicality frequency is consistent, at level alpha, with a
    probability of at least ``target``; it never claims a pass.  Samples
    with a skipped condition and no failure are "undecided": they count
    against the lower Wilson bound and for the upper one.
    """
    from .embed import count_automorphisms

    rows = []
    for kt in ktildes:
        G = AbelianGroup((kt,))
        for p in ps:
            pp = min(p, 1 - p)
            qq = pp / 50 if q0 is None else q0
            dd = pp / 100 if delta0 is None else delta0
            counts: dict[str, int] = {}
            skipped: dict[str, int] = {}
            typical = undecided = rigid = 0
            for s in range(samples):
                Ht = random_cayley(G, p, seed + s)
                rep = check_typical(Ht, qq, dd, budget_ms=budget_ms, include_iv_prime=False)
                for name, v in rep.conditions.items():
                    if v.status == "Pass":
                        counts[name] = counts.get(name, 0) + 1
                    elif v.status == "Skipped":
                        skipped[name] = skipped.get(name, 0) + 1
                typical += rep.overall == "Pass"
                undecided += rep.overall == "Skipped"
                rigid += count_automorphisms(Ht.graph) == 2 * kt
            lo = wilson_interval(typical, samples, alpha)[0]
            hi = wilson_interval(typical + undecided, samples, alpha)[1]
            label = (f"Consistent with typicality probability >= {target} at level {alpha}"
                     if hi >= target else
                     f"Inconsistent with typicality probability >= {target} at level {alpha}")
            rows.append(SweepRow(kt, p, samples, qq, dd, counts, skipped, typical, undecided, rigid, lo, hi, label))
    return rows
