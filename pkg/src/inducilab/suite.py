"""Invariant suites behind ``inducilab verify-suite``.

Each suite checks one statement against an independent oracle and returns a
:class:`SuiteResult`.  ``quick`` mode shrinks the sample sizes so the whole
matrix finishes in a few minutes on one core.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import config
from .blowup import (
    LeafPolicy,
    balanced_iterated_tree,
    blowup_from_sizes,
    build_blowup,
    classify_embeddings,
    closed_form_blowup_count,
    closed_form_ratio,
    count_into_blowup,
    emb_limit,
)
from .bounds import E, check_E_lemma, check_preconditions, chain_certified, emb_sequence_diagnostics, epsilon_ledger
from .cayley import cayley, maps_hitting_vertex, random_cayley
from .certify import is_signature, min_distinguishers
from .embed import (
    count_automorphisms,
    count_embeddings,
    count_embeddings_bruteforce,
    count_induced_copies,
    embeddings_with_image_in,
    per_vertex_embedding_counts,
)
from .errors import DomainError
from .extremal import emb_max, emb_sequence, ind_value
from .graph import Graph, induced_subgraph, is_prime, to_mask
from .groups import AbelianGroup, add, doubling_solutions, is_generating
from .iso import enumerate_graphs


@dataclass
class SuiteResult:
    key: str
    statement: str
    ok: bool
    checked: int
    detail: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "statement": self.statement,
            "ok": self.ok,
            "checked": self.checked,
            "detail": self.detail,
            "elapsed_s": round(self.elapsed_s, 3),
        }


def random_graph(n: int, rng, p: float = 0.5) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_group(rng, max_order: int) -> AbelianGroup:
    while True:
        r = int(rng.integers(1, 4))
        factors = tuple(int(rng.integers(1, 7)) for _ in range(r))
        if math.prod(factors) <= max_order:
            return AbelianGroup(factors)


def random_connection_set(G: AbelianGroup, rng) -> list[int]:
    members: set[int] = set()
    for x in range(1, G.order):
        if rng.random() < 0.3:
            members.update({x, G.neg_idx(x)})
    return sorted(members)


# ---------------------------------------------------------------------------
# individual suites


def suite_oracle_equivalence(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_oracle")
    pairs = 60 if quick else 200
    bad = []
    for _ in range(pairs):
        k, n = int(rng.integers(1, 6)), int(rng.integers(1, 8))
        H, G = random_graph(k, rng), random_graph(n, rng)
        a, b = count_embeddings(H, G), count_embeddings_bruteforce(H, G)
        if a != b:
            bad.append((k, n, a, b))
    return SuiteResult("oracle-equivalence", "backtracking count = injective-map enumeration",
                       not bad, pairs, {"mismatches": bad[:5]})


def suite_aut_identity(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_aut")
    pairs = 40 if quick else 150
    bad = 0
    for _ in range(pairs):
        H, G = random_graph(int(rng.integers(1, 5)), rng), random_graph(int(rng.integers(1, 8)), rng)
        if count_embeddings(H, G) != count_automorphisms(H) * count_induced_copies(H, G):
            bad += 1
    return SuiteResult("emb-aut-ind", "emb(H, G) = aut(H) * ind copies", bad == 0, pairs)


def suite_per_vertex(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_per_vertex")
    pairs = 30 if quick else 100
    bad = 0
    for _ in range(pairs):
        H, G = random_graph(int(rng.integers(1, 5)), rng), random_graph(int(rng.integers(1, 8)), rng)
        if sum(per_vertex_embedding_counts(H, G)) != H.n * count_embeddings(H, G):
            bad += 1
    return SuiteResult("per-vertex-sum", "per-vertex embedding counts sum to k emb(H, G)", bad == 0, pairs)


def suite_each_vertex_many(quick: bool, seed: int) -> SuiteResult:
    n_max = 6 if quick else 7
    checked, bad = 0, []
    for H in (Graph.path(4), Graph.complete(3), Graph.cycle(5)):
        for n in range(max(2, H.n), n_max + 1):
            res = emb_max(H, n)
            bound = Fraction(H.n, n + H.n) * res.value
            for W in res.witnesses:
                checked += 1
                if min(per_vertex_embedding_counts(H, W)) < bound:
                    bad.append((H.n, n))
    return SuiteResult("maximizer-vertex-coverage", "maximizers: every vertex lies in >= k/(n+k) emb(H, n) embeddings",
                       not bad, checked, {"violations": bad})


def suite_monotone_ratio(quick: bool, seed: int) -> SuiteResult:
    n_max = 6 if quick else 7
    detail, ok, checked = {}, True, 0
    for name, H in (("P4", Graph.path(4)), ("K3", Graph.complete(3)), ("C5", Graph.cycle(5))):
        ratios = [Fraction(ind_value(H, n), math.comb(n, H.n)) for n in range(H.n, n_max + 1)]
        checked += len(ratios)
        mono = all(a >= b for a, b in zip(ratios, ratios[1:]))
        ok &= mono
        detail[name] = [str(r) for r in ratios]
    return SuiteResult("monotone-ind-ratio", "ind(H, n) / C(n, k) is non-increasing in n", ok, checked, detail)


def suite_prime_connected(quick: bool, seed: int) -> SuiteResult:
    n_max = 5 if quick else 6
    checked, bad = 0, 0
    for n in range(3, n_max + 1):
        for G in enumerate_graphs(n):
            checked += 1
            if is_prime(G)[0] and not G.is_connected():
                bad += 1
    return SuiteResult("prime-connected", "every prime graph on >= 3 vertices is connected", bad == 0, checked)


def suite_doubling(quick: bool, seed: int) -> SuiteResult:
    max_order = 12 if quick else 16
    checked, bad = 0, []
    for order in range(1, max_order + 1):
        for factors in _factorizations(order):
            G = AbelianGroup(factors)
            els = list(G.elements())
            for g, h in itertools.combinations(els, 2):
                checked += 1
                if len(doubling_solutions(G, add(g, h))) > order / 2:
                    bad.append((factors, g.index, h.index))
    return SuiteResult("doubling-solutions", "x + x = g + h has at most k~/2 solutions for g != h", not bad, checked,
                       {"violations": bad[:5]})


def _factorizations(n: int, smallest: int = 2) -> list[tuple[int, ...]]:
    if n == 1:
        return [(1,)] if smallest == 2 else [()]
    out = []
    for d in range(smallest, n + 1):
        if n % d == 0:
            for rest in _factorizations(n // d, d) if n // d > 1 else [()]:
                out.append((d,) + rest)
    return out


def suite_generating(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_generating")
    trials = 100 if quick else 500
    bad = 0
    for _ in range(trials):
        G = random_group(rng, 24)
        lam = random_connection_set(G, rng)
        H = cayley(G.factor_orders, lam)
        if is_generating(G, lam) != H.graph.is_connected():
            bad += 1
    return SuiteResult("lambda-generate", "Lambda generates G iff Cayley(G, Lambda) is connected", bad == 0, trials)


def suite_rot_refl(quick: bool, seed: int) -> SuiteResult:
    checked, bad = 0, 0
    for kt in (5, 7):
        G = AbelianGroup((kt,))
        for k in (kt - 1, kt):
            for X in itertools.combinations(range(kt), k):
                for x in range(kt):
                    checked += 1
                    bad += maps_hitting_vertex(G, X, x) != 2 * k
    return SuiteResult("rot-refl-hitting", "exactly 2k rotations/reflections hit each vertex", bad == 0, checked)


def suite_closed_form(quick: bool, seed: int) -> SuiteResult:
    C5 = cayley([5], [1, 4])
    P4 = induced_subgraph(C5.graph, 0b01111)[0]
    rows = []
    ok = True
    for H, k, m in ((C5.graph, 5, 1), (C5.graph, 5, 2), (P4, 4, 2)):
        spec = balanced_iterated_tree(C5.graph, 5 ** m, LeafPolicy.empty_graph())
        direct = count_embeddings(H, build_blowup(spec))
        cf = closed_form_blowup_count(5, k, m)
        rec = count_into_blowup(H, C5, spec)
        rows.append({"k": k, "m": m, "closed_form": cf, "direct": direct, "recursive": rec})
        ok &= cf == direct == rec
    ratios = [closed_form_ratio(5, 5, m) for m in range(1, 7)]
    inc = all(a < b for a, b in zip(ratios, ratios[1:]))
    close = abs(ratios[-1] - emb_limit(5, 5)) < Fraction(1, 10**6)
    return SuiteResult("closed-form-blowup", "closed-form blow-up counts and the emb(H) limit",
                       ok and inc and close, len(rows) + len(ratios),
                       {"rows": rows, "ratio_increasing": inc, "within_1e-6": close})


def suite_classification(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_classification")
    specs = 8 if quick else 20
    C5 = cayley([5], [1, 4])
    P4 = induced_subgraph(C5.graph, 0b01111)[0]
    bad, checked = [], 0
    for _ in range(specs):
        n = int(rng.integers(5, 21))
        sizes = _random_positive_sizes(n, 5, rng)
        spec = blowup_from_sizes(C5.graph, sizes, LeafPolicy.empty_graph())
        for name, H in (("C5", C5.graph), ("P4", P4)):
            checked += 1
            summary = classify_embeddings(H, C5, spec)
            direct = count_embeddings(H, build_blowup(spec))
            if not summary.ok or direct != count_into_blowup(H, C5, spec) or summary.total != direct:
                bad.append((name, sizes))
    C4 = cayley([4], [1, 3])
    spec = balanced_iterated_tree(C4.graph, 8, LeafPolicy.empty_graph())
    control = not classify_embeddings(C4.graph, C4, spec).ok
    return SuiteResult("blowup-classification",
                       "embeddings of prime rigid H into blow-ups lie in a part or follow a map",
                       not bad and control, checked + 1,
                       {"failures": bad, "non_prime_control_violations": control})


def _random_positive_sizes(n: int, parts: int, rng) -> list[int]:
    cuts = sorted(int(c) for c in rng.choice(range(1, n), size=parts - 1, replace=False))
    return [b - a for a, b in zip([0] + cuts, cuts + [n])]


def suite_E_lemma(quick: bool, seed: int) -> SuiteResult:
    rep = check_E_lemma(6, 30, 2_000 if quick else 10_000)
    return SuiteResult("balanced-product", "E_l(m): max-product oracle, supermultiplicativity, comparison bound",
                       rep.ok, rep.part_i_checked + rep.part_ii_checked + rep.part_iii_checked,
                       {"i": len(rep.part_i_violations), "ii": len(rep.part_ii_violations),
                        "iii": len(rep.part_iii_violations), "inconclusive": len(rep.part_iii_inconclusive)})


def suite_signature_lemmas(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_signature")
    graphs = 100 if quick else 500
    checked, bad = 0, []
    for _ in range(graphs):
        H = random_graph(int(rng.integers(2, 8)), rng)
        k = H.n
        dmin, _ = min_distinguishers(H)
        q = Fraction(dmin, k)
        for size in range(k + 1):
            if size < (1 - q) * k:
                continue
            for S in itertools.combinations(range(k), size):
                checked += 1
                if not is_signature(H, S)[0]:
                    bad.append(("large", k, S))
        # superset closure on one random signature
        S = [v for v in range(k) if rng.random() < 0.6]
        if is_signature(H, S)[0]:
            extra = [v for v in range(k) if v not in S]
            T = S + extra[: int(rng.integers(0, len(extra) + 1))]
            checked += 1
            if not is_signature(H, T)[0]:
                bad.append(("superset", k, tuple(S)))
    return SuiteResult("signature-large-sets", "large sets are signatures; supersets of signatures are signatures",
                       not bad, checked, {"violations": bad[:5]})


def suite_signature_extension(quick: bool, seed: int) -> SuiteResult:
    rng = config.substream(seed, "suite_extension")
    trials = 60 if quick else 250
    checked, bad = 0, []
    for _ in range(trials):
        H = random_graph(int(rng.integers(2, 6)), rng)
        G = random_graph(int(rng.integers(H.n, 9)), rng)
        X = [v for v in range(H.n) if rng.random() < 0.5]
        if not is_signature(H, X)[0]:
            continue
        targets = rng.permutation(G.n)[: len(X)]
        f = {x: int(t) for x, t in zip(X, targets)}
        U = to_mask(v for v in range(G.n) if rng.random() < 0.7)
        checked += 1
        count = embeddings_with_image_in(H, G, f, U)
        if count > E(H.n - len(X), U.bit_count()) if H.n > len(X) else count > 1:
            bad.append((H.n, G.n, tuple(X)))
    return SuiteResult("signature-extension", "embeddings extending f on a signature into U are <= E_{k-|X|}(|U|)",
                       not bad, checked, {"violations": bad[:5]})


def suite_sequence(quick: bool, seed: int) -> SuiteResult:
    m_hi = 6 if quick else 7
    detail, ok, checked = {}, True, 0
    for name, H in (("K2", Graph.complete(2)), ("K3", Graph.complete(3)), ("P4", Graph.path(4))):
        seq = emb_sequence(H, H.n, m_hi)
        d = emb_sequence_diagnostics(H, seq, H.n)
        checked += len(d.strict_rows)
        ok &= d.ok
        detail[name] = {"strict_violations": len(d.strict_violations)}
    return SuiteResult("first-difference-sandwich", "first differences of emb(H, m) are sandwiched", ok, checked, detail)


def suite_epsilon(quick: bool, seed: int) -> SuiteResult:
    led = epsilon_ledger(Fraction(1, 10**20), (10, 200))
    bad = epsilon_ledger(Fraction(1, 10), 100)
    return SuiteResult("epsilon-ledger", "epsilon inequalities hold at q = 1e-20, k = 1e200 and fail at q = 0.1, k = 100",
                       led.all_hold and not bad.all_hold, 2,
                       {"large": led.verdict_bitmap(), "small_failures": bad.failed})


def suite_preconditions(quick: bool, seed: int) -> SuiteResult:
    big = check_preconditions((10, 200), Fraction(1, 2))
    small = check_preconditions(10**6, Fraction(1, 2))
    ok = chain_certified(big) and small.get("p_main_theorem").verdict == "Violated"
    return SuiteResult("precondition-chain", "the parameter chain holds at k~ = 1e200 and fails at 1e6", ok, 2,
                       {"gap_at_1e6": small.get("p_main_theorem").margins})


def suite_aut_statistic(quick: bool, seed: int) -> SuiteResult:
    samples = 50
    detail = {}
    ok = True
    for kt in (11, 13, 17):
        G = AbelianGroup((kt,))
        hits = sum(count_automorphisms(random_cayley(G, 0.5, seed + s).graph) == 2 * kt for s in range(samples))
        detail[kt] = f"{hits}/{samples}"
        ok &= hits >= 0.8 * samples
    return SuiteResult("aut-statistic", "aut(Cayley graph) = 2k~ for most sampled connection sets", ok,
                       3 * samples, detail)


SUITES: dict[str, Callable[[bool, int], SuiteResult]] = {
    "oracle-equivalence": suite_oracle_equivalence,
    "emb-aut-ind": suite_aut_identity,
    "per-vertex-sum": suite_per_vertex,
    "maximizer-vertex-coverage": suite_each_vertex_many,
    "monotone-ind-ratio": suite_monotone_ratio,
    "prime-connected": suite_prime_connected,
    "doubling-solutions": suite_doubling,
    "lambda-generate": suite_generating,
    "rot-refl-hitting": suite_rot_refl,
    "closed-form-blowup": suite_closed_form,
    "blowup-classification": suite_classification,
    "balanced-product": suite_E_lemma,
    "signature-large-sets": suite_signature_lemmas,
    "signature-extension": suite_signature_extension,
    "first-difference-sandwich": suite_sequence,
    "epsilon-ledger": suite_epsilon,
    "precondition-chain": suite_preconditions,
    "aut-statistic": suite_aut_statistic,
}


def run_suites(quick: bool = True, seed: int = 0, only: list[str] | None = None) -> list[SuiteResult]:
    unknown = sorted(set(only or ()) - set(SUITES))
    if unknown:
        raise DomainError(f"unknown suite keys: {', '.join(unknown)}")
    out = []
    for key, fn in SUITES.items():
        if only and key not in only:
            continue
        t0 = time.perf_counter()
        res = fn(quick, seed)
        res.elapsed_s = time.perf_counter() - t0
        out.append(res)
    return out
