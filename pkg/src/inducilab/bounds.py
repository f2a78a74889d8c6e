"""The balanced-product function E_l(m), the epsilon-parameter ledger,
theorem-precondition arithmetic, and diagnostics for emb(H, m) sequences.

Inequalities involving logarithms, exponentials or fractional powers are
evaluated with mpmath interval arithmetic.  A verdict is "Certified" only
when the enclosure decides the comparison; otherwise the precision is raised
and, failing that, the verdict is "Inconclusive".  Huge parameters such as
10^200 are passed as (base, exponent) pairs and handled through their
logarithms.
"""

from __future__ import annotations

import itertools
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from mpmath import iv, mpf

from . import config
from .errors import DomainError

Number = Union[int, Fraction, float, tuple]

PRECISIONS = (30, 60, 120, 240)


# ---------------------------------------------------------------------------
# E_l(m)


def E(l: int, m: int) -> int:
    """Product of the near-equal split of m into l parts (0 when m < l)."""
    if l < 1 or m < 0:
        raise DomainError("E needs l >= 1 and m >= 0")
    q, r = divmod(m, l)
    return (q + 1) ** r * q ** (l - r)


def canonical_split(l: int, m: int) -> list[int]:
    q, r = divmod(m, l)
    return [q + 1] * r + [q] * (l - r)


def _max_products(l_max: int, m_max: int) -> dict[tuple[int, int], int]:
    """Oracle: best product of l non-negative parts with sum <= m, by enumeration
    of non-increasing part lists."""
    best: dict[tuple[int, int], int] = {}

    def rec(l_left: int, cap: int, total: int, prod: int, l_used: int) -> None:
        if l_used:
            key = (l_used, total)
            if best.get(key, -1) < prod:
                best[key] = prod
        if l_left == 0:
            return
        for part in range(min(cap, m_max - total), -1, -1):
            rec(l_left - 1, part, total + part, prod * part, l_used + 1)

    rec(l_max, m_max, 0, 1, 0)
    out = {}
    for l in range(1, l_max + 1):
        run = 0
        for m in range(m_max + 1):
            run = max(run, best.get((l, m), 0))
            out[(l, m)] = run
    return out


@contextmanager
def _precision(dps: int):
    old = iv.dps
    iv.dps = dps
    try:
        yield
    finally:
        iv.dps = old


def _iv(x) -> "iv.mpf":
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    return iv.mpf(x)


def _decide(diff, strict: bool) -> str | None:
    """diff encloses lhs - rhs for a claim lhs >= rhs (or > when strict)."""
    if diff.a > 0 or (not strict and diff.a >= 0):
        return "Certified"
    if diff.b < 0 or (strict and diff.b <= 0):
        return "Violated"
    return None


def _adaptive(fn: Callable[[], tuple], strict: bool) -> tuple[str, tuple[float, float]]:
    """Run ``fn`` (returning an interval for lhs - rhs) at rising precision."""
    diff = None
    for dps in PRECISIONS:
        with _precision(dps):
            diff = fn()
            verdict = _decide(diff, strict)
            bounds = (float(mpf(diff.a)), float(mpf(diff.b)))
        if verdict is not None:
            return verdict, bounds
    return "Inconclusive", bounds


@dataclass
class EProductReport:
    part_i_checked: int = 0
    part_i_violations: list = field(default_factory=list)
    part_ii_checked: int = 0
    part_ii_violations: list = field(default_factory=list)
    part_iii_checked: int = 0
    part_iii_violations: list = field(default_factory=list)
    part_iii_inconclusive: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.part_i_violations or self.part_ii_violations
                    or self.part_iii_violations or self.part_iii_inconclusive)

    def to_json(self) -> dict:
        return {
            "i": {"checked": self.part_i_checked, "violations": self.part_i_violations},
            "ii": {"checked": self.part_ii_checked, "violations": self.part_ii_violations},
            "iii": {"checked": self.part_iii_checked, "violations": self.part_iii_violations,
                    "inconclusive": self.part_iii_inconclusive},
            "ok": self.ok,
        }


def E_grid(points: int = 10_000, l_max: int = 8, m_max: int = 60) -> list[tuple[int, int, int, int, Fraction]]:
    """Deterministic grid (l, l', m, m', mu) meeting the hypotheses of the
    comparison bound, with mu = 1 - m'/m (the largest admissible mu, which
    makes the right-hand side smallest)."""
    pool = [
        (l, lp, m, mp)
        for l in range(1, l_max + 1)
        for lp in range(1, l + 1)
        for m in range(l, m_max + 1)
        for mp in range(0, m + 1)
    ]
    if len(pool) <= points:
        chosen = pool
    else:
        step = len(pool) / points
        chosen = [pool[int(i * step)] for i in range(points)]
    return [(l, lp, m, mp, Fraction(m - mp, m)) for l, lp, m, mp in chosen]


def E_comparison_rhs(l: int, lp: int, m: int, mu: Fraction):
    """Interval for e^{3(l-l') - mu l / 2} (l/m)^{l-l'} E_l(m)."""
    expo = _iv(3 * (l - lp)) - _iv(mu) * l / 2
    return iv.exp(expo) * (_iv(Fraction(l, m)) ** (l - lp)) * E(l, m)


def check_E_lemma(
    l_max: int = 6, m_max: int = 30, grid_points: int = 10_000
) -> EProductReport:
    """(i) E against the exhaustive max-product oracle; (ii) supermultiplicativity;
    (iii) the comparison bound on an interval-certified grid."""
    rep = EProductReport()
    oracle = _max_products(l_max, m_max)
    for l in range(1, l_max + 1):
        for m in range(m_max + 1):
            rep.part_i_checked += 1
            if E(l, m) != oracle[(l, m)]:
                rep.part_i_violations.append((l, m, E(l, m), oracle[(l, m)]))
    for l, lp in itertools.product(range(1, l_max + 1), repeat=2):
        for m, mp in itertools.product(range(m_max + 1), repeat=2):
            rep.part_ii_checked += 1
            if E(l, m) * E(lp, mp) > E(l + lp, m + mp):
                rep.part_ii_violations.append((l, m, lp, mp))
    with _precision(PRECISIONS[0]):
        for l, lp, m, mp, mu in E_grid(grid_points):
            rep.part_iii_checked += 1
            lhs = E(lp, mp)
            diff = E_comparison_rhs(l, lp, m, mu) - lhs
            verdict = _decide(diff, strict=False)
            if verdict is None:
                verdict, _ = _adaptive(lambda: E_comparison_rhs(l, lp, m, mu) - lhs, strict=False)
            if verdict == "Violated":
                rep.part_iii_violations.append((l, lp, m, mp, str(mu)))
            elif verdict == "Inconclusive":
                rep.part_iii_inconclusive.append((l, lp, m, mp, str(mu)))
    return rep


# ---------------------------------------------------------------------------
# logarithms of possibly huge numbers


def _log_iv(x: Number):
    """Interval for the natural log of x; x may be an int, Fraction, float or (base, exponent)."""
    if isinstance(x, tuple):
        base, exp = x
        return _iv(exp) * iv.log(_iv(base))
    if isinstance(x, Fraction):
        return iv.log(_iv(x.numerator)) - iv.log(_iv(x.denominator))
    if x <= 0:
        raise DomainError("logarithm of a non-positive number")
    return iv.log(_iv(x))


def _ln_base():
    return iv.log(_iv(config.LOG_BASES[config.log_base_name()])) if config.log_base_name() != "e" else None


def _log_cfg(log_x):
    """Convert a natural-log interval into the configured base."""
    lb = _ln_base()
    return log_x if lb is None else log_x / lb


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def _display(x: Number) -> str:
    if isinstance(x, tuple):
        return f"{x[0]}^{x[1]}"
    return str(x)


# ---------------------------------------------------------------------------
# epsilon ledger


@dataclass
class InequalityVerdict:
    name: str
    statement: str
    verdict: str  # Certified | Violated | Inconclusive | Assumed
    margins: list[tuple[float, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "statement": self.statement, "verdict": self.verdict,
                "margins": [list(m) for m in self.margins]}


@dataclass
class EpsilonLedger:
    q: Fraction
    k: Number
    delta: Fraction | None
    eps: list[float]
    eps_log10: list[tuple[float, float]]
    inequalities: list[InequalityVerdict]

    @property
    def all_hold(self) -> bool:
        return all(i.verdict in ("Certified", "Assumed") for i in self.inequalities)

    @property
    def failed(self) -> list[str]:
        return [i.name for i in self.inequalities if i.verdict == "Violated"]

    def verdict_bitmap(self) -> str:
        return "".join("1" if i.verdict in ("Certified", "Assumed") else "0" for i in self.inequalities)

    def to_json(self) -> dict:
        return {
            "q": str(self.q),
            "k": _display(self.k),
            "delta": None if self.delta is None else str(self.delta),
            "eps": self.eps,
            "eps_log10": [list(b) for b in self.eps_log10],
            "inequalities": [i.to_json() for i in self.inequalities],
            "all_hold": self.all_hold,
        }


def _log_eps(q: Fraction):
    """Natural logs of eps1..eps5 as intervals (log of the configured-base log is used)."""
    lq = _log_iv(q)
    L = _log_cfg(-lq)  # log(1/q) in the configured base
    lL = iv.log(L)
    ln10 = iv.log(_iv(10))
    return [
        lq - iv.log(_iv(3)),
        -2 * ln10 + lq - lL,
        -5 * ln10 + lq - 2 * lL,
        -7 * ln10 + 2 * lq - 2 * lL,
        -19 * ln10 + 4 * lq - 4 * lL,
    ]


def epsilon_ledger(q: Number, k: Number, delta: Number | None = None) -> EpsilonLedger:
    """Evaluate the five epsilon parameters and the ten inequalities about them.

    Every comparison is done between natural logarithms.  When delta is not
    given, the comparison eps2 < delta is reported as "Assumed": it is the
    normalization the parameters are designed around.
    """
    qf = _as_fraction(q)
    if not 0 < qf < 1:
        raise DomainError("q must lie in (0, 1)")
    df = None if delta is None else _as_fraction(delta)
    ln2 = lambda: iv.log(_iv(2))  # noqa: E731
    ln10 = lambda: iv.log(_iv(10))  # noqa: E731

    def logs():
        le = _log_eps(qf)
        lk = _log_iv(k)
        Lk = _log_cfg(lk)  # log k in the configured base
        return le, lk, iv.log(Lk), _log_iv(qf)

    def chain(terms: Callable[[], list], strict_flags: Sequence[bool]) -> tuple[str, list]:
        """terms() -> list of log-intervals that must be decreasing."""
        verdicts, margins = [], []
        n = len(strict_flags)
        for i in range(n):
            v, m = _adaptive(lambda i=i: terms()[i] - terms()[i + 1], strict_flags[i])
            verdicts.append(v)
            margins.append(m)
        if "Violated" in verdicts:
            return "Violated", margins
        if "Inconclusive" in verdicts:
            return "Inconclusive", margins
        return "Certified", margins

    out: list[InequalityVerdict] = []

    def add(name, statement, terms, strict_flags):
        v, m = chain(terms, strict_flags)
        out.append(InequalityVerdict(name, statement, v, m))

    add("eps_chain_half_q",
        "eps1 > eps2 > eps3 > eps4 > eps5, eps1 < q/2 < 10^-20",
        lambda: [-20 * ln10(), logs()[3] - ln2()] + [logs()[0][i] for i in range(5)],
        [True] * 6)
    add("eps_chain_hundredth",
        "eps2 > eps3 > eps4 > eps5, eps2 < 1/100",
        lambda: [-2 * ln10()] + [logs()[0][i] for i in range(1, 5)],
        [True] * 4)

    def xlogx(li):
        # log(log(1/eps) * eps) with log(1/eps) in the configured base
        return iv.log(_log_cfg(-li)) + li

    add("eps2_log_vs_eps1",
        "log(1/eps2) eps2 < (log 2 / 8) eps1",
        lambda: [iv.log(_log_cfg(ln2())) - iv.log(_iv(8)) + logs()[0][0], xlogx(logs()[0][1])],
        [True])
    if df is None:
        out.append(InequalityVerdict("eps2_below_delta", "eps2 < delta", "Assumed"))
    else:
        add("eps2_below_delta", "eps2 < delta",
            lambda: [_log_iv(df), logs()[0][1]], [True])
    add("eps3_log_vs_eps2",
        "log(1/eps3) eps3 < eps2 / 100",
        lambda: [logs()[0][1] - 2 * ln10(), xlogx(logs()[0][2])],
        [True])
    add("eps3_squared_vs_k",
        "eps2 > eps3 > eps3^2 > (10^6/q) (log k)^2 / k",
        lambda: [logs()[0][1], logs()[0][2], 2 * logs()[0][2],
                 6 * ln10() - logs()[3] + 2 * logs()[2] - logs()[1]],
        [True] * 3)
    add("eps4_vs_eps3",
        "eps4 < (q/20) eps3",
        lambda: [logs()[3] - iv.log(_iv(20)) + logs()[0][2], logs()[0][3]],
        [True])
    # eps5 / eps4^2 does not depend on q (the q^4 / L^4 factors cancel), and the
    # inequality holds with equality, which an enclosure can never decide; the
    # constants are therefore compared exactly.
    c4, c5 = Fraction(1, 10**7), Fraction(1, 10**19)
    out.append(InequalityVerdict(
        "eps5_vs_eps4_squared", "eps5 <= 10^-5 eps4^2",
        "Certified" if c5 <= Fraction(1, 10**5) * c4 * c4 else "Violated",
        [(math.log(Fraction(1, 10**5) * c4 * c4 / c5),) * 2]))
    add("eps5_vs_q",
        "eps5 < q / 10^4",
        lambda: [logs()[3] - 4 * ln10(), logs()[0][4]],
        [True])
    add("eps5_vs_k",
        "eps1 > ... > eps5 > (40/q)(log k)^2/k > (10^3/q) log k / k > 10^3/k",
        lambda: [logs()[0][i] for i in range(5)] + [
            iv.log(_iv(40)) - logs()[3] + 2 * logs()[2] - logs()[1],
            3 * ln10() - logs()[3] + logs()[2] - logs()[1],
            3 * ln10() - logs()[1],
        ],
        [True] * 7)

    with _precision(PRECISIONS[0]):
        le = _log_eps(qf)
        eps_log10 = []
        eps_vals = []
        for li in le:
            x = li / iv.log(_iv(10))
            eps_log10.append((float(mpf(x.a)), float(mpf(x.b))))
            eps_vals.append(float(mpf(iv.exp(li).a)) if float(mpf(x.a)) > -300 else 0.0)
    return EpsilonLedger(qf, k, df, eps_vals, eps_log10, out)


# ---------------------------------------------------------------------------
# theorem preconditions


@dataclass
class PreconditionReport:
    ktilde: Number
    p: Fraction
    p_prime: Fraction
    k: Number
    checks: list[InequalityVerdict]

    @property
    def all_hold(self) -> bool:
        return all(c.verdict == "Certified" for c in self.checks)

    def get(self, name: str) -> InequalityVerdict:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "ktilde": _display(self.ktilde),
            "p": str(self.p),
            "p_prime": str(self.p_prime),
            "k": _display(self.k),
            "checks": [c.to_json() for c in self.checks],
            "all_hold": self.all_hold,
        }


def _log_minus(log_x, d: int):
    """log(x - d) from log x, for 0 <= d < x."""
    if d == 0:
        return log_x
    return log_x + iv.log(1 - _iv(d) * iv.exp(-log_x))


def check_preconditions(
    ktilde: Number,
    p: Number,
    k: Number | None = None,
    k_deficit: int = 0,
    q: Number | None = None,
    delta: Number | None = None,
) -> PreconditionReport:
    """Evaluate the parameter hypotheses of the main theorems in log-space.

    ``ktilde`` and ``k`` may be (base, exponent) pairs.  When ``k`` is omitted
    it is taken as ktilde - k_deficit.  Each check's margin is an interval for
    log(lhs) - log(rhs) (natural log).
    """
    pf = _as_fraction(p)
    if not 0 < pf < 1:
        raise DomainError("p must lie in (0, 1)")
    pp = min(pf, 1 - pf)

    def lkt():
        return _log_iv(ktilde)

    def lk():
        return _log_minus(lkt(), k_deficit) if k is None else _log_iv(k)

    def loglog(lx):
        return iv.log(_log_cfg(lx))

    ln10 = lambda: iv.log(_iv(10))  # noqa: E731
    checks: list[InequalityVerdict] = []

    def add(name, statement, pair, strict=False):
        v, m = _adaptive(lambda: pair()[0] - pair()[1], strict)
        checks.append(InequalityVerdict(name, statement, v, [m]))

    add("p_main_theorem", "p' >= 10^6 (log k~)^{6/5} k~^{-1/5}",
        lambda: (_log_iv(pp), 6 * ln10() + _iv(Fraction(6, 5)) * loglog(lkt()) - lkt() / 5))
    add("p_typicality", "p' >= 10^3 (log k~)^{1/2} k~^{-1/5}",
        lambda: (_log_iv(pp), 3 * ln10() + loglog(lkt()) / 2 - lkt() / 5))
    # k >= k~ - (1/4) log k~, compared directly: k~ - k <= (1/4) log k~
    if k is None:
        add("k_size", "k >= k~ - (1/4) log k~",
            lambda: (iv.log(_log_cfg(lkt()) / 4) if k_deficit else _iv(1),
                     iv.log(_iv(k_deficit)) if k_deficit else _iv(0)))
    else:
        add("k_size", "k >= k~ - (1/4) log k~",
            lambda: (lk(), _log_minus(lkt(), 0) + iv.log(1 - _log_cfg(lkt()) / 4 * iv.exp(-lkt()))))
    add("ktilde_root_40", "k~^{1/40} >= 100 log k~",
        lambda: (lkt() / 40, 2 * ln10() + loglog(lkt())))
    add("k_root_20_half", "k^{1/20} >= (1/2) k~^{1/20}",
        lambda: (lk() / 20, lkt() / 20 - iv.log(_iv(2))))
    add("k_root_20", "(1/2) k~^{1/20} >= 5*10^3 (log k~)^2",
        lambda: (lkt() / 20 - iv.log(_iv(2)), iv.log(_iv(5)) + 3 * ln10() + 2 * loglog(lkt())))
    if q is not None:
        qf = _as_fraction(q)
        add("q_lower", "q >= 10^4 (log k)^{6/5} k^{-1/5}",
            lambda: (_log_iv(qf), 4 * ln10() + _iv(Fraction(6, 5)) * loglog(lk()) - lk() / 5))
    if delta is not None:
        dfr = _as_fraction(delta)
        add("delta_lower", "delta >= 10^3 (log k)^{1/5} k^{-1/5}",
            lambda: (_log_iv(dfr), 3 * ln10() + loglog(lk()) / 5 - lk() / 5))
    kk = k if k is not None else (ktilde if not k_deficit else f"{_display(ktilde)}-{k_deficit}")
    return PreconditionReport(ktilde, pf, pp, kk, checks)


def chain_certified(rep: PreconditionReport) -> bool:
    """The chain k~^{1/40} >= 100 log k~  =>  k^{1/20} >= (1/2) k~^{1/20} >= 5*10^3 (log k~)^2."""
    return all(rep.get(n).verdict == "Certified"
               for n in ("ktilde_root_40", "k_root_20_half", "k_root_20"))


# ---------------------------------------------------------------------------
# emb-sequence diagnostics


@dataclass
class SequenceDiagnostics:
    k: int
    m_lo: int
    seq: list[int]
    strict_rows: list[dict]
    strict_violations: list[dict]
    report_only: dict[str, list[dict]]

    @property
    def ok(self) -> bool:
        return not self.strict_violations

    def to_json(self) -> dict:
        def clean(rows):
            return [{k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.items()} for r in rows]

        return {
            "k": self.k, "m_lo": self.m_lo, "seq": self.seq,
            "strict": clean(self.strict_rows),
            "strict_violations": clean(self.strict_violations),
            "report_only": {k: clean(v) for k, v in self.report_only.items()},
            "ok": self.ok,
        }


def emb_sequence_diagnostics(H, seq: Sequence[int], m_lo: int) -> SequenceDiagnostics:
    """Check the first-difference sandwich strictly; report the other bounds.

    ``H`` is the pattern graph or just its order k; ``seq[i]`` must be
    emb(H, m_lo + i).  The sandwich
    (k/(m-1)) e(m-1) <= e(m) - e(m-1) <= (k/m) e(m) holds for every graph
    (delete the least used vertex / clone the most used one), so any
    violation is an error.  The polynomial bounds on e(m) and its second
    differences rely on asymptotic hypotheses and are only reported.
    """
    k = H if isinstance(H, int) else H.n
    if k < 1 or m_lo < 0 or any((not isinstance(x, int)) or x < 0 for x in seq):
        raise DomainError("sequence must be non-negative integers with k >= 1")
    e = {m_lo + i: v for i, v in enumerate(seq)}
    strict_rows, violations = [], []
    for m in sorted(e):
        if m < 2 or m - 1 not in e:
            continue
        lo = Fraction(k, m - 1) * e[m - 1]
        mid = e[m] - e[m - 1]
        hi = Fraction(k, m) * e[m]
        row = {"m": m, "lower": lo, "difference": mid, "upper": hi,
               "lower_ok": lo <= mid, "upper_ok": mid <= hi}
        strict_rows.append(row)
        if not (row["lower_ok"] and row["upper_ok"]):
            violations.append(row)
    report: dict[str, list[dict]] = {"power_bound": [], "second_difference": [], "difference_gap": []}
    for m in sorted(e):
        if m < 1:
            continue
        bound = Fraction(m ** k, k ** (k - 2)) if k >= 2 else Fraction(k ** (2 - k) * m ** k)
        report["power_bound"].append({"m": m, "emb": e[m], "bound": bound, "holds": e[m] <= bound})

    for m in sorted(e):
        if m >= 3 and m - 1 in e and m - 2 in e:
            val = e[m] - 2 * e[m - 1] + e[m - 2]
            b = 2 * Fraction(k ** 4, k ** k) * Fraction(m) ** (k - 2)
            report["second_difference"].append({"m": m, "value": val, "bound": b, "holds": val <= b})
    ms = sorted(e)
    for m in ms:
        for mp in ms:
            if mp >= 1 and m - mp >= 2 and m - 1 in e and mp + 1 in e:
                val = e[m] - e[m - 1] - e[mp + 1] + e[mp]
                b = (m - mp) * 2 * Fraction(k ** 4, k ** k) * Fraction(m) ** (k - 2)
                report["difference_gap"].append({"m": m, "m_prime": mp, "value": val, "bound": b,
                                                 "holds": val <= b})
    return SequenceDiagnostics(k, m_lo, list(seq), strict_rows, violations, report)


def ratio_sequence(seq: Sequence[int], m_lo: int, k: int, aut: int) -> list[Fraction]:
    """ind(H, m) / C(m, k) for each entry, exactly."""
    out = []
    for i, e in enumerate(seq):
        m = m_lo + i
        out.append(Fraction(e // aut, math.comb(m, k)) if m >= k else Fraction(0))
    return out
