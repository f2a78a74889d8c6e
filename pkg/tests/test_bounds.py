from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from inducilab import bounds
from inducilab.bounds import (
    E,
    E_grid,
    canonical_split,
    chain_certified,
    check_E_lemma,
    check_preconditions,
    emb_sequence_diagnostics,
    epsilon_ledger,
    ratio_sequence,
)
from inducilab.errors import DomainError
from inducilab.extremal import emb_sequence
from inducilab.graph import Graph


def _max_product_bruteforce(l: int, m: int) -> int:
    best = 0
    for parts in itertools.product(range(m + 1), repeat=l):
        if sum(parts) <= m:
            p = 1
            for x in parts:
                p *= x
            best = max(best, p)
    return best


def test_E_examples():
    assert E(3, 7) == 12 and canonical_split(3, 7) == [3, 2, 2]
    assert E(4, 3) == 0
    assert E(5, 10) == 32
    with pytest.raises(DomainError):
        E(0, 4)


def test_E_matches_bruteforce_small():
    for l in range(1, 5):
        for m in range(0, 13):
            assert E(l, m) == _max_product_bruteforce(l, m)


@given(st.integers(1, 10), st.integers(0, 80))
def test_E_monotone_and_divisible_case(l, m):
    assert E(l, m) <= E(l, m + 1)
    if m % l == 0:
        assert E(l, m) == (m // l) ** l


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 40), st.integers(0, 40))
def test_E_supermultiplicative(l, lp, m, mp):
    assert E(l, m) * E(lp, mp) <= E(l + lp, m + mp)


def test_E_lemma_report():
    rep = check_E_lemma(6, 30, 10_000)
    assert rep.ok
    assert rep.part_i_checked == 6 * 31 and rep.part_iii_checked == 10_000


def test_E_grid_hypotheses():
    for l, lp, m, mp, mu in E_grid(500):
        assert m >= l and lp <= l and mp <= (1 - mu) * m


def test_ledger_deep_regime():
    led = epsilon_ledger(Fraction(1, 10**20), (10, 200))
    assert led.all_hold and led.verdict_bitmap() == "1" * 10
    names = [i.name for i in led.inequalities]
    assert len(names) == 10 and len(set(names)) == 10


def test_ledger_names_failures():
    led = epsilon_ledger(Fraction(1, 10), 100)
    assert not led.all_hold
    assert "eps_chain_half_q" in led.failed
    assert set(led.failed) <= {i.name for i in led.inequalities}


@pytest.mark.parametrize("e", range(2, 60, 3))
def test_epsilon_ordering(e):
    led = epsilon_ledger(Fraction(1, 10**e), (10, 200))
    lo_hi = led.eps_log10
    for a, b in zip(lo_hi, lo_hi[1:]):
        assert b[1] < a[0]


def test_ledger_domain():
    for q in (0, 1, Fraction(3, 2)):
        with pytest.raises(DomainError):
            epsilon_ledger(q, 100)


def test_ledger_delta_assumed_or_decided():
    led = epsilon_ledger(Fraction(1, 10**20), (10, 200))
    assert next(i for i in led.inequalities if i.name == "eps2_below_delta").verdict == "Assumed"
    led = epsilon_ledger(Fraction(1, 10**20), (10, 200), delta=Fraction(1, 10**30))
    assert next(i for i in led.inequalities if i.name == "eps2_below_delta").verdict == "Violated"


def test_higher_precision_never_flips(monkeypatch):
    cases = [(Fraction(1, 10**20), (10, 200)), (Fraction(1, 10), 100), (Fraction(1, 1000), 10**6)]
    base = [[i.verdict for i in epsilon_ledger(q, k).inequalities] for q, k in cases]
    pre = [c.verdict for c in check_preconditions((10, 200), Fraction(1, 2)).checks]
    monkeypatch.setattr(bounds, "PRECISIONS", (200, 400))
    high = [[i.verdict for i in epsilon_ledger(q, k).inequalities] for q, k in cases]
    for a, b in zip(base, high):
        for x, y in zip(a, b):
            if x in ("Certified", "Violated"):
                assert x == y
    for x, y in zip(pre, [c.verdict for c in check_preconditions((10, 200), Fraction(1, 2)).checks]):
        if x in ("Certified", "Violated"):
            assert x == y


def test_preconditions_huge():
    rep = check_preconditions((10, 200), Fraction(1, 2))
    assert rep.all_hold and chain_certified(rep)
    assert rep.p_prime == Fraction(1, 2)


def test_preconditions_small_report_gap():
    rep = check_preconditions(10**6, Fraction(1, 2))
    v = rep.get("p_main_theorem")
    assert v.verdict == "Violated" and v.margins[0][1] < 0
    assert not chain_certified(rep)


def test_p_symmetry():
    a = check_preconditions((10, 200), Fraction(3, 10))
    b = check_preconditions((10, 200), Fraction(7, 10))
    assert a.p_prime == b.p_prime == Fraction(3, 10)
    assert [c.verdict for c in a.checks] == [c.verdict for c in b.checks]


def test_sandwich_examples():
    K2, K3, P4 = Graph.complete(2), Graph.complete(3), Graph.path(4)
    d = emb_sequence_diagnostics(K2, [m * (m - 1) for m in range(2, 9)], 2)
    assert d.ok
    # only the upper side is tight for K2: the lower side is 2(m-2)
    assert all(r["difference"] == r["upper"] for r in d.strict_rows)
    assert all(r["lower"] == 2 * (r["m"] - 2) for r in d.strict_rows)
    assert emb_sequence_diagnostics(K3, emb_sequence(K3, 3, 7), 3).ok
    d = emb_sequence_diagnostics(P4, emb_sequence(P4, 4, 7), 4)
    assert d.ok and set(d.report_only) == {"power_bound", "second_difference", "difference_gap"}


def test_sandwich_detects_bad_sequences():
    assert not emb_sequence_diagnostics(2, [2, 100, 101], 2).ok
    with pytest.raises(DomainError):
        emb_sequence_diagnostics(2, [2, -1], 2)


def test_ratio_sequence():
    r = ratio_sequence(emb_sequence(Graph.path(4), 4, 6), 4, 4, 2)
    assert r[0] == 1 and all(isinstance(x, Fraction) for x in r)
