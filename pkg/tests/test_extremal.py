from __future__ import annotations

import pytest
from hypothesis import given, settings

from inducilab.embed import count_embeddings
from inducilab.errors import CapacityError
from inducilab.extremal import (
    emb_max,
    emb_sequence,
    ind_value,
    local_search,
    local_search_step,
    sequence_rows,
)
from inducilab.graph import Graph
from inducilab.iso import are_isomorphic, enumerate_graphs

from conftest import graphs

K2, K3, P4 = Graph.complete(2), Graph.complete(3), Graph.path(4)


def test_k2_maximum_is_the_clique():
    for n in range(2, 7):
        r = emb_max(K2, n)
        assert r.value == n * (n - 1) and r.exact
        assert len(r.witnesses) == 1 and r.witnesses[0] == Graph.complete(n)


def test_p4_on_four_vertices():
    r = emb_max(P4, 4)
    # oracle: the labelled graphs attaining the maximum are exactly the P4 copies
    vals = [(count_embeddings(P4, G), G) for G in enumerate_graphs(4)]
    best = max(v for v, _ in vals)
    assert r.value == best == 2
    assert all(are_isomorphic(G, P4) for v, G in vals if v == best)
    assert len(r.witnesses) == 1 and are_isomorphic(r.witnesses[0], P4)


def test_too_few_vertices():
    assert emb_max(Graph.cycle(5), 4).value == 0


def test_sequences():
    assert emb_sequence(K2, 2, 6) == [m * (m - 1) for m in range(2, 7)]
    assert emb_sequence(K3, 3, 6) == [6, 24, 60, 120]
    assert emb_sequence(P4, 4, 4) == [2]
    with pytest.raises(CapacityError):
        emb_sequence(K2, 2, 12)


def test_sequence_rows_ratio():
    rows = sequence_rows(P4, 4, 5)
    assert rows[0]["ind"] == 1 and (rows[0]["ratio_num"], rows[0]["ratio_den"]) == (1, 1)
    assert ind_value(P4, 5) == rows[1]["ind"]


@settings(max_examples=30)
@given(graphs(min_n=2, max_n=6), graphs(min_n=2, max_n=3))
def test_local_step_never_decreases(G, H):
    before = count_embeddings(H, G)
    after = count_embeddings(H, local_search_step(G, H))
    assert after >= before


def test_local_step_k2_on_p3():
    assert count_embeddings(K2, local_search_step(Graph.path(3), K2)) >= 4


def test_local_step_fixed_point_on_maximizer():
    for H in (K2, P4):
        W = emb_max(H, 4).witnesses[0]
        assert count_embeddings(H, local_search_step(W, H)) == emb_max(H, 4).value


def test_local_search_is_a_lower_bound():
    r = emb_max(Graph.cycle(4), 6, mode="local_search", seed=3)
    assert not r.exact and r.value <= emb_max(Graph.cycle(4), 6).value
    assert r.value == count_embeddings(Graph.cycle(4), r.witnesses[0])
    assert local_search(K2, 5, seed=1)[0] == 20
