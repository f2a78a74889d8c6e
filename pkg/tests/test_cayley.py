from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, strategies as st

from inducilab.cayley import (
    CayleyGraph,
    build_cayley,
    cayley,
    delete_vertices,
    distinct_map_count,
    maps_hitting_vertex,
    random_cayley,
    rotations_reflections,
    sample_connection_set,
)
from inducilab.errors import DomainError
from inducilab.graph import Graph
from inducilab.groups import AbelianGroup
from inducilab.iso import are_isomorphic

from conftest import group_factors


def test_cycle_and_matching_and_circulant():
    assert cayley([5], [1, 4]).graph == Graph.cycle(5)
    M = cayley([6], [3]).graph
    assert sorted(M.edges()) == [(0, 3), (1, 4), (2, 5)]
    C = cayley([7], [1, 2, 5, 6]).graph
    assert all(C.degree(v) == 4 for v in range(7))


def test_invalid_connection_sets():
    with pytest.raises(DomainError):
        cayley([5], [1])
    with pytest.raises(DomainError):
        cayley([5], [0])
    with pytest.raises(DomainError):
        cayley([5], [7])


@given(group_factors(max_order=24), st.floats(0.05, 0.95), st.integers(0, 2**63 - 1))
def test_sampled_cayley_invariants(factors, p, seed):
    G = AbelianGroup(factors)
    H = random_cayley(G, p, seed)
    lam = H.connection_set.members
    assert 0 not in lam and all(G.neg_idx(g) in lam for g in lam)
    # regular of degree |Λ|, and rotations are automorphisms
    assert all(H.graph.degree(v) == len(lam) for v in range(G.order))
    for m in rotations_reflections(G):
        assert m.is_automorphism(H.graph)


def test_sampling_is_deterministic_and_prefix_stable():
    G = AbelianGroup((13,))
    a = sample_connection_set(G, 0.5, 99)
    b = sample_connection_set(G, 0.5, 99)
    assert a == b
    # the class draw does not depend on p: a lower p gives a subset
    low = sample_connection_set(G, 0.3, 99)
    assert low.members <= sample_connection_set(G, 0.7, 99).members


def test_sampling_domain():
    G = AbelianGroup((5,))
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            sample_connection_set(G, p, 1)


def test_high_p_gives_complete_graph():
    G = AbelianGroup((5,))
    hits = sum(len(sample_connection_set(G, 0.999, s)) == 4 for s in range(1000))
    assert hits >= 990


def test_rotations_reflections_counts():
    Z5 = AbelianGroup((5,))
    maps = rotations_reflections(Z5)
    assert len(maps) == 10 and distinct_map_count(Z5) == 10
    V4 = AbelianGroup((2, 2))
    assert len(rotations_reflections(V4)) == 8
    assert distinct_map_count(V4) == 4


def test_aut_c5_is_exactly_the_dihedral_maps():
    C5 = Graph.cycle(5)
    autos = {p for p in itertools.permutations(range(5))
             if all(C5.has_edge(p[x], p[y]) == C5.has_edge(x, y)
                    for x, y in itertools.combinations(range(5), 2))}
    assert autos == {m.images for m in rotations_reflections(AbelianGroup((5,)))}


def test_maps_hitting_vertex_examples():
    Z5 = AbelianGroup((5,))
    assert all(maps_hitting_vertex(Z5, range(5), x) == 10 for x in range(5))
    assert all(maps_hitting_vertex(Z5, [0, 1, 2, 3], x) == 8 for x in range(5))
    Z7 = AbelianGroup((7,))
    for X in itertools.combinations(range(7), 5):
        assert all(maps_hitting_vertex(Z7, X, x) == 10 for x in range(7))


@given(group_factors(max_order=16), st.data())
def test_maps_hitting_vertex_is_2_times_size(factors, data):
    G = AbelianGroup(factors)
    X = data.draw(st.sets(st.integers(0, G.order - 1)))
    x = data.draw(st.integers(0, G.order - 1))
    assert maps_hitting_vertex(G, X, x) == 2 * len(X)


def test_delete_vertices():
    C5 = cayley([5], [1, 4])
    H, back = delete_vertices(C5, [0])
    assert are_isomorphic(H, Graph.path(4)) and back == [1, 2, 3, 4]
    H, back = delete_vertices(C5, [])
    assert H == C5.graph
    with pytest.raises(DomainError):
        delete_vertices(C5, range(5))


def test_json_round_trip():
    H = random_cayley(AbelianGroup((2, 6)), 0.5, 3)
    again = CayleyGraph.from_json(json.dumps(H.to_json()))
    assert again.graph == H.graph and again.connection_set == H.connection_set


def test_build_rejects_foreign_connection_set():
    lam = cayley([5], [1, 4]).connection_set
    with pytest.raises(DomainError):
        build_cayley(AbelianGroup((7,)), lam)
