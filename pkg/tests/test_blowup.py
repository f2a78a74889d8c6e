from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from inducilab.blowup import (
    BlowupTree,
    Leaf,
    LeafPolicy,
    balanced_iterated_tree,
    balanced_parts,
    blowup_from_sizes,
    blowup_parts,
    build_blowup,
    build_blowup_with_parts,
    classify_embeddings,
    closed_form_blowup_count,
    count_into_blowup,
    objective_T,
    optimize_partition,
    rigidity_certificate,
)
from inducilab.cayley import cayley
from inducilab.embed import count_embeddings, count_automorphisms
from inducilab.errors import CapacityError, DomainError, StructuralError
from inducilab.extremal import emb_value
from inducilab.graph import Graph

C5T = cayley([5], [1, 4])
C5, P4 = Graph.cycle(5), Graph.path(4)


def test_balanced_parts():
    assert balanced_parts(7, 5) == [2, 2, 1, 1, 1]
    assert balanced_parts(10, 5) == [2, 2, 2, 2, 2]
    with pytest.raises(DomainError):
        blowup_parts(3, 5)


@given(st.integers(0, 200), st.integers(1, 12))
def test_balanced_parts_invariants(n, k):
    s = balanced_parts(n, k)
    assert sum(s) == n and len(s) == k and max(s) - min(s) <= 1
    assert s == sorted(s, reverse=True)


def test_trivial_blowup_is_the_base():
    spec = BlowupTree(C5, tuple(Leaf(Graph.empty(1)) for _ in range(5)))
    assert build_blowup(spec) == C5


def test_two_vertex_leaves_edge_count():
    G = build_blowup(blowup_from_sizes(C5T, [2] * 5))
    assert G.n == 10 and len(list(G.edges())) == 20


def test_c6_figure_shape():
    tree = balanced_iterated_tree(Graph.cycle(6), 26)
    assert tree.part_sizes == [5, 5, 4, 4, 4, 4]
    assert tree.size == 26 and tree.is_balanced()


def test_empty_part_rejected():
    with pytest.raises(StructuralError):
        BlowupTree(C5, tuple(Leaf(Graph.empty(s)) for s in (1, 1, 1, 1, 0)))
    with pytest.raises(StructuralError):
        BlowupTree(C5, (Leaf(Graph.empty(1)),))


def test_tree_json_round_trip():
    tree = balanced_iterated_tree(C5T, 60)
    again = BlowupTree.from_json(json.dumps(tree.to_json()))
    assert again == tree and build_blowup(again) == build_blowup(tree)


def test_closed_forms_match_direct_counts():
    assert closed_form_blowup_count(5, 5, 1) == 10
    assert closed_form_blowup_count(5, 5, 2) == 31300
    assert closed_form_blowup_count(5, 4, 2) == 6300
    G = build_blowup(balanced_iterated_tree(C5T, 25))
    assert count_embeddings(C5, G) == 31300
    assert count_embeddings(P4, G) == 6300


def test_closed_form_m1_is_2ktilde():
    for kt in range(3, 12):
        assert closed_form_blowup_count(kt, 3, 1) == 2 * kt


@settings(max_examples=25)
@given(st.integers(5, 40), st.sampled_from(["C5", "P4"]))
def test_recursive_count_matches_direct(n, which):
    H = C5 if which == "C5" else P4
    tree = balanced_iterated_tree(C5T, n)
    assert count_into_blowup(H, C5T, tree) == count_embeddings(H, build_blowup(tree))


def test_count_examples():
    assert count_into_blowup(C5, C5T, blowup_from_sizes(C5T, [2] * 5)) == 320
    assert count_into_blowup(P4, C5T, blowup_from_sizes(C5T, [1] * 5)) == 10
    assert count_into_blowup(C5, C5T, Leaf(Graph.empty(3))) == 0


def test_nonprime_pattern_uses_direct_count_with_cap():
    C4 = Graph.cycle(4)
    tree = balanced_iterated_tree(C5T, 20)
    assert count_into_blowup(C4, C5T, tree) == count_embeddings(C4, build_blowup(tree))
    with pytest.raises(CapacityError):
        count_into_blowup(C4, C5T, balanced_iterated_tree(C5T, 500))


def test_classification_trivial_blowup():
    s = classify_embeddings(C5, C5T, blowup_from_sizes(C5T, [1] * 5))
    assert s.ok and s.total == s.follows_map == 10


def test_classification_leaf_internal_copies():
    spec = BlowupTree(C5, (Leaf(C5),) + tuple(Leaf(Graph.empty(1)) for _ in range(4)))
    s = classify_embeddings(C5, C5T, spec)
    assert s.ok and s.in_part == 10
    assert s.total == count_embeddings(C5, build_blowup(spec))


def test_classification_flags_non_prime_pattern():
    C4 = Graph.cycle(4)
    spec = blowup_from_sizes(C4, [2, 1, 1, 1])
    assert not classify_embeddings(C4, C4, spec).ok


def test_parts_are_contiguous():
    _, part_of = build_blowup_with_parts(blowup_from_sizes(C5T, [3, 1, 2, 1, 1]))
    assert part_of == [0, 0, 0, 1, 2, 2, 3, 4]


def test_rigidity():
    cert = rigidity_certificate(C5, C5T)
    assert cert == {"prime": True, "rigid": True, "embeddings": 10, "distinct_restricted_maps": 10}
    assert rigidity_certificate(P4, C5T)["rigid"]


def test_objective_examples():
    assert objective_T(C5, C5T, [2] * 5) == 320
    assert objective_T(C5, C5T, [6, 1, 1, 1, 1]) == 10 * 6 + emb_value(C5, 6)
    # a zero part kills every placement when k = k~
    sizes = [4, 3, 0, 2, 1]
    assert objective_T(C5, C5T, sizes) == sum(emb_value(C5, s) for s in sizes)


def test_objective_equals_count_with_policy_leaves():
    pol = LeafPolicy.emb_maximizer(C5)
    sizes = [6, 2, 1, 1, 1]
    spec = blowup_from_sizes(C5T, sizes, pol)
    assert objective_T(C5, C5T, sizes, pol) == count_embeddings(C5, build_blowup(spec))


def test_optimize_small():
    r = optimize_partition(C5, C5T, 5)
    assert r["max_T"] == 10 and r["exact"]
    assert {"sizes": [1, 1, 1, 1, 1], "T": 10} in r["maximizers"]
    r = optimize_partition(P4, C5T, 3, LeafPolicy.empty_graph())
    assert r["max_T"] == 0


def test_aut_divides_blowup_counts():
    G = build_blowup(balanced_iterated_tree(C5T, 25))
    assert count_embeddings(P4, G) % count_automorphisms(P4) == 0
