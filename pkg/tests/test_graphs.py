import json
import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_admissible, isomorphic, one_pi
from renorm.corpus import B1, B2, NAMED, S, T1, builtin_graphs, phi4_graphs
from renorm.graphs import (
    Graph,
    GraphError,
    Subgraph,
    admissible_subgraphs,
    canonical_form,
    check_graph,
    contract,
    graph_from_json,
    graph_to_json,
    is_one_particle_irreducible,
    load_graphs,
    loop_number,
    superficial_degree,
)

CORPUS = builtin_graphs(3)


def test_loop_numbers():
    assert loop_number(B1) == 1
    assert loop_number(S) == 2
    assert loop_number(T1) == 1


def test_superficial_degrees():
    assert superficial_degree(B1) == 0
    assert superficial_degree(S) == 2
    assert superficial_degree(B2) == 0


def test_disconnected_graph_has_no_loop_number():
    g = Graph(2, ((0, 0), (1, 1)), (0, 0, 1, 1))
    with pytest.raises(GraphError):
        loop_number(g)


def test_one_particle_irreducibility():
    assert is_one_particle_irreducible(B1)
    assert is_one_particle_irreducible(T1)
    # two bubbles joined by a bridge
    bridged = Graph(4, ((0, 1), (0, 1), (1, 2), (2, 3), (2, 3)), (0, 0, 1, 3, 3, 2))
    assert not is_one_particle_irreducible(bridged)


def edge_sets(subs):
    return sorted(tuple(sorted(s.edge_subset)) for s in subs)


def test_admissible_examples():
    assert admissible_subgraphs(B1) == []
    subs = admissible_subgraphs(B2)
    assert len(subs) == 2
    assert all(isomorphic(c, B1) for s in subs for c in s.component_graphs())
    subs = admissible_subgraphs(S)
    assert len(subs) == 3
    assert all(len(s.edge_subset) == 2 for s in subs)


@pytest.mark.parametrize("g", CORPUS, ids=lambda g: g.name)
def test_admissible_against_brute_force(g):
    assert edge_sets(admissible_subgraphs(g)) == sorted(brute_admissible(g))


def test_contraction_examples():
    for s in admissible_subgraphs(B2):
        assert isomorphic(contract(B2, s), B1)
    for s in admissible_subgraphs(S):
        assert isomorphic(contract(S, s), T1)


def test_contracting_everything_is_rejected():
    whole = Subgraph(B2, frozenset(range(len(B2.edges))))
    with pytest.raises(GraphError):
        contract(B2, whole)


@pytest.mark.parametrize("g", CORPUS, ids=lambda g: g.name)
def test_degree_lemma_and_contraction_invariants(g):
    assert superficial_degree(g) == 4 - g.leg_count
    for s in admissible_subgraphs(g):
        q = contract(g, s)
        assert superficial_degree(g) == s.superficial_degree() + superficial_degree(q)
        assert q.leg_count == g.leg_count
        assert loop_number(q) == loop_number(g) - s.loop_number()
        assert is_one_particle_irreducible(q)


def test_subgraphs_of_sunset_share_a_key():
    keys = {canonical_form(c) for s in admissible_subgraphs(S) for c in s.component_graphs()}
    assert len(keys) == 1


def test_canonical_form_distinguishes():
    assert canonical_form(B1) == canonical_form(B1.relabel([1, 0]))
    assert canonical_form(B1) != canonical_form(T1)


@given(st.sampled_from(CORPUS), st.randoms(use_true_random=False))
def test_canonical_form_invariant_under_relabelling(g, rnd):
    perm = list(range(g.vertex_count))
    rnd.shuffle(perm)
    assert canonical_form(g.relabel(perm)) == canonical_form(g)


def test_canonical_keys_match_networkx_isomorphism():
    graphs = CORPUS[:14]
    for a in graphs:
        for b in graphs:
            assert (canonical_form(a) == canonical_form(b)) == isomorphic(a, b)


def test_enumeration_counts():
    # 4-point / 2-point 1PI phi^4 graphs at one, two and three loops
    counts = [(len(phi4_graphs(l, 4)), len(phi4_graphs(l, 2))) for l in (1, 2, 3)]
    assert counts == [(1, 1), (3, 2), (14, 5)]
    for l in (1, 2):
        for J in (2, 4):
            for g in phi4_graphs(l, J):
                assert one_pi(range(g.vertex_count), list(g.edges))


def test_named_graphs_are_valid():
    for g in NAMED:
        assert check_graph(g) == []


def test_json_round_trip(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps([graph_to_json(g) for g in NAMED]))
    loaded = load_graphs(path)
    assert [g.name for g in loaded] == [g.name for g in NAMED]
    assert all(canonical_form(a) == canonical_form(b) for a, b in zip(loaded, NAMED))


def test_json_reports_first_violation():
    with pytest.raises(GraphError, match="vertex 0 has degree 3"):
        graph_from_json({"name": "bad", "vertices": 2, "edges": [[0, 1], [0, 1]], "external": [0, 1, 1]})
    with pytest.raises(GraphError, match="missing field"):
        graph_from_json({"edges": []})
    with pytest.raises(GraphError):
        graph_from_json({"vertices": 1, "edges": [[0, 3]], "external": [0, 0]})


def test_random_relabelled_corpus_contracts_consistently():
    rnd = random.Random(5)
    for g in CORPUS[:10]:
        perm = list(range(g.vertex_count))
        rnd.shuffle(perm)
        h = g.relabel(perm)
        a = sorted(canonical_form(contract(g, s)) for s in admissible_subgraphs(g))
        b = sorted(canonical_form(contract(h, s)) for s in admissible_subgraphs(h))
        assert a == b
