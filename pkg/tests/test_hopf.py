import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import brute_admissible, brute_contract, plain_isomorphic
from renorm.hopf import (
    UNIT,
    GeneratorRegistry,
    HopfAlgebra,
    HopfElement,
    TensorElement,
    UnknownGeneratorError,
    antipode_defect,
    builtin_registry,
    coassociativity_defect,
    counit_defect,
    grade,
)


def test_coproduct_examples(H2):
    assert H2.render_tensor(H2.coproduct(H2.element("B2"))) == "1⊗B2 + B2⊗1 + 2*(B1⊗B1)"
    assert H2.render_tensor(H2.coproduct(H2.element("S"))) == "1⊗S + S⊗1 + 3*(B1⊗T1)"
    assert H2.coproduct(HopfElement.unit()) == TensorElement({(UNIT, UNIT): 1})


def test_counit_examples(H2):
    assert H2.counit(HopfElement.unit()) == 1
    assert H2.counit(H2.element("B1")) == 0
    assert H2.counit(HopfElement.unit() * 3 + H2.element("B2") * 5) == 3


def test_antipode_examples(H2):
    assert H2.antipode(H2.element("B1")) == -H2.element("B1")
    assert H2.render(H2.antipode(H2.element("B2"))) == "2*B1.B1 - B2"
    assert H2.render(H2.antipode(H2.element("S"))) == "3*T1.B1 - S"
    assert H2.antipode(H2.element("S")) == H2.element("B1", "T1") * 3 - H2.element("S")


def test_grading_operator(H2):
    assert H2.grading_operator(HopfElement.unit()) == HopfElement()
    assert H2.grading_operator(H2.element("B2")) == H2.element("B2") * 2
    assert H2.grading_operator(H2.element("B1", "B1")) == H2.element("B1", "B1") * 2


def test_basis_size(H3):
    assert len(H3.generators) == 40
    assert len(H3.basis) == 251


def test_axioms_on_every_basis_monomial(H3):
    for m in H3.basis:
        assert not coassociativity_defect(H3, m)
        left, right = counit_defect(H3, m)
        assert not left.terms and not right.terms
        left, right = antipode_defect(H3, m)
        assert not left.terms and not right.terms


def test_grading_compatibility(H3):
    for m in H3.basis:
        for (a, b), _ in H3.coproduct_terms(m):
            assert grade(a) + grade(b) == grade(m)


def test_coproduct_matches_brute_force(H3):
    """Rebuild Delta on every generator from edge subsets and networkx isomorphism."""
    reg = H3.registry
    graphs = {k: reg.graph(k) for k in H3.generators}

    def identify(piece):
        hits = [k for k, g in graphs.items() if plain_isomorphic(piece, (g.vertex_count, g.edges, g.external))]
        assert len(hits) == 1
        return hits[0]

    for key, g in graphs.items():
        expected = Counter({((), (key,)): 1, ((key,), ()): 1})
        for subset in brute_admissible(g):
            pieces, quotient = brute_contract(g, subset)
            left = tuple(sorted(identify(p) for p in pieces))
            expected[(left, (identify(quotient),))] += 1
        got = {k: c for k, c in H3.coproduct_terms((key,))}
        assert got == {k: Fraction(v) for k, v in expected.items()}, g.name


@st.composite
def pairs(draw):
    H = HopfAlgebra.builtin(3)
    gens = [k for k in H.generators if grade((k,)) == 1]
    a = draw(st.lists(st.sampled_from(gens), min_size=0, max_size=2))
    rest = [k for k in H.generators if grade((k,)) <= 3 - len(a)]
    b = draw(st.lists(st.sampled_from(rest), min_size=0, max_size=1))
    return H, tuple(sorted(a)), tuple(sorted(b))


@given(pairs())
def test_coproduct_and_antipode_are_multiplicative(data):
    H, a, b = data
    ab = HopfElement.of(a) * HopfElement.of(b)
    assert H.coproduct(ab) == H.coproduct(a) * H.coproduct(b)
    assert H.antipode(ab) == H.antipode(a) * H.antipode(b)


def test_unknown_generator(H2):
    with pytest.raises(UnknownGeneratorError):
        H2.element("nope")


def test_generator_above_cap_rejected():
    with pytest.raises(ValueError):
        HopfAlgebra(["B2"], 1)


def test_truncation_is_flagged(H2):
    prod = H2.multiply(H2.element("B2"), H2.element("B1"))
    assert prod.truncated and not prod.terms


def test_registry_aliases_and_conflicts():
    reg = builtin_registry(2)
    b1 = reg.key("B1")
    from renorm.corpus import B1

    assert reg.register(B1.relabel([1, 0]), "fish") == b1
    assert reg.key("fish") == b1 and reg.name(b1) == "B1"
    with pytest.raises(ValueError, match="already used"):
        reg.register(reg.key("T1"), "B1x") and reg.register(reg.key("S"), "B1")


def test_registry_is_thread_safe():
    import threading

    reg = GeneratorRegistry()
    H = HopfAlgebra.builtin(3)
    keys = list(H.generators)
    threads = [threading.Thread(target=lambda: [reg.register(k) for k in keys]) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(reg.names()) == len(keys)
