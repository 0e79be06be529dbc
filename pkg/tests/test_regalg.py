import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import sympy_terms, to_sympy
from renorm.regalg import (
    RegElement,
    differentiate_y,
    differentiate_z,
    evaluate,
    in_minus,
    in_plus,
    pi_minus,
    pi_plus,
    split,
)
from renorm.samples import random_element

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def elements(draw, max_pole=3, max_y=3, order=6):
    terms = draw(
        st.dictionaries(
            st.tuples(st.integers(-max_pole, order), st.integers(0, max_y)), fractions, max_size=8
        )
    )
    exact = draw(st.booleans())
    return RegElement(terms, None if exact else order)


def E(terms, order=None):
    return RegElement(terms, order)


def test_products():
    zinv = E({(-1, 0): 1})
    assert zinv * E({(1, 0): 1}) == RegElement.one()
    x = E({(-1, 0): 1, (0, 1): 1})
    assert (x * x).terms == {(-2, 0): 1, (-1, 1): 2, (0, 2): 1}


def test_truncation_order_of_product():
    a = E({(-2, 0): 1, (0, 0): 1}, 6)
    b = E({(-2, 0): 3, (1, 1): 1}, 6)
    assert (a * b).order == 4


def test_pi_minus_examples():
    x = E({(-2, 0): 3, (0, 2): 5, (0, 0): 7, (1, 1): 2})
    assert pi_minus(x) == E({(-2, 0): 3, (0, 2): 5})
    assert pi_minus(RegElement.one()).is_zero()
    assert pi_minus(E({(1, 3): 1})).is_zero()


def test_split_examples():
    s = split(E({(-1, 0): 1, (0, 0): 4, (1, 0): 1}))
    assert s.minus_part == E({(-1, 0): 1}) and s.plus_part == E({(0, 0): 4, (1, 0): 1})
    s = split(RegElement.y())
    assert s.minus_part == RegElement.y() and s.plus_part.is_zero()
    s = split(RegElement.zero())
    assert s.minus_part.is_zero() and s.plus_part.is_zero()


def test_derivatives():
    assert differentiate_z(E({(-1, 0): 1})) == E({(-2, 0): -1})
    assert differentiate_y(E({(0, 3): 1})) == E({(0, 2): 3})
    assert differentiate_y(E({(-1, 0): 1})).is_zero()
    assert differentiate_z(E({(0, 0): 1}, 6)).order == 5


def test_evaluate_examples():
    assert evaluate(RegElement.one(), Fraction(1, 3), 2) == 1
    assert evaluate(RegElement.y(), 1, 1) == 0
    assert evaluate(E({(-1, 0): 1, (0, 1): 1}), Fraction(1, 10), 1) == pytest.approx(10 + math.log(0.1))


def test_render_and_json():
    x = E({(-2, 0): 3, (0, 2): 5})
    assert str(x) == "3*z^-2 + 5*y^2"
    t = E({(0, 0): Fraction(1, 2)}, 4)
    assert RegElement.from_json(t.to_json()) == t
    assert RegElement.from_json(t.to_json()).order == 4
    assert RegElement.from_json({"terms": [{"z": -1, "y": 0, "c": "2/3"}], "z_order": 3}) == E({(-1, 0): Fraction(2, 3)}, 3)
    with pytest.raises(ValueError):
        RegElement.from_json([{"z": 0, "y": -1, "c": "1"}])


def test_equality_up_to_common_order():
    assert E({(0, 0): 1, (5, 0): 2}, 6) == E({(0, 0): 1}, 4)
    assert not E({(0, 0): 1, (3, 0): 2}, 6) == E({(0, 0): 1}, 4)


@given(elements(), elements())
def test_product_matches_sympy(a, b):
    prod = a * b
    expected = sympy_terms(to_sympy(a) * to_sympy(b), prod.order)
    assert prod.terms == expected


@given(elements(), elements())
def test_sum_matches_sympy(a, b):
    s = a + b
    assert s.terms == sympy_terms(to_sympy(a) + to_sympy(b), s.order)


@given(elements(), elements())
def test_rota_baxter_weight_one(x, y):
    px, py = pi_minus(x), pi_minus(y)
    assert px * py + pi_minus(x * y) == pi_minus(x * py) + pi_minus(px * y)


@given(elements())
def test_projection_properties(x):
    assert pi_minus(pi_minus(x)) == pi_minus(x)
    s = split(x)
    assert s.minus_part + s.plus_part == x
    assert in_minus(s.minus_part) and in_plus(s.plus_part)
    assert split(s.minus_part).plus_part.is_zero()


@given(elements(), elements())
def test_image_and_kernel_are_subalgebras(x, y):
    assert in_minus(pi_minus(x) * pi_minus(y))
    assert in_plus(pi_plus(x) * pi_plus(y))


@given(elements(max_y=0))
def test_restricts_to_pole_part_without_logs(x):
    expected = {k: c for k, c in x.terms.items() if k[0] < 0}
    assert pi_minus(x).terms == expected


def test_evaluation_is_multiplicative_up_to_tail():
    rng = random.Random(3)
    for _ in range(50):
        a = random_element(rng, max_pole=2, max_y=2, order=10, spread=3)
        b = random_element(rng, max_pole=2, max_y=2, order=10, spread=3)
        z0 = 0.05
        lhs = (a * b).evaluate(z0)
        rhs = a.evaluate(z0) * b.evaluate(z0)
        bound = (a * b).tail_estimate(z0) + 1e-9 * max(1.0, abs(rhs))
        # the dropped terms of the product sit beyond its order
        assert abs(lhs - rhs) <= max(bound, 1e-6 * max(1.0, abs(rhs)))
