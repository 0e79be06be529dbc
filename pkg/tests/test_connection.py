import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from renorm.characters import character_from_generators, is_infinitesimal, unit_character
from renorm.connection import (
    DIRECTIONS,
    connection_of,
    equivariance_check,
    gauge_check,
    log_derivative_D,
)
from renorm.hopf import HopfAlgebra
from renorm.regalg import RegElement
from renorm.rgflow import beta_dr, beta_mc
from renorm.samples import random_character
from renorm.toyrules import toy_pair


def character(H, **named):
    vals = {k: RegElement.zero() for k in H.generators}
    for name, v in named.items():
        vals[H.key(name)] = v
    return character_from_generators(H, vals)


def test_connection_examples(H2):
    a = Fraction(5)
    phi = character(H2, B1=RegElement.z(-1) * a)
    form = connection_of(phi, "dr")
    b1 = H2.mono("B1")
    assert form.c_coeff.at_zero().value(b1) == RegElement.constant(a)
    assert form.a_coeff.at_zero().value(b1) == RegElement.z(-2) * (-a)
    for comp in connection_of(unit_character(H2), "mc").components().values():
        assert comp.support() == []


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_flow_component_is_beta(seed):
    H = HopfAlgebra.builtin(2)
    phi = random_character(H, random.Random(seed), with_y=True)
    assert connection_of(phi, "dr").c_coeff.at_zero() == beta_dr(phi)
    assert connection_of(phi, "mc").c_coeff.at_zero() == beta_mc(phi)
    for comp in connection_of(phi, "mc").components().values():
        assert is_infinitesimal(comp.at_zero())


def test_D_examples(H2):
    assert log_derivative_D(unit_character(H2), "z").support() == []
    phi = character(H2, B1=RegElement.z(-1) * 3)
    assert log_derivative_D(phi, "z").value(H2.mono("B1")) == RegElement.z(-2) * -3
    assert log_derivative_D(phi, "y").support() == []
    with pytest.raises(ValueError):
        log_derivative_D(phi, "w")


def test_gauge_unit_reduces_to_D(H2):
    g = random_character(H2, random.Random(1), with_y=True)
    report = gauge_check(unit_character(H2), g)
    assert report.passed and report.max_discrepancy() == 0
    for e in report.entries:
        assert e.lhs == log_derivative_D(g, e.direction).value(H2.mono(*e.monomial.split(".")))


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_gauge_identities_random(seed):
    H = HopfAlgebra.builtin(2)
    rng = random.Random(seed)
    f = random_character(H, rng, with_y=True)
    g = f if rng.random() < 0.2 else random_character(H, rng, with_y=True)
    report = gauge_check(f, g)
    assert report.passed
    assert {e.direction for e in report.entries} == set(DIRECTIONS)


def test_gauge_toy_pair():
    dr, mc = toy_pair()
    report = gauge_check(dr, mc)
    assert report.passed and report.max_discrepancy() == 0
    assert {e.identity for e in report.entries} == {"pullback", "product"}
    assert set(report.to_json()[0]) == {"identity", "direction", "monomial", "lhs", "rhs", "equal"}


def test_gauge_detects_a_broken_identity(H2, monkeypatch):
    import renorm.connection as conn

    f = random_character(H2, random.Random(2))
    g = random_character(H2, random.Random(3))
    real = conn.log_derivative_D
    calls = {"n": 0}

    def skewed(h, direction):
        calls["n"] += 1
        out = real(h, direction)
        return out.scale(2) if calls["n"] == 1 else out

    monkeypatch.setattr(conn, "log_derivative_D", skewed)
    report = conn.gauge_check(f, g, ["z"])
    assert not report.passed and report.max_discrepancy() > 0


@pytest.mark.parametrize("sigma", ["dr", "mc"])
@pytest.mark.parametrize("u", [Fraction(1), Fraction(2), Fraction(3), Fraction(1, 5)])
def test_equivariance(sigma, u):
    dr, mc = toy_pair()
    for phi in (dr, mc, random_character(dr.algebra, random.Random(7), with_y=True)):
        report = equivariance_check(phi, sigma, u)
        assert report.passed, report.render()
    if sigma == "dr":
        assert any(e.check == "structure" for e in report.entries)


def test_equivariance_needs_positive_u(H2):
    with pytest.raises(ValueError):
        equivariance_check(unit_character(H2), "dr", -1)
