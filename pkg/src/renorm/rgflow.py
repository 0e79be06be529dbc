"""Renormalization group actions, geometric beta functions and the inverse flow.

Time dependence is kept as exponential polynomials in ``s = log t``: a
:class:`FlowValue` is ``sum s^k e^{(a + b z) s} c_kab(z, y)``. The
dimensional-regularisation action ``t^{zY}`` only produces ``a = 0, b = grade``;
the cutoff action ``phi(tz, y + s)`` only produces ``b = 0, a = z-power``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, Mapping

from .characters import (
    CHARACTER,
    INFINITESIMAL,
    LinMap,
    convolution_inverse,
    convolve,
)
from .hopf import UNIT, Monomial, grade
from .regalg import DEFAULT_Z_ORDER, RegElement

DR = "dr"
MC = "mc"
SIGMAS = (DR, MC)

FlowKey = tuple[int, int, int]


class DivergentFlowIntegral(ArithmeticError):
    """The lower limit t -> 0 of a flow integral does not vanish."""


class NonLocalCharacterError(ValueError):
    def __init__(self, monomial: str, residue: RegElement):
        self.monomial = monomial
        self.residue = residue
        super().__init__(f"non-local character: singular part {residue} survives at {monomial}")


@dataclass(frozen=True)
class FlowTerm:
    k: int
    a: int
    b: int
    coeff: RegElement


class FlowValue:
    """Exponential polynomial in ``s`` with regulator-algebra coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[FlowKey, RegElement] | None = None):
        self._terms: dict[FlowKey, RegElement] = {}
        for key, c in (terms or {}).items():
            k, a, b = key
            if k < 0:
                raise ValueError("negative power of s")
            if key in self._terms:
                c = self._terms[key] + c
            self._terms[key] = c
        self._terms = {key: c for key, c in self._terms.items() if not (c.is_zero() and c.is_exact())}

    @classmethod
    def zero(cls) -> FlowValue:
        return cls()

    @classmethod
    def one(cls) -> FlowValue:
        return cls({(0, 0, 0): RegElement.one()})

    @classmethod
    def lift(cls, value: RegElement) -> FlowValue:
        return cls({(0, 0, 0): value})

    def terms(self) -> Iterator[FlowTerm]:
        for (k, a, b), c in sorted(self._terms.items()):
            yield FlowTerm(k, a, b, c)

    def keys(self) -> list[FlowKey]:
        return sorted(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def as_scalar(self) -> Fraction | None:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {(0, 0, 0)}:
            return self._terms[(0, 0, 0)].as_scalar()
        return None

    # -- ring ---------------------------------------------------------

    def __add__(self, other) -> FlowValue:
        other = _as_flow(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms[key] + c if key in terms else c
        return FlowValue(terms)

    __radd__ = __add__

    def __neg__(self) -> FlowValue:
        return FlowValue({key: -c for key, c in self._terms.items()})

    def __sub__(self, other) -> FlowValue:
        return self + (-_as_flow(other))

    def __mul__(self, other) -> FlowValue:
        if isinstance(other, (int, Fraction)):
            return FlowValue({key: c * other for key, c in self._terms.items()})
        other = _as_flow(other)
        terms: dict[FlowKey, RegElement] = {}
        for (k1, a1, b1), c1 in self._terms.items():
            for (k2, a2, b2), c2 in other._terms.items():
                key = (k1 + k2, a1 + a2, b1 + b2)
                prod = c1 * c2
                terms[key] = terms[key] + prod if key in terms else prod
        return FlowValue(terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            other = _as_flow(other)
        except TypeError:
            return NotImplemented
        keys = set(self._terms) | set(other._terms)
        zero = RegElement.zero()
        return all(self._terms.get(k, zero) == other._terms.get(k, zero) for k in keys)

    __hash__ = None  # type: ignore[assignment]

    # -- calculus -----------------------------------------------------

    def d_s(self) -> FlowValue:
        """Derivative in ``s``, i.e. ``t d/dt``."""
        terms: dict[FlowKey, RegElement] = {}
        for (k, a, b), c in self._terms.items():
            parts = []
            if k:
                parts.append(((k - 1, a, b), c * k))
            parts.append(((k, a, b), c * a + c * RegElement.z() * b))
            for key, v in parts:
                terms[key] = terms[key] + v if key in terms else v
        return FlowValue(terms)

    def d_z(self) -> FlowValue:
        terms: dict[FlowKey, RegElement] = {}
        for (k, a, b), c in self._terms.items():
            parts = [((k, a, b), c.d_z())]
            if b:
                parts.append(((k + 1, a, b), c * b))
            for key, v in parts:
                terms[key] = terms[key] + v if key in terms else v
        return FlowValue(terms)

    def d_y(self) -> FlowValue:
        return FlowValue({key: c.d_y() for key, c in self._terms.items()})

    # -- specialisation -----------------------------------------------

    def at_zero(self) -> RegElement:
        total = RegElement.zero()
        for (k, _, _), c in self._terms.items():
            if k == 0:
                total = total + c
        return total

    def at(self, s, order: int = DEFAULT_Z_ORDER) -> RegElement:
        """Exact value at rational ``s``; needs ``a = 0`` unless ``s = 0``.

        ``e^{b z s}`` is expanded to ``z^order``.
        """
        s = Fraction(s)
        if s == 0:
            return self.at_zero()
        total = RegElement.zero()
        for (k, a, b), c in self._terms.items():
            if a:
                raise ValueError("e^{a s} with a != 0 is irrational at rational s; use evaluate()")
            total = total + _exp_series(b * s, order) * c * s**k
        return total

    def shifted(self, s1, order: int = DEFAULT_Z_ORDER) -> FlowValue:
        """Substitute ``s -> s + s1`` for rational ``s1`` (``a = 0`` terms only)."""
        s1 = Fraction(s1)
        terms: dict[FlowKey, RegElement] = {}
        for (k, a, b), c in self._terms.items():
            if a and s1:
                raise ValueError("cannot shift e^{a s} by a rational amount exactly")
            factor = _exp_series(b * s1, order) * c
            for j in range(k + 1):
                key = (j, a, b)
                v = factor * (comb(k, j) * s1 ** (k - j))
                terms[key] = terms[key] + v if key in terms else v
        return FlowValue(terms)

    def evaluate(self, z0, m=1, s=0.0) -> float:
        """Numeric value on ``y = log(z0*m)`` at real ``s``."""
        z0, s = float(z0), float(s)
        return math.fsum(
            s**k * math.exp((a + b * z0) * s) * c.evaluate(z0, m) for (k, a, b), c in self._terms.items()
        )

    # -- text ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for t in self.terms():
            factors = []
            if t.k:
                factors.append("s" if t.k == 1 else f"s^{t.k}")
            if t.a or t.b:
                expo = _render_exponent(t.a, t.b)
                factors.append(f"e^{{{expo}}}")
            factors.append(f"({t.coeff})")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"FlowValue({self})"

    def to_json(self) -> list[dict]:
        return [{"k": t.k, "a": t.a, "b": t.b, "coeff": t.coeff.to_json()} for t in self.terms()]


def _render_exponent(a: int, b: int) -> str:
    parts = []
    if a:
        parts.append(f"{a}")
    if b:
        parts.append("z" if b == 1 else f"{b}z")
    return "(" + " + ".join(parts) + ")s"


def _as_flow(x) -> FlowValue:
    if isinstance(x, FlowValue):
        return x
    if isinstance(x, RegElement):
        return FlowValue.lift(x)
    if isinstance(x, (int, Fraction)):
        return FlowValue.lift(RegElement.constant(x))
    raise TypeError(f"cannot use {type(x).__name__} as a flow value")


def _exp_series(c: Fraction, order: int) -> RegElement:
    """``e^{c z}`` truncated after ``z^order``."""
    if not c:
        return RegElement.one()
    return RegElement({(n, 0): c**n / factorial(n) for n in range(order + 1)}, order)


class FlowMap(LinMap):
    """Linear map whose values are :class:`FlowValue` (a one-parameter family)."""

    def __init__(self, algebra, values=None, kind=CHARACTER, ring=FlowValue):
        super().__init__(algebra, values, kind, FlowValue)

    @classmethod
    def lift(cls, f: LinMap) -> FlowMap:
        if isinstance(f, FlowMap):
            return f
        return cls(f.algebra, {m: FlowValue.lift(v) for m, v in f.items()}, f.kind)

    def at_zero(self) -> LinMap:
        return LinMap(self.algebra, {m: v.at_zero() for m, v in self.items()}, self.kind)

    def at(self, s, order: int = DEFAULT_Z_ORDER) -> LinMap:
        return LinMap(self.algebra, {m: v.at(s, order) for m, v in self.items()}, self.kind)

    def shifted(self, s1, order: int = DEFAULT_Z_ORDER) -> FlowMap:
        return self.map_values(lambda m, v: v.shifted(s1, order), self.kind)

    def d_s(self) -> FlowMap:
        return self.map_values(lambda m, v: v.d_s())

    def d_z(self) -> FlowMap:
        return self.map_values(lambda m, v: v.d_z())

    def d_y(self) -> FlowMap:
        return self.map_values(lambda m, v: v.d_y())

    def evaluate(self, m: Monomial, z0, mass=1, s=0.0) -> float:
        return self.value(m).evaluate(z0, mass, s)


# ---------------------------------------------------------------------------
# actions


def _dr_value(m: Monomial, v) -> FlowValue:
    n = grade(m)
    if isinstance(v, FlowValue):
        return FlowValue({(k, a, b + n): c for (k, a, b), c in v._terms.items()})
    return FlowValue({(0, 0, n): v})


def _mc_value(v: RegElement) -> FlowValue:
    terms: dict[FlowKey, RegElement] = {}
    for (i, j), c in v.items():
        for k in range(j + 1):
            key = (k, i, 0)
            piece = RegElement({(i, j - k): c * comb(j, k)}, v.order)
            terms[key] = terms[key] + piece if key in terms else piece
    return FlowValue(terms)


def act_dr(phi: LinMap) -> FlowMap:
    """``t^{zY} phi``: a grade-n monomial picks up ``e^{n z s}``."""
    return FlowMap(phi.algebra, {m: _dr_value(m, v) for m, v in phi.items()}, phi.kind)


def act_mc(phi: LinMap) -> FlowMap:
    """``phi(t z, y + s)``: each ``z^i y^j`` becomes ``e^{i s} z^i (y + s)^j``."""
    if isinstance(phi, FlowMap):
        raise TypeError("act_mc expects a map with regulator-algebra values")
    return FlowMap(phi.algebra, {m: _mc_value(v) for m, v in phi.items()}, phi.kind)


def act(phi: LinMap, sigma: str) -> FlowMap:
    if sigma == DR:
        return act_dr(phi)
    if sigma == MC:
        return act_mc(phi)
    raise ValueError(f"unknown renormalization group action {sigma!r}; expected 'dr' or 'mc'")


# ---------------------------------------------------------------------------
# beta functions


def generator_dr(phi: LinMap) -> LinMap:
    """``z Y phi``: the s-derivative of ``t^{zY} phi`` at ``s = 0``."""
    z = RegElement.z()
    return phi.map_values(lambda m, v: v * z * grade(m))


def generator_mc(phi: LinMap) -> LinMap:
    """``(z d/dz + d/dy) phi``: the s-derivative of ``phi(tz, y + s)`` at ``s = 0``."""
    z = RegElement.z()
    return phi.map_values(lambda m, v: z * v.d_z() + v.d_y())


def generator(phi: LinMap, sigma: str) -> LinMap:
    if sigma == DR:
        return generator_dr(phi)
    if sigma == MC:
        return generator_mc(phi)
    raise ValueError(f"unknown renormalization group action {sigma!r}")


def beta_dr(phi: LinMap) -> LinMap:
    out = convolve(convolution_inverse(phi), generator_dr(phi))
    out.kind = INFINITESIMAL
    return out


def beta_mc(phi: LinMap) -> LinMap:
    out = convolve(convolution_inverse(phi), generator_mc(phi))
    out.kind = INFINITESIMAL
    return out


def beta(phi: LinMap, sigma: str) -> LinMap:
    if sigma == DR:
        return beta_dr(phi)
    if sigma == MC:
        return beta_mc(phi)
    raise ValueError(f"unknown renormalization group action {sigma!r}")


def beta_from_flow(phi: LinMap, sigma: str) -> LinMap:
    """``[sigma_t(phi)^{-1} * t d/dt sigma_t(phi)]`` at ``t = 1``, through the flow."""
    flowed = act(phi, sigma)
    out = convolve(convolution_inverse(flowed), flowed.d_s()).at_zero()
    out.kind = INFINITESIMAL
    return out


def limit_z0(alpha: LinMap) -> LinMap:
    """Constant terms of ``alpha`` once no pole or pure-log term remains.

    Terms ``z^i y^j`` with ``i > 0`` vanish at ``z = 0`` and are dropped.
    """
    H = alpha.algebra
    values = {}
    for m, v in alpha.items():
        singular = RegElement({k: c for k, c in v.terms.items() if k[0] < 0 or (k[0] == 0 and k[1] > 0)})
        if not singular.is_zero():
            raise NonLocalCharacterError(H.render_monomial(m), singular)
        values[m] = RegElement.constant(v.coefficient(0, 0)) if v.order is None or v.order >= 0 else v
    return LinMap(H, values, alpha.kind)


# ---------------------------------------------------------------------------
# inverse flow


def _inverse_power(a: int, b: int, power: int, order: int) -> RegElement:
    """``(a + b z)^{-power}`` as a series in ``z``."""
    if a == 0:
        return RegElement({(-power, 0): Fraction(1, b) ** power})
    lead = Fraction(1, a) ** power
    ratio = Fraction(b, a)
    if ratio == 0:
        return RegElement.constant(lead)
    # (1 + r z)^{-p} = sum_n C(-p, n) r^n z^n
    coeffs = {}
    binom = Fraction(1)
    for n in range(order + 1):
        coeffs[(n, 0)] = lead * binom * ratio**n
        binom = binom * (-power - n) / (n + 1)
    return RegElement(coeffs, order)


def flow_integrate(term: FlowTerm, order: int = DEFAULT_Z_ORDER) -> FlowValue:
    """``int_{-inf}^{s} s'^k e^{(a + b z) s'} coeff ds'`` with a formally vanishing lower limit.

    Uses ``e^{cs} sum_j (-1)^{k-j} (k!/j!) s^j / c^{k-j+1}``, ``c = a + b z``.
    """
    k, a, b = term.k, term.a, term.b
    if a < 0 or (a == 0 and b == 0):
        raise DivergentFlowIntegral(
            f"divergent flow integral for s^{k} e^{{{_render_exponent(a, b) if (a or b) else '0'}}}"
        )
    terms: dict[FlowKey, RegElement] = {}
    for j in range(k + 1):
        power = k - j + 1
        c = Fraction((-1) ** (k - j) * factorial(k), factorial(j))
        terms[(j, a, b)] = _inverse_power(a, b, power, order) * term.coeff * c
    return FlowValue(terms)


def rho(alpha: LinMap, sigma: str, order: int = DEFAULT_Z_ORDER) -> FlowMap:
    """Solve ``t d/dt psi = psi * alpha_sigma(t)`` with ``psi(1) = 1`` grade by grade.

    ``alpha_sigma(t)`` is the action ``sigma_t`` applied to alpha's values.
    Evaluate the result at ``s = 0`` to get the character with beta function
    ``alpha``.
    """
    H = alpha.algebra
    a_flow = act(alpha, sigma)
    av = {m: v for m, v in a_flow.items()}
    psi: dict[Monomial, FlowValue] = {UNIT: FlowValue.one()}
    for m in H.basis:
        if m == UNIT:
            continue
        integrand = FlowValue.zero()
        for (x1, x2), c in H.coproduct_terms(m):
            if x1 == m or x1 not in psi or x2 not in av:
                continue
            integrand = integrand + psi[x1] * av[x2] * c
        total = FlowValue.zero()
        for t in integrand.terms():
            try:
                total = total + flow_integrate(t, order)
            except DivergentFlowIntegral as exc:
                raise DivergentFlowIntegral(f"{exc} at monomial {H.render_monomial(m)}") from None
        psi[m] = total
    return FlowMap(H, psi, CHARACTER)
