"""Logarithmic-derivative connection, the operator D and the gauge identities.

``d`` is handled one direction at a time: ``z``, ``y`` and the flow
direction of an action (``t d/dt``). Any of these is a derivation of the
value ring that commutes with the coproduct, which is all the identities
below need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import INFINITESIMAL, LinMap, convolution_inverse, convolve
from .hopf import UNIT, grade
from .regalg import RegElement
from .rgflow import DR, MC, FlowMap, act, generator

DIRECTIONS = ("z", "y", "t_dr", "t_mc")


@dataclass
class ConnectionForm:
    """Components of ``(sigma_t phi)^{-1} * d(sigma_t phi)`` along ``dz``, ``dy`` and ``dt/t``."""

    a_coeff: FlowMap
    b_coeff: FlowMap
    c_coeff: FlowMap
    sigma: str

    def components(self) -> dict[str, FlowMap]:
        return {"a": self.a_coeff, "b": self.b_coeff, "c": self.c_coeff}


def _infinitesimal(f: LinMap) -> LinMap:
    f.kind = INFINITESIMAL
    return f


def connection_of(phi: LinMap, sigma: str) -> ConnectionForm:
    """The three components for the flow ``sigma_t phi``.

    The third one is taken against ``ds = dt/t``, so at ``s = 0`` it is the
    beta function of ``phi``.
    """
    flowed = act(phi, sigma)
    inv = convolution_inverse(flowed)
    return ConnectionForm(
        _infinitesimal(convolve(inv, flowed.d_z())),
        _infinitesimal(convolve(inv, flowed.d_y())),
        _infinitesimal(convolve(inv, flowed.d_s())),
        sigma,
    )


def partial(f: LinMap, direction: str) -> LinMap:
    """Directional derivative of the values of ``f``."""
    if direction == "z":
        return f.map_values(lambda m, v: v.d_z())
    if direction == "y":
        return f.map_values(lambda m, v: v.d_y())
    if direction in ("t_dr", "t_mc"):
        if isinstance(f, FlowMap):
            raise TypeError("flow direction derivatives take a map with regulator-algebra values")
        return generator(f, DR if direction == "t_dr" else MC)
    raise ValueError(f"unknown direction {direction!r}; expected one of {', '.join(DIRECTIONS)}")


def log_derivative_D(f: LinMap, direction: str) -> LinMap:
    """``f^{-1} * df`` in one direction; infinitesimal when ``f`` is a character."""
    return _infinitesimal(convolve(convolution_inverse(f), partial(f, direction)))


# ---------------------------------------------------------------------------
# gauge identities

PULLBACK = "pullback"
PRODUCT = "product"


@dataclass
class GaugeEntry:
    identity: str
    direction: str
    monomial: str
    lhs: RegElement
    rhs: RegElement
    equal: bool

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "direction": self.direction,
            "monomial": self.monomial,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "equal": self.equal,
        }


@dataclass
class GaugeReport:
    entries: list[GaugeEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.equal for e in self.entries)

    def failures(self) -> list[GaugeEntry]:
        return [e for e in self.entries if not e.equal]

    def max_discrepancy(self) -> Fraction:
        """Largest absolute coefficient of ``lhs - rhs`` over all entries."""
        worst = Fraction(0)
        for e in self.entries:
            for _, c in (e.lhs - e.rhs).items():
                worst = max(worst, abs(c))
        return worst

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def _compare(report: GaugeReport, identity: str, direction: str, lhs: LinMap, rhs: LinMap):
    H = lhs.algebra
    for m in H.basis:
        if m == UNIT:
            continue
        left, right = lhs.value(m), rhs.value(m)
        report.entries.append(GaugeEntry(identity, direction, H.render_monomial(m), left, right, left == right))


def gauge_check(f: LinMap, g: LinMap, directions=DIRECTIONS) -> GaugeReport:
    """Check, per direction and basis monomial, the two gauge identities

    * pullback: ``D(g) = D(h) + h^{-1} * D(f) * h`` with ``h = f^{-1} * g``;
    * product:  ``D(f * g) = D(g) + g^{-1} * D(f) * g``.
    """
    report = GaugeReport()
    h = convolve(convolution_inverse(f), g)
    h_inv = convolution_inverse(h)
    g_inv = convolution_inverse(g)
    fg = convolve(f, g)
    for direction in directions:
        Df = log_derivative_D(f, direction)
        Dg = log_derivative_D(g, direction)
        rhs = log_derivative_D(h, direction) + convolve(convolve(h_inv, Df), h)
        _compare(report, PULLBACK, direction, Dg, rhs)
        rhs = Dg + convolve(convolve(g_inv, Df), g)
        _compare(report, PRODUCT, direction, log_derivative_D(fg, direction), rhs)
    return report


# ---------------------------------------------------------------------------
# equivariance


@dataclass
class EquivarianceEntry:
    check: str
    monomial: str
    detail: str
    passed: bool


@dataclass
class EquivarianceReport:
    sigma: str
    u: Fraction
    tolerance: float
    entries: list[EquivarianceEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def render(self) -> str:
        lines = [f"equivariance sigma={self.sigma} u={self.u} (numeric tolerance {self.tolerance:g})"]
        for e in self.entries:
            lines.append(f"{'PASS' if e.passed else 'FAIL'} {e.check} {e.monomial}: {e.detail}")
        return "\n".join(lines)


def equivariance_check(
    phi: LinMap,
    sigma: str,
    u,
    z0=Fraction(1, 10),
    m=1,
    s_points=(Fraction(0), Fraction(1, 2), Fraction(1)),
    tolerance: float = 1e-9,
) -> EquivarianceReport:
    """Check ``c(z, y, tu) = sigma_u(c(z, y, t))`` for the flow component ``c``.

    For ``dr`` the structure is checked exactly (every term of ``c(x)`` is
    ``e^{grade(x) z s}`` times an s-free coefficient) and both sides are
    compared numerically; for ``mc`` only numerically, with
    ``sigma_u`` realised as ``z0 -> u z0`` on the locus ``y = log(z0 m)``.
    Only ``u > 0`` is supported since ``log u`` must be real.
    """
    u = Fraction(u)
    if u <= 0:
        raise ValueError("equivariance is checked for u > 0 only")
    if sigma not in (DR, MC):
        raise ValueError(f"unknown renormalization group action {sigma!r}")
    c = connection_of(phi, sigma).c_coeff
    H = phi.algebra
    report = EquivarianceReport(sigma, u, tolerance)
    log_u = math.log(u)
    z0f = float(z0)
    for mono, value in c.items():
        name = H.render_monomial(mono)
        if sigma == DR:
            n = grade(mono)
            bad = [key for key in value.keys() if key != (0, 0, n)]
            detail = "all terms e^{%dzs}" % n if not bad else f"unexpected (k, a, b) terms {bad}"
            report.entries.append(EquivarianceEntry("structure", name, detail, not bad))
        for s in s_points:
            lhs = value.evaluate(z0f, m, float(s) + log_u)
            if sigma == DR:
                rhs = math.exp(grade(mono) * z0f * log_u) * value.evaluate(z0f, m, float(s))
            else:
                rhs = value.evaluate(float(u) * z0f, m, float(s))
            err = abs(lhs - rhs)
            ok = err <= tolerance * max(1.0, abs(lhs), abs(rhs))
            report.entries.append(
                EquivarianceEntry("numeric", name, f"s={s}: {lhs:.12g} vs {rhs:.12g}", ok)
            )
    return report
