"""Linear maps from the Hopf algebra into a commutative value ring.

A :class:`LinMap` stores one value per basis monomial (up to the grade cap);
missing entries are zero. The value ring is :class:`~renorm.regalg.RegElement`
for ordinary characters and ``FlowValue`` for time-dependent ones; anything
with ``zero()``, ``one()``, ``+``, ``-``, ``*``, ``is_zero()`` and
``as_scalar()`` works.
"""
from __future__ import annotations

from typing import Callable, Iterator, Mapping

from .graphs import CanonicalKey
from .hopf import UNIT, HopfAlgebra, HopfElement, Monomial, UnknownGeneratorError, grade
from .regalg import RegElement

CHARACTER = "character"
INFINITESIMAL = "infinitesimal"
GENERAL = "general"


class MissingGeneratorError(KeyError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"no value for generator(s): {', '.join(self.names)}")


class GradeCapMismatch(ValueError):
    pass


class LinMap:
    def __init__(
        self,
        algebra: HopfAlgebra,
        values: Mapping[Monomial, object] | None = None,
        kind: str = GENERAL,
        ring=RegElement,
    ):
        self.algebra = algebra
        self.ring = ring
        self.kind = kind
        self._values: dict[Monomial, object] = {}
        for m, v in (values or {}).items():
            if not algebra.in_basis(m):
                raise UnknownGeneratorError(f"{algebra.render_monomial(m)} is not a basis monomial")
            if not v.is_zero():
                self._values[m] = v

    @property
    def grade_cap(self) -> int:
        return self.algebra.grade_cap

    def value(self, m: Monomial):
        v = self._values.get(m)
        return self.ring.zero() if v is None else v

    def __call__(self, x: Monomial | HopfElement):
        if isinstance(x, HopfElement):
            total = self.ring.zero()
            for m, c in x.terms.items():
                total = total + self.value(m) * c
            return total
        return self.value(x)

    def items(self) -> Iterator[tuple[Monomial, object]]:
        """Nonzero values in basis order."""
        for m in self.algebra.basis:
            if m in self._values:
                yield m, self._values[m]

    def support(self) -> list[Monomial]:
        return [m for m, _ in self.items()]

    def _same_algebra(self, other: LinMap):
        if other.algebra is self.algebra:
            return
        if other.grade_cap != self.grade_cap:
            raise GradeCapMismatch(f"grade caps differ ({self.grade_cap} vs {other.grade_cap})")
        if other.algebra.generators != self.algebra.generators:
            raise ValueError("maps are defined on different Hopf algebras")

    def _new(self, values, kind=GENERAL) -> LinMap:
        return type(self)(self.algebra, values, kind, self.ring)

    def map_values(self, fn: Callable[[Monomial, object], object], kind=GENERAL) -> LinMap:
        return self._new({m: fn(m, v) for m, v in self._values.items()}, kind)

    def __add__(self, other: LinMap) -> LinMap:
        self._same_algebra(other)
        values = dict(self._values)
        for m, v in other._values.items():
            values[m] = values[m] + v if m in values else v
        return self._new(values)

    def __neg__(self) -> LinMap:
        return self.map_values(lambda m, v: -v, self.kind if self.kind == INFINITESIMAL else GENERAL)

    def __sub__(self, other: LinMap) -> LinMap:
        return self + (-other)

    def scale(self, c) -> LinMap:
        return self.map_values(lambda m, v: v * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinMap):
            return NotImplemented
        return not self.mismatches(other)

    __hash__ = None  # type: ignore[assignment]

    def mismatches(self, other: LinMap) -> list[Monomial]:
        """Basis monomials on which the two maps disagree."""
        self._same_algebra(other)
        keys = set(self._values) | set(other._values)
        return [m for m in self.algebra.basis if m in keys and not self.value(m) == other.value(m)]

    def convolve(self, other: LinMap) -> LinMap:
        return convolve(self, other)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.kind} on {len(self.algebra.generators)} generators, cap {self.grade_cap}>"

    def render(self) -> str:
        lines = []
        for m, v in self.items():
            lines.append(f"{self.algebra.render_monomial(m)}: {v}")
        return "\n".join(lines) if lines else "0"


# ---------------------------------------------------------------------------
# construction


def character_from_generators(algebra: HopfAlgebra, assignments: Mapping, ring=RegElement) -> LinMap:
    """Multiplicative extension of generator values; ``value(1) = 1``.

    ``assignments`` maps generator names or canonical keys to values. Every
    generator of the algebra needs a value.
    """
    by_key: dict[CanonicalKey, object] = {}
    for k, v in assignments.items():
        key = algebra.key(k)
        by_key[key] = v
    missing = [algebra.name(k) for k in algebra.generators if k not in by_key]
    if missing:
        raise MissingGeneratorError(missing)
    values: dict[Monomial, object] = {UNIT: ring.one()}
    for m in algebra.basis:
        if m == UNIT:
            continue
        v = by_key[m[0]]
        for key in m[1:]:
            v = v * by_key[key]
        values[m] = v
    return LinMap(algebra, values, CHARACTER, ring)


def unit_character(algebra: HopfAlgebra, ring=RegElement) -> LinMap:
    """``e = eta o epsilon``: 1 on the unit, 0 on the augmentation ideal."""
    return LinMap(algebra, {UNIT: ring.one()}, CHARACTER, ring)


def delta(algebra: HopfAlgebra, name, ring=RegElement) -> LinMap:
    """The infinitesimal character dual to one generator."""
    return LinMap(algebra, {(algebra.key(name),): ring.one()}, INFINITESIMAL, ring)


def infinitesimal_from_generators(algebra: HopfAlgebra, assignments: Mapping, ring=RegElement) -> LinMap:
    values = {(algebra.key(k),): v for k, v in assignments.items()}
    return LinMap(algebra, values, INFINITESIMAL, ring)


# ---------------------------------------------------------------------------
# convolution


def convolve(f: LinMap, g: LinMap) -> LinMap:
    """``(f * g)(x) = sum f(x') g(x'')`` over the full Sweedler sum."""
    f._same_algebra(g)
    if f.ring is not g.ring:
        raise TypeError("cannot convolve maps with different value rings")
    fv, gv = f._values, g._values
    values = {}
    for m in f.algebra.basis:
        total = None
        for (a, b), c in f.algebra.coproduct_terms(m):
            if a in fv and b in gv:
                term = fv[a] * gv[b]
                if c != 1:
                    term = term * c
                total = term if total is None else total + term
        if total is not None:
            values[m] = total
    kind = CHARACTER if f.kind == g.kind == CHARACTER else GENERAL
    return type(f)(f.algebra, values, kind, f.ring)


def convolution_inverse(f: LinMap) -> LinMap:
    """Solve ``f^-1 * f = e`` grade by grade.

    ``f(1)`` must be a nonzero constant.
    """
    c = f.value(UNIT).as_scalar()
    if not c:
        raise ZeroDivisionError("convolution inverse needs f(1) to be a nonzero constant")
    inv_c = 1 / c
    fv = f._values
    values: dict[Monomial, object] = {UNIT: f.ring.one() * inv_c}
    for m in f.algebra.basis:
        if m == UNIT:
            continue
        total = None
        for (a, b), coeff in f.algebra.coproduct_terms(m):
            if a == m or a not in values or b not in fv:
                continue
            term = values[a] * fv[b] * coeff
            total = term if total is None else total + term
        if total is not None:
            values[m] = -(total * inv_c)
    return type(f)(f.algebra, values, f.kind if f.kind == CHARACTER else GENERAL, f.ring)


def compose_antipode(f: LinMap) -> LinMap:
    """``f o S``; equals the convolution inverse when ``f`` is a character."""
    H = f.algebra
    values = {}
    for m in H.basis:
        v = f(H.antipode(m))
        if not v.is_zero():
            values[m] = v
    return type(f)(H, values, f.kind, f.ring)


def lie_bracket(f: LinMap, g: LinMap) -> LinMap:
    for name, h in (("first", f), ("second", g)):
        if not is_infinitesimal(h):
            raise ValueError(f"{name} argument of the Lie bracket is not infinitesimal")
    out = convolve(f, g) - convolve(g, f)
    out.kind = INFINITESIMAL
    return out


def grading_map(f: LinMap) -> LinMap:
    """``Y f``: scale each value by the grade of its monomial."""
    return f.map_values(lambda m, v: v * grade(m), f.kind if f.kind == INFINITESIMAL else GENERAL)


# ---------------------------------------------------------------------------
# predicates


def _basis_pairs(algebra: HopfAlgebra):
    cap = algebra.grade_cap
    basis = algebra.basis
    for i, a in enumerate(basis):
        ga = grade(a)
        for b in basis[i:]:
            if ga + grade(b) > cap:
                break
            yield a, b, tuple(sorted(a + b))


def character_defects(f: LinMap) -> list[tuple[Monomial, Monomial]]:
    bad = []
    if not f.value(UNIT) == f.ring.one():
        bad.append((UNIT, UNIT))
    for a, b, ab in _basis_pairs(f.algebra):
        if not f.value(ab) == f.value(a) * f.value(b):
            bad.append((a, b))
    return bad


def infinitesimal_defects(f: LinMap) -> list[tuple[Monomial, Monomial]]:
    H = f.algebra
    bad = []
    for a, b, ab in _basis_pairs(H):
        expected = f.value(b) * H.counit(a) + f.value(a) * H.counit(b)
        if not f.value(ab) == expected:
            bad.append((a, b))
    return bad


def is_character(f: LinMap) -> bool:
    return not character_defects(f)


def is_infinitesimal(f: LinMap) -> bool:
    return not infinitesimal_defects(f)
