"""The regulator algebra: truncated Laurent series in ``z`` with polynomial ``y``.

An element is a finite sum ``sum a_ij z^i y^j`` with exact rational
coefficients. ``z`` is the regulator (inverse cutoff, or the dimension
shift) and ``y`` stands for ``log(z*m)``. The relation ``e^y = z*m`` is never
used to rewrite elements; it only enters through :meth:`RegElement.evaluate`
and through the coupled substitution of the cutoff flow.

Only ``z`` carries a truncation order ``Q``: coefficients with ``i > Q`` are
unknown, not zero. ``order=None`` marks an exact element.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, NamedTuple

DEFAULT_Z_ORDER = 6

Key = tuple[int, int]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact coefficient")


def _min_order(*orders: float) -> int | None:
    m = min(orders)
    return None if m == math.inf else int(m)


def _as_inf(order: int | None) -> float:
    return math.inf if order is None else order


class RegElement:
    """Element of the regulator algebra.

    Equality compares coefficients up to the smaller of the two truncation
    orders, which is the only meaningful comparison for truncated series.
    Instances are immutable and therefore unhashable by design (equality is
    not transitive across different truncation orders).
    """

    __slots__ = ("_terms", "_order")

    def __init__(self, terms: Mapping[Key, object] | None = None, order: int | None = None):
        clean: dict[Key, Fraction] = {}
        if terms:
            for (i, j), c in terms.items():
                i, j = int(i), int(j)
                if j < 0:
                    raise ValueError(f"negative y-power {j} in term z^{i} y^{j}")
                if order is not None and i > order:
                    continue
                c = as_fraction(c)
                if c:
                    clean[(i, j)] = clean.get((i, j), Fraction(0)) + c
                    if not clean[(i, j)]:
                        del clean[(i, j)]
        self._terms = clean
        self._order = None if order is None else int(order)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> RegElement:
        return cls()

    @classmethod
    def one(cls) -> RegElement:
        return cls({(0, 0): 1})

    @classmethod
    def constant(cls, c) -> RegElement:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int = 0, c=1, order: int | None = None) -> RegElement:
        return cls({(i, j): c}, order)

    @classmethod
    def z(cls, power: int = 1) -> RegElement:
        return cls({(power, 0): 1})

    @classmethod
    def y(cls, power: int = 1) -> RegElement:
        return cls({(0, power): 1})

    @classmethod
    def big_o(cls, order: int) -> RegElement:
        """The unknown tail ``O(z^(order+1))``."""
        return cls({}, order)

    # -- inspection ---------------------------------------------------

    @property
    def order(self) -> int | None:
        return self._order

    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Key, Fraction]]:
        return iter(sorted(self._terms.items()))

    def coefficient(self, i: int, j: int = 0) -> Fraction:
        if self._order is not None and i > self._order:
            raise ValueError(f"coefficient of z^{i} is beyond truncation order {self._order}")
        return self._terms.get((i, j), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return self._order is None

    def valuation(self) -> float:
        """Lowest z-power present (``inf`` for no known terms)."""
        return min((i for i, _ in self._terms), default=math.inf)

    def pole_order(self) -> int:
        v = self.valuation()
        return 0 if v == math.inf or v >= 0 else int(-v)

    def y_degree(self) -> int:
        return max((j for _, j in self._terms), default=0)

    def as_scalar(self) -> Fraction | None:
        """The rational value if this is a constant, else None."""
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {(0, 0)}:
            return self._terms[(0, 0)]
        return None

    # -- ring structure -----------------------------------------------

    def _coerce(self, other) -> RegElement | None:
        if isinstance(other, RegElement):
            return other
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return RegElement.constant(other)
        return None

    def __add__(self, other) -> RegElement:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        order = _min_order(_as_inf(self._order), _as_inf(other._order))
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return RegElement(terms, order)

    __radd__ = __add__

    def __neg__(self) -> RegElement:
        return RegElement({k: -c for k, c in self._terms.items()}, self._order)

    def __sub__(self, other) -> RegElement:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RegElement:
        return (-self) + other

    def __mul__(self, other) -> RegElement:
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            c = as_fraction(other)
            return RegElement({k: c * v for k, v in self._terms.items()}, self._order)
        if not isinstance(other, RegElement):
            return NotImplemented
        qa, qb = _as_inf(self._order), _as_inf(other._order)
        va, vb = self.valuation(), other.valuation()
        # known_a * tail_b, known_b * tail_a, tail_a * tail_b
        order = _min_order(va + qb, vb + qa, qa + qb + 1)
        terms: dict[Key, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                i = i1 + i2
                if order is not None and i > order:
                    continue
                k = (i, j1 + j2)
                terms[k] = terms.get(k, Fraction(0)) + c1 * c2
        return RegElement(terms, order)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RegElement:
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = RegElement.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        common = _as_inf(self._order) if other._order is None else min(_as_inf(self._order), other._order)
        keys = {k for k in self._terms if k[0] <= common} | {k for k in other._terms if k[0] <= common}
        return all(self._terms.get(k, 0) == other._terms.get(k, 0) for k in keys)

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, order: int | None) -> RegElement:
        if order is None:
            return self
        return RegElement(self._terms, _min_order(_as_inf(self._order), order))

    # -- calculus -----------------------------------------------------

    def d_z(self) -> RegElement:
        order = None if self._order is None else self._order - 1
        return RegElement({(i - 1, j): i * c for (i, j), c in self._terms.items() if i}, order)

    def d_y(self) -> RegElement:
        return RegElement({(i, j - 1): j * c for (i, j), c in self._terms.items() if j}, self._order)

    # -- numerics -----------------------------------------------------

    def evaluate(self, z0, m=1) -> float:
        """Value on the locus ``y = log(z0*m)``; the truncated tail is ignored."""
        z0, m = float(z0), float(m)
        if z0 <= 0 or m <= 0:
            raise ValueError("evaluation needs z0 > 0 and m > 0")
        log_zm = math.log(z0 * m)
        return math.fsum(float(c) * z0**i * log_zm**j for (i, j), c in self._terms.items())

    def tail_estimate(self, z0, m=1) -> float:
        """Heuristic size of the dropped tail at ``z0``.

        Assumes coefficients of the unknown powers are no larger than the
        largest per-power magnitude already known. Exact elements return 0.
        """
        if self._order is None:
            return 0.0
        z0 = abs(float(z0))
        if z0 >= 1:
            return math.inf
        log_zm = abs(math.log(z0 * float(m)))
        per_power: dict[int, float] = {}
        for (i, j), c in self._terms.items():
            per_power[i] = per_power.get(i, 0.0) + abs(float(c)) * max(1.0, log_zm) ** j
        scale = max(per_power.values(), default=1.0)
        return scale * z0 ** (self._order + 1) / (1 - z0)

    # -- text / json --------------------------------------------------

    def __str__(self) -> str:
        parts: list[str] = []
        for (i, j), c in self.items():
            factors = []
            if i:
                factors.append("z" if i == 1 else f"z^{i}")
            if j:
                factors.append("y" if j == 1 else f"y^{j}")
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append((sign, body))
        if self._order is not None:
            parts.append(("+", f"O(z^{self._order + 1})"))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"RegElement({self})"

    def to_json(self) -> list[dict]:
        data: list[dict] = [{"z": i, "y": j, "c": str(c)} for (i, j), c in self.items()]
        if self._order is not None:
            data.append({"z_order": self._order})
        return data

    @classmethod
    def from_json(cls, data) -> RegElement:
        """Parse the series literal: a list of ``{"z","y","c"}`` terms and an
        optional ``{"z_order": Q}`` entry; a ``{"terms": [...], "z_order": Q}``
        object is accepted too."""
        order = None
        if isinstance(data, Mapping):
            order = data.get("z_order")
            data = data.get("terms", [])
        if not isinstance(data, list):
            raise ValueError(f"series literal must be a list, got {type(data).__name__}")
        terms: dict[Key, Fraction] = {}
        for pos, entry in enumerate(data):
            if not isinstance(entry, Mapping):
                raise ValueError(f"series term #{pos} is not an object")
            if "z_order" in entry and "c" not in entry:
                order = entry["z_order"]
                continue
            try:
                i, j, c = int(entry.get("z", 0)), int(entry.get("y", 0)), as_fraction(entry["c"])
            except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise ValueError(f"series term #{pos} is malformed: {entry!r}") from exc
            if j < 0:
                raise ValueError(f"series term #{pos} has negative y-power")
            terms[(i, j)] = terms.get((i, j), Fraction(0)) + c
        if order is not None and not isinstance(order, int):
            raise ValueError("z_order must be an integer")
        return cls(terms, order)


class Splitting(NamedTuple):
    minus_part: RegElement
    plus_part: RegElement


def _is_singular(i: int, j: int) -> bool:
    return i < 0 or (i == 0 and j > 0)


def pi_minus(a: RegElement) -> RegElement:
    """Minimal subtraction: keep poles in ``z`` and pure ``y`` powers."""
    q = a.order
    order = None if q is None or q >= 0 else q
    return RegElement({k: c for k, c in a.terms.items() if _is_singular(*k)}, order)


def pi_plus(a: RegElement) -> RegElement:
    return RegElement({k: c for k, c in a.terms.items() if not _is_singular(*k)}, a.order)


def split(a: RegElement) -> Splitting:
    return Splitting(pi_minus(a), pi_plus(a))


def in_minus(a: RegElement) -> bool:
    return all(_is_singular(*k) for k in a.terms)


def in_plus(a: RegElement) -> bool:
    return not any(_is_singular(*k) for k in a.terms)


def series_sum(elements: Iterable[RegElement]) -> RegElement:
    total = RegElement.zero()
    for e in elements:
        total = total + e
    return total


def add(a: RegElement, b: RegElement) -> RegElement:
    return a + b


def multiply(a: RegElement, b: RegElement) -> RegElement:
    return a * b


def scalar_multiply(c, a: RegElement) -> RegElement:
    return a * as_fraction(c)


def differentiate_z(a: RegElement) -> RegElement:
    return a.d_z()


def differentiate_y(a: RegElement) -> RegElement:
    return a.d_y()


def evaluate(a: RegElement, z0, m=1) -> float:
    return a.evaluate(z0, m)
