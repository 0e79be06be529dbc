"""The Connes-Kreimer Hopf algebra of 1PI phi^4 graphs.

Elements are rational combinations of monomials; a monomial is a sorted
tuple of generator canonical keys (the empty tuple is the unit). All
arithmetic is exact.
"""
from __future__ import annotations

import hashlib
import itertools
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .graphs import (
    CanonicalKey,
    Graph,
    admissible_subgraphs,
    canonical_form,
    check_graph,
    contract,
    graph_from_key,
    key_loop_number,
)

Monomial = tuple[CanonicalKey, ...]
UNIT: Monomial = ()

DEFAULT_GRADE_CAP = 3


class UnknownGeneratorError(KeyError):
    pass


def monomial(*keys: CanonicalKey) -> Monomial:
    return tuple(sorted(keys))


def grade(m: Monomial) -> int:
    return sum(key_loop_number(k) for k in m)


def _merge(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b))


@dataclass
class HopfElement:
    terms: dict[Monomial, Fraction] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        self.terms = {m: Fraction(c) for m, c in self.terms.items() if c}

    @classmethod
    def of(cls, m: Monomial, c=1) -> HopfElement:
        return cls({m: Fraction(c)})

    @classmethod
    def unit(cls) -> HopfElement:
        return cls({UNIT: Fraction(1)})

    def __add__(self, other: HopfElement) -> HopfElement:
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return HopfElement(terms, self.truncated or other.truncated)

    def __neg__(self) -> HopfElement:
        return HopfElement({m: -c for m, c in self.terms.items()}, self.truncated)

    def __sub__(self, other: HopfElement) -> HopfElement:
        return self + (-other)

    def __mul__(self, other) -> HopfElement:
        if isinstance(other, (int, Fraction)):
            return HopfElement({m: c * other for m, c in self.terms.items()}, self.truncated)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _merge(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return HopfElement(terms, self.truncated or other.truncated)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self.terms == other.terms

    def items(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items()))

    def max_grade(self) -> int:
        return max((grade(m) for m in self.terms), default=0)


@dataclass
class TensorElement:
    terms: dict[tuple[Monomial, Monomial], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: Fraction(c) for k, c in self.terms.items() if c}

    def __add__(self, other: TensorElement) -> TensorElement:
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return TensorElement(terms)

    def __mul__(self, other: TensorElement) -> TensorElement:
        terms: dict[tuple[Monomial, Monomial], Fraction] = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                k = (_merge(l1, l2), _merge(r1, r2))
                terms[k] = terms.get(k, 0) + c1 * c2
        return TensorElement(terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.terms == other.terms


# ---------------------------------------------------------------------------
# registry


class GeneratorRegistry:
    """Append-only map between canonical keys, names and graphs.

    Safe to share between threads; registration takes a lock.
    """

    def __init__(self, graphs: Iterable[Graph] = ()):
        self._lock = threading.Lock()
        self._names: dict[CanonicalKey, str] = {}
        self._keys: dict[str, CanonicalKey] = {}
        for g in graphs:
            self.register(g)

    def register(self, g: Graph | CanonicalKey, name: str | None = None) -> CanonicalKey:
        if isinstance(g, Graph):
            key = canonical_form(g)
            name = name or g.name
        else:
            key = g
        with self._lock:
            if name is not None and name in self._keys and self._keys[name] != key:
                raise ValueError(f"graph name {name!r} is already used by a non-isomorphic graph")
            if key in self._names:
                # an isomorphic graph under a new name becomes an alias
                if name is not None:
                    self._keys[name] = key
                return key
            if name is None:
                digest = hashlib.sha1(repr(key).encode()).hexdigest()[:6]
                name = f"X{key_loop_number(key)}_{len(key[2])}_{digest}"
            self._names[key] = name
            self._keys[name] = key
        return key

    def name(self, key: CanonicalKey) -> str:
        try:
            return self._names[key]
        except KeyError:
            return self._names[self.register(key)]

    def key(self, name: str) -> CanonicalKey:
        try:
            return self._keys[name]
        except KeyError:
            raise UnknownGeneratorError(f"unknown graph {name!r}") from None

    def __contains__(self, item) -> bool:
        return item in self._keys or item in self._names

    def names(self) -> list[str]:
        return sorted(self._keys)

    def graph(self, key_or_name) -> Graph:
        key = self.key(key_or_name) if isinstance(key_or_name, str) else key_or_name
        return graph_from_key(key, self.name(key))


_default_registry: GeneratorRegistry | None = None
_default_lock = threading.Lock()


def default_registry() -> GeneratorRegistry:
    """Registry holding the built-in corpus (graphs up to three loops)."""
    global _default_registry
    with _default_lock:
        if _default_registry is None:
            _default_registry = builtin_registry()
        return _default_registry


def builtin_registry(max_loops: int = 3) -> GeneratorRegistry:
    """Fresh registry with the built-in corpus and every contraction of it."""
    from .corpus import builtin_graphs

    reg = GeneratorRegistry(builtin_graphs(max_loops))
    for key in sorted(subdivergence_closure([reg.key(n) for n in reg.names()], max_loops)):
        reg.register(key)
    return reg


# ---------------------------------------------------------------------------
# combinatorics (pure, memoised on canonical keys)


@lru_cache(maxsize=None)
def _generator_coproduct(key: CanonicalKey) -> tuple[tuple[tuple[Monomial, Monomial], int], ...]:
    g = graph_from_key(key)
    terms: dict[tuple[Monomial, Monomial], int] = {((), (key,)): 1}
    terms[((key,), ())] = terms.get(((key,), ()), 0) + 1
    for s in admissible_subgraphs(g):
        left = monomial(*(canonical_form(c) for c in s.component_graphs()))
        right = (canonical_form(contract(g, s)),)
        terms[(left, right)] = terms.get((left, right), 0) + 1
    return tuple(sorted(terms.items()))


@lru_cache(maxsize=None)
def _monomial_coproduct(m: Monomial) -> tuple[tuple[tuple[Monomial, Monomial], Fraction], ...]:
    result = TensorElement({((), ()): Fraction(1)})
    for key in m:
        result = result * TensorElement(dict(_generator_coproduct(key)))
    return tuple(sorted(result.terms.items()))


@lru_cache(maxsize=None)
def _generator_antipode(key: CanonicalKey) -> tuple[tuple[Monomial, Fraction], ...]:
    result = HopfElement.of((key,), -1)
    for (left, right), c in _generator_coproduct(key):
        if left in ((), (key,)):
            continue
        result = result - _monomial_antipode(left) * HopfElement.of(right, c)
    return tuple(sorted(result.terms.items()))


def _monomial_antipode(m: Monomial) -> HopfElement:
    result = HopfElement.unit()
    for key in m:
        result = result * HopfElement(dict(_generator_antipode(key)))
    return result


def subdivergence_closure(keys: Iterable[CanonicalKey], grade_cap: int | None = None) -> set[CanonicalKey]:
    """All generators reachable from ``keys`` via subgraph components and contractions."""
    seen: set[CanonicalKey] = set()
    queue = deque(keys)
    while queue:
        key = queue.popleft()
        if key in seen:
            continue
        if grade_cap is not None and key_loop_number(key) > grade_cap:
            continue
        seen.add(key)
        for (left, right), _ in _generator_coproduct(key):
            for k in left + right:
                if k not in seen:
                    queue.append(k)
    return seen


def _monomials_up_to(gens: list[CanonicalKey], cap: int) -> list[Monomial]:
    out: list[Monomial] = [UNIT]
    # generator grades are >= 1, so at most `cap` factors
    for size in range(1, cap + 1):
        for combo in itertools.combinations_with_replacement(gens, size):
            if grade(combo) <= cap:
                out.append(tuple(sorted(combo)))
    return sorted(set(out), key=lambda m: (grade(m), m))


class HopfAlgebra:
    """Hopf algebra on the subdivergence closure of some generators, cut at a grade."""

    def __init__(
        self,
        generators: Iterable[Graph | CanonicalKey | str],
        grade_cap: int = DEFAULT_GRADE_CAP,
        registry: GeneratorRegistry | None = None,
    ):
        if grade_cap < 0:
            raise ValueError("grade cap must be nonnegative")
        self.registry = registry or default_registry()
        self.grade_cap = grade_cap
        seeds = []
        for g in generators:
            if isinstance(g, str):
                key = self.registry.key(g)
            elif isinstance(g, Graph):
                problems = check_graph(g)
                if problems:
                    raise ValueError(f"{g}: {problems[0]}")
                key = self.registry.register(g)
            else:
                key = g
            if key_loop_number(key) > grade_cap:
                raise ValueError(
                    f"generator {self.registry.name(key)} has grade {key_loop_number(key)} above the cap {grade_cap}"
                )
            seeds.append(key)
        closure = subdivergence_closure(seeds, grade_cap)
        for key in closure:
            self.registry.register(key)
        self.generators: tuple[CanonicalKey, ...] = tuple(sorted(closure, key=lambda k: (key_loop_number(k), k)))
        self._generator_set = frozenset(self.generators)
        self.basis: tuple[Monomial, ...] = tuple(_monomials_up_to(list(self.generators), grade_cap))
        self._basis_set = frozenset(self.basis)

    @classmethod
    def builtin(cls, grade_cap: int = DEFAULT_GRADE_CAP, registry: GeneratorRegistry | None = None) -> HopfAlgebra:
        from .corpus import builtin_graphs

        registry = registry or default_registry()
        return cls([registry.register(g) for g in builtin_graphs(grade_cap)], grade_cap, registry)

    # -- lookups ------------------------------------------------------

    def key(self, name_or_key) -> CanonicalKey:
        key = self.registry.key(name_or_key) if isinstance(name_or_key, str) else name_or_key
        if key not in self._generator_set:
            raise UnknownGeneratorError(f"{self.name(key)} is not a generator of this algebra")
        return key

    def name(self, key: CanonicalKey) -> str:
        return self.registry.name(key)

    def element(self, *names: str, coeff=1) -> HopfElement:
        """The monomial given by generator names, e.g. ``element("B1", "B1")``."""
        return HopfElement.of(monomial(*(self.key(n) for n in names)), coeff)

    def mono(self, *names: str) -> Monomial:
        return monomial(*(self.key(n) for n in names))

    def in_basis(self, m: Monomial) -> bool:
        return m in self._basis_set

    def _check(self, x: HopfElement):
        for m in x.terms:
            for key in m:
                if key not in self._generator_set:
                    raise UnknownGeneratorError(f"{self.name(key)} is not a generator of this algebra")

    # -- structure maps -----------------------------------------------

    def truncate(self, x: HopfElement) -> HopfElement:
        kept = {m: c for m, c in x.terms.items() if grade(m) <= self.grade_cap}
        return HopfElement(kept, x.truncated or len(kept) != len(x.terms))

    def multiply(self, a: HopfElement, b: HopfElement) -> HopfElement:
        return self.truncate(a * b)

    def coproduct_terms(self, m: Monomial) -> tuple[tuple[tuple[Monomial, Monomial], Fraction], ...]:
        return _monomial_coproduct(m)

    def coproduct(self, x: HopfElement | Monomial) -> TensorElement:
        if not isinstance(x, HopfElement):
            x = HopfElement.of(x)
        self._check(x)
        out: dict[tuple[Monomial, Monomial], Fraction] = {}
        for m, c in x.terms.items():
            for k, d in _monomial_coproduct(m):
                out[k] = out.get(k, 0) + c * d
        return TensorElement(out)

    def counit(self, x: HopfElement | Monomial) -> Fraction:
        if not isinstance(x, HopfElement):
            x = HopfElement.of(x)
        return x.terms.get(UNIT, Fraction(0))

    def antipode(self, x: HopfElement | Monomial) -> HopfElement:
        if not isinstance(x, HopfElement):
            x = HopfElement.of(x)
        self._check(x)
        out = HopfElement()
        for m, c in x.terms.items():
            out = out + _monomial_antipode(m) * c
        return out

    def grading_operator(self, x: HopfElement | Monomial) -> HopfElement:
        if not isinstance(x, HopfElement):
            x = HopfElement.of(x)
        return HopfElement({m: c * grade(m) for m, c in x.terms.items()}, x.truncated)

    # -- rendering ----------------------------------------------------

    def render_monomial(self, m: Monomial) -> str:
        return ".".join(self.name(k) for k in m) if m else "1"

    def render(self, x: HopfElement) -> str:
        parts = []
        for m, c in x.items():
            body = self.render_monomial(m)
            mag = abs(c)
            if mag != 1:
                body = f"{mag}*{body}"
            parts.append(("-" if c < 0 else "+", body))
        return _join(parts)

    def render_tensor(self, t: TensorElement) -> str:
        def order(item):
            (left, right), _ = item
            rank = 0 if left == UNIT else 1 if right == UNIT else 2
            return (rank, left, right)

        parts = []
        for (left, right), c in sorted(t.terms.items(), key=order):
            body = f"{self.render_monomial(left)}⊗{self.render_monomial(right)}"
            mag = abs(c)
            if mag != 1:
                body = f"{mag}*({body})"
            parts.append(("-" if c < 0 else "+", body))
        return _join(parts)


def _join(parts: list[tuple[str, str]]) -> str:
    if not parts:
        return "0"
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# axiom checks shared by tests and the self-test


def _tensor3(t: Mapping) -> dict:
    return {k: v for k, v in t.items() if v}


def coassociativity_defect(algebra: HopfAlgebra, m: Monomial) -> dict:
    """Nonzero entries of (Delta x id)Delta(m) - (id x Delta)Delta(m)."""
    lhs: dict = {}
    rhs: dict = {}
    for (a, b), c in algebra.coproduct_terms(m):
        for (a1, a2), d in algebra.coproduct_terms(a):
            k = (a1, a2, b)
            lhs[k] = lhs.get(k, 0) + c * d
        for (b1, b2), d in algebra.coproduct_terms(b):
            k = (a, b1, b2)
            rhs[k] = rhs.get(k, 0) + c * d
    keys = set(lhs) | set(rhs)
    return _tensor3({k: lhs.get(k, 0) - rhs.get(k, 0) for k in keys})


def counit_defect(algebra: HopfAlgebra, m: Monomial) -> tuple[HopfElement, HopfElement]:
    """((eps x id)Delta(m) - m, (id x eps)Delta(m) - m)."""
    left = HopfElement()
    right = HopfElement()
    for (a, b), c in algebra.coproduct_terms(m):
        if a == UNIT:
            left = left + HopfElement.of(b, c)
        if b == UNIT:
            right = right + HopfElement.of(a, c)
    x = HopfElement.of(m)
    return left - x, right - x


def antipode_defect(algebra: HopfAlgebra, m: Monomial, antipode=None) -> tuple[HopfElement, HopfElement]:
    """(m(S x id)Delta(m) - eps(m)1, m(id x S)Delta(m) - eps(m)1)."""
    antipode = antipode or algebra.antipode
    left = HopfElement()
    right = HopfElement()
    for (a, b), c in algebra.coproduct_terms(m):
        left = left + antipode(HopfElement.of(a)) * HopfElement.of(b, c)
        right = right + HopfElement.of(a, c) * antipode(HopfElement.of(b))
    eps = HopfElement.of(UNIT, algebra.counit(m))
    return left - eps, right - eps
