"""Concrete characters: the one-loop bubble at zero external momentum, and files.

Cutoff: ``A * int_0^L p^3/(p^2+m^2)^2 dp`` with ``L = 1/z`` and ``y = log(zm)``.
Dimensional regularisation: ``A * int_0^inf p^{3+z}/(p^2+m^2)^2 dp
= A * (m^z/2) B(2 + z/2, -z/2)``, continued from ``-4 < Re z < 0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path

import mpmath

from .characters import (
    CHARACTER,
    GENERAL,
    INFINITESIMAL,
    GradeCapMismatch,
    LinMap,
    character_from_generators,
)
from .hopf import UNIT, GeneratorRegistry, HopfAlgebra, UnknownGeneratorError, default_registry, monomial
from .regalg import DEFAULT_Z_ORDER, RegElement, as_fraction

# decimal digits kept when an irrational coefficient is stored as a fraction
IRRATIONAL_DIGITS = 30


class CharacterFileError(ValueError):
    pass


@dataclass(frozen=True)
class ToyRuleConfig:
    m: Fraction = Fraction(1)
    angular_factor: Fraction = Fraction(1)
    z_truncation: int = DEFAULT_Z_ORDER

    def __post_init__(self):
        object.__setattr__(self, "m", as_fraction(self.m))
        object.__setattr__(self, "angular_factor", as_fraction(self.angular_factor))
        if self.m <= 0:
            raise ValueError("mass m must be positive")
        if self.z_truncation < 1:
            raise ValueError("z truncation must be at least 1")


def bubble_cutoff_value(cfg: ToyRuleConfig = ToyRuleConfig()) -> RegElement:
    """``1/2 log(1 + L^2/m^2) + m^2/(2(L^2 + m^2)) - 1/2`` expanded in ``z = 1/L``.

    ``= -y - 1/2 + sum_k (-1)^{k+1} (mz)^{2k} (1/(2k) + 1/2)``; exact.
    """
    Q = cfg.z_truncation
    terms = {(0, 1): Fraction(-1), (0, 0): Fraction(-1, 2)}
    for k in range(1, Q // 2 + 1):
        terms[(2 * k, 0)] = (-1) ** (k + 1) * cfg.m ** (2 * k) * (Fraction(1, 2 * k) + Fraction(1, 2))
    return RegElement(terms, Q) * cfg.angular_factor


def _to_fraction(x) -> Fraction:
    return Fraction(mpmath.nstr(x, IRRATIONAL_DIGITS, min_fixed=-mpmath.inf, max_fixed=mpmath.inf))


def bubble_dimreg_value(cfg: ToyRuleConfig = ToyRuleConfig()) -> RegElement:
    """Laurent expansion of ``(m^z/2) B(2 + z/2, -z/2)`` through ``z^Q``.

    Uses ``B(2 + z/2, -z/2) = -(1 + z/2) pi / sin(pi z/2)`` and the Bernoulli
    expansion of ``x / sin x``. The rational parts are exact; powers of pi
    and of ``log m`` are rounded to ``IRRATIONAL_DIGITS`` significant digits.
    """
    Q = cfg.z_truncation
    n_max = Q + 1  # need e_0 .. e_{Q+1} of the regular factor
    with mpmath.workdps(IRRATIONAL_DIGITS + 20):
        # x/sin x = sum_k (-1)^{k+1} 2 (2^{2k-1} - 1) B_{2k} x^{2k} / (2k)!, x = pi z / 2
        x_over_sin = [mpmath.mpf(0)] * (n_max + 1)
        for k in range(n_max // 2 + 1):
            p, q = mpmath.bernfrac(2 * k)
            rational = Fraction((-1) ** (k + 1) * 2 * p, q) * (Fraction(2) ** (2 * k - 1) - 1) / factorial(2 * k)
            x_over_sin[2 * k] = mpmath.mpf(rational.numerator) / rational.denominator * (mpmath.pi / 2) ** (2 * k)
        log_m = mpmath.log(mpmath.mpf(cfg.m.numerator) / cfg.m.denominator)
        m_pow = [log_m**n / mpmath.factorial(n) for n in range(n_max + 1)]
        with_linear = [x_over_sin[n] + (x_over_sin[n - 1] / 2 if n else 0) for n in range(n_max + 1)]
        regular = [mpmath.fsum(m_pow[j] * with_linear[n - j] for j in range(n + 1)) for n in range(n_max + 1)]
        terms = {}
        for n, e in enumerate(regular):
            # f(z) = -(1/z) sum_n e_n z^n
            if n == 0:
                terms[(-1, 0)] = Fraction(-1)
            elif e != 0:
                terms[(n - 1, 0)] = -_to_fraction(e)
    return RegElement(terms, Q) * cfg.angular_factor


def bubble_character(algebra: HopfAlgebra, value: RegElement, graph: str = "B1") -> LinMap:
    """The character with ``value`` on one generator and zero on all others."""
    key = algebra.key(graph)
    return character_from_generators(
        algebra, {k: (value if k == key else RegElement.zero()) for k in algebra.generators}
    )


def toy_pair(cfg: ToyRuleConfig = ToyRuleConfig(), grade_cap: int = 2) -> tuple[LinMap, LinMap]:
    """(dimreg bubble character, cutoff bubble character) on the built-in corpus."""
    H = HopfAlgebra.builtin(grade_cap)
    return bubble_character(H, bubble_dimreg_value(cfg)), bubble_character(H, bubble_cutoff_value(cfg))


# ---------------------------------------------------------------------------
# files

UNIT_NAME = "1"


def _parse_monomial(registry: GeneratorRegistry, name: str):
    if name == UNIT_NAME:
        return UNIT
    return monomial(*(registry.key(part) for part in name.split(".")))


def character_to_json(f: LinMap) -> dict:
    """Character-file object. Characters list generator values only; other
    maps list every nonzero monomial value and carry a ``kind`` flag."""
    H = f.algebra
    data: dict = {"grade_cap": H.grade_cap}
    if f.kind != CHARACTER:
        data["kind"] = f.kind
        data["infinitesimal"] = f.kind == INFINITESIMAL
        data["generators"] = [H.name(k) for k in H.generators]
        rows = [{"graph": H.render_monomial(m) or UNIT_NAME, "series": v.to_json()} for m, v in f.items()]
    else:
        rows = [{"graph": H.name(k), "series": f.value((k,)).to_json()} for k in H.generators]
    data["values"] = rows
    return data


def dump_character(f: LinMap, path: str | Path) -> None:
    Path(path).write_text(json.dumps(character_to_json(f), indent=2) + "\n")


def character_from_json(
    data, algebra: HopfAlgebra | None = None, registry: GeneratorRegistry | None = None
) -> LinMap:
    """Validate a character-file object and build the map.

    Without ``algebra`` the Hopf algebra is generated by the graphs the file
    mentions, so every contraction of them must have a value too.
    """
    if not isinstance(data, dict):
        raise CharacterFileError("character file must be a JSON object")
    for field in ("grade_cap", "values"):
        if field not in data:
            raise CharacterFileError(f"character file lacks {field!r}")
    cap = data["grade_cap"]
    if not isinstance(cap, int) or isinstance(cap, bool) or cap < 0:
        raise CharacterFileError("grade_cap must be a nonnegative integer")
    if not isinstance(data["values"], list):
        raise CharacterFileError("'values' must be a list")
    kind = data.get("kind", INFINITESIMAL if data.get("infinitesimal") else CHARACTER)
    if kind not in (CHARACTER, INFINITESIMAL, GENERAL):
        raise CharacterFileError(f"unknown map kind {kind!r}")
    if algebra is not None:
        if algebra.grade_cap != cap:
            raise GradeCapMismatch(f"file grade cap {cap} differs from the algebra's {algebra.grade_cap}")
        registry = algebra.registry
    elif registry is None:
        registry = default_registry()

    entries = []
    for pos, row in enumerate(data["values"]):
        if not isinstance(row, dict) or "graph" not in row or "series" not in row:
            raise CharacterFileError(f"values[{pos}] needs 'graph' and 'series'")
        try:
            m = _parse_monomial(registry, str(row["graph"]))
        except UnknownGeneratorError:
            raise UnknownGeneratorError(f"values[{pos}]: unknown graph {row['graph']!r}") from None
        try:
            v = RegElement.from_json(row["series"])
        except ValueError as exc:
            raise CharacterFileError(f"values[{pos}] ({row['graph']}): {exc}") from None
        entries.append((m, str(row["graph"]), v))

    if algebra is None:
        names = set(data.get("generators", []))
        keys = {registry.key(n) for n in names} | {k for m, _, _ in entries for k in m}
        algebra = HopfAlgebra(sorted(keys), cap, registry)

    if kind == CHARACTER:
        gens: dict = {}
        products = []
        for m, label, v in entries:
            if m == UNIT:
                if not v == RegElement.one():
                    raise CharacterFileError(f"a character must take the value 1 on the unit, got {v}")
            elif len(m) == 1:
                gens[m[0]] = v
            else:
                products.append((m, label, v))
        f = character_from_generators(algebra, gens)
        for m, label, v in products:
            if not algebra.in_basis(m):
                raise CharacterFileError(f"{label} exceeds the grade cap")
            if not f.value(m) == v:
                raise CharacterFileError(f"value on {label} is not the product of its factors' values")
        return f
    values = {}
    for m, label, v in entries:
        if not algebra.in_basis(m):
            raise CharacterFileError(f"{label} exceeds the grade cap")
        values[m] = v
    return LinMap(algebra, values, kind)


def load_character(
    path: str | Path, algebra: HopfAlgebra | None = None, registry: GeneratorRegistry | None = None
) -> LinMap:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CharacterFileError(f"{path}: invalid JSON ({exc})") from None
    return character_from_json(data, algebra, registry)
