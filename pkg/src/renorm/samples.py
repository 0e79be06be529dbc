"""Seeded random regulator-algebra elements and characters for property checks."""
from __future__ import annotations

import os
import random
from fractions import Fraction

from .characters import LinMap, character_from_generators
from .graphs import key_loop_number
from .hopf import HopfAlgebra
from .regalg import RegElement

SEED_ENV = "RENORM_SEED"


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _coefficient(rng: random.Random, spread: int) -> Fraction:
    return Fraction(rng.randint(-spread, spread), rng.randint(1, 4))


def random_element(
    rng: random.Random,
    max_pole: int = 4,
    max_y: int = 4,
    order: int | None = 6,
    density: float = 0.3,
    spread: int = 9,
) -> RegElement:
    """Random element with poles up to ``max_pole`` and y-degree up to ``max_y``."""
    top = order if order is not None else 3
    terms = {}
    for i in range(-max_pole, top + 1):
        for j in range(max_y + 1):
            if rng.random() < density:
                terms[(i, j)] = _coefficient(rng, spread)
    return RegElement(terms, order)


def random_character(
    algebra: HopfAlgebra,
    rng: random.Random,
    with_y: bool = False,
    top: int = 2,
    spread: int = 5,
) -> LinMap:
    """Random character whose value on a loop-``n`` generator is an exact Laurent
    polynomial with pole order at most ``n`` (and y-degree at most ``n`` when
    ``with_y``)."""
    values = {}
    for key in algebra.generators:
        n = key_loop_number(key)
        terms = {}
        for i in range(-n, top + 1):
            for j in range(n + 1 if with_y else 1):
                if rng.random() < 0.6:
                    terms[(i, j)] = _coefficient(rng, spread)
        values[key] = RegElement(terms)
    return character_from_generators(algebra, values)
