"""Shared generators for seeded random-expression campaigns."""

from __future__ import annotations

from fractions import Fraction
from random import Random

from infharm.exprcore import Expr, cos_of, exp_of, sin_of


def rand_coeff(rng: Random, num: int = 4, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_polynomial(rng: Random, nvars: int, max_deg: int = 3, terms: int = 4) -> Expr:
    total = Expr.zero(nvars)
    for _ in range(terms):
        t = Expr.const(nvars, rand_coeff(rng))
        for _ in range(rng.randint(0, max_deg)):
            t = t * Expr.coord(nvars, rng.randrange(nvars))
        total = total + t
    return total


def random_expr(
    rng: Random,
    nvars: int,
    max_deg: int = 3,
    terms: int = 3,
    allow_exp: bool = True,
    allow_trig: bool = True,
) -> Expr:
    """Random member of the full expression class, kept numerically tame."""
    total = Expr.zero(nvars)
    for _ in range(terms):
        t = Expr.const(nvars, rand_coeff(rng))
        for _ in range(rng.randint(0, max_deg)):
            t = t * Expr.coord(nvars, rng.randrange(nvars))
        if allow_exp and rng.random() < 0.35:
            exponent = Expr.zero(nvars)
            for _ in range(rng.randint(1, 2)):
                exponent = exponent + rng.randint(-2, 2) * Expr.coord(nvars, rng.randrange(nvars))
            t = t * exp_of(exponent)
        if allow_trig and rng.random() < 0.35:
            i = rng.randrange(nvars)
            t = t * (cos_of(nvars, i) if rng.random() < 0.5 else sin_of(nvars, i))
            if rng.random() < 0.3:
                j = rng.randrange(nvars)
                t = t * (cos_of(nvars, j) if rng.random() < 0.5 else sin_of(nvars, j))
        total = total + t
    return total


def random_point(rng: Random, nvars: int, den: int = 8) -> list[Fraction]:
    return [Fraction(rng.randint(-den, den), den) for _ in range(nvars)]
