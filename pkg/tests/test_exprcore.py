"""Expression arithmetic: worked examples and the ring/calculus invariants."""

from fractions import Fraction
from random import Random

import pytest

from infharm.exprcore import (
    DimensionError,
    Expr,
    UnsupportedExpressionError,
    cos_of,
    evaluate,
    evaluate_exact,
    exp_of,
    is_zero,
    parse_expr,
    partial_derivative,
    sin_of,
    substitute,
    to_string,
)

from conftest import random_expr, random_point, random_polynomial


def x(n, i):
    return Expr.coord(n, i)


class TestArithmeticExamples:
    def test_additive_inverse(self):
        a = x(2, 0)
        assert is_zero(a + (-a))

    def test_exp_merge_to_one(self):
        z = x(3, 2)
        assert exp_of(2 * z) * exp_of(-2 * z) == Expr.const(3, 1)

    def test_trig_difference_of_squares(self):
        # (sin + cos)(sin - cos) = sin^2 - cos^2 = 1 - 2 cos^2
        s, c = sin_of(1, 0), cos_of(1, 0)
        assert (s + c) * (s - c) == Expr.const(1, 1) - 2 * c * c

    def test_mismatched_nvars_rejected(self):
        with pytest.raises(DimensionError):
            x(2, 0) + x(3, 0)


class TestDerivativeExamples:
    def test_power_rule(self):
        e = x(2, 0) ** 2 * x(2, 1)
        assert partial_derivative(e, 0) == 2 * x(2, 0) * x(2, 1)

    def test_exp_chain_rule(self):
        z = x(3, 2)
        assert partial_derivative(exp_of(2 * z), 2) == 2 * exp_of(2 * z)

    def test_sin_squared_derivative_matches_cos_form(self):
        # sin^2 canonicalizes to 1 - cos^2; both derivative routes agree
        s, c = sin_of(1, 0), cos_of(1, 0)
        via_sin = partial_derivative(s * s, 0)
        via_cos = partial_derivative(Expr.const(1, 1) - c * c, 0)
        assert via_sin == via_cos == 2 * s * c

    def test_index_out_of_range(self):
        with pytest.raises(DimensionError):
            partial_derivative(x(2, 0), 2)


class TestSubstitutionExamples:
    def test_binomial(self):
        e = x(1, 0) ** 2
        image = x(2, 0) + x(2, 1)
        assert substitute(e, [image]) == image * image

    def test_exp_with_quadratic_exponent(self):
        z = x(3, 2)
        q = x(2, 0) ** 2 + x(2, 0) * x(2, 1)
        got = substitute(exp_of(2 * z), [x(2, 0), x(2, 1), q])
        assert got == exp_of(2 * q)

    def test_conformal_factor_at_linear_map(self):
        # (1 + x1^2 + x2^2)/2 composed with AX equals (1 + |AX|^2)/2
        lam = parse_expr("(1 + x1^2 + x2^2)/2", 2)
        a1 = 2 * x(3, 0) + x(3, 2)
        a2 = x(3, 1) - 3 * x(3, 2)
        got = substitute(lam, [a1, a2])
        assert got == (Expr.const(3, 1) + a1 * a1 + a2 * a2) * Fraction(1, 2)

    def test_trig_of_non_coordinate_rejected(self):
        with pytest.raises(UnsupportedExpressionError):
            substitute(sin_of(1, 0), [x(1, 0) + 1])

    def test_exp_in_exp_rejected(self):
        z = x(1, 0)
        with pytest.raises(UnsupportedExpressionError):
            substitute(exp_of(z), [exp_of(z)])


class TestZeroTest:
    def test_pythagorean_identity(self):
        s, c = sin_of(1, 0), cos_of(1, 0)
        assert is_zero(s * s + c * c - 1)

    def test_exp_product_merge(self):
        z = x(3, 2)
        assert is_zero(exp_of(2 * z) - exp_of(z) * exp_of(z))

    def test_distinct_exponentials_independent(self):
        z = x(3, 2)
        e = x(3, 0) * exp_of(2 * z) - x(3, 0) * exp_of(-2 * z)
        assert not is_zero(e)
        assert abs(evaluate(e, [1, 0, 1])) > 1


class TestEvaluation:
    def test_float_path(self):
        e = x(2, 0) ** 2 + x(2, 1) ** 2
        assert evaluate(e, [Fraction(3, 2), Fraction(1, 2)]) == pytest.approx(2.5)

    def test_exact_path(self):
        e = x(2, 0) ** 2 + x(2, 1) ** 2
        assert evaluate_exact(e, [Fraction(3, 2), Fraction(1, 2)]) == Fraction(5, 2)

    def test_exp_at_zero(self):
        z = x(3, 2)
        e = exp_of(2 * z) + exp_of(-2 * z)
        assert evaluate(e, [0, 0, 0]) == pytest.approx(2.0)

    def test_exact_path_rejects_transcendentals(self):
        with pytest.raises(UnsupportedExpressionError):
            evaluate_exact(cos_of(1, 0), [Fraction(0)])


class TestInvariants:
    def test_ring_laws(self):
        rng = Random(101)
        for _ in range(200):
            n = rng.randint(1, 3)
            a = random_expr(rng, n)
            b = random_expr(rng, n)
            c = random_expr(rng, n)
            assert is_zero(a * (b + c) - (a * b + a * c))
            assert is_zero((a * b) * c - a * (b * c))

    def test_leibniz_rule(self):
        rng = Random(202)
        for _ in range(200):
            n = rng.randint(1, 3)
            i = rng.randrange(n)
            a = random_expr(rng, n)
            b = random_expr(rng, n)
            lhs = partial_derivative(a * b, i)
            rhs = partial_derivative(a, i) * b + a * partial_derivative(b, i)
            assert is_zero(lhs - rhs)

    def test_clairaut(self):
        rng = Random(303)
        for _ in range(100):
            n = rng.randint(2, 3)
            e = random_expr(rng, n)
            i, j = rng.randrange(n), rng.randrange(n)
            a = partial_derivative(partial_derivative(e, i), j)
            b = partial_derivative(partial_derivative(e, j), i)
            assert is_zero(a - b)

    def test_evaluation_homomorphism(self):
        rng = Random(404)
        for _ in range(200):
            n = rng.randint(1, 3)
            a = random_expr(rng, n)
            b = random_expr(rng, n)
            pt = random_point(rng, n)
            lhs = evaluate(a * b, pt)
            rhs = evaluate(a, pt) * evaluate(b, pt)
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))

    def test_canonical_idempotence(self):
        rng = Random(505)
        for _ in range(100):
            n = rng.randint(1, 3)
            e = random_expr(rng, n)
            rebuilt = Expr.zero(n)
            for mono, coeff in e.terms.items():
                rebuilt = rebuilt + Expr(n, {mono: coeff})
            assert rebuilt == e


class TestRendering:
    def test_round_trip_on_random_expressions(self):
        rng = Random(606)
        for _ in range(50):
            n = rng.randint(1, 3)
            e = random_expr(rng, n)
            assert parse_expr(to_string(e), n) == e

    def test_round_trip_on_polynomials(self):
        rng = Random(707)
        for _ in range(50):
            n = rng.randint(1, 3)
            e = random_polynomial(rng, n)
            assert parse_expr(to_string(e), n) == e

    def test_aliases(self):
        assert parse_expr("x + y + z", 3) == x(3, 0) + x(3, 1) + x(3, 2)

    def test_division_by_constant_only(self):
        from infharm.exprcore import ExprParseError

        with pytest.raises(ExprParseError):
            parse_expr("1/x1", 1)

    def test_out_of_range_coordinate_message(self):
        from infharm.exprcore import ExprParseError

        with pytest.raises(ExprParseError, match="out of range"):
            parse_expr("x5", 2)


class TestNumericGuards:
    def test_exp_overflow_is_contained(self):
        z = Expr.coord(1, 0)
        big = exp_of(1000 * z)
        value = evaluate(big, [Fraction(1)])
        assert value == float("inf")

    def test_max_term_magnitude_of_zero(self):
        from infharm.exprcore import max_term_magnitude

        assert max_term_magnitude(Expr.zero(2), [0, 0]) == 0.0
