"""Differential operators: worked examples and the operator identities."""

from fractions import Fraction
from random import Random

import pytest

from infharm.calculus import (
    energy_density,
    evaluate,
    fd_p_tension,
    gradient_norm_squared,
    hessian_form,
    infinity_laplacian,
    infinity_tension,
    laplace_beltrami,
    metric_gradient,
    numeric_zero_check,
    p_laplacian,
    p_tension,
    phm_composed_p_tension,
    sample_points,
    tension_field,
)
from infharm.exprcore import (
    Expr,
    UnsupportedExpressionError,
    exp_of,
    is_zero,
    parse_expr,
    partial_derivative,
    to_string,
)
from infharm.mapspec import affine_map, custom_map, materialize, quadratic_map
from infharm.spaces import build_space

from conftest import rand_coeff, random_polynomial

E1, E2, E3 = build_space("euclid:1"), build_space("euclid:2"), build_space("euclid:3")
NIL, SOL = build_space("nil"), build_space("sol")
S2 = build_space("sphere:2")


class TestMetricGradient:
    def test_euclidean(self):
        f = parse_expr("x1^2 + x2^2", 2)
        assert metric_gradient(E2, f) == (2 * Expr.coord(2, 0), 2 * Expr.coord(2, 1))

    def test_nil_vertical_coordinate(self):
        grad = metric_gradient(NIL, Expr.coord(3, 2))
        assert is_zero(grad[0])
        assert grad[1] == Expr.coord(3, 0)
        assert grad[2] == Expr.const(3, 1) + Expr.coord(3, 0) ** 2

    def test_sol_first_coordinate(self):
        grad = metric_gradient(SOL, Expr.coord(3, 0))
        assert grad[0] == exp_of(-2 * Expr.coord(3, 2))
        assert is_zero(grad[1]) and is_zero(grad[2])


class TestEnergyDensity:
    def test_identity_map_trace(self):
        e4 = build_space("euclid:4")
        spec = affine_map([[1 if i == j else 0 for j in range(4)] for i in range(4)])
        en = energy_density(e4, e4, spec)
        assert en.num == Expr.const(4, 4) and en.is_plain

    def test_trig_map_constant_three(self):
        spec = custom_map(
            3,
            [
                parse_expr("cos(x1)+cos(x2)+cos(x3)", 3),
                parse_expr("sin(x1)+sin(x2)+sin(x3)", 3),
            ],
        )
        en = energy_density(E3, E2, spec)
        assert en.num == Expr.const(3, 3)

    def test_nil_polynomial_example(self):
        spec = custom_map(3, [parse_expr("x3 - x1*x2/2", 3), parse_expr("2*x3 - x1*x2", 3)])
        en = energy_density(NIL, E2, spec)
        x, y = Expr.coord(3, 0), Expr.coord(3, 1)
        assert en.num == 5 + Fraction(5, 4) * x * x + Fraction(5, 4) * y * y

    def test_semi_euclidean_null_energy(self):
        semi = build_space("semi-euclid:2:-+")
        spec = quadratic_map([[[12, 0], [0, 12]], [[13, 5], [5, 13]]])
        en = energy_density(semi, semi, spec)
        assert is_zero(en.num)

    def test_positivity_on_riemannian_spaces(self):
        rng = Random(77)
        pairs = [(E2, E2), (NIL, E2), (SOL, E2), (E2, NIL), (E2, SOL), (S2, E2), (E2, S2)]
        for dom, cod in pairs:
            spec = affine_map(
                [[rand_coeff(rng) for _ in range(dom.dim)] for _ in range(cod.dim)]
            )
            en = energy_density(dom, cod, spec)
            for pt in sample_points(dom.dim, 100, seed=13):
                assert evaluate(en.num, pt) >= -1e-12


class TestInfinityTension:
    def test_affine_euclidean_zero(self):
        spec = affine_map([[1, 2], [3, 4]], [5, 6])
        rep = infinity_tension(E2, E2, spec)
        assert rep.verdict == "zero" and rep.mode == "exact"

    def test_single_square_witness(self):
        rep = infinity_tension(E1, E1, quadratic_map([[[1]]]))
        assert rep.components[0] == 16 * Expr.coord(1, 0) ** 2
        assert rep.verdict == "nonzero"
        assert rep.witness is not None and abs(rep.witness.value) > 1e-9

    def test_nil_projection_energy_and_verdict(self):
        spec = affine_map([[0, 1, 0], [0, 0, 1]])
        rep = infinity_tension(NIL, E2, spec)
        assert rep.energy_density == Expr.coord(3, 0) ** 2 + 2
        assert rep.verdict == "zero"

    def test_quadratic_into_sol_nonzero(self):
        spec = quadratic_map([[[1]], [[0]], [[0]]])
        rep = infinity_tension(E1, SOL, spec)
        assert rep.verdict == "nonzero"

    def test_numeric_mode_agrees_on_zero(self):
        spec = affine_map([[0, 1, 0], [0, 0, 1]])
        rep = infinity_tension(NIL, E2, spec, mode="numeric", seed=3)
        assert rep.verdict == "zero" and rep.mode == "numeric"

    def test_numeric_fallback_for_unsupported_composition(self):
        # trig components into Sol: exp(trig) leaves the symbolic class
        spec = custom_map(1, [parse_expr("cos(x1)", 1), Expr.zero(1), parse_expr("sin(x1)", 1)])
        rep = infinity_tension(E1, SOL, spec)
        assert rep.mode == "numeric"
        assert rep.components is None

    def test_exact_zero_passes_numeric_sampling(self):
        spec = custom_map(
            3,
            [
                parse_expr("cos(x1)+cos(x2)+cos(x3)", 3),
                parse_expr("sin(x1)+sin(x2)+sin(x3)", 3),
            ],
        )
        rep = infinity_tension(E3, E2, spec)
        assert rep.verdict == "zero"
        assert numeric_zero_check(rep.components, 3, seed=99)


class TestScalarOperators:
    def test_linear_functions_harmonic(self):
        u = parse_expr("2*x1 + 3*x2 - x3", 3)
        assert is_zero(infinity_laplacian(E3, u))

    def test_square_on_line(self):
        u = parse_expr("x1^2", 1)
        assert infinity_laplacian(E1, u) == 8 * Expr.coord(1, 0) ** 2

    def test_nil_linear_criterion(self):
        # A x + B y + C z on Nil: harmonic iff A = 0 or C = 0
        assert is_zero(infinity_laplacian(NIL, parse_expr("x2 + x3", 3)))
        assert is_zero(infinity_laplacian(NIL, parse_expr("x1 + x2", 3)))
        assert not is_zero(infinity_laplacian(NIL, parse_expr("x1 + x3", 3)))

    def test_sol_linear_criterion(self):
        # A x + B y + C z on Sol: harmonic iff C = 0 or A = B = 0
        assert is_zero(infinity_laplacian(SOL, parse_expr("x1 + x2", 3)))
        assert is_zero(infinity_laplacian(SOL, parse_expr("x3", 3)))
        assert not is_zero(infinity_laplacian(SOL, parse_expr("x2 + x3", 3)))

    def test_hessian_consistency_all_spaces(self):
        rng = Random(88)
        for label in ["euclid:2", "euclid:3", "nil", "sol", "sphere:2", "semi-euclid:2:-+"]:
            sp = build_space(label)
            for _ in range(20):
                u = random_polynomial(rng, sp.dim)
                dinf = infinity_laplacian(sp, u)
                hf = hessian_form(sp, u)
                assert is_zero(hf.clearing * dinf - hf.num), label

    def test_euclidean_coordinate_form(self):
        rng = Random(99)
        for _ in range(100):
            n = rng.randint(1, 3)
            sp = build_space(f"euclid:{n}")
            u = random_polynomial(rng, n)
            du = [partial_derivative(u, i) for i in range(n)]
            coord_form = Expr.zero(n)
            for i in range(n):
                for j in range(n):
                    coord_form = coord_form + partial_derivative(du[i], j) * du[i] * du[j]
            assert is_zero(infinity_laplacian(sp, u) - coord_form)


class TestPLaplacian:
    def test_p2_is_laplace_beltrami(self):
        u = parse_expr("x1^2 + x2^2", 2)
        pl = p_laplacian(E2, u, 2)
        assert pl.num == Expr.const(2, 4)

    def test_p4_linear_vanishes(self):
        u = parse_expr("x1 + 2*x2", 2)
        assert is_zero(p_laplacian(E2, u, 4).num)

    def test_p4_square(self):
        u = parse_expr("x1^2", 1)
        assert p_laplacian(E1, u, 4).num == 24 * Expr.coord(1, 0) ** 2

    def test_odd_p_rejected(self):
        with pytest.raises(UnsupportedExpressionError):
            p_laplacian(E1, parse_expr("x1^2", 1), 3)


class TestTensionFields:
    def test_affine_totally_geodesic(self):
        spec = affine_map([[1, 2], [3, 4]], [1, 1])
        t2, _ = tension_field(E2, E2, spec)
        assert all(is_zero(t) for t in t2)
        tp, _ = p_tension(E2, E2, spec, 4)
        assert all(is_zero(t) for t in tp)

    def test_p4_square_value(self):
        tp, clearing = p_tension(E1, E1, quadratic_map([[[1]]]), 4)
        assert tp[0] == 24 * Expr.coord(1, 0) ** 2
        assert clearing.constant_value() == 1

    def test_harmonic_but_not_infinity_harmonic(self):
        spec = custom_map(2, [parse_expr("x1^2 - x2^2", 2)])
        t2, _ = tension_field(E2, E1, spec)
        assert is_zero(t2[0])
        tp, _ = p_tension(E2, E1, spec, 4)
        rep = infinity_tension(E2, E1, spec)
        # with tau_2 = 0 the p=4 tension reduces to the tension report component
        assert is_zero(tp[0] - rep.components[0])
        x, y = Expr.coord(2, 0), Expr.coord(2, 1)
        assert tp[0] == 16 * x * x - 16 * y * y

    def test_sphere_identity_totally_geodesic(self):
        spec = affine_map([[1, 0], [0, 1]])
        t2, _ = tension_field(S2, S2, spec)
        assert all(is_zero(t) for t in t2)

    def test_phm_identity_random_maps(self):
        rng = Random(123)
        for _ in range(50):
            m, n = rng.randint(1, 3), rng.randint(1, 2)
            quads = []
            for _ in range(n):
                q = [[Fraction(0)] * m for _ in range(m)]
                for i in range(m):
                    for j in range(i, m):
                        v = rand_coeff(rng)
                        q[i][j] = v
                        q[j][i] = v
                quads.append(tuple(tuple(r) for r in q))
            a = [[rand_coeff(rng) for _ in range(m)] for _ in range(n)]
            b = [rand_coeff(rng) for _ in range(n)]
            spec = quadratic_map(quads, a, b)
            dom, cod = build_space(f"euclid:{m}"), build_space(f"euclid:{n}")
            div_form, dc = p_tension(dom, cod, spec, 4)
            composed, cc = phm_composed_p_tension(dom, cod, spec, 4)
            assert dc.constant_value() == 1 and cc.constant_value() == 1
            for lhs, rhs in zip(div_form, composed):
                assert is_zero(lhs - rhs)

    def test_fd_oracle_agreement(self):
        rng = Random(321)
        for _ in range(10):
            m, n = rng.randint(1, 2), rng.randint(1, 2)
            quads = []
            for _ in range(n):
                q = [[Fraction(0)] * m for _ in range(m)]
                for i in range(m):
                    for j in range(i, m):
                        v = rand_coeff(rng)
                        q[i][j] = v
                        q[j][i] = v
                quads.append(tuple(tuple(r) for r in q))
            spec = quadratic_map(quads)
            dom, cod = build_space(f"euclid:{m}"), build_space(f"euclid:{n}")
            tp, _ = p_tension(dom, cod, spec, 4)
            comps = materialize(spec)
            for pt in sample_points(m, 5, seed=17):
                fd = fd_p_tension(comps, 4, [float(v) for v in pt])
                for sym_expr, fd_val in zip(tp, fd):
                    sym_val = evaluate(sym_expr, pt)
                    assert abs(sym_val - fd_val) <= 1e-6 * max(1.0, abs(sym_val), abs(fd_val))


class TestHolomorphicDoubling:
    def test_energy_is_twice_real_part_energy(self):
        from infharm.mapspec import ComplexPolyMap, holomorphic_map, parse_cpoly, realify

        rng = Random(55)
        for _ in range(100):
            m, n = rng.randint(1, 2), rng.randint(1, 2)
            comps = []
            for _ in range(n):
                poly = {}
                for _ in range(rng.randint(1, 3)):
                    mono = [0] * m
                    for _ in range(rng.randint(0, 3)):
                        mono[rng.randrange(m)] += 1
                    poly[tuple(mono)] = (rand_coeff(rng), rand_coeff(rng))
                poly = {k: v for k, v in poly.items() if v != (Fraction(0), Fraction(0))}
                comps.append(poly or {(0,) * m: (Fraction(1), Fraction(0))})
            cmap = ComplexPolyMap(m, n, tuple(comps))
            spec = holomorphic_map(cmap)
            dom = build_space(f"euclid:{2 * m}")
            cod = build_space(f"euclid:{2 * n}")
            en = energy_density(dom, cod, spec)
            us, _ = realify(cmap)
            doubled = Expr.zero(2 * m)
            for u in us:
                for j in range(2 * m):
                    du = partial_derivative(u, j)
                    doubled = doubled + 2 * du * du
            assert is_zero(en.num - doubled)
