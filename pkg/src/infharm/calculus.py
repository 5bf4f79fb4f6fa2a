"""Differential operators for maps between model spaces.

Everything is computed exactly.  Quantities that are honest rational
functions (maps into a conformally flat codomain, connection terms on
conformal spaces) are returned in cleared form: a polynomial-class
numerator together with the clearing divisor, which is a positive function
on the chart, so vanishing of the numerator is equivalent to vanishing of
the true quantity.

Tension components follow the convention g(grad phi^a, grad |dphi|^2)
without the 1/2 prefactor; the p-tension identity
``tau_p = |dphi|^{p-2} tau_2 + (p-2) |dphi|^{p-4} tau_inf`` holds with
``tau_inf`` equal to half the reported components, and the p=4 suite pins
that convention against an independent divergence-form computation.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exprcore import (
    DimensionError,
    Expr,
    UnsupportedExpressionError,
    evaluate,
    evaluate_float,
    is_zero,
    max_term_magnitude,
    partial_derivative,
    substitute,
)
from .mapspec import MapSpec, materialize
from .spaces import ModelSpace, christoffel

NUMERIC_TOL = 1e-9
SAMPLE_COUNT = 64
SAMPLE_DENOMINATOR = 64
WITNESS_SEED = 0xD1CE


@dataclass(frozen=True)
class ClearedExpr:
    """A quantity num / clearing with polynomial-class num and positive clearing."""

    num: Expr
    clearing: Expr

    @property
    def is_plain(self) -> bool:
        return self.clearing.constant_value() == 1


@dataclass(frozen=True)
class Witness:
    point: tuple[Fraction, ...]
    component: int
    value: float


@dataclass(frozen=True)
class TensionReport:
    energy_density: Expr | None           # cleared numerator; None in numeric-only mode
    energy_clearing: Expr | None
    components: tuple[Expr, ...] | None   # cleared tension components
    tension_clearing: Expr | None
    verdict: str                          # "zero" | "nonzero"
    witness: Witness | None
    mode: str                             # "exact" | "numeric"

    @property
    def is_harmonic(self) -> bool:
        return self.verdict == "zero"


def _components_of(phi) -> tuple[Expr, ...]:
    if isinstance(phi, MapSpec):
        return materialize(phi)
    return tuple(phi)


def _check_dims(domain: ModelSpace, codomain: ModelSpace, comps: Sequence[Expr]) -> None:
    if len(comps) != codomain.dim:
        raise DimensionError(
            f"map has {len(comps)} components, codomain {codomain.label} has dim"
            f" {codomain.dim}; zero-pad explicitly if that is intended"
        )
    for c in comps:
        if c.nvars != domain.dim:
            raise DimensionError(
                f"component uses {c.nvars} coordinates, domain {domain.label} has dim {domain.dim}"
            )


# ---------------------------------------------------------------------------
# scalar operators


def metric_gradient(space: ModelSpace, f: Expr) -> tuple[Expr, ...]:
    """Vector components (grad f)^i = g^{ij} d_j f."""
    if f.nvars != space.dim:
        raise DimensionError(
            f"scalar uses {f.nvars} coordinates, space has dim {space.dim}"
        )
    partials = [partial_derivative(f, j) for j in range(space.dim)]
    out = []
    for i in range(space.dim):
        total = Expr.zero(space.dim)
        for j in range(space.dim):
            gij = space.g_upper[i][j]
            if gij.terms:
                total = total + gij * partials[j]
        out.append(total)
    return tuple(out)


def gradient_norm_squared(space: ModelSpace, f: Expr) -> Expr:
    """|grad f|^2_g = g^{ij} f_i f_j (polynomial class for catalog spaces)."""
    partials = [partial_derivative(f, j) for j in range(space.dim)]
    total = Expr.zero(space.dim)
    for i in range(space.dim):
        for j in range(space.dim):
            gij = space.g_upper[i][j]
            if gij.terms:
                total = total + gij * partials[i] * partials[j]
    return total


def infinity_laplacian(space: ModelSpace, u: Expr) -> Expr:
    """(1/2) g(grad u, grad |grad u|^2_g)."""
    w = gradient_norm_squared(space, u)
    du = [partial_derivative(u, j) for j in range(space.dim)]
    dw = [partial_derivative(w, j) for j in range(space.dim)]
    total = Expr.zero(space.dim)
    for a in range(space.dim):
        for b in range(space.dim):
            gab = space.g_upper[a][b]
            if gab.terms:
                total = total + gab * du[a] * dw[b]
    return total * Fraction(1, 2)


def hessian_form(space: ModelSpace, u: Expr) -> ClearedExpr:
    """Hess_u(grad u, grad u), cleared by the connection scale."""
    table = christoffel(space)
    v = metric_gradient(space, u)
    du = [partial_derivative(u, k) for k in range(space.dim)]
    total = Expr.zero(space.dim)
    for i in range(space.dim):
        for j in range(space.dim):
            vij = v[i] * v[j]
            if not vij.terms:
                continue
            hij = table.scale * partial_derivative(du[i], j)
            for k in range(space.dim):
                gk = table.gamma[k][i][j]
                if gk.terms:
                    hij = hij - gk * du[k]
            total = total + vij * hij
    return ClearedExpr(num=total, clearing=table.scale)


def laplace_beltrami(space: ModelSpace, u: Expr) -> ClearedExpr:
    """Trace of the Hessian, cleared by the connection scale."""
    table = christoffel(space)
    du = [partial_derivative(u, k) for k in range(space.dim)]
    total = Expr.zero(space.dim)
    for i in range(space.dim):
        for j in range(space.dim):
            gij = space.g_upper[i][j]
            if not gij.terms:
                continue
            hij = table.scale * partial_derivative(du[i], j)
            for k in range(space.dim):
                gk = table.gamma[k][i][j]
                if gk.terms:
                    hij = hij - gk * du[k]
            total = total + gij * hij
    return ClearedExpr(num=total, clearing=table.scale)


def p_laplacian(space: ModelSpace, u: Expr, p: int) -> ClearedExpr:
    """Cleared p-Laplacian |grad u|^{p-4} (|grad u|^2 Lap u + (p-2) InfLap u).

    p must be 2 or an even integer >= 4 to stay in the polynomial class;
    p = 2 reduces to the Laplace-Beltrami operator.
    """
    if not isinstance(p, int) or p < 2 or p % 2 != 0:
        raise UnsupportedExpressionError(
            f"exact p-Laplacian needs an even integer p >= 2, got {p!r}"
        )
    lb = laplace_beltrami(space, u)
    if p == 2:
        return lb
    w = gradient_norm_squared(space, u)
    dinf = infinity_laplacian(space, u)
    num = w ** ((p - 4) // 2) * (w * lb.num + (p - 2) * lb.clearing * dinf)
    return ClearedExpr(num=num, clearing=lb.clearing)


def p_laplacian_at(space: ModelSpace, u: Expr, p: float, point: Sequence[Fraction]) -> float:
    """Numeric p-Laplacian |grad u|^{p-2}(Lap u + (p-2)/|grad u|^2 InfLap u) for real p > 2."""
    w = evaluate(gradient_norm_squared(space, u), point)
    lb = laplace_beltrami(space, u)
    lap = evaluate(lb.num, point) / evaluate(lb.clearing, point)
    dinf = evaluate(infinity_laplacian(space, u), point)
    if w == 0.0:
        return 0.0
    if w < 0.0:
        raise UnsupportedExpressionError(
            "numeric p-Laplacian needs a nonnegative gradient norm (Riemannian chart)"
        )
    return w ** ((p - 2) / 2.0) * lap + (p - 2) * w ** ((p - 4) / 2.0) * dinf


# ---------------------------------------------------------------------------
# map operators


def energy_density(domain: ModelSpace, codomain: ModelSpace, phi) -> ClearedExpr:
    """|dphi|^2 = g^{ij} phi^a_i phi^b_j (h_ab o phi), cleared by the codomain scale."""
    comps = _components_of(phi)
    _check_dims(domain, codomain, comps)
    m, n = domain.dim, codomain.dim
    jac = [[partial_derivative(comps[a], i) for i in range(m)] for a in range(n)]
    num = Expr.zero(m)
    for a in range(n):
        for b in range(n):
            hab = codomain.g_lower[a][b]
            if not hab.terms:
                continue
            hab_phi = substitute(hab, comps)
            pair = Expr.zero(m)
            for i in range(m):
                for j in range(m):
                    gij = domain.g_upper[i][j]
                    if gij.terms:
                        pair = pair + gij * jac[a][i] * jac[b][j]
            num = num + pair * hab_phi
    clearing = substitute(codomain.lower_scale, comps)
    return ClearedExpr(num=num, clearing=clearing)


def _tension_components(
    domain: ModelSpace, codomain: ModelSpace, comps: tuple[Expr, ...]
) -> tuple[tuple[Expr, ...], Expr, ClearedExpr]:
    """Cleared tension components, their clearing, and the cleared energy."""
    energy = energy_density(domain, codomain, comps)
    m = domain.dim
    jac = [[partial_derivative(c, i) for i in range(m)] for c in comps]
    dnum = [partial_derivative(energy.num, j) for j in range(m)]
    plain = energy.is_plain
    if not plain:
        dclr = [partial_derivative(energy.clearing, j) for j in range(m)]
    out = []
    for a in range(len(comps)):
        total = Expr.zero(m)
        for i in range(m):
            for j in range(m):
                gij = domain.g_upper[i][j]
                if not gij.terms:
                    continue
                if plain:
                    grad_w = dnum[j]
                else:
                    grad_w = dnum[j] * energy.clearing - energy.num * dclr[j]
                total = total + gij * jac[a][i] * grad_w
        out.append(total)
    clearing = energy.clearing * energy.clearing
    return tuple(out), clearing, energy


def _child_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def sample_points(
    nvars: int, count: int, seed: int, denominator: int = SAMPLE_DENOMINATOR
) -> list[tuple[Fraction, ...]]:
    """Deterministic rational sample points in [-1, 1]^nvars."""
    rng = random.Random(_child_seed(seed, f"points:{nvars}:{count}"))
    return [
        tuple(Fraction(rng.randint(-denominator, denominator), denominator) for _ in range(nvars))
        for _ in range(count)
    ]


def _witness_candidates(nvars: int) -> list[tuple[Fraction, ...]]:
    ones = tuple(Fraction(1) for _ in range(nvars))
    candidates = [ones]
    for i in range(nvars):
        for s in (1, -1):
            pt = [Fraction(0)] * nvars
            pt[i] = Fraction(s)
            candidates.append(tuple(pt))
    candidates.extend(sample_points(nvars, 200, WITNESS_SEED, denominator=8))
    return candidates


def _find_witness(components: Sequence[Expr], nvars: int) -> Witness:
    for pt in _witness_candidates(nvars):
        for idx, comp in enumerate(components):
            if not comp.terms:
                continue
            val = evaluate(comp, pt)
            if math.isfinite(val) and abs(val) > NUMERIC_TOL:
                return Witness(point=pt, component=idx, value=val)
    raise UnsupportedExpressionError(
        "no witness point found for a symbolically nonzero tension"
    )


def numeric_zero_check(
    components: Sequence[Expr],
    nvars: int,
    seed: int = 0,
    count: int = SAMPLE_COUNT,
    tol: float = NUMERIC_TOL,
) -> bool:
    """All components stay below tol at `count` sample points.

    Tolerance is absolute after normalizing by 1 + |largest monomial| at the
    point, which keeps the test meaningful for large cleared numerators.
    """
    for pt in sample_points(nvars, count, seed):
        for comp in components:
            scale = 1.0 + max_term_magnitude(comp, pt)
            if abs(evaluate(comp, pt)) > tol * scale:
                return False
    return True


def infinity_tension(
    domain: ModelSpace,
    codomain: ModelSpace,
    phi,
    mode: str = "exact",
    seed: int = 0,
) -> TensionReport:
    """Tension components g(grad phi^a, grad |dphi|^2) with an exact verdict.

    mode "exact" decides by the symbolic zero test and falls back to numeric
    sampling only when the composition leaves the decidable class; mode
    "numeric" forces the sampled verdict.
    """
    comps = _components_of(phi)
    _check_dims(domain, codomain, comps)
    try:
        components, clearing, energy = _tension_components(domain, codomain, comps)
        symbolic_ok = True
    except UnsupportedExpressionError:
        symbolic_ok = False
    if symbolic_ok and mode == "exact":
        if all(is_zero(c) for c in components):
            return TensionReport(
                energy_density=energy.num,
                energy_clearing=energy.clearing,
                components=components,
                tension_clearing=clearing,
                verdict="zero",
                witness=None,
                mode="exact",
            )
        return TensionReport(
            energy_density=energy.num,
            energy_clearing=energy.clearing,
            components=components,
            tension_clearing=clearing,
            verdict="nonzero",
            witness=_find_witness(components, domain.dim),
            mode="exact",
        )
    if symbolic_ok:
        zero = numeric_zero_check(components, domain.dim, seed=seed)
        witness = None if zero else _find_witness(components, domain.dim)
        return TensionReport(
            energy_density=energy.num,
            energy_clearing=energy.clearing,
            components=components,
            tension_clearing=clearing,
            verdict="zero" if zero else "nonzero",
            witness=witness,
            mode="numeric",
        )
    return _numeric_tension_report(domain, codomain, comps, seed)


# ---------------------------------------------------------------------------
# numeric fallback: evaluates the tension pointwise without symbolic
# composition of the codomain metric (needed e.g. for trig maps into Sol)


class NumericTension:
    """Pointwise tension evaluator that bypasses symbolic composition.

    Domain-side derivatives are taken symbolically once at construction;
    at each point the codomain metric is evaluated in floats at phi(point)
    and the tension is assembled numerically.  This is an independent route
    to the same quantity as the cleared symbolic components (up to the
    positive clearing factor), used for the exact/numeric coherence checks
    and as the fallback when composition leaves the symbolic class.
    """

    def __init__(self, domain: ModelSpace, codomain: ModelSpace, comps: tuple[Expr, ...]):
        m, n = domain.dim, codomain.dim
        self.domain = domain
        self.codomain = codomain
        self.comps = comps
        self.m, self.n = m, n
        self.jac = [[partial_derivative(comps[a], i) for i in range(m)] for a in range(n)]
        self.hess = [
            [[partial_derivative(self.jac[a][i], k) for k in range(m)] for i in range(m)]
            for a in range(n)
        ]
        self.dgu = [
            [[partial_derivative(domain.g_upper[i][j], k) for k in range(m)] for j in range(m)]
            for i in range(m)
        ]
        self.dh = [
            [[partial_derivative(codomain.g_lower[a][b], g) for g in range(n)] for b in range(n)]
            for a in range(n)
        ]
        self.dscale = [partial_derivative(codomain.lower_scale, g) for g in range(n)]

    def at(self, point) -> tuple[list[float], float]:
        """Tension component values at a rational point, plus a size scale."""
        m, n = self.m, self.n
        gu = [[evaluate(self.domain.g_upper[i][j], point) for j in range(m)] for i in range(m)]
        dgu = [
            [[evaluate(self.dgu[i][j][k], point) for k in range(m)] for j in range(m)]
            for i in range(m)
        ]
        jval = [[evaluate(self.jac[a][i], point) for i in range(m)] for a in range(n)]
        hval = [
            [[evaluate(self.hess[a][i][k], point) for k in range(m)] for i in range(m)]
            for a in range(n)
        ]
        phi_pt = [evaluate(c, point) for c in self.comps]
        d_val = evaluate_float(self.codomain.lower_scale, phi_pt)
        dd_val = [evaluate_float(self.dscale[g], phi_pt) for g in range(n)]
        h_val = [[0.0] * n for _ in range(n)]
        dh_val = [[[0.0] * n for _ in range(n)] for _ in range(n)]  # [gamma][a][b]
        for a in range(n):
            for b in range(n):
                gab = self.codomain.g_lower[a][b]
                if not gab.terms:
                    continue
                gv = evaluate_float(gab, phi_pt)
                h_val[a][b] = gv / d_val
                for g in range(n):
                    dgv = evaluate_float(self.dh[a][b][g], phi_pt)
                    dh_val[g][a][b] = (dgv * d_val - gv * dd_val[g]) / (d_val * d_val)
        wgrad = [0.0] * m
        for k in range(m):
            total = 0.0
            for i in range(m):
                for j in range(m):
                    for a in range(n):
                        for b in range(n):
                            hab = h_val[a][b]
                            if hab == 0.0 and all(dh_val[g][a][b] == 0.0 for g in range(n)):
                                continue
                            dpart = (
                                dgu[i][j][k] * jval[a][i] * jval[b][j]
                                + gu[i][j] * (hval[a][i][k] * jval[b][j] + jval[a][i] * hval[b][j][k])
                            )
                            total += dpart * hab
                            chain = sum(dh_val[g][a][b] * jval[g][k] for g in range(n))
                            total += gu[i][j] * jval[a][i] * jval[b][j] * chain
            wgrad[k] = total
        values = []
        scale = 0.0
        for a in range(n):
            total = 0.0
            for i in range(m):
                for j in range(m):
                    term = gu[i][j] * jval[a][i] * wgrad[j]
                    scale = max(scale, abs(term))
                    total += term
            values.append(total)
        return values, scale


def independent_numeric_check(
    domain: ModelSpace,
    codomain: ModelSpace,
    phi,
    seed: int = 0,
    count: int = SAMPLE_COUNT,
    tol: float = NUMERIC_TOL,
) -> bool:
    """All numerically assembled tension values stay below tol at sample points."""
    comps = _components_of(phi)
    evaluator = NumericTension(domain, codomain, comps)
    for pt in sample_points(domain.dim, count, seed):
        values, scale = evaluator.at(pt)
        for val in values:
            if abs(val) > tol * (1.0 + scale):
                return False
    return True


def _numeric_tension_report(
    domain: ModelSpace, codomain: ModelSpace, comps: tuple[Expr, ...], seed: int
) -> TensionReport:
    evaluator = NumericTension(domain, codomain, comps)
    points = sample_points(domain.dim, SAMPLE_COUNT, seed)
    worst = 0.0
    worst_point = None
    worst_comp = 0
    worst_val = 0.0
    for pt in points:
        values, scale = evaluator.at(pt)
        for idx, val in enumerate(values):
            ratio = abs(val) / (1.0 + scale)
            if ratio > worst:
                worst = ratio
                worst_point = pt
                worst_comp = idx
                worst_val = val
    if worst <= NUMERIC_TOL:
        return TensionReport(
            energy_density=None,
            energy_clearing=None,
            components=None,
            tension_clearing=None,
            verdict="zero",
            witness=None,
            mode="numeric",
        )
    return TensionReport(
        energy_density=None,
        energy_clearing=None,
        components=None,
        tension_clearing=None,
        verdict="nonzero",
        witness=Witness(point=worst_point, component=worst_comp, value=worst_val),
        mode="numeric",
    )


# ---------------------------------------------------------------------------
# tension field and p-tension


def tension_field(
    domain: ModelSpace, codomain: ModelSpace, phi
) -> tuple[tuple[Expr, ...], Expr]:
    """Cleared harmonic-map tension tau_2 and its clearing divisor."""
    comps = _components_of(phi)
    _check_dims(domain, codomain, comps)
    m, n = domain.dim, codomain.dim
    tdom = christoffel(domain)
    tcod = christoffel(codomain)
    jac = [[partial_derivative(comps[a], i) for i in range(m)] for a in range(n)]
    sc_phi = substitute(tcod.scale, comps)
    gamma_phi = [
        [[substitute(tcod.gamma[g][a][b], comps) if tcod.gamma[g][a][b].terms else Expr.zero(m)
          for b in range(n)] for a in range(n)]
        for g in range(n)
    ]
    out = []
    for g in range(n):
        total = Expr.zero(m)
        for i in range(m):
            for j in range(m):
                gij = domain.g_upper[i][j]
                if not gij.terms:
                    continue
                term = partial_derivative(jac[g][i], j) * tdom.scale * sc_phi
                for k in range(m):
                    gk = tdom.gamma[k][i][j]
                    if gk.terms:
                        term = term - gk * jac[g][k] * sc_phi
                for a in range(n):
                    for b in range(n):
                        gp = gamma_phi[g][a][b]
                        if gp.terms:
                            term = term + gp * jac[a][i] * jac[b][j] * tdom.scale
                total = total + gij * term
        out.append(total)
    clearing = tdom.scale * sc_phi
    return tuple(out), clearing


def _is_flat_euclidean(space: ModelSpace) -> bool:
    return space.label.startswith("euclid:")


def p_tension(
    domain: ModelSpace, codomain: ModelSpace, phi, p: int
) -> tuple[tuple[Expr, ...], Expr]:
    """Cleared p-tension components and their clearing divisor.

    Euclidean-to-Euclidean maps use the divergence form
    ``tau_p^g = sum_i d_i(|dphi|^{p-2} d_i phi^g)`` directly; other pairs
    compose |dphi|^{p-2} tau_2 + (p-2) |dphi|^{p-4} tau_inf.
    """
    if not isinstance(p, int) or p < 2 or p % 2 != 0:
        raise UnsupportedExpressionError(
            f"exact p-tension needs an even integer p >= 2, got {p!r}"
        )
    comps = _components_of(phi)
    _check_dims(domain, codomain, comps)
    if p == 2:
        return tension_field(domain, codomain, comps)
    m = domain.dim
    if _is_flat_euclidean(domain) and _is_flat_euclidean(codomain):
        w = energy_density(domain, codomain, comps).num
        wpow = w ** ((p - 2) // 2)
        out = []
        for c in comps:
            total = Expr.zero(m)
            for i in range(m):
                total = total + partial_derivative(wpow * partial_derivative(c, i), i)
            out.append(total)
        return tuple(out), Expr.const(m, 1)
    t2, c2 = tension_field(domain, codomain, comps)
    tinf, _, energy = _tension_components(domain, codomain, comps)
    d = energy.clearing
    wnum = energy.num
    half = Fraction(1, 2)
    out = []
    wpow = wnum ** ((p - 4) // 2)
    for g in range(len(comps)):
        inner = wnum * t2[g] * d + (p - 2) * (tinf[g] * half) * c2
        out.append(wpow * inner)
    clearing = d ** (p // 2) * c2
    return tuple(out), clearing


def phm_composed_p_tension(
    domain: ModelSpace, codomain: ModelSpace, phi, p: int
) -> tuple[tuple[Expr, ...], Expr]:
    """The composed form |dphi|^{p-2} tau_2 + (p-2)|dphi|^{p-4} tau_inf, always.

    Used to cross-check the divergence route on Euclidean pairs.
    """
    comps = _components_of(phi)
    t2, c2 = tension_field(domain, codomain, comps)
    tinf, _, energy = _tension_components(domain, codomain, comps)
    d = energy.clearing
    wnum = energy.num
    half = Fraction(1, 2)
    wpow = wnum ** ((p - 4) // 2)
    out = tuple(
        wpow * (wnum * t2[g] * d + (p - 2) * (tinf[g] * half) * c2)
        for g in range(len(comps))
    )
    return out, d ** (p // 2) * c2


# ---------------------------------------------------------------------------
# finite-difference oracle for the p-tension (flat pairs), fourth order


def _fd4(f, x: list[float], i: int, h: float) -> float:
    def at(delta: float) -> float:
        y = list(x)
        y[i] += delta
        return f(y)

    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)


def fd_p_tension(
    comps: Sequence[Expr], p: int, point: Sequence[float], h: float = 1e-2
) -> list[float]:
    """Finite-difference p-tension of a Euclidean-to-Euclidean map.

    Computes sum_i d_i(W^{(p-2)/2} d_i phi^g) with all derivatives taken by
    fourth-order central differences on float evaluations of the components;
    independent of the symbolic differentiation path.
    """
    m = comps[0].nvars

    def grad_entry(g: int, i: int, x: list[float]) -> float:
        return _fd4(lambda y: evaluate_float(comps[g], y), x, i, h)

    def wpow(x: list[float]) -> float:
        w = 0.0
        for g in range(len(comps)):
            for i in range(m):
                w += grad_entry(g, i, x) ** 2
        return w ** ((p - 2) / 2.0)

    out = []
    for g in range(len(comps)):
        total = 0.0
        for i in range(m):
            total += _fd4(lambda y, gi=g, ii=i: wpow(y) * grad_entry(gi, ii, y), list(point), i, h)
        out.append(total)
    return out
