"""Exact symbolic checker for infinity-harmonic maps between model geometries."""

from .calculus import (
    ClearedExpr,
    TensionReport,
    energy_density,
    hessian_form,
    infinity_laplacian,
    infinity_tension,
    laplace_beltrami,
    metric_gradient,
    p_laplacian,
    p_tension,
    tension_field,
)
from .classify import (
    CrossReport,
    SearchOutcome,
    SuiteResult,
    THEOREMS,
    Verdict,
    cross_validate,
    falsify_search,
    matrix_lemma_condition,
    predict_holomorphic,
    predict_linear,
    predict_quadratic,
    run_suite,
)
from .exprcore import (
    Expr,
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
from .mapspec import (
    ComplexPolyMap,
    MapSpec,
    affine_map,
    custom_map,
    holomorphic_map,
    materialize,
    parse_mapspec,
    quadratic_map,
    realify,
    serialize_mapspec,
)
from .spaces import ChristoffelTable, ModelSpace, build_space, christoffel

__version__ = "0.1.0"

__all__ = [
    "ChristoffelTable",
    "ClearedExpr",
    "ComplexPolyMap",
    "CrossReport",
    "Expr",
    "MapSpec",
    "ModelSpace",
    "SearchOutcome",
    "SuiteResult",
    "THEOREMS",
    "TensionReport",
    "Verdict",
    "affine_map",
    "build_space",
    "christoffel",
    "cos_of",
    "cross_validate",
    "custom_map",
    "energy_density",
    "evaluate",
    "evaluate_exact",
    "exp_of",
    "falsify_search",
    "hessian_form",
    "holomorphic_map",
    "infinity_laplacian",
    "infinity_tension",
    "is_zero",
    "laplace_beltrami",
    "map_digest",
    "materialize",
    "matrix_lemma_condition",
    "metric_gradient",
    "p_laplacian",
    "p_tension",
    "parse_expr",
    "parse_mapspec",
    "partial_derivative",
    "predict_holomorphic",
    "predict_linear",
    "predict_quadratic",
    "quadratic_map",
    "realify",
    "run_suite",
    "serialize_mapspec",
    "sin_of",
    "substitute",
    "tension_field",
    "to_string",
]

from .mapspec import map_digest  # noqa: E402  (re-export)
