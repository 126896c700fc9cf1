"""Exact scalars, integer matrices, polynomials and real algebraic numbers."""

from .algebraic import (
    AlgebraicNumber,
    PoleError,
    Scalar,
    all_real_roots,
    decimal_string,
    evaluate_rational_function,
    isolate_real_roots,
    rational_roots,
    rational_string,
    sign_at,
)
from .linalg import (
    det,
    dot,
    extends_to_basis,
    gcd_maximal_minors,
    invariant_factors,
    nullspace,
    rank,
    smith_normal_form,
    solve_linear_unique,
)
from .poly import RationalFunction1D, UniPoly, poly_gcd, sturm_count, sturm_sequence

__all__ = [
    "AlgebraicNumber",
    "PoleError",
    "RationalFunction1D",
    "Scalar",
    "UniPoly",
    "all_real_roots",
    "decimal_string",
    "det",
    "dot",
    "evaluate_rational_function",
    "extends_to_basis",
    "gcd_maximal_minors",
    "invariant_factors",
    "isolate_real_roots",
    "nullspace",
    "poly_gcd",
    "rank",
    "rational_roots",
    "rational_string",
    "sign_at",
    "smith_normal_form",
    "solve_linear_unique",
    "sturm_count",
    "sturm_sequence",
]
