"""sketchlu: sketched generalized-LU low-rank approximation and its relatives,
with a verification harness for the deterministic bounds they satisfy."""

from .bounds import (
    BoundReport,
    GammaMetrics,
    SquareExtension,
    compare_cw_glu,
    extend_square,
    gamma_metrics,
    verify_lu_bounds,
    verify_qr_bounds,
    verify_schur_identities,
)
from .estimator import SketchedLowRank
from .factor import GluFactorization, cw, factorize, glu, prr_rlu, rlu, row_select, rqr
from .generate import SpectrumProfile, gen_from_sigma, gen_matrix, parse_profile, resolve_dims
from .growth import (
    ConditioningStats,
    GrowthResult,
    MinorTailCurve,
    TinyPivotError,
    growth_factors,
    haar_minor_tail,
    precondition_experiment,
)
from .linalg import (
    QrResult,
    SvdResult,
    full_qr,
    generalized_schur_complement,
    pinv,
    singular_values,
    svd,
    thin_qr,
    truncated_svd,
)
from .matio import read_matrix, write_matrix
from .sketch import (
    SketchDims,
    SketchOperator,
    explicit_sketch,
    fwht,
    make_sketch,
    ose_check,
    row_selection_sketch,
    sketch_dims,
)
from .validation import RankDeficiencyError

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ConditioningStats",
    "GammaMetrics",
    "GluFactorization",
    "GrowthResult",
    "MinorTailCurve",
    "QrResult",
    "RankDeficiencyError",
    "SketchDims",
    "SketchOperator",
    "SketchedLowRank",
    "SpectrumProfile",
    "SquareExtension",
    "SvdResult",
    "TinyPivotError",
    "compare_cw_glu",
    "cw",
    "explicit_sketch",
    "extend_square",
    "factorize",
    "full_qr",
    "fwht",
    "gamma_metrics",
    "gen_from_sigma",
    "gen_matrix",
    "generalized_schur_complement",
    "glu",
    "growth_factors",
    "haar_minor_tail",
    "make_sketch",
    "ose_check",
    "parse_profile",
    "pinv",
    "precondition_experiment",
    "prr_rlu",
    "read_matrix",
    "resolve_dims",
    "rlu",
    "row_select",
    "row_selection_sketch",
    "rqr",
    "singular_values",
    "sketch_dims",
    "svd",
    "thin_qr",
    "truncated_svd",
    "verify_lu_bounds",
    "verify_qr_bounds",
    "verify_schur_identities",
    "write_matrix",
]
