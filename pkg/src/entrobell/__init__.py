"""Entropic Bell inequality for coarse-grained homodyne detection.

Exact binned outcome distributions of two-mode squeezed vacuum quadrature
measurements, their Shannon entropies, the chained entropy combination
d_qm = 3 S_qm(delta/3) - S_qm(delta), parameter scans and minimisation,
and a finite-shot Monte Carlo counterpart.
"""

from ._version import __version__
from .bell import (
    SCAN_CSV_HEADER,
    AngleGeometry,
    BellEvaluation,
    MinimizationResult,
    MinimizeOptions,
    ScanResult,
    ZeroOffsetScanResult,
    d_qm_value,
    evaluate,
    evaluate_general,
    evaluate_mutual_info,
    minimize,
    scan,
    scan_zero_delta,
    write_json,
)
from .coarse_grain import (
    DEFAULT_TAIL_EPSILON,
    PANEL_QUADRATURE,
    RECTANGLE_CDF,
    BinnedDistribution1D,
    BinnedDistribution2D,
    CoarseGrid,
    GridTooLarge,
    QuadratureBudgetExceeded,
    bin_prob_1d,
    bin_prob_2d,
    binned_joint,
    binned_marginal,
    bvn_rectangle,
    bvn_upper,
    make_grid,
)
from .entropy import (
    PROBABILITY_FLOOR,
    EntropyTerms,
    InvalidDistribution,
    conditional_entropy,
    mutual_information,
    s_qm,
    shannon,
)
from .experiment_sim import (
    ShotBatch,
    bin_counts,
    empirical_d_qm,
    plugin_entropies,
    sample_pairs,
)
from .gaussian_core import (
    JointGaussianCoefficients,
    PhaseSettings,
    TmsvParams,
    TruncationNotConverged,
    closed_form_amplitude,
    coefficients,
    differential_entropies,
    fock_amplitude,
    hermite_functions,
    joint_pdf,
    marginal_pdf,
)
from .validation import CheckResult, run_checks

__all__ = [
    "__version__",
    "AngleGeometry",
    "BellEvaluation",
    "BinnedDistribution1D",
    "BinnedDistribution2D",
    "CheckResult",
    "CoarseGrid",
    "DEFAULT_TAIL_EPSILON",
    "EntropyTerms",
    "GridTooLarge",
    "InvalidDistribution",
    "JointGaussianCoefficients",
    "MinimizationResult",
    "MinimizeOptions",
    "PANEL_QUADRATURE",
    "PROBABILITY_FLOOR",
    "PhaseSettings",
    "QuadratureBudgetExceeded",
    "RECTANGLE_CDF",
    "SCAN_CSV_HEADER",
    "ScanResult",
    "ShotBatch",
    "TmsvParams",
    "TruncationNotConverged",
    "ZeroOffsetScanResult",
    "bin_counts",
    "bin_prob_1d",
    "bin_prob_2d",
    "binned_joint",
    "binned_marginal",
    "bvn_rectangle",
    "bvn_upper",
    "closed_form_amplitude",
    "coefficients",
    "conditional_entropy",
    "d_qm_value",
    "differential_entropies",
    "empirical_d_qm",
    "evaluate",
    "evaluate_general",
    "evaluate_mutual_info",
    "fock_amplitude",
    "hermite_functions",
    "joint_pdf",
    "make_grid",
    "marginal_pdf",
    "minimize",
    "mutual_information",
    "plugin_entropies",
    "run_checks",
    "s_qm",
    "sample_pairs",
    "scan",
    "scan_zero_delta",
    "shannon",
    "write_json",
]
