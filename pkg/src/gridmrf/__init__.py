"""Discrete pairwise MRF energy minimization on image grids.

Dynamic-programming solvers (single scanline and iterated multi-direction
sweeps) built on fast recursive min-search message operators, for stereo
disparity and 2D motion labeling.
"""

from .dsi import (
    MatchConfig,
    build_composite_cost,
    build_cost_volume,
    build_edge_weights,
    estimate_lambda,
)
from .minplus import (
    INF,
    OperatorStats,
    apply_grms,
    apply_lrms,
    apply_operator,
    apply_sfms,
    operator_stats,
    slice_min,
)
from .model import (
    CostVolume,
    DisparityField,
    EdgeWeights,
    EnergyBreakdown,
    LabelSpace,
    PixelGrid,
    SmoothnessModel,
    evaluate_energy,
    motion_labels,
    stereo_labels,
)
from .scanline import (
    ScanlineProblem,
    backtrack,
    bidirectional_marginals,
    forward_pass,
    marginal_argmin_solution,
    solve_rows,
)
from .edp import (
    SCAN_ORDERS,
    DirectionSums,
    EnergyTrace,
    ScanOrder,
    assemble_marginals,
    edp_pass,
    extract_solution,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "CostVolume",
    "DirectionSums",
    "DisparityField",
    "EdgeWeights",
    "EnergyBreakdown",
    "EnergyTrace",
    "INF",
    "LabelSpace",
    "MatchConfig",
    "OperatorStats",
    "PixelGrid",
    "SCAN_ORDERS",
    "ScanOrder",
    "ScanlineProblem",
    "SmoothnessModel",
    "apply_grms",
    "apply_lrms",
    "apply_operator",
    "apply_sfms",
    "assemble_marginals",
    "backtrack",
    "bidirectional_marginals",
    "build_composite_cost",
    "build_cost_volume",
    "build_edge_weights",
    "edp_pass",
    "estimate_lambda",
    "evaluate_energy",
    "extract_solution",
    "forward_pass",
    "marginal_argmin_solution",
    "motion_labels",
    "operator_stats",
    "slice_min",
    "solve",
    "solve_rows",
    "stereo_labels",
    "__version__",
]
