"""Exact martingale-measure analysis on finite scenario trees, plus Monte
Carlo Doob-Meyer predictability diagnostics."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BudgetError,
    EstimationError,
    InfeasibleMarketError,
    MinimalityViolation,
    NotAdaptedError,
    UnknownIdError,
    ValidationError,
)
from .market import (
    AssetGroup,
    FiltrationSpec,
    Partition,
    ScenarioTree,
    TimeGrid,
    anticipativity_witness,
    common_coarsening,
    full_prefix_filtration,
    is_adapted,
    is_nonanticipative,
    level_partition,
    natural_filtration,
    prefix_partition,
    quadratic_covariation,
)
from .emm import (
    EmmCertificate,
    Measure,
    ResidualReport,
    SolutionGeometry,
    check_martingale,
    emm_exists,
    is_complete,
    solution_geometry,
)
from .lab import (
    EnumerationCaps,
    FiltrationConstraint,
    MinimalityReport,
    canonical_reduction_check,
    contains_driver_sigma,
    contains_driver_throughout,
    enumerate_filtrations,
    meet_construction,
    minimality_report,
    orthogonality_diagnostic,
)
from .obstruction import (
    ObstructionConfig,
    ObstructionReport,
    ObstructionScenario,
    build_three_driver_tree,
    default_constraints,
    obstruction_report,
)
from .sim import PathPanel, SimConfig, SubstreamRegistry, simulate
from .doobmeyer import (
    STRUCTURE_ORDER,
    DiagnosticsRun,
    DoobMeyerDiagnostics,
    GlobalFutureLeak,
    GlobalSmoothed,
    Local,
    Pairwise,
    PriceOnly,
    cross_asset_average,
    decompose,
    diagnostics,
    expanding_ols,
    feature_matrix,
    features,
    run_diagnostics,
    smoothed_drivers,
    standard_structures,
    structure_label,
)
from .treeio import (
    filtration_from_dict,
    filtration_to_dict,
    load_filtration,
    load_tree,
    save_tree,
    tree_from_dict,
    tree_to_dict,
)

__all__ = [
    "AssetGroup",
    "BudgetError",
    "DiagnosticsRun",
    "DoobMeyerDiagnostics",
    "EmmCertificate",
    "EnumerationCaps",
    "EstimationError",
    "FiltrationConstraint",
    "FiltrationSpec",
    "GlobalFutureLeak",
    "GlobalSmoothed",
    "InfeasibleMarketError",
    "Local",
    "Measure",
    "MinimalityReport",
    "MinimalityViolation",
    "NotAdaptedError",
    "ObstructionConfig",
    "ObstructionReport",
    "ObstructionScenario",
    "Pairwise",
    "Partition",
    "PathPanel",
    "PriceOnly",
    "ResidualReport",
    "STRUCTURE_ORDER",
    "ScenarioTree",
    "SimConfig",
    "SolutionGeometry",
    "SubstreamRegistry",
    "TimeGrid",
    "UnknownIdError",
    "ValidationError",
    "anticipativity_witness",
    "build_three_driver_tree",
    "canonical_reduction_check",
    "check_martingale",
    "common_coarsening",
    "contains_driver_sigma",
    "contains_driver_throughout",
    "cross_asset_average",
    "decompose",
    "default_constraints",
    "diagnostics",
    "emm_exists",
    "enumerate_filtrations",
    "expanding_ols",
    "feature_matrix",
    "features",
    "filtration_from_dict",
    "filtration_to_dict",
    "full_prefix_filtration",
    "is_adapted",
    "is_complete",
    "is_nonanticipative",
    "level_partition",
    "load_filtration",
    "load_tree",
    "meet_construction",
    "minimality_report",
    "natural_filtration",
    "obstruction_report",
    "orthogonality_diagnostic",
    "prefix_partition",
    "quadratic_covariation",
    "run_diagnostics",
    "save_tree",
    "simulate",
    "smoothed_drivers",
    "solution_geometry",
    "standard_structures",
    "structure_label",
    "tree_from_dict",
    "tree_to_dict",
]
