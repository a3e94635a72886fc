"""Recover the level and spectral parameter of a Maass cusp form from its
Fourier coefficients using smoothed resonance sums."""

__version__ = "0.1.0"

from .analysis import (
    GrowthClassification,
    GrowthThresholds,
    LevelBracket,
    SpectralEstimate,
    classify_growth,
    main_term_prediction,
    detect_level,
    estimate_r,
    level_bracket,
    rapid_decay_condition,
    scan_levels,
)
from .cutoff import CutoffFunction, MomentSet, constants_c, moment, standard_bump, tabulated_cutoff
from .ingest import FourierCoefficientTable, load_coefficients, parse_coefficients, table_from_values
from .oscillatory import PhaseSpec, p_bound, p_integral, q_floor
from .resonance import ResonanceCurve, resonance_curve, resonance_sum
from .voronoi import b_star, coeff_C, coeff_d, coeff_F, error_budget, g_term, dual_expansion

__all__ = [
    "__version__",
    "GrowthClassification",
    "GrowthThresholds",
    "LevelBracket",
    "SpectralEstimate",
    "classify_growth",
    "main_term_prediction",
    "detect_level",
    "estimate_r",
    "level_bracket",
    "rapid_decay_condition",
    "scan_levels",
    "CutoffFunction",
    "MomentSet",
    "constants_c",
    "moment",
    "standard_bump",
    "tabulated_cutoff",
    "FourierCoefficientTable",
    "load_coefficients",
    "parse_coefficients",
    "table_from_values",
    "PhaseSpec",
    "p_bound",
    "p_integral",
    "q_floor",
    "ResonanceCurve",
    "resonance_curve",
    "resonance_sum",
    "b_star",
    "coeff_C",
    "coeff_d",
    "coeff_F",
    "error_budget",
    "g_term",
    "dual_expansion",
]
