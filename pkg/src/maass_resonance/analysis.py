"""Decision procedures built on resonance sums.

* ``rapid_decay_condition``: when no dual index can resonate, the sum decays
  faster than any power of X.
* ``main_term_prediction``: the two-term main term at a single resonance q.
* ``estimate_r``: inverts that main term at q = 1 for the spectral parameter.
* ``classify_growth`` / ``level_bracket`` / ``detect_level``: scan candidate
  levels c with a resonant curve (expected growth X^(3/4)) and a
  non-resonant curve (expected rapid decay), and bracket D from the pair.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cutoff import CutoffFunction, MomentSet, constants_c
from .errors import DegenerateCurve, GuardViolated, ResonanceError, ZeroLevelCoefficient
from .ingest import FourierCoefficientTable
from .resonance import ResonanceCurve, resonance_curve, resonance_sum
from .voronoi import (
    DEFAULT_NORMALIZATION,
    Normalization,
    b_star,
    coeff_d,
    get_normalization,
    level_coefficient,
)

MAIN_TERM_SLOPE = 0.75
DEFAULT_Q = 1
DEFAULT_EPSILON = 0.95
MIN_CURVE_POINTS = 8
MIN_CURVE_SPAN = 2.0


def rapid_decay_condition(alpha: float, beta: float, X: float, D: int) -> bool:
    """|alpha| beta X^beta min(1, 2^(1/2 - beta)) < sqrt(X/D) / 2."""
    lhs = abs(alpha) * beta * X**beta * min(1.0, 2.0 ** (0.5 - beta))
    return lhs < 0.5 * math.sqrt(X / D)


def main_term_prediction(
    q: int,
    D: int,
    X: float,
    lambda_q: complex,
    lambda_D: complex,
    r,
    moments: MomentSet,
    normalization: str | Normalization = DEFAULT_NORMALIZATION,
) -> complex:
    """Two-term main term of the resonance sum at alpha = 2 sqrt(q/D), beta = 1/2."""
    if abs(lambda_D) <= 1e-12:
        raise ZeroLevelCoefficient(D, lambda_D)
    norm = get_normalization(normalization)
    y = X / D
    lead = moments.c_plus * q**-0.25 * y**0.75
    dterm = norm.d_sign * moments.c_minus * coeff_d(r, 0) * q**-0.75 * y**0.25
    return norm.scale * (lead + dterm) * lambda_q / lambda_D


# --------------------------------------------------------------------------
# spectral parameter


@dataclass(frozen=True)
class SpectralPoint:
    X: float
    r_literal: float
    r_corrected: float
    inner: complex


@dataclass(frozen=True)
class SpectralEstimate:
    r_literal: float
    r_corrected: float
    per_X: tuple[SpectralPoint, ...]
    guard: float
    c_plus: complex
    c_minus: complex
    normalization: str = DEFAULT_NORMALIZATION


def invert_r(S: complex, X: float, D: int, lambda_D: complex, moments: MomentSet, normalization=DEFAULT_NORMALIZATION):
    """(inner, r_literal, r_corrected) from one resonance value at q = 1.

    ``inner`` isolates the d-term: it equals -d_sign (r^2 + 1/16) on exact
    main-term data.  The literal variant returns |inner - 1/16|^(1/2); the
    corrected one undoes the sign and the 1/16 so planted r comes back exactly.
    """
    norm = get_normalization(normalization)
    y = X / D
    cp, cm = moments.c_plus, moments.c_minus
    inner = lambda_D / (2 * norm.scale * cm) * y**-0.25 * (S - norm.scale * cp / lambda_D * y**0.75)
    r_lit = math.sqrt(abs(inner - 1 / 16))
    r_cor = math.sqrt(abs(-norm.d_sign * inner.real - 1 / 16))
    return inner, r_lit, r_cor


def estimate_r_from_sums(
    sums: Mapping[float, complex],
    D: int,
    lambda_D: complex,
    moments: MomentSet,
    normalization: str | Normalization = DEFAULT_NORMALIZATION,
) -> SpectralEstimate:
    """Invert each (X, S) pair; headline values come from the largest X."""
    if not sums:
        raise ValueError("no resonance values supplied")
    if abs(lambda_D) <= 1e-12:
        raise ZeroLevelCoefficient(D, lambda_D)
    norm = get_normalization(normalization)
    points = []
    for X in sorted(sums):
        inner, r_lit, r_cor = invert_r(sums[X], X, D, lambda_D, moments, norm)
        points.append(SpectralPoint(float(X), r_lit, r_cor, inner))
    last = points[-1]
    g = last.r_corrected**4 * D / last.X
    if g > 1:
        warnings.warn(f"r^4 D / X = {g:.3g} > 1: the main-term inversion is unreliable", GuardViolated, stacklevel=2)
    return SpectralEstimate(last.r_literal, last.r_corrected, tuple(points), g, moments.c_plus, moments.c_minus, norm.name)


def estimate_r(
    table: FourierCoefficientTable,
    D: int,
    phi: CutoffFunction,
    x_grid: Sequence[float],
    variant: str = "corrected",
    normalization: str | Normalization = DEFAULT_NORMALIZATION,
    tol: float = 1e-12,
) -> SpectralEstimate:
    """Spectral parameter from resonance sums at alpha = 2/sqrt(D), beta = 1/2.

    Both variants are always computed; ``variant`` only validates the request
    (callers read ``r_literal`` or ``r_corrected``).
    """
    if variant not in ("literal", "corrected"):
        raise ValueError(f"variant must be 'literal' or 'corrected', got {variant!r}")
    lam_D = level_coefficient(table, D)
    moments = constants_c(phi, tol)
    alpha = 2.0 / math.sqrt(D)
    sums = {float(X): resonance_sum(table, phi, alpha, 0.5, float(X)) for X in x_grid}
    return estimate_r_from_sums(sums, D, lam_D, moments, normalization)


# --------------------------------------------------------------------------
# growth classification


@dataclass(frozen=True)
class GrowthThresholds:
    main_term_tol: float = 0.25
    decay_slope_max: float = -1.5
    decay_floor: float = 0.1


@dataclass(frozen=True)
class GrowthClassification:
    slope: float
    intercept: float
    klass: str
    residual: float


def classify_growth(curve: ResonanceCurve, thresholds: GrowthThresholds | None = None) -> GrowthClassification:
    """Log-log least-squares slope of |S| against X and its regime."""
    th = thresholds or GrowthThresholds()
    xs = curve.xs
    mags = curve.magnitudes
    if xs.size < MIN_CURVE_POINTS:
        raise ValueError(f"need at least {MIN_CURVE_POINTS} points, got {xs.size}")
    if xs[-1] < MIN_CURVE_SPAN * xs[0]:
        raise ValueError(f"grid must span a factor {MIN_CURVE_SPAN} in X")
    if np.any(mags == 0.0):
        warnings.warn("resonance curve contains exact zeros; treated as rapid decay", DegenerateCurve, stacklevel=2)
        return GrowthClassification(-math.inf, math.nan, "rapid_decay", math.nan)

    lx, ly = np.log(xs), np.log(mags)
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    residual = float(np.sqrt(np.mean((ly - A @ np.array([slope, intercept])) ** 2)))
    slope, intercept = float(slope), float(intercept)

    if abs(slope - MAIN_TERM_SLOPE) <= th.main_term_tol:
        klass = "main_term"
    elif slope <= th.decay_slope_max and mags[-1] <= th.decay_floor * mags[0]:
        klass = "rapid_decay"
    else:
        klass = "inconclusive"
    return GrowthClassification(slope, intercept, klass, residual)


# --------------------------------------------------------------------------
# level bracketing


@dataclass(frozen=True)
class LevelBracket:
    c: int
    lower: float
    upper: float
    integer_candidates: tuple[int, ...]
    resolved: int | None


def level_bracket(c: int, q: int, epsilon: float, X: float) -> LevelBracket:
    """c / (sqrt q + sqrt(c / 4X))^2 < D < c / epsilon^2."""
    if c < 1 or q < 1:
        raise ValueError("c and q must be positive integers")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    lower = c / (math.sqrt(q) + math.sqrt(c / (4 * X))) ** 2
    upper = c / epsilon**2
    first = math.floor(lower) + 1
    cands = tuple(d for d in range(first, math.ceil(upper)) if lower < d < upper)
    return LevelBracket(c, lower, upper, cands, cands[0] if len(cands) == 1 else None)


def resonant_alpha(c: int, q: int = DEFAULT_Q) -> float:
    return 2.0 * math.sqrt(q / c)


def dual_alpha(c: int, epsilon: float = DEFAULT_EPSILON) -> float:
    return epsilon / math.sqrt(c)


@dataclass(frozen=True)
class LevelScanRow:
    c: int
    curve_a: GrowthClassification | None = None
    curve_b: GrowthClassification | None = None
    admitted: bool = False
    bracket: LevelBracket | None = None
    error: str | None = None


def _scan_one(table, phi, c, q, epsilon, xs, thresholds) -> LevelScanRow:
    try:
        curve_a = resonance_curve(table, phi, resonant_alpha(c, q), 0.5, xs)
        cls_a = classify_growth(curve_a, thresholds)
        cls_b = None
        if cls_a.klass == "main_term":
            curve_b = resonance_curve(table, phi, dual_alpha(c, epsilon), 0.5, xs)
            cls_b = classify_growth(curve_b, thresholds)
    except (ResonanceError, ValueError) as exc:
        return LevelScanRow(c, error=f"{type(exc).__name__}: {exc}")
    admitted = cls_a.klass == "main_term" and cls_b is not None and cls_b.klass == "rapid_decay"
    return LevelScanRow(c, cls_a, cls_b, admitted, level_bracket(c, q, epsilon, max(xs)))


def scan_levels(
    table: FourierCoefficientTable,
    phi: CutoffFunction,
    c_range: Iterable[int],
    q: int = DEFAULT_Q,
    epsilon: float = DEFAULT_EPSILON,
    x_grid: Sequence[float] = (),
    thresholds: GrowthThresholds | None = None,
    workers: int = 1,
) -> list[LevelScanRow]:
    """Classify curves A and B for every c; rows come back in ascending c.

    A failure for one c (e.g. the grid exceeding the table) is recorded in
    that row's ``error`` and does not stop the scan.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    xs = sorted(float(x) for x in x_grid)
    cs = sorted(set(int(c) for c in c_range))
    th = thresholds or GrowthThresholds()
    if workers > 1 and len(cs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: _scan_one(table, phi, c, q, epsilon, xs, th), cs))
    return [_scan_one(table, phi, c, q, epsilon, xs, th) for c in cs]


def detect_level(
    table: FourierCoefficientTable,
    phi: CutoffFunction,
    c_range: Iterable[int],
    q: int = DEFAULT_Q,
    epsilon: float = DEFAULT_EPSILON,
    x_grid: Sequence[float] = (),
    thresholds: GrowthThresholds | None = None,
    workers: int = 1,
) -> list[LevelBracket]:
    """Brackets for the c whose resonant curve grows and whose dual curve decays."""
    rows = scan_levels(table, phi, c_range, q, epsilon, x_grid, thresholds, workers)
    return [row.bracket for row in rows if row.admitted]


def rapid_decay_b_star(alpha: float, beta: float, X: float, D: int) -> bool:
    """Same condition phrased through b*: no dual index below 4 b*."""
    return 4 * b_star(alpha, beta, X, D) < 1
