import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from maass_resonance.analysis import (
    GrowthThresholds,
    classify_growth,
    main_term_prediction,
    detect_level,
    estimate_r,
    estimate_r_from_sums,
    invert_r,
    level_bracket,
    rapid_decay_condition,
    scan_levels,
)
from maass_resonance.cutoff import constants_c
from maass_resonance.errors import DegenerateCurve, GuardViolated, ZeroLevelCoefficient
from maass_resonance.ingest import table_from_values, x_grid
from maass_resonance.resonance import CurvePoint, ResonanceCurve, resonance_sum
from maass_resonance.voronoi import b_star, coeff_d

GRID = x_grid(1000, 2200, 13)
RELAXED = GrowthThresholds(main_term_tol=0.25, decay_slope_max=-0.3, decay_floor=0.9)


def synthetic_curve(f, xs=GRID):
    return ResonanceCurve(tuple(CurvePoint(float(x), complex(f(x))) for x in xs), {})


# --- rapid decay ---------------------------------------------------------------


def test_rapid_decay_examples():
    for c in (1, 3, 5, 11):
        for eps in (0.5, 0.95, 0.999):
            assert rapid_decay_condition(eps / math.sqrt(c), 0.5, 2000.0, c)
        assert not rapid_decay_condition(1.01 / math.sqrt(c), 0.5, 2000.0, c)
    assert rapid_decay_condition(0.0, 1.3, 1e5, 7)
    for q in (1, 2, 5):
        assert not rapid_decay_condition(2 * math.sqrt(q / 5), 0.5, 2200.0, 5)


@settings(max_examples=200, deadline=None)
@given(
    alpha=st.floats(-5, 5),
    beta=st.floats(0.1, 3),
    X=st.floats(1, 1e6),
    D=st.integers(1, 100),
)
def test_rapid_decay_matches_b_star(alpha, beta, X, D):
    four_b = 4 * b_star(alpha, beta, X, D)
    assume(abs(four_b - 1) > 1e-9)
    assert rapid_decay_condition(alpha, beta, X, D) == (four_b < 1)


# --- main-term prediction ----------------------------------------------------------


@pytest.mark.parametrize("norm", ["bessel", "nominal"])
def test_main_term_prediction_substitution(bump, norm):
    ms = constants_c(bump)
    D, X, r, lam_D = 5, 2200.0, 8.0, -0.4472
    got = main_term_prediction(1, D, X, 1.0, lam_D, r, ms, norm)
    kappa, sigma = (2 * math.pi, -1) if norm == "bessel" else (1.0, 1)
    expected = kappa * (ms.c_plus / lam_D * (X / D) ** 0.75 + sigma * ms.c_minus * coeff_d(r, 0) / lam_D * (X / D) ** 0.25)
    assert got == pytest.approx(expected, rel=1e-14)


def test_main_term_prediction_exponents(bump):
    ms = constants_c(bump)
    base = main_term_prediction(2, 5, 1000.0, 0.3, 0.7, 3.0, ms)
    scaled = main_term_prediction(2, 5, 16000.0, 0.3, 0.7, 3.0, ms)
    first = lambda X: 2 * math.pi * ms.c_plus * 2**-0.25 / 0.7 * (X / 5) ** 0.75 * 0.3
    second_base = base - first(1000.0)
    second_scaled = scaled - first(16000.0)
    assert first(16000.0) / first(1000.0) == pytest.approx(8.0, rel=1e-14)
    assert second_scaled / second_base == pytest.approx(2.0, rel=1e-12)


def test_main_term_prediction_zero_level(bump):
    with pytest.raises(ZeroLevelCoefficient):
        main_term_prediction(1, 5, 1000.0, 1.0, 0.0, 1.0, constants_c(bump))


def test_main_term_prediction_against_newform(bump, level5_holo):
    """Newform data at X = 2200: main term within 10x the q-form budget (bessel scale)."""
    from maass_resonance.voronoi import error_budget

    D, X, r = 5, 2200.0, -1.5j
    lam_D = level5_holo[D]
    pred = main_term_prediction(1, D, X, 1.0, lam_D, r, constants_c(bump))
    s = resonance_sum(level5_holo, bump, 2 / math.sqrt(D), 0.5, X)
    budget = 2 * math.pi * error_budget(X, D, r, 1, q=1) / abs(lam_D)
    assert abs(pred - s) <= 10 * budget


# --- spectral parameter --------------------------------------------------------------


def planted_sums(r, D, lam_D, ms, xs, norm="bessel"):
    return {X: main_term_prediction(1, D, X, 1.0, lam_D, r, ms, norm) for X in xs}


@pytest.mark.parametrize("norm", ["bessel", "nominal"])
@pytest.mark.parametrize("r", [1.0, 5.0, 8.0, 12.0])
@pytest.mark.parametrize("D", [1, 5, 13])
def test_planted_r_recovered(bump, norm, r, D):
    ms = constants_c(bump)
    lam_D = 1.0 if D == 1 else -0.6 + 0.0j
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GuardViolated)
        est = estimate_r_from_sums(planted_sums(r, D, lam_D, ms, GRID, norm), D, lam_D, ms, norm)
    assert abs(est.r_corrected - r) <= 1e-6
    assert len(est.per_X) == len(GRID) and est.per_X[-1].X == max(GRID)
    assert all(abs(p.r_corrected - r) <= 1e-6 for p in est.per_X)


def test_literal_variant_offsets(bump):
    ms = constants_c(bump)
    r = 8.01848237839
    X, D = 2200.0, 5
    s_b = main_term_prediction(1, D, X, 1.0, 1.0, r, ms, "bessel")
    s_n = main_term_prediction(1, D, X, 1.0, 1.0, r, ms, "nominal")
    _, lit_b, _ = invert_r(s_b, X, D, 1.0, ms, "bessel")
    _, lit_n, _ = invert_r(s_n, X, D, 1.0, ms, "nominal")
    assert lit_b == pytest.approx(r, abs=1e-8)
    assert lit_n == pytest.approx(math.sqrt(r * r + 1 / 8), abs=1e-8)


def test_estimate_r_on_constructed_table(bump):
    """A table whose single nonzero entry in (X, 2X) makes S equal the planted main term."""
    D, X, r0 = 5, 2200.0, 5.0
    ms = constants_c(bump)
    vals = np.zeros(4400, dtype=complex)
    vals[0] = 1.0
    vals[D - 1] = 0.8
    target = main_term_prediction(1, D, X, 1.0, 0.8, r0, ms)
    n0 = 3300
    alpha = 2 / math.sqrt(D)
    vals[n0 - 1] = target / (bump(n0 / X) * np.exp(2j * math.pi * alpha * math.sqrt(n0)))
    table = table_from_values(vals)
    assert resonance_sum(table, bump, alpha, 0.5, X) == pytest.approx(target, rel=1e-13)
    with pytest.warns(GuardViolated):  # r^4 D / X = 1.42 here
        est = estimate_r(table, D, bump, [X])
    assert abs(est.r_corrected - r0) <= 1e-6


def test_estimate_r_errors_and_guard(bump):
    vals = np.ones(4400)
    vals[4] = 0.0
    with pytest.raises(ZeroLevelCoefficient):
        estimate_r(table_from_values(vals), 5, bump, [1000.0])
    ms = constants_c(bump)
    with pytest.warns(GuardViolated):
        est = estimate_r_from_sums(planted_sums(12.0, 13, 1.0, ms, [1000.0]), 13, 1.0, ms)
    assert est.guard == pytest.approx(12.0**4 * 13 / 1000.0, rel=1e-6)
    with pytest.raises(ValueError):
        estimate_r(table_from_values(np.ones(4400)), 5, bump, [1000.0], variant="other")


def test_estimate_r_newform_sanity(bump, level5_holo):
    # r = -1.5i, so r^2 = -9/4 and the corrected estimate targets |r^2|^(1/2) = 1.5
    est = estimate_r(level5_holo, 5, bump, [1500.0, 2200.0])
    assert abs(est.r_corrected - 1.5) < 0.5
    assert est.guard < 1


# --- growth classification -------------------------------------------------------------


def test_classify_synthetic_regimes():
    assert classify_growth(synthetic_curve(lambda x: x**0.75)).klass == "main_term"
    assert classify_growth(synthetic_curve(lambda x: math.exp(-x / 100))).klass == "rapid_decay"
    assert classify_growth(synthetic_curve(lambda x: x**0.2)).klass == "inconclusive"


@settings(max_examples=100, deadline=None)
@given(A=st.floats(1e-6, 1e6), p=st.floats(-4, 4))
def test_slope_recovery(A, p):
    g = classify_growth(synthetic_curve(lambda x: A * x**p))
    assert abs(g.slope - p) <= 1e-12
    assert g.residual < 1e-12


def test_classify_thresholds_configurable():
    curve = synthetic_curve(lambda x: x**0.2)
    assert classify_growth(curve, GrowthThresholds(main_term_tol=0.6)).klass == "main_term"
    slow = synthetic_curve(lambda x: x**-1.0)
    assert classify_growth(slow).klass == "inconclusive"
    assert classify_growth(slow, RELAXED).klass == "rapid_decay"


def test_classify_preconditions():
    with pytest.raises(ValueError):
        classify_growth(synthetic_curve(lambda x: x, GRID[:7]))
    with pytest.raises(ValueError):
        classify_growth(synthetic_curve(lambda x: x, np.linspace(1000, 1900, 10)))


def test_classify_degenerate_curve():
    with pytest.warns(DegenerateCurve):
        g = classify_growth(synthetic_curve(lambda x: 0.0 if x > 2000 else 1.0))
    assert g.klass == "rapid_decay" and g.slope == -math.inf


# --- level brackets -----------------------------------------------------------------


def test_bracket_example():
    br = level_bracket(5, 1, 0.95, 2200)
    assert round(br.lower, 2) == 4.77 and round(br.upper, 2) == 5.54
    assert br.integer_candidates == (5,) and br.resolved == 5


def test_bracket_limits():
    for c, q in [(5, 1), (7, 2), (12, 3)]:
        lows = [level_bracket(c, q, 0.9, X).lower for X in (1e3, 1e4, 1e6)]
        assert lows[0] < lows[1] < lows[2] < c / q
        assert lows[2] == pytest.approx(c / q, rel=1e-2)
        assert level_bracket(c, q, 0.9, 1e3).upper == c / 0.9**2
    br = level_bracket(9, 1, 1 - 1e-9, 1e15)
    assert br.integer_candidates == (9,) and br.resolved == 9
    wide = level_bracket(5, 1, 0.5, 2200)
    assert wide.resolved is None and len(wide.integer_candidates) > 1
    with pytest.raises(ValueError):
        level_bracket(5, 1, 1.0, 2200)


# --- level detection -------------------------------------------------------------------


def test_detect_level_zero_table(bump):
    vals = np.zeros(4400)
    vals[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCurve)
        assert detect_level(table_from_values(vals), bump, range(1, 7), x_grid=GRID) == []


def test_newform_scan_facts(bump, level5_holo):
    rows = {row.c: row for row in scan_levels(level5_holo, bump, range(1, 7), x_grid=GRID)}
    # the dual test rejects c = 1 although curve A looks like a main term
    assert rows[1].curve_a.klass == "main_term"
    assert rows[1].curve_b.klass != "rapid_decay"
    assert not rows[1].admitted
    # at the true level the resonant curve grows like X^(3/4)
    assert rows[5].curve_a.klass == "main_term"
    assert abs(rows[5].curve_a.slope - 0.75) < 0.1
    # curve B is only evaluated when curve A passed
    assert all((row.curve_b is None) == (row.curve_a.klass != "main_term") for row in rows.values())
    assert rows[5].bracket.resolved == 5


def test_detect_level_scale_invariant(bump, level5_holo):
    cs = range(1, 7)
    for th in (None, RELAXED):
        base = [b.c for b in detect_level(level5_holo, bump, cs, x_grid=GRID, thresholds=th)]
        scaled = [b.c for b in detect_level(level5_holo.scaled(7.3), bump, cs, x_grid=GRID, thresholds=th)]
        assert base == scaled
    assert 5 in base  # relaxed thresholds admit the true level on this data


def test_scan_parallel_and_errors(bump, level5_holo):
    serial = scan_levels(level5_holo, bump, [5, 3, 4], x_grid=GRID)
    parallel = scan_levels(level5_holo, bump, [3, 4, 5], x_grid=GRID, workers=3)
    assert [r.c for r in serial] == [3, 4, 5]
    assert serial == parallel
    rows = scan_levels(level5_holo, bump, [2, 3], x_grid=x_grid(1000, 3000, 9))
    assert all(row.error and "OutOfRange" in row.error and not row.admitted for row in rows)
    with pytest.raises(ValueError):
        scan_levels(level5_holo, bump, [1], q=0, x_grid=GRID)
