"""Explicit dual-side expansion of the resonance sum.

For a primitive form of level D and spectral parameter r the smoothed sum
sum_n lambda(n) phi(n/X) e(alpha n^beta) is approximated by

    pref * sum_{n < 4 b*} lambda_D(n) G_N^{-sgn alpha}(n)

where G_N^{+-} collect the first N terms of the J-Bessel asymptotic expansion
integrated against the cutoff, pref = +-1/(D lambda(D)) and b* bounds the dual
indices whose phase can be stationary on the support.

Two normalizations of the main-term constants are provided:

``"bessel"`` (default)
    Constants obtained by integrating the J-Bessel asymptotic term by term:
    an overall factor 2 pi, lead coefficient (1 - i) in G^-, and the
    Atkin-Lehner sign in the prefactor, pref = -1/(D lambda(D)).  These agree
    with exact Bessel integrals and with resonance sums of genuine newforms.

``"nominal"``
    The compact textbook display: unit scale, lead coefficient (i - 1) in G^-
    and pref = +1/(D lambda(D)).  Kept for reproducing published formulas;
    it is off by 2 pi and by the sign of the d-term and it does not satisfy
    the alpha -> -alpha conjugation symmetry.

Gamma ratios are finite products of linear factors; no complex gamma
function is evaluated.  Error budgets use implied constants equal to 1 and
are heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .cutoff import CutoffFunction
from .errors import CutoffExceedsData, OutOfRange, ZeroLevelCoefficient
from .ingest import FourierCoefficientTable, coefficient
from .oscillatory import DEFAULT_TOL, PhaseSpec, p_integral

Real = Union[int, float]
Spectral = Union[float, complex]

ZERO_LEVEL_TOL = 1e-12


@dataclass(frozen=True)
class Normalization:
    name: str
    scale: float
    minus_lead: complex
    prefactor_sign: int

    @property
    def d_sign(self) -> int:
        # sign of the c- d_{r,0} term relative to the c+ term in the one-term main prediction
        return 1 if self.name == "nominal" else -1


NORMALIZATIONS = {
    "bessel": Normalization("bessel", 2 * math.pi, 1 - 1j, -1),
    "nominal": Normalization("nominal", 1.0, 1j - 1, 1),
}
DEFAULT_NORMALIZATION = "bessel"


def get_normalization(name: str | Normalization) -> Normalization:
    if isinstance(name, Normalization):
        return name
    try:
        return NORMALIZATIONS[name]
    except KeyError:
        raise ValueError(f"unknown normalization {name!r}; choose from {sorted(NORMALIZATIONS)}") from None


def gamma_ratio(r: Spectral, k: int) -> complex:
    """Gamma(z + 2k) / Gamma(z - 2k) with z = 2ir + 1/2, as a product of 4k factors."""
    z = 2j * r + 0.5
    prod = 1.0 + 0j
    for j in range(4 * k):
        prod *= z - 2 * k + j
    return prod


def coeff_C(r: Spectral, k: int) -> complex:
    if k < 0:
        raise ValueError("k must be non-negative")
    denom = 2.0 ** (2 * k - 1) * (4 * math.pi) ** (2 * k + 1) * math.factorial(2 * k)
    return (-1) ** k * gamma_ratio(r, k) / denom


def coeff_d(r: Spectral, k: int):
    value = -(4 * r * r + (2 * k + 0.5) ** 2) / (2 * (2 * k + 1))
    if isinstance(value, complex) and value.imag == 0.0:
        return value.real
    return value


def coeff_F(r: Spectral, N: int) -> complex:
    if N < 1:
        raise ValueError("N must be >= 1")
    z = 2j * r + 0.5
    prod = 1.0 + 0j
    for ell in range(1, 4 * N + 1):
        prod *= z - ell
    return prod / math.factorial(2 * N)


def b_star(alpha: Real, beta: Real, X: Real, D: int) -> float:
    return (abs(alpha) * beta) ** 2 * X ** (2 * beta - 1) * D * min(1.0, 2.0 ** (1 - 2 * beta))


def dual_indices(alpha: Real, beta: Real, X: Real, D: int) -> range:
    """The n with 1 <= n < 4 b* (strict inequality on the real bound).

    A bound within 1e-12 relative of an integer is snapped to it first, so
    alpha = 2 sqrt(q/D), beta = 1/2 gives exactly n < 4q despite rounding.
    """
    bound = 4.0 * b_star(alpha, beta, X, D)
    nearest = round(bound)
    if abs(bound - nearest) <= 1e-12 * max(1.0, bound):
        bound = float(nearest)
    n_stop = math.ceil(bound)  # first integer >= bound, excluded
    return range(1, max(n_stop, 1))


def lambda_fD(table: FourierCoefficientTable, n: int, D: int) -> complex:
    value = coefficient(table, n)
    return value if math.gcd(n, D) == 1 else value.conjugate()


def level_coefficient(table: FourierCoefficientTable, D: int) -> complex:
    """lambda(D), refusing values that would make the prefactor blow up."""
    value = coefficient(table, D)
    if abs(value) <= ZERO_LEVEL_TOL:
        raise ZeroLevelCoefficient(D, value)
    return value


@dataclass(frozen=True)
class GPart:
    k: int
    lead: complex  # the P+ (t^{1/2 - 2k}) term
    dterm: complex  # the P- (t^{-1/2 - 2k}) term carrying d_{r,k}


def _g_parts(
    n: int,
    D: int,
    r: Spectral,
    spec: PhaseSpec,
    N: int,
    phi: CutoffFunction,
    branch: int,
    tol: float,
    norm: Normalization,
) -> list[GPart]:
    X = spec.X
    w = branch * 2.0 * math.sqrt(n * X / D)
    ps = PhaseSpec(spec.alpha, spec.beta, X, w)
    if branch > 0:
        lead_c, d_c = 1 + 1j, (1j - 1) / (4 * math.pi)
    else:
        lead_c, d_c = norm.minus_lead, -(1 + 1j) / (4 * math.pi)
    parts = []
    for k in range(N):
        C = coeff_C(r, k)
        pp = p_integral(ps, "plus", k, phi, tol).value
        pm = p_integral(ps, "minus", k, phi, tol).value
        lead = norm.scale * lead_c * C * X ** (0.75 - k) * (n / D) ** (-0.25 - k) * pp
        dterm = norm.scale * d_c * C * coeff_d(r, k) * X ** (0.25 - k) * (n / D) ** (-0.75 - k) * pm
        parts.append(GPart(k, lead, dterm))
    return parts


def _as_spec(spec) -> PhaseSpec:
    if isinstance(spec, PhaseSpec):
        return spec
    if isinstance(spec, dict):
        return PhaseSpec(spec["alpha"], spec["beta"], spec["X"])
    alpha, beta, X = spec
    return PhaseSpec(alpha, beta, X)


def g_term(
    table: FourierCoefficientTable,
    n: int,
    D: int,
    r: Spectral,
    spec,
    N: int,
    phi: CutoffFunction,
    branch: str | int,
    tol: float = DEFAULT_TOL,
    normalization: str | Normalization = DEFAULT_NORMALIZATION,
) -> complex:
    """G_N^{branch}(n), without the lambda_D(n) / (D lambda(D)) factor.

    ``branch`` is "plus"/"minus" (or +1/-1) and selects the sign of
    w = +-2 sqrt(nX/D) in the oscillatory integrals.
    """
    level_coefficient(table, D)
    if n > table.n_max:
        raise OutOfRange(n, table.n_max)
    if N < 1:
        raise ValueError("N must be >= 1")
    b = {"plus": 1, "+": 1, 1: 1, "minus": -1, "-": -1, -1: -1}.get(branch)
    if b is None:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    parts = _g_parts(n, D, r, _as_spec(spec), N, phi, b, tol, get_normalization(normalization))
    return sum((p.lead + p.dterm for p in parts), 0j)


def geometric_factor(u: float, N: int) -> float:
    """sum_{k<N} u^k, i.e. X((r^4 D / X)^N - 1) / (r^4 D - X) with u = r^4 D / X.

    Evaluated as the polynomial, which is continuous through u = 1 (value N).
    """
    return math.fsum(u**k for k in range(N))


def error_budget_terms(X: Real, D: int, r: Spectral, N: int, q: int | None = None) -> dict[str, float]:
    """Individual terms of the heuristic error bound (unit implied constants).

    The 1/lambda(D) prefactor is left to the caller.  Complex r (used for the
    holomorphic analogue) enters through |r|.
    """
    y = X / D
    a = abs(r)
    geo = geometric_factor(a**4 * D / X, N)
    terms = {
        "k_bessel": math.exp(-4 * math.pi * math.sqrt(y)) * y**0.75,
        "truncation": a ** (4 * N) * y ** (0.5 - 2 * N),
        "tail": (1 + a * a) * y ** (0.75 - 2 * N) * geo,
    }
    if q is not None:
        terms["off_resonance"] = q / X * (1 + a * a / math.sqrt(y)) * geo
    return terms


def error_budget(X: Real, D: int, r: Spectral, N: int, q: int | None = None) -> float:
    return math.fsum(error_budget_terms(X, D, r, N, q).values())


def guard(r: Spectral, D: int, X: Real) -> float:
    """r^4 D / X; the expansion is only informative while this is small."""
    return abs(r) ** 4 * D / X


@dataclass(frozen=True)
class TermContribution:
    n: int
    k: int
    plus_part: complex
    minus_part: complex


@dataclass(frozen=True)
class ExpansionResult:
    value: complex
    terms: tuple[TermContribution, ...]
    b_star: float
    n_cutoff: int
    error_budget: float
    guard: float
    params: dict = field(default_factory=dict)

    def contributions(self) -> np.ndarray:
        return np.array([c for t in self.terms for c in (t.plus_part, t.minus_part)], dtype=complex)


def dual_expansion(
    table: FourierCoefficientTable,
    D: int,
    r: Spectral,
    spec,
    N: int,
    phi: CutoffFunction,
    tol: float = DEFAULT_TOL,
    normalization: str | Normalization = DEFAULT_NORMALIZATION,
) -> ExpansionResult:
    """Main terms of the dual expansion with a heuristic error budget."""
    if N < 1:
        raise ValueError("N must be >= 1")
    spec = _as_spec(spec)
    norm = get_normalization(normalization)
    lam_D = level_coefficient(table, D)
    bs = b_star(spec.alpha, spec.beta, spec.X, D)
    indices = dual_indices(spec.alpha, spec.beta, spec.X, D) if spec.alpha != 0 else range(1, 1)
    if len(indices) and 4 * bs > table.n_max * (1 + 1e-12):
        raise CutoffExceedsData(4 * bs, table.n_max)

    branch = -1 if spec.alpha > 0 else 1
    pref = norm.prefactor_sign / (D * lam_D)
    terms = []
    for n in indices:
        weight = pref * lambda_fD(table, n, D)
        for part in _g_parts(n, D, r, spec, N, phi, branch, tol, norm):
            terms.append(TermContribution(n, part.k, weight * part.lead, weight * part.dterm))

    contribs = [c for t in terms for c in (t.plus_part, t.minus_part)]
    value = complex(math.fsum(c.real for c in contribs), math.fsum(c.imag for c in contribs))
    budget = norm.scale * error_budget(spec.X, D, r, N) / abs(lam_D)
    return ExpansionResult(
        value=value,
        terms=tuple(terms),
        b_star=bs,
        n_cutoff=len(indices),
        error_budget=budget,
        guard=guard(r, D, spec.X),
        params={
            "alpha": spec.alpha,
            "beta": spec.beta,
            "X": spec.X,
            "N": N,
            "D": D,
            "r": r,
            "normalization": norm.name,
            "budget": "heuristic",
        },
    )
