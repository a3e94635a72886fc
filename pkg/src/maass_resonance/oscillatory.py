"""The oscillatory integrals P+-(w, k) and the phase-derivative floor Q.

    P+-(w, k) = int_1^sqrt2 t^(+-1/2 - 2k) phi(t^2) e(alpha X^beta t^(2 beta) + w t) dt

with e(x) = exp(2 pi i x).  The phase psi(t) = alpha X^beta t^(2 beta) + w t is
measured in cycles.  Its derivative 2 alpha beta X^beta t^(2 beta - 1) + w is
monotone in t for every beta > 0, so extremes of |psi'| sit at the endpoints
or at the single interior zero, and Q needs no numerical minimization.

Q convention: Q = min_t | |alpha| beta X^beta t^(2 beta - 1) - sqrt(nX/D) |,
i.e. half the cycle-rate min |psi'| for w = -sgn(alpha) 2 sqrt(nX/D).  This is
the normalization for which beta = 1/2, alpha = 2 sqrt(q/D) gives
Q = |sqrt q - sqrt n| sqrt(X/D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .cutoff import SQRT2, CutoffFunction
from .errors import DegenerateQ

DEFAULT_TOL = 1e-10
# |Q| below this fraction of the terms being cancelled counts as an exact zero.
Q_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class PhaseSpec:
    alpha: float
    beta: float
    X: float
    w: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.X > 0:
            raise ValueError(f"X must be positive, got {self.X}")

    @property
    def amplitude(self) -> float:
        """alpha * X^beta, the coefficient of t^(2 beta) in the phase."""
        return self.alpha * self.X**self.beta

    def phase(self, t):
        return self.amplitude * t ** (2 * self.beta) + self.w * t

    def phase_derivative(self, t):
        return 2 * self.beta * self.amplitude * t ** (2 * self.beta - 1) + self.w


@dataclass(frozen=True)
class PIntegralResult:
    value: complex
    est_abs_error: float
    q_floor: float
    panels_used: int


def _min_abs_monotone(lo_val: float, hi_val: float, scale: float) -> float:
    """min |g| over an interval where g is monotone with endpoint values given."""
    if (lo_val <= 0.0 <= hi_val) or (hi_val <= 0.0 <= lo_val):
        return 0.0
    m = min(abs(lo_val), abs(hi_val))
    return 0.0 if m <= Q_ZERO_RTOL * scale else m


def phase_floor(spec: PhaseSpec) -> float:
    """min over [1, sqrt 2] of |psi'(t)| / 2 for the phase's own w."""
    half_w = 0.5 * spec.w
    a1 = spec.beta * spec.amplitude
    a2 = a1 * SQRT2 ** (2 * spec.beta - 1)
    scale = max(abs(a1), abs(a2), abs(half_w))
    return _min_abs_monotone(a1 + half_w, a2 + half_w, scale)


def q_floor(spec: PhaseSpec, n_term: int, D: int) -> float:
    """Q for the dual index n_term at level D (spec.w is not consulted)."""
    if n_term < 1 or D < 1:
        raise ValueError("n_term and D must be positive integers")
    target = math.sqrt(n_term * spec.X / D)
    a1 = abs(spec.alpha) * spec.beta * spec.X**spec.beta
    a2 = a1 * SQRT2 ** (2 * spec.beta - 1)
    return _min_abs_monotone(a1 - target, a2 - target, max(a1, a2, target))


def dual_w(alpha: float, X: float, n: int, D: int, branch: int | None = None) -> float:
    """w = branch * 2 sqrt(nX/D); the default branch is -sgn(alpha)."""
    if branch is None:
        branch = -1 if alpha > 0 else 1
    return branch * 2.0 * math.sqrt(n * X / D)


def p_bound(spec: PhaseSpec, q: float) -> float:
    """Heuristic first-derivative-test bound |alpha| X^beta / Q^3 + 1/Q^2.

    Implied constant 1.  Used only for pruning and error budgets.
    """
    if not q > 0:
        raise DegenerateQ(f"Q = {q!r}: the phase is stationary, evaluate the integral instead")
    return abs(spec.amplitude) / q**3 + 1.0 / q**2


def _exponent(sign: str, k: int) -> float:
    if sign in ("plus", "+"):
        return 0.5 - 2 * k
    if sign in ("minus", "-"):
        return -0.5 - 2 * k
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def initial_mesh(spec: PhaseSpec) -> np.ndarray:
    """Uniform mesh on [1, sqrt 2] with at most pi radians of phase per panel."""
    rate = max(abs(spec.phase_derivative(1.0)), abs(spec.phase_derivative(SQRT2)))
    # rate is in cycles per unit t; pi radians is half a cycle
    panels = max(1, math.ceil(2.0 * rate * (SQRT2 - 1.0)))
    return np.linspace(1.0, SQRT2, panels + 1)


def p_integral(
    spec: PhaseSpec,
    sign: str,
    k: int,
    phi: CutoffFunction,
    tol: float = DEFAULT_TOL,
    max_panels: int = quadrature.DEFAULT_MAX_PANELS,
) -> PIntegralResult:
    if k < 0:
        raise ValueError("k must be non-negative")
    p = _exponent(sign, k)
    two_pi = 2.0 * math.pi
    amp, two_beta, w = spec.amplitude, 2 * spec.beta, spec.w

    def integrand(t):
        cycles = amp * t**two_beta + w * t
        cycles = cycles - np.floor(cycles)
        return t**p * phi(t * t) * np.exp(1j * two_pi * cycles)

    res = quadrature.integrate(integrand, initial_mesh(spec), tol, max_panels)
    return PIntegralResult(res.value, res.abs_error, phase_floor(spec), res.panels)
