"""Smooth cutoffs supported in (1, 2) and their moment integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import quadrature

SQRT2 = math.sqrt(2.0)
DEFAULT_MOMENT_TOL = 1e-12


@dataclass(frozen=True)
class CutoffFunction:
    """A cutoff phi with support in the open interval (1, 2).

    Calling the object evaluates phi elementwise and forces exact zeros for
    t <= 1 and t >= 2 regardless of what the evaluator returns there.
    """

    kind: str
    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros(t_arr.shape)
        inside = (t_arr > 1.0) & (t_arr < 2.0)
        if np.any(inside):
            out[inside] = self.evaluator(t_arr[inside])
        if np.ndim(t) == 0:
            return float(out)
        return out


def _bump(t: np.ndarray) -> np.ndarray:
    u = 2.0 * t - 3.0
    return np.exp(1.0 - 1.0 / (1.0 - u * u))


_STANDARD_BUMP = CutoffFunction("standard_bump", "bump", _bump)


def standard_bump() -> CutoffFunction:
    """exp(1 - 1/(1 - u^2)) with u = 2t - 3; peak value 1 at t = 3/2."""
    return _STANDARD_BUMP


def tabulated_cutoff(t, values, name: str = "tabulated") -> CutoffFunction:
    """Cutoff interpolated from samples on [1, 2] by a clamped cubic spline.

    The spline is forced through zero with zero slope at both ends, so the
    samples only need to cover the interior.
    """
    from scipy.interpolate import CubicSpline

    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.shape != values.shape or t.ndim != 1:
        raise ValueError("t and values must be 1-d arrays of equal length")
    keep = (t > 1.0) & (t < 2.0)
    tt = np.concatenate([[1.0], t[keep], [2.0]])
    vv = np.concatenate([[0.0], values[keep], [0.0]])
    if np.any(np.diff(tt) <= 0):
        raise ValueError("sample points must be strictly increasing")
    spline = CubicSpline(tt, vv, bc_type="clamped")
    return CutoffFunction("user_tabulated", name, lambda x: spline(x))


def load_tabulated_cutoff(path) -> CutoffFunction:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return tabulated_cutoff(data[:, 0], data[:, 1], name=f"table:{path}")


def _sign_exponent(sign: str) -> float:
    if sign in ("plus", "+"):
        return 0.5
    if sign in ("minus", "-"):
        return -0.5
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def moment(phi: CutoffFunction, sign: str, k: int, tol: float = DEFAULT_MOMENT_TOL, panels: int = 8) -> float:
    """Integral of t^(+-1/2 - 2k) phi(t^2) over [1, sqrt 2]."""
    if k < 0:
        raise ValueError("k must be non-negative")
    p = _sign_exponent(sign) - 2 * k
    res = quadrature.integrate(
        lambda t: t**p * phi(t * t),
        np.linspace(1.0, SQRT2, panels + 1),
        tol,
    )
    return res.value.real


@dataclass(frozen=True)
class MomentSet:
    plus: tuple[float, ...]
    minus: tuple[float, ...]
    c_plus: complex
    c_minus: complex
    tol: float

    @property
    def n_terms(self) -> int:
        return len(self.plus)


@lru_cache(maxsize=64)
def constants_c(phi: CutoffFunction, tol: float = DEFAULT_MOMENT_TOL, n_terms: int = 1) -> MomentSet:
    """Moments for k < n_terms together with the main-term constants c+ and c-.

    c+ = (i - 1)/(2 pi) * m+_0 and c- = -(i + 1)/(8 pi^2) * m-_0.  Results are
    cached per (phi, tol, n_terms) so repeated calls return the same object.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    plus = tuple(moment(phi, "plus", k, tol) for k in range(n_terms))
    minus = tuple(moment(phi, "minus", k, tol) for k in range(n_terms))
    c_plus = (1j - 1) / (2 * math.pi) * plus[0]
    c_minus = -(1j + 1) / (8 * math.pi**2) * minus[0]
    return MomentSet(plus, minus, c_plus, c_minus, tol)
