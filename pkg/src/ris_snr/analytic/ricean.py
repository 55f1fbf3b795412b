"""Moments of Ricean envelopes and the E{q|q|} moment of a complex Gaussian."""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..specfun import hyp1f1, laguerre_nu, whittaker_m_3_2_1_2

__all__ = [
    "rice_mean",
    "rice_third",
    "ricean_moment",
    "ricean_link",
    "curly_i",
    "curly_i_whittaker",
]

_SQRT_PI = math.sqrt(math.pi)


def ricean_link(kappa):
    """(eta, zeta) of a unit-power Ricean link with K-factor ``kappa``."""
    if math.isinf(kappa):
        return 1.0, 0.0
    zeta = 1.0 / math.sqrt(1.0 + kappa)
    return math.sqrt(kappa) * zeta, zeta


def rice_mean(nu, sigma):
    """E|nu + sigma x| for x ~ CN(0, 1); ``nu`` may be an array of magnitudes."""
    nu = np.abs(nu)
    if sigma == 0:
        return nu if np.ndim(nu) else float(nu)
    return sigma * _SQRT_PI / 2 * laguerre_nu(0.5, -(nu / sigma) ** 2)


def rice_third(nu, sigma):
    """E|nu + sigma x|^3 for x ~ CN(0, 1)."""
    nu = abs(nu)
    if sigma == 0:
        return nu**3
    return sigma**3 * 3 * _SQRT_PI / 4 * laguerre_nu(1.5, -(nu / sigma) ** 2)


def ricean_moment(p: int, kappa: float) -> float:
    """E{r^p}, p = 1..4, for a unit-power Ricean envelope with K-factor ``kappa``."""
    if p not in (1, 2, 3, 4):
        raise ValueError(f"ricean_moment supports p in 1..4, got {p}")
    if not kappa >= 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    eta, zeta = ricean_link(kappa)
    if p == 1:
        return rice_mean(eta, zeta)
    if p == 2:
        return 1.0
    if p == 3:
        return rice_third(eta, zeta)
    return 2 * zeta**4 + 4 * zeta**2 * eta**2 + eta**4


def curly_i(a: float, b: complex) -> complex:
    """E{(a x + b)|a x + b|} for x ~ CN(0, 1).

    Evaluated as (3 sqrt(pi)/4) a b 1F1(-1/2; 2; -|b|^2/a^2), which is the
    Whittaker-function form with the exponentials cancelled analytically, so
    it stays finite for large |b|/a. ``a = 0`` gives the deterministic b|b|.
    """
    if a < 0:
        raise ValueError(f"a must be non-negative, got {a}")
    b = complex(b)
    if abs(b) < 1e-12:
        return 0j
    if a == 0:
        return b * abs(b)
    return 0.75 * _SQRT_PI * a * b * hyp1f1(-0.5, 2.0, -(abs(b) / a) ** 2)


def curly_i_whittaker(a: float, b: complex) -> complex:
    """Same moment through the Whittaker M_{3/2,1/2} representation (overflows for |b| >> a)."""
    b = complex(b)
    if abs(b) < 1e-12:
        return 0j
    z = -(abs(b) / a) ** 2
    pref = -3 * a**3 * _SQRT_PI / (4 * abs(b))
    return pref * cmath.exp(1j * cmath.phase(b) + z / 2) * whittaker_m_3_2_1_2(z)
