"""Third and fourth moments of Y = sum_n |h_ru,n|."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fr import FrResult
from .ricean import ricean_link, ricean_moment
from ..specfun import laguerre_nu

__all__ = [
    "DegenerateVarianceError",
    "y_mean",
    "y_moments_exact_uncorrelated",
    "y_moments_printed_uncorrelated",
    "y_moments_gamma_approx",
    "y_moments_gamma_rayleigh",
    "YMomentComparison",
    "y_moment_comparison",
]

_SQRT_PI = math.sqrt(math.pi)


class DegenerateVarianceError(ArithmeticError):
    """Var{Y} computed as non-positive, so no gamma fit exists."""


def _falling(n, k):
    """n (n-1) ... (n-k+1); zero when k > n."""
    out = 1
    for j in range(k):
        out *= n - j
    return out


def y_mean(N, kappa_ru):
    return N * ricean_moment(1, kappa_ru)


def y_moments_exact_uncorrelated(N: int, kappa_ru: float):
    """(E{Y^3}, E{Y^4}) for i.i.d. Ricean envelopes, by multinomial expansion."""
    m1, m3, m4 = (ricean_moment(p, kappa_ru) for p in (1, 3, 4))
    m2 = 1.0
    c1 = N * m3 + 3 * _falling(N, 2) * m2 * m1 + _falling(N, 3) * m1**3
    c2 = (N * m4 + 4 * _falling(N, 2) * m3 * m1 + 3 * _falling(N, 2) * m2 * m2
          + 6 * _falling(N, 3) * m2 * m1 * m1 + _falling(N, 4) * m1**4)
    return c1, c2


def y_moments_printed_uncorrelated(N: int, kappa_ru: float):
    """Literal transcription of the published C1u/C2u, kept for comparison only.

    The undefined L_ru1 is read as zeta_ru^3 L_{3/2}(-kappa_ru), the only
    reading under which the leading C1u term equals N E{r^3}.
    """
    eta, zeta = ricean_link(kappa_ru)
    L = zeta * laguerre_nu(0.5, -kappa_ru)
    L1 = zeta**3 * laguerre_nu(1.5, -kappa_ru)
    c1 = (3 * _SQRT_PI * N / 4 * L1 + math.pi**1.5 * _falling(N, 3) / 8 * L**3
          + 3 * _SQRT_PI * _falling(N, 2) / 2 * L)
    c2 = (N * (2 * zeta**2 + eta**2 * (4 * zeta + eta**2)) + math.pi**2 * _falling(N, 4) / 16 * L**4
          + 3 * _falling(N, 2) * (1 + _SQRT_PI * L1) + 3 * math.pi * _falling(N, 3) / 2 * L**2)
    return c1, c2


@dataclass(frozen=True)
class YMomentComparison:
    N: int
    kappa_ru: float
    exact: tuple
    printed: tuple

    @property
    def rel_diff(self):
        return tuple(abs(p - e) / abs(e) for p, e in zip(self.printed, self.exact))

    def report(self) -> str:
        d1, d2 = self.rel_diff
        return (f"N={self.N} kappa_ru={self.kappa_ru:g}: "
                f"E[Y^3] exact={self.exact[0]:.10g} printed={self.printed[0]:.10g} (rel diff {d1:.2e}); "
                f"E[Y^4] exact={self.exact[1]:.10g} printed={self.printed[1]:.10g} (rel diff {d2:.2e})")


def y_moment_comparison(N, kappa_ru) -> YMomentComparison:
    return YMomentComparison(N, kappa_ru, y_moments_exact_uncorrelated(N, kappa_ru),
                             y_moments_printed_uncorrelated(N, kappa_ru))


def _gamma_moments(mean, second):
    var = second - mean * mean
    if not var > 0:
        raise DegenerateVarianceError(f"Var{{Y}} = {var:.3e} is not positive")
    a = mean * mean / var
    b = var / mean
    c1 = b**3 * a * (a + 1) * (a + 2)
    c2 = b**4 * a * (a + 1) * (a + 2) * (a + 3)
    return c1, c2


def y_moments_gamma_approx(N: int, fr: FrResult | float, kappa_ru: float):
    """(E{Y^3}, E{Y^4}) from a gamma law matched to the exact E{Y} and E{Y^2}."""
    F = getattr(fr, "value", fr)
    return _gamma_moments(y_mean(N, kappa_ru), N + F)


def y_moments_gamma_rayleigh(N: int, F: FrResult | float):
    """Rayleigh specialisation written with a = N^2 pi / (4(N+F) - N^2 pi)."""
    F = getattr(F, "value", F)
    denom = 4 * (N + F) - N * N * math.pi
    if not denom > 0:
        raise DegenerateVarianceError("4(N+F) - N^2 pi is not positive")
    a = N * N * math.pi / denom
    b = 2 / (N * _SQRT_PI) * (N + F - N * N * math.pi / 4)
    return b**3 * a * (a + 1) * (a + 2), b**4 * a * (a + 1) * (a + 2) * (a + 3)
