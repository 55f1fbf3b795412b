"""Scalar special functions used by the SNR closed forms.

Everything here is a pure function of its arguments. The confluent
hypergeometric routines accept a scalar or a numpy array for the argument
``z`` (parameters ``a`` and ``b`` are always scalars) and return the same
kind they were given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "AccuracySpec",
    "AccuracyError",
    "SpecialFunctionDomainError",
    "gamma_fn",
    "hyp1f1",
    "laguerre_nu",
    "hyp2f1_reg_product",
    "whittaker_m_3_2_1_2",
    "bessel_i",
    "reg_gamma_p",
    "ASYMPTOTIC_SWITCH",
]

# |z| beyond which 1F1(a; b; z), z < 0, is taken from its large-argument expansion.
ASYMPTOTIC_SWITCH = 40.0

_EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class AccuracySpec:
    """Truncation control for series evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_ACCURACY = AccuracySpec()


class SpecialFunctionDomainError(ValueError):
    """Argument outside the supported domain of a special function."""


class AccuracyError(ArithmeticError):
    """A series or quadrature did not reach its tolerance.

    ``partial`` holds the best available value and ``est_error`` an estimate
    of its absolute error.
    """

    def __init__(self, message, partial=None, est_error=None):
        super().__init__(message)
        self.partial = partial
        self.est_error = est_error


def _is_nonpositive_int(x):
    return x <= 0 and float(x).is_integer()


def _wrap(values, scalar):
    return float(values[0]) if scalar else values


def gamma_fn(x):
    """Gamma function for positive real ``x``, via ``exp(lgamma(x))``."""
    if not x > 0:
        raise SpecialFunctionDomainError(f"gamma_fn requires x > 0, got {x}")
    return math.exp(math.lgamma(x))


# ----------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ----------------------------------------------------------------------------

def _series(a, b, z, acc):
    """Raw power series sum_n (a)_n z^n / ((b)_n n!) over an array ``z``."""
    total = np.ones_like(z)
    term = np.ones_like(z)
    for n in range(acc.max_terms):
        term = term * ((a + n) * z / ((b + n) * (n + 1)))
        total = total + term
        if np.all(np.abs(term) <= acc.rel_tol * np.abs(total)):
            return total
    raise AccuracyError(
        f"1F1({a}; {b}; z) series did not converge in {acc.max_terms} terms",
        partial=total, est_error=np.abs(term),
    )


def _asymptotic_neg(a, b, x, acc):
    """Large-x expansion of 1F1(a; b; -x) for x > 0.

    Gamma(b)/Gamma(b-a) x^-a sum_s (a)_s (a-b+1)_s / (s! x^s); the companion
    term is O(exp(-x)) relative and is dropped. Returns ``(value, ok)``
    where ``ok`` flags entries whose expansion reached ``rel_tol`` before the
    terms began to grow.
    """
    lead = np.exp(math.lgamma(b) - math.lgamma(b - a)) * np.power(x, -a)
    sign = _sp.gammasgn(b) * _sp.gammasgn(b - a)
    total = np.ones_like(x)
    term = np.ones_like(x)
    prev = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    ok = np.zeros(x.shape, dtype=bool)
    for s in range(acc.max_terms):
        term = term * ((a + s) * (a - b + 1 + s) / ((s + 1) * x))
        mag = np.abs(term)
        active &= ~(mag > prev)
        total = np.where(active, total + term, total)
        conv = active & (mag <= acc.rel_tol * np.abs(total))
        ok |= conv
        active &= ~conv
        prev = mag
        if not active.any():
            break
    return sign * lead * total, ok


def hyp1f1(a, b, z, acc: AccuracySpec | None = None, method: str = "auto"):
    """Confluent hypergeometric function 1F1(a; b; z) for real arguments.

    ``method="series"`` forces the plain power series. The default route sums
    the power series for z >= 0 (and whenever it terminates), applies the
    Kummer transform e^z 1F1(b-a; b; -z) for -40 <= z < 0 so that the terms
    no longer alternate, and uses the large-argument expansion below z = -40.
    """
    acc = acc or DEFAULT_ACCURACY
    if _is_nonpositive_int(b):
        raise SpecialFunctionDomainError(f"b must not be a non-positive integer, got {b}")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float)).copy()
    if method == "series" or _is_nonpositive_int(a):
        terminating = AccuracySpec(acc.rel_tol, max(acc.max_terms, int(-a) + 2)) if a <= 0 else acc
        return _wrap(_series(a, b, z, terminating), scalar)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")

    out = np.empty_like(z)
    pos = z >= 0
    if np.any(pos):
        out[pos] = _series(a, b, z[pos], acc)
    neg = ~pos
    if np.any(neg):
        x = -z[neg]
        res = np.empty_like(x)
        far = x > ASYMPTOTIC_SWITCH
        if _is_nonpositive_int(b - a):
            far[:] = False
        if np.any(far):
            val, ok = _asymptotic_neg(a, b, x[far], acc)
            res[far] = val
            far_idx = np.flatnonzero(far)
            # entries whose expansion stalled fall back to the Kummer series
            retry = far_idx[~ok]
            if retry.size:
                if np.any(x[retry] > 700.0):
                    raise AccuracyError("1F1 asymptotic expansion stalled at large |z|",
                                        partial=val)
                far[retry] = False
        near = ~far
        if np.any(near):
            xn = x[near]
            res[near] = np.exp(-xn) * _series(b - a, b, xn, acc)
        out[neg] = res
    return _wrap(out, scalar)


def laguerre_nu(nu, x, acc: AccuracySpec | None = None):
    """Laguerre function L_nu(x) = 1F1(-nu; 1; x) for nu in {1/2, 3/2}, x <= 0."""
    if nu not in (0.5, 1.5):
        raise SpecialFunctionDomainError(f"laguerre_nu supports nu in (1/2, 3/2), got {nu}")
    if np.any(np.asarray(x) > 0):
        raise SpecialFunctionDomainError("laguerre_nu is only defined here for x <= 0")
    return hyp1f1(-nu, 1.0, x, acc)


# ----------------------------------------------------------------------------
# (1 - z)^2 2F1(3/2, 3/2; 1; z)
# ----------------------------------------------------------------------------

def _digamma_int(n):
    """psi(n + 1) for integer n >= 0."""
    return -_EULER_GAMMA + math.fsum(1.0 / k for k in range(1, n + 1))


def _digamma_half(n):
    """psi(n + 1/2) for integer n >= 0."""
    return -_EULER_GAMMA - 2.0 * math.log(2.0) + 2.0 * math.fsum(1.0 / (2 * k - 1) for k in range(1, n + 1))


def hyp2f1_reg_product(rho2, acc: AccuracySpec | None = None):
    """Return (1 - rho2)^2 * 2F1(3/2, 3/2; 1; rho2) for 0 <= rho2 < 1.

    The prefactor is absorbed by Euler's transformation, which turns the
    product into 2F1(-1/2, -1/2; 1; rho2) whose series stays bounded up to
    rho2 = 1 (limit 4/pi). For rho2 > 1/2 the logarithmic expansion about
    rho2 = 1 is summed instead, since the direct series converges only
    algebraically there.
    """
    acc = acc or DEFAULT_ACCURACY
    if not 0.0 <= rho2 < 1.0:
        raise SpecialFunctionDomainError(f"hyp2f1_reg_product needs 0 <= rho2 < 1, got {rho2}")
    if rho2 <= 0.5:
        total, term = 1.0, 1.0
        for n in range(acc.max_terms):
            term *= ((n - 0.5) / (n + 1)) ** 2 * rho2
            total += term
            # geometric bound on the remaining tail
            if term * rho2 / (1.0 - rho2) <= 0.01 * acc.rel_tol * total:
                return total
        raise AccuracyError("2F1(-1/2,-1/2;1;z) series did not converge", partial=total, est_error=term)

    w = 1.0 - rho2
    log_w = math.log(w)
    # coefficient (3/2)_n^2 / (n! (n+2)!)
    coef = 0.5
    acc_sum = 0.0
    w_pow = 1.0
    psi1 = _digamma_int(0)
    psi3 = _digamma_int(2)
    psih = _digamma_half(1)
    for n in range(acc.max_terms):
        term = coef * w_pow * (log_w - psi1 - psi3 + 2.0 * psih)
        acc_sum += term
        if abs(term) <= acc.rel_tol * max(abs(acc_sum), 1e-300) and n > 0:
            break
        coef *= (n + 1.5) ** 2 / ((n + 1) * (n + 3))
        w_pow *= w
        psi1 += 1.0 / (n + 1)
        psi3 += 1.0 / (n + 3)
        psih += 1.0 / (n + 1.5)
    else:
        raise AccuracyError("2F1 expansion about z=1 did not converge")
    return (4.0 / math.pi) * (1.0 - 0.25 * w) - w * w / (4.0 * math.pi) * acc_sum


# ----------------------------------------------------------------------------
# Whittaker M_{3/2,1/2}, modified Bessel I_0/I_1, regularized gamma
# ----------------------------------------------------------------------------

def whittaker_m_3_2_1_2(z, acc: AccuracySpec | None = None):
    """Whittaker function M_{3/2,1/2}(z) for z <= 0.

    Uses M_{k,m}(z) = e^{-z/2} z^{m+1/2} 1F1(m-k+1/2; 1+2m; z), which here is
    e^{-z/2} z 1F1(-1/2; 2; z). Once e^{-z/2} overflows the result saturates
    to -inf.
    """
    if z > 0:
        raise SpecialFunctionDomainError(f"whittaker_m_3_2_1_2 requires z <= 0, got {z}")
    if z == 0:
        return 0.0
    f = hyp1f1(-0.5, 2.0, z, acc)
    log_mag = -0.5 * z + math.log(-z) + math.log(f)
    if log_mag > 709.0:
        return -math.inf
    return -math.exp(log_mag)


def bessel_i(order, x, acc: AccuracySpec | None = None):
    """Modified Bessel function of the first kind, orders 0 and 1, x >= 0."""
    acc = acc or DEFAULT_ACCURACY
    if order not in (0, 1):
        raise SpecialFunctionDomainError(f"bessel_i supports orders 0 and 1, got {order}")
    if x < 0:
        raise SpecialFunctionDomainError(f"bessel_i requires x >= 0, got {x}")
    half = 0.5 * x
    term = 1.0 if order == 0 else half
    total = term
    q = half * half
    for k in range(1, max(acc.max_terms, int(2 * x) + 50)):
        term *= q / (k * (k + order))
        total += term
        if term <= acc.rel_tol * total:
            return total
    raise AccuracyError("bessel_i series did not converge", partial=total, est_error=term)


def reg_gamma_p(k, x):
    """Regularized lower incomplete gamma P(k, x) (array-aware)."""
    if not k > 0:
        raise SpecialFunctionDomainError(f"reg_gamma_p requires k > 0, got {k}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise SpecialFunctionDomainError("reg_gamma_p requires x >= 0")
    out = _sp.gammainc(k, x)
    return float(out) if out.ndim == 0 else out
