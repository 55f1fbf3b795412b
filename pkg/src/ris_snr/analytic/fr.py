"""F_R = sum over i != k of E{|h_ru,i| |h_ru,k|} for normalised UE-RIS channels.

Each element pair is a bivariate Ricean product moment. It depends only on
the correlation magnitude |R_ik| and on the effective LOS phase offset
arg a_i - arg a_k - arg R_ik, so pair values are cached on that key and
summed with ``math.fsum`` in (i, k) order.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from ..specfun import DEFAULT_ACCURACY, AccuracyError, AccuracySpec, hyp2f1_reg_product, laguerre_nu
from .ricean import rice_mean, ricean_link, ricean_moment

__all__ = [
    "FrMethod",
    "FrResult",
    "QuadratureSpec",
    "pair_moment_series",
    "pair_moment_integral",
    "fr_series",
    "fr_integral",
    "fr_perfect_corr",
    "fr_uncorrelated",
    "fr_rayleigh",
    "compute_fr",
    "select_fr_method",
]

_SQRT_PI = math.sqrt(math.pi)
# beyond this radius (in units of the unit-variance Gaussian) the weight is < e^-81
_GAUSS_RADIUS = 9.0
# singular points farther than this from the origin leave the bulk smooth
_FAR_POINT = 7.0


class FrMethod(str, enum.Enum):
    SERIES = "series"
    INTEGRAL = "integral"
    PERFECT_CORR = "perfect_corr"
    UNCORRELATED = "uncorrelated"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True)
class FrResult:
    value: float
    method: FrMethod
    est_error: float = 0.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Refinement control: orders double from ``start_order`` until successive
    estimates differ by less than ``rel_tol`` (relative)."""

    rel_tol: float = 1e-8
    start_order: int = 24
    max_order: int = 768


DEFAULT_QUADRATURE = QuadratureSpec()


def _as_matrix(R):
    return np.asarray(getattr(R, "R", R), dtype=complex)


def _pair_keys(R, a_ru):
    """Yield (i, k, |rho|, effective phase offset) for every ordered pair i != k."""
    R = _as_matrix(R)
    a = np.asarray(a_ru, dtype=complex)
    n = a.size
    if R.shape != (n, n):
        raise ValueError(f"correlation matrix shape {R.shape} does not match {n} elements")
    ph = np.angle(a)
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            rho = abs(R[i, k])
            dth = ph[i] - ph[k] - (cmath.phase(R[i, k]) if rho > 0 else 0.0)
            yield i, k, rho, math.remainder(dth, 2 * math.pi)


def _cache_key(rho, dth):
    # the moment is even in the phase offset
    return (round(rho, 14), round(abs(dth), 11))


def _sum_pairs(R, a_ru, pair_fn):
    cache = {}
    vals, errs = [], []
    for _, _, rho, dth in _pair_keys(R, a_ru):
        key = _cache_key(rho, dth)
        if key not in cache:
            cache[key] = pair_fn(rho, abs(dth))
        v, e = cache[key]
        vals.append(v)
        errs.append(e)
    return math.fsum(vals), math.fsum(errs)


# ----------------------------------------------------------------------------
# Double-series form
# ----------------------------------------------------------------------------

def _log_hyp1f1_table(m_vals, n_max, X):
    """log 1F1(m + 3/2; n + 1; X) for X > 0 on the grid m_vals x 0..n_max."""
    a = (np.asarray(m_vals, dtype=float) + 1.5)[:, None]
    b = np.arange(n_max + 1, dtype=float)[None, :] + 1.0
    with np.errstate(over="ignore"):
        val = _sp.hyp1f1(a, b, X)
    out = np.log(val)
    bad = ~np.isfinite(out)
    if np.any(bad):
        # scipy overflowed; sum the positive series in log space instead
        ai, bi = np.broadcast_to(a, out.shape)[bad], np.broadcast_to(b, out.shape)[bad]
        out[bad] = _log_pos_series(ai, bi, X)
    return out


def _log_pos_series(a, b, X, max_terms=20000):
    logs = [np.zeros_like(a)]
    lt = np.zeros_like(a)
    for k in range(max_terms):
        lt = lt + np.log((a + k) * X / ((b + k) * (k + 1)))
        logs.append(lt)
        if k > X and np.all(lt < np.max(np.stack(logs), axis=0) - 40.0):
            break
    L = np.stack(logs)
    top = L.max(axis=0)
    return top + np.log(np.exp(L - top).sum(axis=0))


# rounding error the double-precision series may carry before it is redone in
# extended precision (the pair value itself is O(1))
SERIES_CERT_TOL = 1e-10
SERIES_MAX_ROWS = 4000


def _series_setup(rho, dtheta, kappa):
    r2 = rho * rho
    mu_c = rho * math.cos(dtheta)
    X = kappa * (1 + r2 - 2 * mu_c) / (1 - r2)
    phi = math.atan2((1 - r2) * math.sin(dtheta), (1 + r2) * math.cos(dtheta) - 2 * rho)
    log_pref = 2 * math.log1p(-r2) - math.log1p(kappa) - 2 * kappa * (1 - mu_c) / (1 - r2)
    return X, phi, log_pref


def _series_double(rho, dtheta, kappa, rel_tol, max_rows):
    """Double-precision sum.

    Returns (value, rounding bound, truncation bound, rows used, max |term|).
    """
    X, phi, log_pref = _series_setup(rho, dtheta, kappa)
    if X > 700:
        raise AccuracyError(f"series argument {X:.1f} too large; use the integral form")
    log_rho = math.log(rho)
    # X underflows to zero for subnormal kappa; then only the n = 0 column survives
    log_x = math.log(X) if X > 0 else -math.inf
    eps = np.finfo(float).eps
    total, round_err, max_term = [], 0.0, 0.0
    small_rows, m0, block = 0, 0, 32
    ra = math.inf
    while m0 < max_rows:
        m = np.arange(m0, min(m0 + block, max_rows))
        lf = _log_hyp1f1_table(m, m[-1], X)
        M, Nn = np.meshgrid(m, np.arange(m[-1] + 1), indexing="ij")
        valid = Nn <= M
        Mv, Nv = np.where(valid, M, 0), np.where(valid, Nn, 0)
        x_pow = np.where(Nv == 0, 0.0, Nv * log_x) if X > 0 else np.where(Nv == 0, 0.0, -np.inf)
        lt = (log_pref + (2 * Mv - Nv) * log_rho + x_pow + 2 * _sp.gammaln(Mv + 1.5) + 2 * lf
              - _sp.gammaln(Mv + 1) - _sp.gammaln(Mv - Nv + 1) - 2 * _sp.gammaln(Nv + 1))
        if np.any(lt[valid] > 700.0):
            raise AccuracyError("series terms overflow double range; use the integral form")
        mag = np.where(valid, np.where(Nv == 0, 1.0, 2.0) * np.exp(lt), 0.0)
        terms = mag * np.cos(Nv * phi)
        # exp(lt) carries about |lt| eps relative error; scipy's 1F1 a few ulps more
        row_err = np.where(mag > 0, mag * (np.abs(np.where(mag > 0, lt, 0.0)) + 16.0), 0.0).sum(axis=1) * eps
        row_abs = mag.sum(axis=1)
        for j in range(len(m)):
            total.extend(terms[j, : m[j] + 1].tolist())
            round_err += row_err[j]
            ra = float(row_abs[j])
            max_term = max(max_term, float(mag[j].max()))
            # pair values lie in (0.5, 1], so an absolute test stays valid even
            # when cancellation has corrupted the running sum
            if ra <= 0.5 * rel_tol:
                small_rows += 1
                if small_rows >= 3:
                    return math.fsum(total), round_err, ra, int(m[j]) + 1, max_term
            else:
                small_rows = 0
        m0 += block
    raise AccuracyError("bivariate series did not converge; use the integral form",
                        partial=math.fsum(total), est_error=ra)


def _series_mp(rho, dtheta, kappa, rows, dps):
    """The same double sum with ``dps`` significant digits over ``rows`` rows.

    Arithmetic runs on gmpy2 ``mpfr`` numbers; mpmath supplies the starting
    1F1 values.
    """
    import gmpy2
    import mpmath as mp

    bits = int(dps * 3.33) + 8
    with gmpy2.context(gmpy2.get_context(), precision=bits), mp.workdps(dps + 5):
        F_ = gmpy2.mpfr
        rho_, dth, kap = F_(rho), F_(dtheta), F_(kappa)
        r2 = rho_ * rho_
        mu_c = rho_ * gmpy2.cos(dth)
        X = kap * (1 + r2 - 2 * mu_c) / (1 - r2)
        phi = gmpy2.atan2((1 - r2) * gmpy2.sin(dth), (1 + r2) * gmpy2.cos(dth) - 2 * rho_)
        pref = (1 - r2) ** 2 / (1 + kap) * gmpy2.exp(-2 * kap * (1 - mu_c) / (1 - r2))
        X_mp = mp.mpf(str(X))
        fact = [F_(1)]
        for j in range(1, rows + 1):
            fact.append(fact[-1] * j)
        rpow = [F_(1)]
        for _ in range(2 * rows):
            rpow.append(rpow[-1] * rho_)
        gm = []
        g = gmpy2.gamma(F_(1.5))
        for m in range(rows):
            gm.append(g * g / fact[m])
            g *= m + F_(1.5)
        terms = []
        for n in range(rows):
            b = n + 1
            # 1F1(a; b; X) from a = 1/2, 3/2 by forward recurrence in a, which is
            # stable for X > 0 because 1F1 is the dominant solution
            f_prev = F_(str(mp.hyp1f1(0.5, b, X_mp)))
            f_cur = F_(str(mp.hyp1f1(1.5, b, X_mp)))
            coef = (1 if n == 0 else 2) * gmpy2.cos(n * phi) * X**n / (fact[n] * fact[n])
            a = F_(1.5)
            for m in range(rows):
                if m >= n:
                    terms.append(coef * rpow[2 * m - n] * gm[m] / fact[m - n] * f_cur * f_cur)
                f_prev, f_cur = f_cur, ((2 * a - b + X) * f_cur + (b - a) * f_prev) / a
                a += 1
        return float(pref * gmpy2.fsum(terms))


def pair_moment_series(rho: float, dtheta: float, kappa: float, acc: AccuracySpec | None = None,
                       precision: str = "auto"):
    """E{r_i r_k} of two unit-power Ricean envelopes by the bivariate double series.

    ``rho`` is the (real, non-negative) correlation of the scattered parts and
    ``dtheta`` the LOS phase offset. The alternating cos(n phi) factors make
    the sum cancel heavily once kappa rho / (1 - rho) is moderate. The double
    precision result carries a rounding bound, and when that bound exceeds
    ``SERIES_CERT_TOL`` (or ``precision="mp"``) the sum is redone in mpmath
    with enough digits to absorb the largest term. Returns ``(value, est_error)``.
    """
    acc = acc or DEFAULT_ACCURACY
    if not 0 <= rho < 1:
        raise ValueError(f"series requires 0 <= rho < 1, got {rho}")
    if kappa == 0:
        return math.pi / 4 * hyp2f1_reg_product(rho * rho, acc), 0.0
    if math.isinf(kappa):
        return 1.0, 0.0
    if rho == 0:
        return ricean_moment(1, kappa) ** 2, 0.0
    value, round_err, trunc, rows, max_term = _series_double(rho, dtheta, kappa, acc.rel_tol, SERIES_MAX_ROWS)
    if precision == "double" or (precision == "auto" and round_err <= SERIES_CERT_TOL):
        return value, round_err + trunc
    digits = 20 + max(0, math.ceil(math.log10(max(max_term, 1.0))))
    return _series_mp(rho, dtheta, kappa, rows + 8, digits), trunc


def fr_series(R_ru, a_ru, kappa_ru: float, acc: AccuracySpec | None = None) -> FrResult:
    acc = acc or DEFAULT_ACCURACY

    def pair(rho, dth):
        if rho >= 1:
            raise AccuracyError("series form requires |rho_ik| < 1; use the perfect-correlation path")
        return pair_moment_series(rho, dth, kappa_ru, acc)

    value, err = _sum_pairs(R_ru, a_ru, pair)
    return FrResult(value, FrMethod.SERIES, err)


# ----------------------------------------------------------------------------
# Integral form
# ----------------------------------------------------------------------------

def _gl(n, lo, hi):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _polar_rule(center, split, n):
    """Nodes/weights for integrating f(g) exp(-|g|^2)/pi dA with a polar grid about ``center``.

    ``split`` (optional) is a second point where the integrand has a kink; the
    angular range starts on the ray through it and each ray is cut where it
    passes closest to it.
    """
    s_max = abs(center) + _GAUSS_RADIUS
    phi0 = cmath.phase(split - center) if split is not None else 0.0
    phis, wphi = _gl(n, phi0, phi0 + 2 * math.pi)
    xs, ws = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for ph, wp in zip(phis, wphi):
        cuts = [0.0]
        if split is not None:
            s_star = ((split - center) * cmath.exp(-1j * ph)).real
            if 1e-12 < s_star < s_max - 1e-12:
                cuts.append(s_star)
        cuts.append(s_max)
        u = cmath.exp(1j * ph)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            s = 0.5 * (hi - lo) * xs + 0.5 * (hi + lo)
            g = center + s * u
            nodes.append(g)
            weights.append(wp * 0.5 * (hi - lo) * ws * s * np.exp(-np.abs(g) ** 2) / math.pi)
    return np.concatenate(nodes), np.concatenate(weights)


def _hermite_rule(n):
    x, w = _sp.roots_hermite(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) / math.pi
    return (X + 1j * Y).ravel(), W.ravel()


def _refine(rule, integrand, quad: QuadratureSpec):
    n = quad.start_order
    g, w = rule(n)
    prev = float(np.dot(w, integrand(g)))
    while True:
        n *= 2
        if n > quad.max_order:
            raise AccuracyError("F_R quadrature did not reach tolerance", partial=prev, est_error=est)
        g, w = rule(n)
        cur = float(np.dot(w, integrand(g)))
        est = abs(cur - prev)
        if est <= quad.rel_tol * abs(cur):
            return cur, est
        prev = cur


def pair_moment_integral(rho: float, dtheta: float, kappa: float, quad: QuadratureSpec | None = None):
    """E{r_i r_k} by two-dimensional quadrature over the scattered part of element i.

    Conditioning on g_i leaves E{r_k | g_i} a Ricean mean, so the integrand is
    zeta |g - c1| E{r_k | g} against the CN(0, 1) density, with a cone at
    c1 = -eta a_i / zeta and a smoothed cone at c2 = -eta a_k / (zeta rho).
    ``rho = 1`` gives the perfect-correlation limit where E{r_k | g} is exact.
    Returns ``(value, est_error)``.
    """
    quad = quad or DEFAULT_QUADRATURE
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    eta, zeta = ricean_link(kappa)
    if zeta == 0:
        return 1.0, 0.0
    a_i = cmath.exp(1j * dtheta)
    c1 = -eta * a_i / zeta
    sigma = zeta * math.sqrt(max(0.0, 1.0 - rho * rho))
    c2 = -eta / (zeta * rho) if rho > 0 else None

    def integrand(g):
        mu = eta + zeta * rho * g
        if sigma == 0:
            cond = np.abs(mu)
        else:
            cond = sigma * _SQRT_PI / 2 * laguerre_nu(0.5, -np.abs(mu / sigma) ** 2)
        return zeta * np.abs(g - c1) * cond

    if abs(c1) <= _FAR_POINT:
        center, other = c1, c2
    elif c2 is not None and abs(c2) <= _FAR_POINT:
        center, other = c2, c1
    else:
        return _refine(_hermite_rule, integrand, quad)
    if other is not None and abs(other - center) < 1e-12:
        other = None
    return _refine(lambda n: _polar_rule(center, other, n), integrand, quad)


def fr_integral(R_ru, a_ru, kappa_ru: float, quad: QuadratureSpec | None = None) -> FrResult:
    value, err = _sum_pairs(R_ru, a_ru, lambda rho, dth: pair_moment_integral(min(rho, 1.0), dth, kappa_ru, quad))
    return FrResult(value, FrMethod.INTEGRAL, err)


def fr_perfect_corr(a_ru, kappa_ru: float, quad: QuadratureSpec | None = None) -> FrResult:
    """F_R with every scattered component fully correlated (|rho_ik| = 1, zero phase)."""
    n = np.asarray(a_ru).size
    ones = np.ones((n, n))
    value, err = _sum_pairs(ones, a_ru, lambda rho, dth: pair_moment_integral(1.0, dth, kappa_ru, quad))
    return FrResult(value, FrMethod.PERFECT_CORR, err)


# ----------------------------------------------------------------------------
# Closed-form special cases
# ----------------------------------------------------------------------------

def fr_uncorrelated(N: int, kappa_ru: float) -> FrResult:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    m1 = ricean_moment(1, kappa_ru)
    return FrResult(N * (N - 1) * m1 * m1, FrMethod.UNCORRELATED, 0.0)


def fr_rayleigh(R_ru) -> FrResult:
    R = _as_matrix(R_ru)
    n = R.shape[0]
    cache = {}
    vals = []
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            r2 = round(abs(R[i, k]) ** 2, 15)
            if r2 not in cache:
                cache[r2] = 1.0 if r2 >= 1.0 else math.pi / 4 * hyp2f1_reg_product(r2)
            vals.append(cache[r2])
    return FrResult(math.fsum(vals), FrMethod.RAYLEIGH, 0.0)


# ----------------------------------------------------------------------------
# Dispatch
# ----------------------------------------------------------------------------

SERIES_MAX_RHO = 0.8
SERIES_MAX_KAPPA = 8.0


def select_fr_method(R_ru, kappa_ru: float) -> FrMethod:
    R = _as_matrix(R_ru)
    off = np.abs(R - np.diag(np.diag(R)))
    max_rho = float(off.max()) if off.size else 0.0
    if max_rho == 0.0:
        return FrMethod.UNCORRELATED
    if kappa_ru == 0:
        return FrMethod.RAYLEIGH
    if np.all(off[~np.eye(R.shape[0], dtype=bool)] == 1.0):
        return FrMethod.PERFECT_CORR
    if max_rho <= SERIES_MAX_RHO and kappa_ru <= SERIES_MAX_KAPPA:
        return FrMethod.SERIES
    return FrMethod.INTEGRAL


def compute_fr(R_ru, a_ru, kappa_ru: float, method: FrMethod | str = "auto",
               acc: AccuracySpec | None = None, quad: QuadratureSpec | None = None) -> FrResult:
    """F_R through the requested (or automatically selected) evaluation path.

    Under automatic selection a series that cannot reach its tolerance falls
    back to the integral form.
    """
    auto = method == "auto"
    if auto:
        method = select_fr_method(R_ru, kappa_ru)
        if method is FrMethod.SERIES:
            try:
                return fr_series(R_ru, a_ru, kappa_ru, acc)
            except AccuracyError:
                return fr_integral(R_ru, a_ru, kappa_ru, quad)
    method = FrMethod(method)
    n = np.asarray(a_ru).size
    if method is FrMethod.UNCORRELATED:
        return fr_uncorrelated(n, kappa_ru)
    if method is FrMethod.RAYLEIGH:
        return fr_rayleigh(R_ru)
    if method is FrMethod.PERFECT_CORR:
        return fr_perfect_corr(a_ru, kappa_ru, quad)
    if method is FrMethod.SERIES:
        return fr_series(R_ru, a_ru, kappa_ru, acc)
    return fr_integral(R_ru, a_ru, kappa_ru, quad)
