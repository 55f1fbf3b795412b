"""Array geometry, correlation matrices and random channel generation.

Element ordering follows the Kronecker product a_y (x) a_z: the z index runs
fastest, so element ``i = p * rows + q`` sits in column ``p`` (y = p d) and
row ``q`` (z = q d). Steering phases and correlation distances share this map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import ScenarioConfig

__all__ = [
    "ArrayGeometry",
    "AngleSet",
    "CorrelationMatrix",
    "RiceanLinkParams",
    "ChannelRealization",
    "ScenarioGeometry",
    "PSDViolationError",
    "vura_steering",
    "exp_correlation",
    "psd_sqrt",
    "build_h_br",
    "scenario_geometry",
    "complex_normal",
    "sample_channels",
    "sample_channel_batch",
]

PSD_TOL = 1e-10


class PSDViolationError(ValueError):
    """Matrix has an eigenvalue below the PSD tolerance."""


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int
    cols: int
    spacing: float

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"array needs at least one row and column, got {self.rows}x{self.cols}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def grid_indices(self):
        """(column, row) index of every element in Kronecker order."""
        p, q = np.divmod(np.arange(self.size), self.rows)
        return p, q


@dataclass(frozen=True)
class AngleSet:
    """Elevation and azimuth in degrees."""

    elevation: float
    azimuth: float

    def __post_init__(self):
        if not 0.0 <= self.elevation <= 180.0:
            raise ValueError(f"elevation must lie in [0, 180], got {self.elevation}")
        if not -90.0 <= self.azimuth <= 90.0:
            raise ValueError(f"azimuth must lie in [-90, 90], got {self.azimuth}")


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    R: np.ndarray
    sqrt: np.ndarray

    @classmethod
    def from_matrix(cls, R):
        R = np.asarray(R, dtype=complex)
        return cls(R=R, sqrt=psd_sqrt(R))

    @property
    def size(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class RiceanLinkParams:
    kappa: float
    beta: float

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError(f"K-factor must be >= 0, got {self.kappa}")
        if not self.beta >= 0:
            raise ValueError(f"link gain must be >= 0, got {self.beta}")

    @property
    def zeta(self) -> float:
        # scattered amplitude sqrt(1/(1+k)); infinite K is pure line of sight
        return 0.0 if math.isinf(self.kappa) else 1.0 / math.sqrt(1.0 + self.kappa)

    @property
    def eta(self) -> float:
        return 1.0 if math.isinf(self.kappa) else math.sqrt(self.kappa / (1.0 + self.kappa))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One fading draw together with the deterministic link geometry."""

    h_d: np.ndarray
    h_ru: np.ndarray
    h_d_tilde: np.ndarray
    h_ru_tilde: np.ndarray
    a_b: np.ndarray
    a_r: np.ndarray
    a_d: np.ndarray
    a_ru: np.ndarray
    beta_d: float
    beta_br: float
    beta_ru: float

    @property
    def H_br(self) -> np.ndarray:
        return build_h_br(self.beta_br, self.a_b, self.a_r)


# ----------------------------------------------------------------------------
# Geometry
# ----------------------------------------------------------------------------

def vura_steering(geom: ArrayGeometry, angles: AngleSet) -> np.ndarray:
    """Planar-array steering vector a_y (x) a_z in the y-z plane."""
    th = math.radians(angles.elevation)
    om = math.radians(angles.azimuth)
    d = geom.spacing
    a_y = np.exp(2j * math.pi * d * np.arange(geom.cols) * math.sin(th) * math.sin(om))
    a_z = np.exp(2j * math.pi * d * np.arange(geom.rows) * math.cos(th))
    return np.kron(a_y, a_z)


def exp_correlation(rho: float, geom: ArrayGeometry) -> CorrelationMatrix:
    """Exponential model R_ik = rho^(d_ik / spacing) over the planar grid."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    p, q = geom.grid_indices()
    dist = np.hypot(p[:, None] - p[None, :], q[:, None] - q[None, :])
    R = np.power(float(rho), dist)  # 0**0 == 1 keeps the diagonal at one
    return CorrelationMatrix.from_matrix(R)


def psd_sqrt(R) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues down to -1e-10 times the largest are treated as rounding and
    clipped to zero.
    """
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {R.shape}")
    scale = max(np.abs(R).max(), 1e-300)
    if np.abs(R - R.conj().T).max() > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    w, V = np.linalg.eigh(0.5 * (R + R.conj().T))
    floor = -PSD_TOL * max(w.max(), 0.0)
    if w.min() < floor:
        raise PSDViolationError(f"eigenvalue {w.min():.3e} below PSD tolerance")
    w = np.clip(w, 0.0, None)
    S = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def build_h_br(beta_br: float, a_b, a_r) -> np.ndarray:
    """Rank-one RIS-to-BS channel sqrt(beta_br) a_b a_r^H."""
    return math.sqrt(beta_br) * np.outer(a_b, np.conj(a_r))


# ----------------------------------------------------------------------------
# Scenario-level geometry (deterministic, cached per config)
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScenarioGeometry:
    bs: ArrayGeometry
    ris: ArrayGeometry
    a_b: np.ndarray
    a_r: np.ndarray
    a_d: np.ndarray
    a_ru: np.ndarray
    R_d: CorrelationMatrix
    R_ru: CorrelationMatrix
    direct: RiceanLinkParams
    ris_link: RiceanLinkParams
    beta_br: float
    tau_bar: float

    @property
    def M(self) -> int:
        return self.bs.size

    @property
    def N(self) -> int:
        return self.ris.size

    @property
    def cascade_gain(self) -> float:
        """G = sqrt(beta_br beta_ru)."""
        return math.sqrt(self.beta_br * self.ris_link.beta)


@lru_cache(maxsize=64)
def scenario_geometry(cfg: ScenarioConfig) -> ScenarioGeometry:
    bs = ArrayGeometry(cfg.M_z, cfg.M_y, cfg.d_b)
    ris = ArrayGeometry(cfg.N_z, cfg.N_y, cfg.d_r)
    geo = ScenarioGeometry(
        bs=bs,
        ris=ris,
        a_b=vura_steering(bs, AngleSet(cfg.theta_A, cfg.omega_A)),
        a_r=vura_steering(ris, AngleSet(cfg.theta_D, cfg.omega_D)),
        a_d=vura_steering(bs, AngleSet(cfg.theta_Ad, cfg.omega_Ad)),
        a_ru=vura_steering(ris, AngleSet(cfg.theta_Dr, cfg.omega_Dr)),
        R_d=exp_correlation(cfg.rho_d, bs),
        R_ru=exp_correlation(cfg.rho_ru, ris),
        direct=RiceanLinkParams(cfg.kappa_d, cfg.beta_d),
        ris_link=RiceanLinkParams(cfg.kappa_ru, cfg.beta_ru),
        beta_br=cfg.beta_br,
        tau_bar=cfg.tau_bar,
    )
    for arr in (geo.a_b, geo.a_r, geo.a_d, geo.a_ru, geo.R_d.R, geo.R_d.sqrt, geo.R_ru.R, geo.R_ru.sqrt):
        arr.setflags(write=False)
    return geo


# ----------------------------------------------------------------------------
# Random channels
# ----------------------------------------------------------------------------

def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) draws."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def sample_channel_batch(geo: ScenarioGeometry, rng: np.random.Generator, n: int):
    """Draw ``n`` normalised channels; returns (h_d_tilde, h_ru_tilde), one row per draw."""
    # draw order (u_d then u_ru) is part of the reproducibility contract
    u_d = complex_normal(rng, (n, geo.M))
    u_ru = complex_normal(rng, (n, geo.N))
    d, r = geo.direct, geo.ris_link
    h_d = d.eta * geo.a_d + d.zeta * (u_d @ geo.R_d.sqrt.T)
    h_ru = r.eta * geo.a_ru + r.zeta * (u_ru @ geo.R_ru.sqrt.T)
    return h_d, h_ru


def sample_channels(cfg: ScenarioConfig, rng: np.random.Generator) -> ChannelRealization:
    geo = scenario_geometry(cfg)
    hd_t, hru_t = sample_channel_batch(geo, rng, 1)
    hd_t, hru_t = hd_t[0], hru_t[0]
    return ChannelRealization(
        h_d=math.sqrt(geo.direct.beta) * hd_t,
        h_ru=math.sqrt(geo.ris_link.beta) * hru_t,
        h_d_tilde=hd_t,
        h_ru_tilde=hru_t,
        a_b=geo.a_b,
        a_r=geo.a_r,
        a_d=geo.a_d,
        a_ru=geo.a_ru,
        beta_d=geo.direct.beta,
        beta_br=geo.beta_br,
        beta_ru=geo.ris_link.beta,
    )
