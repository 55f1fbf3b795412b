"""Optimal RIS phases, the resulting global channel and its matched-filter SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel_model import ChannelRealization

__all__ = [
    "PhaseConfig",
    "OptimalChannelParts",
    "DegenerateProjectionError",
    "optimal_phi",
    "optimal_parts",
    "global_channel",
    "optimal_channel",
    "snr",
    "y_statistic",
    "optimal_snr_batch",
]

_DEGENERATE = 1e-300


class DegenerateProjectionError(ArithmeticError):
    """a_b^H h_d vanishes, so the co-phasing reference is undefined."""


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    phases: np.ndarray

    @property
    def diag(self) -> np.ndarray:
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class OptimalChannelParts:
    psi: complex
    y: float
    alpha: complex


def _psi(a_b, h_d, strict):
    proj = np.vdot(a_b, h_d)
    if abs(proj) < _DEGENERATE:
        if strict:
            raise DegenerateProjectionError("a_b^H h_d is zero")
        return 1.0 + 0.0j  # any unit reference is optimal here
    return proj / abs(proj)


def optimal_phi(real: ChannelRealization, strict: bool = False) -> PhaseConfig:
    """Phases that co-phase every RIS path with the direct-link projection.

    With ``strict`` a vanishing projection raises; otherwise psi = 1 is used.
    """
    psi = _psi(real.a_b, real.h_d, strict)
    phases = np.angle(psi) + np.angle(real.a_r) - np.angle(real.h_ru)
    return PhaseConfig(np.mod(phases, 2 * math.pi))


def optimal_parts(real: ChannelRealization, strict: bool = False) -> OptimalChannelParts:
    psi = _psi(real.a_b, real.h_d, strict)
    y = y_statistic(real.h_ru_tilde)
    alpha = math.sqrt(real.beta_br * real.beta_ru) * psi * y
    return OptimalChannelParts(psi=complex(psi), y=y, alpha=complex(alpha))


def global_channel(real: ChannelRealization, phi: PhaseConfig) -> np.ndarray:
    """h = h_d + H_br Phi h_ru for an arbitrary phase configuration."""
    if phi.phases.shape != real.h_ru.shape:
        raise ValueError(f"phase vector has shape {phi.phases.shape}, expected {real.h_ru.shape}")
    if real.a_b.shape != real.h_d.shape:
        raise ValueError("a_b and h_d lengths differ")
    # H_br Phi h_ru without forming H_br
    cascade = math.sqrt(real.beta_br) * np.vdot(real.a_r, phi.diag * real.h_ru)
    return real.h_d + cascade * real.a_b


def optimal_channel(real: ChannelRealization) -> np.ndarray:
    """Closed form h_d + alpha a_b of the optimally configured channel."""
    parts = optimal_parts(real)
    return real.h_d + parts.alpha * real.a_b


def snr(h, tau_bar: float) -> float:
    """Matched-filter SNR ||h||^2 tau_bar (linear)."""
    if not tau_bar > 0:
        raise ValueError(f"tau_bar must be positive, got {tau_bar}")
    h = np.asarray(h)
    return float(np.vdot(h, h).real) * tau_bar


def y_statistic(h_ru_tilde) -> float:
    return float(np.abs(np.asarray(h_ru_tilde)).sum())


def optimal_snr_batch(h_d_tilde, h_ru_tilde, a_b, beta_d, cascade_gain, tau_bar):
    """Optimal SNR for a batch of normalised channels (one draw per row).

    ``cascade_gain`` is sqrt(beta_br beta_ru).
    """
    h_d = math.sqrt(beta_d) * h_d_tilde
    proj = h_d @ np.conj(a_b)
    mag = np.abs(proj)
    psi = np.where(mag < _DEGENERATE, 1.0 + 0.0j, proj / np.where(mag > 0, mag, 1.0))
    alpha = cascade_gain * psi * np.abs(h_ru_tilde).sum(axis=1)
    h = h_d + alpha[:, None] * a_b[None, :]
    return tau_bar * np.einsum("ij,ij->i", h.real, h.real) + tau_bar * np.einsum("ij,ij->i", h.imag, h.imag)
