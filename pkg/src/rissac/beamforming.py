"""Hybrid precoder construction, MMSE digital stage, SINR and sum-rate.

Every function accepts beamformers with extra leading batch axes (for
example ``f_rf`` of shape ``(S, N_t, N_RF)`` and ``phi`` of shape
``(S, M)``) and evaluates all ``S`` candidates against one channel.

Math-to-code map (``K = N_RF = N_s``)::

    H_eff = H_r^H diag(phi) H F_RF                           (K x N_RF)
    F_BB  = (H_eff^H H_eff + (sigma^2/P) F_RF^H F_RF)^-1 H_eff^H
    F_BB <- sqrt(N_s) F_BB / ||F_RF F_BB||_F
    SINR_k = P |g_kk|^2 / (P sum_{i != k} |g_ki|^2 + sigma^2),  G = H_eff F_BB
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemConfig
from .numerics import SingularMatrixError, cmat_hermitian, cmat_inverse

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseAction:
    analog_phases: np.ndarray  # (N_t, N_RF), radians in [0, 2pi)
    ris_phases: np.ndarray  # (M,), radians in [0, 2pi)

    def __post_init__(self):
        object.__setattr__(self, "analog_phases", canonical_phase(self.analog_phases))
        object.__setattr__(self, "ris_phases", canonical_phase(self.ris_phases))


@dataclass(frozen=True)
class BeamformerSet:
    f_rf: np.ndarray
    f_bb: np.ndarray
    phi: np.ndarray


def canonical_phase(theta) -> np.ndarray:
    """Reduce phases into [0, 2pi)."""
    out = np.mod(np.asarray(theta, dtype=np.float64), TWO_PI)
    # mod can round tiny negatives up to exactly 2pi
    out[out >= TWO_PI] = 0.0
    return out


def analog_precoder(phases) -> np.ndarray:
    phases = np.asarray(phases, dtype=np.float64)
    n_t = phases.shape[-2]
    return np.exp(1j * phases) / np.sqrt(n_t)


def ris_matrix(ris_phases) -> np.ndarray:
    """Diagonal of the RIS reflection matrix (unit-modulus entries)."""
    return np.exp(1j * np.asarray(ris_phases, dtype=np.float64))


def effective_channel(
    chan: ChannelRealization, phi: np.ndarray, f_rf: np.ndarray
) -> np.ndarray:
    """Composite user-by-RF-chain channel ``H_r^H diag(phi) H F_RF``."""
    h, h_r = chan.h_bs_ris, chan.h_r
    phi = np.asarray(phi)
    f_rf = np.asarray(f_rf)
    if phi.shape[-1] != h.shape[0]:
        raise ValueError(f"phi has {phi.shape[-1]} entries, RIS has {h.shape[0]}")
    if f_rf.shape[-2] != h.shape[1]:
        raise ValueError(
            f"F_RF of shape {f_rf.shape[-2:]} does not match N_t={h.shape[1]}"
        )
    cascade = (np.conj(h_r.T) * phi[..., None, :]) @ h  # (..., K, N_t)
    return cascade @ f_rf


def mmse_digital(
    h_eff: np.ndarray,
    f_rf: np.ndarray,
    power: float,
    noise_var: float,
    on_singular: str = "raise",
) -> np.ndarray:
    """Regularised MMSE digital precoder, normalised to ``||F_RF F_BB||_F^2 = N_s``.

    If the effective channel is identically zero the precoder is zero too
    and no normalisation is possible; zeros are returned in that case.

    A rank-deficient ``F_RF`` (for example two RF chains with identical
    phases) makes the regularised Gram matrix singular. By default that
    raises :class:`SingularMatrixError`; ``on_singular="pinv"`` instead uses
    the minimum-norm least-squares solution via the pseudo-inverse.
    """
    if on_singular not in ("raise", "pinv"):
        raise ValueError(f"on_singular must be 'raise' or 'pinv' (got {on_singular!r})")
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    f_rf = np.asarray(f_rf, dtype=np.complex128)
    if h_eff.shape[-1] != f_rf.shape[-1]:
        raise ValueError(
            f"H_eff of shape {h_eff.shape[-2:]} does not match F_RF of shape {f_rf.shape[-2:]}"
        )
    n_s = h_eff.shape[-2]
    h_eff_h = cmat_hermitian(h_eff)
    gram = h_eff_h @ h_eff + (noise_var / power) * (cmat_hermitian(f_rf) @ f_rf)
    try:
        f_bb = cmat_inverse(gram) @ h_eff_h
    except SingularMatrixError:
        if on_singular == "raise":
            raise
        f_bb = np.linalg.pinv(gram, rcond=1e-10, hermitian=True) @ h_eff_h
    norm = np.sqrt(np.sum(np.abs(f_rf @ f_bb) ** 2, axis=(-2, -1)))
    safe = np.where(norm > 0, norm, 1.0)
    scale = np.where(norm > 0, np.sqrt(n_s) / safe, 0.0)
    return f_bb * np.asarray(scale)[..., None, None]


def _gains(chan, phi, f_rf, f_bb) -> np.ndarray:
    return effective_channel(chan, phi, f_rf) @ f_bb  # (..., K, K)


def sinr_all(chan, phi, f_rf, f_bb, power: float, noise_var: float) -> np.ndarray:
    """SINR of every user, shape ``(..., K)``."""
    g2 = np.abs(_gains(chan, phi, f_rf, f_bb)) ** 2
    signal = np.diagonal(g2, axis1=-2, axis2=-1)
    interference = g2.sum(axis=-1) - signal
    return power * signal / (power * interference + noise_var)


def sinr(chan, phi, f_rf, f_bb, power: float, noise_var: float, k: int):
    return sinr_all(chan, phi, f_rf, f_bb, power, noise_var)[..., k]


def sum_rate(chan, beamformers: BeamformerSet, power: float, noise_var: float):
    rates = np.log2(
        1.0
        + sinr_all(
            chan, beamformers.phi, beamformers.f_rf, beamformers.f_bb, power, noise_var
        )
    )
    out = rates.sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def close_digital(
    chan: ChannelRealization, action: PhaseAction, cfg: SystemConfig
) -> BeamformerSet:
    """Build ``F_RF`` and ``phi`` from phases, then solve for the MMSE ``F_BB``.

    Degenerate analog phases fall back to the pseudo-inverse solution so
    every action has a defined reward.
    """
    f_rf = analog_precoder(action.analog_phases)
    phi = ris_matrix(action.ris_phases)
    f_bb = mmse_digital(
        effective_channel(chan, phi, f_rf), f_rf, cfg.power, cfg.noise_var, on_singular="pinv"
    )
    return BeamformerSet(f_rf, f_bb, phi)


def phases_sum_rate(
    chan: ChannelRealization,
    analog_phases: np.ndarray,
    ris_phases: np.ndarray,
    cfg: SystemConfig,
):
    """Sum-rate with the MMSE digital stage closed in; batch-friendly."""
    f_rf = analog_precoder(analog_phases)
    phi = ris_matrix(ris_phases)
    f_bb = mmse_digital(
        effective_channel(chan, phi, f_rf), f_rf, cfg.power, cfg.noise_var, on_singular="pinv"
    )
    return sum_rate(chan, BeamformerSet(f_rf, f_bb, phi), cfg.power, cfg.noise_var)
