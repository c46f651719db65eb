"""The beamforming MDP: phases in, sum-rate out.

State layout (all real)::

    [ previous raw action (N_t*N_RF + M)
    | Re/Im interleaved entries of H, row-major (2*M*N_t)
    | Re/Im interleaved entries of h_1, ..., h_K (2*M*K) ]

The channel part is the realization that produced the most recent reward
(for a freshly reset env, the one the first action will face).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beamforming import PhaseAction, close_digital, sum_rate
from .channel import ChannelRealization, SystemConfig, sample_channel

CHANNEL_REFRESH = ("per-episode", "per-step", "never")


@dataclass(frozen=True)
class EnvConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    steps_per_episode: int = 50
    # "never" keeps the first realization for the env's whole lifetime
    channel_refresh: str = "per-episode"
    standardize: bool = False

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> list[str]:
        errors = []
        if self.steps_per_episode < 1:
            errors.append(f"steps_per_episode must be >= 1 (got {self.steps_per_episode})")
        if self.channel_refresh not in CHANNEL_REFRESH:
            errors.append(
                f"channel_refresh must be one of {', '.join(CHANNEL_REFRESH)} "
                f"(got {self.channel_refresh!r})"
            )
        return errors

    @property
    def action_dim(self) -> int:
        return self.system.action_dim

    @property
    def state_dim(self) -> int:
        s = self.system
        return s.action_dim + 2 * s.m_ris * s.n_t + 2 * s.m_ris * s.k_users


def decode_action(raw, cfg: SystemConfig) -> PhaseAction:
    """Map ``raw`` in [-1, 1]^d to phases ``pi*(raw + 1)``, reduced into [0, 2pi)."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape != (cfg.action_dim,):
        raise ValueError(
            f"action must have shape ({cfg.action_dim},), got {raw.shape}"
        )
    phases = np.pi * (raw + 1.0)
    n_analog = cfg.n_t * cfg.n_rf
    return PhaseAction(
        phases[:n_analog].reshape(cfg.n_t, cfg.n_rf), phases[n_analog:]
    )


def encode_action(action: PhaseAction) -> np.ndarray:
    """Inverse of :func:`decode_action` (up to the 2pi wrap of raw = 1)."""
    phases = np.concatenate([action.analog_phases.ravel(), action.ris_phases])
    return phases / np.pi - 1.0


def channel_features(chan: ChannelRealization, scale: float = 1.0) -> np.ndarray:
    parts = [chan.h_bs_ris.ravel()] + [hk.ravel() for hk in chan.h_ris_user]
    z = np.concatenate(parts)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out * scale if scale != 1.0 else out


class BeamformingEnv:
    """Single-owner environment; never share an instance across threads."""

    def __init__(self, cfg: EnvConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.channel: ChannelRealization | None = None
        self._feature_scale = 1.0 / np.sqrt(cfg.system.m_ris) if cfg.standardize else 1.0
        self._features: np.ndarray | None = None
        self._t = 0

    @property
    def state_dim(self) -> int:
        return self.cfg.state_dim

    @property
    def action_dim(self) -> int:
        return self.cfg.action_dim

    def _set_channel(self, chan: ChannelRealization) -> None:
        self.channel = chan
        self._features = channel_features(chan, self._feature_scale)

    def _encode(self, prev_action: np.ndarray) -> np.ndarray:
        return np.concatenate([prev_action, self._features])

    def reset(self, channel: ChannelRealization | None = None) -> np.ndarray:
        """Start an episode with zero previous action.

        A channel is drawn from the env's stream unless one is passed in, or
        the refresh policy is ``"never"`` and a channel already exists.
        """
        if channel is not None:
            self._set_channel(channel)
        elif self.channel is None or self.cfg.channel_refresh != "never":
            self._set_channel(sample_channel(self.cfg.system, self.rng))
        self._t = 0
        return self._encode(np.zeros(self.action_dim))

    def evaluate(self, raw_action) -> float:
        """Sum-rate of ``raw_action`` on the current channel, without stepping."""
        action = decode_action(raw_action, self.cfg.system)
        bf = close_digital(self.channel, action, self.cfg.system)
        return sum_rate(self.channel, bf, self.cfg.system.power, self.cfg.system.noise_var)

    def step(self, raw_action) -> tuple[np.ndarray, float]:
        if self.channel is None:
            raise RuntimeError("step() called before reset()")
        raw_action = np.asarray(raw_action, dtype=np.float64)
        reward = self.evaluate(raw_action)
        next_state = self._encode(raw_action)
        self._t += 1
        if self.cfg.channel_refresh == "per-step":
            self._set_channel(sample_channel(self.cfg.system, self.rng))
        return next_state, reward

    @property
    def episode_done(self) -> bool:
        return self._t >= self.cfg.steps_per_episode
