"""Non-learning reference schemes: random phases, no RIS, and a random-search oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .beamforming import phases_sum_rate
from .channel import ChannelRealization, SystemConfig, draw_channels


@dataclass(frozen=True)
class BaselineResult:
    scheme: str
    rates: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.rates))

    @property
    def median(self) -> float:
        return float(np.median(self.rates))

    @property
    def std(self) -> float:
        return float(np.std(self.rates))


def _channels(cfg, realizations, rng) -> list[ChannelRealization]:
    if isinstance(realizations, int):
        return draw_channels(cfg, realizations, rng)
    return list(realizations)


def random_phases(cfg: SystemConfig, rng: np.random.Generator, samples: int | None = None):
    """Uniform analog and RIS phases; a leading ``samples`` axis if requested.

    All phases come from a single ``uniform`` call (analog first, then RIS),
    so the first ``n`` of ``samples`` draws equal an ``n``-sample draw from
    the same stream state.
    """
    d = cfg.action_dim
    flat = rng.uniform(0.0, 2 * np.pi, d if samples is None else (samples, d))
    n_analog = cfg.n_t * cfg.n_rf
    analog = flat[..., :n_analog].reshape(*flat.shape[:-1], cfg.n_t, cfg.n_rf)
    return analog, flat[..., n_analog:]


def random_ris_eval(
    cfg: SystemConfig,
    realizations: int | Sequence[ChannelRealization],
    rng: np.random.Generator,
) -> BaselineResult:
    """Random analog and RIS phases with the MMSE digital stage, per realization.

    ``realizations`` is either a count (channels drawn from ``rng``) or the
    channels themselves, which is how paired comparisons share draws.
    """
    channels = _channels(cfg, realizations, rng)
    rates = np.empty(len(channels))
    for i, chan in enumerate(channels):
        analog, ris = random_phases(cfg, rng)
        rates[i] = phases_sum_rate(chan, analog, ris, cfg)
    return BaselineResult("random-ris", rates)


def no_ris_eval(
    cfg: SystemConfig,
    realizations: int | Sequence[ChannelRealization],
    rng: np.random.Generator | None = None,
) -> BaselineResult:
    """Blocked direct links and no RIS: every user's received signal is zero."""
    n = realizations if isinstance(realizations, int) else len(realizations)
    return BaselineResult("no-ris", np.zeros(n))


def random_search_oracle(
    cfg: SystemConfig,
    chan: ChannelRealization,
    samples: int,
    rng: np.random.Generator,
    chunk: int = 4096,
) -> tuple[tuple[np.ndarray, np.ndarray], float]:
    """Best of ``samples`` uniform phase draws (MMSE digital stage each time).

    Draws are evaluated in chunks; the stream is consumed exactly as one
    ``(samples, d)`` draw would be, so nested sample counts share prefixes.
    Returns ``((analog_phases, ris_phases), best_rate)``.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1 (got {samples})")
    best_rate = -np.inf
    best = None
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        analog, ris = random_phases(cfg, rng, n)
        rates = phases_sum_rate(chan, analog, ris, cfg)
        j = int(np.argmax(rates))
        if rates[j] > best_rate:
            best_rate = float(rates[j])
            best = (analog[j].copy(), ris[j].copy())
        done += n
    return best, best_rate


def oracle_eval(
    cfg: SystemConfig,
    channels: Sequence[ChannelRealization],
    samples: int,
    rng: np.random.Generator,
) -> BaselineResult:
    rates = np.array([random_search_oracle(cfg, c, samples, rng)[1] for c in channels])
    return BaselineResult("oracle", rates)
