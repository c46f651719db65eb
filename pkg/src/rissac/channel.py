"""Block-fading geometric mmWave channels for the BS -> RIS -> user links."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import kron_vec, sample_cn01


@dataclass(frozen=True)
class SystemConfig:
    """Physical-layer dimensions and link budget.

    ``k_users`` doubles as the RF-chain count and the stream count; the
    constructor rejects any other combination. ``m_az``/``m_el`` default to
    the square root of ``m_ris`` when it is a perfect square.
    """

    n_t: int = 8
    n_rf: int = 2
    k_users: int = 2
    m_ris: int = 16
    m_az: int | None = None
    m_el: int | None = None
    n_paths: int = 4
    power: float = 10.0
    noise_var: float = 1.0
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.m_az is None and self.m_el is None:
            root = math.isqrt(self.m_ris)
            if root * root != self.m_ris:
                raise ValueError(
                    f"m_ris={self.m_ris} is not a perfect square; give m_az and m_el"
                )
            object.__setattr__(self, "m_az", root)
            object.__setattr__(self, "m_el", root)
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> list[str]:
        errors = []
        if self.n_t < 1:
            errors.append(f"n_t must be >= 1 (got {self.n_t})")
        if not (self.k_users == self.n_rf):
            errors.append(
                f"k_users ({self.k_users}) must equal n_rf ({self.n_rf})"
            )
        if self.k_users < 1:
            errors.append(f"k_users must be >= 1 (got {self.k_users})")
        if self.m_az is None or self.m_el is None or self.m_az * self.m_el != self.m_ris:
            errors.append(
                f"m_az*m_el ({self.m_az}*{self.m_el}) must equal m_ris ({self.m_ris})"
            )
        if self.n_paths < 1:
            errors.append(f"n_paths must be >= 1 (got {self.n_paths})")
        if not (self.power > 0 and math.isfinite(self.power)):
            errors.append(f"power must be positive and finite (got {self.power})")
        if not (self.noise_var > 0 and math.isfinite(self.noise_var)):
            errors.append(f"noise_var must be positive and finite (got {self.noise_var})")
        return errors

    @property
    def n_streams(self) -> int:
        return self.k_users

    @property
    def action_dim(self) -> int:
        return self.n_t * self.n_rf + self.m_ris

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.power / self.noise_var)

    def with_snr_db(self, snr_db: float) -> "SystemConfig":
        """Same system with ``power = noise_var * 10**(snr_db/10)``."""
        from dataclasses import replace

        return replace(self, power=self.noise_var * 10.0 ** (snr_db / 10.0))

    def with_ris_elements(self, m_ris: int) -> "SystemConfig":
        from dataclasses import replace

        return replace(self, m_ris=m_ris, m_az=None, m_el=None)


@dataclass(frozen=True)
class PathParams:
    """Gains and angles of every path behind one realization.

    ``gain``/``aod_bs``/``aoa_ris_*`` have shape ``(L,)`` and describe the
    BS -> RIS link; ``user_gain``/``aod_ris_*`` have shape ``(K, L)``.
    """

    gain: np.ndarray
    aod_bs: np.ndarray
    aoa_ris_az: np.ndarray
    aoa_ris_el: np.ndarray
    user_gain: np.ndarray
    aod_ris_az: np.ndarray
    aod_ris_el: np.ndarray


@dataclass(frozen=True)
class ChannelRealization:
    h_bs_ris: np.ndarray  # (M, N_t)
    h_ris_user: tuple[np.ndarray, ...]  # K vectors of length M
    paths: PathParams | None = field(default=None, compare=False)

    @property
    def h_r(self) -> np.ndarray:
        """Stack of user channels as columns, shape ``(M, K)``."""
        return np.stack(self.h_ris_user, axis=1)

    @property
    def m_ris(self) -> int:
        return self.h_bs_ris.shape[0]

    @property
    def n_t(self) -> int:
        return self.h_bs_ris.shape[1]

    @property
    def k_users(self) -> int:
        return len(self.h_ris_user)

    @classmethod
    def from_arrays(cls, h_bs_ris, h_r) -> "ChannelRealization":
        h_bs_ris = np.asarray(h_bs_ris, dtype=np.complex128)
        h_r = np.asarray(h_r, dtype=np.complex128)
        if h_r.ndim != 2 or h_r.shape[0] != h_bs_ris.shape[0]:
            raise ValueError(
                f"user channels of shape {h_r.shape} do not match H of shape {h_bs_ris.shape}"
            )
        return cls(h_bs_ris, tuple(h_r[:, k].copy() for k in range(h_r.shape[1])))

    @classmethod
    def zeros(cls, cfg: SystemConfig) -> "ChannelRealization":
        return cls.from_arrays(
            np.zeros((cfg.m_ris, cfg.n_t)), np.zeros((cfg.m_ris, cfg.k_users))
        )


def steering_vector(n: int, angle: float, spacing_ratio: float = 0.5) -> np.ndarray:
    """Uniform linear array response with unit norm."""
    if n < 1:
        raise ValueError(f"array size must be >= 1 (got {n})")
    p = np.arange(n)
    return np.exp(-2j * np.pi * spacing_ratio * p * np.cos(angle)) / np.sqrt(n)


def ris_steering(
    m_az: int, m_el: int, az: float, el: float, spacing_ratio: float = 0.5
) -> np.ndarray:
    """Planar RIS response: azimuth ULA response kron elevation ULA response."""
    return kron_vec(
        steering_vector(m_az, az, spacing_ratio),
        steering_vector(m_el, el, spacing_ratio),
    )


def sample_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one realization of ``H`` and every ``h_k``.

    Azimuths are uniform on [0, 2pi), elevations on [0, pi), and gains
    CN(0, 1). Each user gets its own paths. The user-link prefactor is
    ``sqrt(M/L)`` so that ``E||h_k||^2 = M``.
    """
    L, K = cfg.n_paths, cfg.k_users
    gain = sample_cn01(rng, L)
    aod_bs = rng.uniform(0.0, 2 * np.pi, L)
    aoa_az = rng.uniform(0.0, 2 * np.pi, L)
    aoa_el = rng.uniform(0.0, np.pi, L)
    user_gain = sample_cn01(rng, (K, L))
    aod_az = rng.uniform(0.0, 2 * np.pi, (K, L))
    aod_el = rng.uniform(0.0, np.pi, (K, L))

    h = np.zeros((cfg.m_ris, cfg.n_t), dtype=np.complex128)
    for l in range(L):
        a_bs = steering_vector(cfg.n_t, aod_bs[l], cfg.spacing_ratio)
        a_ris = ris_steering(cfg.m_az, cfg.m_el, aoa_az[l], aoa_el[l], cfg.spacing_ratio)
        # a_A a_R^T is N_t x M; H is M x N_t, so store the transpose.
        h += gain[l] * np.outer(a_ris, a_bs)
    h *= np.sqrt(cfg.n_t * cfg.m_ris / L)

    users = []
    for k in range(K):
        hk = np.zeros(cfg.m_ris, dtype=np.complex128)
        for l in range(L):
            hk += user_gain[k, l] * ris_steering(
                cfg.m_az, cfg.m_el, aod_az[k, l], aod_el[k, l], cfg.spacing_ratio
            )
        users.append(hk * np.sqrt(cfg.m_ris / L))

    paths = PathParams(gain, aod_bs, aoa_az, aoa_el, user_gain, aod_az, aod_el)
    return ChannelRealization(h, tuple(users), paths)


def draw_channels(
    cfg: SystemConfig, count: int, rng: np.random.Generator
) -> list[ChannelRealization]:
    return [sample_channel(cfg, rng) for _ in range(count)]


# Plain-text dump: each block starts with "<name> <rows> <cols>" and is
# followed by rows*cols lines of "re im" in row-major order.


def write_cmatrix(fh, name: str, a: np.ndarray) -> None:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    fh.write(f"{name} {a.shape[0]} {a.shape[1]}\n")
    for z in a.ravel():
        fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")


def read_cmatrix(fh) -> tuple[str, np.ndarray]:
    header = fh.readline().split()
    if len(header) != 3:
        raise ValueError(f"malformed matrix header: {' '.join(header)!r}")
    name, rows, cols = header[0], int(header[1]), int(header[2])
    data = np.empty(rows * cols, dtype=np.complex128)
    for i in range(rows * cols):
        parts = fh.readline().split()
        if len(parts) != 2:
            raise ValueError(f"{name}: expected 're im' pair at entry {i}")
        data[i] = complex(float(parts[0]), float(parts[1]))
    return name, data.reshape(rows, cols)


def dump_channel(chan: ChannelRealization, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        write_cmatrix(fh, "H", chan.h_bs_ris)
        write_cmatrix(fh, "H_r", chan.h_r)


def load_channel(path) -> ChannelRealization:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        blocks = dict(read_cmatrix(fh) for _ in range(2))
    try:
        return ChannelRealization.from_arrays(blocks["H"], blocks["H_r"])
    except KeyError as exc:
        raise ValueError(f"{path}: missing block {exc}") from None
