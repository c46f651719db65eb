"""Experiment configuration: INI-style files with named sections.

Schema (every key optional; defaults are the desk-scale setup)::

    [system]      n_t, n_rf, k_users, m_ris, m_az, m_el, n_paths,
                  snr_db | power, noise_var, spacing_ratio
    [env]         steps_per_episode, channel_refresh, standardize
    [sac]         alpha, gamma, tau, batch_size, target_update_interval,
                  lr_q, lr_pi, lr_v, updates_per_step, hidden, buffer_capacity
    [ddpg]        gamma, tau, batch_size, lr_actor, lr_critic, noise_std,
                  updates_per_step, hidden, buffer_capacity
    [experiment]  schemes, seeds, sweep, sweep_values, episodes,
                  eval_channels, eval_steps, oracle_samples, workers, output

Lists are comma separated (``hidden = 64, 64``).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..agents import DdpgConfig, SacConfig
from ..channel import SystemConfig
from ..env import CHANNEL_REFRESH, EnvConfig

SCHEMES = ("sac", "dp-sac", "ddpg", "random-ris", "no-ris", "oracle")
LEARNING_SCHEMES = ("sac", "dp-sac", "ddpg")
SWEEPS = ("none", "snr", "ris-elements")

DESK_SYSTEM = SystemConfig(n_t=8, n_rf=2, k_users=2, m_ris=16, n_paths=4, power=10.0, noise_var=1.0)
# at desk size an entropy weight of 0.2 swamps the reward signal
DESK_SAC = SacConfig(hidden=(64, 64), lr_q=1e-3, lr_pi=1e-3, lr_v=1e-3, alpha=0.03)
DESK_DDPG = DdpgConfig(hidden=(64, 64), lr_actor=1e-3, lr_critic=1e-3)


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists one message per bad field."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = DESK_SYSTEM
    steps_per_episode: int = 50
    channel_refresh: str = "per-episode"
    standardize: bool = False
    sac: SacConfig = DESK_SAC
    ddpg: DdpgConfig = DESK_DDPG
    schemes: tuple[str, ...] = ("sac", "random-ris", "no-ris")
    seeds: tuple[int, ...] = (0,)
    sweep: str = "none"
    sweep_values: tuple[float, ...] = ()
    episodes: int = 300
    eval_channels: int = 20
    eval_steps: int | None = None
    oracle_samples: int = 20000
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ConfigError(errors)

    def validate(self) -> list[str]:
        errors = []
        if not self.schemes:
            errors.append("experiment.schemes: at least one scheme is required")
        for s in self.schemes:
            if s not in SCHEMES:
                errors.append(f"experiment.schemes: unknown scheme {s!r} (known: {', '.join(SCHEMES)})")
        if not self.seeds:
            errors.append("experiment.seeds: at least one seed is required")
        if any(s < 0 for s in self.seeds):
            errors.append("experiment.seeds: seeds must be non-negative")
        if self.sweep not in SWEEPS:
            errors.append(f"experiment.sweep: must be one of {', '.join(SWEEPS)} (got {self.sweep!r})")
        elif self.sweep != "none":
            if not self.sweep_values:
                errors.append(f"experiment.sweep_values: required for sweep {self.sweep!r}")
            for v in self.sweep_values:
                if not math.isfinite(v):
                    errors.append(f"experiment.sweep_values: {v} is not finite")
                elif self.sweep == "ris-elements" and (v <= 0 or v != int(v)):
                    errors.append(f"experiment.sweep_values: RIS size {v} must be a positive integer")
        if self.episodes < 0:
            errors.append(f"experiment.episodes: must be >= 0 (got {self.episodes})")
        if self.eval_channels < 1:
            errors.append(f"experiment.eval_channels: must be >= 1 (got {self.eval_channels})")
        if self.eval_steps is not None and self.eval_steps < 1:
            errors.append(f"experiment.eval_steps: must be >= 1 (got {self.eval_steps})")
        if self.oracle_samples < 1:
            errors.append(f"experiment.oracle_samples: must be >= 1 (got {self.oracle_samples})")
        if self.workers < 1:
            errors.append(f"experiment.workers: must be >= 1 (got {self.workers})")
        if self.steps_per_episode < 1:
            errors.append(f"env.steps_per_episode: must be >= 1 (got {self.steps_per_episode})")
        if self.channel_refresh not in CHANNEL_REFRESH:
            errors.append(
                f"env.channel_refresh: must be one of {', '.join(CHANNEL_REFRESH)} "
                f"(got {self.channel_refresh!r})"
            )
        return errors

    @property
    def sweep_points(self) -> tuple[float | None, ...]:
        return (None,) if self.sweep == "none" else tuple(self.sweep_values)

    def system_at(self, sweep_value: float | None) -> SystemConfig:
        if sweep_value is None:
            return self.system
        if self.sweep == "snr":
            return self.system.with_snr_db(sweep_value)
        return self.system.with_ris_elements(int(sweep_value))

    def env_at(self, sweep_value: float | None) -> EnvConfig:
        return EnvConfig(
            self.system_at(sweep_value), self.steps_per_episode, self.channel_refresh, self.standardize
        )

    def with_overrides(self, seed: int | None = None, scheme: str | None = None, output=None):
        changes = {}
        if seed is not None:
            changes["seeds"] = (seed,)
        if scheme is not None:
            changes["schemes"] = (scheme,)
        if output is not None:
            changes["output"] = str(output)
        return replace(self, **changes)


# parsing

_SYSTEM_INT = ("n_t", "n_rf", "k_users", "m_ris", "m_az", "m_el", "n_paths")
_SYSTEM_FLOAT = ("power", "noise_var", "spacing_ratio")


def _parse_value(section: str, key: str, raw: str, kind, errors: list):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "ints":
            return tuple(int(x) for x in raw.split(",") if x.strip())
        if kind == "floats":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if kind == "strs":
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        if kind is str:
            return raw.strip()
        return kind(raw)
    except ValueError:
        errors.append(f"{section}.{key}: cannot parse {raw!r} as {getattr(kind, '__name__', kind)}")
        return None


def _dataclass_kinds(cls) -> dict:
    kinds = {}
    for f in fields(cls):
        t = str(f.type)
        if t.startswith("tuple"):
            kinds[f.name] = "ints"
        elif t.startswith("int"):
            kinds[f.name] = int
        elif t.startswith("float"):
            kinds[f.name] = float
        elif t.startswith("bool"):
            kinds[f.name] = bool
        else:
            kinds[f.name] = str
    return kinds


_EXPERIMENT_KINDS = {
    "schemes": "strs",
    "seeds": "ints",
    "sweep": str,
    "sweep_values": "floats",
    "episodes": int,
    "eval_channels": int,
    "eval_steps": int,
    "oracle_samples": int,
    "workers": int,
    "output": str,
}
_ENV_KINDS = {"steps_per_episode": int, "channel_refresh": str, "standardize": bool}


def _read_section(parser, name: str, kinds: dict, errors: list) -> dict:
    if not parser.has_section(name):
        return {}
    out = {}
    for key, raw in parser.items(name):
        if key not in kinds:
            errors.append(f"{name}.{key}: unknown key")
            continue
        value = _parse_value(name, key, raw, kinds[key], errors)
        if value is not None:
            out[key] = value
    return out


def _build(cls, base, values: dict, section: str, errors: list):
    try:
        return replace(base, **values) if base is not None else cls(**values)
    except (ValueError, TypeError) as exc:
        for msg in str(exc).split("; "):
            errors.append(f"{section}: {msg}")
        return None


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([f"{source}: {exc}"]) from None
    errors: list[str] = []
    known = {"system", "env", "sac", "ddpg", "experiment"}
    for name in parser.sections():
        if name not in known:
            errors.append(f"[{name}]: unknown section")

    sys_kinds = {k: int for k in _SYSTEM_INT} | {k: float for k in _SYSTEM_FLOAT} | {"snr_db": float}
    sys_vals = _read_section(parser, "system", sys_kinds, errors)
    snr_db = sys_vals.pop("snr_db", None)
    if snr_db is not None and "power" in sys_vals:
        errors.append("system: give either snr_db or power, not both")
    if "m_ris" in sys_vals and "m_az" not in sys_vals and "m_el" not in sys_vals:
        sys_vals.setdefault("m_az", None)
        sys_vals.setdefault("m_el", None)
    system = _build(SystemConfig, DESK_SYSTEM, sys_vals, "system", errors)
    if system is not None and snr_db is not None:
        system = system.with_snr_db(snr_db)

    env_vals = _read_section(parser, "env", _ENV_KINDS, errors)
    sac_vals = _read_section(parser, "sac", _dataclass_kinds(SacConfig), errors)
    sac = _build(SacConfig, DESK_SAC, sac_vals, "sac", errors)
    ddpg_vals = _read_section(parser, "ddpg", _dataclass_kinds(DdpgConfig), errors)
    ddpg = _build(DdpgConfig, DESK_DDPG, ddpg_vals, "ddpg", errors)
    exp_vals = _read_section(parser, "experiment", _EXPERIMENT_KINDS, errors)

    # validate the remaining sections even if an earlier one failed, so the
    # report names every bad field at once
    try:
        cfg = ExperimentConfig(
            system=system or DESK_SYSTEM, sac=sac or DESK_SAC, ddpg=ddpg or DESK_DDPG,
            **env_vals, **exp_vals,
        )
    except ConfigError as exc:
        errors.extend(exc.errors)
    except (TypeError, ValueError) as exc:
        errors.append(str(exc))
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from None
    return parse_config(text, source=str(path))
