"""Run (scheme, seed, sweep point) jobs and collect long-format result rows."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..agents import DdpgAgent, DivergenceError, SacAgent, evaluate_agent, train
from ..baselines import no_ris_eval, oracle_eval, random_ris_eval
from ..channel import draw_channels
from ..env import BeamformingEnv
from ..numerics import make_rng
from .config import LEARNING_SCHEMES, SCHEMES, ExperimentConfig

log = logging.getLogger(__name__)

# Sub-stream keys under each experiment seed. Channel streams ignore the
# sweep point, so every scheme and every SNR value sees the same draws.
STREAM_EVAL_CHANNELS = 1
STREAM_TRAIN_CHANNELS = 2
STREAM_AGENT = 3
STREAM_BASELINE = 4
STREAM_ORACLE = 5

EVAL_METRIC = "eval_sum_rate"
TRAIN_METRICS = ("mean_reward", "v_loss", "q1_loss", "q2_loss", "pi_loss")


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    seed: int
    sweep_value: float  # NaN when there is no sweep
    episode: int  # -1 for non-learning schemes
    metric: str
    value: float


@dataclass(frozen=True)
class Job:
    scheme: str
    seed: int
    sweep_index: int
    sweep_value: float | None


def make_agent(scheme: str, cfg: ExperimentConfig, state_dim: int, action_dim: int, rng):
    if scheme == "sac":
        return SacAgent(state_dim, action_dim, cfg.sac, rng)
    if scheme == "dp-sac":
        return SacAgent(state_dim, action_dim, replace(cfg.sac, alpha=0.0), rng)
    if scheme == "ddpg":
        return DdpgAgent(state_dim, action_dim, cfg.ddpg, rng)
    raise ValueError(f"{scheme!r} is not a learning scheme")


def eval_channels_for(cfg: ExperimentConfig, seed: int, sweep_value):
    """Evaluation channels for one (seed, sweep point).

    With ``channel_refresh = never`` the single training channel is also the
    only evaluation channel.
    """
    system = cfg.system_at(sweep_value)
    n = 1 if cfg.channel_refresh == "never" else cfg.eval_channels
    return draw_channels(system, n, make_rng(seed, STREAM_EVAL_CHANNELS))


def train_scheme(cfg: ExperimentConfig, job: Job, on_episode=None):
    """Train one learner; returns ``(agent, trace, eval_rates)``."""
    env_cfg = cfg.env_at(job.sweep_value)
    channels = eval_channels_for(cfg, job.seed, job.sweep_value)
    env = BeamformingEnv(env_cfg, make_rng(job.seed, STREAM_TRAIN_CHANNELS))
    if cfg.channel_refresh == "never":
        env.reset(channel=channels[0])
    agent = make_agent(
        job.scheme, cfg, env_cfg.state_dim, env_cfg.action_dim, make_rng(job.seed, STREAM_AGENT)
    )
    trace = train(agent, env, cfg.episodes, on_episode=on_episode)
    rates = evaluate_agent(agent, env_cfg, channels, cfg.eval_steps)
    return agent, trace, rates


def run_job(cfg: ExperimentConfig, job: Job) -> list[ResultRow]:
    sv = float("nan") if job.sweep_value is None else float(job.sweep_value)

    def row(episode, metric, value):
        return ResultRow(job.scheme, job.seed, sv, episode, metric, float(value))

    rows: list[ResultRow] = []
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            if job.scheme in LEARNING_SCHEMES:
                _, trace, rates = train_scheme(cfg, job)
                for stats in trace:
                    rows.append(row(stats.episode, "mean_reward", stats.mean_reward))
                    for name in TRAIN_METRICS[1:]:
                        if name in stats.losses:
                            rows.append(row(stats.episode, name, stats.losses[name]))
                rows.append(row(cfg.episodes, EVAL_METRIC, rates.mean()))
            else:
                system = cfg.system_at(job.sweep_value)
                channels = eval_channels_for(cfg, job.seed, job.sweep_value)
                if job.scheme == "random-ris":
                    result = random_ris_eval(system, channels, make_rng(job.seed, STREAM_BASELINE))
                elif job.scheme == "no-ris":
                    result = no_ris_eval(system, channels)
                else:
                    result = oracle_eval(
                        system, channels, cfg.oracle_samples, make_rng(job.seed, STREAM_ORACLE)
                    )
                rows.append(row(-1, EVAL_METRIC, result.mean))
    except (DivergenceError, FloatingPointError) as exc:
        log.warning("run %s seed=%d sweep=%s failed: %s", job.scheme, job.seed, job.sweep_value, exc)
        rows.append(row(-1, "failed", 1.0))
    return rows


def jobs_for(cfg: ExperimentConfig) -> list[Job]:
    return [
        Job(scheme, seed, i, value)
        for scheme in cfg.schemes
        for seed in cfg.seeds
        for i, value in enumerate(cfg.sweep_points)
    ]


def _worker_init():
    # one BLAS thread per worker keeps results independent of pool size
    os.environ.setdefault("OMP_NUM_THREADS", "1")


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Every (scheme, seed, sweep point) job, merged in a fixed order.

    Jobs run on up to ``cfg.workers`` processes; rows are ordered by scheme
    (config order), seed, sweep point, then the job's own emission order,
    never by completion order.
    """
    jobs = jobs_for(cfg)
    if cfg.workers == 1 or len(jobs) == 1:
        results = [run_job(cfg, job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers, initializer=_worker_init) as pool:
            results = list(pool.map(run_job, [cfg] * len(jobs), jobs))
    return [r for rows in results for r in rows]


def scheme_rank(scheme: str) -> int:
    return SCHEMES.index(scheme) if scheme in SCHEMES else len(SCHEMES)
