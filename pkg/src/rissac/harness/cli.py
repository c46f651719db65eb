"""Command-line entry point.

Subcommands: ``train``, ``evaluate``, ``sweep``, ``oracle``. Exit codes:
0 success, 1 invalid configuration or arguments, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..agents import evaluate_agent
from ..baselines import random_search_oracle
from ..nn import load_mlp, save_mlp
from ..numerics import make_rng
from .config import LEARNING_SCHEMES, ConfigError, ExperimentConfig, load_config
from .experiment import (
    EVAL_METRIC,
    STREAM_ORACLE,
    Job,
    ResultRow,
    eval_channels_for,
    run_experiment,
    train_scheme,
)
from .results import plot_data, summarize, write_csv, write_plot_data, write_trace_csv

log = logging.getLogger("rissac")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config file (INI sections)")
    common.add_argument("--seed", type=int, help="run a single seed, overriding the config")
    common.add_argument("--out", type=Path, help="output CSV path")
    common.add_argument("--scheme", help="run a single scheme, overriding the config")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="rissac", description="RIS-assisted mmWave beamforming experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("train", parents=[common], help="train learning schemes, write traces")
    p.add_argument("--checkpoint-dir", type=Path, help="save trained networks here")
    p = sub.add_parser("evaluate", parents=[common], help="evaluate schemes or a saved policy")
    p.add_argument("--policy", type=Path, help="policy checkpoint to evaluate deterministically")
    p = sub.add_parser("sweep", parents=[common], help="run the configured sweep")
    p.add_argument("--plot-data", type=Path, help="companion long-format plot file")
    sub.add_parser("oracle", parents=[common], help="random-search reference rates")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.with_overrides(seed=args.seed, scheme=args.scheme, output=args.out)


def _out_path(cfg: ExperimentConfig, default: str) -> Path:
    return Path(cfg.output) if cfg.output else Path(default)


def cmd_train(cfg: ExperimentConfig, args) -> None:
    schemes = [s for s in cfg.schemes if s in LEARNING_SCHEMES]
    if not schemes:
        raise ConfigError(["experiment.schemes: train needs at least one of sac, dp-sac, ddpg"])
    out = _out_path(cfg, "train.csv")
    rows: list[ResultRow] = []
    for scheme in schemes:
        for seed in cfg.seeds:
            job = Job(scheme, seed, 0, None)
            log.info("training %s seed=%d", scheme, seed)
            agent, trace, rates = train_scheme(
                cfg,
                job,
                on_episode=lambda s: log.debug("episode %d reward %.4f", s.episode, s.mean_reward),
            )
            for s in trace:
                rows.append(ResultRow(scheme, seed, float("nan"), s.episode, "mean_reward", s.mean_reward))
            rows.append(ResultRow(scheme, seed, float("nan"), cfg.episodes, EVAL_METRIC, float(rates.mean())))
            write_trace_csv(trace, out.with_name(f"{out.stem}.{scheme}.seed{seed}.trace.csv"))
            if args.checkpoint_dir:
                args.checkpoint_dir.mkdir(parents=True, exist_ok=True)
                for name, net in agent.networks().items():
                    save_mlp(net, args.checkpoint_dir / f"{scheme}.seed{seed}.{name}.npz")
    write_csv(rows, out)


def cmd_evaluate(cfg: ExperimentConfig, args) -> None:
    out = _out_path(cfg, "evaluate.csv")
    if args.policy is None:
        schemes = tuple(s for s in cfg.schemes if s not in LEARNING_SCHEMES)
        if not schemes:
            raise ConfigError(["experiment.schemes: evaluate without --policy needs a baseline scheme"])
        write_csv(run_experiment(replace(cfg, schemes=schemes, sweep="none", sweep_values=())), out)
        return
    net = load_mlp(args.policy)
    env_cfg = cfg.env_at(None)
    if net.layer_dims[0] != env_cfg.state_dim or net.layer_dims[-1] != 2 * env_cfg.action_dim:
        raise ConfigError([f"{args.policy}: network shape {net.layer_dims} does not fit this system"])

    class _Policy:
        def act(self, state, deterministic=True):
            return np.tanh(net.forward(state)[: env_cfg.action_dim])

    rows = []
    for seed in cfg.seeds:
        rates = evaluate_agent(_Policy(), env_cfg, eval_channels_for(cfg, seed, None), cfg.eval_steps)
        rows.append(ResultRow("policy", seed, float("nan"), -1, EVAL_METRIC, float(rates.mean())))
    write_csv(rows, out)


def cmd_sweep(cfg: ExperimentConfig, args) -> None:
    out = _out_path(cfg, "sweep.csv")
    rows = run_experiment(cfg)
    write_csv(rows, out)
    plot_path = args.plot_data or out.with_name(f"{out.stem}.plot.csv")
    x = "sweep_value" if cfg.sweep != "none" else "episode"
    metric = EVAL_METRIC if cfg.sweep != "none" else "mean_reward"
    write_plot_data(plot_data(rows, metric=metric, x=x), plot_path)
    if any(r.metric == EVAL_METRIC for r in rows):
        for (scheme, sv), s in summarize(rows).items():
            log.info("%-10s sweep=%s median=%.4f mean=%.4f n=%d", scheme, sv, s.median, s.mean, s.n)


def cmd_oracle(cfg: ExperimentConfig, args) -> None:
    out = _out_path(cfg, "oracle.csv")
    rows = []
    for seed in cfg.seeds:
        for value in cfg.sweep_points:
            system = cfg.system_at(value)
            rng = make_rng(seed, STREAM_ORACLE)
            sv = float("nan") if value is None else float(value)
            for chan in eval_channels_for(cfg, seed, value):
                _, best = random_search_oracle(system, chan, cfg.oracle_samples, rng)
                rows.append(ResultRow("oracle", seed, sv, -1, "best_rate", best))
    write_csv(rows, out)


COMMANDS = {"train": cmd_train, "evaluate": cmd_evaluate, "sweep": cmd_sweep, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _load(args)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit code 2
        log.error("%s failed: %s", args.command, exc)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
