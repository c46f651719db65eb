"""CSV emission, aggregation, and plot-data tables for result rows."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .experiment import EVAL_METRIC, ResultRow

CSV_HEADER = ("scheme", "seed", "sweep_value", "episode", "metric", "value")
TRACE_HEADER = ("episode", "mean_reward", "v_loss", "q1_loss", "q2_loss", "pi_loss", "alpha")
PLOT_HEADER = ("x", "scheme", "median", "iqr_low", "iqr_high")


def fmt(value: float) -> str:
    """17 significant digits, which round-trips any double exactly."""
    return format(float(value), ".17g")


def _write(path, header, records) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(records)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_csv(rows, path) -> None:
    _write(
        path,
        CSV_HEADER,
        (
            (r.scheme, r.seed, fmt(r.sweep_value), r.episode, r.metric, fmt(r.value))
            for r in rows
        ),
    )


def read_csv(path) -> list[ResultRow]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            return [
                ResultRow(s, int(seed), float(sv), int(ep), m, float(v))
                for s, seed, sv, ep, m, v in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def write_trace_csv(trace, path) -> None:
    """Per-episode training trace of one run."""
    _write(
        path,
        TRACE_HEADER,
        ([s.episode] + [fmt(v) for k, v in s.row().items() if k != "episode"] for s in trace),
    )


@dataclass(frozen=True)
class Summary:
    mean: float
    median: float
    std: float
    n: int


def lower_median(values) -> float:
    """Median, taking the lower middle element when ``n`` is even."""
    v = sorted(values)
    return float(v[(len(v) - 1) // 2])


def _key_value(v: float):
    # NaN != NaN, so map "no sweep" to None for grouping
    return None if math.isnan(v) else v


def summarize(rows, metric: str = EVAL_METRIC) -> dict[tuple[str, float | None], Summary]:
    """Aggregate ``metric`` per (scheme, sweep value) across seeds.

    ``std`` is the population standard deviation. Keys come out sorted by
    scheme then sweep value; a missing sweep is keyed as ``None``.
    """
    rows = [r for r in rows if r.metric == metric]
    if not rows:
        raise ValueError(f"no rows with metric {metric!r} to summarize")
    groups: dict[tuple[str, float | None], list[float]] = {}
    for r in rows:
        groups.setdefault((r.scheme, _key_value(r.sweep_value)), []).append(r.value)
    out = {}
    for key in sorted(groups, key=lambda k: (k[0], -math.inf if k[1] is None else k[1])):
        vals = np.array(groups[key], dtype=np.float64)
        out[key] = Summary(float(vals.mean()), lower_median(vals), float(vals.std()), len(vals))
    return out


def plot_data(rows, metric: str = EVAL_METRIC, x: str = "sweep_value") -> list[tuple]:
    """Long-format ``(x, scheme, median, iqr_low, iqr_high)`` over seeds.

    ``x`` is ``"sweep_value"`` for rate-versus-SNR/RIS-size figures or
    ``"episode"`` for reward-versus-episode curves.
    """
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        if r.metric != metric:
            continue
        xv = getattr(r, x)
        groups.setdefault((r.scheme, xv), []).append(r.value)
    out = []
    for (scheme, xv) in sorted(groups, key=lambda k: (k[0], k[1])):
        vals = groups[(scheme, xv)]
        lo, hi = np.percentile(vals, [25, 75])
        out.append((xv, scheme, lower_median(vals), float(lo), float(hi)))
    return out


def write_plot_data(records, path) -> None:
    _write(
        path,
        PLOT_HEADER,
        ((fmt(x), s, fmt(m), fmt(lo), fmt(hi)) for x, s, m, lo, hi in records),
    )
