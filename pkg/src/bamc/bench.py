"""Experiment harness: seeded (algorithm x model) grids, per-iteration CSV
records, and the quantile / rolling-median summaries behind the comparison
figures.

A run's record stream is fully determined by (model, algorithm, seed), so
the same config always produces the same CSV whether runs execute serially
or across processes.  Wall-clock timings are informational only; every CSV
gets a normalized companion file without the timing column, and determinism
guarantees apply to the normalized file.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .baselines import Schedule, mh_map_search, sa_search
from .models import (
    gmm_program,
    gmm_spec,
    hmm16_program,
    hmm16_spec,
    tiny_hmm_program,
    tiny_hmm_spec,
)
from .program import Program
from .search import SearchReport, bamc_search

__all__ = [
    "ConfigError",
    "DataError",
    "ExperimentConfig",
    "RunRecord",
    "MODELS",
    "ALGORITHM_IDS",
    "build_program",
    "run_search",
    "run_experiment",
    "write_records",
    "read_records",
    "normalized_csv_path",
    "QuantileSummary",
    "quantile_summary",
    "rolling_median",
]


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown ids, bad counts)."""


class DataError(ValueError):
    """Record data unusable for summarization (empty or misaligned)."""


# Fresh Program per call; programs hold no cross-run state but workers in
# other processes must be able to rebuild them from the id alone.
MODELS: dict = {
    "tiny-hmm": lambda: tiny_hmm_program(tiny_hmm_spec()),
    "hmm16": lambda: hmm16_program(hmm16_spec()),
    "gmm": lambda: gmm_program(gmm_spec()),
}

ALGORITHM_IDS = ("bamc", "mh", "sa")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: n_runs independent seeded searches of one algorithm
    on one model.  Run r uses seed base_seed + r."""

    model: str
    algorithm: str
    iterations: int
    n_runs: int = 1
    base_seed: int = 0
    schedule: Optional[str] = None  # sa only
    rate: Optional[float] = None  # sa only
    out: Optional[str] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(
                f"unknown model {self.model!r}; expected one of {sorted(MODELS)}"
            )
        if self.algorithm not in ALGORITHM_IDS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHM_IDS}"
            )
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be >= 1, got {self.n_runs}")
        if self.algorithm == "sa":
            if self.schedule is None or self.rate is None:
                raise ConfigError("sa needs both schedule and rate")
            try:
                Schedule(self.schedule, 1.0, self.rate)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        elif self.schedule is not None or self.rate is not None:
            raise ConfigError(
                f"schedule/rate only apply to sa, not {self.algorithm!r}"
            )


class RunRecord(NamedTuple):
    run_id: int
    iteration: int
    sample_log_weight: float
    best_log_weight_so_far: float
    is_new_map: bool
    elapsed_ms: float


CSV_HEADER = "run_id,iteration,sample_log_weight,best_log_weight_so_far,is_new_map,elapsed_ms"
NORM_HEADER = CSV_HEADER.rsplit(",", 1)[0]


def build_program(model: str) -> Program:
    factory = MODELS.get(model)
    if factory is None:
        raise ConfigError(f"unknown model {model!r}; expected one of {sorted(MODELS)}")
    return factory()


def run_search(config: ExperimentConfig, rng: np.random.Generator) -> SearchReport:
    """One seeded search with the config's algorithm on a fresh program."""
    program = build_program(config.model)
    if config.algorithm == "bamc":
        return bamc_search(program, config.iterations, rng)
    if config.algorithm == "mh":
        return mh_map_search(program, config.iterations, rng)
    schedule = Schedule(config.schedule, 1.0, config.rate)
    return sa_search(program, schedule, config.iterations, rng)


def _report_records(report: SearchReport, run_id: int) -> list:
    records = []
    best = float("-inf")
    for rec in report.records:
        if rec.log_weight > best:
            best = rec.log_weight
        records.append(
            RunRecord(run_id, rec.iteration, rec.log_weight, best, rec.is_new_map, rec.elapsed_ms)
        )
    return records


def _run_one(model: str, algorithm: str, schedule: Optional[str], rate: Optional[float],
             iterations: int, seed: int, run_id: int) -> list:
    # module-level so ProcessPoolExecutor can pickle the call
    config = ExperimentConfig(model, algorithm, iterations, 1, seed, schedule, rate)
    report = run_search(config, np.random.default_rng(seed))
    if report.aborted is not None:
        raise RuntimeError(f"run {run_id} aborted: {report.aborted}")
    return _report_records(report, run_id)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list:
    """Execute all runs and return their records ordered by (run_id,
    iteration); writes CSV (plus the normalized companion) when config.out
    is set.  jobs > 1 fans runs out across processes."""
    args = [
        (config.model, config.algorithm, config.schedule, config.rate,
         config.iterations, config.base_seed + r, r)
        for r in range(config.n_runs)
    ]
    records: list = []
    if jobs > 1 and config.n_runs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, config.n_runs)) as pool:
            futures = [pool.submit(_run_one, *a) for a in args]
            for fut in futures:  # submission order keeps run_id order
                records.extend(fut.result())
    else:
        for a in args:
            records.extend(_run_one(*a))
    if config.out is not None:
        write_records(records, config.out)
    return records


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def normalized_csv_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".norm" + path.suffix)


def write_records(records: Sequence[RunRecord], path) -> Path:
    """Write the CSV and its normalized (timing-free) companion."""
    path = Path(path)
    full = [CSV_HEADER]
    norm = [NORM_HEADER]
    for r in records:
        prefix = (
            f"{r.run_id},{r.iteration},{_fmt(r.sample_log_weight)},"
            f"{_fmt(r.best_log_weight_so_far)},{int(r.is_new_map)}"
        )
        full.append(prefix + "," + _fmt(r.elapsed_ms))
        norm.append(prefix)
    try:
        path.write_text("\n".join(full) + "\n")
        normalized_csv_path(path).write_text("\n".join(norm) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc
    return path


def read_records(path) -> list:
    """Parse a records CSV (either the full or the normalized layout)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] not in (CSV_HEADER, NORM_HEADER):
        raise DataError(f"{path}: not a records CSV (unexpected header)")
    timed = lines[0] == CSV_HEADER
    records = []
    for ln in lines[1:]:
        if not ln:
            continue
        parts = ln.split(",")
        records.append(
            RunRecord(
                int(parts[0]),
                int(parts[1]),
                float(parts[2]),
                float(parts[3]),
                bool(int(parts[4])),
                float(parts[5]) if timed else 0.0,
            )
        )
    return records


@dataclass(frozen=True)
class QuantileSummary:
    """Per-iteration quantiles of best-so-far log-weight across runs."""

    iterations: np.ndarray
    quantiles: tuple
    values: np.ndarray  # shape (len(quantiles), len(iterations))

    def series(self, q: float) -> np.ndarray:
        for i, known in enumerate(self.quantiles):
            if known == q:
                return self.values[i]
        raise KeyError(f"quantile {q} not computed (have {self.quantiles})")


def quantile_summary(records: Sequence[RunRecord], quantiles: Sequence[float]) -> QuantileSummary:
    """Empirical quantiles (linear interpolation) of best_log_weight_so_far
    at each iteration across runs; all runs must cover the same iterations."""
    if not records:
        raise DataError("no records to summarize")
    quantiles = tuple(float(q) for q in quantiles)
    if any(not 0.0 <= q <= 1.0 for q in quantiles):
        raise DataError(f"quantiles must lie in [0, 1], got {quantiles}")
    run_ids = sorted({r.run_id for r in records})
    index = {rid: i for i, rid in enumerate(run_ids)}
    n_iters = max(r.iteration for r in records)
    if min(r.iteration for r in records) < 1 or len(records) != len(run_ids) * n_iters:
        raise DataError("runs are misaligned: expected every run to cover 1..N")
    matrix = np.full((len(run_ids), n_iters), np.nan)
    for r in records:
        matrix[index[r.run_id], r.iteration - 1] = r.best_log_weight_so_far
    if np.isnan(matrix).any():
        raise DataError("runs are misaligned: missing (run, iteration) cells")
    values = np.quantile(matrix, quantiles, axis=0)
    return QuantileSummary(np.arange(1, n_iters + 1), quantiles, values)


def rolling_median(series: Sequence[float], window: int) -> np.ndarray:
    """Centered rolling median; near the edges the window shrinks to the
    samples actually available on both sides (so output length == input)."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    a = np.asarray(series, dtype=float)
    n = a.size
    out = np.empty(n)
    reach = window // 2
    for i in range(n):
        half = min(i, n - 1 - i, reach)
        out[i] = np.median(a[i - half : i + half + 1])
    return out
