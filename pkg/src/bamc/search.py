"""Anytime MAP search driven by per-site reward beliefs.

Each iteration executes the program once, selecting every random value via
the probability-matching rule, then compares the trace's log-weight with
the best seen so far (emitting an improved estimate on every new maximum)
and finally walks the trace from last entry to first, crediting each choice
with the log-weight accumulated strictly after its own snapshot.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .orpm import BeliefStore, select_value
from .program import Program, ProgramError, Trace, run_program

__all__ = [
    "MapEstimate",
    "IterationRecord",
    "SearchReport",
    "bamc_search",
    "attribute_rewards",
    "orpm_guide",
]

NEG_INF = float("-inf")


@dataclass(frozen=True, slots=True)
class MapEstimate:
    """A new running-best assignment, emitted the moment it was found."""

    trace: Trace
    log_weight: float
    iteration: int
    elapsed_ms: float


@dataclass(frozen=True, slots=True)
class IterationRecord:
    iteration: int
    log_weight: float
    is_new_map: bool
    elapsed_ms: float
    accepted: Optional[bool] = None  # baselines only; None for belief search


@dataclass(slots=True)
class SearchReport:
    """Per-iteration samples plus the improving sequence of MAP estimates."""

    records: list = field(default_factory=list)
    estimates: list = field(default_factory=list)
    aborted: Optional[str] = None

    @property
    def best(self) -> Optional[MapEstimate]:
        return self.estimates[-1] if self.estimates else None


def orpm_guide(store: BeliefStore, rng: np.random.Generator):
    """Guide answering sample requests by probability matching over ``store``."""

    def guide(address, dist):
        point = store.ensure(address)
        value, _ = select_value(point, dist, point.fallback_variance(), rng)
        return value

    return guide


def attribute_rewards(trace: Trace, final_log_weight: float, store: BeliefStore) -> None:
    """Credit every choice in ``trace`` with its log-weight to go.

    The reward for entry i is ``final_log_weight - prefix_log_weight[i]``,
    i.e. everything added after the choice's own log-density was folded in;
    the choice's own prior mass is deliberately not part of its reward.
    Entries are processed from last to first.
    """
    for entry in reversed(trace.entries):
        store.ensure(entry.address).update(
            entry.value, final_log_weight - entry.prefix_log_weight
        )


def bamc_search(
    program: Program,
    iterations: int,
    rng: np.random.Generator,
    *,
    store: Optional[BeliefStore] = None,
) -> SearchReport:
    """Run the belief-guided ascent loop for ``iterations`` program executions.

    Traces with log-weight ``-inf`` (impossible observations) never become
    estimates and contribute no belief updates.  A program exception aborts
    the search, returning the partial report with ``aborted`` set.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if store is None:
        store = BeliefStore()
    guide = orpm_guide(store, rng)
    report = SearchReport()
    max_log_weight = NEG_INF
    start = time.monotonic()

    for iteration in range(1, iterations + 1):
        try:
            trace = run_program(program, guide)
        except ProgramError as exc:
            report.aborted = str(exc)
            return report
        log_weight = trace.log_weight
        elapsed_ms = (time.monotonic() - start) * 1000.0
        is_new = log_weight > max_log_weight
        if is_new:
            max_log_weight = log_weight
            report.estimates.append(MapEstimate(trace, log_weight, iteration, elapsed_ms))
        report.records.append(IterationRecord(iteration, log_weight, is_new, elapsed_ms))
        if log_weight != NEG_INF:
            attribute_rewards(trace, log_weight, store)

    return report
