"""Baseline MAP searchers: single-site Metropolis-Hastings and simulated
annealing over the same proposal kernel.

The proposal picks one trace entry uniformly at random, redraws its value
from its own distribution, and re-executes the program from the start,
replaying the untouched prefix, reusing downstream values wherever the
site's address (position plus structural signature) still matches, and
drawing fresh values where it does not.  The acceptance ratio carries the
standard correction for the values discarded from the old trace ("stale")
and freshly drawn in the new one ("fresh"); annealing divides only the
log-weight difference by the temperature, never the correction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .program import GuideValueError, Program, ProgramError, Trace, prior_guide, run_program
from .search import IterationRecord, MapEstimate, SearchReport

__all__ = [
    "Schedule",
    "exponential_schedule",
    "lundy_mees_schedule",
    "temperature",
    "propose_single_site",
    "mh_map_search",
    "sa_search",
]

NEG_INF = float("-inf")

SCHEDULE_KINDS = ("exponential", "lundy-mees")


@dataclass(frozen=True, slots=True)
class Schedule:
    """Cooling schedule: temperature as a function of the iteration index.

    ``exponential`` decays geometrically, t0 * rate**t with rate in (0, 1).
    ``lundy-mees`` applies T <- T / (1 + rate * T) once per iteration, whose
    closed form is t0 / (1 + t * rate * t0), with rate > 0.
    """

    kind: str
    t0: float = 1.0
    rate: float = 0.9

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}")
        if not (math.isfinite(self.t0) and self.t0 > 0.0):
            raise ValueError(f"t0 must be positive, got {self.t0!r}")
        if self.kind == "exponential" and not (0.0 < self.rate < 1.0):
            raise ValueError(f"exponential rate must lie in (0, 1), got {self.rate!r}")
        if self.kind == "lundy-mees" and not (math.isfinite(self.rate) and self.rate > 0.0):
            raise ValueError(f"lundy-mees rate must be positive, got {self.rate!r}")


def exponential_schedule(rate: float, t0: float = 1.0) -> Schedule:
    return Schedule("exponential", t0, rate)


def lundy_mees_schedule(rate: float, t0: float = 1.0) -> Schedule:
    return Schedule("lundy-mees", t0, rate)


def temperature(schedule: Schedule, t: int) -> float:
    """Temperature after ``t`` cooling steps (t=0 gives t0)."""
    if t < 0:
        raise ValueError(f"iteration index must be >= 0, got {t}")
    if schedule.kind == "exponential":
        return schedule.t0 * schedule.rate**t
    return schedule.t0 / (1.0 + t * schedule.rate * schedule.t0)


def propose_single_site(
    program: Program, current: Trace, rng: np.random.Generator
) -> tuple[Optional[Trace], float]:
    """One proposal: redraw a uniformly chosen site, re-execute the suffix.

    Returns the proposed trace and the log proposal-ratio correction
    log q(old|new) - log q(new|old).  A proposal whose reused values fall
    outside their support (possible only off the benchmark models) is
    reported as (None, -inf) and should simply be rejected.
    """
    entries = current.entries
    n = len(entries)
    if n == 0:
        return current, 0.0
    site = int(rng.integers(n))
    site_entry = entries[site]
    new_site_value = site_entry.dist.sample(rng)

    reused: set[int] = set()

    def guide(address, dist):
        i = address.position
        if i < site:
            return entries[i].value
        if i == site:
            return new_site_value
        if i < n and entries[i].address.signature == address.signature:
            reused.add(i)
            return entries[i].value
        return dist.sample(rng)

    try:
        proposed = run_program(program, guide)
    except GuideValueError:
        return None, NEG_INF

    # Fresh values: drawn from their own distribution during this proposal
    # (the redrawn site plus any unmatched downstream draws).  Stale values:
    # the old site value plus old downstream entries not carried over.
    fresh_lp = 0.0
    for i in range(site, len(proposed.entries)):
        if i == site or i not in reused:
            fresh_lp += proposed.entries[i].log_density
    stale_lp = 0.0
    for i in range(site, n):
        if i == site or i not in reused:
            stale_lp += entries[i].log_density

    n_new = len(proposed.entries)
    correction = math.log(n) - math.log(n_new) + stale_lp - fresh_lp
    return proposed, correction


def _accept_log_ratio(
    current_lw: float, proposed_lw: float, correction: float, temp: float
) -> float:
    if proposed_lw == NEG_INF:
        return NEG_INF
    if current_lw == NEG_INF:
        return math.inf
    delta = proposed_lw - current_lw
    if temp == 0.0:
        # geometric cooling underflows to 0.0 within a few thousand steps;
        # take the greedy T -> 0+ limit instead of dividing by zero
        if delta > 0.0:
            return math.inf
        if delta < 0.0:
            return NEG_INF
        return correction
    return delta / temp + correction


def _chain_search(
    program: Program,
    iterations: int,
    rng: np.random.Generator,
    schedule: Optional[Schedule],
) -> SearchReport:
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    report = SearchReport()
    max_log_weight = NEG_INF
    start = time.monotonic()

    def record(iteration: int, trace_lw: float, accepted: Optional[bool]):
        nonlocal max_log_weight
        elapsed_ms = (time.monotonic() - start) * 1000.0
        is_new = trace_lw > max_log_weight
        if is_new:
            max_log_weight = trace_lw
        report.records.append(IterationRecord(iteration, trace_lw, is_new, elapsed_ms, accepted))
        return is_new, elapsed_ms

    try:
        current = run_program(program, prior_guide(rng))
    except ProgramError as exc:
        report.aborted = str(exc)
        return report
    is_new, elapsed_ms = record(1, current.log_weight, None)
    if is_new:
        report.estimates.append(MapEstimate(current, current.log_weight, 1, elapsed_ms))

    for iteration in range(2, iterations + 1):
        try:
            proposed, correction = propose_single_site(program, current, rng)
        except ProgramError as exc:
            report.aborted = str(exc)
            return report
        proposed_lw = proposed.log_weight if proposed is not None else NEG_INF
        temp = 1.0 if schedule is None else temperature(schedule, iteration - 2)
        log_ratio = _accept_log_ratio(current.log_weight, proposed_lw, correction, temp)
        u = rng.random()  # consumed every iteration to keep streams aligned
        if log_ratio >= 0.0:
            accepted = True
        elif log_ratio == NEG_INF:
            accepted = False
        else:
            accepted = u == 0.0 or math.log(u) < log_ratio
        is_new, elapsed_ms = record(iteration, proposed_lw, accepted)
        if is_new and proposed is not None:
            report.estimates.append(MapEstimate(proposed, proposed_lw, iteration, elapsed_ms))
        if accepted and proposed is not None:
            current = proposed

    return report


def mh_map_search(program: Program, iterations: int, rng: np.random.Generator) -> SearchReport:
    """Metropolis-Hastings over traces, tracking the best evaluated trace.

    Iteration 1 is the prior-sampled starting state; every later iteration
    proposes once, and the proposal's log-weight is the iteration's sample
    whether or not the move is accepted.
    """
    return _chain_search(program, iterations, rng, None)


def sa_search(
    program: Program, schedule: Schedule, iterations: int, rng: np.random.Generator
) -> SearchReport:
    """Simulated annealing: the MH chain with the log-weight difference
    divided by the schedule's temperature (cooling step t at iteration t+2,
    so the first proposal uses the full t0)."""
    return _chain_search(program, iterations, rng, schedule)
