"""Exact reference solvers used to validate search results.

``brute_force_map`` exhaustively enumerates every trace of a program whose
sample checkpoints all have finite discrete support, so it works for any
such program regardless of structure.  ``viterbi_oracle`` is the classic
dynamic program for fixed-parameter HMMs; the two must agree wherever both
apply.
"""

from __future__ import annotations

import math
from typing import Iterator, Optional

import numpy as np

from .distributions import Categorical, Distribution, UniformDiscrete
from .program import Trace, run_program

__all__ = [
    "UnsupportedModelError",
    "enumerate_traces",
    "brute_force_map",
    "viterbi_oracle",
]


class UnsupportedModelError(Exception):
    """The program has choices this oracle cannot enumerate."""


class _Expand(Exception):
    """Internal signal: the probe ran past its prefix at checkpoint ``dist``."""

    def __init__(self, dist: Distribution):
        self.dist = dist


def _support(dist: Distribution) -> range:
    if isinstance(dist, Categorical):
        return range(len(dist.probs))
    if isinstance(dist, UniformDiscrete):
        return range(dist.lo, dist.hi + 1)
    raise UnsupportedModelError(
        f"cannot enumerate support of {type(dist).__name__}"
    )


def enumerate_traces(program, limit: int = 1_000_000) -> Iterator[Trace]:
    """Depth-first enumeration of all traces, values ascending at each
    choice.  Raises UnsupportedModelError past ``limit`` completed traces or
    at any non-enumerable checkpoint."""
    count = 0

    def probe(prefix: list):
        def guide(address, dist):
            if address.position < len(prefix):
                return prefix[address.position]
            raise _Expand(dist)

        try:
            return run_program(program, guide), None
        except _Expand as stop:
            return None, stop.dist

    stack = [[]]
    while stack:
        prefix = stack.pop()
        trace, dist = probe(prefix)
        if trace is not None:
            count += 1
            if count > limit:
                raise UnsupportedModelError(f"more than {limit} traces")
            yield trace
        else:
            # push descending so values pop (and yield) in ascending order
            for value in reversed(_support(dist)):
                stack.append(prefix + [value])


def brute_force_map(program, limit: int = 1_000_000) -> tuple:
    """Exact (trace, log-weight) maximum; ties break toward the trace whose
    choice values come first in enumeration order."""
    best: Optional[Trace] = None
    for trace in enumerate_traces(program, limit):
        if best is None or trace.log_weight > best.log_weight:
            best = trace
    if best is None:
        raise UnsupportedModelError("program produced no traces")
    return best, best.log_weight


def _log_stochastic(matrix, what: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=float)
    rows = arr if arr.ndim == 2 else arr[None, :]
    if np.any(rows < 0.0) or not np.allclose(rows.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError(f"{what} must be row-stochastic")
    with np.errstate(divide="ignore"):
        return np.log(arr)


def viterbi_oracle(init, transitions, emission, observations):
    """Most probable hidden path for a fixed-parameter HMM.

    Returns ``(path, log_prob)`` where log_prob includes the initial-state
    factor, one transition factor per step, and one emission factor per
    observation.  Ties resolve toward the lowest state index.
    """
    obs = [int(o) for o in observations]
    log_init = _log_stochastic(init, "init")
    log_trans = _log_stochastic(transitions, "transitions")
    log_emit = _log_stochastic(emission, "emission")
    if not obs:
        return (), 0.0
    if any(not 0 <= o < log_emit.shape[1] for o in obs):
        raise ValueError("observation outside the symbol range")

    score = log_init + log_emit[:, obs[0]]
    back = []
    for o in obs[1:]:
        cand = score[:, None] + log_trans  # cand[i, j]: best-so-far via i -> j
        prev = np.argmax(cand, axis=0)
        back.append(prev)
        score = cand[prev, np.arange(len(score))] + log_emit[:, o]
    last = int(np.argmax(score))
    path = [last]
    for prev in reversed(back):
        path.append(int(prev[path[-1]]))
    path.reverse()
    return tuple(path), float(score[last])
