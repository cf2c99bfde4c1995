"""Open randomized probability matching over per-site reward beliefs.

Each random-choice site keeps a table of previously selected values with
running reward statistics (count, mean, sum of squared deviations).  A
selection draws once from every value's reward belief, takes the winner's
mean-reward belief as a threshold, then lets every value's mean-reward draw
compete against that threshold on behalf of a "random choice" slot; if the
slot survives, a fresh value is drawn from the site's distribution and
added to the table.  Reward beliefs are normal with the sample mean and
variance; mean-reward beliefs shrink the variance by the sample count.

Because the slot can always win, the set of candidate values grows without
bound, which is what lets one selection rule serve finite, countable and
continuous choice distributions alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import Distribution, Value
from .program import Address

__all__ = [
    "RewardStats",
    "Choice",
    "SelectionPoint",
    "BeliefStore",
    "update_stats",
    "draw_reward_belief",
    "draw_mean_belief",
    "select_value",
    "DEFAULT_FALLBACK_VARIANCE",
]

# Belief variance used for a value with a single observed reward, when the
# site has no aggregate spread to borrow from.
DEFAULT_FALLBACK_VARIANCE = 1.0

# Below this table size the two belief sweeps run in plain Python, which
# beats numpy's per-call overhead on small arrays.
_VECTOR_THRESHOLD = 32

# Probability that a sweep-two draw landing exactly on the running best
# displaces it.  Exact ties have measure zero for honest normal beliefs;
# they occur persistently only when beliefs degenerate to point masses
# (a value whose rewards are all identical).  Always displacing on a tie
# starves the random-choice slot forever and freezes the search on fully
# discrete programs; never displacing throws away the exploitation that
# point-mass beliefs are meant to express.  A fixed Bernoulli keeps both:
# the incumbent is exploited most of the time, and the slot still wins
# often enough to escape a frozen configuration.
_TIE_DISPLACE = 0.9


@dataclass(frozen=True, slots=True)
class RewardStats:
    """Running reward statistics: count, mean, and sum of squared deviations."""

    n: int
    mean: float
    m2: float

    def variance(self) -> Optional[float]:
        """Sample variance, or None when fewer than two rewards were seen."""
        if self.n < 2:
            return None
        return self.m2 / (self.n - 1)


def update_stats(stats: Optional[RewardStats], reward: float) -> RewardStats:
    """Fold one reward into the running statistics (single-pass update).

    ``stats`` may be None, meaning no rewards have been observed yet; the
    result then has n=1.  Non-finite rewards are rejected.
    """
    reward = float(reward)
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward!r}")
    if stats is None:
        return RewardStats(1, reward, 0.0)
    n = stats.n + 1
    delta = reward - stats.mean
    mean = stats.mean + delta / n
    m2 = stats.m2 + delta * (reward - mean)
    return RewardStats(n, mean, m2)


def _belief_params(stats: RewardStats, fallback_var: float) -> tuple[float, float]:
    """(mean, variance) of the full reward belief."""
    var = stats.variance()
    if var is None:
        var = fallback_var
    return stats.mean, var


def draw_reward_belief(stats: RewardStats, fallback_var: float, rng: np.random.Generator) -> float:
    """One draw from the reward belief: Normal(mean, sample variance).

    A single observed reward gives no variance estimate, so ``fallback_var``
    stands in; zero variance degenerates to the mean exactly.
    """
    mean, var = _belief_params(stats, fallback_var)
    if var <= 0.0:
        return mean
    return mean + math.sqrt(var) * float(rng.standard_normal())


def draw_mean_belief(stats: RewardStats, fallback_var: float, rng: np.random.Generator) -> float:
    """One draw from the mean-reward belief: Normal(mean, variance / n)."""
    mean, var = _belief_params(stats, fallback_var)
    var /= stats.n
    if var <= 0.0:
        return mean
    return mean + math.sqrt(var) * float(rng.standard_normal())


@dataclass(slots=True)
class Choice:
    """A candidate value at a selection point; stats is None until the first
    reward arrives (the uninformative prior state)."""

    value: Value
    stats: Optional[RewardStats] = None


class SelectionPoint:
    """Belief table for one random-choice site."""

    __slots__ = ("address", "choices", "aggregate", "_index")

    def __init__(self, address: Address):
        self.address = address
        self.choices: list[Choice] = []
        self.aggregate: Optional[RewardStats] = None
        self._index: dict = {}

    def __len__(self) -> int:
        return len(self.choices)

    def find(self, value: Value) -> Optional[Choice]:
        i = self._index.get(value)
        return None if i is None else self.choices[i]

    def add_choice(self, value: Value) -> Choice:
        if value in self._index:
            raise ValueError(f"choice {value!r} already present at {self.address}")
        choice = Choice(value)
        self._index[value] = len(self.choices)
        self.choices.append(choice)
        return choice

    def update(self, value: Value, reward: float) -> None:
        """Attribute one reward to ``value``, creating the choice if needed."""
        choice = self.find(value)
        if choice is None:
            choice = self.add_choice(value)
        choice.stats = update_stats(choice.stats, reward)
        self.aggregate = update_stats(self.aggregate, reward)

    def fallback_variance(self) -> float:
        """Belief variance for values with fewer than two rewards: the
        site's aggregate sample variance when it is positive, else a unit
        default (the result is always strictly positive)."""
        agg = self.aggregate
        if agg is not None and agg.n >= 2:
            var = agg.m2 / (agg.n - 1)
            if var > 0.0:
                return var
        return DEFAULT_FALLBACK_VARIANCE


class BeliefStore:
    """All selection points of one search, keyed by address."""

    __slots__ = ("points",)

    def __init__(self):
        self.points: dict[Address, SelectionPoint] = {}

    def get(self, address: Address) -> Optional[SelectionPoint]:
        return self.points.get(address)

    def ensure(self, address: Address) -> SelectionPoint:
        point = self.points.get(address)
        if point is None:
            point = self.points[address] = SelectionPoint(address)
        return point

    def __len__(self) -> int:
        return len(self.points)


def _sweep_two(draws, threshold: float, rng: np.random.Generator) -> int:
    """Scan mean-belief draws against the slot's threshold.

    Strictly larger draws displace the running best; a draw exactly equal
    to it displaces with probability ``_TIE_DISPLACE`` (randomness is
    consumed only when a tie actually occurs, so replay stays exact).
    Returns the index of the winning value, or -1 if the slot survives.
    """
    winner = -1
    best = threshold
    for i, draw in enumerate(draws):
        if draw > best or (draw == best and rng.random() < _TIE_DISPLACE):
            best = draw
            winner = i
    return winner


def select_value(
    point: SelectionPoint,
    dist: Distribution,
    fallback_var: float,
    rng: np.random.Generator,
) -> tuple[Value, bool]:
    """Pick a value for one sample request at ``point``.

    Empty table: a fresh prior draw is installed and returned.  Otherwise
    two sweeps run over the table.  Sweep one draws from each value's full
    reward belief and keeps the last value attaining the maximum (ties go to
    later entries); a threshold is then drawn from that value's mean-reward
    belief on behalf of the random-choice slot.  Sweep two draws from every
    value's mean-reward belief; draws strictly above the running best
    displace it, and draws landing exactly on it displace with probability
    ``_TIE_DISPLACE`` (ties only persist between point-mass beliefs; see the
    constant's note).  If the slot survives both sweeps, a fresh value is
    drawn from ``dist``; a fresh draw that collides with an existing value
    reuses that value's statistics rather than resetting them.

    Returns the value and whether it was newly added to the table.
    """
    choices = point.choices
    t = len(choices)
    if t == 0:
        value = dist.sample(rng)
        point.add_choice(value)
        return value, True

    agg = point.aggregate
    agg_mean = agg.mean if agg is not None else 0.0

    # One batched standard-normal vector feeds sweep one (t draws), the
    # threshold (1 draw) and sweep two (t draws).
    z = rng.standard_normal(2 * t + 1)

    if t < _VECTOR_THRESHOLD:
        best = 0
        best_draw = -math.inf
        means: list[float] = []
        mean_sds: list[float] = []
        draws2: list[float] = []
        for i, choice in enumerate(choices):
            stats = choice.stats
            if stats is None:
                mean, var, n = agg_mean, fallback_var, 1
            else:
                mean = stats.mean
                n = stats.n
                var = stats.variance()
                if var is None:
                    var = fallback_var
            sd = math.sqrt(var)
            mean_sd = sd / math.sqrt(n)
            means.append(mean)
            mean_sds.append(mean_sd)
            draw = mean + sd * z[i]
            if draw >= best_draw:
                best_draw = draw
                best = i
        threshold = means[best] + mean_sds[best] * z[t]
        base = t + 1
        for i in range(t):
            draws2.append(means[i] + mean_sds[i] * z[base + i])
        winner = _sweep_two(draws2, threshold, rng)
    else:
        means_a = np.empty(t)
        vars_a = np.empty(t)
        ns_a = np.empty(t)
        for i, choice in enumerate(choices):
            stats = choice.stats
            if stats is None:
                means_a[i], vars_a[i], ns_a[i] = agg_mean, fallback_var, 1.0
            else:
                var = stats.variance()
                means_a[i] = stats.mean
                ns_a[i] = stats.n
                vars_a[i] = fallback_var if var is None else var
        sds_a = np.sqrt(vars_a)
        mean_sds_a = sds_a / np.sqrt(ns_a)
        draws = means_a + sds_a * z[:t]
        best = t - 1 - int(np.argmax(draws[::-1]))  # last index attaining the max
        threshold = float(means_a[best] + mean_sds_a[best] * z[t])
        draws2_a = means_a + mean_sds_a * z[t + 1 :]
        top = float(draws2_a.max())
        if top < threshold:
            winner = -1
        elif top > threshold and int(np.count_nonzero(draws2_a == top)) == 1:
            winner = int(np.argmax(draws2_a))
        else:
            # Exact ties in play: replay the scan element by element so the
            # randomized tie rule applies identically to both code paths.
            winner = _sweep_two(draws2_a.tolist(), threshold, rng)

    if winner >= 0:
        return choices[winner].value, False

    value = dist.sample(rng)
    if value in point._index:
        return value, False
    point.add_choice(value)
    return value, True
