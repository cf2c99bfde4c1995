"""Belief-guided ascent loop: anytime estimates, reward attribution, errors."""

import math

import numpy as np
import pytest

from bamc.bench import rolling_median
from bamc.distributions import Categorical
from bamc.orpm import BeliefStore
from bamc.program import Address, GeneratorProgram, Observe, Sample, Trace, TraceEntry
from bamc.search import attribute_rewards, bamc_search

from conftest import TINY_MAP_LOG_WEIGHT

NEG_INF = float("-inf")


def single_choice_program(probs=(1.0,)):
    def run():
        yield Sample(Categorical(probs))

    return GeneratorProgram(run)


def test_forced_choice_emits_one_estimate_with_zero_log_weight():
    report = bamc_search(single_choice_program(), 5, np.random.default_rng(0))
    assert len(report.records) == 5
    assert len(report.estimates) == 1
    assert report.best.log_weight == 0.0
    assert report.best.iteration == 1
    flags = [r.is_new_map for r in report.records]
    assert flags == [True, False, False, False, False]


def test_iterations_must_be_positive(tiny_program):
    with pytest.raises(ValueError):
        bamc_search(tiny_program, 0, np.random.default_rng(0))


def test_estimates_improve_strictly_and_track_the_running_max(tiny_program):
    report = bamc_search(tiny_program, 2000, np.random.default_rng(123))
    lws = [e.log_weight for e in report.estimates]
    assert all(b > a for a, b in zip(lws, lws[1:]))
    iters = [e.iteration for e in report.estimates]
    assert all(b > a for a, b in zip(iters, iters[1:]))
    # the final estimate equals the max over every sampled trace, exactly
    sample_max = max(r.log_weight for r in report.records)
    assert report.best.log_weight == sample_max
    # is_new flags mark exactly the estimate iterations
    flagged = [r.iteration for r in report.records if r.is_new_map]
    assert flagged == iters


def test_estimate_trace_matches_its_log_weight(tiny_program):
    report = bamc_search(tiny_program, 500, np.random.default_rng(7))
    for est in report.estimates:
        assert est.trace.log_weight == est.log_weight


def test_search_is_seed_deterministic(tiny_program):
    a = bamc_search(tiny_program, 800, np.random.default_rng(42))
    b = bamc_search(tiny_program, 800, np.random.default_rng(42))
    assert [r.log_weight for r in a.records] == [r.log_weight for r in b.records]
    assert [e.iteration for e in a.estimates] == [e.iteration for e in b.estimates]


def test_finds_the_enumerated_optimum_quickly(tiny_program):
    report = bamc_search(tiny_program, 3000, np.random.default_rng(1))
    assert report.best.log_weight == pytest.approx(TINY_MAP_LOG_WEIGHT, abs=1e-9)


def test_samples_concentrate_as_beliefs_sharpen(tiny_program):
    # Smoothed sample quality late in the run beats the opening stretch for
    # nearly every seed; runs that lock onto the optimum inside the first
    # 1000 iterations can only tie, hence the 18-of-20 bar.
    hits = 0
    for seed in range(500, 520):
        report = bamc_search(tiny_program, 4000, np.random.default_rng(seed))
        roll = rolling_median([r.log_weight for r in report.records], 101)
        early = float(np.median(roll[:1000]))
        late = float(np.median(roll[2999:4000]))
        hits += late > early
    assert hits >= 18


def test_elapsed_time_is_nondecreasing(tiny_program):
    report = bamc_search(tiny_program, 50, np.random.default_rng(3))
    times = [r.elapsed_ms for r in report.records]
    assert all(b >= a for a, b in zip(times, times[1:]))


def test_reward_is_log_weight_accumulated_after_the_choice():
    # Hand-built trace: rewards must equal final minus each entry's snapshot.
    addr0 = Address(0, ("categorical", 0.5, 0.5))
    addr1 = Address(1, ("categorical", 0.25, 0.75))
    d0 = Categorical((0.5, 0.5))
    d1 = Categorical((0.25, 0.75))
    entries = (
        TraceEntry(addr0, d0, 0, math.log(0.5), -0.7),
        TraceEntry(addr1, d1, 1, math.log(0.75), -1.4),
    )
    trace = Trace(entries, -2.0)
    store = BeliefStore()
    attribute_rewards(trace, -2.0, store)
    assert store.get(addr0).find(0).stats.mean == pytest.approx(-1.3, abs=1e-12)
    assert store.get(addr1).find(1).stats.mean == pytest.approx(-0.6, abs=1e-12)


def test_rewards_are_attributed_last_entry_first():
    order = []

    class Recorder(BeliefStore):
        def ensure(self, address):
            order.append(address.position)
            return super().ensure(address)

    addr = lambda i: Address(i, ("categorical", 0.5, 0.5))
    d = Categorical((0.5, 0.5))
    entries = tuple(TraceEntry(addr, d, 0, -0.7, -0.7 * (i + 1)) for i, addr in
                    enumerate(addr(i) for i in range(3)))
    attribute_rewards(Trace(entries, -2.1), -2.1, Recorder())
    assert order == [2, 1, 0]


def test_impossible_traces_never_become_estimates_or_rewards():
    # Value 1 makes the observation impossible; such runs are recorded but
    # contribute neither estimates nor belief updates.
    def run():
        v = yield Sample(Categorical((0.5, 0.5)))
        yield Observe(Categorical((1.0, 0.0)), v)

    store = BeliefStore()
    report = bamc_search(GeneratorProgram(run), 200, np.random.default_rng(0), store=store)
    assert report.best.log_weight == pytest.approx(math.log(0.5), abs=1e-12)
    assert all(e.log_weight != NEG_INF for e in report.estimates)
    assert any(r.log_weight == NEG_INF for r in report.records)
    point = store.get(Address(0, ("categorical", 0.5, 0.5)))
    bad = point.find(1)
    assert bad is None or bad.stats is None  # selected sometimes, never rewarded
    assert point.find(0).stats is not None


def test_program_exception_aborts_with_partial_report():
    def run():
        yield Sample(Categorical((0.5, 0.5)))
        raise RuntimeError("model bug")

    report = bamc_search(GeneratorProgram(run), 50, np.random.default_rng(0))
    assert report.aborted is not None
    assert "model bug" in report.aborted
    assert report.records == []
    assert report.estimates == []
    assert report.best is None


def test_belief_store_persists_across_calls(tiny_program):
    store = BeliefStore()
    rng = np.random.default_rng(5)
    bamc_search(tiny_program, 300, rng, store=store)
    n_points = len(store)
    first_counts = {a: p.aggregate.n for a, p in store.points.items() if p.aggregate}
    bamc_search(tiny_program, 300, rng, store=store)
    assert len(store) >= n_points
    for a, n in first_counts.items():
        agg = store.points[a].aggregate
        assert agg is not None and agg.n > n
