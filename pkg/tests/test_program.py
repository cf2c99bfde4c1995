"""Stepwise execution protocol: trace accounting, guides, and error paths."""

import math

import numpy as np
import pytest

from bamc.distributions import Categorical, Normal
from bamc.program import (
    GeneratorProgram,
    GuideValueError,
    Observe,
    Output,
    ProgramError,
    ProtocolError,
    Sample,
    fixed_guide,
    prior_guide,
    run_program,
    trace_log_weight,
)

NEG_INF = float("-inf")


def test_empty_program_yields_empty_trace():
    def run():
        return
        yield  # pragma: no cover

    trace = run_program(GeneratorProgram(run), fixed_guide(()))
    assert trace.entries == ()
    assert trace.log_weight == 0.0
    assert trace.observe_terms == ()


def test_two_factor_product():
    def run():
        v = yield Sample(Categorical((0.5, 0.5)))
        yield Observe(Categorical((0.25, 0.75)), v)

    trace = run_program(GeneratorProgram(run), fixed_guide((0,)))
    assert trace.log_weight == pytest.approx(math.log(0.125), abs=1e-12)


def test_prefix_log_weights_snapshot_after_each_choice():
    def run():
        a = yield Sample(Categorical((0.5, 0.5)))
        yield Observe(Categorical((0.9, 0.1)), a)
        b = yield Sample(Categorical((0.25, 0.75)))
        yield Observe(Categorical((0.8, 0.2)), b)

    trace = run_program(GeneratorProgram(run), fixed_guide((0, 1)))
    ln = math.log
    e0, e1 = trace.entries
    assert e0.prefix_log_weight == pytest.approx(ln(0.5), abs=1e-12)
    assert e1.prefix_log_weight == pytest.approx(ln(0.5) + ln(0.9) + ln(0.75), abs=1e-12)
    assert trace.log_weight == pytest.approx(e1.prefix_log_weight + ln(0.2), abs=1e-12)
    assert trace.observe_terms == pytest.approx((ln(0.9), ln(0.2)))


def test_addresses_carry_position_and_distribution_signature():
    def run():
        yield Sample(Categorical((0.5, 0.5)))
        yield Sample(Normal(0.0, 1.0))

    trace = run_program(GeneratorProgram(run), fixed_guide((1, 0.25)))
    a0, a1 = (e.address for e in trace.entries)
    assert (a0.position, a1.position) == (0, 1)
    assert a0.signature == ("categorical", 0.5, 0.5)
    assert a1.signature == ("normal", 0.0, 1.0)


def test_trace_log_weight_recomputes_from_first_principles(tiny_program):
    trace = run_program(tiny_program, prior_guide(np.random.default_rng(3)))
    recomputed = trace_log_weight(trace, trace.observe_terms)
    assert recomputed == pytest.approx(trace.log_weight, rel=1e-12, abs=1e-12)


def test_trace_log_weight_neg_inf_term_dominates():
    def run():
        yield Sample(Categorical((0.5, 0.5)))

    trace = run_program(GeneratorProgram(run), fixed_guide((0,)))
    assert trace_log_weight(trace, (NEG_INF,)) == NEG_INF


def test_prior_guide_is_seed_deterministic(tiny_program):
    t1 = run_program(tiny_program, prior_guide(np.random.default_rng(11)))
    t2 = run_program(tiny_program, prior_guide(np.random.default_rng(11)))
    assert t1.values() == t2.values()
    assert t1.log_weight == t2.log_weight


def test_impossible_observation_finishes_with_neg_inf():
    seen_after = []

    def run():
        v = yield Sample(Categorical((0.5, 0.5)))
        yield Observe(Categorical((1.0, 0.0)), 1)  # probability-zero observation
        w = yield Sample(Categorical((0.5, 0.5)))  # execution must continue
        seen_after.append((v, w))

    trace = run_program(GeneratorProgram(run), fixed_guide((0, 1)))
    assert trace.log_weight == NEG_INF
    assert len(trace.entries) == 2
    assert seen_after == [(0, 1)]


def test_out_of_support_guide_value_raises():
    def run():
        yield Sample(Categorical((0.5, 0.5)))

    with pytest.raises(GuideValueError) as info:
        run_program(GeneratorProgram(run), fixed_guide((7,)))
    err = info.value
    assert err.value == 7
    assert err.address.position == 0
    assert err.dist.kind == "categorical"


def test_program_exception_carries_partial_trace():
    def run():
        yield Sample(Categorical((0.5, 0.5)))
        raise RuntimeError("boom")

    with pytest.raises(ProgramError) as info:
        run_program(GeneratorProgram(run), fixed_guide((0,)))
    err = info.value
    assert len(err.partial) == 1
    assert isinstance(err.cause, RuntimeError)
    assert err.partial.entries[0].value == 0


def test_outputs_are_forwarded_to_the_sink():
    def run():
        yield Output("first")
        yield Sample(Categorical((0.5, 0.5)))
        yield Output("second")

    collected = []
    run_program(GeneratorProgram(run), fixed_guide((0,)), sink=collected.append)
    assert collected == ["first", "second"]
    # without a sink the outputs are simply dropped
    trace = run_program(GeneratorProgram(run), fixed_guide((0,)))
    assert len(trace.entries) == 1


def test_protocol_violations_raise():
    def yields_garbage():
        yield "not a checkpoint"

    with pytest.raises(ProtocolError):
        run_program(GeneratorProgram(yields_garbage), fixed_guide(()))

    def one_sample():
        yield Sample(Categorical((0.5, 0.5)))

    run = GeneratorProgram(one_sample).start()
    run.step()
    with pytest.raises(ProtocolError):
        run.step()  # a Sample checkpoint must be answered with a value

    def one_observe():
        yield Observe(Categorical((1.0, 0.0)), 0)

    run = GeneratorProgram(one_observe).start()
    run.step()
    with pytest.raises(ProtocolError):
        run.step(3)  # only a Sample checkpoint accepts a value


def test_step_after_done_raises():
    def run():
        return
        yield  # pragma: no cover

    r = GeneratorProgram(run).start()
    assert repr(r.step()) == "Done"
    with pytest.raises(ProtocolError):
        r.step()


def test_fixed_guide_runs_out_of_values():
    def run():
        yield Sample(Categorical((0.5, 0.5)))
        yield Sample(Categorical((0.5, 0.5)))

    with pytest.raises(IndexError):
        run_program(GeneratorProgram(run), fixed_guide((0,)))
