"""Stepwise execution protocol for probabilistic programs.

A program is a resumable deterministic computation that, at each step,
reports one checkpoint: a request to sample from a distribution, an
observation of a value under a distribution, an output value, or
termination.  ``run_program`` drives a program to completion with a guide
that answers sample requests, accumulating the trace's log-weight as the
sum of sample log-densities and observation log-likelihoods.

The log-weight snapshot stored with each trace entry is taken immediately
after that entry's own log-density is added, so ``final - prefix`` is the
"log-weight to go" contributed by everything sampled or observed after the
choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

from .distributions import NEG_INF, Distribution, Value

__all__ = [
    "Sample",
    "Observe",
    "Output",
    "Done",
    "DONE",
    "Checkpoint",
    "Address",
    "TraceEntry",
    "Trace",
    "Program",
    "GeneratorProgram",
    "ProtocolError",
    "GuideValueError",
    "ProgramError",
    "run_program",
    "trace_log_weight",
    "prior_guide",
    "fixed_guide",
]


class Sample:
    """Checkpoint: the program requests a value drawn from ``dist``."""

    __slots__ = ("dist",)

    def __init__(self, dist: Distribution):
        self.dist = dist

    def __repr__(self):
        return f"Sample({self.dist!r})"


class Observe:
    """Checkpoint: the program conditions on ``value`` under ``dist``."""

    __slots__ = ("dist", "value")

    def __init__(self, dist: Distribution, value: Value):
        self.dist = dist
        self.value = value

    def __repr__(self):
        return f"Observe({self.dist!r}, {self.value!r})"


class Output:
    """Checkpoint: the program emits ``value``."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"Output({self.value!r})"


class Done:
    """Terminal checkpoint; no further steps may be requested."""

    __slots__ = ()

    def __repr__(self):
        return "Done"


DONE = Done()

Checkpoint = object  # Sample | Observe | Output | Done


class Address(NamedTuple):
    """Identity of a random-choice site: run position plus structural signature."""

    position: int
    signature: tuple


@dataclass(frozen=True, slots=True)
class TraceEntry:
    address: Address
    dist: Distribution
    value: Value
    log_density: float
    prefix_log_weight: float


@dataclass(frozen=True, slots=True)
class Trace:
    """One complete program run: its random choices and total log-weight.

    ``observe_terms`` records the observation log-likelihoods in the order
    they occurred, so the log-weight can be recomputed independently.
    """

    entries: tuple
    log_weight: float
    observe_terms: tuple = ()

    def __len__(self) -> int:
        return len(self.entries)

    def values(self) -> tuple:
        return tuple(e.value for e in self.entries)


class ProtocolError(RuntimeError):
    """The stepwise protocol was violated (value where none expected, etc.)."""


class GuideValueError(RuntimeError):
    """A guide answered a sample request with a value outside the support."""

    def __init__(self, address: Address, dist: Distribution, value):
        super().__init__(
            f"guide returned out-of-support value {value!r} for {dist!r} at {address}"
        )
        self.address = address
        self.dist = dist
        self.value = value


class ProgramError(RuntimeError):
    """The program itself raised; carries the trace accumulated so far."""

    def __init__(self, partial: Trace, cause: BaseException):
        super().__init__(f"program raised {cause!r} after {len(partial)} choices")
        self.partial = partial
        self.cause = cause


class Program:
    """A probabilistic program: ``start()`` yields a fresh resumable run."""

    def start(self) -> "ProgramRun":
        raise NotImplementedError


class ProgramRun:
    def step(self, value: Optional[Value] = None) -> Checkpoint:
        raise NotImplementedError


class GeneratorProgram(Program):
    """Adapter turning a checkpoint-yielding generator into a Program.

    The factory must return a fresh generator that yields checkpoints;
    sampled values are delivered as the result of the corresponding
    ``yield Sample(...)`` expression.
    """

    def __init__(self, factory: Callable[[], Iterator]):
        self._factory = factory

    def start(self) -> "_GeneratorRun":
        return _GeneratorRun(self._factory())


class _GeneratorRun(ProgramRun):
    __slots__ = ("_gen", "_state")

    _FRESH, _AWAIT_VALUE, _AWAIT_RESUME, _DONE = range(4)

    def __init__(self, gen: Iterator):
        self._gen = gen
        self._state = self._FRESH

    def step(self, value: Optional[Value] = None) -> Checkpoint:
        state = self._state
        if state == self._DONE:
            raise ProtocolError("step() called after Done")
        if state == self._AWAIT_VALUE:
            if value is None:
                raise ProtocolError("a Sample checkpoint must be answered with a value")
        elif value is not None:
            raise ProtocolError("only a Sample checkpoint accepts a value")
        try:
            if state == self._FRESH:
                cp = next(self._gen)
            else:
                cp = self._gen.send(value)
        except StopIteration:
            self._state = self._DONE
            return DONE
        if isinstance(cp, Sample):
            self._state = self._AWAIT_VALUE
        elif isinstance(cp, (Observe, Output)):
            self._state = self._AWAIT_RESUME
        else:
            raise ProtocolError(f"program yielded a non-checkpoint: {cp!r}")
        return cp


def run_program(
    program: Program,
    guide: Callable[[Address, Distribution], Value],
    sink: Optional[Callable[[object], None]] = None,
) -> Trace:
    """Execute ``program`` to termination, answering samples via ``guide``.

    Returns the completed trace.  Observation log-likelihoods may be ``-inf``
    (the run still finishes); a guide value outside the support raises
    ``GuideValueError``, and an exception inside the program is re-raised as
    ``ProgramError`` with the partial trace attached.
    """
    run = program.start()
    entries: list[TraceEntry] = []
    observe_terms: list[float] = []
    log_weight = 0.0
    position = 0

    def _partial() -> Trace:
        return Trace(tuple(entries), log_weight, tuple(observe_terms))

    try:
        cp = run.step()
    except ProtocolError:
        raise
    except Exception as exc:
        raise ProgramError(_partial(), exc) from exc

    while True:
        if isinstance(cp, Sample):
            dist = cp.dist
            address = Address(position, dist.signature)
            value = guide(address, dist)
            ld = dist.log_density(value)
            if ld == NEG_INF:
                raise GuideValueError(address, dist, value)
            log_weight += ld
            entries.append(TraceEntry(address, dist, value, ld, log_weight))
            position += 1
            sent = value
        elif isinstance(cp, Observe):
            ld = cp.dist.log_density(cp.value)
            log_weight += ld
            observe_terms.append(ld)
            sent = None
        elif isinstance(cp, Output):
            if sink is not None:
                sink(cp.value)
            sent = None
        elif isinstance(cp, Done):
            return _partial()
        else:
            raise ProtocolError(f"unknown checkpoint {cp!r}")
        try:
            cp = run.step(sent)
        except ProtocolError:
            raise
        except Exception as exc:
            raise ProgramError(_partial(), exc) from exc


def trace_log_weight(trace: Trace, observation_terms: Sequence[float] = ()) -> float:
    """Recompute a trace's log-weight from first principles.

    Sums the log-density of every recorded choice (recomputed from its
    distribution and value, not read from the trace) plus the supplied
    observation terms.
    """
    parts = [e.dist.log_density(e.value) for e in trace.entries]
    parts.extend(float(t) for t in observation_terms)
    if any(p == NEG_INF for p in parts):
        return NEG_INF
    return math.fsum(parts)


def prior_guide(rng) -> Callable[[Address, Distribution], Value]:
    """Guide that answers every sample request with a prior draw."""

    def guide(address: Address, dist: Distribution) -> Value:
        return dist.sample(rng)

    return guide


def fixed_guide(values: Sequence[Value]) -> Callable[[Address, Distribution], Value]:
    """Guide that replays a fixed value per position; for oracles and tests."""
    resolved = tuple(values)

    def guide(address: Address, dist: Distribution) -> Value:
        if address.position >= len(resolved):
            raise IndexError(
                f"fixed guide has {len(resolved)} values but position "
                f"{address.position} was requested"
            )
        return resolved[address.position]

    return guide
