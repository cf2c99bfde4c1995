"""Benchmark probabilistic programs: hidden Markov models and a Gaussian
mixture, plus the versioned ground-truth data behind the large HMM.

Three models are registered for experiments:

* ``tiny-hmm`` - 3 hidden states, 5 observations, fixed known transitions;
  small enough to enumerate exhaustively, used as the correctness anchor.
* ``hmm16`` - 16 hidden states and 16 symbols with *unknown* transition
  probabilities: each transition row is sampled from a flat Dirichlet prior
  (continuous choices) before the hidden path (discrete choices), so the
  model mixes variable types.  Observations come from a seeded ground-truth
  chain shipped as a plain-text data file.
* ``gmm`` - a two-component Gaussian mixture with unknown component means
  (continuous) and per-datum assignments (discrete).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .distributions import Categorical, Dirichlet, Normal
from .program import GeneratorProgram, Observe, Program, Sample

__all__ = [
    "HmmSpec",
    "MixtureSpec",
    "GroundTruth",
    "tiny_hmm_program",
    "hmm16_program",
    "gmm_program",
    "tiny_hmm_spec",
    "hmm16_spec",
    "gmm_spec",
    "make_hmm16_ground_truth",
    "load_hmm16_ground_truth",
    "write_ground_truth",
    "read_ground_truth",
    "HMM16_SEED",
    "HMM16_DATA_FILE",
]

HMM16_SEED = 20250814
HMM16_LENGTH = 50
HMM16_STATES = 16
HMM16_DATA_FILE = "hmm16_ground_truth_v1.txt"

MAX_ENUMERABLE_TRACES = 100_000


def _rows(matrix, what: str) -> tuple:
    rows = tuple(tuple(float(x) for x in row) for row in matrix)
    if not rows:
        raise ValueError(f"{what}: must be nonempty")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{what}: row {r} has length {len(row)}, expected {width}")
    return rows


def _check_stochastic(rows: tuple, what: str, tol: float = 1e-12) -> None:
    for r, row in enumerate(rows):
        if any(x < 0.0 for x in row):
            raise ValueError(f"{what}: row {r} has negative entries")
        total = math.fsum(row)
        if abs(total - 1.0) > tol:
            raise ValueError(f"{what}: row {r} sums to {total!r}, expected 1")


@dataclass(frozen=True)
class HmmSpec:
    """A hidden Markov model instance.

    Exactly one of ``transitions`` (fixed, known matrix) or
    ``transition_prior`` (per-row Dirichlet concentrations; rows are latent)
    must be given.  ``emission`` is always known and row-stochastic.
    """

    n_hidden: int
    n_symbols: int
    observations: tuple
    emission: tuple
    init: tuple
    transitions: Optional[tuple] = None
    transition_prior: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(int(o) for o in self.observations))
        object.__setattr__(self, "emission", _rows(self.emission, "emission"))
        object.__setattr__(self, "init", tuple(float(x) for x in self.init))
        if self.transitions is not None:
            object.__setattr__(self, "transitions", _rows(self.transitions, "transitions"))
        if self.transition_prior is not None:
            object.__setattr__(
                self, "transition_prior", _rows(self.transition_prior, "transition_prior")
            )
        if (self.transitions is None) == (self.transition_prior is None):
            raise ValueError("exactly one of transitions/transition_prior must be set")
        _check_stochastic(self.emission, "emission")
        _check_stochastic((self.init,), "init")
        if self.transitions is not None:
            _check_stochastic(self.transitions, "transitions")
        if len(self.emission) != self.n_hidden or len(self.init) != self.n_hidden:
            raise ValueError("emission/init must have one row/entry per hidden state")
        if any(len(row) != self.n_symbols for row in self.emission):
            raise ValueError("emission rows must have one entry per symbol")
        if any(not 0 <= o < self.n_symbols for o in self.observations):
            raise ValueError("observations outside the symbol range")


@dataclass(frozen=True)
class MixtureSpec:
    """Gaussian mixture with unknown means: per-component (mean, sd) priors,
    a categorical prior over assignments, and fixed observation noise."""

    n_components: int
    data: tuple
    component_prior: tuple
    mean_priors: tuple  # ((prior_mean, prior_sd), ...) per component
    noise_sd: float

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(float(x) for x in self.data))
        object.__setattr__(self, "component_prior", tuple(float(x) for x in self.component_prior))
        object.__setattr__(
            self, "mean_priors", tuple((float(m), float(s)) for m, s in self.mean_priors)
        )
        if self.n_components < 1:
            raise ValueError("n_components must be >= 1")
        if not self.data:
            raise ValueError("data must be nonempty")
        if not (self.noise_sd > 0.0):
            raise ValueError("noise_sd must be positive")
        if len(self.component_prior) != self.n_components or len(self.mean_priors) != self.n_components:
            raise ValueError("component_prior/mean_priors must match n_components")
        _check_stochastic((self.component_prior,), "component_prior")


def tiny_hmm_program(spec: HmmSpec) -> Program:
    """Enumerable HMM with fixed transitions: sample the hidden path step by
    step, observing each symbol under the known emission row."""
    if spec.transitions is None:
        raise ValueError("tiny_hmm_program needs fixed transitions")
    n_traces = spec.n_hidden ** len(spec.observations)
    if n_traces > MAX_ENUMERABLE_TRACES:
        raise ValueError(
            f"spec enumerates to {n_traces} traces (limit {MAX_ENUMERABLE_TRACES})"
        )
    observations = spec.observations
    init_cp = Sample(Categorical(spec.init))
    step_cps = tuple(Sample(Categorical(row)) for row in spec.transitions)
    emission_dists = tuple(Categorical(row) for row in spec.emission)

    def run():
        if not observations:
            return
        state = yield init_cp
        yield Observe(emission_dists[state], observations[0])
        for t in range(1, len(observations)):
            state = yield step_cps[state]
            yield Observe(emission_dists[state], observations[t])

    return GeneratorProgram(run)


def hmm16_program(spec: HmmSpec) -> Program:
    """HMM with latent transition matrix: sample every transition row from
    its Dirichlet prior, then the hidden path, observing each symbol."""
    if spec.transition_prior is None:
        raise ValueError("hmm16_program needs a transition_prior")
    observations = spec.observations
    row_cps = tuple(Sample(Dirichlet(row)) for row in spec.transition_prior)
    init_cp = Sample(Categorical(spec.init))
    emission_dists = tuple(Categorical(row) for row in spec.emission)

    def run():
        rows = []
        for cp in row_cps:
            rows.append((yield cp))
        if not observations:
            return
        step_cps: list = [None] * len(rows)
        state = yield init_cp
        yield Observe(emission_dists[state], observations[0])
        for t in range(1, len(observations)):
            cp = step_cps[state]
            if cp is None:
                cp = step_cps[state] = Sample(Categorical(rows[state]))
            state = yield cp
            yield Observe(emission_dists[state], observations[t])

    return GeneratorProgram(run)


def gmm_program(spec: MixtureSpec) -> Program:
    """Mixture model: sample each component mean, then each datum's
    assignment, observing the datum around its component's mean."""
    mean_cps = tuple(Sample(Normal(m, s)) for m, s in spec.mean_priors)
    assign_cp = Sample(Categorical(spec.component_prior))
    data = spec.data
    noise_sd = spec.noise_sd

    def run():
        means = []
        for cp in mean_cps:
            means.append((yield cp))
        for x in data:
            z = yield assign_cp
            yield Observe(Normal(means[z], noise_sd), x)

    return GeneratorProgram(run)


# ---------------------------------------------------------------------------
# Canonical instances


def tiny_hmm_spec() -> HmmSpec:
    """The desk-scale correctness instance: 3**5 = 243 possible paths."""
    return HmmSpec(
        n_hidden=3,
        n_symbols=3,
        observations=(0, 0, 1, 2, 2),
        emission=(
            (0.8, 0.1, 0.1),
            (0.1, 0.8, 0.1),
            (0.1, 0.1, 0.8),
        ),
        init=(1 / 3, 1 / 3, 1 / 3),
        transitions=(
            (0.7, 0.2, 0.1),
            (0.1, 0.7, 0.2),
            (0.2, 0.1, 0.7),
        ),
    )


def gmm_spec() -> MixtureSpec:
    """Two well-separated clusters around -5 and +5 (data frozen from a
    seeded draw)."""
    return MixtureSpec(
        n_components=2,
        data=(
            -4.9992619079855105,
            -4.820752677494918,
            -5.16448271321733,
            -5.534355103254365,
            -5.2728024711030335,
            4.405012067002122,
            5.036086161558463,
            5.80412914733272,
            4.704676088869202,
            4.627715060108036,
        ),
        component_prior=(0.5, 0.5),
        mean_priors=((0.0, 10.0), (0.0, 10.0)),
        noise_sd=1.0,
    )


@dataclass(frozen=True)
class GroundTruth:
    """Held-out parameters and the observation sequence they generated."""

    seed: int
    init: tuple
    transitions: tuple
    emission: tuple
    observations: tuple


def _near_diagonal_emission(n: int, diag: float = 0.7) -> tuple:
    off = (1.0 - diag) / (n - 1)
    return tuple(
        tuple(diag if i == j else off for j in range(n)) for i in range(n)
    )


def make_hmm16_ground_truth(
    seed: int = HMM16_SEED, n: int = HMM16_STATES, length: int = HMM16_LENGTH
) -> GroundTruth:
    """Regenerate the ground truth from its seed: flat-Dirichlet transition
    rows, near-diagonal emission, uniform initial state, and one sampled
    observation sequence."""
    rng = np.random.default_rng(seed)
    transitions = tuple(
        tuple(float(x) for x in rng.dirichlet(np.ones(n))) for _ in range(n)
    )
    emission = _near_diagonal_emission(n)
    init = tuple(1.0 / n for _ in range(n))
    observations = []
    state = int(rng.integers(n))
    for t in range(length):
        if t > 0:
            state = int(np.searchsorted(np.cumsum(transitions[state]), rng.random()))
            state = min(state, n - 1)
        row = emission[state]
        sym = int(np.searchsorted(np.cumsum(row), rng.random()))
        observations.append(min(sym, n - 1))
    return GroundTruth(seed, init, transitions, emission, tuple(observations))


def write_ground_truth(gt: GroundTruth, path) -> None:
    """Serialize to the documented plain-text format (17-digit floats)."""
    f = lambda x: f"{x:.17g}"
    lines = [
        "# hmm16 ground-truth parameters (v1)",
        "# tokens per line: key value...; floats printed with 17 significant digits",
        f"seed {gt.seed}",
        f"n_hidden {len(gt.transitions)}",
        f"n_symbols {len(gt.emission[0])}",
        "init " + " ".join(f(x) for x in gt.init),
    ]
    for row in gt.transitions:
        lines.append("transition " + " ".join(f(x) for x in row))
    for row in gt.emission:
        lines.append("emission " + " ".join(f(x) for x in row))
    lines.append("observations " + " ".join(str(o) for o in gt.observations))
    Path(path).write_text("\n".join(lines) + "\n")


def read_ground_truth(text: str) -> GroundTruth:
    seed = None
    init = None
    transitions = []
    emission = []
    observations = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key == "seed":
            seed = int(rest)
        elif key in ("n_hidden", "n_symbols"):
            continue  # implied by row lengths
        elif key == "init":
            init = tuple(float(x) for x in rest.split())
        elif key == "transition":
            transitions.append(tuple(float(x) for x in rest.split()))
        elif key == "emission":
            emission.append(tuple(float(x) for x in rest.split()))
        elif key == "observations":
            observations = tuple(int(x) for x in rest.split())
        else:
            raise ValueError(f"unknown key {key!r} in ground-truth data")
    if seed is None or init is None or observations is None or not transitions or not emission:
        raise ValueError("incomplete ground-truth data")
    return GroundTruth(seed, init, tuple(transitions), tuple(emission), observations)


def load_hmm16_ground_truth() -> GroundTruth:
    text = (resources.files(__package__) / "data" / HMM16_DATA_FILE).read_text()
    return read_ground_truth(text)


def hmm16_spec(gt: Optional[GroundTruth] = None) -> HmmSpec:
    """Model spec for the 16-state benchmark: flat Dirichlet prior on every
    transition row; emission and observations from the shipped ground truth."""
    if gt is None:
        gt = load_hmm16_ground_truth()
    n = len(gt.transitions)
    return HmmSpec(
        n_hidden=n,
        n_symbols=len(gt.emission[0]),
        observations=gt.observations,
        emission=gt.emission,
        init=gt.init,
        transition_prior=tuple(tuple(1.0 for _ in range(n)) for _ in range(n)),
    )
