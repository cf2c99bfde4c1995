"""Primitive probability distributions used by probabilistic programs.

A closed set of seven kinds (categorical, uniform-discrete, poisson, normal,
uniform-continuous, gamma, beta, dirichlet).  Every distribution exposes an
exact log-density/log-mass, a sampler driven by an injected numpy Generator,
and a structural ``signature`` used to identify choice sites across runs.

All probability accounting is done in log space; a value outside the support
gets log-density ``-inf`` rather than an exception.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Distribution",
    "Categorical",
    "UniformDiscrete",
    "Poisson",
    "Normal",
    "UniformContinuous",
    "Gamma",
    "Beta",
    "Dirichlet",
    "Value",
    "ParameterError",
    "log_density",
]

NEG_INF = float("-inf")
_LOG_2PI = math.log(2.0 * math.pi)

# A random value is an int (discrete kinds), a float (scalar continuous
# kinds) or a tuple of floats (dirichlet).  Tuples keep vector values
# hashable and exactly comparable, which choice bookkeeping relies on.
Value = Union[int, float, tuple]


class ParameterError(ValueError):
    """Distribution parameters are invalid for their kind."""


def _as_float_tuple(xs: Sequence[float], what: str) -> tuple:
    try:
        out = tuple(float(x) for x in xs)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{what}: expected a sequence of reals") from exc
    if not out:
        raise ParameterError(f"{what}: must be nonempty")
    if not all(math.isfinite(x) for x in out):
        raise ParameterError(f"{what}: entries must be finite")
    return out


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (float, np.floating))


class Distribution:
    """Base class; concrete kinds define density, sampling and signature."""

    kind: str = ""
    __slots__ = ()

    @property
    def params(self) -> tuple:
        """Flat tuple of the distribution's real-valued parameters."""
        raise NotImplementedError

    def log_density(self, value) -> float:
        """Exact log pmf/pdf at ``value``; ``-inf`` outside the support.

        Raises TypeError when the value's shape does not match the kind
        (e.g. a real handed to a discrete distribution).
        """
        raise NotImplementedError

    def sample(self, rng: np.random.Generator):
        """Draw one value, normalized to the canonical Value representation."""
        raise NotImplementedError

    @property
    def signature(self) -> tuple:
        """Identity of the choice site this distribution defines: the kind
        plus every parameter rounded to 12 significant digits.

        Two sample requests belong to the same site exactly when they occur
        at the same trace position with the same signature, so beliefs stay
        conditioned on the parameterization actually in effect while
        tolerating sub-1e-12 float drift.
        """
        try:
            return self._sig
        except AttributeError:
            self._sig = (self.kind,) + tuple(float(f"{p:.12g}") for p in self.params)
            return self._sig

    def __repr__(self) -> str:
        args = ", ".join(f"{p:.6g}" if isinstance(p, float) else str(p) for p in self.params)
        return f"{type(self).__name__}({args})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params == other.params

    def __hash__(self) -> int:
        return hash((self.kind, self.params))


class Categorical(Distribution):
    """Distribution over {0, ..., K-1} with explicit probabilities."""

    kind = "categorical"
    __slots__ = ("probs", "_cum", "_sig")

    def __init__(self, probs: Sequence[float]):
        p = _as_float_tuple(probs, "categorical probabilities")
        if any(x < 0.0 for x in p):
            raise ParameterError("categorical probabilities must be nonnegative")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ParameterError(f"categorical probabilities must sum to 1, got {math.fsum(p)!r}")
        self.probs = p
        self._cum = None  # built lazily on first sample

    @property
    def params(self) -> tuple:
        return self.probs

    def log_density(self, value) -> float:
        if not _is_int(value):
            raise TypeError(f"categorical expects an integer value, got {value!r}")
        k = int(value)
        if 0 <= k < len(self.probs):
            p = self.probs[k]
            return math.log(p) if p > 0.0 else NEG_INF
        return NEG_INF

    def sample(self, rng: np.random.Generator) -> int:
        cum = self._cum
        if cum is None:
            cum = self._cum = np.cumsum(self.probs)
        k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        return min(k, len(self.probs) - 1)



class UniformDiscrete(Distribution):
    """Uniform over the integers lo..hi inclusive."""

    kind = "uniform-discrete"
    __slots__ = ("lo", "hi", "_log_p", "_sig")

    def __init__(self, lo: int, hi: int):
        if not (_is_int(lo) and _is_int(hi)):
            raise ParameterError("uniform-discrete bounds must be integers")
        if hi < lo:
            raise ParameterError(f"uniform-discrete needs lo <= hi, got [{lo}, {hi}]")
        self.lo = int(lo)
        self.hi = int(hi)
        self._log_p = -math.log(self.hi - self.lo + 1)

    @property
    def params(self) -> tuple:
        return (float(self.lo), float(self.hi))

    def log_density(self, value) -> float:
        if not _is_int(value):
            raise TypeError(f"uniform-discrete expects an integer value, got {value!r}")
        return self._log_p if self.lo <= int(value) <= self.hi else NEG_INF

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.lo, self.hi + 1))



class Poisson(Distribution):
    kind = "poisson"
    __slots__ = ("rate", "_log_rate", "_sig")

    def __init__(self, rate: float):
        rate = float(rate)
        if not (math.isfinite(rate) and rate > 0.0):
            raise ParameterError(f"poisson rate must be positive and finite, got {rate!r}")
        self.rate = rate
        self._log_rate = math.log(rate)

    @property
    def params(self) -> tuple:
        return (self.rate,)

    def log_density(self, value) -> float:
        if not _is_int(value):
            raise TypeError(f"poisson expects an integer value, got {value!r}")
        k = int(value)
        if k < 0:
            return NEG_INF
        return k * self._log_rate - self.rate - math.lgamma(k + 1)

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.poisson(self.rate))



class Normal(Distribution):
    kind = "normal"
    __slots__ = ("mean", "sd", "_log_norm", "_sig")

    def __init__(self, mean: float, sd: float):
        mean, sd = float(mean), float(sd)
        if not math.isfinite(mean):
            raise ParameterError(f"normal mean must be finite, got {mean!r}")
        if not (math.isfinite(sd) and sd > 0.0):
            raise ParameterError(f"normal sd must be positive and finite, got {sd!r}")
        self.mean = mean
        self.sd = sd
        self._log_norm = -math.log(sd) - 0.5 * _LOG_2PI

    @property
    def params(self) -> tuple:
        return (self.mean, self.sd)

    def log_density(self, value) -> float:
        if not _is_real(value):
            raise TypeError(f"normal expects a real value, got {value!r}")
        z = (float(value) - self.mean) / self.sd
        return self._log_norm - 0.5 * z * z

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mean, self.sd))



class UniformContinuous(Distribution):
    kind = "uniform-continuous"
    __slots__ = ("lo", "hi", "_log_p", "_sig")

    def __init__(self, lo: float, hi: float):
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
            raise ParameterError(f"uniform-continuous needs finite lo < hi, got [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self._log_p = -math.log(hi - lo)

    @property
    def params(self) -> tuple:
        return (self.lo, self.hi)

    def log_density(self, value) -> float:
        if not _is_real(value):
            raise TypeError(f"uniform-continuous expects a real value, got {value!r}")
        return self._log_p if self.lo <= float(value) <= self.hi else NEG_INF

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))



class Gamma(Distribution):
    """Shape/rate parameterization; support is the strictly positive reals."""

    kind = "gamma"
    __slots__ = ("shape", "rate", "_log_norm", "_sig")

    def __init__(self, shape: float, rate: float):
        shape, rate = float(shape), float(rate)
        if not (math.isfinite(shape) and shape > 0.0):
            raise ParameterError(f"gamma shape must be positive, got {shape!r}")
        if not (math.isfinite(rate) and rate > 0.0):
            raise ParameterError(f"gamma rate must be positive, got {rate!r}")
        self.shape = shape
        self.rate = rate
        self._log_norm = shape * math.log(rate) - math.lgamma(shape)

    @property
    def params(self) -> tuple:
        return (self.shape, self.rate)

    def log_density(self, value) -> float:
        if not _is_real(value):
            raise TypeError(f"gamma expects a real value, got {value!r}")
        x = float(value)
        if x <= 0.0:
            return NEG_INF
        return self._log_norm + (self.shape - 1.0) * math.log(x) - self.rate * x

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.gamma(self.shape, 1.0 / self.rate))



class Beta(Distribution):
    kind = "beta"
    __slots__ = ("a", "b", "_log_norm", "_sig")

    def __init__(self, a: float, b: float):
        a, b = float(a), float(b)
        if not (math.isfinite(a) and a > 0.0 and math.isfinite(b) and b > 0.0):
            raise ParameterError(f"beta parameters must be positive, got ({a!r}, {b!r})")
        self.a = a
        self.b = b
        self._log_norm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)

    @property
    def params(self) -> tuple:
        return (self.a, self.b)

    def log_density(self, value) -> float:
        if not _is_real(value):
            raise TypeError(f"beta expects a real value, got {value!r}")
        x = float(value)
        if not 0.0 < x < 1.0:
            return NEG_INF
        return self._log_norm + (self.a - 1.0) * math.log(x) + (self.b - 1.0) * math.log1p(-x)

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.beta(self.a, self.b))



class Dirichlet(Distribution):
    """Distribution over probability vectors on the simplex of fixed dimension.

    Values are tuples of floats that are strictly positive and sum to 1
    within 1e-9; anything else is outside the support.
    """

    kind = "dirichlet"
    __slots__ = ("concentration", "_log_norm", "_alpha_m1", "_sig")

    def __init__(self, concentration: Sequence[float]):
        alpha = _as_float_tuple(concentration, "dirichlet concentration")
        if len(alpha) < 2:
            raise ParameterError("dirichlet needs at least 2 components")
        if any(a <= 0.0 for a in alpha):
            raise ParameterError("dirichlet concentration entries must be positive")
        self.concentration = alpha
        self._log_norm = math.lgamma(math.fsum(alpha)) - math.fsum(math.lgamma(a) for a in alpha)
        self._alpha_m1 = tuple(a - 1.0 for a in alpha)

    @property
    def params(self) -> tuple:
        return self.concentration

    def log_density(self, value) -> float:
        if not isinstance(value, tuple):
            raise TypeError(f"dirichlet expects a tuple of reals, got {value!r}")
        if len(value) != len(self.concentration):
            return NEG_INF
        total = 0.0
        acc = self._log_norm
        for x, am1 in zip(value, self._alpha_m1):
            x = float(x)
            if not (x > 0.0):
                return NEG_INF
            total += x
            if am1 != 0.0:
                acc += am1 * math.log(x)
        if abs(total - 1.0) > 1e-9:
            return NEG_INF
        return acc

    def sample(self, rng: np.random.Generator) -> tuple:
        return tuple(float(x) for x in rng.dirichlet(self.concentration))



def log_density(dist: Distribution, value) -> float:
    """Log pmf/pdf of ``value`` under ``dist`` in nats; ``-inf`` off-support."""
    return dist.log_density(value)
