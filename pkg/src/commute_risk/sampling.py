"""Declared random inputs and reproducible random-number streams.

Every uncertain quantity in the engine is declared as a :class:`RandomInput`
(parametric uniform / zero-truncated normal / multinomial over {0,1,2,3},
or an empirical sample pool resampled with replacement). Draws always go
through a named Philox stream derived from ``(seed, *path)``, so any part
of a run can be re-derived independently of execution order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

__all__ = ["RandomInput", "derive_stream", "InvalidDistributionError"]


class InvalidDistributionError(ValueError):
    """A declared random input violates its parameter constraints."""


def derive_stream(seed: int, *path: object) -> np.random.Generator:
    """Counter-based generator for the stream named by ``(seed, *path)``.

    The Philox key is an SHA-256 digest of the seed and path components,
    so streams are independent of each other and of draw order elsewhere
    in the program.
    """
    digest = hashlib.sha256()
    digest.update(str(int(seed)).encode())
    for part in path:
        digest.update(b"\x1f")
        digest.update(str(part).encode())
    key = np.frombuffer(digest.digest()[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


OCCUPANCY_SUPPORT = np.arange(4)


@dataclass(frozen=True)
class RandomInput:
    """One declared random quantity.

    kind is one of ``uniform`` (lo, hi), ``normal`` (mean, std, truncated
    at zero), ``multinomial`` (weights over counts 0..3) or ``empirical``
    (pool resampled with replacement). ``integral`` rounds draws to the
    nearest non-negative integer; it is set for person counts, never for
    durations.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    pool: tuple[float, ...] = field(default_factory=tuple)
    integral: bool = False

    @staticmethod
    def uniform(lo: float, hi: float, integral: bool = False) -> "RandomInput":
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidDistributionError(f"uniform bounds must be finite: ({lo}, {hi})")
        if lo > hi:
            raise InvalidDistributionError(f"uniform requires lo <= hi, got ({lo}, {hi})")
        return RandomInput("uniform", float(lo), float(hi), integral=integral)

    @staticmethod
    def normal(mean: float, std: float, integral: bool = False) -> "RandomInput":
        """Normal(mean, std) truncated at zero."""
        if not (math.isfinite(mean) and math.isfinite(std)) or std < 0:
            raise InvalidDistributionError(f"normal requires finite mean, std >= 0: ({mean}, {std})")
        if std == 0 and mean < 0:
            raise InvalidDistributionError(f"degenerate normal at {mean} conflicts with truncation at 0")
        return RandomInput("normal", float(mean), float(std), integral=integral)

    @staticmethod
    def multinomial(weights: Sequence[float]) -> "RandomInput":
        w = tuple(float(x) for x in weights)
        if len(w) != 4 or any(x < 0 for x in w):
            raise InvalidDistributionError(f"multinomial needs 4 non-negative weights, got {w}")
        if abs(sum(w) - 1.0) > 1e-9:
            raise InvalidDistributionError(f"multinomial weights must sum to 1, got {sum(w)!r}")
        return RandomInput("multinomial", pool=w, integral=True)

    @staticmethod
    def empirical(pool: Sequence[float], integral: bool = False) -> "RandomInput":
        values = tuple(float(x) for x in pool)
        if not values:
            raise InvalidDistributionError("empirical pool must be non-empty")
        if any(not math.isfinite(x) for x in values):
            raise InvalidDistributionError("empirical pool must be finite")
        return RandomInput("empirical", pool=values, integral=integral)

    @staticmethod
    def degenerate(value: float) -> "RandomInput":
        return RandomInput.uniform(value, value)

    @property
    def is_degenerate(self) -> bool:
        if self.kind == "uniform":
            return self.a == self.b
        if self.kind == "normal":
            return self.b == 0.0
        if self.kind == "multinomial":
            return sum(1 for w in self.pool if w > 0.0) == 1
        return len(set(self.pool)) == 1

    def mean(self) -> float:
        """Analytic mean of the declared distribution (before any rounding)."""
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        if self.kind == "normal":
            if self.b == 0.0:
                return self.a
            alpha = (0.0 - self.a) / self.b
            return float(stats.truncnorm.mean(alpha, np.inf, loc=self.a, scale=self.b))
        if self.kind == "multinomial":
            return float(np.dot(OCCUPANCY_SUPPORT, self.pool))
        return float(np.mean(self.pool))

    def variance(self) -> float:
        """Analytic variance of the declared distribution (before any rounding)."""
        if self.kind == "uniform":
            return (self.b - self.a) ** 2 / 12.0
        if self.kind == "normal":
            if self.b == 0.0:
                return 0.0
            alpha = (0.0 - self.a) / self.b
            return float(stats.truncnorm.var(alpha, np.inf, loc=self.a, scale=self.b))
        if self.kind == "multinomial":
            m = self.mean()
            return float(np.dot((OCCUPANCY_SUPPORT - m) ** 2, self.pool))
        return float(np.var(self.pool))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` values from this input using the given stream."""
        if self.kind == "uniform":
            if self.a == self.b:
                values = np.full(size, self.a)
            else:
                values = rng.uniform(self.a, self.b, size)
        elif self.kind == "normal":
            if self.b == 0.0:
                values = np.full(size, self.a)
            else:
                alpha = (0.0 - self.a) / self.b
                values = stats.truncnorm.rvs(
                    alpha, np.inf, loc=self.a, scale=self.b, size=size, random_state=rng
                )
        elif self.kind == "multinomial":
            values = rng.choice(OCCUPANCY_SUPPORT, size=size, p=np.asarray(self.pool)).astype(float)
        elif self.kind == "empirical":
            pool = np.asarray(self.pool)
            if len(pool) == 1:
                values = np.full(size, pool[0])
            else:
                values = pool[rng.integers(0, len(pool), size)]
        else:
            raise InvalidDistributionError(f"unknown kind {self.kind!r}")
        if self.integral:
            values = np.maximum(np.rint(values), 0.0)
        return values
