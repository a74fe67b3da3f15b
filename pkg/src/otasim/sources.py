"""Random source and sensing models shared by the simulation chains."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PROB_SUM_TOL = 1e-12

# Cell order used by the samplers: (0,0), (0,1), (1,0), (1,1).
_PAIR_BITS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int64)


@dataclass(frozen=True)
class CorrelatedBinaryPair:
    """Joint law of a binary pair (S1, S2).

    Probabilities are validated at construction; invalid inputs are rejected
    rather than renormalized so that configuration errors surface early.
    """

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self) -> None:
        probs = (self.p00, self.p01, self.p10, self.p11)
        if any(p < 0.0 for p in probs):
            raise ValueError(f"probabilities must be >= 0, got {probs}")
        total = sum(probs)
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1 (got {total!r})")

    def as_array(self) -> np.ndarray:
        """Cell probabilities in sampler order (0,0), (0,1), (1,0), (1,1)."""
        return np.array([self.p00, self.p01, self.p10, self.p11])

    def marginal_s1(self) -> float:
        """P(S1 = 1)."""
        return self.p10 + self.p11

    def marginal_s2(self) -> float:
        """P(S2 = 1)."""
        return self.p01 + self.p11


def adder_mac_preset() -> CorrelatedBinaryPair:
    """Correlated pair with P(0,0) = P(0,1) = P(1,1) = 1/3 and P(1,0) = 0."""
    third = 1.0 / 3.0
    return CorrelatedBinaryPair(p00=third, p01=third, p10=0.0, p11=third)


def sample_pair(dist: CorrelatedBinaryPair, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one (s1, s2) pair."""
    cum = np.cumsum(dist.as_array())
    idx = min(int(np.searchsorted(cum, rng.random(), side="right")), 3)
    return int(_PAIR_BITS[idx, 0]), int(_PAIR_BITS[idx, 1])


def sample_pairs(dist: CorrelatedBinaryPair, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n pairs at once; returns an (n, 2) int array.

    Uses the same inverse-CDF construction as sample_pair, so scalar and
    batch draws follow the same law.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cum = np.cumsum(dist.as_array())
    idx = np.minimum(np.searchsorted(cum, rng.random(n), side="right"), 3)
    return _PAIR_BITS[idx]


@dataclass(frozen=True)
class GaussianCeoModel:
    """Common Gaussian source observed by N sensors through additive noise."""

    sigma_s2: float
    sigma_z2: float
    n_sensors: int

    def __post_init__(self) -> None:
        if self.sigma_s2 <= 0.0:
            raise ValueError(f"sigma_s2 must be > 0, got {self.sigma_s2}")
        if self.sigma_z2 < 0.0:
            raise ValueError(f"sigma_z2 must be >= 0, got {self.sigma_z2}")
        if self.n_sensors < 1:
            raise ValueError(f"n_sensors must be >= 1, got {self.n_sensors}")


@dataclass(frozen=True)
class SensorReadings:
    """One realization of the source and the per-sensor observations."""

    source_value: float
    observations: np.ndarray


def sample_ceo(model: GaussianCeoModel, rng: np.random.Generator) -> SensorReadings:
    """One draw: S ~ N(0, sigma_s2), X_n = S + Z_n with Z_n ~ N(0, sigma_z2) i.i.d."""
    s, x = sample_ceo_batch(model, 1, rng)
    return SensorReadings(source_value=float(s[0]), observations=x[0])


def sample_ceo_batch(
    model: GaussianCeoModel, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized draws: returns (source (trials,), observations (trials, N))."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s = rng.normal(0.0, np.sqrt(model.sigma_s2), size=trials)
    if model.sigma_z2 > 0.0:
        z = rng.normal(0.0, np.sqrt(model.sigma_z2), size=(trials, model.n_sensors))
        x = s[:, None] + z
    else:
        # Noiseless sensing: observations equal the source exactly.
        x = np.repeat(s[:, None], model.n_sensors, axis=1)
    return s, x
