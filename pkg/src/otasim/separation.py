"""Source-channel separation failure on the 2-user adder MAC.

Compares the Slepian-Wolf lossless region of a correlated binary pair against
the sum capacity of the noiseless adder channel Y = X1 + X2 with independent
inputs, and provides the zero-error uncoded transceiver that works whenever
P(1,0) = 0. All rates are in bits (base-2 logarithms throughout).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .sources import CorrelatedBinaryPair

_RATE_TOL = 1e-12

# y = s1 + s2 is decodable because the preset assigns zero mass to (1,0),
# leaving a unique surviving preimage for every channel output.
ADDER_DECODE = {0: (0, 0), 1: (0, 1), 2: (1, 1)}


@dataclass(frozen=True)
class RateRegion:
    """Corner description of a rate region, bits per use.

    kind is "source" (Slepian-Wolf style, sum_min binds) or "channel"
    (capacity style, sum_max binds).
    """

    r1_min: float
    r2_min: float
    sum_min: float
    sum_max: float | None = None
    kind: str = "source"

    def __post_init__(self) -> None:
        rates = [self.r1_min, self.r2_min, self.sum_min]
        if self.sum_max is not None:
            rates.append(self.sum_max)
        if any(r < -_RATE_TOL for r in rates):
            raise ValueError(f"rates must be >= 0, got {rates}")
        if self.kind == "source" and self.sum_min + _RATE_TOL < max(self.r1_min, self.r2_min):
            raise ValueError("source region requires sum_min >= max(r1_min, r2_min)")


def _entropy_bits(probs) -> float:
    """Shannon entropy -sum p*log2(p) over support cells (0*log0 := 0)."""
    return -sum(p * math.log2(p) for p in probs if p > 0.0)


def joint_entropy(dist: CorrelatedBinaryPair) -> float:
    """H(S1, S2) in bits."""
    return _entropy_bits((dist.p00, dist.p01, dist.p10, dist.p11))


def slepian_wolf_region(dist: CorrelatedBinaryPair) -> RateRegion:
    """Lossless distributed-coding corner: H(S1|S2), H(S2|S1), H(S1,S2)."""
    h12 = joint_entropy(dist)
    m1, m2 = dist.marginal_s1(), dist.marginal_s2()
    h1 = _entropy_bits((1.0 - m1, m1))
    h2 = _entropy_bits((1.0 - m2, m2))
    return RateRegion(
        r1_min=max(0.0, h12 - h2),
        r2_min=max(0.0, h12 - h1),
        sum_min=h12,
        kind="source",
    )


def adder_output_entropy(p: float, q: float) -> float:
    """H(Y) for Y = X1 + X2, X1 ~ Bern(p), X2 ~ Bern(q) independent."""
    return _entropy_bits(((1 - p) * (1 - q), p * (1 - q) + (1 - p) * q, p * q))


def adder_mac_sum_capacity(grid_step: float = 0.001) -> float:
    """Max of H(Y) over independent Bernoulli inputs, to 1e-4 absolute.

    Grid search followed by a local simplex refinement. The maximum is
    1.5 bits at p = q = 1/2 (output law 1/4, 1/2, 1/4).
    """
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must be in (0, 0.01], got {grid_step}")
    pts = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    p = pts[:, None]
    q = pts[None, :]
    cells = np.stack(
        [(1 - p) * (1 - q), p * (1 - q) + (1 - p) * q, p * q]
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(cells > 0.0, cells * np.log2(cells), 0.0)
    h = -terms.sum(axis=0)
    i, j = np.unravel_index(np.argmax(h), h.shape)
    best = float(h[i, j])

    res = optimize.minimize(
        lambda x: -adder_output_entropy(x[0], x[1]),
        x0=[float(pts[i]), float(pts[j])],
        method="Nelder-Mead",
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        options={"xatol": 1e-9, "fatol": 1e-12},
    )
    return max(best, float(-res.fun))


class SeparationVerdict(NamedTuple):
    fails: bool
    margin_bits: float


def separation_fails(dist: CorrelatedBinaryPair, grid_step: float = 0.001) -> SeparationVerdict:
    """Whether no digital code can losslessly convey the pair over the adder MAC.

    True iff the Slepian-Wolf sum rate exceeds the channel sum capacity;
    margin is the gap in bits. Note the verdict concerns digital (separated)
    schemes only: it is also True for independent fair bits (H = 2 > 1.5),
    where the failure is capacity shortage rather than lost correlation.
    """
    sum_min = slepian_wolf_region(dist).sum_min
    capacity = adder_mac_sum_capacity(grid_step)
    margin = sum_min - capacity
    return SeparationVerdict(fails=margin > 0.0, margin_bits=margin)


def uncoded_transceive(pair: tuple[int, int]) -> tuple[int, int]:
    """Send the raw bits through y = s1 + s2 and decode by unique preimage.

    Valid only for distributions with P(1,0) = 0; the input (1,0) collides
    with (0,1) on the channel output and is rejected.
    """
    s1, s2 = pair
    if s1 not in (0, 1) or s2 not in (0, 1):
        raise ValueError(f"pair must be binary, got {pair}")
    if (s1, s2) == (1, 0):
        raise ValueError("(1, 0) is ambiguous under the adder map: decode assumes P(1,0) = 0")
    return ADDER_DECODE[s1 + s2]
