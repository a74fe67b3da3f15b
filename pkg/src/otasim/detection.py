"""Over-the-air distributed detection.

Chain: each sensor observes a noisy version of the global state, runs a local
threshold test, maps its decision onto a PSK symbol (BPSK for two hypotheses,
QPSK for four), pre-compensates its channel, and all sensors transmit in one
coherent MAC use. The fusion center recovers vote counts from the
superposition and declares the majority hypothesis, ties favoring the null.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import channels
from .channels import CoherentMacChannel

# BPSK: hypothesis 0 -> +1, hypothesis 1 -> -1.
_BPSK = np.array([1.0 + 0.0j, -1.0 + 0.0j])
# QPSK cells 0..3 at pi/4 + z*pi/2; adjacent cells differ in one axis (Gray).
_QPSK = np.exp(1j * (np.pi / 4 + np.arange(4) * np.pi / 2))


@dataclass(frozen=True)
class DetectionConfig:
    """End-to-end detection experiment parameters.

    snr is the per-sensor transmit SNR (linear): symbol energy over total
    receiver noise power, after pre-compensation to unit effective gain.
    mu0/mu1 are the source levels under the null and alternative.
    """

    n_sensors: int
    n_hypotheses: int
    prior: float
    obs_noise_var: float
    local_threshold: float
    channel: CoherentMacChannel
    policy: str = channels.FULL_INVERSION
    snr: float = 1.0
    mu0: float = 0.0
    mu1: float = 1.0
    clip: float = channels.DEFAULT_CLIP

    def __post_init__(self) -> None:
        if self.n_hypotheses not in (2, 4):
            raise ValueError(f"n_hypotheses must be 2 or 4, got {self.n_hypotheses}")
        if not 0.0 < self.prior < 1.0:
            raise ValueError(f"prior must lie in (0, 1), got {self.prior}")
        if self.obs_noise_var < 0.0:
            raise ValueError("obs_noise_var must be >= 0")
        if self.snr <= 0.0:
            raise ValueError(f"snr must be > 0, got {self.snr}")
        if self.channel.n_sensors != self.n_sensors:
            raise ValueError(
                f"channel has {self.channel.n_sensors} gains for {self.n_sensors} sensors"
            )
        if self.mu1 <= self.mu0:
            raise ValueError("mu1 must exceed mu0")


@dataclass(frozen=True)
class DetectionOutcome:
    """False-alarm/miss/error rates with per-quantity standard errors.

    p_error is the prior-weighted combination of the two conditional rates.
    """

    p_false_alarm: float
    p_miss: float
    p_error: float
    se_false_alarm: float
    se_miss: float
    se_error: float


def local_decision(h: float, threshold) -> int:
    """Threshold test: scalar threshold gives a binary vote, a sequence of
    three ordered thresholds quantizes into 4 cells. Boundary values go to
    the upper cell."""
    if np.isscalar(threshold):
        return int(h >= threshold)
    thr = tuple(threshold)
    if len(thr) != 3:
        raise ValueError(f"4-level quantization needs 3 thresholds, got {len(thr)}")
    if list(thr) != sorted(thr):
        raise ValueError("thresholds must be ordered")
    return int(sum(h >= t for t in thr))


def psk_map(z: int, k: int) -> complex:
    """Unit-energy PSK symbol for hypothesis index z of a K-ary alphabet."""
    if k == 2:
        table = _BPSK
    elif k == 4:
        table = _QPSK
    else:
        raise ValueError(f"K must be 2 or 4, got {k}")
    if not 0 <= z < k:
        raise ValueError(f"hypothesis index {z} out of range for K={k}")
    return complex(table[z])


def fuse_global(received: complex, n: int, k: int):
    """Global decision from one superposed observation, assuming unit
    effective gains.

    K=2: the noiseless superposition is N - 2m for m negative votes;
    m_hat = round((N - Re y)/2) clamped to [0, N], majority declares 1,
    ties declare 0. K=4: the same count recovery runs per quadrature axis
    and the two axis majorities select the output cell.
    """
    out = _fuse_batch(np.asarray([received], dtype=complex), n, k)
    return int(out[0])


def _count_votes(projection: np.ndarray, n: int) -> np.ndarray:
    """Estimated number of negative votes from a +/-1-spaced axis sum."""
    m = np.rint((n - projection) / 2.0)
    return np.clip(m, 0, n)


def _fuse_batch(received: np.ndarray, n: int, k: int) -> np.ndarray:
    if k == 2:
        m = _count_votes(received.real, n)
        return (m > n / 2).astype(np.int64)
    if k == 4:
        # Per-axis component magnitude is 1/sqrt(2); rescale to +/-1 spacing.
        i_neg = _count_votes(np.sqrt(2.0) * received.real, n) > n / 2
        q_neg = _count_votes(np.sqrt(2.0) * received.imag, n) > n / 2
        # (I sign, Q sign) -> cell: (+,+)=0, (-,+)=1, (-,-)=2, (+,-)=3.
        cell = np.where(q_neg, np.where(i_neg, 2, 3), np.where(i_neg, 1, 0))
        return cell.astype(np.int64)
    raise ValueError(f"K must be 2 or 4, got {k}")


def analytic_bpsk_error(snr: float) -> float:
    """Q(sqrt(2*snr)): single-sensor BPSK error over the complex AWGN channel."""
    if snr < 0.0:
        raise ValueError(f"snr must be >= 0, got {snr}")
    return 0.5 * math.erfc(math.sqrt(snr))


def _local_thresholds(cfg: DetectionConfig) -> tuple[float, ...]:
    if cfg.n_hypotheses == 2:
        return (cfg.local_threshold,)
    # 4-level quantizer centered on the binary threshold, cell width gap/2.
    delta = (cfg.mu1 - cfg.mu0) / 4.0
    return (cfg.local_threshold - delta, cfg.local_threshold, cfg.local_threshold + delta)


def draw_states_and_votes(
    cfg: DetectionConfig, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample global states (trials,) and local votes (trials, N)."""
    states = (rng.random(trials) < cfg.prior).astype(np.int64)
    source = np.where(states == 1, cfg.mu1, cfg.mu0)
    if cfg.obs_noise_var > 0.0:
        h = source[:, None] + rng.normal(
            0.0, math.sqrt(cfg.obs_noise_var), size=(trials, cfg.n_sensors)
        )
    else:
        h = np.repeat(source[:, None], cfg.n_sensors, axis=1)
    thr = _local_thresholds(cfg)
    votes = np.zeros(h.shape, dtype=np.int64)
    for t in thr:
        votes += h >= t
    return states, votes


def transmit_votes_and_fuse(
    votes: np.ndarray, cfg: DetectionConfig, rng: np.random.Generator
) -> np.ndarray:
    """Push (trials, N) votes through the channel and fuse; returns decisions.

    Symbols carry unit energy and are scaled so the per-sensor transmit SNR
    equals cfg.snr; the receiver normalizes back to unit vote spacing before
    count recovery.
    """
    table = _BPSK if cfg.n_hypotheses == 2 else _QPSK
    symbols = table[votes]
    amp = math.sqrt(cfg.snr * cfg.channel.noise_var) if cfg.channel.noise_var > 0.0 else 1.0
    pre = channels.precompensate(cfg.channel.gains, cfg.policy, cfg.clip)
    y = channels.transmit_coherent_batch(amp * symbols, pre, cfg.channel, rng)
    return _fuse_batch(y / amp, cfg.n_sensors, cfg.n_hypotheses)


def majority_oracle(votes: np.ndarray, k: int = 2) -> np.ndarray:
    """Centralized fusion that sees the votes directly (channel bypassed)."""
    n = votes.shape[1]
    if k == 2:
        m = votes.sum(axis=1)
        return (m > n / 2).astype(np.int64)
    if k == 4:
        i_neg = np.isin(votes, (1, 2)).sum(axis=1) > n / 2
        q_neg = np.isin(votes, (2, 3)).sum(axis=1) > n / 2
        return np.where(q_neg, np.where(i_neg, 2, 3), np.where(i_neg, 1, 0)).astype(np.int64)
    raise ValueError(f"K must be 2 or 4, got {k}")


def decision_to_binary(decision: np.ndarray, k: int) -> np.ndarray:
    """Map a fused decision to the binary global hypothesis (upper cells -> 1)."""
    if k == 2:
        return decision
    return (decision >= 2).astype(np.int64)


def _rate_and_se(err: np.ndarray, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 0.0
    p = float(err) / n
    return p, math.sqrt(p * (1.0 - p) / n)


def tally(states: np.ndarray, binary_decisions: np.ndarray, prior: float) -> DetectionOutcome:
    """Empirical conditional error rates and their prior-weighted combination."""
    null = states == 0
    n0 = int(null.sum())
    n1 = states.size - n0
    p_fa, se_fa = _rate_and_se((binary_decisions[null] == 1).sum(), n0)
    p_miss, se_miss = _rate_and_se((binary_decisions[~null] == 0).sum(), n1)
    p_err = (1.0 - prior) * p_fa + prior * p_miss
    se_err = math.sqrt(((1.0 - prior) * se_fa) ** 2 + (prior * se_miss) ** 2)
    return DetectionOutcome(
        p_false_alarm=p_fa,
        p_miss=p_miss,
        p_error=p_err,
        se_false_alarm=se_fa,
        se_miss=se_miss,
        se_error=se_err,
    )


def run_detection(
    cfg: DetectionConfig, trials: int, rng: np.random.Generator
) -> DetectionOutcome:
    """End-to-end Monte Carlo of the detection chain."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    states, votes = draw_states_and_votes(cfg, trials, rng)
    decisions = transmit_votes_and_fuse(votes, cfg, rng)
    return tally(states, decision_to_binary(decisions, cfg.n_hypotheses), cfg.prior)
