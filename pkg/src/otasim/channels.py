"""Channel models and transmit-side pre-compensation.

Two access models are provided: the coherent MAC, where all sensors transmit
simultaneously and the receiver sees one superposed signal, and the
orthogonal parallel-access (PAC) baseline, which spends one resource per
sensor. Residual synchronization error is modeled as i.i.d. Gaussian phase
jitter per sensor per use, and residual CSI error as a relative amplitude
perturbation.

Noise conventions:
  * transmit_coherent / transmit_pac are complex-baseband: the additive
    noise is circularly symmetric with total power noise_var (E|w|^2).
  * transmit_coherent_real is the real-baseband view used by the analog
    function-computation chains (nomographic evaluation, CEO estimation):
    the receiver observes the real part of the superposition plus real
    Gaussian noise of variance noise_var.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FULL_INVERSION = "full-inversion"
PHASE_ONLY = "phase-only"
NO_COMPENSATION = "none"
POLICIES = (FULL_INVERSION, PHASE_ONLY, NO_COMPENSATION)

DEFAULT_CLIP = 10.0  # 20 dB amplification bound for full inversion


@dataclass(frozen=True)
class CoherentMacChannel:
    """Coherent MAC: per-sensor complex gains, receiver noise, sync impairments."""

    gains: tuple[complex, ...]
    noise_var: float = 0.0
    phase_err_std: float = 0.0
    amp_err_std: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gains", tuple(complex(g) for g in self.gains))
        if len(self.gains) == 0:
            raise ValueError("gains must be non-empty")
        if self.noise_var < 0.0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.phase_err_std < 0.0 or self.amp_err_std < 0.0:
            raise ValueError("impairment stds must be >= 0")

    @property
    def n_sensors(self) -> int:
        return len(self.gains)


@dataclass(frozen=True)
class Precompensation:
    """Per-sensor transmit amplitude a_n and phase shift v_n."""

    amplitudes: tuple[float, ...]
    phases: tuple[float, ...]
    policy: str
    clip: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "phases", tuple(float(v) for v in self.phases))
        if len(self.amplitudes) != len(self.phases):
            raise ValueError("amplitudes and phases must have equal length")
        if any(a < 0.0 or a > self.clip for a in self.amplitudes):
            raise ValueError(f"amplitudes must lie in [0, clip={self.clip}]")


def precompensate(gains, policy: str, clip: float = DEFAULT_CLIP) -> Precompensation:
    """Build the transmit-side channel inversion for the given policy.

    full-inversion: a_n = min(clip, 1/|g_n|), v_n = -arg(g_n)
    phase-only:     a_n = 1,                  v_n = -arg(g_n)
    none:           a_n = 1,                  v_n = 0
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}, expected one of {POLICIES}")
    g = np.asarray(gains, dtype=complex)
    if policy in (FULL_INVERSION, PHASE_ONLY):
        mag = np.abs(g)
        if np.any(mag == 0.0):
            raise ValueError(f"zero-magnitude gain cannot be inverted under policy {policy!r}")
        amps = np.minimum(clip, 1.0 / mag) if policy == FULL_INVERSION else np.ones(g.shape)
        phases = -np.angle(g)
    else:
        amps = np.ones(g.shape)
        phases = np.zeros(g.shape)
    return Precompensation(
        amplitudes=tuple(amps), phases=tuple(phases), policy=policy, clip=clip
    )


def effective_gains(pre: Precompensation, ch: CoherentMacChannel) -> np.ndarray:
    """Deterministic per-sensor end-to-end gain g_n * a_n * exp(j v_n)."""
    if len(pre.amplitudes) != ch.n_sensors:
        raise ValueError(
            f"precompensation covers {len(pre.amplitudes)} sensors, channel has {ch.n_sensors}"
        )
    a = np.asarray(pre.amplitudes)
    v = np.asarray(pre.phases)
    return np.asarray(ch.gains) * a * np.exp(1j * v)


def _impaired_gains(
    eff: np.ndarray, ch: CoherentMacChannel, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """(trials, N) effective gains with per-trial phase/amplitude jitter."""
    out = np.broadcast_to(eff, (trials, eff.size))
    if ch.phase_err_std > 0.0:
        phi = rng.normal(0.0, ch.phase_err_std, size=(trials, eff.size))
        out = out * np.exp(1j * phi)
    if ch.amp_err_std > 0.0:
        eps = rng.normal(0.0, ch.amp_err_std, size=(trials, eff.size))
        out = out * (1.0 + eps)
    return out


def transmit_coherent_batch(
    symbols: np.ndarray,
    pre: Precompensation,
    ch: CoherentMacChannel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Superpose (trials, N) symbol rows; returns (trials,) complex observations.

    Summation runs in ascending sensor index for bit-exact reproducibility.
    """
    x = np.atleast_2d(np.asarray(symbols))
    if x.shape[1] != ch.n_sensors:
        raise ValueError(f"got {x.shape[1]} symbols for {ch.n_sensors} sensors")
    g = _impaired_gains(effective_gains(pre, ch), ch, x.shape[0], rng)
    y = (g * x).sum(axis=1)
    if ch.noise_var > 0.0:
        scale = np.sqrt(ch.noise_var / 2.0)
        y = y + scale * (rng.normal(size=x.shape[0]) + 1j * rng.normal(size=x.shape[0]))
    return y


def transmit_coherent(
    symbols, pre: Precompensation, ch: CoherentMacChannel, rng: np.random.Generator
) -> complex:
    """One coherent-MAC use: sum_n g_n (1+eps_n) a_n e^{j(v_n+phi_n)} x_n + w."""
    return complex(transmit_coherent_batch(np.asarray(symbols)[None, :], pre, ch, rng)[0])


def transmit_coherent_real_batch(
    values: np.ndarray,
    pre: Precompensation,
    ch: CoherentMacChannel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Real-baseband superposition of (trials, N) real amplitudes.

    Returns Re{sum_n g_eff_n x_n} + w with w ~ N(0, noise_var); the imaginary
    leakage caused by phase errors is discarded by the real-valued receiver.
    """
    x = np.atleast_2d(np.asarray(values, dtype=float))
    if x.shape[1] != ch.n_sensors:
        raise ValueError(f"got {x.shape[1]} values for {ch.n_sensors} sensors")
    g = _impaired_gains(effective_gains(pre, ch), ch, x.shape[0], rng)
    y = (g * x).sum(axis=1).real
    if ch.noise_var > 0.0:
        y = y + rng.normal(0.0, np.sqrt(ch.noise_var), size=x.shape[0])
    return y


def transmit_coherent_real(
    values, pre: Precompensation, ch: CoherentMacChannel, rng: np.random.Generator
) -> float:
    """Scalar form of transmit_coherent_real_batch."""
    return float(transmit_coherent_real_batch(np.asarray(values)[None, :], pre, ch, rng)[0])


def transmit_pac(symbols, ch: CoherentMacChannel, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal baseline: y_n = g_n x_n + w_n, one resource per sensor."""
    x = np.asarray(symbols)
    if x.size != ch.n_sensors:
        raise ValueError(f"got {x.size} symbols for {ch.n_sensors} sensors")
    y = np.asarray(ch.gains) * x
    if ch.noise_var > 0.0:
        scale = np.sqrt(ch.noise_var / 2.0)
        y = y + scale * (rng.normal(size=x.size) + 1j * rng.normal(size=x.size))
    return y


def computation_rate(input_bits: int, channel_uses_bits: int) -> float:
    """kappa = k/n, the input-to-channel-use bit ratio of a computation code."""
    if channel_uses_bits < 1:
        raise ValueError(f"channel_uses_bits must be >= 1, got {channel_uses_bits}")
    if input_bits < 0:
        raise ValueError(f"input_bits must be >= 0, got {input_bits}")
    return input_bits / channel_uses_bits
