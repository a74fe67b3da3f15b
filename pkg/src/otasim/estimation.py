"""Distributed estimation of a Gaussian source over the coherent MAC.

The analog scheme scales each observation to meet a per-sensor power budget,
superposes all transmissions in one channel use, and applies the linear MMSE
estimator S_hat = (E{SY}/E{Y^2}) Y at the fusion center. The digital baseline
splits the coherent-MAC sum rate equally across sensors, models each sensor's
quantizer as a rate-R forward test channel, and fuses with linear MMSE.

Distortion scaling at fixed per-sensor power: the analog scheme decays like
1/(N * P_tot) while the digital baseline only decays like 1/log(N * P_tot).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channels
from .sources import GaussianCeoModel, sample_ceo_batch

# Largest scratch array (trials x sensors) drawn per Monte Carlo chunk.
_CHUNK_BUDGET = 4_000_000


@dataclass(frozen=True)
class EstimationConfig:
    """CEO experiment: source model, shared power budget, receiver noise, trials."""

    model: GaussianCeoModel
    p_tot: float
    noise_var: float
    trials: int

    def __post_init__(self) -> None:
        if self.p_tot <= 0.0:
            raise ValueError(f"p_tot must be > 0, got {self.p_tot}")
        if self.noise_var < 0.0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class DistortionResult:
    """Measured and closed-form distortion with the Monte Carlo standard error."""

    d_empirical: float
    d_analytic: float
    std_err: float


def analog_power_scale(cfg: EstimationConfig) -> float:
    """Amplitude alpha with E[(alpha X_n)^2] = p_tot / N per sensor."""
    m = cfg.model
    return math.sqrt((cfg.p_tot / m.n_sensors) / (m.sigma_s2 + m.sigma_z2))


def mmse_coefficient(cfg: EstimationConfig) -> float:
    """c = E{SY}/E{Y^2} for Y = alpha*N*S + alpha*sum Z_n + W."""
    m = cfg.model
    a2 = analog_power_scale(cfg) ** 2
    num = math.sqrt(a2) * m.n_sensors * m.sigma_s2
    den = a2 * m.n_sensors**2 * m.sigma_s2 + a2 * m.n_sensors * m.sigma_z2 + cfg.noise_var
    return num / den


def analytic_analog_distortion(cfg: EstimationConfig) -> float:
    """Closed-form MMSE distortion sigma_s2 - (E{SY})^2 / E{Y^2}."""
    m = cfg.model
    a2 = analog_power_scale(cfg) ** 2
    num = a2 * m.n_sensors * m.sigma_z2 + cfg.noise_var
    den = a2 * m.n_sensors**2 * m.sigma_s2 + a2 * m.n_sensors * m.sigma_z2 + cfg.noise_var
    return m.sigma_s2 * num / den


def _accumulate(errs: np.ndarray, acc: list[float]) -> None:
    acc[0] += errs.size
    acc[1] += float(errs.sum())
    acc[2] += float((errs * errs).sum())


def _finish(acc: list[float], d_analytic: float) -> DistortionResult:
    n, s1, s2 = acc
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return DistortionResult(
        d_empirical=mean, d_analytic=d_analytic, std_err=math.sqrt(var / n)
    )


def run_analog_ceo(cfg: EstimationConfig, rng: np.random.Generator) -> DistortionResult:
    """Monte Carlo distortion of the analog chain (unit gains, perfect sync)."""
    m = cfg.model
    alpha = analog_power_scale(cfg)
    c = mmse_coefficient(cfg)
    ch = channels.CoherentMacChannel(gains=(1.0,) * m.n_sensors, noise_var=cfg.noise_var)
    pre = channels.precompensate(ch.gains, channels.NO_COMPENSATION)
    acc = [0.0, 0.0, 0.0]
    chunk = max(1, _CHUNK_BUDGET // m.n_sensors)
    remaining = cfg.trials
    while remaining > 0:
        t = min(chunk, remaining)
        s, x = sample_ceo_batch(m, t, rng)
        y = channels.transmit_coherent_real_batch(alpha * x, pre, ch, rng)
        err = c * y - s
        _accumulate(err * err, acc)
        remaining -= t
    return _finish(acc, analytic_analog_distortion(cfg))


def digital_rate_per_sensor(cfg: EstimationConfig) -> float:
    """Equal split R = C_sum / N of the coherent-MAC sum rate, bits per use.

    C_sum = 1/2 log2(1 + N * p_tot / noise_var); infinite when the receiver
    is noiseless.
    """
    if cfg.noise_var == 0.0:
        return math.inf
    snr = cfg.model.n_sensors * cfg.p_tot / cfg.noise_var
    return 0.5 * math.log2(1.0 + snr) / cfg.model.n_sensors


def _quantizer_noise_var(cfg: EstimationConfig, rate: float) -> float:
    """Forward-test-channel noise: Var Q = sigma_x2 * 2^{-2R} / (1 - 2^{-2R})."""
    m = cfg.model
    if math.isinf(rate):
        return 0.0
    frac = 2.0 ** (-2.0 * rate)
    return (m.sigma_s2 + m.sigma_z2) * frac / (1.0 - frac)


def analytic_digital_distortion(cfg: EstimationConfig) -> float:
    """LMMSE distortion from N observations X_n + Q_n with the rate-split quantizer."""
    m = cfg.model
    rate = digital_rate_per_sensor(cfg)
    if rate <= 0.0:
        return m.sigma_s2
    v = m.sigma_z2 + _quantizer_noise_var(cfg, rate)
    return m.sigma_s2 * v / (v + m.n_sensors * m.sigma_s2)


def run_digital_baseline(cfg: EstimationConfig, rng: np.random.Generator) -> DistortionResult:
    """Monte Carlo distortion of the quantize-and-forward baseline.

    At rate 0 no information crosses the channel and the prior variance is
    returned directly.
    """
    m = cfg.model
    rate = digital_rate_per_sensor(cfg)
    if rate <= 0.0:
        return DistortionResult(m.sigma_s2, m.sigma_s2, 0.0)
    q_var = _quantizer_noise_var(cfg, rate)
    v = m.sigma_z2 + q_var
    # LMMSE weight on the sum of quantized observations.
    k = m.sigma_s2 / (m.n_sensors * m.sigma_s2 + v)
    acc = [0.0, 0.0, 0.0]
    chunk = max(1, _CHUNK_BUDGET // m.n_sensors)
    remaining = cfg.trials
    while remaining > 0:
        t = min(chunk, remaining)
        s, x = sample_ceo_batch(m, t, rng)
        if q_var > 0.0:
            x = x + rng.normal(0.0, math.sqrt(q_var), size=x.shape)
        err = k * x.sum(axis=1) - s
        _accumulate(err * err, acc)
        remaining -= t
    return _finish(acc, analytic_digital_distortion(cfg))


def scaling_exponent(points) -> float:
    """Least-squares slope of log D versus log x over (x, D) pairs."""
    pts = [(float(x), float(d)) for x, d in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points, got {len(pts)}")
    xs = np.array([p[0] for p in pts])
    ds = np.array([p[1] for p in pts])
    if np.any(np.diff(xs) <= 0.0):
        raise ValueError("x values must be strictly increasing")
    if np.any(ds <= 0.0):
        raise ValueError("distortions must be > 0")
    return float(np.polyfit(np.log(xs), np.log(ds), 1)[0])
