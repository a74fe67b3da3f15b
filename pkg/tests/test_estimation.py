"""Tests for the distributed-estimation schemes."""
import math

import numpy as np
import pytest

from otasim.estimation import (
    DistortionResult,
    EstimationConfig,
    analog_power_scale,
    analytic_analog_distortion,
    analytic_digital_distortion,
    mmse_coefficient,
    run_analog_ceo,
    run_digital_baseline,
    scaling_exponent,
)
from otasim.rng import substream
from otasim.sources import GaussianCeoModel, sample_ceo_batch


def _cfg(n, p_tot, sigma_s2=1.0, sigma_z2=1.0, noise_var=1.0, trials=1):
    return EstimationConfig(
        model=GaussianCeoModel(sigma_s2, sigma_z2, n),
        p_tot=p_tot,
        noise_var=noise_var,
        trials=trials,
    )


def test_power_scale_examples():
    assert analog_power_scale(_cfg(1, 1.0, sigma_z2=0.0)) == pytest.approx(1.0)
    assert analog_power_scale(_cfg(4, 4.0)) == pytest.approx(math.sqrt(0.5))


def test_power_scale_empirical_per_sensor_power():
    cfg = _cfg(4, 8.0, sigma_s2=1.5, sigma_z2=0.5, trials=100_000)
    alpha = analog_power_scale(cfg)
    _, x = sample_ceo_batch(cfg.model, cfg.trials, substream(21, 0))
    power = np.mean((alpha * x[:, 0]) ** 2)
    target = cfg.p_tot / cfg.model.n_sensors
    tol = 3.0 * math.sqrt(2.0 / cfg.trials) * target
    assert abs(power - target) <= tol


def test_mmse_coefficient_examples():
    # N=1, sigma_z2=0, noise_var=1: c = sqrt(P)/(P+1).
    for p in (1.0, 4.0, 10.0):
        cfg = _cfg(1, p, sigma_z2=0.0)
        assert mmse_coefficient(cfg) == pytest.approx(math.sqrt(p) / (p + 1.0), abs=1e-12)
    # Noiseless chain: c = 1/(alpha N) and the estimate is exact.
    cfg0 = _cfg(8, 2.0, sigma_z2=0.0, noise_var=0.0)
    alpha = analog_power_scale(cfg0)
    assert mmse_coefficient(cfg0) == pytest.approx(1.0 / (alpha * 8), abs=1e-12)


def test_mmse_coefficient_is_empirically_optimal():
    cfg = _cfg(4, 4.0, trials=1_000_000)
    alpha = analog_power_scale(cfg)
    c = mmse_coefficient(cfg)
    s, x = sample_ceo_batch(cfg.model, cfg.trials, substream(22, 0))
    y = alpha * x.sum(axis=1) + substream(22, 1).normal(0, 1.0, cfg.trials)
    mse = lambda cc: np.mean((cc * y - s) ** 2)
    base = mse(c)
    assert mse(c * 1.01) >= base
    assert mse(c * 0.99) >= base


def test_analytic_distortion_examples():
    for p in (1.0, 10.0, 100.0):
        assert analytic_analog_distortion(_cfg(1, p, sigma_z2=0.0)) == pytest.approx(
            1.0 / (p + 1.0), abs=1e-12
        )
    assert analytic_analog_distortion(_cfg(4, 2.0, sigma_z2=0.0, noise_var=0.0)) == 0.0


def test_analytic_distortion_monotonicity_and_bounds():
    base = dict(sigma_s2=1.0, sigma_z2=1.0, noise_var=1.0)
    for n, p in [(1, 1.0), (2, 1.0), (8, 10.0), (64, 10.0)]:
        d = analytic_analog_distortion(_cfg(n, p, **base))
        assert 0.0 <= d <= 1.0
        assert analytic_analog_distortion(_cfg(2 * n, p, **base)) <= d
        assert analytic_analog_distortion(_cfg(n, 2 * p, **base)) <= d
        worse_z = analytic_analog_distortion(_cfg(n, p, sigma_s2=1.0, sigma_z2=2.0, noise_var=1.0))
        worse_w = analytic_analog_distortion(_cfg(n, p, sigma_s2=1.0, sigma_z2=1.0, noise_var=2.0))
        assert worse_z >= d
        assert worse_w >= d


def test_analog_ceo_exact_recovery():
    cfg = _cfg(4, 4.0, sigma_z2=0.0, noise_var=0.0, trials=1000)
    res = run_analog_ceo(cfg, substream(23, 0))
    assert res.d_empirical <= 1e-18
    assert res.d_analytic == 0.0


def test_analog_ceo_matches_closed_form():
    cfg = _cfg(10, 10.0, trials=100_000)
    res = run_analog_ceo(cfg, substream(23, 1))
    assert abs(res.d_empirical - res.d_analytic) <= 3.0 * res.std_err
    assert res.d_analytic == pytest.approx(analytic_analog_distortion(cfg), abs=1e-15)


def test_analog_ceo_power_monotonicity_crn():
    lo = run_analog_ceo(_cfg(8, 5.0, trials=50_000), substream(23, 2))
    hi = run_analog_ceo(_cfg(8, 10.0, trials=50_000), substream(23, 2))
    assert hi.d_empirical < lo.d_empirical


def test_digital_baseline_floor_at_high_rate():
    # noise_var -> 0 gives infinite rate: distortion hits the centralized
    # linear-MMSE floor sigma_s2*sigma_z2/(sigma_z2 + N*sigma_s2).
    cfg = _cfg(8, 10.0, noise_var=0.0, trials=200_000)
    res = run_digital_baseline(cfg, substream(24, 0))
    floor = 1.0 * 1.0 / (1.0 + 8 * 1.0)
    assert res.d_analytic == pytest.approx(floor, abs=1e-12)
    assert abs(res.d_empirical - floor) <= 3.0 * res.std_err


def test_digital_single_sensor_close_to_analog():
    cfg = _cfg(1, 10.0, trials=1)
    d_dig = analytic_digital_distortion(cfg)
    d_ana = analytic_analog_distortion(cfg)
    assert abs(d_dig - d_ana) / d_ana <= 0.10


def test_digital_zero_rate_returns_prior_variance():
    cfg = _cfg(4, 1.0, noise_var=math.inf, trials=100)
    res = run_digital_baseline(cfg, substream(24, 1))
    assert res == DistortionResult(1.0, 1.0, 0.0)


def test_digital_matches_its_closed_form():
    cfg = _cfg(16, 16.0, trials=100_000)
    res = run_digital_baseline(cfg, substream(24, 2))
    assert abs(res.d_empirical - res.d_analytic) <= 3.0 * res.std_err


def test_scaling_exponent_exact_laws():
    xs = [1.0, 2.0, 4.0, 8.0, 16.0]
    assert scaling_exponent([(x, 1.0 / x) for x in xs]) == pytest.approx(-1.0, abs=1e-12)
    assert scaling_exponent([(x, 0.7) for x in xs]) == pytest.approx(0.0, abs=1e-12)


def test_scaling_exponent_validation():
    with pytest.raises(ValueError):
        scaling_exponent([(1.0, 1.0), (2.0, 0.5), (3.0, 0.3)])
    with pytest.raises(ValueError):
        scaling_exponent([(1.0, 1.0), (2.0, 0.5), (2.0, 0.4), (3.0, 0.3)])
    with pytest.raises(ValueError):
        scaling_exponent([(1.0, 1.0), (2.0, 0.5), (3.0, 0.0), (4.0, 0.2)])


def test_analog_slope_near_minus_one():
    points = []
    for i, n in enumerate((16, 64, 256, 1024)):
        res = run_analog_ceo(_cfg(n, 10.0, trials=20_000), substream(25, i))
        points.append((n, res.d_empirical))
    assert -1.1 <= scaling_exponent(points) <= -0.9


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(4, 0.0)
    with pytest.raises(ValueError):
        _cfg(4, 1.0, trials=0)
    with pytest.raises(ValueError):
        EstimationConfig(
            model=GaussianCeoModel(1.0, 1.0, 4), p_tot=1.0, noise_var=-1.0, trials=1
        )
