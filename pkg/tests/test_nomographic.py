"""Tests for the nomographic function registry and evaluators."""
import math

import numpy as np
import pytest

from otasim import channels
from otasim.channels import CoherentMacChannel
from otasim.nomographic import (
    BUILTIN_NAMES,
    IDENTITY_TOL,
    NomographicSpec,
    builtin,
    evaluate_direct,
    evaluate_ota,
    list_specs,
    random_readings,
    register,
)
from otasim.rng import substream


def _spec(name):
    if name == "weighted_sum":
        return builtin(name, weights=(0.5, -1.0, 2.0, 1.0, 0.25))
    return builtin(name)


def test_builtin_examples():
    assert evaluate_direct(builtin("mean"), [1, 2, 3]) == pytest.approx(2.0)
    assert evaluate_direct(builtin("sum"), [0, 0, 0]) == 0.0
    assert evaluate_direct(builtin("product"), [2, 4]) == pytest.approx(8.0)
    assert evaluate_direct(builtin("euclidean_norm"), [3, 4]) == pytest.approx(5.0)
    assert evaluate_direct(builtin("weighted_sum", weights=(1, -1)), [5, 3]) == pytest.approx(2.0)
    assert evaluate_direct(builtin("active_count", threshold=0.5), [0.2, 0.7, 0.9]) == 2.0


def test_unknown_name_rejected():
    with pytest.raises(ValueError):
        builtin("median")


def test_weighted_sum_requires_weights():
    with pytest.raises(ValueError):
        builtin("weighted_sum")
    spec = builtin("weighted_sum", weights=(1.0, 2.0))
    with pytest.raises(ValueError):
        evaluate_direct(spec, [1.0, 2.0, 3.0])  # wrong reading count


def test_product_domain_violation():
    with pytest.raises(ValueError):
        evaluate_direct(builtin("product"), [2.0, 0.0])


def test_channel_length_mismatch():
    ch = CoherentMacChannel(gains=(1.0, 1.0))
    with pytest.raises(ValueError):
        evaluate_ota(builtin("sum"), [1.0, 2.0, 3.0], ch, substream(0, 0))


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_decomposition_identity_noiseless(name):
    # Registry admission check: g(sum h) equals the target on 1000 points.
    spec = _spec(name)
    rng = substream(10, hash(name) % 1000)
    n = spec.n_expected or 6
    ch = CoherentMacChannel(gains=(1.0,) * n)
    for _ in range(1000):
        readings = random_readings(spec, n, rng)
        direct = evaluate_direct(spec, readings)
        ota = evaluate_ota(spec, readings, ch, rng)
        assert abs(ota - direct) <= IDENTITY_TOL * max(1.0, abs(direct))


def test_full_precompensation_cancels_gains():
    spec = builtin("mean")
    rng = substream(11, 0)
    gains = tuple(2.0 * np.exp(1j * rng.uniform(0, 2 * np.pi, 4)))
    ch = CoherentMacChannel(gains=gains)
    readings = [1.0, 2.0, 3.0, 4.0]
    ota = evaluate_ota(spec, readings, ch, rng, policy=channels.FULL_INVERSION)
    assert ota == pytest.approx(2.5, abs=1e-9)


def test_awgn_error_statistics_for_sum():
    # Identity g passes receiver noise straight through: error ~ N(0, noise_var).
    spec = builtin("sum")
    noise_var = 0.25
    n_trials = 30_000
    rng = substream(12, 0)
    ch = CoherentMacChannel(gains=(1.0,) * 3, noise_var=noise_var)
    readings = np.array([0.5, -1.0, 2.0])
    direct = evaluate_direct(spec, readings)
    errs = np.array(
        [evaluate_ota(spec, readings, ch, rng) - direct for _ in range(n_trials)]
    )
    se_mean = math.sqrt(noise_var / n_trials)
    assert abs(errs.mean()) <= 3.0 * se_mean
    se_var = noise_var * math.sqrt(2.0 / n_trials)
    assert abs(errs.var() - noise_var) <= 3.0 * se_var


@pytest.mark.parametrize("name", ["mean", "weighted_sum"])
def test_linear_specs_unbiased_under_awgn(name):
    spec = _spec(name)
    rng = substream(13, 0 if name == "mean" else 1)
    n = spec.n_expected or 4
    ch = CoherentMacChannel(gains=(1.0,) * n, noise_var=1.0)
    readings = random_readings(spec, n, substream(13, 7))
    direct = evaluate_direct(spec, readings)
    vals = np.array([evaluate_ota(spec, readings, ch, rng) for _ in range(20_000)])
    post_scale = 1.0 / n if name == "mean" else 1.0  # g scales the noise too
    se = post_scale * math.sqrt(1.0 / vals.size)
    assert abs(vals.mean() - direct) <= 3.0 * se


@pytest.mark.parametrize("name", ["product", "euclidean_norm"])
def test_nonlinear_specs_consistent_as_noise_vanishes(name):
    spec = builtin(name)
    readings = np.array([1.5, 2.0, 1.2]) if name == "product" else np.array([3.0, 4.0, 0.0])
    direct = evaluate_direct(spec, readings)
    rng = substream(14, 0)
    devs = []
    for noise_var in (1e-2, 1e-4, 1e-6):
        ch = CoherentMacChannel(gains=(1.0,) * 3, noise_var=noise_var)
        vals = np.array([evaluate_ota(spec, readings, ch, rng) for _ in range(2000)])
        devs.append(abs(vals.mean() - direct))
    assert devs[-1] <= 1e-2
    assert devs[-1] <= devs[0] + 1e-9


def test_register_admits_valid_and_rejects_invalid():
    good = NomographicSpec(
        name="mean_of_squares",
        pre=lambda s, n, N: s * s,
        post=lambda x, N: x / N,
        target=lambda v: float(np.mean(v**2)),
        domain=(-100.0, 100.0),
    )
    register(good)
    assert "mean_of_squares" in list_specs()

    bad = NomographicSpec(
        name="broken",
        pre=lambda s, n, N: s,
        post=lambda x, N: x,
        target=lambda v: float(np.max(v)),  # max is not a plain sum composition
        domain=(-100.0, 100.0),
    )
    with pytest.raises(ValueError):
        register(bad)
    assert "broken" not in list_specs()
