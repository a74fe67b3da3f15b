"""Tests for the source and sensing models."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otasim.rng import substream
from otasim.sources import (
    CorrelatedBinaryPair,
    GaussianCeoModel,
    adder_mac_preset,
    sample_ceo,
    sample_ceo_batch,
    sample_pair,
    sample_pairs,
)

THIRD = 1.0 / 3.0


def test_preset_values():
    d = adder_mac_preset()
    assert (d.p00, d.p01, d.p10, d.p11) == (THIRD, THIRD, 0.0, THIRD)
    assert abs(d.p00 + d.p01 + d.p10 + d.p11 - 1.0) <= 1e-12


def test_preset_marginals():
    # Oracle: row/column sums of the joint table.
    d = adder_mac_preset()
    assert d.marginal_s1() == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert d.marginal_s2() == pytest.approx(2.0 / 3.0, abs=1e-15)


@pytest.mark.parametrize(
    "probs",
    [
        (-0.1, 0.5, 0.3, 0.3),
        (0.25, 0.25, 0.25, 0.26),
        (0.5, 0.5, 0.5, -0.5),
    ],
)
def test_invalid_probabilities_rejected(probs):
    with pytest.raises(ValueError):
        CorrelatedBinaryPair(*probs)


@given(
    st.tuples(
        st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(0.01, 1.0)
    )
)
@settings(max_examples=50, deadline=None)
def test_normalized_distributions_accepted(raw):
    total = sum(raw)
    d = CorrelatedBinaryPair(*(x / total for x in raw))
    assert abs(d.as_array().sum() - 1.0) <= 1e-12


def test_degenerate_distribution_always_zero_zero():
    d = CorrelatedBinaryPair(1.0, 0.0, 0.0, 0.0)
    rng = substream(0, 0)
    for _ in range(50):
        assert sample_pair(d, rng) == (0, 0)


def test_preset_sampling_frequencies():
    d = adder_mac_preset()
    n = 200_000
    pairs = sample_pairs(d, n, substream(7, 0))
    counts = {
        (0, 0): d.p00,
        (0, 1): d.p01,
        (1, 0): d.p10,
        (1, 1): d.p11,
    }
    for (s1, s2), p in counts.items():
        freq = np.mean((pairs[:, 0] == s1) & (pairs[:, 1] == s2))
        if p == 0.0:
            assert freq == 0.0  # zero-mass cell must never appear
        else:
            assert abs(freq - p) <= 3.0 * np.sqrt(p * (1 - p) / n)


def test_scalar_and_batch_sampler_agree_in_law():
    d = adder_mac_preset()
    rng = substream(8, 0)
    scalar = np.array([sample_pair(d, rng) for _ in range(20_000)])
    freq01 = np.mean((scalar[:, 0] == 0) & (scalar[:, 1] == 1))
    assert abs(freq01 - THIRD) <= 3.0 * np.sqrt(THIRD * (1 - THIRD) / 20_000)
    assert not np.any((scalar[:, 0] == 1) & (scalar[:, 1] == 0))


def test_identical_seeds_bit_exact():
    d = adder_mac_preset()
    a = sample_pairs(d, 1000, substream(42, 3))
    b = sample_pairs(d, 1000, substream(42, 3))
    assert np.array_equal(a, b)
    c = sample_pairs(d, 1000, substream(42, 4))
    assert not np.array_equal(a, c)


def test_ceo_model_validation():
    with pytest.raises(ValueError):
        GaussianCeoModel(sigma_s2=0.0, sigma_z2=1.0, n_sensors=2)
    with pytest.raises(ValueError):
        GaussianCeoModel(sigma_s2=1.0, sigma_z2=-1.0, n_sensors=2)
    with pytest.raises(ValueError):
        GaussianCeoModel(sigma_s2=1.0, sigma_z2=1.0, n_sensors=0)


def test_noiseless_sensing_equals_source():
    m = GaussianCeoModel(sigma_s2=2.0, sigma_z2=0.0, n_sensors=4)
    r = sample_ceo(m, substream(1, 0))
    assert np.all(r.observations == r.source_value)
    assert r.observations.shape == (4,)


def test_observation_covariance_and_variance():
    # Cov(X1, X2) = sigma_s2 and Var(X_n) = sigma_s2 + sigma_z2.
    m = GaussianCeoModel(sigma_s2=1.0, sigma_z2=1.0, n_sensors=2)
    n = 100_000
    _, x = sample_ceo_batch(m, n, substream(5, 0))
    cov = np.cov(x[:, 0], x[:, 1])
    assert abs(cov[0, 1] - 1.0) <= 0.03
    # 3 standard errors of the variance estimator: 3*sqrt(2/n)*true_var.
    tol = 3.0 * np.sqrt(2.0 / n) * 2.0
    assert abs(cov[0, 0] - 2.0) <= tol
    assert abs(cov[1, 1] - 2.0) <= tol


def test_observation_pairwise_correlation():
    m = GaussianCeoModel(sigma_s2=1.0, sigma_z2=3.0, n_sensors=2)
    _, x = sample_ceo_batch(m, 100_000, substream(5, 1))
    rho = np.corrcoef(x[:, 0], x[:, 1])[0, 1]
    assert abs(rho - 0.25) <= 0.015  # sigma_s2/(sigma_s2+sigma_z2) = 1/4
