"""Registry and evaluator for nomographic functions.

A nomographic function f(s_1, ..., s_N) factors as g(sum_n h_n(s_n)): the
per-sensor pre-processing h_n runs at each transmitter, the MAC superposes
the h_n values in one channel use, and the receiver applies g to the single
observation. Transmissions are real amplitudes on a coherent carrier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels
from .channels import CoherentMacChannel, Precompensation

IDENTITY_TOL = 1e-9

BUILTIN_NAMES = ("mean", "sum", "weighted_sum", "product", "euclidean_norm", "active_count")

# Representative interval used when drawing random evaluation points; kept
# well inside every builtin's validity domain.
_SAMPLE_LO, _SAMPLE_HI = -10.0, 10.0


@dataclass(frozen=True)
class NomographicSpec:
    """A target function together with its pre/post decomposition.

    pre(s, n, N) is the n-th sensor map h_n, post(x, N) the receiver map g,
    target(s_vector) the function f being computed. domain is the validity
    interval for individual sensor readings. n_expected pins the reading
    count when the decomposition is only defined for a fixed N (weighted
    sums); None means any N.
    """

    name: str
    pre: Callable[[float, int, int], float]
    post: Callable[[float, int], float]
    target: Callable[[np.ndarray], float]
    domain: tuple[float, float]
    n_expected: int | None = None


def builtin(name: str, weights=None, threshold: float = 0.5) -> NomographicSpec:
    """Construct one of the built-in nomographic specs.

    weights is required for weighted_sum; threshold parametrizes
    active_count. Unknown names raise ValueError.
    """
    if name == "mean":
        return NomographicSpec(
            name="mean",
            pre=lambda s, n, N: s,
            post=lambda x, N: x / N,
            target=lambda v: float(np.mean(v)),
            domain=(-1e6, 1e6),
        )
    if name == "sum":
        return NomographicSpec(
            name="sum",
            pre=lambda s, n, N: s,
            post=lambda x, N: x,
            target=lambda v: float(np.sum(v)),
            domain=(-1e6, 1e6),
        )
    if name == "weighted_sum":
        if weights is None:
            raise ValueError("weighted_sum requires a weights sequence")
        w = tuple(float(wi) for wi in weights)
        return NomographicSpec(
            name="weighted_sum",
            pre=lambda s, n, N: w[n] * s,
            post=lambda x, N: x,
            target=lambda v: float(np.dot(w, v)),
            domain=(-1e6, 1e6),
            n_expected=len(w),
        )
    if name == "product":
        # ln is only bounded away from the origin; readings below 1e-6 error.
        return NomographicSpec(
            name="product",
            pre=lambda s, n, N: math.log(s),
            post=lambda x, N: math.exp(x),
            target=lambda v: float(np.prod(v)),
            domain=(1e-6, 1e6),
        )
    if name == "euclidean_norm":
        return NomographicSpec(
            name="euclidean_norm",
            pre=lambda s, n, N: s * s,
            post=lambda x, N: math.sqrt(max(x, 0.0)),
            target=lambda v: float(np.linalg.norm(v)),
            domain=(-1e6, 1e6),
        )
    if name == "active_count":
        return NomographicSpec(
            name="active_count",
            pre=lambda s, n, N: 1.0 if s >= threshold else 0.0,
            post=lambda x, N: x,
            target=lambda v: float(np.sum(v >= threshold)),
            domain=(-1e6, 1e6),
        )
    raise ValueError(f"unknown nomographic spec {name!r}, expected one of {BUILTIN_NAMES}")


_CUSTOM: dict[str, NomographicSpec] = {}


def register(spec: NomographicSpec, probe_sensors: int = 5, probe_points: int = 200) -> None:
    """Admit a custom spec after checking the g(sum h) = f identity.

    The identity is probed on random domain points; specs that violate it
    beyond IDENTITY_TOL are rejected.
    """
    rng = np.random.default_rng(0)
    for _ in range(probe_points):
        readings = random_readings(spec, probe_sensors, rng)
        lhs = spec.post(
            sum(spec.pre(float(s), n, len(readings)) for n, s in enumerate(readings)),
            len(readings),
        )
        rhs = spec.target(readings)
        if abs(lhs - rhs) > IDENTITY_TOL * max(1.0, abs(rhs)):
            raise ValueError(
                f"spec {spec.name!r} violates the decomposition identity: "
                f"g(sum h) = {lhs!r} but target = {rhs!r}"
            )
    _CUSTOM[spec.name] = spec


def list_specs() -> tuple[str, ...]:
    return BUILTIN_NAMES + tuple(sorted(_CUSTOM))


def get(name: str, **kwargs) -> NomographicSpec:
    if name in _CUSTOM:
        return _CUSTOM[name]
    return builtin(name, **kwargs)


def random_readings(spec: NomographicSpec, n_sensors: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform readings from the spec's domain clipped to a test interval."""
    lo = max(spec.domain[0], _SAMPLE_LO)
    hi = min(spec.domain[1], _SAMPLE_HI)
    n = spec.n_expected if spec.n_expected is not None else n_sensors
    return rng.uniform(lo, hi, size=n)


def _check_readings(spec: NomographicSpec, readings: np.ndarray) -> None:
    lo, hi = spec.domain
    if readings.size == 0:
        raise ValueError("readings must be non-empty")
    if spec.n_expected is not None and readings.size != spec.n_expected:
        raise ValueError(
            f"spec {spec.name!r} expects {spec.n_expected} readings, got {readings.size}"
        )
    bad = (readings < lo) | (readings > hi)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise ValueError(
            f"reading {readings[idx]!r} at index {idx} outside domain [{lo}, {hi}] "
            f"of spec {spec.name!r}"
        )


def evaluate_direct(spec: NomographicSpec, readings) -> float:
    """Centralized reference: compute the target f on the raw readings."""
    r = np.asarray(readings, dtype=float)
    _check_readings(spec, r)
    return float(spec.target(r))


def evaluate_ota(
    spec: NomographicSpec,
    readings,
    channel: CoherentMacChannel,
    rng: np.random.Generator,
    policy: str = channels.FULL_INVERSION,
    clip: float = channels.DEFAULT_CLIP,
    pre: Precompensation | None = None,
) -> float:
    """One over-the-air evaluation of the spec.

    Each sensor transmits h_n(s_n) with its pre-compensation; the receiver
    applies g to the single real superposed observation. A caller-supplied
    Precompensation overrides the (policy, clip) pair.
    """
    r = np.asarray(readings, dtype=float)
    _check_readings(spec, r)
    if channel.n_sensors != r.size:
        raise ValueError(f"channel has {channel.n_sensors} gains for {r.size} readings")
    n = r.size
    tx = np.array([spec.pre(float(s), i, n) for i, s in enumerate(r)])
    if pre is None:
        pre = channels.precompensate(channel.gains, policy, clip)
    received = channels.transmit_coherent_real(tx, pre, channel, rng)
    return float(spec.post(received, n))
