"""LEO Walker-constellation geometry and its coupling into the OTA chains.

Circular two-body orbits over a rotating spherical Earth: plane RAANs are
spread uniformly, in-plane anomalies follow the Walker delta phasing, and
positions are expressed Earth-fixed. Visibility uses an elevation mask at
the ground station. The downlink study treats every visible satellite as a
CEO sensor whose carrier phase derives from its slant delay, and sweeps
residual synchronization error as per-satellite phase jitter.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import channels, estimation
from .estimation import EstimationConfig
from .sources import GaussianCeoModel

EARTH_RADIUS_KM = 6378.137
MU_EARTH_KM3_S2 = 398600.4418
EARTH_ROT_RAD_S = 7.2921159e-5
SIDEREAL_DAY_S = 86164.0905
SPEED_OF_LIGHT_KM_S = 299792.458


@dataclass(frozen=True)
class WalkerConstellation:
    """One Walker-delta shell of circular orbits."""

    altitude_km: float
    inclination_deg: float
    n_planes: int
    sats_per_plane: int
    phasing_f: int = 0
    raan_offset_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.altitude_km <= 0.0:
            raise ValueError(f"altitude_km must be > 0, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination_deg must be in [0, 180], got {self.inclination_deg}")
        if self.n_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("n_planes and sats_per_plane must be >= 1")
        if not 0 <= self.phasing_f < self.n_planes:
            raise ValueError(
                f"phasing_f must satisfy 0 <= f < n_planes, got {self.phasing_f}"
            )

    @property
    def n_sats(self) -> int:
        return self.n_planes * self.sats_per_plane

    @property
    def orbit_radius_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def period_s(self) -> float:
        r = self.orbit_radius_km
        return 2.0 * math.pi * math.sqrt(r**3 / MU_EARTH_KM3_S2)

    @property
    def angular_rate_rad_s(self) -> float:
        return math.sqrt(MU_EARTH_KM3_S2 / self.orbit_radius_km**3)


@dataclass(frozen=True)
class GroundStation:
    """Station on the spherical Earth with an elevation mask."""

    lat_deg: float
    lon_deg: float = 0.0
    min_elevation_deg: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.lat_deg) > 90.0:
            raise ValueError(f"lat_deg must lie in [-90, 90], got {self.lat_deg}")
        if not 0.0 <= self.min_elevation_deg < 90.0:
            raise ValueError(
                f"min_elevation_deg must lie in [0, 90), got {self.min_elevation_deg}"
            )


@dataclass(frozen=True)
class LosProfile:
    """Per-latitude line-of-sight count statistics over the sampled window."""

    latitudes: tuple[float, ...]
    mean_count: tuple[float, ...]
    min_count: tuple[int, ...]
    max_count: tuple[int, ...]
    spread: tuple[float, ...]  # std of the count over time samples


def walker_elements(c: WalkerConstellation) -> tuple[np.ndarray, np.ndarray]:
    """Initial (RAAN, in-plane anomaly) in radians for every satellite.

    Adjacent planes are offset in anomaly by f * 360 / (P * S) degrees.
    """
    plane = np.repeat(np.arange(c.n_planes), c.sats_per_plane)
    slot = np.tile(np.arange(c.sats_per_plane), c.n_planes)
    raan = 2.0 * np.pi * plane / c.n_planes + math.radians(c.raan_offset_deg)
    anomaly = (
        2.0 * np.pi * slot / c.sats_per_plane
        + 2.0 * np.pi * c.phasing_f * plane / (c.n_planes * c.sats_per_plane)
    )
    return raan, anomaly


def propagate_many(c: WalkerConstellation, times_s: np.ndarray) -> np.ndarray:
    """Earth-fixed positions (T, S, 3) in km at the given epochs."""
    times = np.atleast_1d(np.asarray(times_s, dtype=float))
    raan, anomaly0 = walker_elements(c)
    r = c.orbit_radius_km
    inc = math.radians(c.inclination_deg)
    u = anomaly0[None, :] + c.angular_rate_rad_s * times[:, None]
    cu, su = np.cos(u), np.sin(u)
    co, so = np.cos(raan)[None, :], np.sin(raan)[None, :]
    ci, si = math.cos(inc), math.sin(inc)
    x_eci = r * (cu * co - su * ci * so)
    y_eci = r * (cu * so + su * ci * co)
    z_eci = r * su * si
    # Rotate into the Earth-fixed frame (Earth spins by theta about +z).
    theta = EARTH_ROT_RAD_S * times[:, None]
    ct, st = np.cos(theta), np.sin(theta)
    x = x_eci * ct + y_eci * st
    y = -x_eci * st + y_eci * ct
    return np.stack([x, y, z_eci], axis=-1)


def propagate(c: WalkerConstellation, t_s: float) -> np.ndarray:
    """Earth-fixed positions (S, 3) in km at time t_s >= 0."""
    if t_s < 0.0:
        raise ValueError(f"t_s must be >= 0, got {t_s}")
    return propagate_many(c, np.array([t_s]))[0]


def station_ecef(gs: GroundStation) -> np.ndarray:
    lat = math.radians(gs.lat_deg)
    lon = math.radians(gs.lon_deg)
    return EARTH_RADIUS_KM * np.array(
        [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
    )


def elevation_deg(positions: np.ndarray, station: np.ndarray) -> np.ndarray:
    """Elevation angles of satellites (..., 3) as seen from a station (3,)."""
    d = positions - station
    rng = np.linalg.norm(d, axis=-1)
    zenith = station / np.linalg.norm(station)
    sin_el = (d @ zenith) / rng
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


def count_los(positions: np.ndarray, gs: GroundStation) -> int:
    """Number of satellites above the station's elevation mask."""
    el = elevation_deg(positions, station_ecef(gs))
    return int((el > gs.min_elevation_deg).sum())


def los_profile(
    c: WalkerConstellation,
    mask_deg: float,
    lat_grid,
    time_samples: int,
    duration_s: float = SIDEREAL_DAY_S,
) -> LosProfile:
    """Time-averaged LoS count versus ground latitude (longitude fixed at 0).

    Sampling spans the requested window; one sidereal day covers all
    constellation-to-station longitude offsets, which stands in for an
    explicit longitude average.
    """
    if time_samples < 1:
        raise ValueError("time_samples must be >= 1")
    times = np.linspace(0.0, duration_s, time_samples, endpoint=False)
    pos = propagate_many(c, times)  # (T, S, 3)
    lats, means, mins, maxs, spreads = [], [], [], [], []
    for lat in lat_grid:
        gs = GroundStation(lat_deg=float(lat), lon_deg=0.0, min_elevation_deg=mask_deg)
        el = elevation_deg(pos, station_ecef(gs))
        counts = (el > mask_deg).sum(axis=1)
        lats.append(float(lat))
        means.append(float(counts.mean()))
        mins.append(int(counts.min()))
        maxs.append(int(counts.max()))
        spreads.append(float(counts.std()))
    return LosProfile(
        latitudes=tuple(lats),
        mean_count=tuple(means),
        min_count=tuple(mins),
        max_count=tuple(maxs),
        spread=tuple(spreads),
    )


@dataclass(frozen=True)
class SlantMetric:
    sat_index: int
    range_km: float
    delay_ms: float
    range_rate_km_s: float


def slant_metrics(
    c: WalkerConstellation, gs: GroundStation, t_s: float = 0.0, dt_s: float = 1.0
) -> list[SlantMetric]:
    """Range, one-way delay, and range rate for every visible satellite.

    Range rate is the finite difference of the slant range over dt_s.
    """
    st = station_ecef(gs)
    pos = propagate(c, t_s)
    el = elevation_deg(pos, st)
    visible = np.flatnonzero(el > gs.min_elevation_deg)
    ranges = np.linalg.norm(pos - st, axis=-1)
    pos_next = propagate(c, t_s + dt_s)
    ranges_next = np.linalg.norm(pos_next - st, axis=-1)
    out = []
    for i in visible:
        out.append(
            SlantMetric(
                sat_index=int(i),
                range_km=float(ranges[i]),
                delay_ms=float(ranges[i] / SPEED_OF_LIGHT_KM_S * 1e3),
                range_rate_km_s=float((ranges_next[i] - ranges[i]) / dt_s),
            )
        )
    return out


@dataclass(frozen=True)
class SyncImpairmentModel:
    """Residual synchronization/CSI impairment sweep for the downlink study.

    phase_err_grid lists per-satellite phase-jitter stds (radians). A timing
    error std, when given, contributes the extra grid point
    2*pi*carrier_hz*timing_err_std_s. Per-satellite link amplitudes are drawn
    uniformly from amp_spread (LoS links: no deep fades), and carrier phases
    follow each satellite's slant delay.
    """

    phase_err_grid: tuple[float, ...] = (0.0, 0.1, 0.3, 0.6, 1.0)
    timing_err_std_s: float | None = None
    carrier_hz: float = 2.0e9
    policies: tuple[str, ...] = (
        channels.FULL_INVERSION,
        channels.PHASE_ONLY,
        channels.NO_COMPENSATION,
    )
    n_epochs: int = 8
    amp_spread: tuple[float, float] = (0.5, 1.5)
    clip: float = channels.DEFAULT_CLIP

    def full_grid(self) -> tuple[float, ...]:
        grid = set(float(p) for p in self.phase_err_grid)
        if self.timing_err_std_s is not None:
            grid.add(2.0 * math.pi * self.carrier_hz * self.timing_err_std_s)
        return tuple(sorted(grid))


@dataclass(frozen=True)
class OtaMsePoint:
    phase_err_std: float
    policy: str
    mean_los: float
    mse: float
    std_err: float
    analytic_flat: float


@dataclass(frozen=True)
class OtaMseStudy:
    points: tuple[OtaMsePoint, ...]
    epochs_used: int
    epochs_skipped: int


def ota_downlink_mse(
    c: WalkerConstellation,
    gs: GroundStation,
    est_cfg: EstimationConfig,
    sync: SyncImpairmentModel,
    rng: np.random.Generator,
) -> OtaMseStudy:
    """MSE of the analog CEO downlink versus residual sync impairment.

    Every satellite in LoS at an epoch acts as a CEO sensor; est_cfg.trials
    Monte Carlo trials run per (epoch, policy, grid point). Randomness is
    shared across policies and grid points within an epoch, so the returned
    curves are directly comparable. Epochs with no visible satellite are
    skipped and counted.
    """
    grid = sync.full_grid()
    times = (np.arange(sync.n_epochs) + 0.5) * (SIDEREAL_DAY_S / sync.n_epochs)
    trials = est_cfg.trials
    acc = {(s, p): [0.0, 0.0, 0.0] for s in grid for p in sync.policies}
    flat_sum = 0.0
    n_sum = 0
    used = skipped = 0
    for t in times:
        pos = propagate(c, float(t))
        st = station_ecef(gs)
        el = elevation_deg(pos, st)
        visible = np.flatnonzero(el > gs.min_elevation_deg)
        if visible.size == 0:
            skipped += 1
            continue
        used += 1
        n = int(visible.size)
        n_sum += n
        delays = np.linalg.norm(pos[visible] - st, axis=-1) / SPEED_OF_LIGHT_KM_S
        carrier_phase = -2.0 * math.pi * sync.carrier_hz * delays
        amps = rng.uniform(sync.amp_spread[0], sync.amp_spread[1], size=n)
        gains = amps * np.exp(1j * np.mod(carrier_phase, 2.0 * math.pi))

        model = GaussianCeoModel(
            sigma_s2=est_cfg.model.sigma_s2,
            sigma_z2=est_cfg.model.sigma_z2,
            n_sensors=n,
        )
        cfg = EstimationConfig(
            model=model, p_tot=est_cfg.p_tot, noise_var=est_cfg.noise_var, trials=trials
        )
        alpha = estimation.analog_power_scale(cfg)
        c_mmse = estimation.mmse_coefficient(cfg)
        flat_sum += estimation.analytic_analog_distortion(cfg)

        # Shared randomness across policies and grid points at this epoch.
        s = rng.normal(0.0, math.sqrt(model.sigma_s2), size=trials)
        x = s[:, None]
        if model.sigma_z2 > 0.0:
            x = x + rng.normal(0.0, math.sqrt(model.sigma_z2), size=(trials, n))
        else:
            x = np.repeat(x, n, axis=1)
        w = rng.normal(size=trials) * math.sqrt(cfg.noise_var) if cfg.noise_var > 0.0 else 0.0
        xi = rng.normal(size=(trials, n))
        tx = alpha * x

        for policy in sync.policies:
            pre = channels.precompensate(gains, policy, sync.clip)
            e0 = channels.effective_gains(pre, channels.CoherentMacChannel(gains=tuple(gains)))
            for sigma in grid:
                eff = e0[None, :] * np.exp(1j * sigma * xi) if sigma > 0.0 else e0[None, :]
                y = (eff * tx).sum(axis=1).real + w
                err = c_mmse * y - s
                a = acc[(sigma, policy)]
                a[0] += trials
                a[1] += float((err**2).sum())
                a[2] += float((err**4).sum())
    if used == 0:
        raise ValueError("no epoch had a satellite in line of sight")

    analytic_flat = flat_sum / used
    points = []
    for sigma in grid:
        for policy in sync.policies:
            cnt, s1, s2 = acc[(sigma, policy)]
            mean = s1 / cnt
            var = max(s2 / cnt - mean * mean, 0.0)
            points.append(
                OtaMsePoint(
                    phase_err_std=sigma,
                    policy=policy,
                    mean_los=n_sum / used,
                    mse=mean,
                    std_err=math.sqrt(var / cnt),
                    analytic_flat=analytic_flat,
                )
            )
    return OtaMseStudy(points=tuple(points), epochs_used=used, epochs_skipped=skipped)


def load_preset(name: str) -> WalkerConstellation:
    """Constellation preset from the catalog shipped with the package."""
    catalog = load_catalog()
    if name not in catalog:
        raise ValueError(f"unknown preset {name!r}, available: {sorted(catalog)}")
    entry = {k: v for k, v in catalog[name].items() if not k.startswith("_")}
    return WalkerConstellation(**entry)


def load_catalog() -> dict:
    text = resources.files("otasim").joinpath("data/constellations.json").read_text()
    return json.loads(text)
