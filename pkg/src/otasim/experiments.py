"""Experiment runner: scenario configs, deterministic seeding, CSV emission.

Every scenario is a pure function of (seed, parameters): sweep points draw
from per-point substreams and results are assembled in point order, so the
emitted data rows are byte-identical across re-runs and thread counts.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import channels, constellation, detection, estimation, nomographic, separation
from .constellation import GroundStation, SyncImpairmentModel
from .detection import DetectionConfig
from .estimation import EstimationConfig
from .rng import substream
from .sources import GaussianCeoModel, adder_mac_preset, sample_pairs

SCENARIOS = (
    "separation",
    "nomographic",
    "estimation-scaling",
    "detection-sweep",
    "constellation-profile",
    "constellation-ota-mse",
)


class ExperimentError(ValueError):
    """Raised by run() when a config fails validation."""


@dataclass
class ExperimentConfig:
    scenario: str
    seed: int = 0
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    threads: int = 1


@dataclass
class ResultTable:
    """CSV-shaped result: columns with units, data rows, metadata block."""

    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def header_line(self) -> str:
        return ",".join(f"{c}[{u}]" for c, u in zip(self.columns, self.units))

    def data_lines(self) -> list[str]:
        return [",".join(_format_cell(v) for v in row) for row in self.rows]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        lines = [f"# {k} = {self.metadata[k]}" for k in sorted(self.metadata)]
        lines.append(self.header_line())
        lines.extend(self.data_lines())
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


DEFAULTS: dict[str, dict] = {
    "separation": {"grid_step": 0.001, "draws": 100_000},
    "nomographic": {
        "specs": list(nomographic.BUILTIN_NAMES),
        "points": 200,
        "n_sensors": 5,
        "noise_var": 0.0,
    },
    "estimation-scaling": {
        "n_list": [4, 8, 16, 32, 64, 128, 256, 512],
        "ptot_mode": "linear",
        "ptot": 10.0,
        "sigma_s2": 1.0,
        "sigma_z2": 1.0,
        "noise_var": 1.0,
        "trials": 20_000,
    },
    "detection-sweep": {
        "snr_db": [-3.0, 0.0, 3.0, 6.0, 9.0],
        "n_list": [1, 3, 5],
        "k": 2,
        "trials": 50_000,
        "prior": 0.5,
        "obs_noise_var": 0.25,
        "local_threshold": 0.5,
        "policy": channels.FULL_INVERSION,
    },
    "constellation-profile": {
        "preset": "starlink-p1-like",
        "mask_deg": 40.0,
        "lat_step": 2.0,
        "samples": 500,
        "duration_s": constellation.SIDEREAL_DAY_S,
    },
    "constellation-ota-mse": {
        "preset": "starlink-p1-like",
        "gs_lat_deg": 30.0,
        "gs_lon_deg": 0.0,
        "mask_deg": 40.0,
        "phase_err_grid": [0.0, 0.1, 0.3, 0.6, 1.0],
        "policies": list(channels.POLICIES),
        "epochs": 8,
        "trials": 4_000,
        "ptot": 10.0,
        "sigma_s2": 1.0,
        "sigma_z2": 0.1,
        "noise_var": 0.1,
        "carrier_hz": 2.0e9,
        "timing_err_std_s": None,
    },
}


def merged_parameters(cfg: ExperimentConfig) -> dict:
    params = dict(DEFAULTS.get(cfg.scenario, {}))
    params.update(cfg.parameters)
    return params


def validate(cfg: ExperimentConfig) -> list[str]:
    """Range-check a config; returns diagnostics (empty when ok), never raises."""
    diags: list[str] = []
    if cfg.scenario not in SCENARIOS:
        return [f"scenario = {cfg.scenario!r}: must be one of {SCENARIOS}"]
    if cfg.seed < 0:
        diags.append(f"seed = {cfg.seed}: must be >= 0")
    if cfg.threads < 1:
        diags.append(f"threads = {cfg.threads}: must be >= 1")
    p = merged_parameters(cfg)

    def check(cond: bool, msg: str) -> None:
        if not cond:
            diags.append(msg)

    if cfg.scenario == "separation":
        check(0.0 < p["grid_step"] <= 0.01, f"grid_step = {p['grid_step']}: must be in (0, 0.01]")
        check(p["draws"] >= 1, f"draws = {p['draws']}: must be >= 1")
    elif cfg.scenario == "nomographic":
        check(p["points"] >= 1, f"points = {p['points']}: must be >= 1")
        check(p["n_sensors"] >= 1, f"n_sensors = {p['n_sensors']}: must be >= 1")
        check(p["noise_var"] >= 0.0, f"noise_var = {p['noise_var']}: must be >= 0")
        for name in p["specs"]:
            check(
                name in nomographic.list_specs(),
                f"specs entry {name!r}: unknown nomographic spec",
            )
    elif cfg.scenario == "estimation-scaling":
        check(len(p["n_list"]) >= 1, "n_list: must be non-empty")
        check(all(n >= 1 for n in p["n_list"]), f"n_list = {p['n_list']}: entries must be >= 1")
        check(p["ptot_mode"] in ("fixed", "linear"), f"ptot_mode = {p['ptot_mode']!r}: must be fixed|linear")
        check(p["ptot"] > 0.0, f"ptot = {p['ptot']}: must be > 0")
        check(p["trials"] >= 1, f"trials = {p['trials']}: must be >= 1")
        check(p["sigma_s2"] > 0.0, f"sigma_s2 = {p['sigma_s2']}: must be > 0")
        check(p["sigma_z2"] >= 0.0, f"sigma_z2 = {p['sigma_z2']}: must be >= 0")
        check(p["noise_var"] >= 0.0, f"noise_var = {p['noise_var']}: must be >= 0")
    elif cfg.scenario == "detection-sweep":
        check(p["k"] in (2, 4), f"k = {p['k']}: must be 2 or 4")
        check(p["trials"] >= 1, f"trials = {p['trials']}: must be >= 1")
        check(0.0 < p["prior"] < 1.0, f"prior = {p['prior']}: must be in the open interval (0, 1)")
        check(p["obs_noise_var"] >= 0.0, f"obs_noise_var = {p['obs_noise_var']}: must be >= 0")
        check(all(n >= 1 for n in p["n_list"]), f"n_list = {p['n_list']}: entries must be >= 1")
        check(p["policy"] in channels.POLICIES, f"policy = {p['policy']!r}: must be one of {channels.POLICIES}")
    elif cfg.scenario == "constellation-profile":
        check(0.0 <= p["mask_deg"] < 90.0, f"mask_deg = {p['mask_deg']}: must be in [0, 90)")
        check(p["lat_step"] > 0.0, f"lat_step = {p['lat_step']}: must be > 0")
        check(p["samples"] >= 1, f"samples = {p['samples']}: must be >= 1")
        check(p["duration_s"] > 0.0, f"duration_s = {p['duration_s']}: must be > 0")
        check(_preset_known(p["preset"]), f"preset = {p['preset']!r}: unknown preset")
    elif cfg.scenario == "constellation-ota-mse":
        check(0.0 <= p["mask_deg"] < 90.0, f"mask_deg = {p['mask_deg']}: must be in [0, 90)")
        check(abs(p["gs_lat_deg"]) <= 90.0, f"gs_lat_deg = {p['gs_lat_deg']}: must be in [-90, 90]")
        check(p["epochs"] >= 1, f"epochs = {p['epochs']}: must be >= 1")
        check(p["trials"] >= 1, f"trials = {p['trials']}: must be >= 1")
        check(p["ptot"] > 0.0, f"ptot = {p['ptot']}: must be > 0")
        check(p["sigma_s2"] > 0.0, f"sigma_s2 = {p['sigma_s2']}: must be > 0")
        check(p["sigma_z2"] >= 0.0, f"sigma_z2 = {p['sigma_z2']}: must be >= 0")
        check(p["noise_var"] >= 0.0, f"noise_var = {p['noise_var']}: must be >= 0")
        check(all(s >= 0.0 for s in p["phase_err_grid"]), "phase_err_grid: entries must be >= 0")
        for pol in p["policies"]:
            check(pol in channels.POLICIES, f"policies entry {pol!r}: must be one of {channels.POLICIES}")
        check(_preset_known(p["preset"]), f"preset = {p['preset']!r}: unknown preset")
    return diags


def _preset_known(name: str) -> bool:
    return name in constellation.load_catalog()


def _parallel_map(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run(cfg: ExperimentConfig) -> ResultTable:
    """Validate, dispatch, emit. Raises ExperimentError on bad configs."""
    diags = validate(cfg)
    if diags:
        raise ExperimentError("; ".join(diags))
    params = merged_parameters(cfg)
    t0 = time.perf_counter()
    table = _SCENARIO_FNS[cfg.scenario](cfg.seed, params, cfg.threads)
    table.metadata.update(
        {
            "scenario": cfg.scenario,
            "seed": cfg.seed,
            "version": f"otasim-{__version__}",
            "wall_clock_s": f"{time.perf_counter() - t0:.3f}",
            "parameters": json.dumps(params, sort_keys=True, default=str),
        }
    )
    if cfg.output_path:
        table.to_csv(cfg.output_path)
    return table


# ---------------------------------------------------------------------------
# scenario implementations
# ---------------------------------------------------------------------------


def _run_separation(seed: int, p: dict, threads: int) -> ResultTable:
    dist = adder_mac_preset()
    region = separation.slepian_wolf_region(dist)
    capacity = separation.adder_mac_sum_capacity(p["grid_step"])
    verdict = separation.separation_fails(dist, p["grid_step"])
    pairs = sample_pairs(dist, p["draws"], substream(seed, 0))
    errors = 0
    for s1, s2 in pairs:
        if separation.uncoded_transceive((int(s1), int(s2))) != (int(s1), int(s2)):
            errors += 1
    rows = [
        ("r1_min", region.r1_min, "bits"),
        ("r2_min", region.r2_min, "bits"),
        ("sum_min", region.sum_min, "bits"),
        ("mac_sum_capacity", capacity, "bits"),
        ("margin", verdict.margin_bits, "bits"),
        ("separation_fails", int(verdict.fails), "bool"),
        ("uncoded_errors", errors, "count"),
        ("uncoded_draws", p["draws"], "count"),
    ]
    return ResultTable(
        columns=("quantity", "value", "units"),
        units=("-", "mixed", "-"),
        rows=rows,
    )


def _run_nomographic(seed: int, p: dict, threads: int) -> ResultTable:
    rows = []
    for i, name in enumerate(p["specs"]):
        spec = nomographic.get(name, weights=(1.0,) * p["n_sensors"]) if name == "weighted_sum" else nomographic.get(name)
        rng = substream(seed, 1, i)
        for j in range(p["points"]):
            readings = nomographic.random_readings(spec, p["n_sensors"], rng)
            ch = channels.CoherentMacChannel(
                gains=(1.0,) * readings.size, noise_var=p["noise_var"]
            )
            direct = nomographic.evaluate_direct(spec, readings)
            ota = nomographic.evaluate_ota(spec, readings, ch, rng)
            rows.append(
                (name, j, ";".join(format(x, ".6g") for x in readings), direct, ota, abs(ota - direct))
            )
    return ResultTable(
        columns=("spec", "point", "readings", "direct", "ota", "abs_error"),
        units=("-", "-", "-", "-", "-", "-"),
        rows=rows,
    )


def _run_estimation_scaling(seed: int, p: dict, threads: int) -> ResultTable:
    def point(args):
        i, n = args
        ptot = float(n) if p["ptot_mode"] == "linear" else float(p["ptot"])
        cfg = EstimationConfig(
            model=GaussianCeoModel(p["sigma_s2"], p["sigma_z2"], int(n)),
            p_tot=ptot,
            noise_var=p["noise_var"],
            trials=int(p["trials"]),
        )
        analog = estimation.run_analog_ceo(cfg, substream(seed, 2, i))
        digital = estimation.run_digital_baseline(cfg, substream(seed, 3, i))
        return (
            int(n),
            ptot,
            analog.d_empirical,
            analog.d_analytic,
            digital.d_empirical,
            analog.std_err,
        )

    rows = _parallel_map(point, list(enumerate(p["n_list"])), threads)
    return ResultTable(
        columns=("N", "p_tot", "d_analog_emp", "d_analog_ana", "d_digital", "std_err"),
        units=("-", "power", "power", "power", "power", "power"),
        rows=rows,
    )


def _run_detection_sweep(seed: int, p: dict, threads: int) -> ResultTable:
    points = [
        (i_n, int(n), float(db))
        for i_n, n in enumerate(p["n_list"])
        for db in p["snr_db"]
    ]

    def point(args):
        i_n, n, db = args
        cfg = DetectionConfig(
            n_sensors=n,
            n_hypotheses=int(p["k"]),
            prior=float(p["prior"]),
            obs_noise_var=float(p["obs_noise_var"]),
            local_threshold=float(p["local_threshold"]),
            channel=channels.CoherentMacChannel(gains=(1.0,) * n, noise_var=1.0),
            policy=p["policy"],
            snr=10.0 ** (db / 10.0),
        )
        # Common random numbers: the substream depends on N only, so every
        # SNR point of a given N sees identical states, votes, and noise.
        out = detection.run_detection(cfg, int(p["trials"]), substream(seed, 4, i_n))
        return (n, int(p["k"]), db, out.p_false_alarm, out.p_miss, out.p_error, out.se_error)

    rows = _parallel_map(point, points, threads)
    return ResultTable(
        columns=("N", "K", "snr_db", "p_fa", "p_miss", "p_error", "std_err"),
        units=("-", "-", "dB", "-", "-", "-", "-"),
        rows=rows,
    )


def _lat_grid(step: float) -> np.ndarray:
    n = int(round(90.0 / step))
    return np.linspace(-n * step, n * step, 2 * n + 1)


def _run_constellation_profile(seed: int, p: dict, threads: int) -> ResultTable:
    shell = constellation.load_preset(p["preset"])
    profile = constellation.los_profile(
        shell,
        mask_deg=float(p["mask_deg"]),
        lat_grid=_lat_grid(float(p["lat_step"])),
        time_samples=int(p["samples"]),
        duration_s=float(p["duration_s"]),
    )
    rows = [
        (lat, mean, mn, mx)
        for lat, mean, mn, mx in zip(
            profile.latitudes, profile.mean_count, profile.min_count, profile.max_count
        )
    ]
    return ResultTable(
        columns=("lat_deg", "mean", "min", "max"),
        units=("deg", "count", "count", "count"),
        rows=rows,
    )


def _run_constellation_ota_mse(seed: int, p: dict, threads: int) -> ResultTable:
    shell = constellation.load_preset(p["preset"])
    gs = GroundStation(
        lat_deg=float(p["gs_lat_deg"]),
        lon_deg=float(p["gs_lon_deg"]),
        min_elevation_deg=float(p["mask_deg"]),
    )
    est_cfg = EstimationConfig(
        model=GaussianCeoModel(p["sigma_s2"], p["sigma_z2"], 1),
        p_tot=float(p["ptot"]),
        noise_var=float(p["noise_var"]),
        trials=int(p["trials"]),
    )
    sync = SyncImpairmentModel(
        phase_err_grid=tuple(float(x) for x in p["phase_err_grid"]),
        timing_err_std_s=p["timing_err_std_s"],
        carrier_hz=float(p["carrier_hz"]),
        policies=tuple(p["policies"]),
        n_epochs=int(p["epochs"]),
    )
    study = constellation.ota_downlink_mse(shell, gs, est_cfg, sync, substream(seed, 5))
    rows = [
        (pt.phase_err_std, pt.policy, pt.mean_los, pt.mse, pt.std_err)
        for pt in study.points
    ]
    table = ResultTable(
        columns=("phase_err_std", "policy", "N_mean", "mse", "std_err"),
        units=("rad", "-", "count", "power", "power"),
        rows=rows,
    )
    table.metadata["epochs_used"] = study.epochs_used
    table.metadata["epochs_skipped"] = study.epochs_skipped
    return table


_SCENARIO_FNS = {
    "separation": _run_separation,
    "nomographic": _run_nomographic,
    "estimation-scaling": _run_estimation_scaling,
    "detection-sweep": _run_detection_sweep,
    "constellation-profile": _run_constellation_profile,
    "constellation-ota-mse": _run_constellation_ota_mse,
}
