"""Command-line interface.

Verbs: separation, nomographic, estimate, detect, constellation. Each verb
accepts --config (JSON key/value file), --seed, --out, --threads; explicit
flags override the config file, which overrides the built-in defaults.
Exit status: 0 on success, 2 on validation failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import nomographic
from .constellation import load_catalog
from .experiments import ExperimentConfig, ExperimentError, run


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file of scenario parameters")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--out", help="CSV output path (default: print to stdout)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="otasim", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("separation", help="adder-MAC separation-failure numbers")
    _common(p)
    p.add_argument("--grid-step", type=float, dest="grid_step")
    p.add_argument("--draws", type=int)
    p.set_defaults(scenario="separation")

    p = sub.add_parser("nomographic", help="nomographic function evaluation")
    nsub = p.add_subparsers(dest="action", required=True)
    pl = nsub.add_parser("list", help="list registered specs")
    pl.set_defaults(scenario=None, action="list")
    pr = nsub.add_parser("run", help="evaluate specs directly and over the air")
    _common(pr)
    pr.add_argument("--specs", type=_str_list)
    pr.add_argument("--points", type=int)
    pr.add_argument("--n-sensors", type=int, dest="n_sensors")
    pr.add_argument("--noise-var", type=float, dest="noise_var")
    pr.set_defaults(scenario="nomographic", action="run")

    p = sub.add_parser("estimate", help="CEO estimation experiments")
    esub = p.add_subparsers(dest="action", required=True)
    pe = esub.add_parser("sweep", help="distortion versus N")
    _common(pe)
    pe.add_argument("--n-list", type=_int_list, dest="n_list")
    pe.add_argument("--ptot-mode", choices=("fixed", "linear"), dest="ptot_mode")
    pe.add_argument("--ptot", type=float)
    pe.add_argument("--trials", type=int)
    pe.add_argument("--sigma-s2", type=float, dest="sigma_s2")
    pe.add_argument("--sigma-z2", type=float, dest="sigma_z2")
    pe.add_argument("--noise-var", type=float, dest="noise_var")
    pe.set_defaults(scenario="estimation-scaling")

    p = sub.add_parser("detect", help="distributed detection experiments")
    dsub = p.add_subparsers(dest="action", required=True)
    pd = dsub.add_parser("sweep", help="error rates versus SNR and N")
    _common(pd)
    pd.add_argument("--snr-db", type=_float_list, dest="snr_db")
    pd.add_argument("--n-list", type=_int_list, dest="n_list")
    pd.add_argument("--k", type=int, choices=(2, 4))
    pd.add_argument("--trials", type=int)
    pd.add_argument("--prior", type=float)
    pd.add_argument("--obs-noise-var", type=float, dest="obs_noise_var")
    pd.add_argument("--local-threshold", type=float, dest="local_threshold")
    pd.add_argument("--policy")
    pd.set_defaults(scenario="detection-sweep")

    p = sub.add_parser("constellation", help="LEO geometry experiments")
    csub = p.add_subparsers(dest="action", required=True)
    pp = csub.add_parser("profile", help="LoS count versus latitude")
    _common(pp)
    pp.add_argument("--preset")
    pp.add_argument("--mask-deg", type=float, dest="mask_deg")
    pp.add_argument("--lat-step", type=float, dest="lat_step")
    pp.add_argument("--samples", type=int)
    pp.add_argument("--duration-s", type=float, dest="duration_s")
    pp.set_defaults(scenario="constellation-profile")
    po = csub.add_parser("ota-mse", help="downlink MSE versus sync impairment")
    _common(po)
    po.add_argument("--preset")
    po.add_argument("--gs-lat", type=float, dest="gs_lat_deg")
    po.add_argument("--gs-lon", type=float, dest="gs_lon_deg")
    po.add_argument("--mask-deg", type=float, dest="mask_deg")
    po.add_argument("--phase-err-grid", type=_float_list, dest="phase_err_grid")
    po.add_argument("--policies", type=_str_list)
    po.add_argument("--epochs", type=int)
    po.add_argument("--trials", type=int)
    po.add_argument("--ptot", type=float)
    po.add_argument("--sigma-s2", type=float, dest="sigma_s2")
    po.add_argument("--sigma-z2", type=float, dest="sigma_z2")
    po.add_argument("--noise-var", type=float, dest="noise_var")
    po.add_argument("--carrier-hz", type=float, dest="carrier_hz")
    po.add_argument("--timing-err-std", type=float, dest="timing_err_std_s")
    po.set_defaults(scenario="constellation-ota-mse")

    return ap


_NON_PARAM_KEYS = {"verb", "action", "scenario", "config", "seed", "out", "threads"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.verb == "nomographic" and args.action == "list":
        for name in nomographic.list_specs():
            print(name)
        return 0
    if args.verb == "constellation" and getattr(args, "preset", "") == "list":
        for name, entry in sorted(load_catalog().items()):
            print(f"{name}: {entry}")
        return 0

    params = {}
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            params.update(json.load(f))
    for key, value in vars(args).items():
        if key not in _NON_PARAM_KEYS and value is not None:
            params[key] = value

    cfg = ExperimentConfig(
        scenario=args.scenario,
        seed=args.seed,
        parameters=params,
        output_path=args.out,
        threads=args.threads,
    )
    try:
        table = run(cfg)
    except ExperimentError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    if args.out:
        print(f"wrote {len(table.rows)} rows to {args.out}")
    else:
        sys.stdout.write(table.to_csv_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
