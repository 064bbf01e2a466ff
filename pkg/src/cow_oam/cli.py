"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .beam import Beam, lg_intensity, max_intensity_radius
from .scenario import JSON_KEYS, ConfigError, ScenarioConfig, config_from_dict, config_to_dict, load_config
from .selection import generate_field, potential_users, select_pair

OUTPUT_ENV = "COW_OAM_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"override {item!r} is not key=value")
        if key not in JSON_KEYS:
            raise UsageError(f"unknown override key {key!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    overrides = _parse_overrides(args.set)
    if overrides:
        cfg = config_from_dict(overrides, base=cfg)
    return cfg


def _values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --values list {text!r}") from exc


def _output_dir(args) -> Path:
    return Path(args.output_dir or os.environ.get(OUTPUT_ENV) or "out")


def cmd_validate(args) -> int:
    cfg = _config(args)
    print(json.dumps(config_to_dict(cfg), sort_keys=True))
    return 0


def cmd_beam_profile(args) -> int:
    cfg = _config(args)
    lam = args.wavelength or cfg.wavelength
    beam = Beam(args.mode, args.waist, lam)
    r_end = args.r_end or 3 * max_intensity_radius(beam, args.z)
    r = np.linspace(0.0, r_end, args.points)
    rows = zip(r, lg_intensity(beam, r, args.z))
    out = _output_dir(args)
    ex.atomic_write(out / "beam_profile.csv", ex.csv_text(("r_meters", "intensity"), rows))
    doc = {
        "command": "beam-profile",
        "config": config_to_dict(cfg),
        "beam": {"mode": args.mode, "waist_radius": args.waist, "wavelength": lam, "z": args.z},
        "outputs": ["beam_profile.csv"],
        "build": ex.git_describe(),
    }
    ex.write_manifest(out / "manifest.json", doc)
    return 0


def cmd_demo(args) -> int:
    cfg = _config(args)
    seed = 0 if args.seed is None else args.seed
    field = generate_field(cfg, seed)
    sel = select_pair(field, cfg)
    flags = ["user"] * len(field)
    if sel.found:
        for k in potential_users(field, sel.ring):
            flags[k] = "PU"
        for k in sel.cu_indices:
            flags[k] = "CU"
    xy = field.xy
    rows = [(k, field.r[k], field.theta[k], xy[k, 0], xy[k, 1], flags[k]) for k in range(len(field))]
    out = _output_dir(args)
    ex.atomic_write(out / "demo.csv", ex.csv_text(("index", "r", "theta", "x", "y", "flag"), rows))
    doc = {
        "command": "demo",
        "config": config_to_dict(cfg),
        "seed": seed,
        "selection": {
            "status": sel.status,
            "cu_indices": list(sel.cu_indices) if sel.found else None,
            "ring_radius": sel.ring.r_s if sel.found else None,
            "ring_half_width": sel.epsilon if sel.found else None,
            "chord": sel.chord if sel.found else None,
            "z_c": sel.z_c if sel.found else None,
            "waist_radius": sel.waist_radius if sel.found else None,
        },
        "outputs": ["demo.csv"],
        "build": ex.git_describe(),
    }
    ex.write_manifest(out / "manifest.json", doc)
    print(f"{sel.status}: cu={sel.cu_indices} chord={sel.chord:.4g} m")
    return 0


_SWEEPS = {
    "pcow-sweep": ("pcow_sweep.csv", ex.PCOW_HEADER, ex.pcow_rows),
    "se-sweep": ("se_sweep.csv", ex.SE_HEADER, ex.se_rows),
    "cu-count-sweep": ("cu_count_sweep.csv", ex.CU_HEADER, ex.cu_rows),
}


def cmd_sweep(args) -> int:
    cfg = _config(args)
    try:
        spec = ex.SweepSpec(
            args.variable, tuple(_values(args.values)), trials=args.trials, base=cfg,
            master_seed=0 if args.seed is None else args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = ex.run_sweep(spec, workers=args.workers)
    name, header, rows = _SWEEPS[args.command]
    out = _output_dir(args)
    ex.atomic_write(out / name, ex.csv_text(header, rows(res)))
    ex.write_manifest(out / "manifest.json", ex.manifest(res, args.command, [name]))
    print(f"wrote {out / name} ({len(res.points)} rows, {res.runtime_s:.1f} s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario config (defaults to built-in values)")
    common.add_argument("-o", "--output-dir", help=f"output directory (default ${OUTPUT_ENV} or ./out)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field")
    common.add_argument("--seed", type=int, help="master seed")

    parser = argparse.ArgumentParser(prog="cow-oam", description="Cooperative OAM simulation tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-config", parents=[common], help="check a config and print it normalized")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("beam-profile", parents=[common], help="radial intensity of one OAM beam")
    p.add_argument("--mode", type=int, required=True)
    p.add_argument("--waist", type=float, required=True, help="waist radius, m")
    p.add_argument("--z", type=float, required=True, help="propagation distance, m")
    p.add_argument("--wavelength", type=float, help="m (default from config frequency)")
    p.add_argument("--r-end", type=float, help="largest radius, m (default 3 r_max)")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_beam_profile)

    p = sub.add_parser("demo", parents=[common], help="one user field with PU/CU flags")
    p.set_defaults(func=cmd_demo)

    for name in _SWEEPS:
        p = sub.add_parser(name, parents=[common], help=f"Monte Carlo sweep ({_SWEEPS[name][0]})")
        p.add_argument("--variable", required=True, choices=ex.SWEEP_VARIABLES)
        p.add_argument("--values", required=True, help="comma-separated sweep values")
        p.add_argument("--trials", type=int, default=2000)
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, FileNotFoundError) as exc:
        print(f"cow-oam: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"cow-oam: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
