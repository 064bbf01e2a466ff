"""Shared plumbing for the experiment scripts: argument parsing and output."""

import argparse
from pathlib import Path

from cow_oam import experiments as ex
from cow_oam.scenario import ScenarioConfig, load_config

TABLES = {
    "pcow": ("pcow_sweep.csv", ex.PCOW_HEADER, ex.pcow_rows),
    "se": ("se_sweep.csv", ex.SE_HEADER, ex.se_rows),
    "cu": ("cu_count_sweep.csv", ex.CU_HEADER, ex.cu_rows),
}


def parser(description: str, default_out: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", help="JSON scenario config (default: built-in reference setup)")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=f"out/{default_out}")
    return p


def base_config(args) -> ScenarioConfig:
    return load_config(args.config) if args.config else ScenarioConfig()


def run_and_write(args, name, variable, values, tables, **changes):
    """Run one sweep and write the requested CSV tables plus a manifest to out/<name>/."""
    spec = ex.SweepSpec(variable, values, trials=args.trials, base=base_config(args).replace(**changes),
                        master_seed=args.seed)
    res = ex.run_sweep(spec, workers=args.workers)
    out = Path(args.out) / name
    written = []
    for key in tables:
        fname, header, rows = TABLES[key]
        ex.atomic_write(out / fname, ex.csv_text(header, rows(res)))
        written.append(fname)
    ex.write_manifest(out / "manifest.json", ex.manifest(res, f"script:{name}", written))
    print(f"{name}: {len(values)} points x {args.trials} trials in {res.runtime_s:.1f} s -> {out}")
    return res
