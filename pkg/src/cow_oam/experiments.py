"""Seeded Monte Carlo sweeps over one scenario parameter.

Every trial draws its own generator from ``SeedSequence([master_seed,
point_index, trial_index])``, so any subset of a sweep reruns identically and
results do not depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import subprocess
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analytic import formation_probability
from .channel import cow_realization, fixed_uca_realization
from .scenario import PER_PAIR, PER_USER, ScenarioConfig, config_to_dict
from .selection import generate_field, select_pair

SWEEP_VARIABLES = ("bs_coverage_radius", "user_count", "d2d_max", "bs_height", "ring_half_width")
CHUNK = 64

PCOW_HEADER = ("sweep_var", "p_cow_analytic_K", "p_cow_analytic_pairs", "p_cow_montecarlo", "mc_stderr")
SE_HEADER = ("sweep_var", "se_mode1", "se_mode2", "se_total", "se_total_steered", "se_fixed_uca_baseline")
CU_HEADER = ("sweep_var", "mean_selected_cu_count", "success_rate")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    trials: int = 2000
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    master_seed: int = 0

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        vals = tuple(int(v) if self.variable == "user_count" else float(v) for v in self.values)
        if not vals:
            raise ValueError("sweep needs at least one value")
        diffs = np.diff(vals)
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotone")
        object.__setattr__(self, "values", vals)
        for v in vals:  # fail early on invalid points
            self.config_at_value(v)

    def config_at_value(self, value) -> ScenarioConfig:
        return self.base.replace(**{self.variable: value})

    def config_at(self, index: int) -> ScenarioConfig:
        return self.config_at_value(self.values[index])


def trial_seed(master_seed: int, point: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, point, trial])


# per-trial record: found at initial eps, found at all, then SE figures (nan without a pair)
_FIELDS = ("found_initial", "found", "se_mode1", "se_mode2", "se_total", "se_steered", "se_baseline")


def run_trial(cfg: ScenarioConfig, seed) -> tuple:
    userfield = generate_field(cfg, seed)
    sel = select_pair(userfield, cfg)
    if not sel.found:
        return (False, False) + (math.nan,) * 5
    cow = cow_realization(cfg, sel)
    base = fixed_uca_realization(cfg, userfield)
    return (
        sel.found_at_initial_epsilon,
        True,
        float(cow.se_per_mode[0]),
        float(cow.se_per_mode[1]),
        cow.se_total,
        cow.se_steered_total,
        base.se_total,
    )


def _run_block(args) -> list[tuple]:
    cfg, master_seed, point, start, stop = args
    return [run_trial(cfg, trial_seed(master_seed, point, t)) for t in range(start, stop)]


@dataclass(frozen=True)
class PointResult:
    value: float
    trials: int
    p_cow_statistical: float
    stderr: float
    p_success_any: float
    p_cow_analytic_per_user: float
    p_cow_analytic_per_pair: float
    mean_selected_cu_count: float
    successes: int
    mean_se_mode1: float
    mean_se_mode2: float
    mean_se_total: float
    mean_se_steered: float
    mean_se_fixed_baseline: float


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple[PointResult, ...]
    runtime_s: float
    workers: int

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def _mean(x: np.ndarray) -> float:
    return math.fsum(x) / len(x) if len(x) else math.nan


def _aggregate(value, cfg: ScenarioConfig, records: list[tuple]) -> PointResult:
    arr = np.array(records, dtype=float).reshape(-1, len(_FIELDS))
    n = len(arr)
    p = arr[:, 0].mean()
    ok = arr[:, 1] > 0
    se = arr[ok]
    return PointResult(
        value=value,
        trials=n,
        p_cow_statistical=float(p),
        stderr=math.sqrt(p * (1 - p) / n),
        p_success_any=float(ok.mean()),
        p_cow_analytic_per_user=formation_probability(cfg, PER_USER).p_cow,
        p_cow_analytic_per_pair=formation_probability(cfg, PER_PAIR).p_cow,
        mean_selected_cu_count=2 * float(p),
        successes=int(ok.sum()),
        mean_se_mode1=_mean(se[:, 2]),
        mean_se_mode2=_mean(se[:, 3]),
        mean_se_total=_mean(se[:, 4]),
        mean_se_steered=_mean(se[:, 5]),
        mean_se_fixed_baseline=_mean(se[:, 6]),
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Monte Carlo sweep; output is independent of ``workers``."""
    t0 = time.perf_counter()
    blocks = []
    for i in range(len(spec.values)):
        cfg = spec.config_at(i)
        for start in range(0, spec.trials, CHUNK):
            blocks.append((cfg, spec.master_seed, i, start, min(start + CHUNK, spec.trials)))
    if workers <= 1:
        outputs = [_run_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_block, blocks))
    per_point: list[list[tuple]] = [[] for _ in spec.values]
    for b, out in zip(blocks, outputs):
        per_point[b[2]].extend(out)
    points = tuple(
        _aggregate(v, spec.config_at(i), recs) for i, (v, recs) in enumerate(zip(spec.values, per_point))
    )
    return SweepResult(spec, points, time.perf_counter() - t0, max(workers, 1))


def cu_count_estimate(spec: SweepSpec, workers: int = 1) -> np.ndarray:
    """Mean number of selected CUs per point (two per cooperative pair)."""
    return run_sweep(spec, workers).column("mean_selected_cu_count")


# --- output -----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def pcow_rows(res: SweepResult):
    return [
        (p.value, p.p_cow_analytic_per_user, p.p_cow_analytic_per_pair, p.p_cow_statistical, p.stderr)
        for p in res.points
    ]


def se_rows(res: SweepResult):
    return [
        (p.value, p.mean_se_mode1, p.mean_se_mode2, p.mean_se_total, p.mean_se_steered, p.mean_se_fixed_baseline)
        for p in res.points
    ]


def cu_rows(res: SweepResult):
    return [(p.value, p.mean_selected_cu_count, p.p_cow_statistical) for p in res.points]


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory and rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def deviation_table(res: SweepResult) -> list[dict]:
    return [
        {
            "sweep_var": p.value,
            "p_cow_montecarlo": p.p_cow_statistical,
            "deviation_per_user": abs(p.p_cow_analytic_per_user - p.p_cow_statistical),
            "deviation_per_pair": abs(p.p_cow_analytic_per_pair - p.p_cow_statistical),
        }
        for p in res.points
    ]


def manifest(res: SweepResult, command: str, outputs: list[str], extra: dict | None = None) -> dict:
    spec = res.spec
    doc = {
        "command": command,
        "config": config_to_dict(spec.base),
        "sweep": {
            "variable": spec.variable,
            "values": list(spec.values),
            "trials": spec.trials,
            "master_seed": spec.master_seed,
            "per_trial_seed": "SeedSequence([master_seed, point_index, trial_index])",
        },
        "outputs": outputs,
        "deviation_table": deviation_table(res),
        "build": git_describe(),
        "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_s": res.runtime_s,
        "workers": res.workers,
    }
    if extra:
        doc.update(extra)
    return doc


def write_manifest(path: str | Path, doc: dict) -> None:
    atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
