import json
import math

import numpy as np
import pytest

from cow_oam import experiments as ex
from cow_oam.analytic import formation_probability
from cow_oam.scenario import PER_PAIR, ScenarioConfig
from cow_oam.experiments import SweepSpec, run_sweep

from . import oracles

SMALL = ScenarioConfig(bs_coverage_radius=40.0, user_count=150, d2d_max=8.0, bs_height=5.0)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("frequency", (1e9,))
    with pytest.raises(ValueError):
        SweepSpec("bs_height", (10.0, 5.0, 20.0))
    with pytest.raises(ValueError):
        SweepSpec("bs_height", (1.0, 1.0))
    with pytest.raises(ValueError):
        SweepSpec("bs_height", ())
    with pytest.raises(ValueError):
        SweepSpec("bs_height", (1.0,), trials=0)
    with pytest.raises(ValueError):
        SweepSpec("ring_half_width", (0.5, 200.0))
    spec = SweepSpec("user_count", (1000.0, 2000.0))
    assert spec.values == (1000, 2000) and isinstance(spec.values[0], int)
    assert SweepSpec("bs_height", (30, 20, 10)).config_at(1).bs_height == 20.0


def test_trial_seed_is_positional():
    a = np.random.default_rng(ex.trial_seed(3, 1, 7)).random()
    b = np.random.default_rng(ex.trial_seed(3, 1, 7)).random()
    c = np.random.default_rng(ex.trial_seed(3, 7, 1)).random()
    assert a == b and a != c


def test_no_users_never_succeed():
    res = run_sweep(SweepSpec("user_count", (0, 1), trials=20, base=SMALL))
    for p in res.points:
        assert p.p_cow_statistical == 0.0 and p.stderr == 0.0 and p.successes == 0
        assert math.isnan(p.mean_se_total)
    assert list(ex.cu_count_estimate(SweepSpec("user_count", (0,), trials=5, base=SMALL))) == [0.0]


def test_point_statistics():
    res = run_sweep(SweepSpec("bs_coverage_radius", (40.0, 80.0), trials=150, base=SMALL))
    for p in res.points:
        assert 0 <= p.p_cow_statistical <= p.p_success_any <= 1
        assert p.stderr == pytest.approx(math.sqrt(p.p_cow_statistical * (1 - p.p_cow_statistical) / p.trials))
        assert p.mean_selected_cu_count == 2 * p.p_cow_statistical
        cfg = SMALL.replace(bs_coverage_radius=p.value)
        assert p.p_cow_analytic_per_user == formation_probability(cfg).p_cow
        assert p.p_cow_analytic_per_pair == formation_probability(cfg, PER_PAIR).p_cow
        if p.successes:
            assert p.mean_se_total == pytest.approx(p.mean_se_mode1 + p.mean_se_mode2, rel=1e-12)
    np.testing.assert_array_equal(res.column("value"), [40.0, 80.0])


def test_sweep_reproducible_and_worker_independent():
    spec = SweepSpec("d2d_max", (6.0, 10.0), trials=130, base=SMALL, master_seed=9)
    a = ex.csv_text(ex.SE_HEADER, ex.se_rows(run_sweep(spec)))
    b = ex.csv_text(ex.SE_HEADER, ex.se_rows(run_sweep(spec)))
    c = ex.csv_text(ex.SE_HEADER, ex.se_rows(run_sweep(spec, workers=2)))
    assert a == b == c
    other = ex.csv_text(ex.SE_HEADER, ex.se_rows(run_sweep(SweepSpec("d2d_max", (6.0, 10.0), trials=130,
                                                                     base=SMALL, master_seed=10))))
    assert other != a


def test_subset_rerun_matches():
    full = run_sweep(SweepSpec("bs_height", (2.0, 8.0), trials=70, base=SMALL))
    cfg = SMALL.replace(bs_height=8.0)
    trials = [ex.run_trial(cfg, ex.trial_seed(0, 1, t)) for t in range(70)]
    assert full.points[1].p_cow_statistical == np.mean([t[0] for t in trials])


def test_large_eps_pairs_almost_everyone():
    base = ScenarioConfig(bs_coverage_radius=100.0, d2d_max=200.0, bs_height=0.0, user_count=2)
    res = run_sweep(SweepSpec("ring_half_width", (10.0, 50.0), trials=300, base=base))
    wide = res.points[1]
    assert wide.p_cow_statistical >= 0.95
    assert wide.p_cow_statistical >= res.points[0].p_cow_statistical


def test_two_user_estimator_matches_geometric_probability():
    # one admissible ring: r_s = 4 with half-width 4 inside R = 10; doubling leaves no ring
    base = ScenarioConfig(frequency=299792458.0 / 0.3, bs_coverage_radius=10.0, ring_half_width=4.0,
                          bs_height=2.0, d2d_max=10.0, user_count=2)
    n = 10_000
    p = run_sweep(SweepSpec("user_count", (2,), trials=n, base=base)).points[0]
    ref = oracles.two_user_success_mc(10.0, 8.0, 2.0, 0.3, 2, 10.0, 10**7, np.random.default_rng(1))
    sigma = math.sqrt(ref * (1 - ref) / n + ref * (1 - ref) / 10**7)
    assert abs(p.p_cow_statistical - ref) <= 3 * sigma
    assert p.p_success_any == p.p_cow_statistical


def test_csv_headers_are_stable():
    assert ex.PCOW_HEADER == ("sweep_var", "p_cow_analytic_K", "p_cow_analytic_pairs", "p_cow_montecarlo", "mc_stderr")
    assert ex.SE_HEADER == ("sweep_var", "se_mode1", "se_mode2", "se_total", "se_total_steered",
                            "se_fixed_uca_baseline")
    assert ex.CU_HEADER == ("sweep_var", "mean_selected_cu_count", "success_rate")


def test_csv_text_round_trips_floats():
    text = ex.csv_text(("a", "b"), [(1, 0.1 + 0.2), (2, math.nan)])
    assert text == "a,b\n1,0.30000000000000004\n2,nan\n"


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.csv"
    ex.atomic_write(target, "old\n")
    with pytest.raises(TypeError):
        ex.atomic_write(target, 42)
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_manifest_contents(tmp_path):
    spec = SweepSpec("bs_coverage_radius", (40.0, 60.0), trials=20, base=SMALL, master_seed=4)
    res = run_sweep(spec)
    doc = ex.manifest(res, "pcow-sweep", ["pcow_sweep.csv"], extra={"note": "x"})
    ex.write_manifest(tmp_path / "manifest.json", doc)
    back = json.loads((tmp_path / "manifest.json").read_text())
    assert back["sweep"]["master_seed"] == 4 and back["sweep"]["values"] == [40.0, 60.0]
    assert back["config"]["user_count"] == 150
    assert len(back["deviation_table"]) == 2
    assert {"build", "finished_utc", "wall_clock_s", "workers"} <= set(back)
    assert back["note"] == "x"
