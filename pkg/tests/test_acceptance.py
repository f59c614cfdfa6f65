"""End-to-end acceptance: each test runs one shipped config, exactly as
``carrier-lab measure --config configs/<name>.toml`` would, and prints a
single PASS/FAIL line."""
from pathlib import Path

import pytest

from carrier_lab import experiments

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

pytestmark = pytest.mark.acceptance


@pytest.fixture
def accept(tmp_path, capsys):
    def run(name, label):
        audit = experiments.run(experiments.load_config(CONFIGS / f"{name}.toml"), tmp_path / name)
        facts = "; ".join(f"{k}={_short(c['value'])}" for k, c in audit.checks.items() if c["value"] is not None)
        with capsys.disabled():
            print(f"\n[{'PASS' if audit.passed else 'FAIL'}] {label} ({audit.runtime:.1f} s): {facts}")
        return audit
    return run


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, list) and len(v) > 4:
        return f"[{len(v)} values]"
    return v


def value(audit, name):
    return audit.checks[name]["value"]


def test_packing_correctness(accept):
    a = accept("packing", "packing correctness")
    assert value(a, "k4_closed_form") <= 1e-8
    for d in range(1, 6):
        assert value(a, f"depth{d}_angle") <= 1e-9
        assert value(a, f"depth{d}_tangency") <= 1e-8
    assert value(a, "runtime") < 60
    assert a.passed, a.summary()


def test_packed_ball_goodness(accept):
    a = accept("ring_goodness", "packed ball goodness and (D, eta) agreement")
    assert value(a, "shared_region_agreement") <= 0.10
    assert a.passed, a.summary()


def test_no_acute_angle_bound(accept):
    a = accept("noacute", "adjacent-angle lower bound on the corpus")
    assert all(c["value"] >= c["threshold"] for c in a.checks.values())
    assert a.passed, a.summary()


def test_bilipschitz_stable(accept):
    a = accept("bilipschitz", "cable/Euclidean bi-Lipschitz ratio")
    assert value(a, "stable") <= 0.10
    assert a.passed, a.summary()


def test_doubling_sweep(accept):
    a = accept("doubling", "volume doubling sweep")
    assert value(a, "pairs") >= 200
    assert value(a, "halves_agree") < 2
    assert a.passed, a.summary()


def test_poincare_uniform(accept):
    a = accept("poincare", "Poincare constant")
    assert value(a, "single_edge") <= 0.01
    assert value(a, "balls") >= 50 and value(a, "scales") >= 3
    assert value(a, "uniform") <= 2
    assert a.passed, a.summary()


def test_exit_arc_positive(accept):
    a = accept("exit_arc", "exit-arc lower bound")
    assert value(a, "triples") >= 100
    assert value(a, "all_positive") > 0
    assert value(a, "control_sectors") <= 3
    assert a.runtime < 600
    assert a.passed, a.summary()


def test_exit_time_window(accept):
    a = accept("exit_time", "exit-time functional window")
    assert value(a, "window") <= 4
    assert value(a, "truncation") < 1e-3
    assert a.passed, a.summary()


def test_potential_oracles(accept):
    a = accept("potential_oracle", "sparse solves against dense oracles")
    for key in ("green", "martin", "resistance"):
        assert value(a, key) <= 1e-8
    assert value(a, "reversibility") <= 1e-10
    assert value(a, "monte_carlo") <= 4
    assert a.passed, a.summary()


def test_resistance_growth(accept):
    a = accept("resistance", "resistance lower bound and log growth")
    for eps in ("0.006", "0.003"):
        assert value(a, f"variational_eps{eps}") == 0
        assert value(a, f"positive_slope_eps{eps}") > 0
    assert a.passed, a.summary()


def test_atom_probe(accept):
    a = accept("atom_probe", "boundary non-atomicity probe")
    assert a.passed, a.summary()


def test_harnack_stability(accept):
    a = accept("harnack", "interior Harnack sweep")
    b = accept("bhp", "boundary Harnack sweep")
    for audit in (a, b):
        assert value(audit, "stable_eps_half") <= 2
        assert value(audit, "stable_r_half") <= 2
    assert a.passed and b.passed, a.summary() + b.summary()


def test_harmonic_measure_consistency(accept):
    a = accept("harmonic_measure", "Dirichlet solve against Monte Carlo")
    assert a.passed, a.summary()


def test_martin_convergence(accept):
    a = accept("martin", "Martin kernel convergence and separation")
    assert value(a, "separation") >= 10
    assert a.passed, a.summary()
