import csv
import io
import os
import subprocess

import pytest

import sleepsched

ONE_NODE = {"node_count": 1, "infinite_battery": True, "horizon_slots": 20000}


def test_default_config():
    cfg = sleepsched.default_config()
    assert cfg["node_count"] == 5
    assert sleepsched.compute_B() == 1160.0
    assert sleepsched.compute_B({"node_count": 1}) == 232.0


def test_slot_energy_cases():
    assert sleepsched.slot_energy("sleep", "sleep") == pytest.approx(3e-8, rel=1e-12)
    assert sleepsched.slot_energy("active", "active", 20, True) == pytest.approx(6.72e-4, rel=1e-12)
    assert sleepsched.slot_energy("sleep", "active", 20, True) == pytest.approx(6.72e-4, rel=1e-12)
    assert sleepsched.slot_energy("active", "sleep") == pytest.approx(2.87985e-6, rel=1e-12)
    with pytest.raises(ValueError):
        sleepsched.slot_energy("dozing", "sleep")


def test_run_metrics():
    m = sleepsched.run({"horizon_slots": 2000, "v_param": 1000, "seed": 3})
    assert m["slots"] == 2000
    parts = (
        m["avg_energy_active_j_per_slot"]
        + m["avg_energy_sleep_j_per_slot"]
        + m["avg_energy_switching_j_per_slot"]
        + m["avg_energy_broadcast_j_per_slot"]
    )
    assert m["avg_total_energy_j_per_slot"] == pytest.approx(parts, rel=1e-12)
    assert 0.0 <= m["mean_duty_cycle"] <= 1.0


def test_run_is_deterministic():
    cfg = {"horizon_slots": 500, "v_param": 5000, "seed": 9}
    assert sleepsched.run_slots_csv(cfg) == sleepsched.run_slots_csv(cfg)


def test_slot_csv():
    rows = list(csv.DictReader(io.StringIO(sleepsched.run_slots_csv({"horizon_slots": 4}))))
    assert len(rows) == 20
    assert {r["mode"] for r in rows} <= {"active", "sleep"}


def test_sweep_order():
    rows = sleepsched.sweep([400, 800], policies=["ESS", "Periodic"], seeds=2, jobs=2,
                            config={"horizon_slots": 200})
    assert [(r["policy"], r["v"], r["seed"]) for r in rows] == [
        ("ESS", 400, 1), ("ESS", 400, 2), ("ESS", 800, 1), ("ESS", 800, 2),
        ("Periodic", 400, 1), ("Periodic", 400, 2), ("Periodic", 800, 1), ("Periodic", 800, 2),
    ]
    with pytest.raises(ValueError):
        sleepsched.sweep([800, 400], config={"horizon_slots": 10})


def test_oracle():
    res = sleepsched.minimize_energy([4.0], 0.02, config=ONE_NODE)
    assert res["h_star_j_per_slot"] == pytest.approx(1.3480398e-4, rel=1e-6)
    assert sleepsched.stability_margin([4.0], 0.02, config=ONE_NODE) == pytest.approx(25 / 3, rel=1e-6)
    with pytest.raises(sleepsched.OracleError):
        sleepsched.minimize_energy([30.0], 0.02, config=ONE_NODE)
    with pytest.raises(sleepsched.OracleError):
        sleepsched.minimize_energy([1.0] * 3, 0.02, config={"node_count": 3})


def test_verify():
    rep = sleepsched.verify(dict(ONE_NODE, v_param=1000, horizon_slots=100000))
    assert rep["B"] == 232.0
    assert rep["all_pass"]


def test_bad_config():
    with pytest.raises(ValueError):
        sleepsched.run({"node_count": 0, "horizon_slots": 1})
    with pytest.raises(ValueError):
        sleepsched.run({"unknown_key": 1})


@pytest.mark.skipif("SLEEPSCHED_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_oracle():
    out = subprocess.run([os.environ["SLEEPSCHED_CLI"], "oracle", "--horizon", "10"],
                         capture_output=True, text=True)
    assert out.returncode == 3
