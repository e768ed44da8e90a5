import json
import math

import numpy as np
import pytest

import sgkdv


def test_grid_and_propagator():
    x = sgkdv.grid_points(256, 40.0)
    u = np.exp(-x**2)
    v = sgkdv.airy_propagate(u, 40.0, 0.7)
    assert v.shape == u.shape
    assert math.isclose(sgkdv.mass(v, 40.0), sgkdv.mass(u, 40.0), rel_tol=1e-12)
    back = sgkdv.airy_propagate(v, 40.0, -0.7)
    assert np.max(np.abs(back - u)) < 1e-12


def test_mass_energy_of_sine():
    x = sgkdv.grid_points(256, 2 * math.pi)
    u = np.sin(x)
    assert math.isclose(sgkdv.mass(u, 2 * math.pi), math.pi, rel_tol=1e-12)
    assert math.isclose(sgkdv.energy(u, 2 * math.pi, 4, 1), math.pi / 2 + 5 * math.pi / 48, rel_tol=1e-12)


def test_airy_integral():
    value, err = sgkdv.osc_integral_I(3.0, 0.0, 0.0)
    assert abs(value - 2 * math.pi * 3 ** (-1 / 3) * sgkdv.airy_reference(0.0)) < 1e-9
    assert err < 1e-8
    assert sgkdv.predicted_exponent(3.0, 0.0, "stationary") == pytest.approx(-0.25)


def test_admissibility():
    assert sgkdv.validate_kato("5", "10", 0.0)[0]
    assert sgkdv.validate_kato("inf", "2", 1.0)[0]
    ok, why = sgkdv.validate_kato("4", "4", 0.25)
    assert not ok and why
    assert sgkdv.validate_strichartz("inf", "6", 0.0)[0]


def test_soliton_and_simulate():
    n, L = 512, 80.0
    q = sgkdv.soliton(4, 1.0, 0.0, n, L)
    r = sgkdv.simulate(q, L, k=4, sign=-1, dt=1e-3, steps=200, stride=100)
    assert r["u"].shape == (3, n)
    expected = sgkdv.soliton(4, 1.0, 0.2, n, L)
    assert np.sqrt(np.sum((r["u"][-1] - expected) ** 2) * L / n) < 1e-3


def test_noisy_simulate_is_reproducible():
    n, L = 128, 40.0
    x = sgkdv.grid_points(n, L)
    u0 = 0.3 * np.exp(-x**2)
    phi = np.exp(-x**2 / 2)
    a = sgkdv.simulate(u0, L, dt=1e-2, steps=50, phi=phi, seed=3)
    b = sgkdv.simulate(u0, L, dt=1e-2, steps=50, phi=phi, seed=3)
    assert np.array_equal(a["u"], b["u"])
    assert len(sgkdv.sample_path(3, 0.01, 10)) == 10


def test_manifest(tmp_path):
    p = sgkdv.parse_manifest('{"schema_version": 1, "experiment": "simulate", "nope": 1}')
    assert not p["ok"] and any("nope" in e for e in p["errors"])
    text = json.dumps(
        {
            "schema_version": 1,
            "experiment": "simulate",
            "grid": {"n": 128, "L": 40},
            "initial": {"profile": "gaussian", "amplitude": 0.4},
            "solver": {"dt": 0.002, "horizon": 0.1, "stride": 10},
        }
    )
    r = sgkdv.run_manifest(text, out=str(tmp_path / "run"))
    assert r["exit_code"] == 0
    assert (tmp_path / "run" / "summary.json").exists()


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        sgkdv.grid_points(7, 1.0)
