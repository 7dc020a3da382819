import math

import numpy as np
import pytest

import rpde


def test_bspline_values():
    assert rpde.bspline(3, 0.0) == pytest.approx(2.0 / 3.0)
    xs = np.linspace(-3, 3, 61)
    total = sum(rpde.bspline(3, xs - k) for k in range(-6, 7))
    assert np.allclose(total, 1.0)


def test_correlation_cubic():
    first, values = rpde.correlation(3)
    assert first == -3
    expected = np.array([1, 120, 1191, 2416, 1191, 120, 1]) / 5040
    assert np.allclose(values, expected, atol=1e-12)


def test_fit_both_methods():
    rng = np.random.default_rng(0)
    samples = rng.standard_normal(100).tolist()
    pvs = rpde.fit(samples, 0.9, method="pvs")
    pbf = rpde.fit(samples, 0.9, method="pbf")
    assert pvs.integral == pytest.approx(1.0, abs=1e-9)
    assert pbf.integral == pytest.approx(1.0, abs=1e-9)
    assert pbf.min_fine_grid >= -1e-8
    assert pbf.status == "solved"
    assert max(pbf.kkt.values()) < 1e-7
    assert pvs.kkt is None
    lo, hi = pbf.support
    xs = np.linspace(lo, hi, 4001)
    ys = pbf(xs)
    assert ys.shape == xs.shape
    assert np.sum((ys[1:] + ys[:-1]) * np.diff(xs)) / 2 == pytest.approx(1.0, abs=1e-5)
    assert pbf.objective >= pvs.objective


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        rpde.fit([], 1.0)
    with pytest.raises(ValueError):
        rpde.fit([0.0, 1.0], -1.0)
    with pytest.raises(rpde.SolverFailure):
        rpde.fit([0.0, 0.3, 0.5], 1.0, method="pbf", max_iters=1)


def test_sweep_report():
    rows = rpde.sweep([1.0], realizations=2, shift_step=0.5)
    assert [r["method"] for r in rows] == ["pvs", "pbf"]
    for r in rows:
        assert len(r["raw_errors"]) == 2
        assert 10 ** (r["eta2_db"] / 10) == pytest.approx(r["mean_squared_error"], rel=1e-12)
    assert rpde.reference_theory_db(0.8) == pytest.approx(-20.1407817440131)
    assert rpde.reference_theory_db(3.0) is None
    assert math.isfinite(rows[0]["stderr_db"])
