"""Python binding smoke tests: a fast pass over the main operations."""

import math

import pytest

import frapident as fi


@pytest.fixture(scope="module")
def small_setup():
    grid = fi.SpatialGrid(32.0, 32.0, 64, 64)
    bleach = fi.BleachSpec(16.0, 16.0, 5.0, 1.0)
    sim = fi.FrapSimulator(grid, bleach)
    region2 = fi.ModelParams(c=0.1, D=1.5, beta1=1e-3, beta2=1e-4)
    return grid, bleach, sim, region2


def test_params_validation():
    ok, field = fi.validate_params(fi.ModelParams(0.05, 0.25, 1e-6, 1e-2))
    assert ok and field == ""
    ok, field = fi.validate_params(fi.ModelParams(-1.0, 0.25, 1e-6, 1e-2))
    assert not ok and field == "c"


def test_equilibrium_fractions():
    fu, fv = fi.equilibrium_fractions(fi.ModelParams(0, 0, 0.01, 0.01))
    assert fu == pytest.approx(0.5)
    assert fu + fv == 1.0


def test_default_regions():
    regions = fi.default_regions()
    assert [r.region_id for r in regions] == [1, 2, 3]
    assert regions[0].sigma == pytest.approx(0.275)
    assert regions[1].baseline.D == pytest.approx(1.5)


def test_simulate_full_bleach_starts_at_zero(small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(100.0, 11)
    curve = sim.simulate(region2, times)
    assert len(curve) == 11
    assert curve.values[0] == pytest.approx(0.0, abs=1e-12)
    assert all(b >= a - 1e-6 for a, b in zip(curve.values, curve.values[1:]))


def test_exact_vs_etdrk4(small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(50.0, 6)
    exact = sim.simulate(region2, times)
    etd = sim.simulate_etdrk4(region2, times, dt=0.1)
    for a, b in zip(exact.values, etd.values):
        assert a == pytest.approx(b, abs=1e-6)


def test_sse_sigma_roundtrip(small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(50.0, 6)
    a = sim.simulate(region2, times)
    shifted = fi.FrapCurve(a.times, [v + 0.1 for v in a.values])
    assert fi.sse(a, a) == 0.0
    assert fi.estimate_sigma(a, shifted) == pytest.approx(0.1)


def test_likelihood_threshold_identity():
    sigma = 0.275
    threshold = fi.likelihood_threshold(sigma)
    assert threshold * math.sqrt(2 * math.pi * sigma**2) == pytest.approx(
        math.exp(-3.841 / 2), abs=1e-14
    )
    assert threshold == pytest.approx(0.2125, abs=1e-4)


def test_tau_curve_hyperbola():
    tau = fi.tau_curve([(-3 + 0.25 * k) for k in range(25)])
    for b1, b2 in zip(tau.beta1_log10, tau.beta2_log10):
        assert (b1 + 6.0) * (b2 + 6.0) == pytest.approx(1.0, abs=1e-12)
    b1, b2 = fi.tau_point(0.0)
    assert (b1, b2) == (pytest.approx(-5.0), pytest.approx(-5.0))


def test_fit_from_truth(small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(100.0, 11)
    data = sim.simulate(region2, times)
    opts = fi.FitOptions()
    opts.n_starts = 1
    opts.max_evals = 150
    result = fi.fit(data, sim, region2, opts)
    assert result.sse < 1e-10
    assert result.params.c == pytest.approx(region2.c, rel=0.02)


def test_profile_classify(small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(100.0, 11)
    data = sim.simulate(region2, times)
    grid = fi.default_profile_grid(fi.ParamId.D, region2, fi.FitBounds(), 7, 3.0)
    opts = fi.ProfileOptions()
    opts.fit.max_evals = 120
    prof = fi.profile_1d(data, 0.365, sim, fi.ParamId.D, grid, region2, opts)
    assert len(prof.likelihood) == 7
    assert prof.grid[prof.argmax()] == pytest.approx(region2.D, rel=0.2)
    assert fi.classify([0.0] * 9, -1.0) == fi.Identifiability.StructurallyNonIdentifiable


def test_curve_csv_roundtrip(tmp_path, small_setup):
    _, _, sim, region2 = small_setup
    times = fi.uniform_times(50.0, 6)
    curve = sim.simulate(region2, times)
    path = str(tmp_path / "curve.csv")
    fi.save_curve_csv(path, curve)
    back = fi.load_curve_csv(path)
    assert back.times == pytest.approx(curve.times)
    assert back.values == pytest.approx(curve.values, abs=1e-11)


def test_pipeline_tiny(tmp_path):
    import json

    cfg = fi.desk_config()
    cfg.grid_n = 64
    cfg.domain_l = 32.0
    cfg.n_times = 11
    cfg.profile_points = 7
    cfg.surface_points = 4
    cfg.lse_points = 7
    cfg.field_nodes = 4
    cfg.s_points = 9
    cfg.n_threads = 2
    region = fi.default_regions()[0]
    report = json.loads(fi.run_pipeline(region, "synthetic", cfg, str(tmp_path / "out")))
    assert report["region_id"] == 1
    assert report["completed_steps"] == 4
    assert "step1_profiles" in report
    for name in ("c", "D", "beta1", "beta2"):
        assert name in report["step1_profiles"]
    for rel in report["artifacts"]:
        assert (tmp_path / "out" / rel).exists()
