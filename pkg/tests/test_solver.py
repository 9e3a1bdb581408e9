import numpy as np
import pytest
from numpy.testing import assert_allclose

from slabflow.angenent_oval import oval_curvature_rate, oval_extents, sample_profile
from slabflow.profile import TWO_PI, ProfileCurve, grid, symmetry_indices
from slabflow.solver import (Diagnostics, FlowInstabilityError, FlowState,
                             RunRecord, SolverConfig, estimate_extinction,
                             evolve, stable_dt, step, time_derivative)


def sphere(r=1.0, N=256, n=2):
    return FlowState(curve=ProfileCurve(n=n, kappa=np.full(N, 1.0 / r)), t=0.0)


# ---------------------------------------------------------------- validation
def test_solver_config_validation():
    cfg = SolverConfig()
    assert cfg.N == 512 and cfg.safety == 0.25
    with pytest.raises(ValueError):
        SolverConfig(N=30)
    with pytest.raises(ValueError):
        SolverConfig(N=8)
    for bad in (0.0, -0.1, 0.6):
        with pytest.raises(ValueError):
            SolverConfig(safety=bad)
    with pytest.raises(ValueError):
        SolverConfig(kappa_max_stop=0.0)
    with pytest.raises(ValueError):
        SolverConfig(area_stop=-1.0)


def test_flow_state_derives_and_validates_tip_height():
    s = sphere(r=2.0, N=128)
    assert abs(s.ell - 2.0) < 1e-13
    c = sample_profile(-3.0, 128, 2)
    _, ell = oval_extents(-3.0)
    assert abs(FlowState(curve=c, t=0.0).ell - ell) < 1e-12
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            FlowState(curve=c, t=0.0, ell=bad)


def test_stable_dt_formula():
    s = FlowState(curve=sample_profile(-2.0, 128, 2), t=0.0)
    cfg = SolverConfig(N=128, safety=0.3)
    dth = TWO_PI / 128
    assert stable_dt(s, cfg) == 0.3 * dth * dth / float(np.max(s.curve.kappa)) ** 2


# ---------------------------------------------------------- time derivative
def test_time_derivative_sphere_all_dimensions():
    # a round profile of radius r shrinks with dkappa/dt = n / r^3
    for n in (1, 2, 3):
        for r in (0.5, 2.0):
            rhs = time_derivative(sphere(r=r, n=n))
            assert_allclose(rhs, n / r ** 3, rtol=1e-9)


def test_time_derivative_oval_matches_closed_rate():
    t0 = -1.0
    errs = {}
    for N in (256, 512):
        s = FlowState(curve=sample_profile(t0, N, 1), t=0.0)
        rhs = time_derivative(s)
        exact = oval_curvature_rate(grid(N)[0], t0)
        errs[N] = np.max(np.abs(rhs - exact)) / np.max(exact)
    assert errs[512] < 2e-4
    assert 3.2 < errs[256] / errs[512] < 4.8


def test_time_derivative_rejects_nonpositive_curvature():
    s = sphere(N=64)
    s.curve.kappa[3] = -1.0
    with pytest.raises(ValueError):
        time_derivative(s)


def test_time_derivative_output_is_symmetric():
    s = FlowState(curve=sample_profile(-2.0, 128, 2), t=0.0)
    rhs = time_derivative(s)
    sigma, rho = symmetry_indices(128)
    assert np.max(np.abs(rhs - rhs[sigma])) < 1e-12 * np.max(np.abs(rhs))
    assert np.max(np.abs(rhs - rhs[rho])) < 1e-12 * np.max(np.abs(rhs))


# ------------------------------------------------------------------ stepping
def test_step_circle_curve_shortening_is_machine_exact():
    # n = 1, uniform kappa: RK4 truncation O(dt^5) is below round-off
    s = FlowState(curve=ProfileCurve(n=1, kappa=np.full(256, 2.0)), t=0.0)
    dt = stable_dt(s, SolverConfig(N=256))
    s1 = step(s, dt)
    k_exact = 1.0 / np.sqrt(0.25 - 2.0 * dt)
    assert_allclose(s1.curve.kappa, k_exact, rtol=1e-13)
    assert s1.t == dt and s1.step_count == 1


def test_step_sphere_tracks_the_closed_form():
    # heights frozen across RK stages leave a small one-step ripple near
    # the poles; it stays quasi-steady over a run and is bounded here
    for n, tol in ((2, 2e-4), (3, 5e-4)):
        s = sphere(n=n)
        dt = stable_dt(s, SolverConfig(N=256))
        s1 = step(s, dt)
        k_exact = 1.0 / np.sqrt(1.0 - 2.0 * n * dt)
        assert np.max(np.abs(s1.curve.kappa - k_exact)) / k_exact < tol
        assert abs(s1.ell - np.sqrt(1.0 - 2.0 * n * dt)) < 1e-10


def test_step_output_is_bitwise_symmetric():
    s = FlowState(curve=sample_profile(-2.0, 128, 2), t=0.0)
    s1 = step(s, stable_dt(s, SolverConfig(N=128)))
    k = s1.curve.kappa
    sigma, rho = symmetry_indices(128)
    assert np.array_equal(k, k[sigma])
    assert np.array_equal(k, k[rho])


def test_step_raises_on_instability():
    th = grid(64)[0]
    s = FlowState(curve=ProfileCurve(n=1, kappa=1.0 + 0.5 * np.cos(2 * th)),
                  t=0.0)
    with pytest.raises(FlowInstabilityError) as exc:
        step(s, 1.0)        # ~1000x the stable dt
    assert exc.value.t == 1.0 and exc.value.step_count == 1


# ----------------------------------------------------------------- evolution
def test_evolve_rejects_mismatched_grid():
    with pytest.raises(ValueError):
        evolve(sphere(N=64), SolverConfig(N=128))


def test_evolve_sphere_runs_to_small_area():
    rec = evolve(sphere(N=64), SolverConfig(N=64), R_label=None)
    assert rec.termination == "area"
    assert rec.n == 2 and rec.R is None and rec.t0 == 0.0
    assert rec.times[0] == 0.0 and rec.steps > 100
    assert rec.kappas.shape == (len(rec.times), 64)
    assert len(rec.ells) == len(rec.times) == len(rec.diagnostics)
    assert 0.0 < rec.dt_max <= stable_dt(sphere(N=64), SolverConfig(N=64))
    assert rec.diagnostics[-1].A <= 2e-3
    # lifespan of the unit sphere under H-flow is 1/(2n) = 0.25
    assert abs(estimate_extinction(rec) - 0.25) < 1e-2


def test_evolve_stop_time_and_every_step_snapshots():
    rec = evolve(sphere(N=64), SolverConfig(N=64), stride=0, stop_time=0.01)
    assert rec.termination == "time"
    assert abs(rec.times[-1] - 0.01) < 1e-12
    assert len(rec.times) == rec.steps + 1


def test_evolve_kappa_stop():
    rec = evolve(sphere(N=64), SolverConfig(N=64, kappa_max_stop=1.5))
    assert rec.termination == "kappa"
    assert np.max(rec.kappas[-1]) >= 1.5
    # kappa = 1/r crosses 1.5 when t = (1 - 1/1.5^2)/4
    assert abs(rec.times[-1] - (1.0 - 1.5 ** -2) / 4.0) < 1e-3


def test_evolve_time_stride_refines_near_extinction():
    rec = evolve(sphere(N=64), SolverConfig(N=64), stride=0.01)
    gaps = np.diff(rec.times)
    assert np.all(gaps <= 0.01 + rec.dt_max + 1e-12)
    assert gaps[-1] < 0.2 * gaps[0]     # snapshots bunch up near the end


def test_evolve_observer_sees_every_snapshot():
    seen = []
    rec = evolve(sphere(N=64), SolverConfig(N=64), observer=seen.append,
                 stride=0, stop_time=0.005)
    assert len(seen) == len(rec.diagnostics)
    assert all(a is b for a, b in zip(seen, rec.diagnostics))
    d = rec.diagnostics[0]
    assert d.t == 0.0 and abs(d.h - 1.0) < 1e-3 and abs(d.ell - 1.0) < 1e-12
    assert np.isnan(d.area_identity_residual) and np.isnan(d.harnack_margin)


# ------------------------------------------------------ extinction estimate
def _linear_area_record(t0, T, m=12):
    ds = [Diagnostics(t=t0 + i * T / (2 * m), h=1.0, ell=1.0,
                      A=4.0 * (1.0 - (i * T / (2 * m)) / T),
                      H_min=1.0, H_max=1.0, kappa_min=1.0, lambda_max=1.0)
          for i in range(m)]
    return RunRecord(n=2, R=None, config=SolverConfig(N=64), diagnostics=ds,
                     termination="area")


def test_estimate_extinction_is_exact_on_linear_area():
    rec = _linear_area_record(0.0, 3.0)
    assert abs(estimate_extinction(rec) - 3.0) < 1e-10


def test_estimate_extinction_is_shift_invariant():
    a = estimate_extinction(_linear_area_record(0.0, 3.0))
    b = estimate_extinction(_linear_area_record(-17.5, 3.0))
    assert abs(a - b) < 1e-9


def test_estimate_extinction_needs_enough_snapshots():
    rec = _linear_area_record(0.0, 3.0, m=5)
    with pytest.raises(ValueError):
        estimate_extinction(rec)
