import numpy as np
import pytest
from numpy.testing import assert_allclose

from slabflow.angenent_oval import (grim_height, oval_curvature,
                                    oval_curvature_rate, oval_extents,
                                    oval_point, oval_residual, sample_profile)
from slabflow.profile import grid

# 5-point central first-derivative weights, O(h^4)
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def _fd_speed(theta, t, h=1e-4):
    """|dp/dtheta| by finite differences of the point formulas."""
    off = np.arange(-2, 3) * h
    xs = np.array([oval_point(theta + o, t).x for o in off])
    ys = np.array([oval_point(theta + o, t).y for o in off])
    return np.hypot(_D1 @ xs, _D1 @ ys) / h


def test_curvature_is_inverse_speed_of_the_point_map():
    # turning-angle parametrization: |dp/dtheta| = 1/kappa
    rng = np.random.default_rng(7)
    for theta, t in zip(rng.uniform(0, 2 * np.pi, 40),
                        rng.uniform(-8.0, -0.3, 40)):
        kappa = oval_curvature(theta, t)
        assert_allclose(_fd_speed(theta, t), 1.0 / kappa, rtol=1e-8)


def test_point_satisfies_implicit_equation():
    rng = np.random.default_rng(11)
    theta = rng.uniform(0, 2 * np.pi, 400)
    t = rng.uniform(-20.0, -0.1, 400)
    res = oval_residual(oval_point(theta, t), t)
    assert np.max(np.abs(res)) < 1e-12
    # near-extinction and deep-time edges, including tips and poles
    for te in (-0.01, -0.05, -30.0, -45.0):
        th = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2, 0.4, 2.8])
        assert np.max(np.abs(oval_residual(oval_point(th, te), te))) < 1e-12


def test_extents_invert_their_defining_relations():
    for t in (-0.1, -0.5, -1.0, -2.5, -7.0, -10.0):
        h, ell = oval_extents(t)
        assert 0.0 < h < np.pi / 2
        # cos h = e^t and log cosh ell = -t, in overflow-safe form
        assert abs(np.cos(h) - np.exp(t)) < 1e-12 * np.exp(t)
        logcosh = ell + np.log1p(np.exp(-2.0 * ell)) - np.log(2.0)
        assert abs(logcosh + t) < 1e-12 * abs(t)


def test_extents_deep_time_asymptotics():
    # ell = -t + log 2 + O(e^{2t}); the subtraction must stay exact
    for t in (-20.0, -30.0, -40.0, -50.0):
        h, ell = oval_extents(t)
        assert abs(ell - (-t + np.log(2.0))) < 1e-12
        # h saturates at float pi/2 once e^t drops below one ulp
        assert 0.0 <= np.pi / 2 - h < max(2.0 * np.exp(t), 3e-16)


def test_extents_monotone_in_time():
    ts = -np.linspace(0.1, 12.0, 120)[::-1]
    hs, ells = np.transpose([oval_extents(t) for t in ts])
    assert np.all(np.diff(hs) < 0)      # h shrinks toward extinction
    assert np.all(np.diff(ells) < 0)


def test_point_tips_and_poles_match_extents():
    for t in (-0.3, -2.0, -9.0):
        h, ell = oval_extents(t)
        assert_allclose(oval_point(np.pi / 2, t).x, h, rtol=1e-14)
        # float pi/2 sits half an ulp off the true pole and the point map
        # has slope 1/kappa there, so allow that much drift in y
        assert abs(oval_point(np.pi / 2, t).y) < \
            3e-16 / oval_curvature(np.pi / 2, t) + 1e-14
        assert_allclose(oval_point(np.pi, t).y, ell, rtol=1e-14)
        assert abs(oval_point(np.pi, t).x) < 1e-14
        assert_allclose(oval_point(0.0, t).y, -ell, rtol=1e-14)


def test_point_reflection_symmetries():
    rng = np.random.default_rng(3)
    for theta, t in zip(rng.uniform(0, 2 * np.pi, 50),
                        rng.uniform(-10.0, -0.2, 50)):
        p = oval_point(theta, t)
        pm = oval_point(2 * np.pi - theta, t)   # tip swap: x -> -x
        pr = oval_point(np.pi - theta, t)       # pole swap: y -> -y
        # the reflected float angle is ~1 ulp off and the map slope is
        # 1/kappa <= e^{-t}, so the images can differ by ~1e-11
        assert_allclose((-pm.x, pm.y), (p.x, p.y), atol=1e-10)
        assert_allclose((pr.x, -pr.y), (p.x, p.y), atol=1e-10)


def test_curvature_rate_matches_time_derivative():
    rng = np.random.default_rng(5)
    h = 1e-3
    off = np.arange(-2, 3) * h
    for theta, t in zip(rng.uniform(0, 2 * np.pi, 30),
                        rng.uniform(-8.0, -0.5, 30)):
        fd = (_D1 @ oval_curvature(theta, t + off)) / h
        # atol covers the ~eps*kappa/h roundoff floor of the stencil,
        # which dominates once the rate itself decays like e^{2t}
        assert_allclose(oval_curvature_rate(theta, t), fd,
                        rtol=1e-8, atol=5e-13)


def test_curvature_rate_is_positive():
    theta = np.linspace(0, 2 * np.pi, 64)
    for t in (-0.5, -3.0, -12.0):
        assert np.all(oval_curvature_rate(theta, t) > 0)


def test_grim_height_values_and_domain():
    assert grim_height(0.0, -3.0) == -3.0
    x = np.linspace(-1.2, 1.2, 41)
    g = grim_height(x, 0.0)
    assert_allclose(g, g[::-1], rtol=1e-15)         # even in x
    assert np.all(g[x != 0.0] > 0.0)                # above the tip
    for bad in (np.pi / 2, -np.pi / 2, 2.0):
        with pytest.raises(ValueError):
            grim_height(bad, -1.0)


def test_time_validation():
    for bad in (0.0, 0.5, np.nan):
        with pytest.raises(ValueError):
            oval_curvature(0.3, bad)
        with pytest.raises(ValueError):
            oval_extents(bad)
        with pytest.raises(ValueError):
            sample_profile(bad, 64, 1)


def test_sample_profile_matches_closed_form_on_the_grid():
    for N, t, n in ((64, -1.0, 1), (256, -4.0, 2), (512, -0.5, 3)):
        c = sample_profile(t, N, n)
        assert c.n == n and c.N == N
        theta = grid(N)[0]
        assert_allclose(c.kappa, oval_curvature(theta, t), rtol=1e-14)
        # stored curvature is exactly double-reflection symmetric
        assert np.array_equal(c.kappa, c.kappa[(-np.arange(N)) % N])
        assert np.array_equal(c.kappa, c.kappa[(N // 2 - np.arange(N)) % N])


def test_sample_profile_rejects_bad_grid():
    with pytest.raises(ValueError):
        sample_profile(-1.0, 30, 1)    # not a multiple of 4
    with pytest.raises(ValueError):
        sample_profile(-1.0, 8, 1)     # too coarse
