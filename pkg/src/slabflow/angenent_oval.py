"""Closed-form Angenent oval (paperclip) solution of curve shortening flow.

The oval is the ancient compact convex solution of curve shortening flow
that lives in the slab |x| < pi/2 and sweeps it out as t -> -infinity.  In
implicit form the time-t slice is

    cos(x) = exp(t) * cosh(y),   t < 0,

and in the turning-angle parametrization its curvature is
kappa(theta, t) = sqrt(a^2 + cos^2(theta)) with a^2 = 1/(exp(-2t) - 1).
The slices shrink to the origin as t -> 0 and converge, after recentering
at either tip, to the Grim reaper y = t - log cos(x).

Rotating an oval slice about the x-axis gives the initial hypersurface for
the flows in `solver`; the closed forms below also supply exact oracles
for the quadrature and evolution machinery.
"""
from typing import NamedTuple

import numpy as np

from .profile import ProfileCurve, grid

__all__ = [
    "PlanePoint", "oval_curvature", "oval_point", "oval_extents",
    "oval_residual", "oval_curvature_rate", "grim_height", "sample_profile",
]


class PlanePoint(NamedTuple):
    x: float
    y: float


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t >= 0.0):
        raise ValueError("oval slices exist for finite t < 0 only")
    return t


def _a2(t):
    # a^2 = 1/(exp(-2t) - 1), the squared tip-to-tip waist curvature
    return 1.0 / np.expm1(-2.0 * t)


def oval_curvature(theta, t):
    """Curvature kappa(theta, t) = sqrt(a^2 + cos^2 theta) of the oval slice."""
    t = _check_time(t)
    c = np.cos(theta)
    return np.sqrt(_a2(t) + c * c)


def oval_point(theta, t):
    """Point on the time-t slice at turning angle theta.

    x integrates to arctan(sin(theta)/kappa); y is evaluated in a form
    that stays accurate for very negative t, where the naive expression
    log(kappa - cos(theta)) cancels catastrophically near theta = 0.
    The tips theta = 0, pi sit at (0, -ell) and (0, +ell).
    """
    t = _check_time(t)
    a2 = _a2(t)
    c = np.cos(theta)
    s = np.sqrt(c * c + a2)
    x = np.arctan(np.sin(theta) / s)
    diff = np.where(c > 0, a2 / (s + np.abs(c)), s - c)
    y = -t + np.log(diff) - 0.5 * np.log1p(a2)
    return PlanePoint(x=x, y=y)


def oval_extents(t):
    """Half-extents (h, ell) of the slice: h = arccos(e^t) in x and
    ell = arccosh(e^-t) in y, the latter in overflow-free form."""
    t = _check_time(t)
    h = np.arccos(np.exp(t))
    ell = -t + np.log1p(np.sqrt(-np.expm1(2.0 * t)))
    return h, ell


def oval_residual(p, t):
    """Residual cos(x) - e^t cosh(y) of the implicit slice equation at p.

    The product e^t cosh(y) is expanded into exponentials of t +- y so no
    intermediate overflows even when cosh(y) alone would.
    """
    t = _check_time(t)
    x, y = p
    return np.cos(x) - 0.5 * (np.exp(t + y) + np.exp(t - y))


def oval_curvature_rate(theta, t):
    """Exact time derivative of the oval curvature,
    kappa_t = e^{-2t} (e^{-2t} - 1)^{-2} / kappa."""
    t = _check_time(t)
    e = np.exp(-2.0 * t)
    return e / (e - 1.0) ** 2 / oval_curvature(theta, t)


def grim_height(x, t):
    """Height y = t - log cos(x) of the Grim reaper translating in the slab.

    Raises ValueError outside the open slab |x| < pi/2.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 0.5 * np.pi):
        raise ValueError("Grim reaper is a graph over |x| < pi/2 only")
    return t - np.log(np.cos(x))


def sample_profile(t, N, n=1):
    """ProfileCurve holding the oval slice curvature on the N-point grid.

    Uses the exactly-symmetric grid cosine table, so the stored curvature
    carries both reflection symmetries bit-for-bit.
    """
    t = float(_check_time(t))
    _, c, _ = grid(N)
    return ProfileCurve(n=n, kappa=np.sqrt(_a2(t) + c * c))
