"""Geometry of O(n)-invariant convex hypersurfaces via their profile curve.

A closed convex planar curve with strictly positive curvature admits the
turning angle theta of its tangent as a global parameter.  Rotating the
curve about the x-axis in R^{n+1} produces an O(n)-invariant hypersurface
whose geometry is entirely encoded by the curvature function kappa(theta):
coordinates come from integrating (cos theta, sin theta)/kappa, the
rotational principal curvature is lambda = -cos(theta)/y, and the mean
curvature is H = kappa + (n-1)*lambda.

Everything here operates on a uniform grid theta_i = 2*pi*i/N with N
divisible by 4, so the poles theta = +-pi/2 (where the curve crosses the
rotation axis) and the vertices theta in {0, pi} are exact grid nodes.

Quadrature note: near a pole the integrand 1/kappa varies by orders of
magnitude inside a single cell whenever kappa at the pole is far below the
grid scale (very flat-sided curves).  Plain trapezoid rules lose most of
the cell content there, so the integrators below replace pole-adjacent
trapezoid increments with closed-form integrals of an in-cell model
v = A + B*u^2 for the squared curvature in the variable u = -cos(theta).
That model is exact for Angenent ovals and for circles, and degrades
gracefully to the trapezoid value elsewhere.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * np.pi

__all__ = [
    "ProfileCurve", "DerivedFields", "grid", "symmetry_indices", "symmetrize",
    "reconstruct", "tip_anchored_coordinates", "lambda_of", "mean_curvature",
    "enclosed_area", "model_area", "lambda_kappa_integral", "displacements",
    "alexandrov_strict", "derived_fields",
]


# --------------------------------------------------------------------- grids
@lru_cache(maxsize=None)
def grid(N):
    """Return (theta, cos(theta), sin(theta)) for the uniform N-grid.

    The tables are assembled quadrant by quadrant from a single quarter
    table, so the two reflection symmetries hold bit-for-bit:
    cos[N-i] == cos[i], sin[N-i] == -sin[i], cos[N/2-i] == -cos[i],
    sin[N/2-i] == sin[i], with exact zeros/ones at the poles.
    """
    if N % 4 != 0 or N < 16:
        raise ValueError(f"grid size must be >= 16 and divisible by 4, got {N}")
    q = N // 4
    i = np.arange(q + 1)
    c = np.cos(TWO_PI * i / N)
    s = np.sin(TWO_PI * i / N)
    c[q] = 0.0
    s[q] = 1.0
    cos_t = np.empty(N)
    sin_t = np.empty(N)
    cos_t[: q + 1] = c
    sin_t[: q + 1] = s
    cos_t[N // 2 - i] = -c
    sin_t[N // 2 - i] = s
    cos_t[N // 2 + i] = -c
    sin_t[N // 2 + i] = -s
    cos_t[(N - i) % N] = c
    sin_t[(N - i) % N] = -s
    theta = TWO_PI * np.arange(N) / N
    return theta, cos_t, sin_t


@lru_cache(maxsize=None)
def symmetry_indices(N):
    """Index maps (sigma, rho) for theta -> -theta and theta -> pi - theta."""
    i = np.arange(N)
    return (N - i) % N, (N // 2 - i) % N


def symmetrize(kappa):
    """Average an array over both grid reflections (idempotent)."""
    sigma, rho = symmetry_indices(len(kappa))
    k = 0.5 * (kappa + kappa[sigma])
    return 0.5 * (k + k[rho])


# ---------------------------------------------------------------- core types
@dataclass
class ProfileCurve:
    """Convex profile curve sampled by curvature on the turning-angle grid.

    Parameters
    ----------
    n : int
        Ambient dimension of the rotated hypersurface (n = 1 means no
        rotation: plain curve shortening).
    kappa : array_like
        Strictly positive curvatures at theta_i = 2*pi*i/N, N divisible
        by 4.  Must carry both reflection symmetries
        kappa[i] == kappa[(N-i) % N] == kappa[(N/2-i) % N] up to round-off;
        the constructor averages over the reflections so the stored array
        is exactly symmetric, and rejects input whose asymmetry exceeds
        round-off scale.
    """

    n: int
    kappa: np.ndarray

    def __post_init__(self):
        self.kappa = np.asarray(self.kappa, dtype=float)
        if self.n < 1:
            raise ValueError(f"ambient dimension must be >= 1, got {self.n}")
        N = self.kappa.shape[0] if self.kappa.ndim == 1 else -1
        if N == -1 or N % 4 != 0 or N < 16:
            raise ValueError("kappa must be 1-d with length >= 16 divisible by 4")
        if not np.all(np.isfinite(self.kappa)) or np.any(self.kappa <= 0.0):
            raise ValueError("curvature must be finite and strictly positive")
        k_sym = symmetrize(self.kappa)
        # reject genuinely asymmetric input, then canonicalize to exact symmetry
        if np.max(np.abs(self.kappa - k_sym)) > 1e-9 * np.max(self.kappa):
            raise ValueError("curvature breaks the required double reflection symmetry")
        self.kappa = k_sym

    @property
    def N(self):
        return len(self.kappa)

    @property
    def theta(self):
        return grid(self.N)[0]


@dataclass
class DerivedFields:
    """Pointwise geometry derived from a ProfileCurve: coordinates,
    rotational curvature lambda, and mean curvature H."""

    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    H: np.ndarray


# ------------------------------------------------------- quadrature kernels
def _inv_speed_antideriv(u, A, B):
    """Antiderivative of 1/sqrt(A + B*u^2) with A > 0 (elementwise in B)."""
    out = np.empty_like(u)
    scale = A + np.abs(B) * u * u
    pos = B > 1e-14 * scale
    neg = B < -1e-14 * scale
    mid = ~(pos | neg)
    if np.any(pos):
        rb = np.sqrt(B[pos])
        out[pos] = np.arcsinh(u[pos] * rb / np.sqrt(A[pos])) / rb
    if np.any(neg):
        rb = np.sqrt(-B[neg])
        arg = np.clip(u[neg] * rb / np.sqrt(A[neg]), -1.0, 1.0)
        out[neg] = np.arcsin(arg) / rb
    if np.any(mid):
        out[mid] = u[mid] / np.sqrt(A[mid])
    return out


def _model_increments(v, su, trapz_f, anchor=None):
    """Per-interval integrals of trapz_f d(theta) under the in-cell model.

    v is nodal kappa^2, su the substitution variable (u = -cos for the
    y-integral, w = sin for the x-integral), trapz_f the nodal integrand.
    Each periodic interval i -> i+1 gets the closed-form integral of
    1/sqrt(A + B su^2); intervals where no positive model exists fall back
    to the trapezoid value.  With `anchor` given (per-interval pole value
    of v, NaN outside the pole bands), the intercept A is pinned there so
    the model stays conditioned when the pole is under-resolved.
    """
    N = len(v)
    dth = TWO_PI / N
    v1 = np.roll(v, -1)
    u0 = su
    u1 = np.roll(su, -1)
    du2 = u1 * u1 - u0 * u0
    ok = np.abs(du2) > 1e-12
    B = np.where(ok, (v1 - v) / np.where(ok, du2, 1.0), 0.0)
    A = v - B * u0 * u0
    if anchor is not None:
        anch = np.isfinite(anchor)
        far_is_1 = np.abs(u1) >= np.abs(u0)
        v_far = np.where(far_is_1, v1, v)
        u_far2 = np.where(far_is_1, u1 * u1, u0 * u0)
        okb = anch & (u_far2 > 1e-12) & (v_far > anchor)
        Ban = np.where(okb, (v_far - anchor) / np.where(okb, u_far2, 1.0), 0.0)
        B = np.where(okb, Ban, B)
        A = np.where(okb, anchor, A)
        ok |= okb
    ok &= (A > 0) & np.isfinite(B)
    inc_tz = 0.5 * dth * (trapz_f + np.roll(trapz_f, -1))
    Asafe = np.where(ok, A, 1.0)
    Bsafe = np.where(ok, B, 0.0)
    inc_model = _inv_speed_antideriv(u1, Asafe, Bsafe) - _inv_speed_antideriv(u0, Asafe, Bsafe)
    return np.where(ok, inc_model, inc_tz)


@lru_cache(maxsize=None)
def _pole_band_idx(N):
    # per-interval pole index for anchored quadrature, -1 outside the
    # quarter-width bands around each pole
    th = TWO_PI * (np.arange(N) + 0.5) / N
    q = N // 4
    idx = np.full(N, -1, dtype=np.int64)
    idx[(th > 0.25 * np.pi) & (th < 0.75 * np.pi)] = q
    idx[(th > 1.25 * np.pi) & (th < 1.75 * np.pi)] = 3 * q
    return idx


def _pole_anchor_vals(v):
    idx = _pole_band_idx(len(v))
    vals = v[idx.clip(min=0)]
    return np.where(idx >= 0, vals, np.nan)


def _pole_cell_model(v1, u1, dy):
    """In-cell model v = A + B*u^2 tied to the far-node value v1 and the
    geometric half-cell height dy = integral of du/sqrt(v).

    Returns (A, B), or None when no consistent model exists (dy <= 0, or
    taller/flatter than any admissible profile).  Solved by bisection on
    B; the height F(B) is increasing in B (deeper pole dip -> taller
    half-cell).
    """
    if not np.isfinite(dy) or dy <= 0.0 or v1 <= 0.0:
        return None
    u1sq = u1 * u1

    def F(B):
        A = v1 - B * u1sq
        if B > 1e-14 * v1 / u1sq:
            return np.arcsinh(u1 * np.sqrt(B / A)) / np.sqrt(B)
        if B < -1e-14 * v1 / u1sq:
            rb = np.sqrt(-B)
            return np.arcsin(min(1.0, u1 * rb / np.sqrt(A))) / rb
        return u1 / np.sqrt(A)

    lo = -0.99 * v1 / u1sq
    hi = (1.0 - 1e-14) * v1 / u1sq
    if F(lo) > dy or F(hi) < dy:
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if F(mid) < dy:
            lo = mid
        else:
            hi = mid
    B = 0.5 * (lo + hi)
    return v1 - B * u1sq, B


# ----------------------------------------------------------- reconstruction
def _reconstruct_raw(kappa, need_x=True):
    """Pole-anchored node coordinates: y(pi/2) = 0 exactly."""
    N = len(kappa)
    th, c, s = grid(N)
    v = kappa * kappa
    fy = s / kappa
    y_inc = _model_increments(v, -c, fy, anchor=_pole_anchor_vals(v))
    Y = np.concatenate(([0.0], np.cumsum(y_inc[:-1])))
    y = Y - Y[N // 4]
    if not need_x:
        return None, y
    fx = c / kappa
    dth = TWO_PI / N
    x_inc = 0.5 * dth * (fx + np.roll(fx, -1))
    x_inc_model = _model_increments(v, s, fx)
    q = N // 4
    for j in (q - 1, q, 3 * q - 1, 3 * q):
        x_inc[j] = x_inc_model[j]
    x = np.concatenate(([0.0], np.cumsum(x_inc[:-1])))
    return x, y


def _tip_anchored_raw(kappa, ell, need_x=True):
    """Tip-anchored node coordinates: y(pi) = ell, y at both poles = 0.

    Heights on the upper-right quarter are accumulated downward from the
    tip, so no y quadrature ever crosses the under-resolved pole cells;
    the remaining quarters follow by exact reflection.
    """
    N = len(kappa)
    th, c, s = grid(N)
    q = N // 4
    v = kappa * kappa
    fy = s / kappa
    y_inc = _model_increments(v, -c, fy, anchor=_pole_anchor_vals(v))
    y = np.empty(N)
    y[N // 2] = ell
    seg = y_inc[q + 1:N // 2]
    y[q + 1:N // 2] = ell - np.cumsum(seg[::-1])[::-1]
    y[q] = 0.0
    j = np.arange(q + 1, N // 2)
    y[N // 2 - j] = -y[j]               # theta -> pi - theta flips y
    y[0] = -ell
    y[N // 2 + 1:] = y[1:N // 2][::-1]  # theta -> 2pi - theta keeps y
    if not need_x:
        return None, y
    fx = c / kappa
    dth = TWO_PI / N
    x_inc = 0.5 * dth * (fx + np.roll(fx, -1))
    x_inc_model = _model_increments(v, s, fx)
    for j in (q - 1, q, 3 * q - 1, 3 * q):
        x_inc[j] = x_inc_model[j]
    x = np.concatenate(([0.0], np.cumsum(x_inc[:-1])))
    return x, y


def _check_closure(kappa):
    N = len(kappa)
    _, c, s = grid(N)
    fx = c / kappa
    fy = s / kappa
    sx, sy = np.sum(fx), np.sum(fy)
    scale = np.sum(np.abs(fx)) + np.sum(np.abs(fy))
    if max(abs(sx), abs(sy)) > 1e-9 * scale:
        raise ValueError("profile does not close up: curvature symmetry was "
                         "violated after construction")


def reconstruct(c):
    """Node coordinates (x, y) of the profile curve.

    x_i integrates cos(u)/kappa from theta = 0, y_i integrates
    sin(u)/kappa anchored so that y = 0 exactly at the pole theta = pi/2.
    Pole-adjacent intervals use the in-cell model quadrature; elsewhere the
    rule is a second-order composite one.

    Raises ValueError if the discrete closure sums are violated (possible
    only when the stored curvature was mutated after construction).
    """
    _check_closure(c.kappa)
    return _reconstruct_raw(c.kappa)


def tip_anchored_coordinates(c, ell):
    """Node coordinates with the tip height y(pi) = ell imposed exactly.

    This is the evolution-grade variant used by the solver: when the tip
    height is known independently (it satisfies d ell/dt = -H(tip) along
    the flow), anchoring at the tip keeps the heights of all resolved
    nodes free of pole-cell quadrature error, which dominates everything
    else for very flat-sided curves.
    """
    return _tip_anchored_raw(c.kappa, float(ell))


# ------------------------------------------------------ curvature functions
def _lambda_raw(kappa, y):
    N = len(kappa)
    _, c, _ = grid(N)
    q = N // 4
    lam = np.empty(N)
    ysafe = y.copy()
    ysafe[q] = 1.0
    ysafe[3 * q] = 1.0
    np.divide(-c, ysafe, out=lam)
    lam[q] = kappa[q]
    lam[3 * q] = kappa[3 * q]
    return lam


def lambda_of(c, y=None):
    """Rotational curvature lambda_i = -cos(theta_i)/y_i, with lambda = kappa
    at the two pole nodes (the smooth limit across the rotation axis).

    Raises ValueError for degenerate geometry: a non-pole node whose height
    has the wrong sign (y must be positive strictly between the poles on
    the upper branch and negative on the lower one).
    """
    N = c.N
    q = N // 4
    if y is None:
        _, y = reconstruct(c)
    upper = np.zeros(N, dtype=bool)
    upper[q + 1:3 * q] = True
    lower = ~upper
    lower[q] = False
    lower[3 * q] = False
    if np.any(y[upper] <= 0.0) or np.any(y[lower] >= 0.0):
        raise ValueError("degenerate geometry: node height vanishes or has the "
                         "wrong sign away from the poles")
    return _lambda_raw(c.kappa, y)


def mean_curvature(c, lam=None):
    """Mean curvature H_i = kappa_i + (n-1)*lambda_i (H = kappa when n=1)."""
    if c.n == 1:
        return c.kappa.copy()
    if lam is None:
        lam = lambda_of(c)
    return c.kappa + (c.n - 1) * lam


def derived_fields(c):
    """Bundle coordinates, lambda, and H into a DerivedFields value."""
    x, y = reconstruct(c)
    lam = lambda_of(c, y)
    return DerivedFields(x=x, y=y, lam=lam, H=mean_curvature(c, lam))


# ------------------------------------------------------------------- areas
def enclosed_area(c, coords=None):
    """Enclosed area by the discrete Green's theorem
    A = (1/2) * sum(x_i dy_i - y_i dx_i) over the node polygon."""
    x, y = coords if coords is not None else reconstruct(c)
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _model_area_raw(kappa, x, y):
    """Area under the in-cell model: integral of x dy with closed-form
    pole-slice increments driven by the geometric cell heights."""
    N = len(kappa)
    th, c, s = grid(N)
    q = N // 4
    dth = TWO_PI / N
    v = kappa * kappa
    u0 = -c
    u1 = np.roll(u0, -1)
    x1 = np.roll(x, -1)
    y1 = np.roll(y, -1)
    inc = 0.5 * (x + x1) * (y1 - y)
    anchor = _pole_anchor_vals(v)
    far_is_1 = np.abs(u1) >= np.abs(u0)
    v_far = np.where(far_is_1, np.roll(v, -1), v)
    u_far2 = np.where(far_is_1, u1 * u1, u0 * u0)
    vbar = 0.5 * (v + np.roll(v, -1))
    ok = (np.isfinite(anchor) & (u_far2 > 1e-12)
          & (v_far - anchor > 1e-8 * vbar))
    A = np.where(ok, anchor, 1.0)
    B = np.where(ok, (v_far - anchor) / np.where(ok, u_far2, 1.0), 1.0)
    F_inc = _inv_speed_antideriv(u1, A, B) - _inv_speed_antideriv(u0, A, B)
    du = u1 - u0
    cc = np.sqrt(A + B * u0 * u0)
    wbar = 0.5 * (s + np.roll(s, -1))  # signed: lower half runs backward
    inc_model = x * F_inc - (du - cc * F_inc) / (B * wbar)
    inc = np.where(ok, inc_model, inc)
    # pole-adjacent slices: model consistent with the node heights themselves
    u1p = np.sin(dth)
    for p, sgn in ((q, 1.0), (3 * q, -1.0)):
        for j in (p - 1, p):
            j1 = (j + 1) % N
            far = j if j != p else j1
            dy = y[j1] - y[j]
            mdl = _pole_cell_model(v[far], u1p, abs(dy))
            if mdl is None:
                inc[j] = 0.5 * (x[j] + x[j1]) * dy
                continue
            Ap, Bp = mdl
            dup = u0[j1] - u0[j]
            if abs(Bp) < 1e-14 * v[far] / u1p ** 2:
                inc[j] = x[p] * dy  # flat cell: no excess width
                continue
            inc[j] = x[p] * dy - sgn * (dup - np.sqrt(Ap) * dy) / Bp
    return np.sum(inc)


def model_area(c, ell=None, coords=None):
    """Enclosed area with pole-cell increments evaluated in closed form.

    Prefer this over `enclosed_area` whenever the pole is under-resolved:
    the node polygon's flat-side chords can miss most of a pole cell's
    content.  With `ell` given the coordinates are tip-anchored.
    """
    if coords is not None:
        x, y = coords
    elif ell is not None:
        x, y = _tip_anchored_raw(c.kappa, float(ell))
    else:
        x, y = reconstruct(c)
    return _model_area_raw(c.kappa, x, y)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _lambda_kappa_integral_raw(kappa, y):
    """Integral of lambda/kappa d(theta) over the full circle: trapezoid
    away from the poles, substituted Gauss rule on the pole-adjacent
    intervals (the integrand varies by orders of magnitude there)."""
    N = len(kappa)
    dth = TWO_PI / N
    q = N // 4
    lam = _lambda_raw(kappa, y)
    g = lam / kappa
    total = np.sum(0.5 * dth * (g + np.roll(g, -1)))
    v = kappa * kappa
    corr = 0.0
    u1p = np.sin(dth)
    for p in (q, 3 * q):
        for j in (p - 1, p):
            j1 = (j + 1) % N
            tz = 0.5 * dth * (g[j] + g[j1])
            far = j if j != p else j1
            mdl = _pole_cell_model(v[far], u1p, abs(y[far]))
            if mdl is None:
                continue
            v0, beta = mdl
            if beta <= 1e-14 * v[far] / u1p ** 2:
                continue  # flat cell: trapezoid already adequate
            Xi = np.arcsinh(np.sqrt(beta) * u1p / np.sqrt(v0))
            xi = 0.5 * Xi * (_GL_X + 1.0)
            wgt = 0.5 * Xi * _GL_W
            sw = np.sqrt(v0 / beta) * np.sinh(xi)
            sw = np.clip(sw, 0.0, 1.0 - 1e-15)
            integ = sw / np.sqrt(1.0 - sw * sw) / np.maximum(xi, 1e-300)
            corr += np.sum(wgt * integ) - tz
    return total + corr


def lambda_kappa_integral(c, y=None, ell=None):
    """Integral of lambda/kappa d(theta) (the rotational area-rate term)."""
    if y is None:
        if ell is not None:
            _, y = _tip_anchored_raw(c.kappa, float(ell), need_x=False)
        else:
            _, y = reconstruct(c)
    return _lambda_kappa_integral_raw(c.kappa, y)


# ------------------------------------------------------------ displacements
def displacements(c, coords=None):
    """Displacements (h, ell): x at the pole node and y at the tip node."""
    x, y = coords if coords is not None else reconstruct(c)
    N = len(x)
    return x[N // 4], y[N // 2]


# ------------------------------------------------- Alexandrov reflection
def alexandrov_strict(c, alpha, coords=None):
    """Strict reflection test about the vertical line x = alpha.

    Every node of the upper branch with x > alpha is reflected to
    2*alpha - x and must land strictly below the branch's width function
    w (piecewise-linear through the nodes).  Returns (strict, margin)
    where margin is the minimal clearance w(2*alpha - x_i) - y_i over the
    tested nodes; by the y-reflection symmetry the lower branch needs no
    separate test.

    Raises ValueError when alpha is outside (0, h).
    """
    x, y = coords if coords is not None else reconstruct(c)
    N = len(x)
    q = N // 4
    h = x[q]
    if not (0.0 < alpha < h):
        raise ValueError(f"reflection offset must lie in (0, h) = (0, {h}), "
                         f"got {alpha}")
    xs = x[q:3 * q + 1]     # upper branch, x strictly decreasing
    ys = y[q:3 * q + 1]
    xg = xs[::-1]
    yg = ys[::-1]
    test = xs > alpha
    refl = 2.0 * alpha - xs[test]
    clear = np.interp(refl, xg, yg) - ys[test]
    margin = float(np.min(clear))
    return margin > 0.0, margin
