"""Self-similar profiles of u_t = Lap(u) + |u|^a u.

A profile f solves the radial ODE

    f'' + ((N-1)/r + r/2) f' + f/alpha + |f|^alpha f = 0,  f(0)=a, f'(0)=0,

and behaves like mu * r^(-2/alpha) far out.  This module integrates the ODE
(series start at the regular-singular origin, adaptive Runge-Kutta after),
counts sign changes, extracts the far-field coefficient mu, and scans the
shooting value a for prescribed (mu, zero count) pairs.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import (GateViolation, NoBracket, NonFinite, TailNotSettled,
                     ToleranceNotMet, Unbounded)

OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class ProfileSpec:
    dim: int
    alpha: float
    a: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def subcritical(self):
        """(N-2)*alpha < 4, the gate for branch-search claims."""
        return (self.dim - 2) * self.alpha < 4.0


def _series_coeffs(spec):
    """Quartic Taylor coefficients of f at r = 0: f = a + b r^2 + c r^4."""
    N, alpha, a = spec.dim, spec.alpha, spec.a
    p = a / alpha + abs(a) ** alpha * a
    b = -p / (2.0 * N)
    c = -b * (1.0 + 1.0 / alpha + (alpha + 1.0) * abs(a) ** alpha) \
        / (4.0 * (N + 2.0))
    return b, c


class ProfileCurve:
    """Integrated profile with dense evaluation.

    Attributes r_grid, f_values, df_values, local_error are the tabulated
    view; eval/eval_deriv use the quartic series below r_series and the
    integrator's dense output above it.
    """

    def __init__(self, spec, r_grid, f_values, df_values, local_error,
                 r_series, dense, zero_radii):
        self.spec = spec
        self.r_grid = r_grid
        self.f_values = f_values
        self.df_values = df_values
        self.local_error = local_error
        self.r_series = r_series
        self._dense = dense
        self.zero_radii = zero_radii

    @property
    def r_max(self):
        return float(self.r_grid[-1])

    def eval(self, r):
        r = np.asarray(r, dtype=float)
        scalar = (r.ndim == 0)
        r = np.atleast_1d(r)
        b, c = _series_coeffs(self.spec)
        out = np.empty_like(r)
        small = r < self.r_series
        if np.any(small):
            rs = r[small]
            out[small] = self.spec.a + b * rs ** 2 + c * rs ** 4
        if np.any(~small):
            out[~small] = self._dense(r[~small])[0]
        return out[0] if scalar else out

    def eval_deriv(self, r):
        r = np.asarray(r, dtype=float)
        scalar = (r.ndim == 0)
        r = np.atleast_1d(r)
        b, c = _series_coeffs(self.spec)
        out = np.empty_like(r)
        small = r < self.r_series
        if np.any(small):
            rs = r[small]
            out[small] = 2.0 * b * rs + 4.0 * c * rs ** 3
        if np.any(~small):
            out[~small] = self._dense(r[~small])[1]
        return out[0] if scalar else out


def _rhs(spec):
    N, alpha = spec.dim, spec.alpha

    def fn(r, y):
        f, df = y
        return [df, -((N - 1.0) / r + 0.5 * r) * df
                - f / alpha - abs(f) ** alpha * f]
    return fn


def integrate_profile(spec, r_max, tol=1e-8, grid_h=0.01):
    """Integrate the profile ODE out to r_max.

    The origin is started with the quartic Taylor series on [0, r_series],
    r_series = min(1e-3, tol^(1/4)); integration then proceeds with a
    high-order adaptive stepper whose dense output backs eval().  Aborts
    with the escape radius when |f| exceeds the overflow guard.
    """
    if r_max <= 0 or tol <= 0:
        raise ValueError("r_max and tol must be positive")
    r_series = min(1e-3, tol ** 0.25)
    b, c = _series_coeffs(spec)
    y0 = [spec.a + b * r_series ** 2 + c * r_series ** 4,
          2.0 * b * r_series + 4.0 * c * r_series ** 3]

    def overflow(r, y):
        return abs(y[0]) - OVERFLOW_GUARD
    overflow.terminal = True

    def crossing(r, y):
        return y[0]
    crossing.terminal = False

    # the dense-output error is amplified ~1/h by the residual stencil, so
    # the stepper runs well below the requested curve tolerance
    rtol = max(min(tol * 1e-4, 1e-8), 1e-13)
    atol = rtol * max(1.0, abs(spec.a))
    sol = solve_ivp(_rhs(spec), (r_series, r_max), y0, method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True,
                    events=[overflow, crossing])
    if sol.status == 1:  # overflow event fired
        esc = float(sol.t_events[0][0])
        raise NonFinite(f"profile escaped at r={esc:.6g}", escape_radius=esc)
    if not sol.success:
        raise ToleranceNotMet(f"stepper failed: {sol.message}")

    def dense(r):
        return sol.sol(np.maximum(r, r_series))

    n = int(round(r_max / grid_h))
    r_grid = np.linspace(0.0, r_max, n + 1)
    f_vals = np.empty_like(r_grid)
    df_vals = np.empty_like(r_grid)
    small = r_grid < r_series
    rs = r_grid[small]
    f_vals[small] = spec.a + b * rs ** 2 + c * rs ** 4
    df_vals[small] = 2.0 * b * rs + 4.0 * c * rs ** 3
    big = ~small
    fd = sol.sol(r_grid[big])
    f_vals[big], df_vals[big] = fd[0], fd[1]
    local_error = rtol * (np.abs(f_vals) + np.abs(df_vals)) + atol

    zero_radii = _refine_zeros(sol, spec, r_series, tol)
    return ProfileCurve(spec, r_grid, f_vals, df_vals, local_error,
                        r_series, dense, zero_radii)


def _refine_zeros(sol, spec, r_series, tol):
    """Sign changes of f, bisected on the dense output to width <= tol."""
    if spec.a == 0.0:
        return []
    roots = []
    cand = np.sort(sol.t_events[1]) if len(sol.t_events[1]) else np.array([])
    eps = max(1e-8, tol)
    for r0 in cand:
        lo = max(r_series, r0 - 10.0 * eps)
        hi = min(sol.t[-1], r0 + 10.0 * eps)
        flo = float(sol.sol(lo)[0])
        fhi = float(sol.sol(hi)[0])
        if flo * fhi > 0:
            continue  # tangency, not a sign change
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = float(sol.sol(mid)[0])
            if flo * fm <= 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
        root = 0.5 * (lo + hi)
        if not roots or root - roots[-1] > 100.0 * tol:
            roots.append(root)
    return roots


def residual(curve):
    """Max ODE residual over interior grid nodes.

    f'' is reconstructed from the tabulated derivative with a 7-point
    centered first-difference (O(h^6)), so the result reflects the stored
    values rather than the integrator's internal consistency.
    """
    r = curve.r_grid
    f, df = curve.f_values, curve.df_values
    h = r[1] - r[0]
    c = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / (60.0 * h)
    n = len(r)
    i = np.arange(3, n - 3)
    d2f = sum(c[k] * df[i - 3 + k] for k in range(7))
    N, alpha = curve.spec.dim, curve.spec.alpha
    ri, fi, dfi = r[i], f[i], df[i]
    res = d2f + ((N - 1.0) / ri + 0.5 * ri) * dfi + fi / alpha \
        + np.abs(fi) ** alpha * fi
    return float(np.max(np.abs(res)))


@dataclass
class ProfileSummary:
    zero_count: int
    mu: float
    mu_uncertainty: float
    f0: float
    decay_certificate: float

    def to_json(self):
        return {"zero_count": self.zero_count, "mu": self.mu,
                "mu_uncertainty": self.mu_uncertainty, "f0": self.f0,
                "decay_certificate": self.decay_certificate}


def _fit_mu(curve, r_lo, r_hi):
    """Least-squares fit f(r) ~ mu r^(-2/alpha) (1 + c/r^2) on [r_lo, r_hi]."""
    alpha = curve.spec.alpha
    r = np.linspace(r_lo, r_hi, 129)
    g = curve.eval(r) * r ** (2.0 / alpha)
    A = np.column_stack([np.ones_like(r), r ** -2.0])
    coef, *_ = np.linalg.lstsq(A, g, rcond=None)
    resid = g - A @ coef
    return float(coef[0]), float(np.max(np.abs(resid)))


def summarize_profile(curve, settle_tol=1e-3):
    """Zero count, far-field coefficient, and decay certificate."""
    if curve.spec.a == 0.0:
        return ProfileSummary(0, 0.0, 0.0, 0.0, 0.0)
    alpha = curve.spec.alpha
    r_max = curve.r_max
    mu, fit_resid = _fit_mu(curve, 0.5 * r_max, r_max)
    mu_a, _ = _fit_mu(curve, 0.5 * r_max, 0.75 * r_max)
    mu_b, _ = _fit_mu(curve, 0.75 * r_max, r_max)
    mu_uncertainty = max(abs(mu - mu_a), abs(mu - mu_b))
    scale = abs(mu) + abs(curve.spec.a) * r_max ** (-2.0 / alpha)
    if fit_resid > settle_tol * max(scale, 1e-12) or not math.isfinite(mu):
        raise TailNotSettled(
            f"far-field fit residual {fit_resid:.3g} too large at "
            f"r_max={r_max}; increase r_max")
    r = curve.r_grid[1:]
    decay = np.max((np.abs(curve.f_values[1:])
                    + (1.0 + r) * np.abs(curve.df_values[1:]))
                   * (1.0 + r ** 2) ** (1.0 / alpha))
    decay = max(float(decay),
                abs(curve.spec.a))  # the r = 0 node: |f(0)| * 1
    return ProfileSummary(len(curve.zero_radii), mu, mu_uncertainty,
                          float(curve.spec.a), decay)


def _scan_point(N, alpha, a, r_max, tol):
    """(zero_count, mu) at shooting value a, or None if non-global/unsettled."""
    try:
        curve = integrate_profile(ProfileSpec(N, alpha, a), r_max, tol,
                                  grid_h=r_max / 400.0)
        s = summarize_profile(curve)
        return s.zero_count, s.mu
    except (NonFinite, TailNotSettled, ToleranceNotMet):
        return None


def find_profiles(N, alpha, mu_target, zeros, a_window, k_max=8,
                  mu_tol=1e-6, r_max=30.0, scan_tol=1e-7,
                  samples_per_unit=400):
    """Shooting values a whose profile has `zeros` sign changes and
    far-field coefficient mu_target.

    Scans a_window on a uniform grid, then bisects mu(a) - mu_target inside
    cells where the zero count is constant and equal to `zeros`.
    """
    spec_probe = ProfileSpec(N, alpha, 0.0)
    if not spec_probe.subcritical:
        raise GateViolation(f"(N-2)*alpha = {(N - 2) * alpha} >= 4")
    lo, hi = float(a_window[0]), float(a_window[1])
    if not (lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise NoBracket("a_window must be a finite nonempty interval")
    n = max(8, int(math.ceil(samples_per_unit * (hi - lo))))
    grid = np.linspace(lo, hi, n + 1)
    data = [_scan_point(N, alpha, a, r_max, scan_tol) for a in grid]

    found = []
    if mu_target == 0.0 and lo <= 0.0 <= hi:
        found.append(0.0)

    def mu_of(a):
        d = _scan_point(N, alpha, a, r_max, scan_tol)
        if d is None or d[0] != zeros:
            return None
        return d[1]

    for i in range(n):
        d0, d1 = data[i], data[i + 1]
        if d0 is None or d1 is None:
            continue
        if d0[0] != zeros or d1[0] != zeros:
            continue
        g0, g1 = d0[1] - mu_target, d1[1] - mu_target
        if g0 == 0.0:
            found.append(float(grid[i]))
            continue
        if g0 * g1 >= 0:
            continue

        def fn(a):
            m = mu_of(a)
            # fall back to the secant sign if the count flips mid-cell
            return (m - mu_target) if m is not None else g0
        try:
            root = brentq(fn, grid[i], grid[i + 1], xtol=1e-10)
        except ValueError:
            continue
        m = mu_of(root)
        if m is not None and abs(m - mu_target) <= max(mu_tol, 1e-6):
            found.append(float(root))

    found = sorted(set(round(a, 9) for a in found))
    dedup = []
    for a in found:
        if not dedup or a - dedup[-1] > 1e-6:
            dedup.append(a)
    if not dedup:
        raise NoBracket(
            f"no shooting value with {zeros} zeros and mu={mu_target} "
            f"in {a_window}")
    return dedup[:k_max]


# ---------------------------------------------------------------------------
# the self-similar solution U(t, x) = t^(-1/alpha) f(|x| / sqrt(t))


def self_similar_eval(curve, summary, t, rho):
    """U(t, rho); beyond the integrated range the far-field law
    mu * rho^(-2/alpha) applies (error within summary.mu_uncertainty)."""
    if t <= 0:
        raise ValueError("t must be positive")
    alpha = curve.spec.alpha
    rho = np.asarray(rho, dtype=float)
    scalar = (rho.ndim == 0)
    rho = np.atleast_1d(rho)
    r = rho / math.sqrt(t)
    out = np.empty_like(r)
    inside = r <= curve.r_max
    if np.any(inside):
        out[inside] = t ** (-1.0 / alpha) * curve.eval(r[inside])
    if np.any(~inside):
        out[~inside] = summary.mu * np.power(rho[~inside], -2.0 / alpha)
    return out[0] if scalar else out


def self_similar_grad(curve, summary, t, rho):
    """Radial derivative dU/drho."""
    alpha = curve.spec.alpha
    rho = np.asarray(rho, dtype=float)
    scalar = (rho.ndim == 0)
    rho = np.atleast_1d(rho)
    r = rho / math.sqrt(t)
    out = np.empty_like(r)
    inside = r <= curve.r_max
    if np.any(inside):
        out[inside] = t ** (-1.0 / alpha - 0.5) * curve.eval_deriv(r[inside])
    if np.any(~inside):
        out[~inside] = (-2.0 / alpha) * summary.mu \
            * np.power(rho[~inside], -2.0 / alpha - 1.0)
    return out[0] if scalar else out


def verify_selfsimilar_bounds(curve, summary, n=2000):
    """Smallest measured C1 with

        |U(t,x)|^alpha <= C1 * min(1/t, 1/|x|^2)
        |grad U(t,x)|^(2 alpha/(alpha+2)) <= C1 / (t + |x|^2).

    Both ratios are scale-invariant, so the maximization reduces to the
    profile variable r = |x|/sqrt(t); the result is checked for stability
    under doubling the sample count.
    """
    alpha = curve.spec.alpha

    def measure(n_samples):
        r = np.concatenate([[0.0],
                            np.geomspace(1e-6, curve.r_max, n_samples)])
        f = np.abs(curve.eval(r))
        df = np.abs(curve.eval_deriv(r))
        c_val = np.max(f ** alpha * np.maximum(1.0, r ** 2))
        c_grad = np.max(df ** (2.0 * alpha / (alpha + 2.0)) * (1.0 + r ** 2))
        return max(float(c_val), float(c_grad))

    c1 = measure(n)
    c1_fine = measure(2 * n)
    if c1 == 0.0 and c1_fine == 0.0:
        return {"C1": 0.0}
    if c1_fine > 1.2 * c1:
        raise Unbounded(f"bound constant grew under refinement: "
                        f"{c1} -> {c1_fine}")
    return {"C1": max(c1, c1_fine)}


def curve_to_csv(curve, path):
    """Write r, f, df, residual columns."""
    r = curve.r_grid
    f, df = curve.f_values, curve.df_values
    h = r[1] - r[0]
    c = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / (60.0 * h)
    res = np.full_like(r, np.nan)
    n = len(r)
    i = np.arange(3, n - 3)
    d2f = sum(c[k] * df[i - 3 + k] for k in range(7))
    N, alpha = curve.spec.dim, curve.spec.alpha
    res[i] = d2f + ((N - 1.0) / r[i] + 0.5 * r[i]) * df[i] \
        + f[i] / alpha + np.abs(f[i]) ** alpha * f[i]
    with open(path, "w") as fh:
        fh.write("r,f,df,residual\n")
        for k in range(n):
            fh.write(f"{r[k]!r},{f[k]!r},{df[k]!r},{res[k]!r}\n")
