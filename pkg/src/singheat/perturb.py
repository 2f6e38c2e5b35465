"""Weighted contraction-mapping construction of perturbed solutions
u = Psi*U + w of u_t = Lap(u) + |u|^a u.

The perturbation w solves the integral equation

    w(t) = e^{t Lap_Omega} w0 + int_0^t e^{(t-s) Lap_Omega} M(w)(s) ds,
    M(w) = 2 grad U . grad Psi + U Lap Psi
           + |Psi U + w|^a (Psi U + w) - Psi |U|^a U,

iterated in the sup norm weighted by the envelope Theta.  Time stepping
uses precomputed propagator matrices (heat kernel quadrature against the
linear interpolant on the radial grid) and an exponential-trapezoid
recursion for the Duhamel integral.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import heatops, profile
from .errors import EnvelopeViolated, NotContracting, GridTooCoarse


@dataclass
class SpaceTimeField:
    t_grid: np.ndarray
    r_grid: np.ndarray
    values: np.ndarray  # shape (n_t, n_r)

    def __post_init__(self):
        if self.values.shape != (len(self.t_grid), len(self.r_grid)):
            raise ValueError("values shape must be (n_t, n_r)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")


@dataclass
class FixedPointReport:
    iterations: int
    dists: list
    contraction_factors: list
    envelope_margin: float
    trace_constant: float
    quad_err: float
    converged: bool

    def to_json(self):
        return {"iterations": self.iterations, "dists": self.dists,
                "contraction_factors": self.contraction_factors,
                "envelope_margin": self.envelope_margin,
                "trace_constant": self.trace_constant,
                "quad_err": self.quad_err, "converged": self.converged}


def _unit_quintic(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def _unit_quintic_d1(x):
    x = np.clip(x, 0.0, 1.0)
    return 30.0 * x * x * (x - 1.0) * (x - 1.0)


def _unit_quintic_d2(x):
    x = np.clip(x, 0.0, 1.0)
    return 60.0 * x * (x - 1.0) * (2.0 * x - 1.0)


class RadialCutoff:
    """Smooth radial cutoff: 1 on [0, r0], 0 on [r1, inf), quintic blend."""

    def __init__(self, r0, r1):
        if not (0 < r0 < r1):
            raise ValueError("need 0 < r0 < r1")
        self.r0, self.r1 = float(r0), float(r1)
        self.width = self.r1 - self.r0

    def __call__(self, r):
        x = (np.asarray(r, dtype=float) - self.r0) / self.width
        return 1.0 - _unit_quintic(x)

    def deriv(self, r):
        x = (np.asarray(r, dtype=float) - self.r0) / self.width
        return -_unit_quintic_d1(x) / self.width

    def deriv2(self, r):
        x = (np.asarray(r, dtype=float) - self.r0) / self.width
        return -_unit_quintic_d2(x) / self.width ** 2

    def w2inf(self):
        # sup|Psi|, sup|Psi'|, sup|Psi''| combine into the W^{2,inf} norm
        return 1.0 + 1.875 / self.width + 10.0 / (math.sqrt(3.0) * self.width ** 2)


def g_diff(alpha, b, w):
    """|b+w|^a (b+w) - |b|^a b without catastrophic cancellation.

    Second-order Taylor branch when |w| << |b| (the difference can be ~1e-16
    of either term near the space-time corner), direct difference otherwise.
    """
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    out = np.empty(np.broadcast(b, w).shape)
    small = np.abs(w) <= 1e-3 * np.abs(b)
    bs = b[small]
    ws = w[small]
    safe = np.where(bs != 0.0, bs, 1.0)
    out[small] = (alpha + 1.0) * np.abs(bs) ** alpha * ws \
        * (1.0 + 0.5 * alpha * ws / safe)
    bl = b[~small]
    wl = w[~small]
    out[~small] = np.abs(bl + wl) ** alpha * (bl + wl) \
        - np.abs(bl) ** alpha * bl
    return out


def build_r_grid(delta, T, m, r_end, refine=1):
    """Piecewise-uniform radial grid: fine near the origin (resolving the
    background feature width sqrt(T) and the inner cutoff transitions),
    medium through the cutoff zone, coarser outside."""
    r1 = max(8.0 * math.sqrt(T), 2.5 * 2.0 ** (-(m - 1)) * delta)
    r2 = 1.25 * delta
    if r2 >= r_end:
        r2 = 0.5 * (r1 + r_end)
    n1, n2, n3 = 64 * refine, 64 * refine, 80 * refine
    g = np.unique(np.concatenate([
        np.linspace(0.0, r1, n1 + 1),
        np.linspace(r1, r2, n2 + 1),
        np.linspace(r2, r_end, n3 + 1)]))
    return g


class PerturbationProblem:
    """Precomputed grids, background, weights, and propagators for one run.

    background: (curve, summary) pair for the self-similar U, or None (U=0).
    psi: RadialCutoff or None (Psi identically 1).
    """

    def __init__(self, domain, w0_field, bundle, background=None, psi=None,
                 n_t=64, refine=1, r_end=None):
        self.domain = domain
        self.w0 = w0_field
        self.bundle = bundle
        self.background = background
        self.psi_cut = psi
        self.alpha = bundle.alpha
        if domain.kind == heatops.BALL:
            r_end = domain.radius
        elif r_end is None:
            r_end = max(2.0, 4.0 * bundle.delta)
        n_t = n_t * refine
        k = np.arange(1, n_t + 1, dtype=float)
        self.t_grid = bundle.T * (k / n_t) ** 2
        self.r_grid = build_r_grid(bundle.delta, bundle.T, bundle.m, r_end,
                                   refine=refine)
        env = bundle.envelope()
        self.theta = np.stack([env(t, self.r_grid) for t in self.t_grid])
        # sub-grid of the first time cell (0, t_1]: the integrand there
        # behaves like Theta(s)/s near the origin, so the cell needs its own
        # graded quadrature to keep the discrete map contracting at the corner
        q = np.arange(1, 9, dtype=float)
        self.s_sub = self.t_grid[0] * (q / q[-1]) ** 2
        self.theta_sub = np.stack([env(s, self.r_grid) for s in self.s_sub])
        self._fill_background()
        self._fill_psi()
        self._build_propagators()
        self._fill_linear_part()

    # -- precomputation -----------------------------------------------------

    def _fill_background(self):
        nt, nr = len(self.t_grid), len(self.r_grid)
        nq = len(self.s_sub)
        self.U = np.zeros((nt, nr))
        self.dU = np.zeros((nt, nr))
        self.U_sub = np.zeros((nq, nr))
        self.dU_sub = np.zeros((nq, nr))
        if self.background is not None:
            curve, summary = self.background
            for i, t in enumerate(self.t_grid):
                self.U[i] = profile.self_similar_eval(curve, summary, t,
                                                      self.r_grid)
                self.dU[i] = profile.self_similar_grad(curve, summary, t,
                                                       self.r_grid)
            for i, s in enumerate(self.s_sub):
                self.U_sub[i] = profile.self_similar_eval(curve, summary, s,
                                                          self.r_grid)
                self.dU_sub[i] = profile.self_similar_grad(curve, summary, s,
                                                           self.r_grid)

    def _fill_psi(self):
        r = self.r_grid
        N = self.domain.dim
        if self.psi_cut is None:
            self.psi = np.ones_like(r)
            self.dpsi = np.zeros_like(r)
            self.lappsi = np.zeros_like(r)
        else:
            self.psi = self.psi_cut(r)
            self.dpsi = self.psi_cut.deriv(r)
            d2 = self.psi_cut.deriv2(r)
            rr = np.where(r > 0.0, r, 1.0)
            self.lappsi = d2 + (N - 1.0) * self.dpsi / rr

    def _build_propagators(self):
        self.P = []
        for k in range(len(self.t_grid) - 1):
            tau = self.t_grid[k + 1] - self.t_grid[k]
            self.P.append(heatops.propagator_matrix(self.domain, tau,
                                                    self.r_grid))

    def _fill_linear_part(self):
        """E[k] = e^{t_k Lap_Omega} w0, computed by direct quadrature; the
        propagated version at the final time estimates the accumulated
        interpolation error of the stepping scheme."""
        nt = len(self.t_grid)
        self.E = np.stack([heatops.heat_eval(self.domain, self.w0, t,
                                             self.r_grid)
                           for t in self.t_grid])
        e_inc = self.E[0].copy()
        for k in range(nt - 1):
            e_inc = self.P[k] @ e_inc
        # relative error per unit of propagated magnitude: the march only
        # ever propagates the Duhamel integral, so the absolute slack is
        # this rate times the integral's actual size
        scale = max(float(np.max(np.abs(self.E))), 1e-300)
        self.prop_rel_err = float(np.max(np.abs(e_inc - self.E[-1]))) / scale
        self.quad_err = 1e-14  # updated by picard_map once an integral exists

    # -- the nonlinearity ---------------------------------------------------

    def _mtilde_core(self, U, dU, w_slice):
        b = self.psi * U
        out = g_diff(self.alpha, b, w_slice)
        varying = self.psi < 1.0
        if np.any(varying):
            # Psi^(a+1) |U|^a U - Psi |U|^a U, only where Psi differs from 1
            gU = np.abs(U[varying]) ** self.alpha * U[varying]
            p = self.psi[varying]
            out[varying] += (p ** (self.alpha + 1.0) - p) * gU
            out += 2.0 * dU * self.dpsi + U * self.lappsi
        return out

    def mtilde_values(self, k, w_slice):
        """M(w) at time index k, vectorized over the radial grid."""
        return self._mtilde_core(self.U[k], self.dU[k], w_slice)

    def first_cell_integral(self, w_first):
        """int_0^{t_1} M(w)(s) ds with w continued below the first node by
        envelope scaling, w(s) = w(t_1) * Theta(s)/Theta(t_1).

        Kernel propagation over the cell is negligible (the diffusion
        length is below the grid spacing), so this is plain quadrature on
        the graded sub-grid."""
        scale0 = np.maximum(self.theta[0], 1e-300)
        F = np.stack([
            self._mtilde_core(self.U_sub[q], self.dU_sub[q],
                              w_first * self.theta_sub[q] / scale0)
            for q in range(len(self.s_sub))])
        out = self.s_sub[0] * F[0]
        for q in range(len(self.s_sub) - 1):
            out = out + 0.5 * (self.s_sub[q + 1] - self.s_sub[q]) \
                * (F[q] + F[q + 1])
        return out


def mtilde(problem, w, t_index):
    """M(w) at one time slice of a SpaceTimeField."""
    return problem.mtilde_values(t_index, w.values[t_index])


def _duhamel_march(problem, F, w_first):
    """I[k] ~= int_0^{t_k} e^{(t_k - s) Lap} F(s) ds by the propagated
    trapezoid recursion, seeded with the sub-grid quadrature of the first
    time cell."""
    nt = len(problem.t_grid)
    I = np.empty_like(F)
    I[0] = problem.first_cell_integral(w_first)
    for k in range(nt - 1):
        tau = problem.t_grid[k + 1] - problem.t_grid[k]
        I[k + 1] = problem.P[k] @ (I[k] + 0.5 * tau * F[k]) \
            + 0.5 * tau * F[k + 1]
    return I


def picard_map(problem, w, slack_mult=10.0):
    """One application of the integral-equation map, with envelope checks."""
    theta = problem.theta
    quad_slack = slack_mult * max(problem.quad_err, 1e-14)
    in_margin = float(np.min(theta - np.abs(w.values)))
    if in_margin < -quad_slack:
        raise EnvelopeViolated("input leaves the envelope",
                               where="input", margin=in_margin)
    F = np.stack([problem.mtilde_values(k, w.values[k])
                  for k in range(len(problem.t_grid))])
    I = _duhamel_march(problem, F, w.values[0])
    problem.quad_err = max(problem.prop_rel_err * float(np.max(np.abs(I))),
                           1e-14)
    quad_slack = slack_mult * problem.quad_err
    out = problem.E + I
    out_margin = float(np.min(theta - np.abs(out)))
    if out_margin < -quad_slack:
        raise EnvelopeViolated(
            "image leaves the envelope beyond quadrature slack "
            "(constants or grids too coarse)", where="output",
            margin=out_margin)
    return SpaceTimeField(problem.t_grid, problem.r_grid, out)


def weighted_dist(problem, v, z):
    """sup |v - z| / Theta over the space-time grid."""
    return float(np.max(np.abs(v - z) / problem.theta))


def zero_field(problem):
    return SpaceTimeField(problem.t_grid, problem.r_grid,
                          np.zeros_like(problem.theta))


def alternating_seed(problem):
    """Theta/2 with sign flips on alternate radial cells (the admissible
    restart used by the uniqueness check)."""
    signs = np.where(np.arange(len(problem.r_grid)) % 2 == 0, 1.0, -1.0)
    return SpaceTimeField(problem.t_grid, problem.r_grid,
                          0.5 * problem.theta * signs[None, :])


def solve_fixed_point(problem, tol=1e-8, max_iter=60, seed_field=None):
    """Iterate the integral-equation map to its fixed point.

    Returns (w, FixedPointReport).  Raises NotContracting if the measured
    factor exceeds 0.9 on three consecutive iterations.
    """
    w = zero_field(problem) if seed_field is None else seed_field
    dists = []
    factors = []
    bad_streak = 0
    converged = False
    for _ in range(max_iter):
        w_next = picard_map(problem, w)
        d = weighted_dist(problem, w_next.values, w.values)
        if dists:
            fac = d / dists[-1] if dists[-1] > 0 else 0.0
            factors.append(fac)
            bad_streak = bad_streak + 1 if fac > 0.9 else 0
            if bad_streak >= 3:
                worst = np.unravel_index(
                    np.argmax(np.abs(w_next.values - w.values)
                              / problem.theta),
                    problem.theta.shape)
                raise NotContracting("three consecutive factors above 0.9",
                                     factors=factors, worst_node=worst)
        dists.append(d)
        w = w_next
        if d <= tol:
            converged = True
            break
    env_margin = float(np.min(problem.theta - np.abs(w.values)))
    trace = initial_trace_check(problem, w)
    report = FixedPointReport(len(dists), dists, factors, env_margin,
                              trace["constant"], problem.quad_err, converged)
    return w, report


def contraction_probe(problem, n_pairs=20, seed=0, slack_mult=10.0):
    """Measured contraction factors on random envelope-bounded pairs.

    slack_mult=inf disables the envelope guard, so the factor of a
    non-contracting (e.g. deliberately mis-calibrated) map can still be
    measured and reported.
    """
    rng = np.random.default_rng(seed)
    shape = problem.theta.shape
    factors = []
    for _ in range(n_pairs):
        wv = problem.theta * rng.uniform(-1.0, 1.0, shape)
        zv = problem.theta * rng.uniform(-1.0, 1.0, shape)
        w = SpaceTimeField(problem.t_grid, problem.r_grid, wv)
        z = SpaceTimeField(problem.t_grid, problem.r_grid, zv)
        d_in = weighted_dist(problem, wv, zv)
        d_out = weighted_dist(
            problem,
            picard_map(problem, w, slack_mult=slack_mult).values,
            picard_map(problem, z, slack_mult=slack_mult).values)
        factors.append(d_out / d_in)
    return factors


# ---------------------------------------------------------------------------
# solution assembly and a-posteriori checks


def assemble_u(problem, w):
    """u = Psi*U + w on the problem grid."""
    vals = problem.psi[None, :] * problem.U + w.values
    return SpaceTimeField(problem.t_grid, problem.r_grid, vals)


def initial_trace_check(problem, w, t_probes=None):
    """max over probes of ||w(t) - e^{t Lap} w0||_inf / t, plus the ratio
    profile (the constant must not blow up as t -> 0)."""
    ratios = np.max(np.abs(w.values - problem.E), axis=1) / problem.t_grid
    if t_probes is None:
        probes = np.arange(len(problem.t_grid))
    else:
        probes = [int(np.argmin(np.abs(problem.t_grid - t)))
                  for t in t_probes]
    sel = ratios[probes]
    return {"constant": float(np.max(sel)),
            "t": problem.t_grid[probes].tolist(),
            "ratios": sel.tolist()}


def trace_decade_stability(problem, w):
    """Ratio of the trace constants over the two smallest resolved
    t-decades; boundedness shows the O(t) initial-trace estimate."""
    t = problem.t_grid
    ratios = np.max(np.abs(w.values - problem.E), axis=1) / t
    t_lo = t[0]
    d1 = ratios[(t >= t_lo) & (t < 10.0 * t_lo)]
    d2 = ratios[(t >= 10.0 * t_lo) & (t < 100.0 * t_lo)]
    if len(d1) == 0 or len(d2) == 0:
        raise GridTooCoarse("need two resolved decades of t for the check")
    c1, c2 = float(np.max(d1)), float(np.max(d2))
    big, small = max(c1, c2), min(c1, c2)
    return {"decade_constants": [c1, c2],
            "variation": big / max(small, 1e-300) if big > 0 else 1.0}


def _lagrange_d1(x0, x1, x2, which=1):
    """First-derivative weights at x_which from values at (x0, x1, x2)."""
    xs = (x0, x1, x2)
    xc = xs[which]
    w = []
    for i in range(3):
        others = [xs[j] for j in range(3) if j != i]
        num = sum(np.prod([xc - o for o in others if o != oo])
                  for oo in others)
        den = np.prod([xs[i] - o for o in others])
        w.append(num / den)
    return w


def _residual_at(problem, u, k, i, stride):
    """PDE residual at node (k, i) with the given stencil stride."""
    t, r = problem.t_grid, problem.r_grid
    v = u.values
    N = problem.domain.dim
    s = stride
    t0, t1, t2 = t[k - s], t[k], t[k + s]
    wt = _lagrange_d1(t0, t1, t2)
    u_t = wt[0] * v[k - s, i] + wt[1] * v[k, i] + wt[2] * v[k + s, i]
    r0, r1, r2 = r[i - s], r[i], r[i + s]
    h0, h1 = r1 - r0, r2 - r1
    u_rr = 2.0 * (v[k, i - s] / (h0 * (h0 + h1))
                  - v[k, i] / (h0 * h1)
                  + v[k, i + s] / (h1 * (h0 + h1)))
    wr = _lagrange_d1(r0, r1, r2)
    u_r = wr[0] * v[k, i - s] + wr[1] * v[k, i] + wr[2] * v[k, i + s]
    lap = u_rr + (N - 1.0) / r1 * u_r
    val = v[k, i]
    return u_t - lap - abs(val) ** problem.alpha * val


def _residual_nodes(problem, stride, t_floor):
    t, r = problem.t_grid, problem.r_grid
    ks = [k for k in range(stride, len(t) - stride) if t[k] >= t_floor]
    good_i = []
    dr = np.diff(r)
    for i in range(stride, len(r) - stride):
        # restrict to locally uniform radial spacing so the 3-point second
        # difference stays second order
        span = dr[i - stride:i + stride]
        if np.max(span) - np.min(span) < 1e-9 * np.max(span):
            good_i.append(i)
    return ks, good_i


def residual_check(problem, u, stride=1, t_floor=None):
    """Max PDE residual over checked interior nodes."""
    t = problem.t_grid
    if t_floor is None:
        # below this, the radial grid cannot resolve the sqrt(t) feature
        # width of the background, so the stencil is out of its regime
        t_floor = max(4.0 * t[0], 0.25 * t[-1])
    ks, good_i = _residual_nodes(problem, stride, t_floor)
    if not ks or not good_i:
        raise GridTooCoarse("no admissible residual nodes")
    worst = 0.0
    for k in ks:
        for i in good_i:
            worst = max(worst, abs(_residual_at(problem, u, k, i, stride)))
    return worst


def residual_order(problem, u, t_floor=None):
    """Convergence order of the residual: compare stencil strides 1 and 2
    on the same solution (stride 2 doubles the effective spacing)."""
    t = problem.t_grid
    if t_floor is None:
        t_floor = max(8.0 * t[0], 0.25 * t[-1])
    ks2, good2 = _residual_nodes(problem, 2, t_floor)
    if not ks2 or not good2:
        raise GridTooCoarse("no admissible stride-2 residual nodes")
    r1 = 0.0
    r2 = 0.0
    for k in ks2:
        for i in good2:
            r1 = max(r1, abs(_residual_at(problem, u, k, i, 1)))
            r2 = max(r2, abs(_residual_at(problem, u, k, i, 2)))
    if r1 == 0.0:
        return math.inf
    return math.log2(r2 / r1)


def separation_ratio(problem_a, w_a, f0_a, problem_b, w_b, f0_b):
    """t^(1/alpha) |u1(t,0) - u2(t,0)| / |f1(0) - f2(0)| at the smallest
    resolved t (the nonuniqueness diagnostic for two branches sharing the
    same singular initial amplitude)."""
    if f0_a == f0_b:
        raise ValueError("branches must have distinct center values")
    alpha = problem_a.alpha
    t = problem_a.t_grid[0]
    ua = assemble_u(problem_a, w_a).values[0, 0]
    ub = assemble_u(problem_b, w_b).values[0, 0]
    return t ** (1.0 / alpha) * abs(ua - ub) / abs(f0_a - f0_b)
