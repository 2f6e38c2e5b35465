import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singheat import heatops as H
from singheat.errors import (GammaDomain, Inconclusive, NotIntegrable,
                             SupercriticalExponentRequired)


# ---------------------------------------------------------------------------
# domains and fields


def test_domain_guards():
    with pytest.raises(ValueError):
        H.ball(3, -1.0)
    with pytest.raises(ValueError):
        H.DomainSpec("torus", 2, None)
    assert H.whole_space(2).radius is None


def test_radial_field_roundtrip():
    grid = np.linspace(0.0, 2.0, 50)
    fld = H.RadialField(grid, np.cos(grid), singular_coeff=0.7,
                        singular_exponent=1.5,
                        farfield=H.ff_power(0.3, 2.0))
    doc = json.loads(json.dumps(fld.to_json()))
    back = H.RadialField.from_json(doc)
    r = np.linspace(0.01, 5.0, 97)
    assert np.allclose(back(r), fld(r), rtol=1e-12, atol=1e-12)


def test_pure_power_evaluation():
    fld = H.RadialField.pure_power(2.0, 1.0)
    assert math.isclose(fld(np.array([4.0]))[0], 0.5)
    assert math.isclose(fld(np.array([0.25]))[0], 8.0)


# ---------------------------------------------------------------------------
# kernels


def test_ws_kernel_normalization():
    """The radial kernel integrates to 1 in every dimension (rho > 0 uses
    the Bessel form, rho = 0 the explicit Gaussian shell)."""
    from singheat.quadrature import integrate_panels, kernel_mesh
    for N in (1, 2, 3, 5):
        for rho in (0.0, 0.3, 2.0):
            t = 0.05
            bp = kernel_mesh(rho, t, 30.0)
            mass = integrate_panels(
                lambda r: H.ws_kernel(N, t, rho, r), bp)
            assert abs(mass - 1.0) < 1e-10, (N, rho)


def test_ws_kernel_small_bessel_argument_continuity():
    # tiny rho*r/2t crosses the series guard; values must join smoothly
    t, rho = 1.0, 1e-7
    r = np.geomspace(1e-9, 1e-3, 200)
    v = H.ws_kernel(4, t, rho, r)
    assert np.all(np.isfinite(v)) and np.all(v >= 0)
    ratio = v[1:] / v[:-1]
    assert np.all(ratio > 0.9) and np.all(ratio < 1e4)


def test_interval_kernel_boundary_and_symmetry():
    L = 1.0
    t = 0.07
    y = np.linspace(-1.0, 1.0, 41)
    assert np.allclose(H.interval_kernel(t, 1.0, y, L), 0.0, atol=1e-14)
    a = H.interval_kernel(t, 0.3, np.array([0.5]), L)[0]
    b = H.interval_kernel(t, 0.5, np.array([0.3]), L)[0]
    assert math.isclose(a, b, rel_tol=1e-12)


def test_ball_kernels_vanish_on_boundary():
    t = 0.02
    r = np.linspace(0.0, 1.0, 11)
    assert np.allclose(H.ball3_kernel(t, 1.0, r, 1.0), 0.0, atol=1e-12)
    assert np.allclose(H.ball1_kernel(t, 1.0, r, 1.0), 0.0, atol=1e-12)


def test_semigroup_property_whole_space():
    """e^{(s+t)Lap} = e^{sLap} e^{tLap} on a smooth radial field, N = 2."""
    dom = H.whole_space(2)
    grid = np.linspace(0.0, 8.0, 400)
    fld = H.RadialField(grid, np.exp(-grid ** 2), farfield=H.FF_ZERO)
    s, t = 0.03, 0.05
    once = H.heat_apply(dom, fld, s + t)
    half = H.heat_apply(dom, H.heat_apply(dom, fld, s), t)
    r = np.linspace(0.0, 3.0, 31)
    # tolerance reflects the interpolation of the intermediate field onto
    # its output grid, not the kernel quadrature itself
    assert np.max(np.abs(once(r) - half(r))) < 5e-5


def test_exact_gaussian_solution():
    """e^{tLap} of exp(-|x|^2/4a) = (a/(a+t))^{N/2} exp(-|x|^2/4(a+t))."""
    N, a, t = 3, 0.5, 0.2
    dom = H.whole_space(N)
    grid = np.linspace(0.0, 12.0, 600)
    fld = H.RadialField(grid, np.exp(-grid ** 2 / (4 * a)),
                        farfield=H.FF_ZERO)
    r = np.linspace(0.0, 2.0, 21)
    got = H.heat_eval(dom, fld, t, r)
    want = (a / (a + t)) ** (N / 2.0) * np.exp(-r ** 2 / (4 * (a + t)))
    assert np.max(np.abs(got - want)) < 1e-7


def test_ball_eigenfunction_decay():
    """Dirichlet eigenfunctions decay at exactly their eigenvalue rate."""
    for N in (1, 2, 3):
        R = 1.0
        dom = H.ball(N, R)
        if N == 1:
            lam = (math.pi / (2.0 * R)) ** 2
            phi = lambda r: np.cos(math.pi * r / (2.0 * R))
        else:
            from scipy.special import jv
            zeros, lams = H.bessel_dirichlet_modes(N, R, 1)
            j1, lam = float(zeros[0]), float(lams[0])
            nu = N / 2.0 - 1.0

            def phi(r, j1=j1, nu=nu):
                r = np.asarray(r, dtype=float)
                rr = np.where(r > 0, r, 1e-300)
                out = rr ** -nu * jv(nu, j1 * rr / R)
                lim = (j1 / (2.0 * R)) ** nu / math.gamma(nu + 1.0)
                return np.where(r > 0, out, lim)
        grid = np.linspace(0.0, R, 400)
        fld = H.RadialField(grid, np.asarray(phi(grid), dtype=float),
                            farfield=H.FF_ZERO)
        t = 0.1
        r = np.linspace(0.0, 0.9 * R, 19)
        got = H.heat_eval(dom, fld, t, r)
        want = math.exp(-lam * t) * np.asarray(phi(r), dtype=float)
        assert np.max(np.abs(got - want)) < 1e-7, N


@settings(max_examples=15, deadline=None)
@given(t=st.floats(1e-4, 0.3), c=st.floats(0.1, 5.0))
def test_max_principle_constant_data(t, c):
    """Heat flow of a constant stays below the constant (strictly, on the
    ball) and equals it on the whole space."""
    grid = np.linspace(0.0, 1.0, 60)
    fld = H.RadialField(grid, np.full_like(grid, c),
                        farfield=H.ff_constant(c))
    ws = H.heat_eval(H.whole_space(3), fld, t, np.array([0.0, 0.4]))
    assert np.allclose(ws, c, rtol=1e-9)
    ball = H.heat_eval(H.ball(3, 1.0), fld, t, np.array([0.0, 0.4]))
    assert np.all(ball < c + 1e-12)


# ---------------------------------------------------------------------------
# moments, thresholds, verdicts


def test_power_moment_domain_guard():
    with pytest.raises(GammaDomain):
        H.power_moment(3, 3.0)
    with pytest.raises(GammaDomain):
        H.power_moment(2, -0.1)


def test_power_moment_closed_form():
    for N, g in [(1, 0.75), (2, 0.5), (3, 2.0), (4, 3.75)]:
        want = 2.0 ** -g * math.gamma((N - g) / 2) / math.gamma(N / 2)
        assert math.isclose(H.power_moment(N, g), want, rel_tol=1e-10)


def test_mu0_threshold_closed_form():
    # alpha = 2, N = 3: mu0 = sqrt(pi/2)
    assert math.isclose(H.mu0_threshold(3, 2.0), math.sqrt(math.pi / 2.0),
                        rel_tol=1e-10)
    with pytest.raises(SupercriticalExponentRequired):
        H.mu0_threshold(3, 0.5)


def test_doubling_functional_scale_invariance():
    """(alpha t)^(1/alpha) sup e^{t Lap} mu|x|^(-2/alpha) is t-independent."""
    fld = H.RadialField.pure_power(1.0, 1.0)
    dom = H.whole_space(3)
    vals = [H.doubling_functional(dom, fld, 2.0, t)
            for t in (1e-5, 1e-3, 1e-1)]
    assert max(vals) - min(vals) < 1e-9


def test_nonexistence_verdict_threshold():
    dom = H.whole_space(3)
    mu0 = H.mu0_threshold(3, 2.0)
    hot = H.RadialField.pure_power(1.1 * mu0, 1.0)
    cold = H.RadialField.pure_power(0.9 * mu0, 1.0)
    t_grid = H.default_t_grid()
    assert H.nonexistence_verdict(dom, hot, 2.0, t_grid).outcome \
        == H.NO_SOLUTION
    assert H.nonexistence_verdict(dom, cold, 2.0, t_grid).outcome \
        == H.NOT_VIOLATED
    exact = H.RadialField.pure_power(mu0, 1.0)
    with pytest.raises(Inconclusive):
        H.nonexistence_verdict(dom, exact, 2.0, t_grid)


def test_fr3_classifier_cases():
    cond, v = H.fr3_classifier(3, 1.0, 3.0, 0.1)
    assert cond == "b1" and v.outcome == H.NO_SOLUTION
    cond, v = H.fr3_classifier(3, 2.0, 2.5, 0.1)
    assert cond == "b2" and v.outcome == H.NO_SOLUTION
    cond, v = H.fr3_classifier(3, 2.0, 1.0, 1.3)
    assert cond == "b3" and v.outcome == H.NO_SOLUTION
    cond, v = H.fr3_classifier(3, 2.0, 1.0, 0.5)
    assert cond == "none" and v.outcome == H.NOT_VIOLATED


def test_not_integrable_data_rejected():
    fld = H.RadialField.pure_power(1.0, 3.0)  # gamma >= N
    with pytest.raises(NotIntegrable):
        H.heat_eval(H.whole_space(3), fld, 0.1, np.array([0.0]))


# ---------------------------------------------------------------------------
# Duhamel and comparison


def test_duhamel_constant_forcing():
    """int_0^t e^{(t-s)Lap} c ds = c t on the whole space."""
    dom = H.whole_space(3)
    grid = np.linspace(0.0, 3.0, 80)

    def forcing(s):
        return H.RadialField(grid, np.full_like(grid, 2.0),
                             farfield=H.ff_constant(2.0))

    t = 0.07
    out = H.duhamel(dom, forcing, t, out_grid=np.linspace(0.0, 1.0, 9))
    assert np.max(np.abs(out.bounded_values - 2.0 * t)) < 1e-9


def test_duhamel_linear_in_time_forcing():
    """Spatially constant forcing s -> s integrates to t^2/2."""
    dom = H.whole_space(2)
    grid = np.linspace(0.0, 3.0, 80)

    def forcing(s):
        return H.RadialField(grid, np.full_like(grid, s),
                             farfield=H.ff_constant(s))

    t = 0.3
    out = H.duhamel(dom, forcing, t, out_grid=np.linspace(0.0, 1.0, 5))
    assert np.max(np.abs(out.bounded_values - t * t / 2.0)) < 1e-8


def test_ball_comparison_margins_nonnegative():
    rep = H.ball_comparison_check(1.0, 0.5, np.geomspace(1e-3, 0.25, 5),
                                  np.linspace(0.0, 0.5, 21))
    assert rep["min_margin"] >= -1e-9
    assert rep["min_floor_margin"] >= -1e-9


# ---------------------------------------------------------------------------
# propagator matrices


def test_propagator_preserves_positivity_and_bound():
    grid = np.linspace(0.0, 2.0, 120)
    for dom in (H.whole_space(3), H.ball(3, 2.0)):
        P = H.propagator_matrix(dom, 0.01, grid)
        assert np.all(P >= -1e-15)
        row_sums = P @ np.ones(len(grid))
        assert np.all(row_sums <= 1.0 + 1e-9)


def test_propagator_matches_direct_evaluation():
    grid = np.linspace(0.0, 4.0, 200)
    vals = np.exp(-grid ** 2)
    fld = H.RadialField(grid, vals, farfield=H.FF_ZERO)
    dom = H.whole_space(3)
    t = 0.02
    direct = H.heat_eval(dom, fld, t, grid)
    stepped = H.propagator_matrix(dom, t, grid) @ vals
    assert np.max(np.abs(direct - stepped)[grid < 3.0]) < 2e-4
