"""Shared fixtures: expensive objects are built once per session."""

import numpy as np
import pytest

from singheat import cutoffs, heatops, perturb, profile, scenarios


@pytest.fixture(scope="session")
def curve05():
    """Reference profile curve at shooting value a = 0.5 (N=3, alpha=1)."""
    return profile.integrate_profile(profile.ProfileSpec(3, 1.0, 0.5),
                                     40.0, 1e-8)


@pytest.fixture(scope="session")
def summary05(curve05):
    return profile.summarize_profile(curve05)


@pytest.fixture(scope="session")
def cert05(curve05, summary05):
    return profile.verify_selfsimilar_bounds(curve05, summary05)


@pytest.fixture(scope="session")
def ws_problem(curve05, summary05, cert05):
    """Standard whole-space perturbation problem around the a=0.5 profile."""
    delta = 0.3
    w0 = scenarios.shifted_tail_data(summary05.mu, 1.0, delta, r_end=2.0)
    bundle = cutoffs.calibrate_bundle(1.0, cert05["C1"], {"w2inf": 1.0},
                                      w0.sup_bounded(), delta, dim=3, m=4)
    return perturb.PerturbationProblem(heatops.whole_space(3), w0, bundle,
                                       background=(curve05, summary05))


@pytest.fixture(scope="session")
def ws_solution(ws_problem):
    w, report = perturb.solve_fixed_point(ws_problem)
    return w, report
