"""Numerical laboratory for semilinear heat flow from singular initial data.

Modules:
    profile   -- self-similar profile ODE shooting and far-field extraction
    heatops   -- radial heat semigroups, Duhamel integrals, nonexistence
    cutoffs   -- dyadic cutoff families, envelopes, constants calibration
    perturb   -- weighted contraction-mapping fixed point for perturbations
    scenarios -- CLI orchestration of end-to-end experiments
"""

from . import cutoffs, errors, heatops, perturb, profile, quadrature, scenarios
from .cutoffs import (ConstantsBundle, CutoffFamily, EnvelopeTheta,
                      SmoothStep, calibrate_bundle, constants_assemble,
                      verify_smoothing)
from .errors import SingheatError
from .heatops import (DomainSpec, RadialField, Verdict, ball,
                      ball_comparison_check, doubling_functional, duhamel,
                      fr3_classifier, heat_apply, heat_eval, mu0_threshold,
                      nonexistence_verdict, power_moment, whole_space)
from .perturb import (FixedPointReport, PerturbationProblem, RadialCutoff,
                      SpaceTimeField, assemble_u, contraction_probe,
                      residual_order, separation_ratio, solve_fixed_point)
from .profile import (ProfileCurve, ProfileSpec, ProfileSummary,
                      find_profiles, integrate_profile, summarize_profile,
                      verify_selfsimilar_bounds)
from .scenarios import main

__version__ = "0.1.0"

__all__ = [
    "ConstantsBundle", "CutoffFamily", "DomainSpec", "EnvelopeTheta",
    "FixedPointReport", "PerturbationProblem", "ProfileCurve", "ProfileSpec",
    "ProfileSummary", "RadialCutoff", "RadialField", "SingheatError",
    "SmoothStep", "SpaceTimeField", "Verdict", "assemble_u", "ball",
    "ball_comparison_check", "calibrate_bundle", "constants_assemble",
    "contraction_probe", "cutoffs", "doubling_functional", "duhamel",
    "errors", "find_profiles", "fr3_classifier", "heat_apply", "heat_eval",
    "integrate_profile", "main", "mu0_threshold", "nonexistence_verdict",
    "perturb", "power_moment", "profile", "quadrature", "residual_order",
    "scenarios", "separation_ratio", "solve_fixed_point",
    "summarize_profile", "verify_selfsimilar_bounds", "whole_space",
]
