"""Acceptance criteria: one printed PASS/FAIL line per criterion.

Each test measures its own wall time against the stated budget and pins
the shipped tolerances.  The heavy fixed-point objects are shared through
session fixtures; the end-to-end scenario criteria run the CLI commands
into temporary directories.
"""

import json
import math
import time

import numpy as np

from singheat import cutoffs, heatops, perturb, profile, scenarios


def _verdict(num, name, ok, elapsed, budget):
    line = (f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {name} "
            f"({elapsed:.1f}s of {budget:.0f}s budget)")
    print(line)
    assert ok, line
    assert elapsed < budget, line


def test_criterion_01_gamma_moment_oracle():
    start = time.time()
    worst = 0.0
    for N in (1, 2, 3, 4):
        k = 1
        while 0.25 * k < N:
            g = 0.25 * k
            got = heatops.power_moment(N, g)
            want = (2.0 ** -g * math.gamma((N - g) / 2.0)
                    / math.gamma(N / 2.0))
            worst = max(worst, abs(got - want) / want)
            k += 1
    _verdict(1, f"Gamma-moment oracle, max rel err {worst:.2e} <= 1e-8",
             worst <= 1e-8, time.time() - start, 5.0)


def test_criterion_02_scaling_invariance():
    start = time.time()
    gamma = 1.0
    fld = heatops.RadialField.pure_power(1.0, gamma)
    dom = heatops.whole_space(3)
    vals = [t ** (gamma / 2.0)
            * heatops.heat_eval(dom, fld, t, np.array([0.0]))[0]
            for t in np.geomspace(1e-6, 1e-1, 6)]
    spread = max(vals) - min(vals)
    _verdict(2, f"scaling invariance, spread {spread:.2e} <= 1e-6",
             spread <= 1e-6, time.time() - start, 10.0)


def test_criterion_03_threshold_boundary():
    start = time.time()
    dom = heatops.whole_space(3)
    mu0 = heatops.mu0_threshold(3, 2.0)
    ok = True
    for off, want in ((1.01, heatops.NO_SOLUTION),
                      (0.99, heatops.NOT_VIOLATED)):
        fld = heatops.RadialField.pure_power(off * mu0, 1.0)
        v = heatops.nonexistence_verdict(dom, fld, 2.0,
                                         heatops.default_t_grid())
        ok = ok and v.outcome == want
        ok = ok and abs(v.functional_value - off) <= 1e-4
    _verdict(3, "threshold boundary verdicts and functional values",
             ok, time.time() - start, 10.0)


def test_criterion_04_profile_integrity():
    start = time.time()
    ok = True
    # zero curve
    z = profile.integrate_profile(profile.ProfileSpec(3, 1.0, 0.0),
                                  10.0, 1e-8)
    ok = ok and np.all(z.f_values == 0.0)
    # odd symmetry
    pos = profile.integrate_profile(profile.ProfileSpec(3, 1.0, 0.5),
                                    20.0, 1e-8)
    neg = profile.integrate_profile(profile.ProfileSpec(3, 1.0, -0.5),
                                    20.0, 1e-8)
    ok = ok and np.max(np.abs(pos.f_values + neg.f_values)) < 1e-9
    # residual and mu stability under r_max doubling
    for a in (0.25, 0.5, 1.0):
        c30 = profile.integrate_profile(profile.ProfileSpec(3, 1.0, a),
                                        30.0, 1e-8)
        c60 = profile.integrate_profile(profile.ProfileSpec(3, 1.0, a),
                                        60.0, 1e-8)
        ok = ok and profile.residual(c30) <= 1e-8
        mu30 = profile.summarize_profile(c30).mu
        mu60 = profile.summarize_profile(c60).mu
        ok = ok and abs(mu60 - mu30) <= 1e-4
    _verdict(4, "profile integrity (residual, zero curve, symmetry, mu)",
             ok, time.time() - start, 30.0)


def test_criterion_05_branch_multiplicity():
    start = time.time()
    mu = 0.3
    roots0 = profile.find_profiles(3, 1.0, mu, 0, (0.05, 1.6))
    roots1 = profile.find_profiles(3, 1.0, mu, 1, (-2.6, -1.6))
    ok = len(roots0) >= 1 and len(roots1) >= 1
    for zeros, root in ((0, roots0[0]), (1, roots1[0])):
        s = profile.summarize_profile(profile.integrate_profile(
            profile.ProfileSpec(3, 1.0, root), 30.0, 1e-8))
        ok = ok and s.zero_count == zeros and abs(s.mu - mu) < 1e-3
    ok = ok and abs(roots0[0] - roots1[0]) > 1e-3
    _verdict(5, f"branch multiplicity at mu={mu} (counts 0 and 1)",
             ok, time.time() - start, 120.0)


def test_criterion_06_smoothing_inequalities():
    start = time.time()
    fam = cutoffs.CutoffFamily(1.0, 4)
    margins = cutoffs.verify_smoothing(
        fam, 4, np.geomspace(1e-3, 1.0, 8), np.linspace(0.0, 4.0, 161),
        dim=1)
    ok = all(margins[k] >= -1e-8 for k in ("a", "b", "c"))
    _verdict(6, f"smoothing margins {margins}", ok,
             time.time() - start, 60.0)


def test_criterion_07_comparison():
    start = time.time()
    rep = heatops.ball_comparison_check(
        1.0, 0.5, np.geomspace(1e-3, 0.25, 6), np.linspace(0.0, 0.5, 41))
    ok = rep["min_margin"] >= -1e-9 and rep["min_floor_margin"] >= -1e-9
    _verdict(7, f"comparison margin {rep['min_margin']:.2e}", ok,
             time.time() - start, 30.0)


def test_criterion_08_contraction(ws_problem, ws_solution):
    start = time.time()
    w, report = ws_solution
    factors = perturb.contraction_probe(ws_problem, n_pairs=20, seed=0)
    ok = max(factors) <= 0.80
    ok = ok and report.converged and report.iterations <= 60
    ok = ok and report.dists[-1] <= 1e-8
    ok = ok and all(d2 < d1 for d1, d2 in zip(report.dists,
                                              report.dists[1:]))
    ok = ok and report.envelope_margin >= -10.0 * report.quad_err
    _verdict(8, f"contraction, max factor {max(factors):.3f} <= 0.80",
             ok, time.time() - start, 300.0)


def test_criterion_09_initial_trace(ws_problem, ws_solution):
    start = time.time()
    w, _ = ws_solution
    stab = perturb.trace_decade_stability(ws_problem, w)
    ok = stab["variation"] <= 2.0
    _verdict(9, f"initial trace variation {stab['variation']:.3f} <= 2",
             ok, time.time() - start, 60.0)


def test_criterion_10_residual_order(ws_problem, ws_solution):
    start = time.time()
    w, _ = ws_solution
    u = perturb.assemble_u(ws_problem, w)
    order = perturb.residual_order(ws_problem, u)
    _verdict(10, f"residual refinement order {order:.2f} >= 1.8",
             order >= 1.8, time.time() - start, 300.0)


def test_criterion_11_nonuniqueness_separation(tmp_path):
    start = time.time()
    cfg_path = tmp_path / "nonunique.json"
    cfg_path.write_text(json.dumps({"mu": 0.3}))
    out = tmp_path / "out"
    code = scenarios.main(["nonunique", "--config", str(cfg_path),
                           "--out", str(out)])
    rec = json.loads((out / "record.json").read_text())
    ratio = rec["data"]["separation"]["ratio"]
    ok = code == 0 and 0.95 <= ratio <= 1.05
    _verdict(11, f"nonuniqueness separation ratio {ratio:.4f}",
             ok, time.time() - start, 600.0)


def test_criterion_12_dirichlet_ball(tmp_path):
    start = time.time()
    cfg_path = tmp_path / "ball.json"
    cfg_path.write_text(json.dumps({"a": 0.5}))
    out = tmp_path / "out"
    code = scenarios.main(["ball", "--config", str(cfg_path),
                           "--out", str(out)])
    rec = json.loads((out / "record.json").read_text())
    checks = {c["name"]: c for c in rec["checks"]}
    ok = (code == 0
          and checks["boundary_sup"]["passed"]
          and checks["near_origin_match"]["passed"])
    _verdict(12, f"Dirichlet ball run, boundary sup "
                 f"{rec['data']['boundary_sup']:.2e}",
             ok, time.time() - start, 600.0)
