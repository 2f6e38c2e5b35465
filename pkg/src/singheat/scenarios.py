"""Command-line scenario runner.

Each subcommand reproduces one end-to-end numerical experiment: profile
shooting, the pure-power amplitude threshold, nonexistence classification,
a single perturbation fixed-point run, the two-branch nonuniqueness
diagnostic, the Dirichlet-ball variant, and the full verification suite.

Runs are configured by a single JSON document (unknown keys rejected),
produce `record.json`, CSV slices, and `certificate.json` in the output
directory, and are deterministic given (config, seed).

Exit codes: 0 = all checks pass, 2 = inconclusive present, 3 = failure
present, 4 = config error.
"""

import argparse
import copy
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import cutoffs, heatops, perturb, profile
from .errors import (ConfigError, GateViolation, Inconclusive, NoBracket,
                     SeparationNotResolved, SingheatError)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

# ---------------------------------------------------------------------------
# configuration


DEFAULTS = {
    "profile": {
        "N": 3, "alpha": 1.0, "a": 0.5, "r_max": 30.0, "tol": 1e-8,
    },
    "threshold": {
        "N": 3, "alpha": 2.0, "probe_offsets": [1.01, 0.99],
        "value_tol": 1e-4,
    },
    "nonexist": {
        "N": 3, "alpha": 2.0, "gamma": 1.0, "mu": 1.3,
    },
    "perturb": {
        "N": 3, "alpha": 1.0, "a": 0.5, "delta": 0.3, "m": 4,
        "refine": 1, "probe_pairs": 20, "tol": 1e-8,
    },
    "nonunique": {
        "N": 3, "alpha": 1.0, "mu": 0.3, "delta": 0.3,
        "zero_counts": [0, 1],
        "windows": [[0.05, 1.6], [-2.6, -1.6]],
        "refine": 1, "tol": 1e-8,
    },
    "ball": {
        "N": 3, "alpha": 1.0, "a": 0.5, "delta": 0.3, "R": 1.0,
        "psi": [0.45, 0.85], "m": 4, "refine": 1, "tol": 1e-8,
    },
    "verify": {
        "probe_pairs": 20, "corrupt": None,
    },
}

COMMON_KEYS = {"output_dir", "seed"}


def load_config(command, path, out_override=None, seed_override=None):
    """Merge the JSON config at `path` with defaults; fail closed."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    allowed = set(DEFAULTS[command]) | COMMON_KEYS
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(
            f"unknown config keys for '{command}': {sorted(unknown)}")
    cfg = copy.deepcopy(DEFAULTS[command])
    cfg["output_dir"] = "out"
    cfg["seed"] = 0
    cfg.update(doc)
    if out_override is not None:
        cfg["output_dir"] = out_override
    if seed_override is not None:
        cfg["seed"] = seed_override
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer")
    _validate_ranges(command, cfg)
    return cfg


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _validate_ranges(command, cfg):
    if "N" in cfg:
        _require(isinstance(cfg["N"], int) and cfg["N"] >= 1,
                 "N must be a positive integer")
    if "alpha" in cfg:
        _require(cfg["alpha"] > 0, "alpha must be positive")
    if "N" in cfg and "alpha" in cfg and command in (
            "profile", "perturb", "nonunique", "ball"):
        if (cfg["N"] - 2) * cfg["alpha"] >= 4:
            raise ConfigError(
                f"supercritical pair: (N-2)*alpha = "
                f"{(cfg['N'] - 2) * cfg['alpha']} >= 4")
    if "delta" in cfg:
        _require(cfg["delta"] > 0, "delta must be positive")
    if "tol" in cfg:
        _require(0 < cfg["tol"] <= 1e-2, "tol must lie in (0, 1e-2]")
    if command == "ball":
        _require(cfg["R"] > 0, "R must be positive")
        _require(cfg["delta"] < cfg["R"], "need delta < R")
        psi = cfg["psi"]
        _require(isinstance(psi, (list, tuple)) and len(psi) == 2
                 and 0 < psi[0] < psi[1] < cfg["R"],
                 "psi must be [r0, r1] with 0 < r0 < r1 < R")
        _require(psi[0] >= cfg["delta"],
                 "psi must be identically 1 on {|x| < delta}: need r0 >= "
                 "delta")
    if command == "nonexist":
        _require(cfg["gamma"] > 0 and cfg["mu"] > 0,
                 "gamma and mu must be positive")
    if command == "nonunique":
        zc = cfg["zero_counts"]
        _require(isinstance(zc, list) and all(
            isinstance(z, int) and z >= 0 for z in zc),
            "zero_counts must be a list of nonnegative integers")
        _require(len(cfg["windows"]) == len(zc),
                 "windows must pair up with zero_counts")
        _require(cfg["mu"] >= 0, "mu must be nonnegative")
    if command == "verify":
        _require(cfg["corrupt"] in (None, "inflate_T"),
                 "corrupt must be null or 'inflate_T'")


# ---------------------------------------------------------------------------
# record plumbing


def _to_builtin(x):
    if isinstance(x, dict):
        return {k: _to_builtin(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_builtin(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_to_builtin(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def input_hash(command, cfg):
    doc = {k: v for k, v in cfg.items() if k != "output_dir"}
    blob = json.dumps({"command": command, "config": _to_builtin(doc)},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class Record:
    """Accumulates checks, data, and artifact names for one run."""

    def __init__(self, command, cfg):
        self.command = command
        self.cfg = cfg
        self.hash = input_hash(command, cfg)
        self.checks = []
        self.data = {}
        self.files = []
        self.out = Path(cfg["output_dir"])
        self.out.mkdir(parents=True, exist_ok=True)

    def check(self, name, value, threshold, op, source):
        """Record one margin check.  op: 'le' | 'ge'."""
        value = float(value)
        if op == "le":
            passed = value <= threshold
        elif op == "ge":
            passed = value >= threshold
        else:
            raise ValueError(f"unknown op {op!r}")
        self.checks.append({"name": name, "value": value,
                            "threshold": float(threshold), "op": op,
                            "passed": bool(passed), "source": source})
        return passed

    def flag(self, name, passed, note, source):
        self.checks.append({"name": name, "value": None, "threshold": None,
                            "op": "flag", "passed": bool(passed),
                            "note": note, "source": source})
        return passed

    def csv(self, name, header, columns):
        """Write a CSV artifact: '.' decimal, '\\n' line ends, header row 1."""
        cols = [np.asarray(c) for c in columns]
        path = self.out / name
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*cols):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        self.files.append(name)
        return path

    @property
    def verdict(self):
        if any(c.get("inconclusive") for c in self.checks):
            return INCONCLUSIVE
        return PASS if all(c["passed"] for c in self.checks) else FAIL

    def mark_inconclusive(self, name, note, source):
        self.checks.append({"name": name, "value": None, "threshold": None,
                            "op": "flag", "passed": False,
                            "inconclusive": True, "note": note,
                            "source": source})

    def write(self):
        rec = {"command": self.command,
               "config": _to_builtin(
                   {k: v for k, v in self.cfg.items()
                    if k != "output_dir"}),
               "input_hash": self.hash,
               "checks": _to_builtin(self.checks),
               "data": _to_builtin(self.data),
               "files": sorted(self.files + ["record.json",
                                             "certificate.json"]),
               "verdict": self.verdict}
        with open(self.out / "record.json", "w") as fh:
            json.dump(rec, fh, indent=2, sort_keys=True)
            fh.write("\n")
        cert = {"command": self.command,
                "input_hash": self.hash,
                "checks": [{"name": c["name"], "passed": c["passed"],
                            "margin": c.get("value")}
                           for c in self.checks],
                "overall": self.verdict}
        with open(self.out / "certificate.json", "w") as fh:
            json.dump(cert, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return rec

    @property
    def exit_code(self):
        return {PASS: 0, INCONCLUSIVE: 2, FAIL: 3}[self.verdict]


# ---------------------------------------------------------------------------
# shared builders


def shifted_tail_data(mu, alpha, delta, r_end):
    """Bounded shifted data: the pure-power core is continued past ~1.5*delta
    by a smooth cut, plus a unit bump supported in {delta < r < 3*delta}.

    This encodes initial data u0 = mu*r^(-2/alpha) near the origin with a
    bounded tail; the returned field is u0 minus the global pure power, so
    it vanishes for r <= delta and tends to -mu*r^(-2/alpha) far out.
    """
    step = cutoffs.SmoothStep()

    def fn(r):
        r = np.asarray(r, dtype=float)
        rr = np.where(r > 0.0, r, 1.0)
        cut = step(r / (1.5 * delta))
        bump = step(r / delta) * (1.0 - step(r / (1.5 * delta)))
        out = -mu * rr ** (-2.0 / alpha) * cut + bump
        return np.where(r <= delta, 0.0, out)

    hi = max(r_end, 4.0 * delta) + 1.0
    grid = np.linspace(0.0, hi, 1601)
    return heatops.RadialField(grid, fn(grid),
                               farfield=heatops.ff_power(-mu, 2.0 / alpha))


def ball_shifted_data(mu, alpha, psi_cut, R):
    """Shifted data on the ball: mu*r^(-2/alpha) * (1 - Psi(r))."""
    grid = np.linspace(0.0, R, 1601)
    rr = np.where(grid > 0.0, grid, 1.0)
    vals = np.where(grid > 0.0,
                    mu * rr ** (-2.0 / alpha) * (1.0 - psi_cut(grid)),
                    0.0)
    return heatops.RadialField(grid, vals, farfield=heatops.FF_ZERO)


def background_for(N, alpha, a, r_max=40.0, tol=1e-8):
    """Profile curve, summary, and growth certificate for shooting value a."""
    curve = profile.integrate_profile(profile.ProfileSpec(N, alpha, a),
                                      r_max, tol)
    summary = profile.summarize_profile(curve)
    cert = profile.verify_selfsimilar_bounds(curve, summary)
    return curve, summary, cert


def envelope_order_for(alpha, f0_values, base_m=4, target=0.7):
    """Smallest even envelope order keeping the origin-corner contraction
    factor 2*(alpha+1)*|f(0)|^alpha / m at or below `target`."""
    worst = max(abs(f) ** alpha for f in f0_values)
    need = 2.0 * (alpha + 1.0) * worst / target
    m = max(base_m, 2 * int(math.ceil(need / 2.0)))
    return m


def run_fixed_point(record, tag, domain, w0, bundle, background, psi_cut,
                    refine, tol):
    """Solve one fixed-point problem, persist its slices, and record the
    standard convergence/envelope checks.  Returns (problem, w, report, u)."""
    prob = perturb.PerturbationProblem(domain, w0, bundle,
                                       background=background, psi=psi_cut,
                                       refine=refine)
    w, report = perturb.solve_fixed_point(prob, tol=tol)
    u = perturb.assemble_u(prob, w)

    slices = f"{tag}_slices.csv"
    nt, nr = len(prob.t_grid), len(prob.r_grid)
    tt = np.repeat(prob.t_grid, nr)
    rr = np.tile(prob.r_grid, nt)
    res = np.full((nt, nr), np.nan)
    ks, good = perturb._residual_nodes(prob, 1, max(4.0 * prob.t_grid[0],
                                                    0.25 * prob.t_grid[-1]))
    for k in ks:
        for i in good:
            res[k, i] = perturb._residual_at(prob, u, k, i, 1)
    record.csv(slices, ["t", "r", "U", "w", "u", "Theta", "residual"],
               [tt, rr, prob.U.ravel(), w.values.ravel(), u.values.ravel(),
                prob.theta.ravel(), res.ravel()])

    record.data[f"{tag}_report"] = report.to_json()
    record.data[f"{tag}_bundle"] = bundle.to_json()
    record.check(f"{tag}_converged", 1.0 if report.converged else 0.0,
                 1.0, "ge", f"{tag}: fixed-point iteration")
    record.check(f"{tag}_envelope_margin", report.envelope_margin,
                 -10.0 * max(report.quad_err, 1e-14), "ge",
                 f"{tag}: min over {slices} of Theta - |w|")
    return prob, w, report, u


# ---------------------------------------------------------------------------
# commands


def cmd_profile(cfg):
    record = Record("profile", cfg)
    curve = profile.integrate_profile(
        profile.ProfileSpec(cfg["N"], cfg["alpha"], cfg["a"]),
        cfg["r_max"], cfg["tol"])
    summary = profile.summarize_profile(curve)
    cert = profile.verify_selfsimilar_bounds(curve, summary)
    res = profile.residual(curve)
    profile.curve_to_csv(curve, record.out / "profile.csv")
    record.files.append("profile.csv")
    record.data["summary"] = summary.to_json()
    record.data["C1"] = cert["C1"]
    record.data["zero_radii"] = list(curve.zero_radii)
    record.check("ode_residual", res, 100.0 * cfg["tol"], "le",
                 "max interior finite-difference residual of profile.csv")
    record.check("mu_uncertainty", summary.mu_uncertainty, 1e-3, "le",
                 "spread of far-field fits over half windows")
    return record


def cmd_threshold(cfg):
    record = Record("threshold", cfg)
    N, alpha = cfg["N"], cfg["alpha"]
    if alpha <= 2.0 / N:
        raise ConfigError(
            f"threshold requires alpha > 2/N (got alpha={alpha}, N={N})")
    mu0 = heatops.mu0_threshold(N, alpha)
    moment = heatops.power_moment(N, 2.0 / alpha)
    record.data["mu0"] = mu0
    record.data["power_moment"] = moment
    rows = []
    dom = heatops.whole_space(N)
    for off in cfg["probe_offsets"]:
        fld = heatops.RadialField.pure_power(off * mu0, 2.0 / alpha)
        try:
            v = heatops.nonexistence_verdict(dom, fld, alpha,
                                             heatops.default_t_grid())
            outcome, fval = v.outcome, v.functional_value
        except Inconclusive as e:
            record.mark_inconclusive(
                f"verdict_at_{off}", str(e), "doubling functional scan")
            continue
        rows.append((off, fval, outcome))
        want = (heatops.NO_SOLUTION if off > 1.0 else heatops.NOT_VIOLATED)
        record.flag(f"verdict_at_{off}", outcome == want,
                    f"expected {want}, got {outcome}",
                    "doubling functional scan over default t grid")
        record.check(f"functional_at_{off}", abs(fval - off),
                     cfg["value_tol"], "le",
                     "peak doubling functional vs amplitude ratio")
    record.csv("threshold.csv", ["offset", "functional", "no_solution"],
               [[r[0] for r in rows], [r[1] for r in rows],
                [1.0 if r[2] == heatops.NO_SOLUTION else 0.0 for r in rows]])
    return record


def cmd_nonexist(cfg):
    record = Record("nonexist", cfg)
    N, alpha, gamma, mu = cfg["N"], cfg["alpha"], cfg["gamma"], cfg["mu"]
    cond, verdict = heatops.fr3_classifier(N, alpha, gamma, mu)
    record.data["condition"] = cond
    record.data["classifier_verdict"] = verdict.to_json()
    two_over_alpha = 2.0 / alpha
    if alpha > 2.0 / N:
        record.data["mu0"] = heatops.mu0_threshold(N, alpha)
    crossable = (gamma < N
                 and abs(gamma - two_over_alpha) <= 1e-12 * two_over_alpha)
    if crossable:
        fld = heatops.RadialField.pure_power(mu, gamma)
        try:
            qv = heatops.nonexistence_verdict(
                heatops.whole_space(N), fld, alpha,
                heatops.default_t_grid())
        except Inconclusive as e:
            record.mark_inconclusive("quadrature_verdict", str(e),
                                     "doubling functional scan")
            return record
        record.data["quadrature_verdict"] = qv.to_json()
        record.flag("verdict_agreement", qv.outcome == verdict.outcome,
                    f"classifier {verdict.outcome} vs quadrature "
                    f"{qv.outcome}",
                    "closed-form condition vs doubling functional scan")
    else:
        record.flag("classifier_only", True,
                    "quadrature cross-check needs gamma = 2/alpha < N",
                    "classifier")
    return record


def cmd_perturb(cfg):
    record = Record("perturb", cfg)
    N, alpha = cfg["N"], cfg["alpha"]
    curve, summary, cert = background_for(N, alpha, cfg["a"], tol=cfg["tol"])
    record.data["profile_summary"] = summary.to_json()
    w0 = shifted_tail_data(summary.mu, alpha, cfg["delta"],
                           r_end=max(2.0, 4.0 * cfg["delta"]))
    m = envelope_order_for(alpha, [summary.f0], base_m=cfg["m"])
    bundle = cutoffs.calibrate_bundle(alpha, cert["C1"], {"w2inf": 1.0},
                                      w0.sup_bounded(), cfg["delta"],
                                      dim=N, m=m)
    prob, w, report, u = run_fixed_point(
        record, "run", heatops.whole_space(N), w0, bundle,
        (curve, summary), None, cfg["refine"], cfg["tol"])

    factors = perturb.contraction_probe(prob, n_pairs=cfg["probe_pairs"],
                                        seed=cfg["seed"])
    record.data["contraction_factors"] = factors
    record.check("contraction_factor", max(factors), 0.80, "le",
                 f"{cfg['probe_pairs']} random envelope-bounded pairs, "
                 f"seed {cfg['seed']}")
    trace = perturb.trace_decade_stability(prob, w)
    record.data["trace"] = trace
    record.check("trace_variation", trace["variation"], 2.0, "le",
                 "initial-trace constants over the two smallest t-decades")
    order = perturb.residual_order(prob, u)
    record.check("residual_order", order, 1.8, "ge",
                 "stride-1 vs stride-2 finite-difference residual")
    return record


def cmd_nonunique(cfg):
    record = Record("nonunique", cfg)
    N, alpha, mu, delta = cfg["N"], cfg["alpha"], cfg["mu"], cfg["delta"]
    counts = cfg["zero_counts"]
    if len(counts) < 2:
        record.flag("branch_multiplicity", False,
                    "nonuniqueness requires at least 2 zero-count branches",
                    "config guard")
        return record

    branches = []
    for zc, window in zip(counts, cfg["windows"]):
        roots = profile.find_profiles(N, alpha, mu, zc, window)
        a = roots[0]
        curve, summary, cert = background_for(N, alpha, a, tol=cfg["tol"])
        branches.append({"a": a, "curve": curve, "summary": summary,
                         "C1": cert["C1"]})
        record.data[f"branch_{zc}"] = {"a": a, "all_roots": roots,
                                       **summary.to_json(),
                                       "C1": cert["C1"]}
    record.flag("branch_multiplicity", True,
                f"{len(branches)} branches at shared mu", "profile search")

    # both branches perturb the same initial data, so they share one
    # constants bundle built from the worst-case profile growth
    w0 = shifted_tail_data(mu, alpha, delta, r_end=max(2.0, 4.0 * delta))
    m = envelope_order_for(alpha, [b["summary"].f0 for b in branches])
    C1 = max(b["C1"] for b in branches)
    bundle = cutoffs.calibrate_bundle(alpha, C1, {"w2inf": 1.0},
                                      w0.sup_bounded(), delta, dim=N, m=m)
    dom = heatops.whole_space(N)
    runs = []
    for b in branches:
        zc = b["summary"].zero_count
        prob, w, report, u = run_fixed_point(
            record, f"branch{zc}", dom, w0, bundle,
            (b["curve"], b["summary"]), None, cfg["refine"], cfg["tol"])
        runs.append({"prob": prob, "w": w, "u": u,
                     "f0": b["summary"].f0})

    pa, pb = runs[0], runs[1]
    t = pa["prob"].t_grid
    target = abs(pa["f0"] - pb["f0"])
    sep = (t ** (1.0 / alpha)
           * np.abs(pa["u"].values[:, 0] - pb["u"].values[:, 0]))
    record.csv("separation.csv", ["t", "separation", "target"],
               [t, sep, np.full_like(t, target)])
    ratio = perturb.separation_ratio(pa["prob"], pa["w"], pa["f0"],
                                     pb["prob"], pb["w"], pb["f0"])
    record.data["separation"] = {"ratio": ratio, "target": target,
                                 "t_smallest": float(t[0])}
    record.check("separation_ratio_low", ratio, 0.95, "ge",
                 "separation.csv at smallest t vs |f1(0) - f2(0)|")
    record.check("separation_ratio_high", ratio, 1.05, "le",
                 "separation.csv at smallest t vs |f1(0) - f2(0)|")
    if not (0.9 <= ratio <= 1.1):
        raise SeparationNotResolved(
            f"separation ratio {ratio} outside [0.9, 1.1] at t={t[0]}")
    return record


def cmd_ball(cfg):
    record = Record("ball", cfg)
    N, alpha, R = cfg["N"], cfg["alpha"], cfg["R"]
    psi_cut = perturb.RadialCutoff(cfg["psi"][0], cfg["psi"][1])
    curve, summary, cert = background_for(N, alpha, cfg["a"], tol=cfg["tol"])
    record.data["profile_summary"] = summary.to_json()
    w0 = ball_shifted_data(summary.mu, alpha, psi_cut, R)
    m = envelope_order_for(alpha, [summary.f0], base_m=cfg["m"])
    bundle = cutoffs.calibrate_bundle(
        alpha, cert["C1"], {"w2inf": psi_cut.w2inf()},
        w0.sup_bounded(), cfg["delta"], dim=N, m=m)
    prob, w, report, u = run_fixed_point(
        record, "run", heatops.ball(N, R), w0, bundle,
        (curve, summary), psi_cut, cfg["refine"], cfg["tol"])

    boundary = float(np.max(np.abs(u.values[:, -1])))
    record.data["boundary_sup"] = boundary
    record.check("boundary_sup", boundary, cfg["tol"], "le",
                 "last radial column of run_slices.csv")

    a_edge = cfg["delta"] * 2.0 ** (-bundle.m)
    mask = prob.r_grid <= a_edge
    dev = np.abs(u.values[:, mask] - prob.U[:, mask])
    bound = (bundle.K * prob.t_grid ** (bundle.m / 2.0)
             + 10.0 * max(report.quad_err, 1e-14))
    margin = float(np.min(bound[:, None] - dev))
    record.data["near_origin_margin"] = margin
    record.check("near_origin_match", margin, 0.0, "ge",
                 "run_slices.csv nodes with r <= delta*2^-m: "
                 "K*t^(m/2) + slack - |u - U|")
    return record


def cmd_verify(cfg):
    record = Record("verify", cfg)
    seed = cfg["seed"]

    # Gaussian power moments vs the closed Gamma-function form
    worst = 0.0
    for N in (1, 2, 3, 4):
        for k in range(1, 4 * N):
            g = 0.25 * k
            got = heatops.power_moment(N, g)
            want = (2.0 ** -g * math.gamma((N - g) / 2.0)
                    / math.gamma(N / 2.0))
            worst = max(worst, abs(got - want) / want)
    record.check("gamma_moment_rel_err", worst, 1e-8, "le",
                 "power_moment vs closed form on (N, gamma) grid")

    # scaling invariance of the smoothed pure power at the origin
    fld = heatops.RadialField.pure_power(1.0, 1.0)
    dom = heatops.whole_space(3)
    vals = [t ** 0.5 * heatops.heat_eval(dom, fld, t, np.array([0.0]))[0]
            for t in np.geomspace(1e-6, 1e-1, 6)]
    record.check("scaling_variation", max(vals) - min(vals), 1e-6, "le",
                 "t^(gamma/2) e^{t Lap}|x|^-gamma at 0 over 5 decades")

    # threshold boundary
    mu0 = heatops.mu0_threshold(3, 2.0)
    for off in (1.01, 0.99):
        f = heatops.RadialField.pure_power(off * mu0, 1.0)
        try:
            v = heatops.nonexistence_verdict(dom, f, 2.0,
                                             heatops.default_t_grid())
            record.check(f"threshold_functional_{off}",
                         abs(v.functional_value - off), 1e-4, "le",
                         "doubling functional at the amplitude boundary")
        except Inconclusive as e:
            record.mark_inconclusive(f"threshold_functional_{off}", str(e),
                                     "doubling functional scan")

    # smoothing inequalities on the default grids
    family = cutoffs.CutoffFamily(1.0, 4)
    t_grid = np.geomspace(1e-3, 1.0, 8)
    x_grid = np.linspace(0.0, 4.0, 161)
    margins = cutoffs.verify_smoothing(family, 4, t_grid, x_grid, dim=1)
    record.data["smoothing_margins"] = margins
    for key in ("a", "b", "c"):
        record.check(f"smoothing_margin_{key}", margins[key], -1e-8, "ge",
                     "heat-smoothing inequality margin on default grids")

    # Dirichlet vs whole-space comparison
    comp = heatops.ball_comparison_check(
        1.0, 0.5, np.geomspace(1e-3, 0.25, 6), np.linspace(0.0, 0.5, 41))
    record.data["comparison"] = {"min_margin": comp["min_margin"],
                                 "min_floor_margin":
                                     comp["min_floor_margin"]}
    record.check("comparison_margin", comp["min_margin"], -1e-9, "ge",
                 "Dirichlet minus damped whole-space heat on the core")
    record.check("comparison_floor_margin", comp["min_floor_margin"],
                 -1e-9, "ge", "center kernel minus Gaussian floor")

    # profile integrity (quick)
    curve, summary, cert = background_for(3, 1.0, 0.5)
    record.check("profile_residual", profile.residual(curve), 1e-6, "le",
                 "interior finite-difference residual, a = 0.5")
    neg = profile.integrate_profile(profile.ProfileSpec(3, 1.0, -0.5),
                                    40.0, 1e-8)
    odd = float(np.max(np.abs(neg.f_values + curve.f_values)))
    record.check("profile_odd_symmetry", odd, 1e-10, "le",
                 "node-wise f(a) + f(-a) on the shared grid")

    # contraction on a standard whole-space problem
    delta = 0.3
    w0 = shifted_tail_data(summary.mu, 1.0, delta, r_end=2.0)
    bundle = cutoffs.calibrate_bundle(1.0, cert["C1"], {"w2inf": 1.0},
                                      w0.sup_bounded(), delta, dim=3, m=4)
    if cfg["corrupt"] == "inflate_T":
        bundle = cutoffs.ConstantsBundle(
            bundle.K, bundle.A, bundle.B, bundle.m, 256.0 * bundle.T,
            bundle.alpha, bundle.delta,
            {**bundle.provenance, "T": "corrupted: inflated 256x"})
    prob = perturb.PerturbationProblem(heatops.whole_space(3), w0, bundle,
                                       background=(curve, summary))
    slack = math.inf if cfg["corrupt"] else 10.0
    factors = perturb.contraction_probe(prob, n_pairs=cfg["probe_pairs"],
                                        seed=seed, slack_mult=slack)
    record.data["contraction_factors"] = factors
    record.check("contraction_factor", max(factors), 0.75, "le",
                 f"{cfg['probe_pairs']} random envelope-bounded pairs, "
                 f"seed {seed}")
    return record


# ---------------------------------------------------------------------------
# CLI


COMMANDS = {
    "profile": cmd_profile,
    "threshold": cmd_threshold,
    "nonexist": cmd_nonexist,
    "perturb": cmd_perturb,
    "nonunique": cmd_nonunique,
    "ball": cmd_ball,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shl",
        description="Numerical experiments for singular-data semilinear "
                    "heat flow.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to the JSON run configuration")
        p.add_argument("--out", default=None,
                       help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized suites (overrides config)")
    return parser


def run(command, cfg):
    """Execute one command; returns (record_dict, exit_code)."""
    try:
        record = COMMANDS[command](cfg)
    except ConfigError:
        raise
    except Inconclusive as e:
        record = Record(command, cfg)
        record.mark_inconclusive("run", str(e), "command aborted")
        rec = record.write()
        return rec, 2
    except SingheatError as e:
        record = Record(command, cfg)
        record.flag("run", False, f"{type(e).__name__}: {e}",
                    "command aborted")
        rec = record.write()
        return rec, 3
    rec = record.write()
    return rec, record.exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.out, args.seed)
        rec, code = run(args.command, cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 4
    print(f"{args.command}: {rec['verdict']} "
          f"({len(rec['checks'])} checks) -> {cfg['output_dir']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
