"""The sharp amplitude threshold for pure-power initial data.

For data u0 = mu * |x|^(-2/alpha) the doubling functional
(alpha t)^(1/alpha) ||e^{t Lap} u0||_inf is constant in t by parabolic
scaling, and equals mu / mu0 with mu0 the critical amplitude.  Above the
threshold no nonnegative local solution exists; below it the criterion is
not violated.

Run:  python3 demos/nonexistence_threshold.py
"""

import numpy as np

from singheat import heatops

N, ALPHA = 3, 2.0


def main():
    mu0 = heatops.mu0_threshold(N, ALPHA)
    print(f"critical amplitude mu0(N={N}, alpha={ALPHA}) = {mu0:.6f}")
    print(f"(closed form sqrt(pi/2) = {np.sqrt(np.pi / 2):.6f})")
    print()

    dom = heatops.whole_space(N)
    print(f"{'mu/mu0':>7}  {'functional':>10}  verdict")
    for off in (0.8, 0.99, 1.01, 1.3):
        fld = heatops.RadialField.pure_power(off * mu0, 2.0 / ALPHA)
        v = heatops.nonexistence_verdict(dom, fld, ALPHA,
                                         heatops.default_t_grid())
        print(f"{off:7.2f}  {v.functional_value:10.6f}  {v.outcome}")
    print()

    print("classifier on general power data (gamma, mu):")
    for gamma, mu in ((3.0, 0.1), (2.5, 0.1), (1.0, 1.3), (1.0, 0.5)):
        cond, v = heatops.fr3_classifier(N, ALPHA, gamma, mu)
        print(f"  gamma={gamma}, mu={mu}: condition {cond!r} -> {v.outcome}")


if __name__ == "__main__":
    main()
