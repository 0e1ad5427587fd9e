"""Where orbits go: P2, P3+ or P4+, and how fast the profile decays.

The sign of ``delta = -(2k + l_inf)`` decides which end state is possible
besides P2. Each line builds an orbit, classifies it and compares the
fitted decay exponent with the predicted one.
"""

from khessian import CLASSIFY, ProblemParams, classify_orbit, p2_orbit, regular_orbit, slope_checks
from khessian import weights as W
from khessian.classify import never_in_G_minus

cases = [
    ("rho = 1/(1+r^3), n=5, q=3", ProblemParams(5, 1, 3), W.rational(1, 1, 0, 3), -1.0, 40.0),
    ("rho = 1/(3000+r^2), n=3, q=6", ProblemParams(3, 1, 6), W.rational(1, 3000, 0, 2), -0.8, 40.0),
    ("rho = r^3/(1+r), n=5, q=5", ProblemParams(5, 1, 5), W.rational(1, 1, 3, 1), -1.0, 40.0),
    ("rho = 1, n=3, q=6", ProblemParams(3, 1, 6), W.constant(), -1.0, 120.0),
]

print(f"{'instance':40s} {'delta':>6s} {'verdict':>14s} {'fit':>9s} {'pred':>9s} {'G- entered':>10s}")
for name, p, wt, w0, t_end in cases:
    for label, orb in (("regular", regular_orbit(p, wt, w0, t_end, CLASSIFY)),
                       ("P2 branch", p2_orbit(p, wt, cfg=CLASSIFY))):
        cls = classify_orbit(orb)
        d = cls.decay
        print(f"{name + ' ' + label:40s} {cls.delta + 0.0:6.2f} {cls.verdict:>14s} "
              f"{d['exponent']:9.4f} {d['predicted']:9.4f} {str(not never_in_G_minus(orb)):>10s}")

# the slow case: y(t) ~ k / ((q-k) t) and a limiting graph of slope -1/q
p, wt = ProblemParams(3, 1, 6), W.rational(1, 3000, 0, 2)
orb = regular_orbit(p, wt, -0.8, 40.0, CLASSIFY)
cls = classify_orbit(orb)
s = slope_checks(orb, cls)
print(f"\nslow decay: t*y(40) = {orb.t[-1] * orb.y[-1]:.4f} (target {p.k / (p.q - p.k):.4f}), "
      f"slope {s['fitted']:.4f} (target {s['predicted']:.4f})")
