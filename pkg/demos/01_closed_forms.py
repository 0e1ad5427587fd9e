"""Two exact profiles and what they look like in the phase plane.

The weight ``rho = 3 / (1 + r^2)`` with n=3, k=1, q=3 has the explicit
solution ``w = -(1 + r^2)^(-1/2)``; the Bliss profile solves the constant
weight problem at the critical exponent q = 5. Both are recovered by the
shooting solver and both orbits end at P2 = (0, (n-2k)/k).
"""

import numpy as np

from khessian import CLASSIFY, ProblemParams, classify_orbit, regular_orbit, solve_ivp
from khessian import weights as W
from khessian.transform import hessian_residual

p = ProblemParams(3, 1, 3)
wt = W.example1(3, 1)
sol = solve_ivp(p, wt, -1.0, 10.0)
exact, _ = W.example1_profile(3, 1, sol.r)
print(f"example weight: max |w - exact| on [r_start, 10] = {np.max(np.abs(sol.w - exact)):.2e}")
print(f"  equation residual of the solved profile: {hessian_residual(sol, p, wt).max:.2e}")

orb = regular_orbit(p, wt, -1.0, 40.0, CLASSIFY)
cls = classify_orbit(orb)
print(f"  orbit starts at ({orb.x[0]:.4f}, {orb.y[0]:.2e}), ends near {cls.limit_point}: {cls.verdict}")
print(f"  -w decays like r^{cls.decay['exponent']:.4f}, c3 = {cls.constants['c3']:.5f}")

pb = ProblemParams(3, 1, 5)
w0 = -3 ** 0.25
sol = solve_ivp(pb, W.constant(), w0, 10.0)
exact, _ = W.bliss_profile(3, 1, 0.0, 1.0, sol.r)
print(f"Bliss profile: max |w - exact| = {np.max(np.abs(sol.w - exact)):.2e}")
cls = classify_orbit(regular_orbit(pb, W.constant(), w0, 40.0, CLASSIFY))
print(f"  verdict {cls.verdict}, decay exponent {cls.decay['exponent']:.5f} (predicted -1)")
