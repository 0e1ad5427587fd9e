"""Many solutions on the unit ball for n=3, k=1, q=6, rho = 1.

The singular solution has ``lambda~ = 0.24`` and sits at the stable focus
P4. Regular solutions wind around it, so the curve ``lambda(a)`` oscillates
about 0.24 and the level ``lam = 0.24`` is crossed again and again. The
oscillation decays slowly: the focus contracts at rate 0.1 in ``t = ln r``.
"""

from dataclasses import replace

from khessian import ProblemParams, count_solutions, intersection_count, singular_solution, solve_ivp, sweep
from khessian import weights as W
from khessian.bifurcation import solution_roots

p, wt = ProblemParams(3, 1, 6), W.constant()
curve = sweep(p, wt, 1.0, 1e4, 64)
print(f"lambda~ = {curve.lambda_tilde:.12f}")
for a, lam in curve.points[::8]:
    print(f"  a = {a:10.3f}   lambda(a) = {lam:.6f}")
print(f"max lambda on the grid: {curve.lam.max():.4f}")
roots = solution_roots(curve, 0.24)
print(f"solutions at lam = 0.24: {len(roots)}, w(0) = " + ", ".join(f"-{a:.4g}" for a in roots))
print(f"solutions at lam = 0.5:  {count_solutions(curve, 0.5)}")

lt, sing = singular_solution(p, wt, t_end=14.0)
pl = replace(p, lam=lt)
n, pts = intersection_count(sing, solve_ivp(pl, wt, -1.0, 1e6), (0.0, 1e6), return_points=True)
print(f"regular (a=1) and singular profiles cross {n} times, at r = " + ", ".join(f"{r:.4g}" for r in pts))
for a in (10.0, 1e2, 1e3, 1e4):
    z = intersection_count(sing, solve_ivp(pl, wt, -a, 1.0), (0.0, 1.0))
    print(f"  crossings on (0, 1] for a = {a:g}: {z}")
