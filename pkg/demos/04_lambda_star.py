"""The extremal parameter for n=3, k=1, q=3 and its scaling with the weight.

Maximal solutions are built by monotone iteration from u = 0; the iterates
decrease and converge for lam below lam*, and diverge above it. The
bracket is found by bisection on that outcome.
"""

from khessian import ProblemParams, estimate_lambda_star, maximal_solution_iterate
from khessian import weights as W
from khessian.solver import lambda_lower_bound

p = ProblemParams(3, 1, 3)
lo, hi = estimate_lambda_star(p, W.constant())
print(f"lambda* in ({lo:.6f}, {hi:.6f}); explicit lower bound {lambda_lower_bound(p, W.constant()):.6f}")
lo2, hi2 = estimate_lambda_star(p, W.constant(2.0))
print(f"with rho = 2: ({lo2:.6f}, {hi2:.6f}), half of the first bracket is ({lo / 2:.6f}, {hi / 2:.6f})")

for lam in (0.5, 1.0, 0.99 * lo, 1.01 * hi):
    res = maximal_solution_iterate(ProblemParams(3, 1, 3, lam=lam), W.constant())
    state = f"u(0) = {res.u[0]:.6f}" if res.converged else res.reason
    print(f"  lam = {lam:.5f}: {'converged' if res.converged else 'no convergence'}, {state}")
