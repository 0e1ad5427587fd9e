"""Multiplicity of solutions of the Dirichlet problem on the unit ball.

Solutions are counted through the curve ``a -> lambda(a)``: the regular
solution with ``w(0) = -a`` at ``lam = lambda~`` is rescaled to vanish (in
``u = 1 + w``) on the unit sphere, which is possible for exactly one ``lam``::

    lambda(a) = lambda~ * (-w(1, a))**(q - k).

Level crossings of this curve are solutions. The same module counts
intersections between regular and singular profiles and provides the
blow-up rescaling ``F_a``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import DomainError
from .exponents import ProblemParams
from .profiles import RadialSolution
from .solver import DEFAULT, IntegratorConfig, singular_solution, solve_ivp, w_at
from .weights import WeightSpec, power

#: bisection cap and relative width for crossings in ``a``
MAX_BISECT = 60
A_REL_WIDTH = 1e-6


def lambda_tilde(p: ProblemParams, wt: WeightSpec, cfg: IntegratorConfig = DEFAULT) -> float:
    return singular_solution(p, wt, cfg).lambda_tilde


def lambda_of_a(p: ProblemParams, wt: WeightSpec, a: float, lam_tilde: float | None = None,
                cfg: IntegratorConfig = DEFAULT) -> float:
    """``lambda(a) = lambda~ (-w(1, a))^(q-k)`` with ``w`` solved at ``lam = lambda~``.

    Raises ``ChartError`` when the regular solution reaches zero before
    ``r = 1``.
    """
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    lt = lambda_tilde(p, wt, cfg) if lam_tilde is None else lam_tilde
    w1, _ = w_at(replace(p, lam=lt), wt, -a, 1.0, cfg)
    return lt * (-w1) ** (p.q - p.k)


@dataclass(frozen=True, eq=False)
class BifurcationCurve:
    """Samples of ``lambda(a)`` on a log-spaced ``a`` grid."""

    a: np.ndarray
    lam: np.ndarray
    lambda_tilde: float
    params: ProblemParams
    weight: WeightSpec
    grid: tuple
    cfg: IntegratorConfig = DEFAULT
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.a.size == 0 or self.a.shape != self.lam.shape:
            raise DomainError("curve needs matching nonempty a and lambda arrays")
        if np.any(np.diff(self.a) <= 0) or self.a[0] <= 0:
            raise DomainError("a must be positive and strictly increasing")

    @property
    def points(self) -> list:
        return list(zip(self.a.tolist(), self.lam.tolist()))

    def write_csv(self, path):
        from .profiles import write_columns

        write_columns(path, ("a", "lambda"), (self.a, self.lam))


def sweep(p: ProblemParams, wt: WeightSpec, a_min: float, a_max: float, count: int,
          cfg: IntegratorConfig = DEFAULT, jobs: int | None = None) -> BifurcationCurve:
    """Evaluate ``lambda(a)`` on ``count`` log-spaced points of ``[a_min, a_max]``.

    Points are independent; ``jobs`` bounds the worker pool and results keep
    grid order.
    """
    if count < 16:
        raise DomainError(f"sweep needs count >= 16, got {count}")
    if not (0 < a_min < a_max):
        raise DomainError(f"need 0 < a_min < a_max, got {a_min}, {a_max}")
    lt = lambda_tilde(p, wt, cfg)
    a = np.geomspace(a_min, a_max, count)

    def one(av):
        return lambda_of_a(p, wt, float(av), lt, cfg)

    if jobs == 1:
        lam = [one(av) for av in a]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            lam = list(pool.map(one, a))
    return BifurcationCurve(a, np.array(lam), lt, p, wt, (a_min, a_max, count), cfg)


def solution_roots(curve: BifurcationCurve, lambda_query: float) -> list[float]:
    """Values of ``a`` with ``lambda(a) = lambda_query``, one per bracketed crossing.

    Each sign change of ``lambda(a) - lambda_query`` on the grid is refined by
    bisection in ``ln a`` (re-solving the initial value problem per probe)
    until its relative width is below ``1e-6`` or 60 halvings were done.
    """
    if not (0 < lambda_query <= float(np.max(curve.lam))):
        return []
    d = curve.lam - lambda_query
    roots = []
    for i in range(d.size - 1):
        if d[i] == 0.0:
            roots.append(float(curve.a[i]))
            continue
        if d[i] * d[i + 1] >= 0:
            continue
        lo, hi = math.log(curve.a[i]), math.log(curve.a[i + 1])
        dlo = d[i]
        for _ in range(MAX_BISECT):
            if math.exp(hi) - math.exp(lo) <= A_REL_WIDTH * math.exp(lo):
                break
            mid = 0.5 * (lo + hi)
            dm = lambda_of_a(curve.params, curve.weight, math.exp(mid), curve.lambda_tilde, curve.cfg) - lambda_query
            if dm == 0.0:
                lo = hi = mid
                break
            if (dm < 0) == (dlo < 0):
                lo, dlo = mid, dm
            else:
                hi = mid
        roots.append(math.exp(0.5 * (lo + hi)))
    if d[-1] == 0.0:
        roots.append(float(curve.a[-1]))
    return roots


def count_solutions(curve: BifurcationCurve, lambda_query: float) -> int:
    """Number of solutions of the Dirichlet problem at ``lam = lambda_query`` seen on the curve."""
    return len(solution_roots(curve, lambda_query))


# ---------------------------------------------------------------------------
# intersections and rescaling


def _spline(sol: RadialSolution):
    return CubicHermiteSpline(np.log(sol.r), sol.w, sol.wp * sol.r)


def intersection_count(singular: RadialSolution, regular: RadialSolution, interval,
                       return_points: bool = False):
    """Number of sign changes of ``w~ - w`` on ``interval`` (closed on the right).

    Both profiles are interpolated (cubic Hermite in ``ln r``) on their merged
    sample grid restricted to the common range; zeros are simple, so sign
    changes count them. Each is located by Brent's method.
    """
    lo, hi = (float(v) for v in interval)
    a = max(lo, singular.r[0], regular.r[0])
    b = min(hi, singular.r[-1], regular.r[-1])
    if not (a < b):
        raise DomainError(f"profiles do not overlap on ({lo:g}, {hi:g}]")
    s1, s2 = _spline(singular), _spline(regular)
    ta, tb = math.log(a), math.log(b)
    grid = np.union1d(np.log(singular.r), np.log(regular.r))
    grid = np.union1d(grid[(grid > ta) & (grid < tb)], [ta, tb])

    def diff(t):
        return s1(t) - s2(t)

    d = diff(grid)
    pts = []
    for i in range(grid.size - 1):
        if d[i] == 0.0:
            # a sampled zero counts only when the sign flips across it
            if 0 < i and d[i - 1] * d[i + 1] < 0:
                pts.append(math.exp(grid[i]))
        elif d[i] * d[i + 1] < 0:
            pts.append(math.exp(brentq(diff, grid[i], grid[i + 1], xtol=1e-14)))
    return (len(pts), pts) if return_points else len(pts)


def rescale_Fa(sol: RadialSolution, a: float, l0: float) -> RadialSolution:
    """``(F_a w)(r) = w(r / a^g) / a`` with ``g = (q-k)/(2k+l0)``."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    p = sol.params
    g = (p.q - p.k) / (2 * p.k + l0)
    s = a ** g
    return RadialSolution(sol.r * s, sol.w / a, sol.wp / (a * s), sol.w0 / a, p, sol.weight,
                          dict(sol.stats, rescaled_by=a), sol.truncated, sol.reason)


def limit_weight(wt: WeightSpec) -> WeightSpec:
    """The pure power ``K0 r^l0`` that ``rho`` follows near the origin."""
    return power(wt.l0, wt.K0)


def fa_distance(p: ProblemParams, wt: WeightSpec, a: float, r_lo: float = 0.1, r_hi: float = 2.0,
                cfg: IntegratorConfig = DEFAULT, points: int = 400,
                limit: Optional[RadialSolution] = None) -> float:
    """``sup |F_a w(., a) - U|`` on ``[r_lo, r_hi]``.

    ``w(., a)`` is the regular solution with ``w(0) = -a`` and ``U`` the
    regular solution with ``U(0) = -1`` of the problem with the limit weight
    ``K0 r^l0``, both at ``p.lam``.
    """
    g = (p.q - p.k) / (2 * p.k + wt.l0)
    reg = solve_ivp(p, wt, -a, r_hi / a ** g, cfg)
    fa = rescale_Fa(reg, a, wt.l0)
    if limit is None:
        limit = solve_ivp(p, limit_weight(wt), -1.0, r_hi, cfg)
    r = np.geomspace(r_lo, r_hi, points)
    return float(np.max(np.abs(fa(r) - limit(r))))
