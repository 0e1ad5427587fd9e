"""Numerical integration of radial solutions and phase-plane orbits.

Regular profiles are integrated in ``t = ln r`` with the state
``(v, psi) = (ln(-w), ln Phi)``, ``Phi = r^{n-k} (w')^k``, for which the
equation becomes ``v' = -y`` and ``psi' = x`` with ``x, y`` the phase
variables. Orbits of the Lotka-Volterra system are integrated in
``(ln x, ln y)`` so the open quadrant is preserved exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.integrate import DOP853
from scipy.integrate._ivp.common import OdeSolution
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import DomainError, NumericError
from .exponents import ProblemParams, p4_coords
from .profiles import DIRECT_LV, FROM_PROFILE, SINGULAR_FROM_P4, Orbit, RadialSolution
from .transform import LVField, PhasePoint, c_nk, forward_arrays, inverse_arrays
from .weights import WeightSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, start radius and divergence thresholds."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    r_start: float = 1e-6
    t_span: tuple = (-40.0, 40.0)
    max_steps: int = 1_000_000
    samples_per_decade: int = 40
    orbit_dt: float = 0.01
    orbit_blowup: float = 1e12
    iterate_blowup: float = 1e8
    bracket_growth: float = 2.0 ** 20
    chart_y_max: float = 1e8
    #: step cap in the log variable; near an equilibrium the error estimate
    #: alone would let the step grow until round-off is amplified
    max_step: float = 0.5

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.r_start > 0:
            raise DomainError("r_start must be positive")
        if not self.max_step > 0:
            raise DomainError("max_step must be positive")
        if not self.t_span[0] < self.t_span[1]:
            raise DomainError("t_span must be increasing")


DEFAULT = IntegratorConfig()
#: tightest relative tolerance DOP853 accepts without clamping
TIGHTEST_RTOL = 2.3e-14
#: gap between the two runs that ends the trusted part of an orbit
HORIZON_TOL = 1e-5
#: configuration used for classification runs
#: relative size of the first neglected series term at the start radius
START_EPS = 1e-6
CLASSIFY = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-15)


# ---------------------------------------------------------------------------
# stepping driver


@dataclass
class Event:
    """Zero crossing of ``g(t, y)`` from below; ``terminal`` stops the run."""

    g: Callable
    terminal: bool = True
    name: str = ""


@dataclass
class OdeRun:
    dense: OdeSolution
    t0: float
    t_stop: float
    y_stop: np.ndarray
    event: Optional[str]
    steps: int
    nfev: int


def integrate_ode(fun, t0: float, y0, t_end: float, cfg: IntegratorConfig,
                  events: Sequence[Event] = ()) -> OdeRun:
    """Adaptive DOP853 run from ``t0`` to ``t_end`` (either direction).

    Raises
    ------
    NumericError
        On step-size underflow, non-finite states or more than
        ``cfg.max_steps`` accepted steps.
    """
    solver = DOP853(fun, t0, np.asarray(y0, dtype=float), t_end,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step)
    ts, interps = [t0], []
    prev = [ev.g(t0, solver.y) for ev in events]
    steps = 0
    hit = None
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise NumericError(f"integrator failed at t={solver.t}: {msg}")
        steps += 1
        if steps > cfg.max_steps:
            raise NumericError(f"more than {cfg.max_steps} steps before t={t_end}")
        if not np.all(np.isfinite(solver.y)):
            raise NumericError(f"non-finite state at t={solver.t}")
        sol = solver.dense_output()
        t_new = solver.t
        cur = [ev.g(t_new, solver.y) for ev in events]
        stop_t = None
        for i, ev in enumerate(events):
            if prev[i] < 0 <= cur[i]:
                tr = brentq(lambda s: ev.g(s, sol(s)), solver.t_old, t_new, xtol=1e-14, rtol=1e-14)
                if ev.terminal and (stop_t is None or abs(tr - t0) < abs(stop_t - t0)):
                    stop_t, hit = tr, ev.name
        prev = cur
        if stop_t is not None and stop_t == ts[-1]:
            break
        ts.append(t_new if stop_t is None else stop_t)
        interps.append(sol)
        if stop_t is not None:
            break
    dense = OdeSolution(ts, interps)
    t_stop = ts[-1]
    return OdeRun(dense, t0, t_stop, dense(t_stop), hit, steps, solver.nfev)


# ---------------------------------------------------------------------------
# regular radial solutions


def _leading(p: ProblemParams, wt: WeightSpec, w0: float):
    nl = p.n + wt.l0
    if not nl > 0:
        raise DomainError(f"need n + l0 > 0 for regular solutions, got {nl}")
    A = (p.lam / float(c_nk(p.n, p.k)) * wt.K0 * (-w0) ** p.q / nl) ** (1.0 / p.k)
    return A, (wt.l0 + 2 * p.k) / p.k


def series_start(p: ProblemParams, wt: WeightSpec, w0: float, r: float):
    """Start values ``(w, Phi)`` at small ``r`` plus the leading coefficient and power.

    ``w`` is the two-term expansion; ``Phi`` is the integral of the source
    against that expansion, so a non-constant ``K(r) = rho(r) r^-l0`` near 0
    does not leave an ``O(r)`` defect in the integral identity.
    """
    n, k, q = p.n, p.k, p.q
    nl = n + wt.l0
    cnk = float(c_nk(n, k))
    A, pw = _leading(p, wt, w0)
    w = w0 + A / pw * r ** pw
    if wt.kind in ("constant", "power"):
        # first-order correction from (-w)^q = |w0|^q (1 - q A r^pw / (pw |w0|) + ...)
        Phi = A ** k * r ** nl * (1.0 - q * A * nl * r ** pw / (pw * -w0 * (nl + pw)))
    else:
        lr = math.log(r)

        def f(u):
            if u == 0.0:
                return 0.0
            s = r * u
            lk = float(wt.ln_rho(np.asarray(s))) - wt.l0 * (lr + math.log(u))
            return u ** (nl - 1) * math.exp(lk) * (-(w0 + A / pw * s ** pw)) ** q

        val, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        Phi = p.lam / cnk * r ** nl * val
    return w, Phi, A, pw


def natural_radius(p: ProblemParams, wt: WeightSpec, w0: float) -> float:
    """Radius where the profile has moved by ``|w0|`` at leading order."""
    A, pw = _leading(p, wt, w0)
    return (pw * abs(w0) / A) ** (1.0 / pw)


class _RadialRHS:
    def __init__(self, p: ProblemParams, wt: WeightSpec):
        self.p, self.wt = p, wt
        self.lpre = math.log(p.lam) - math.log(float(c_nk(p.n, p.k)))

    def logs(self, t, z):
        p = self.p
        v, psi = z[0], z[1]
        lr = self.wt.ln_rho(np.exp(t))
        lr = float(lr) if np.ndim(t) == 0 else np.asarray(lr)
        lx = self.lpre + p.n * t + lr + p.q * v - psi
        ly = t + (psi + (p.k - p.n) * t) / p.k - v
        return lx, ly

    def __call__(self, t, z):
        lx, ly = self.logs(t, z)
        return np.array([-math.exp(min(ly, 700.0)), math.exp(min(lx, 700.0))])


def _radial_run(p, wt, w0, t_end, cfg):
    if not (w0 < 0 and np.isfinite(w0)):
        raise DomainError(f"w0 must be finite and negative, got {w0}")
    # first neglected series terms are O(START_EPS^2) relative at r0
    _, pw = _leading(p, wt, w0)
    r0 = min(cfg.r_start, natural_radius(p, wt, w0) * min(1e-4, START_EPS ** (1.0 / pw)))
    ws, Phi, _, _ = series_start(p, wt, w0, r0)
    t0 = math.log(r0)
    if t_end <= t0:
        raise DomainError(f"end radius e^{t_end} is below the start radius {r0}")
    rhs = _RadialRHS(p, wt)
    lymax = math.log(cfg.chart_y_max)
    chart = Event(lambda t, z: rhs.logs(t, z)[1] - lymax, True, "chart")
    run = integrate_ode(rhs, t0, [math.log(-ws), math.log(Phi)], t_end, cfg, [chart])
    return run, rhs, r0


def _log_grid(a, b, per_decade):
    m = max(int(math.ceil((b - a) / math.log(10) * per_decade)), 1)
    return np.linspace(a, b, m + 1)


def solve_ivp(p: ProblemParams, wt: WeightSpec, w0: float, r_max: float,
              cfg: IntegratorConfig = DEFAULT, r_eval=None) -> RadialSolution:
    """Regular solution with ``w(0) = w0 < 0`` on ``(0, r_max]``.

    The profile is returned on a log-spaced grid (``cfg.samples_per_decade``)
    from the start radius to ``r_max``, or on ``r_eval`` when given. If
    ``w`` reaches 0 first the result is truncated and ``reason`` says so.
    """
    if not r_max > 0:
        raise DomainError(f"r_max must be positive, got {r_max}")
    run, rhs, r0 = _radial_run(p, wt, w0, math.log(r_max), cfg)
    if r_eval is None:
        tg = _log_grid(run.t0, math.log(r_max), cfg.samples_per_decade)
    else:
        tg = np.log(np.asarray(r_eval, dtype=float))
    tg = tg[(tg >= run.t0) & (tg <= run.t_stop)]
    z = run.dense(tg) if tg.size else np.zeros((2, 0))
    v, psi = z[0], z[1]
    r = np.exp(tg)
    w = -np.exp(v)
    wp = np.exp((psi + (p.k - p.n) * tg) / p.k)
    truncated = run.event == "chart"
    reason = f"w reaches 0 near r={math.exp(run.t_stop):.6g} (chart breakdown)" if truncated else ""
    stats = {"steps": run.steps, "nfev": run.nfev, "rejected": None, "r_start": r0}
    return RadialSolution(r, w, wp, float(w0), p, wt, stats, truncated, reason)


def w_at(p: ProblemParams, wt: WeightSpec, w0: float, r: float, cfg: IntegratorConfig = DEFAULT):
    """``(w(r), w'(r))`` of the regular solution; raises ``ChartError`` if ``w`` hits 0 first."""
    from .errors import ChartError

    run, rhs, _ = _radial_run(p, wt, w0, math.log(r), cfg)
    if run.event == "chart":
        raise ChartError(f"regular solution with w0={w0} reaches 0 near r={math.exp(run.t_stop):.6g} < {r}")
    v, psi = run.y_stop
    t = run.t_stop
    return -math.exp(v), math.exp((psi + (p.k - p.n) * t) / p.k)


def regular_orbit(p: ProblemParams, wt: WeightSpec, w0: float, t_end: float = 40.0,
                  cfg: IntegratorConfig = DEFAULT, horizon_tol: float | None = HORIZON_TOL) -> Orbit:
    """Orbit of the regular solution, sampled every ``cfg.orbit_dt`` in ``t``.

    Orbits ending at a saddle (``P2``) lose accuracy like ``e^t`` times the
    local error. Unless ``horizon_tol`` is ``None`` a second run at a
    tighter tolerance is made and the orbit is cut where the two runs
    differ by more than ``horizon_tol``; the cut is recorded in
    ``stats["horizon"]``.
    """
    run, rhs, _ = _radial_run(p, wt, w0, t_end, cfg)
    tg = np.arange(run.t0, run.t_stop, cfg.orbit_dt)
    tg = np.append(tg, run.t_stop) if tg[-1] < run.t_stop else tg
    z = run.dense(tg)
    lx, ly = rhs.logs(tg, z)
    truncated = run.event == "chart"
    reason = "w reaches 0 (chart breakdown)" if truncated else ""
    stats = {"steps": run.steps, "nfev": run.nfev, "w0": w0, "horizon": None}
    if horizon_tol is not None:
        fine = replace(cfg, rel_tol=max(cfg.rel_tol / 4, TIGHTEST_RTOL), abs_tol=cfg.abs_tol / 4)
        run2, _, _ = _radial_run(p, wt, w0, t_end, fine)
        m = tg <= run2.t_stop
        lx2, ly2 = rhs.logs(tg[m], run2.dense(tg[m]))
        gap = np.hypot(np.exp(lx[m]) - np.exp(lx2), np.exp(ly[m]) - np.exp(ly2))
        bad = np.nonzero(gap > horizon_tol)[0]
        cut = bad[0] if bad.size else (m.sum() if run2.t_stop < run.t_stop else None)
        if cut is not None:
            stats["horizon"] = float(tg[cut - 1]) if cut > 0 else float(tg[0])
            tg, lx, ly = tg[:cut], lx[:cut], ly[:cut]
            truncated, reason = False, ""
            t_hi = stats["horizon"]
        else:
            t_hi = run.t_stop
    else:
        t_hi = run.t_stop

    def dense(t):
        if np.any(np.asarray(t) > t_hi + 1e-12):
            raise DomainError(f"t={t} lies beyond the trusted end {t_hi} of the orbit")
        a, b = rhs.logs(t, run.dense(t))
        return (math.exp(a), math.exp(b)) if np.ndim(t) == 0 else (np.exp(a), np.exp(b))

    return Orbit(tg, np.exp(lx), np.exp(ly), FROM_PROFILE, p, wt, truncated, reason, stats, dense)


def profile_to_orbit(sol: RadialSolution) -> Orbit:
    """Push profile samples through the forward transform."""
    x, y = forward_arrays(sol.w, sol.wp, sol.r, sol.params, sol.weight)
    return Orbit(np.log(sol.r), x, y, FROM_PROFILE, sol.params, sol.weight)


# ---------------------------------------------------------------------------
# direct orbits


def _lv_log_rhs(field: LVField):
    p = field.params
    a = -(p.n - 2 * p.k) / p.k

    def f(t, z):
        x, y = math.exp(min(z[0], 700.0)), math.exp(min(z[1], 700.0))
        return np.array([field.nu(t) - x - p.q * y, a + x / p.k + y])

    return f


def solve_orbit(field: LVField, init: PhasePoint, t_end: float,
                cfg: IntegratorConfig = DEFAULT, provenance: str = DIRECT_LV) -> Orbit:
    """Integrate the Lotka-Volterra system from ``init`` to ``t_end``.

    Interior points are propagated in ``(ln x, ln y)``; points on an axis
    stay on it (the axes are invariant). ``t_end < init.t`` integrates
    backward; samples are always returned with increasing ``t``. Blow-up
    (``x + y > cfg.orbit_blowup``) truncates the orbit and is reported in
    ``reason``.
    """
    if init.x < 0 or init.y < 0:
        raise DomainError(f"initial point must lie in the closed first quadrant, got ({init.x}, {init.y})")
    p = field.params
    lim = math.log(cfg.orbit_blowup)
    sgn = 1.0 if t_end >= init.t else -1.0
    if init.x > 0 and init.y > 0:
        fun = _lv_log_rhs(field)
        z0 = [math.log(init.x), math.log(init.y)]
        to_xy = lambda z: (np.exp(z[0]), np.exp(z[1]))  # noqa: E731
    elif init.x > 0:
        fun = lambda t, z: np.array([field.nu(t) - math.exp(min(z[0], 700.0))])  # noqa: E731
        z0 = [math.log(init.x)]
        to_xy = lambda z: (np.exp(z[0]), np.zeros_like(z[0]))  # noqa: E731
    elif init.y > 0:
        a = -(p.n - 2 * p.k) / p.k
        fun = lambda t, z: np.array([a + math.exp(min(z[0], 700.0))])  # noqa: E731
        z0 = [math.log(init.y)]
        to_xy = lambda z: (np.zeros_like(z[0]), np.exp(z[0]))  # noqa: E731
    else:
        tg = np.arange(min(init.t, t_end), max(init.t, t_end) + 0.5 * cfg.orbit_dt, cfg.orbit_dt)
        return Orbit(tg, np.zeros_like(tg), np.zeros_like(tg), provenance, p, field.weight)
    blow = Event(lambda t, z: float(np.max(z)) - lim, True, "blowup")
    run = integrate_ode(fun, init.t, z0, t_end, cfg, [blow])
    n_pts = int(math.floor(abs(run.t_stop - init.t) / cfg.orbit_dt))
    tg = init.t + sgn * cfg.orbit_dt * np.arange(n_pts + 1)
    if abs(tg[-1] - run.t_stop) > 1e-12:
        tg = np.append(tg, run.t_stop)
    x, y = to_xy(run.dense(tg))
    if sgn < 0:
        tg, x, y = tg[::-1], x[::-1], y[::-1]

    def dense(t):
        xx, yy = to_xy(run.dense(t))
        return (float(xx), float(yy)) if np.ndim(t) == 0 else (xx, yy)

    truncated = run.event == "blowup"
    reason = f"blow-up: x + y exceeded {cfg.orbit_blowup:g} near t={run.t_stop:.6g}" if truncated else ""
    stats = {"steps": run.steps, "nfev": run.nfev}
    return Orbit(tg, np.asarray(x), np.asarray(y), provenance, p, field.weight, truncated, reason, stats, dense)


# ---------------------------------------------------------------------------
# singular solutions


def singular_orbit(p: ProblemParams, wt: WeightSpec, T: float = 30.0,
                   cfg: IntegratorConfig = DEFAULT, t_end: float = 10.0) -> Orbit:
    """Orbit leaving ``P4`` of the limit system at ``-inf``.

    The run starts exactly at ``P4`` (with ``nu = n + l0``) at ``t = -T``;
    the non-autonomous part of ``nu`` moves it off the point. For pure
    power weights the orbit is constant.
    """
    x4, y4 = p4_coords(p, wt.l0)
    if not (x4 > 0 and y4 > 0):
        raise DomainError(
            f"P4 = ({x4:.6g}, {y4:.6g}) is outside the open quadrant; "
            f"need q > k(n+l0)/(n-2k) = {p.k * (p.n + wt.l0) / (p.n - 2 * p.k):.6g} and l0 > -2k"
        )
    return solve_orbit(LVField(p, wt), PhasePoint(-float(T), x4, y4), t_end, cfg, SINGULAR_FROM_P4)


def lambda_tilde_from_orbit(orb: Orbit) -> float:
    p, wt = orb.params, orb.weight
    x0, y0 = orb.at(0.0)
    return float(c_nk(p.n, p.k)) * float(x0) * float(y0) ** p.k / float(wt.rho(np.asarray(1.0)))


@dataclass(frozen=True, eq=False)
class SingularResult:
    lambda_tilde: float
    profile: RadialSolution
    orbit: Orbit

    def __iter__(self):
        return iter((self.lambda_tilde, self.profile))


def singular_solution(p: ProblemParams, wt: WeightSpec, cfg: IntegratorConfig = DEFAULT,
                      T: float = 30.0, t_end: float = 10.0) -> SingularResult:
    """Singular solution of the Dirichlet problem and its parameter ``lambda~``.

    ``lambda~ = c_{n,k} x(0) y(0)^k / rho(1)``; the profile is the inverse
    transform of the orbit at ``lam = lambda~`` so that ``w~(1) = -1``.
    Unpacks as ``(lambda_tilde, profile)``.
    """
    orb = singular_orbit(p, wt, T, cfg, t_end)
    if orb.truncated:
        raise NumericError(f"singular orbit did not reach t={t_end}: {orb.reason}")
    lt = lambda_tilde_from_orbit(orb)
    ps = replace(p, lam=lt)
    w, wp = inverse_arrays(orb.t, orb.x, orb.y, ps, wt)
    prof = RadialSolution(np.exp(orb.t), w, wp, -math.inf, ps, wt, {"T": T}, False, "")
    return SingularResult(lt, prof, orb)


# ---------------------------------------------------------------------------
# maximal solutions of the Dirichlet problem on the unit ball


@dataclass(frozen=True, eq=False)
class MaximalResult:
    lam: float
    r: np.ndarray
    u: np.ndarray
    profile: RadialSolution
    converged: bool
    iterations: int
    reason: str
    history: Optional[list] = None


def _cc_nodes(N):
    return 0.5 * (1 - np.cos(np.pi * np.arange(N + 1) / N))


class _MaxIter:
    """Precomputed quadrature for the iteration map ``u -> T(u)``."""

    def __init__(self, p: ProblemParams, wt: WeightSpec, nodes: int = 257, gl: int = 6):
        n, k = p.n, p.k
        N = nodes - 1
        s = _cc_nodes(N)
        xi, wgt = roots_legendre(gl)
        h = np.diff(s)
        tau = s[:-1, None] + h[:, None] * (1 + xi[None, :]) / 2          # (N, m)
        d = tau - s[:-1, None]
        sig = s[:-1, None, None] + d[:, :, None] * (1 + xi[None, None, :]) / 2  # (N, m, m)
        self.s, self.N, self.k, self.q = s, N, k, p.q
        self.K = (p.lam / float(c_nk(n, k))) ** (1.0 / k)

        def base(x):
            return x ** (n - 1) * wt.rho(x)

        self.w_outer = h[:, None] * wgt[None, :] / 2 * tau ** ((k - n) / k)
        self.w_panel = (h[:, None] * wgt[None, :] / 2) * base(tau)
        self.w_inner = (d[:, :, None] * wgt[None, None, :] / 2) * base(sig)
        # linear interpolation indices and weights on the node grid
        self.tau_idx, self.tau_th = self._lin(tau)
        self.sig_idx, self.sig_th = self._lin(sig)
        self.pref = s[1:] ** ((k - n) / k)

    def _lin(self, x):
        j = np.clip(np.searchsorted(self.s, x, side="right") - 1, 0, self.N - 1)
        th = (x - self.s[j]) / (self.s[j + 1] - self.s[j])
        return j, th

    def _interp(self, u, j, th):
        return (1 - th) * u[j] + th * u[j + 1]

    def apply(self, u):
        q, k = self.q, self.k
        ft = (1 - self._interp(u, self.tau_idx, self.tau_th)) ** q
        fs = (1 - self._interp(u, self.sig_idx, self.sig_th)) ** q
        I_nodes = np.concatenate([[0.0], np.cumsum((self.w_panel * ft).sum(axis=1))])
        I_tau = I_nodes[:-1, None] + (self.w_inner * fs).sum(axis=2)
        outer = (self.w_outer * I_tau ** (1.0 / k)).sum(axis=1)
        tail = np.concatenate([np.cumsum(outer[::-1])[::-1], [0.0]])
        up = self.K * self.pref * I_nodes[1:] ** (1.0 / k)
        return -self.K * tail, np.concatenate([[0.0], up])


def maximal_solution_iterate(p: ProblemParams, wt: WeightSpec, tol: float = 1e-10,
                             max_iter: int = 5000, cfg: IntegratorConfig = DEFAULT,
                             nodes: int = 257, keep_history: bool = False) -> MaximalResult:
    """Monotone iteration ``u_0 = 0``, ``u_{i+1} = T(u_i)`` for the maximal solution.

    Each step evaluates the integral form of the radial equation with
    composite Gauss-Legendre rules on a fixed grid clustered at both ends
    of ``[0, 1]``; ``u`` is interpolated linearly, which keeps the map
    order-preserving. Divergence (``min u < -cfg.iterate_blowup`` or no
    convergence within ``max_iter``) is reported through ``converged=False``
    and means ``lam`` is at or beyond ``lambda*`` on this grid.
    """
    op = _MaxIter(p, wt, nodes)
    u = np.zeros(op.N + 1)
    hist = [u.copy()] if keep_history else None
    converged, reason, up = False, "", np.zeros_like(u)
    it = 0
    for it in range(1, max_iter + 1):
        new, up = op.apply(u)
        if not np.all(np.isfinite(new)) or new.min() < -cfg.iterate_blowup:
            reason = f"iterates unbounded below at step {it}"
            u = new
            break
        change = float(np.max(np.abs(new - u)))
        u = new
        if keep_history:
            hist.append(u.copy())
        if change < tol * max(1.0, float(np.max(np.abs(u)))):
            converged = True
            break
    else:
        reason = f"no convergence after {max_iter} iterations"
    r = op.s
    mask = r > 0
    w = u[mask] - 1.0
    wp = np.where(np.isfinite(up[mask]), up[mask], np.nan)
    prof = RadialSolution(r[mask], w, wp, float(u[0] - 1.0), p, wt,
                          {"iterations": it}, not converged, reason)
    return MaximalResult(p.lam, r, u, prof, converged, it, reason, hist)


def lambda_lower_bound(p: ProblemParams, wt: WeightSpec, points: int = 4001) -> float:
    """``binom(n,k) C^-1 ((q-k)/q)^q (2k/(q-k))^k`` with ``C = max rho`` on ``[0, 1]``."""
    n, k, q = p.n, p.k, p.q
    r = np.linspace(0.0, 1.0, points)[1:]
    C = float(np.max(wt.rho(r)))
    return math.comb(n, k) / C * ((q - k) / q) ** q * (2 * k / (q - k)) ** k


def estimate_lambda_star(p: ProblemParams, wt: WeightSpec, cfg: IntegratorConfig = DEFAULT,
                         rel_width: float = 1e-3, tol: float = 1e-10, max_iter: int = 5000):
    """Bracket ``(lower, upper)`` of ``lambda*`` by bisection on convergence.

    Starts from ``[lb, 64 lb]`` with ``lb`` the analytic lower bound and
    doubles the upper end while the iteration still converges, up to
    ``cfg.bracket_growth * lb``; past that ``(lower, inf)`` is returned.
    """

    def ok(lam):
        return maximal_solution_iterate(replace(p, lam=lam), wt, tol, max_iter, cfg).converged

    lb = lambda_lower_bound(p, wt)
    lo, hi = lb, 64 * lb
    if not ok(lo):
        log.warning("iteration diverges at the analytic lower bound %g", lo)
        hi, lo = lo, 0.0
    while ok(hi):
        lo = hi
        hi *= 2
        if hi > cfg.bracket_growth * lb:
            return lo, math.inf
    while hi - lo >= rel_width * lb:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def p2_orbit(p: ProblemParams, wt: WeightSpec, T: float = 40.0, x_end: float | None = None,
             t_start: float = -10.0, cfg: IntegratorConfig = DEFAULT) -> Orbit:
    """Orbit converging to ``P2`` built backward from its stable direction.

    At ``t = T`` the point ``(x_end, (n-2k)/k + s x_end)`` is placed on the
    stable eigen-direction of ``P2`` (slope ``s`` from the limit system at
    ``l_inf``) and the system is integrated back to ``t_start``. Backward
    blow-up shortens the orbit from the left but leaves its forward end
    intact.
    """
    from .exponents import p2_rate

    n, k = p.n, p.k
    gam = p2_rate(p, wt.l_inf)
    if x_end is None:
        # x decays like e^{-gamma t}; this keeps x = O(1) near t = 0
        x_end = math.exp(-gam * T)
    s = -(n - 2 * k) / (k * k * gam + k * (n - 2 * k))
    init = PhasePoint(float(T), float(x_end), (n - 2 * k) / k + s * x_end)
    orb = solve_orbit(LVField(p, wt), init, t_start, cfg)
    stats = {**orb.stats, "backward_reason": orb.reason, "T": T}
    return replace(orb, truncated=False, reason="", stats=stats)
