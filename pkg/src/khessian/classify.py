"""Omega-limit classification of orbits and asymptotic constants.

An orbit of an entire solution ends at one of ``P2 = (0, (n-2k)/k)``,
``P3+ = (n + l_inf, 0)`` or ``P4+``. Which one is allowed depends on the
sign of ``delta = -(2k + l_inf)/k``: ``P3+`` needs ``delta >= 0`` (fast
algebraic decay for ``delta > 0``, logarithmic for ``delta = 0``) and
``P4+`` needs ``delta < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DomainError
from .exponents import ProblemParams, delta_param, p2_rate, p4_coords, stationary_point
from .profiles import Orbit
from .transform import LVField, c_nk, inverse_arrays

P2 = "P2"
P3_FAST = "P3plus_fast"
P3_SLOW = "P3plus_slow"
P4 = "P4plus"
UNDETERMINED = "undetermined"

#: sustained distance to the limit point over the trailing window
CLASS_TOL = 1e-4
WINDOW = 0.10
G_SLACK = 1e-9
MIN_T_END = 20.0


def region_values(t, x, y, field: LVField):
    """``(G, W, S)`` at ``(t, x, y)``."""
    p = field.params
    n, k, q = p.n, p.k, p.q
    G = x + (n - 2 * k) * (q + 1) / (k + 1) * (k / (n - 2 * k) * y - 1)
    W = -(n - 2 * k) / k + x / k + y
    S = field.nu(t) - x - q * y
    return G, W, S


@dataclass
class Classification:
    """Verdict with limit point, predicted constants, decay fit and region history."""

    verdict: str
    limit_point: Optional[tuple]
    delta: float
    constants: dict = field(default_factory=dict)
    decay: dict = field(default_factory=dict)
    regions: dict = field(default_factory=dict)
    terminal_distance: float = float("nan")
    reason: str = ""
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, (np.floating, np.integer)):
                return clean(float(v))
            if isinstance(v, np.bool_):
                return bool(v)
            return v

        return clean({
            "verdict": self.verdict,
            "limit_point": list(self.limit_point) if self.limit_point else None,
            "delta": self.delta,
            "constants": self.constants,
            "decay": self.decay,
            "regions": self.regions,
            "terminal_distance": self.terminal_distance,
            "reason": self.reason,
            "flags": self.flags,
        })


def region_history(orb: Orbit) -> dict:
    """First entry times into ``G-`` and ``W-`` and the sign pattern of ``G``."""
    fld = LVField(orb.params, orb.weight)
    G, W, _ = region_values(orb.t, orb.x, orb.y, fld)
    g_neg = np.nonzero(G <= -G_SLACK)[0]
    w_neg = np.nonzero(W < 0)[0]
    return {
        "G_minus_entry": float(orb.t[g_neg[0]]) if g_neg.size else None,
        "W_minus_entry": float(orb.t[w_neg[0]]) if w_neg.size else None,
        "G_min": float(G.min()),
        "W_minus_subset_G_minus": bool(np.all(G[W < 0] < G_SLACK)),
    }


def _window(orb: Orbit):
    span = orb.t[-1] - orb.t[0]
    return orb.t >= orb.t[-1] - WINDOW * span


def fit_decay(orb: Orbit, kind: str, r_lo: float = 1e2, r_hi: float = 1e4) -> dict:
    """Fit the decay of ``-w`` (or ``w'``) recovered from the orbit on ``[r_lo, r_hi]``.

    ``kind`` is ``"power"`` (slope of ``ln(-w)`` in ``ln r``), ``"deriv"``
    (slope of ``ln w'`` in ``ln r``) or ``"log"`` (slope of ``ln(-w)`` in
    ``ln ln r``).
    """
    p = orb.params
    m = (orb.t >= math.log(r_lo)) & (orb.t <= math.log(r_hi)) & (orb.x > 0) & (orb.y > 0)
    if m.sum() < 5:
        return {"kind": kind, "exponent": None, "residual": None, "reason": "orbit does not cover the fit window"}
    t = orb.t[m]
    w, wp = inverse_arrays(t, orb.x[m], orb.y[m], p, orb.weight)
    if kind == "power":
        xs, ys = t, np.log(-w)
    elif kind == "deriv":
        xs, ys = t, np.log(wp)
    elif kind == "log":
        xs, ys = np.log(t), np.log(-w)
    else:
        raise DomainError(f"unknown decay kind {kind!r}")
    coef, res, *_ = np.polyfit(xs, ys, 1, full=True)
    resid = math.sqrt(float(res[0]) / xs.size) if res.size else 0.0
    return {"kind": kind, "exponent": float(coef[0]), "residual": resid,
            "window": [r_lo, r_hi]}


def predicted_decay(p: ProblemParams, verdict: str, delta: float) -> tuple[str, float]:
    """Fit kind and theoretical exponent for each verdict."""
    n, k, q = p.n, p.k, p.q
    if verdict == P2:
        return "power", -(n - 2 * k) / k
    if verdict == P3_FAST:
        return "deriv", -(delta + 1)
    if verdict == P3_SLOW:
        return "log", -k / (q - k)
    if verdict == P4:
        return "power", delta * k / (q - k)
    raise DomainError(f"no decay law for verdict {verdict!r}")


def classify_orbit(orb: Orbit, p: ProblemParams | None = None, wt=None,
                   tol: float = CLASS_TOL) -> Classification:
    """Decide the omega-limit of ``orb`` and the matching asymptotic constants.

    A verdict needs the orbit to stay within ``tol`` of the limit point over
    the last 10% of its time span; for ``delta = 0`` the ``1/t`` law of
    ``y`` is fitted instead, since the approach is too slow for proximity.
    """
    p = p or orb.params
    wt = wt or orb.weight
    if p is not orb.params or wt is not orb.weight:
        orb = replace(orb, params=p, weight=wt)
    n, k, q, lam = p.n, p.k, p.q, p.lam
    l_inf = wt.l_inf
    delta = delta_param(k, l_inf)
    cnk = float(c_nk(n, k))
    c_rho = wt.c_rho
    regions = region_history(orb)
    out = Classification(UNDETERMINED, None, delta, regions=regions)

    if orb.truncated:
        out.reason = f"orbit truncated: {orb.reason}"
        return out
    if orb.t[-1] < MIN_T_END:
        out.reason = f"orbit ends at t={orb.t[-1]:.4g} < {MIN_T_END}"
        return out

    win = _window(orb)
    tw, xw, yw = orb.t[win], orb.x[win], orb.y[win]
    nu_p = n + l_inf
    cands = {P2: (0.0, (n - 2 * k) / k), "P3": (nu_p, 0.0), P4: p4_coords(p, l_inf)}
    dists = {lab: float(np.max(np.hypot(xw - a, yw - b))) for lab, (a, b) in cands.items()}
    best = min(dists, key=dists.get)
    out.terminal_distance = float(math.hypot(orb.x[-1] - cands[best][0], orb.y[-1] - cands[best][1]))

    verdict = UNDETERMINED
    if dists[best] < tol:
        if best == P2:
            verdict = P2
        elif best == "P3":
            if delta > 1e-12:
                verdict = P3_FAST
            elif abs(delta) <= 1e-12:
                verdict = P3_SLOW
            else:
                out.reason = "orbit tends to P3+ but delta < 0"
        elif best == P4:
            if delta < -1e-12:
                verdict = P4
            else:
                out.reason = "orbit tends to P4+ but delta >= 0"
    elif abs(delta) <= 1e-12:
        te, xe, ye = orb.t[-1], orb.x[-1], orb.y[-1]
        target = k / (q - k)
        decreasing = bool(np.all(np.diff(yw) <= 0))
        if (abs(xe - (n - 2 * k)) < 0.1 * (n - 2 * k) and abs(te * ye - target) < 0.1 * target
                and decreasing):
            verdict = P3_SLOW
            out.terminal_distance = float(math.hypot(xe - (n - 2 * k), ye))
        else:
            out.reason = f"no limit within {tol:g}; slow-decay law not met (t*y={te * ye:.4g}, target {target:.4g})"
    else:
        out.reason = f"no limit point within {tol:g} over the trailing window (closest {best}, {dists[best]:.3g})"

    out.verdict = verdict
    if verdict == UNDETERMINED:
        return out
    if verdict == P3_SLOW:
        out.limit_point = (float(n - 2 * k), 0.0)
    elif verdict == P3_FAST:
        out.limit_point = (float(nu_p), 0.0)
    else:
        out.limit_point = tuple(float(v) for v in cands[verdict])

    cr = lam * c_rho if c_rho is not None else None
    consts: dict = {}
    if verdict == P2:
        gam = p2_rate(p, l_inf)
        c1 = float(np.mean(np.exp(gam * tw) * xw))
        consts["gamma"] = gam
        consts["c1"] = c1
        if cr:
            base = (cnk * c1 / cr) ** (1 / (q - k))
            consts["c3"] = base * ((n - 2 * k) / k) ** (k / (q - k))
            consts["c4"] = base * ((n - 2 * k) / k) ** (q / (q - k))
    elif verdict == P3_FAST:
        c = float(np.mean(np.exp(delta * tw) * yw))
        consts["c"] = c
        if cr:
            consts["c1"] = (nu_p * cnk * c ** k / cr) ** (1 / (q - k))
            consts["c2"] = (nu_p * cnk * c ** q / cr) ** (1 / (q - k))
    elif verdict == P3_SLOW:
        if cr:
            consts["c3"] = (cnk * (k / (q - k)) ** k * (n - 2 * k) / cr) ** (1 / (q - k))
            consts["c4"] = (cnk * (k / (q - k)) ** q * (n - 2 * k) / cr) ** (1 / (q - k))
        consts["t_times_y"] = float(orb.t[-1] * orb.y[-1])
    elif verdict == P4:
        xt, yt = cands[P4]
        if cr:
            consts["c3"] = (cnk * xt * yt ** k / cr) ** (1 / (q - k))
            consts["c4"] = (cnk * xt * yt ** q / cr) ** (1 / (q - k))
        sp = stationary_point(p, l_inf, "P4")
        consts["P4_kind"] = sp.kind
        if "focus" in sp.kind:
            consts["unfitted"] = ["eigen-direction exponents (oscillatory approach)"]
    out.constants = consts

    kind, pred = predicted_decay(p, verdict, delta)
    if verdict == P3_SLOW:
        # the log law is asymptotic; fit over the last quarter of the orbit
        te = float(orb.t[-1])
        fit = fit_decay(orb, kind, math.exp(0.75 * te), math.exp(te))
    else:
        fit = fit_decay(orb, kind)
    fit["predicted"] = pred
    if fit.get("exponent") is not None:
        fit["relative_error"] = abs(fit["exponent"] - pred) / abs(pred)
    out.decay = fit
    return out


# ---------------------------------------------------------------------------
# slopes of the limiting graph


def _local_slope(u, v, u0, radius):
    """Slope at ``u0`` of a quadratic fit of ``v`` against ``u`` on the final approach.

    Only samples after the last one with ``|u - u0| >= radius`` are used, so
    earlier visits to the same strip (for instance near the start of the
    orbit) do not enter the fit.
    """
    far = np.nonzero(np.abs(u - u0) >= radius)[0]
    start = far[-1] + 1 if far.size else 0
    uu, vv = u[start:], v[start:]
    m = np.abs(uu - u0) < radius
    if m.sum() < 8:
        raise DomainError(f"only {int(m.sum())} samples within {radius:g} of the limit; cannot fit a slope")
    coef = np.polyfit(uu[m] - u0, vv[m], 2)
    return float(coef[1])


def slope_checks(orb: Orbit, cls: Classification, p: ProblemParams | None = None, wt=None,
                 radius: float | None = None) -> dict:
    """Compare the fitted slope of the limiting graph with its predicted value."""
    p = p or orb.params
    wt = wt or orb.weight
    if cls.verdict == UNDETERMINED:
        raise DomainError("slope checks need a classified orbit")
    n, k, q = p.n, p.k, p.q
    rep = {"verdict": cls.verdict}
    if cls.verdict == P2:
        gam = p2_rate(p, wt.l_inf)
        pred = -(n - 2 * k) / (k * k * gam + k * (n - 2 * k))
        rad = radius or 0.05
        fit = _local_slope(orb.x, orb.y, 0.0, rad)
        rep.update(quantity="yhat'(0)", predicted=pred, fitted=fit)
    elif cls.verdict == P3_SLOW:
        pred = -1.0 / q
        rad = radius or 0.05
        fit = _local_slope(orb.x, orb.y, float(n - 2 * k), rad)
        rep.update(quantity="yhat'(n-2k)", predicted=pred, fitted=fit)
    elif cls.verdict == P3_FAST:
        flags = cls.flags.get("rho.6")
        if flags is None:
            from .weights import check_assumptions

            flags = check_assumptions(wt, p).flags["rho.6"]
        nu_p = n + wt.l_inf
        delta = cls.delta
        rad = radius or 1e-3
        tt = orb.t[-1]
        zeta_end = float(wt.R_minus_linf(np.asarray(math.exp(tt))))
        # the refined law for x(t) is fitted where x - nu+ is still resolvable
        near = (orb.y > 1e-6) & (orb.y < 1e-3)
        if "1" in flags:
            kappa = math.exp(delta * tt) * zeta_end
            c = cls.constants["c"]
            pred = (kappa / c - q) * nu_p / (nu_p - delta)
            fit = _local_slope(orb.y, orb.x, 0.0, rad)
            rep.update(quantity="xhat'(0)", predicted=pred, fitted=fit, kappa=kappa)
            coef = (kappa - q * c) * nu_p / (nu_p - delta)
            seq = (orb.x[near] - nu_p) * np.exp(delta * orb.t[near])
        elif "2" in flags:
            pred = 0.0
            fit = _local_slope(orb.x, orb.y, nu_p, rad)
            rep.update(quantity="yhat'(nu+)", predicted=pred, fitted=fit)
            h = 1e-4
            zp = float(wt.R_minus_linf(np.asarray(math.exp(tt + h))))
            zm = float(wt.R_minus_linf(np.asarray(math.exp(tt - h))))
            nu_hat = -(zp - zm) / (2 * h) / zeta_end
            coef = nu_p / (nu_p - nu_hat)
            seq = (orb.x[near] - nu_p) / np.asarray(wt.R_minus_linf(np.exp(orb.t[near])))
            rep["nu_hat"] = nu_hat
        else:
            rep.update(quantity=None, predicted=None, fitted=None, reason="rho.6 does not hold")
            return rep
    else:
        rep.update(quantity=None, predicted=None, fitted=None,
                   reason="no graph slope is predicted at P4+")
        return rep
    pr, ft = rep["predicted"], rep["fitted"]
    rep["relative_deviation"] = abs(ft - pr) / abs(pr) if pr else abs(ft - pr)
    if cls.verdict == P3_FAST:
        if seq.size >= 8:
            got = float(np.mean(seq[-max(seq.size // 4, 8):]))
            rep["x_refined"] = {"predicted": coef, "fitted": got,
                                "relative_deviation": abs(got - coef) / abs(coef) if coef else abs(got)}
        else:
            rep["x_refined"] = {"predicted": coef, "fitted": None,
                                "reason": "too few samples with 1e-6 < y < 1e-3"}
    return rep


def check_inward_invariance(orb: Orbit, tol: float = G_SLACK) -> bool:
    """True iff every sample after the first one with ``G <= 0`` has ``G < tol``."""
    fld = LVField(orb.params, orb.weight)
    G, _, _ = region_values(orb.t, orb.x, orb.y, fld)
    idx = np.nonzero(G <= 0)[0]
    if idx.size == 0:
        return True
    return bool(np.all(G[idx[0]:] < tol))


def never_in_G_minus(orb: Orbit, tol: float = G_SLACK) -> bool:
    """The ``P2`` side of the equivalence: no sample has ``G <= -tol``."""
    fld = LVField(orb.params, orb.weight)
    G, _, _ = region_values(orb.t, orb.x, orb.y, fld)
    return bool(np.all(G > -tol))
