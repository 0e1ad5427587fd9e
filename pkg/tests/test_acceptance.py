"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line (shown in the terminal summary
and on stdout with ``-s``) and then asserts on the same checks.
"""

import math
from dataclasses import replace

import numpy as np

from khessian import weights as W
from khessian.bifurcation import count_solutions, intersection_count, lambda_of_a, sweep
from khessian.classify import P2, P3_FAST, P3_SLOW, P4, classify_orbit, never_in_G_minus, slope_checks
from khessian.exponents import (DEGENERATE_NODE, SADDLE, SADDLE_NODE, STABLE_FOCUS, STABLE_NODE,
                                UNSTABLE_NODE, ProblemParams, delta_param, eigen2, q_jl, q_star,
                                stationary_point, stationary_points)
from khessian.profiles import RadialSolution
from khessian.solver import (CLASSIFY, estimate_lambda_star, maximal_solution_iterate, p2_orbit,
                             regular_orbit, singular_orbit, singular_solution, solve_ivp)
from khessian.transform import LVField, forward, forward_arrays, hessian_residual, inverse, lv_rhs

NODES = {STABLE_NODE, UNSTABLE_NODE, DEGENERATE_NODE}


def test_criterion_01_example1_oracle(acceptance):
    p, wt = ProblemParams(3, 1, 3, lam=1.0), W.example1(3, 1)
    sol = solve_ivp(p, wt, -1.0, 10.0)
    exact, _ = W.example1_profile(3, 1, sol.r)
    err = float(np.max(np.abs(sol.w - exact)))
    r = np.geomspace(1e-3, 10.0, 1000)
    w, wp = W.example1_profile(3, 1, r)
    res = hessian_residual(RadialSolution(r, w, wp, -1.0, p, wt), p, wt).max
    acceptance(1, "closed-form example weight", {
        "profile error < 1e-6": err < 1e-6 and not sol.truncated and abs(sol.r[-1] - 10.0) < 1e-9,
        "closed-form residual < 1e-8": res < 1e-8,
    }, f"max error {err:.2e}, residual {res:.2e}")


def test_criterion_02_bliss_oracle(acceptance):
    p, wt = ProblemParams(3, 1, 5), W.constant(1.0)
    w0 = -3 ** 0.25
    sol = solve_ivp(p, wt, w0, 10.0)
    exact, _ = W.bliss_profile(3, 1, 0.0, 1.0, sol.r)
    err = float(np.max(np.abs(sol.w - exact)))
    cls = classify_orbit(regular_orbit(p, wt, w0, 40.0, CLASSIFY))
    exp_ = cls.decay.get("exponent")
    acceptance(2, "Bliss closed form and P2 verdict", {
        "profile error < 1e-6": err < 1e-6,
        "verdict P2": cls.verdict == P2,
        "decay -1 within 1%": exp_ is not None and abs(exp_ + 1.0) < 0.01,
    }, f"max error {err:.2e}, verdict {cls.verdict}, exponent {exp_}")


def test_criterion_03_exponent_table(acceptance):
    jl = q_jl(1, 0, 11)
    acceptance(3, "critical exponents", {
        "q*(1,0,3) = 5": q_star(1, 0, 3) == 5,
        "q*(2,2,7) = 8": q_star(2, 2, 7) == 8,
        "q*(k,-2k,n) = k": all(q_star(k, -2 * k, n) == k for n, k in [(3, 1), (5, 2), (9, 4)]),
        "q_JL(1,0,11) = 6.92198": abs(jl - 6.92198) < 1e-4,
        "q_JL(1,0,10) = inf": q_jl(1, 0, 10) == math.inf,
    }, f"q_JL(1,0,11) = {jl:.6f}")


def _stationary_table_ok(n, k, q):
    p = ProblemParams(n, k, q)
    cols = [-n - 1, -n, 0.5 * (-n - 2 * k), -2 * k, -2 * k + 1]
    ok = True
    for j, l in enumerate(cols):
        pts = {s.label: s for s in stationary_points(p, l)}
        ok &= pts["P2"].kind == SADDLE
        if j == 0:
            ok &= pts["P1"].kind in NODES and pts["P3"].kind == SADDLE and pts["P4"].kind == SADDLE
        elif j == 1:
            ok &= pts["P1"].kind == SADDLE_NODE and pts["P3"].kind == SADDLE_NODE
            ok &= pts["P4"].kind == SADDLE
        elif j == 2:
            ok &= pts["P1"].kind == SADDLE and pts["P3"].kind in NODES and pts["P4"].kind == SADDLE
        elif j == 3:
            ok &= pts["P1"].kind == SADDLE
            ok &= pts["P3"].kind == SADDLE_NODE and pts["P4"].kind == SADDLE_NODE
        else:
            ok &= pts["P1"].kind == SADDLE and pts["P3"].kind == SADDLE
            ok &= "node" in pts["P4"].kind or "focus" in pts["P4"].kind
    return bool(ok)


def test_criterion_04_stationary_points(acceptance):
    sp = stationary_point(ProblemParams(3, 1, 6), 0, "P4")
    A = np.array([[-0.6, -3.6], [0.4, 0.4]])
    ev = eigen2(A)
    acceptance(4, "stationary points and table scan", {
        "P4 = (0.6, 0.4)": np.allclose(sp.coords, (0.6, 0.4), atol=1e-14),
        "P4 stable focus": sp.kind == STABLE_FOCUS,
        "Re eigenvalues = -0.1": all(abs(z.real + 0.1) < 1e-12 for z in ev),
        "linearization matches": np.allclose(sp.linearization, A, atol=1e-14),
        "table labels": all(_stationary_table_ok(*c) for c in [(3, 1, 6), (5, 1, 3), (7, 2, 5)]),
    }, f"eigenvalues {ev[0]:.12g}, {ev[1]:.12g}")


def test_criterion_05_transform(acceptance):
    p, wt = ProblemParams(3, 1, 6), W.constant()
    fld = LVField(p, wt)
    h = 1e-3
    worst = 0.0
    for t0 in (-3.0, -1.0, 0.0, 1.5, 4.0):
        sol = solve_ivp(p, wt, -1.0, math.exp(t0 + 2 * h), CLASSIFY,
                        r_eval=np.exp(t0 + np.array([-h, 0.0, h])))
        x, y = forward_arrays(sol.w, sol.wp, sol.r, p, wt)
        fx, fy = lv_rhs(t0, x[1], y[1], fld)
        worst = max(worst, abs((x[2] - x[0]) / (2 * h) - fx), abs((y[2] - y[0]) / (2 * h) - fy))
    rt = 0.0
    rng = np.random.default_rng(7)
    for _ in range(200):
        w, wp, r = -math.exp(rng.uniform(-5, 5)), math.exp(rng.uniform(-5, 5)), math.exp(rng.uniform(-5, 5))
        w2, wp2 = inverse(forward(w, wp, r, p, wt), p, wt)
        rt = max(rt, abs(w2 - w) / abs(w), abs(wp2 - wp) / abs(wp))
    acceptance(5, "transform consistency", {
        "finite differences within 1e-5": worst < 1e-5,
        "round trip within 1e-12": rt < 1e-12,
    }, f"fd {worst:.2e}, round trip {rt:.2e}")


def test_criterion_06_orbit_start(acceptance):
    cases = [(ProblemParams(3, 1, 6), W.constant(), -1.0),
             (ProblemParams(5, 1, 3), W.rational(1, 1, 0, 3), -1.0),
             (ProblemParams(5, 1, 5), W.rational(1, 1, 3, 1), -3.0)]
    checks, worst = {}, 0.0
    for i, (p, wt, w0) in enumerate(cases):
        orb = regular_orbit(p, wt, w0, 10.0)
        t0 = orb.t[0]
        target = np.array([p.n + wt.l0, 0.0])
        d = [float(np.hypot(*(np.array(orb.at(t)) - target))) for t in (t0 + 5, t0 + 3, t0 + 1)]
        worst = max(worst, d[0])
        checks[f"instance {i + 1}"] = d[0] < 1e-3 and d[0] > d[1] > d[2]
    acceptance(6, "orbit start near (n + l0, 0)", checks, f"worst distance {worst:.2e}")


def test_criterion_07_singular(acceptance):
    p, wt = ProblemParams(3, 1, 6), W.constant()
    lt, prof = singular_solution(p, wt)
    w1 = float(prof(1.0))
    m = (prof.r >= 1e-8) & (prof.r <= 1e-5)
    slope = float(np.polyfit(np.log(prof.r[m]), np.log(-prof.w[m]), 1)[0])
    # the constant-weight orbit sits at P4, so also double T on a non-trivial weight
    t = np.linspace(-15, 10, 2001)
    dT = 0.0
    for wd in (wt, W.matukuma(2.0)):
        a, b = singular_orbit(p, wd, 30.0), singular_orbit(p, wd, 60.0)
        xa, ya = a.at(t)
        xb, yb = b.at(t)
        dT = max(dT, float(np.max(np.abs(xa - xb))), float(np.max(np.abs(ya - yb))))
    acceptance(7, "singular solution", {
        "lambda~ = 0.24": abs(lt - 0.24) < 1e-10,
        "w~(1) = -1": abs(w1 + 1.0) < 1e-10,
        "exponent -0.4 within 1%": abs(slope + 0.4) < 0.004,
        "T doubling < 1e-6": dT < 1e-6,
    }, f"lambda~ {lt:.13g}, w~(1) {w1:.13g}, slope {slope:.6f}, T-doubling {dT:.1e}")


def test_criterion_08_intersections(acceptance):
    p, wt = ProblemParams(3, 1, 6), W.constant()
    lt, sing = singular_solution(p, wt, t_end=14.0)
    pl = replace(p, lam=lt)
    total = intersection_count(sing, solve_ivp(pl, wt, -1.0, 1e6), (0.0, 1e6))
    z = [intersection_count(sing, solve_ivp(pl, wt, -a, 1.0), (0.0, 1.0)) for a in (10.0, 1e2, 1e3, 1e4)]
    acceptance(8, "intersection counts", {
        "at least 5 on (0, 1e6]": total >= 5,
        "Z nondecreasing in a": all(u <= v for u, v in zip(z, z[1:])),
    }, f"count {total}, Z = {z}")


def test_criterion_09_multiplicity(acceptance):
    p, wt = ProblemParams(3, 1, 6), W.constant()
    curve = sweep(p, wt, 1.0, 1e4, 64)
    lam_end = lambda_of_a(p, wt, 1e4, curve.lambda_tilde)
    dev = abs(lam_end - 0.24) / 0.24
    n = count_solutions(curve, 0.24)
    acceptance(9, "multiplicity on the canonical instance", {
        "lambda(1e4) within 2% of 0.24": dev < 0.02,
        "at least 3 solutions at 0.24": n >= 3,
    }, f"lambda(1e4) = {lam_end:.6f} ({dev:.2%} off), count {n}")


FLEET = [
    ("fast regular", ProblemParams(5, 1, 3), W.rational(1, 1, 0, 3), -1.0, 40.0),
    ("fast P2", ProblemParams(5, 1, 3), W.rational(1, 1, 0, 3), None, 40.0),
    ("slow regular", ProblemParams(3, 1, 6), W.rational(1, 3000, 0, 2), -0.8, 40.0),
    ("slow P2", ProblemParams(3, 1, 6), W.rational(1, 3000, 0, 2), None, 40.0),
    ("rational P4", ProblemParams(5, 1, 5), W.rational(1, 1, 3, 1), -1.0, 40.0),
    ("constant P4", ProblemParams(3, 1, 6), W.constant(), -1.0, 120.0),
    ("constant P2", ProblemParams(3, 1, 6), W.constant(), None, 40.0),
]


def _fleet_orbit(p, wt, w0, t_end):
    if w0 is None:
        return p2_orbit(p, wt, cfg=CLASSIFY)
    return regular_orbit(p, wt, w0, t_end, CLASSIFY)


def test_criterion_10_classification(acceptance):
    checks = {}
    summary = []
    deltas = set()
    for name, p, wt, w0, t_end in FLEET:
        rep = W.check_assumptions(wt, p)
        orb = _fleet_orbit(p, wt, w0, t_end)
        cls = classify_orbit(orb)
        delta = delta_param(p.k, wt.l_inf)
        deltas.add(int(np.sign(round(delta, 12))))
        gated = {P3_FAST: delta > 0, P3_SLOW: abs(delta) < 1e-12, P4: delta < 0}.get(cls.verdict, True)
        err = cls.decay.get("relative_error")
        checks[f"{name}: assumptions"] = rep.holds(*rep.entries)
        checks[f"{name}: classified"] = cls.verdict != "undetermined"
        checks[f"{name}: P2 iff outside G-"] = (cls.verdict == P2) == never_in_G_minus(orb)
        checks[f"{name}: gated by delta"] = gated
        checks[f"{name}: decay within 5%"] = err is not None and err < 0.05
        if cls.verdict == P3_SLOW:
            ty = orb.t[-1] * orb.y[-1]
            target = p.k / (p.q - p.k)
            checks[f"{name}: t*y within 10%"] = orb.t[-1] >= 40.0 and abs(ty - target) < 0.1 * target
            summary.append(f"t*y={ty:.4f}")
        summary.append(f"{name}={cls.verdict}" + (f"({err:.1e})" if err is not None else ""))
    checks["six or more instances"] = len(FLEET) >= 6
    checks["delta of every sign"] = deltas == {-1, 0, 1}
    acceptance(10, "classification equivalences", checks, ", ".join(summary))


def test_criterion_11_slopes(acceptance):
    p, wt = ProblemParams(3, 1, 3), W.example1(3, 1)
    orb = regular_orbit(p, wt, -1.0, 40.0, CLASSIFY)
    cls = classify_orbit(orb)
    s2 = slope_checks(orb, cls) if cls.verdict == P2 else {}
    ps, wts = ProblemParams(3, 1, 6), W.rational(1, 3000, 0, 2)
    orb_s = regular_orbit(ps, wts, -0.8, 40.0, CLASSIFY)
    cls_s = classify_orbit(orb_s)
    ss = slope_checks(orb_s, cls_s) if cls_s.verdict == P3_SLOW else {}
    acceptance(11, "graph slopes", {
        "l_inf = -2": wt.l_inf == -2,
        "P2 slope -1/3 within 2%": s2.get("relative_deviation", 1.0) < 0.02
                                   and abs(s2.get("predicted", 0) + 1 / 3) < 1e-12,
        "slow slope -1/q within 5%": ss.get("relative_deviation", 1.0) < 0.05
                                     and abs(ss.get("predicted", 0) + 1 / 6) < 1e-12,
    }, f"P2 {s2.get('fitted')}, slow {ss.get('fitted')}")


def test_criterion_12_lambda_star(acceptance):
    p = ProblemParams(3, 1, 3)
    lo, hi = estimate_lambda_star(p, W.constant())
    lo2, hi2 = estimate_lambda_star(p, W.constant(2.0))
    width = hi - lo
    res = maximal_solution_iterate(replace(p, lam=0.5 * (8 / 9 + lo)), W.constant(), keep_history=True)
    mono = all(np.all(b <= a + 1e-12) for a, b in zip(res.history, res.history[1:]))
    acceptance(12, "lambda* bounds", {
        "lower end >= 8/9": lo >= 8 / 9,
        "iterates decreasing": res.converged and mono,
        "doubling rho halves the bracket": abs(lo2 - lo / 2) <= width and abs(hi2 - hi / 2) <= width,
    }, f"bracket ({lo:.6f}, {hi:.6f}), doubled ({lo2:.6f}, {hi2:.6f})")
