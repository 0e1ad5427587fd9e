"""Weight functions rho(r) and their structural constants.

A weight is stored together with its logarithmic derivative
``R(r) = r rho'(r) / rho(r)``, the limits ``l0 = R(0+)`` and
``l_inf = R(+inf)``, the tail rate ``vartheta`` and the normalising limits
``K0 = lim_{r->0} r^{-l0} rho(r)`` and ``c_rho = lim_{r->inf} r^{-l_inf} rho(r)``.

Examples
--------
>>> from khessian.weights import rational, estimate_limits
>>> w = rational(a=1.0, atilde=1.0, beta=3.0, gamma=1.0)
>>> [round(v, 6) for v in estimate_limits(w)]
[3.0, 2.0]
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline
from scipy.special import expit, roots_legendre

from .errors import ConstructionError, DomainError, EstimationError, NumericError
from .exponents import ProblemParams, delta_param, q_star

Evaluator = Callable[[np.ndarray], np.ndarray]

#: relative step (in ln r) of the centred log-derivative
LOG_STEP = 1e-6
#: disagreement between extrapolation levels that counts as non-convergence
LIMIT_SPREAD = 1e-4
SMALL_GRID = 10.0 ** -np.arange(2, 9)
LARGE_GRID = 10.0 ** np.arange(2, 9)

HOLDS = "holds"
FAILS = "fails"
UNCHECKED = "unchecked"


def _as_vector(f):
    """Wrap ``f`` so it accepts arrays even when written for scalars."""

    def g(r):
        arr = np.asarray(r, dtype=float)
        try:
            out = np.asarray(f(arr), dtype=float)
            if out.shape == arr.shape:
                return out
            if out.ndim == 0:
                return np.full(arr.shape, float(out))
        except (TypeError, ValueError):
            pass
        return np.vectorize(lambda s: float(f(s)), otypes=[float])(arr)

    return g


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """Immutable description of a weight ``rho``.

    Parameters
    ----------
    rho : callable
        Vectorised evaluator ``r -> rho(r)``.
    R : callable
        Vectorised evaluator ``r -> r rho'(r) / rho(r)``.
    l0, l_inf : float
        Limits of ``R`` at ``0+`` and ``+inf``.
    vartheta : float or None
        Rate with ``R - l_inf = O(r^-vartheta)``; ``None`` when ``R`` is
        identically ``l_inf`` (any rate works) or unknown.
    K0, c_rho : float or None
        Limits of ``r^-l0 rho`` at ``0+`` and ``r^-l_inf rho`` at ``+inf``.
    kind : str
        One of ``constant, power, rational, matukuma, example1,
        custom-from-R, tabulated``.
    log_rho : callable, optional
        Vectorised ``ln rho``; defaults to ``log(rho(r))``.
    params : dict
        Constructor parameters, kept for reports and config round-trips.
    """

    rho: Evaluator
    R: Evaluator
    l0: float
    l_inf: float
    vartheta: Optional[float]
    K0: float
    c_rho: Optional[float]
    kind: str
    log_rho: Optional[Evaluator] = None
    params: dict = field(default_factory=dict)
    exact_rho: Optional[Evaluator] = None
    tail: Optional[Evaluator] = None

    def R_minus_linf(self, r):
        """``R(r) - l_inf``, evaluated without cancellation when a closed form exists."""
        if self.tail is not None:
            return self.tail(r)
        return np.asarray(self.R(r), dtype=float) - self.l_inf

    def ln_rho(self, r):
        if self.log_rho is not None:
            return self.log_rho(r)
        return np.log(self.rho(r))

    def K(self, r):
        """``K(r) = r^-l0 rho(r)``."""
        r = np.asarray(r, dtype=float)
        return np.exp(self.ln_rho(r) - self.l0 * np.log(r))

    def scaled(self, c: float) -> "WeightSpec":
        """The weight ``c * rho``; ``R`` and the limits are unchanged."""
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        rho, lr, ex = self.rho, self.ln_rho, self.exact_rho
        lc = math.log(c)
        return WeightSpec(
            rho=lambda r: c * rho(r),
            R=self.R, l0=self.l0, l_inf=self.l_inf, vartheta=self.vartheta,
            K0=c * self.K0,
            c_rho=None if self.c_rho is None else c * self.c_rho,
            kind=self.kind,
            log_rho=lambda r: lc + lr(r),
            params={**self.params, "scale": c * self.params.get("scale", 1.0)},
            exact_rho=None if ex is None else (lambda r: c * ex(r)),
            tail=self.tail,
        )

    def describe(self) -> dict:
        return {
            "kind": self.kind, "params": dict(self.params), "l0": self.l0,
            "l_inf": self.l_inf, "vartheta": self.vartheta, "K0": self.K0,
            "c_rho": self.c_rho,
        }


def eval_rho(w: WeightSpec, r: float) -> float:
    """Evaluate ``rho(r)`` for ``r > 0``.

    For ``custom-from-R`` weights this goes through the integral
    ``K0 r^l0 exp(int_0^r (R(s) - l0)/s ds)`` by adaptive quadrature rather
    than the interpolation table used inside the integrators.
    """
    if not r > 0:
        raise DomainError(f"rho is evaluated for r > 0 only, got r={r}")
    f = w.exact_rho if w.exact_rho is not None else w.rho
    return float(f(np.asarray(float(r))))


def numeric_R(rho: Evaluator, r, h: float = LOG_STEP):
    """Centred difference of ``ln rho`` in ``ln r``."""
    r = np.asarray(r, dtype=float)
    up = np.log(rho(r * math.exp(h)))
    dn = np.log(rho(r * math.exp(-h)))
    return (up - dn) / (2 * h)


def _extrapolate(vals: np.ndarray) -> tuple[float, float]:
    """Aitken-accelerated limit of a sequence and the spread of the last levels."""
    est = []
    for a, b, c in zip(vals[:-2], vals[1:-1], vals[2:]):
        den = c - 2 * b + a
        if abs(den) < 1e-14 * max(1.0, abs(c)) or abs(c - b) < 1e-13:
            est.append(c)
        else:
            est.append(c - (c - b) ** 2 / den)
    est = np.array(est)
    lim = est[-1]
    spread = float(np.max(np.abs(est[-3:] - lim)))
    return float(lim), spread


def estimate_limits(w: WeightSpec) -> tuple[float, float]:
    """Extrapolate ``R`` to ``r -> 0`` and ``r -> inf``.

    Raises
    ------
    EstimationError
        When the extrapolation levels disagree by more than ``1e-4`` or the
        samples are not finite.
    """
    out = []
    for grid, side in ((SMALL_GRID, "0+"), (LARGE_GRID, "+inf")):
        vals = np.asarray(w.R(grid), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise EstimationError(f"R is not finite on the {side} grid: {vals.tolist()}")
        lim, spread = _extrapolate(vals)
        if spread > LIMIT_SPREAD:
            raise EstimationError(
                f"limit of R at {side} did not settle: spread {spread:.3g}, samples {vals.tolist()}"
            )
        out.append(lim)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# built-in families


def constant(c: float = 1.0) -> WeightSpec:
    if not c > 0:
        raise DomainError(f"constant weight needs c > 0, got {c}")
    return WeightSpec(
        rho=lambda r: np.full(np.shape(r), float(c)),
        R=lambda r: np.zeros(np.shape(r)),
        l0=0.0, l_inf=0.0, vartheta=None, K0=float(c), c_rho=float(c),
        kind="constant", log_rho=lambda r: np.full(np.shape(r), math.log(c)),
        params={"c": c},
    )


def power(sigma: float, c: float = 1.0) -> WeightSpec:
    """``c r^sigma``."""
    if not c > 0:
        raise DomainError(f"power weight needs c > 0, got {c}")
    lc = math.log(c)
    return WeightSpec(
        rho=lambda r: c * np.asarray(r, dtype=float) ** sigma,
        R=lambda r: np.full(np.shape(r), float(sigma)),
        l0=float(sigma), l_inf=float(sigma), vartheta=None, K0=float(c), c_rho=float(c),
        kind="power", log_rho=lambda r: lc + sigma * np.log(r),
        params={"sigma": sigma, "c": c},
    )


def rational(a: float, atilde: float, beta: float, gamma: float) -> WeightSpec:
    """``a r^beta / (atilde + r^gamma)`` with ``a, atilde, gamma > 0``."""
    if not (a > 0 and atilde > 0 and gamma > 0):
        raise DomainError(f"rational weight needs a, atilde, gamma > 0; got {a}, {atilde}, {gamma}")
    la, lat = math.log(a), math.log(atilde)

    def log_rho(r):
        lr = np.log(r)
        # ln(atilde + r^gamma) without overflow
        return la + beta * lr - np.logaddexp(lat, gamma * lr)

    def R(r):
        lr = np.log(np.asarray(r, dtype=float))
        # r^gamma / (atilde + r^gamma) as a logistic in ln r
        return beta - gamma * expit(gamma * lr - lat)

    def tail(r):
        return gamma * expit(lat - gamma * np.log(np.asarray(r, dtype=float)))

    return WeightSpec(
        rho=lambda r: np.exp(log_rho(r)), R=R,
        l0=float(beta), l_inf=float(beta - gamma), vartheta=float(gamma),
        K0=a / atilde, c_rho=float(a), kind="rational", log_rho=log_rho,
        params={"a": a, "atilde": atilde, "beta": beta, "gamma": gamma}, tail=tail,
    )


def matukuma(mu: float) -> WeightSpec:
    """``r^(mu-2) (1 + r^2)^(-mu/2)``."""
    if not mu > 0:
        raise DomainError(f"Matukuma weight needs mu > 0, got {mu}")

    def log_rho(r):
        lr = np.log(r)
        return (mu - 2) * lr - 0.5 * mu * np.logaddexp(0.0, 2 * lr)

    def R(r):
        with np.errstate(divide="ignore"):
            lr = np.log(np.asarray(r, dtype=float))
        return (mu - 2) - mu * expit(2 * lr)

    def tail(r):
        with np.errstate(divide="ignore"):
            return mu * expit(-2 * np.log(np.asarray(r, dtype=float)))

    return WeightSpec(
        rho=lambda r: np.exp(log_rho(r)), R=R,
        l0=float(mu - 2), l_inf=-2.0, vartheta=2.0, K0=1.0, c_rho=1.0,
        kind="matukuma", log_rho=log_rho, params={"mu": mu}, tail=tail,
    )


def example1(n: int, k: int) -> WeightSpec:
    """Weight carrying the explicit solution ``w = -(1 + r^2)^{-(n-2k)/(2k)}``.

    ``rho = c_{n,k} ((n-2k)/k)^k n / (1 + r^2)`` and the exponent is forced
    to ``q = kn/(n-2k)``.
    """
    if not (k >= 1 and n > 2 * k):
        raise DomainError(f"need n > 2k >= 2, got n={n}, k={k}")
    amp = float(Fraction(comb(n, k), n) * Fraction(n - 2 * k, k) ** k * n)
    w = rational(amp, 1.0, 0.0, 2.0)
    return WeightSpec(
        rho=w.rho, R=w.R, l0=0.0, l_inf=-2.0, vartheta=2.0, K0=amp, c_rho=amp,
        kind="example1", log_rho=w.log_rho, tail=w.tail,
        params={"n": n, "k": k, "amplitude": amp, "q": k * n / (n - 2 * k)},
    )


def example1_profile(n: int, k: int, r):
    """The explicit profile ``w`` and ``w'`` solving the problem with :func:`example1`."""
    r = np.asarray(r, dtype=float)
    th = (n - 2 * k) / (2 * k)
    w = -(1 + r * r) ** (-th)
    return w, 2 * th * r * (1 + r * r) ** (-th - 1)


def bliss_profile(n: int, k: int, sigma: float, c: float, r):
    """Bliss-type profile solving ``S_k(D^2 w) = r^sigma (-w)^q`` at ``q = q*(k, sigma)``."""
    r = np.asarray(r, dtype=float)
    cnk = comb(n, k) / n
    m = (2 * k + sigma) / k
    e = (n - 2 * k) / (2 * k + sigma)
    K = (cnk * (n + sigma) * ((n - 2 * k) / k) ** k * c) ** ((n - 2 * k) / ((2 * k + sigma) * (k + 1)))
    base = c + r ** m
    w = -K * base ** (-e)
    wp = K * e * m * r ** (m - 1) * base ** (-e - 1)
    return w, wp


# ---------------------------------------------------------------------------
# general construction from R

_TABLE_T = (-60.0, 60.0)
_TABLE_H = 0.02
_GL_NODES, _GL_WEIGHTS = roots_legendre(8)


def _quad(f, a, b, what):
    val, err = integrate.quad(f, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
    if not np.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise NumericError(f"quadrature for {what} on [{a}, {b}] did not converge (err {err:.3g})")
    return val


def _divergence_check(g, what):
    """Cauchy test on ``int_{-L}^0 g`` for ``L = 50, 100, 200, 400``."""
    pieces = []
    for lo, hi in ((-100.0, -50.0), (-200.0, -100.0), (-400.0, -200.0)):
        val, _ = integrate.quad(g, lo, hi, limit=400)
        pieces.append(abs(val))
    head = abs(integrate.quad(g, -50.0, 0.0, limit=400)[0])
    if pieces[-1] > 1e-6 * max(1.0, head) or not (pieces[2] <= pieces[0] + 1e-12):
        raise ConstructionError(
            f"{what} diverges: tail contributions {pieces} do not vanish"
        )


def build_weight_from_R(Rfun, l0: float, K0: float = 1.0) -> WeightSpec:
    """Weight ``K0 r^l0 exp(int_0^r (R(s) - l0)/s ds)`` from a log-derivative.

    Parameters
    ----------
    Rfun : callable
        ``r -> R(r)``; scalar or vectorised.
    l0 : float
        Limit of ``R`` at ``0+``.
    K0 : float
        Positive limit of ``r^-l0 rho(r)`` at ``0+``.

    Raises
    ------
    ConstructionError
        When ``int_0 (R(s) - l0)/s ds`` diverges at the origin.
    """
    if not K0 > 0:
        raise DomainError(f"K0 must be positive, got {K0}")
    R = _as_vector(Rfun)

    def g(u):
        return float(R(np.asarray(math.exp(u)))) - l0

    _divergence_check(g, "int_0 (R - l0)/s ds")

    # table of ln K on a uniform grid in t = ln r
    t0, t1 = _TABLE_T
    m = int(round((t1 - t0) / _TABLE_H))
    tg = np.linspace(t0, t1, m + 1)
    mid = 0.5 * (tg[:-1] + tg[1:])
    half = 0.5 * _TABLE_H
    nodes = mid[:, None] + half * _GL_NODES[None, :]
    gv = R(np.exp(nodes)) - l0
    panel = half * gv @ _GL_WEIGHTS
    base = _quad(g, -np.inf, t0, "ln K tail")
    lnK = base + np.concatenate([[0.0], np.cumsum(panel)])
    spline = CubicHermiteSpline(tg, lnK, R(np.exp(tg)) - l0)
    lnK0 = math.log(K0)

    def lnK_exact(t):
        if t <= 0:
            return _quad(g, -np.inf, t, "ln K")
        return _quad(g, -np.inf, 0.0, "ln K") + _quad(g, 0.0, t, "ln K")

    def log_rho(r):
        r = np.asarray(r, dtype=float)
        t = np.log(r)
        inside = (t >= t0) & (t <= t1)
        out = np.empty_like(t)
        out[inside] = spline(t[inside])
        for idx in zip(*np.nonzero(~inside)):
            out[idx] = lnK_exact(float(t[idx]))
        return lnK0 + l0 * t + out

    def exact_rho(r):
        t = float(np.log(r))
        return np.asarray(K0 * math.exp(l0 * t + lnK_exact(t)))

    # limit at infinity and the constant c_rho, when they exist
    l_inf = float("nan")
    c_rho = None
    vals = R(LARGE_GRID)
    if np.all(np.isfinite(vals)):
        lim, spread = _extrapolate(vals)
        if spread <= LIMIT_SPREAD:
            l_inf = lim
            try:
                head = _quad(g, -np.inf, 0.0, "ln c_rho")
                tail = _quad(lambda u: float(R(np.asarray(math.exp(u)))) - l_inf, 0.0, 700.0, "ln c_rho")
                c_rho = K0 * math.exp(head + tail)
            except NumericError:
                c_rho = None

    return WeightSpec(
        rho=lambda r: np.exp(log_rho(r)), R=R, l0=float(l0), l_inf=l_inf,
        vartheta=None, K0=float(K0), c_rho=c_rho, kind="custom-from-R",
        log_rho=log_rho, params={"l0": l0, "K0": K0}, exact_rho=exact_rho,
    )


# ---------------------------------------------------------------------------
# tabulated weights


def tabulated(r_samples, rho_samples) -> WeightSpec:
    """Weight interpolated linearly in ``(ln r, ln rho)``, extended by the end slopes."""
    r_s = np.asarray(r_samples, dtype=float)
    p_s = np.asarray(rho_samples, dtype=float)
    if r_s.ndim != 1 or r_s.size < 2 or r_s.shape != p_s.shape:
        raise DomainError("tabulated weight needs two matching columns with at least 2 rows")
    if np.any(r_s <= 0) or np.any(np.diff(r_s) <= 0):
        raise DomainError("tabulated r must be positive and strictly increasing")
    if np.any(p_s <= 0):
        bad = int(np.argmax(p_s <= 0))
        raise DomainError(f"tabulated rho must be positive; row {bad + 2} has rho={p_s[bad]}")
    lr, lp = np.log(r_s), np.log(p_s)
    slopes = np.diff(lp) / np.diff(lr)

    def log_rho(r):
        x = np.log(np.asarray(r, dtype=float))
        y = np.interp(x, lr, lp)
        y = np.where(x < lr[0], lp[0] + slopes[0] * (x - lr[0]), y)
        return np.where(x > lr[-1], lp[-1] + slopes[-1] * (x - lr[-1]), y)

    def R(r):
        x = np.log(np.asarray(r, dtype=float))
        idx = np.clip(np.searchsorted(lr, x, side="right") - 1, 0, slopes.size - 1)
        return slopes[idx]

    l0, l_inf = float(slopes[0]), float(slopes[-1])
    return WeightSpec(
        rho=lambda r: np.exp(log_rho(r)), R=R, l0=l0, l_inf=l_inf, vartheta=None,
        K0=float(math.exp(lp[0] - l0 * lr[0])),
        c_rho=float(math.exp(lp[-1] - l_inf * lr[-1])),
        kind="tabulated", log_rho=log_rho, params={"rows": int(r_s.size)},
    )


def load_tabulated(path) -> WeightSpec:
    """Read a ``r,rho`` CSV file (header required)."""
    rs, ps = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"r", "rho"} <= set(reader.fieldnames):
            raise DomainError(f"{path}: expected header with columns r,rho")
        for lineno, row in enumerate(reader, start=2):
            try:
                rs.append(float(row["r"]))
                ps.append(float(row["rho"]))
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{path}:{lineno}: bad number ({exc})") from None
    w = tabulated(rs, ps)
    return WeightSpec(**{**w.__dict__, "params": {**w.params, "path": str(path)}})


BUILTIN_KINDS = ("constant", "power", "rational", "matukuma", "example1", "tabulated")


def weight_from_config(block: dict, n: int | None = None, k: int | None = None) -> WeightSpec:
    """Build a weight from a ``[weight]`` config block (string values accepted)."""
    kind = str(block.get("kind", "")).strip()

    def num(name, default=None):
        if name not in block:
            if default is None:
                raise DomainError(f"[weight] kind={kind} needs field '{name}'")
            return default
        try:
            return float(block[name])
        except ValueError:
            raise DomainError(f"[weight] field '{name}' is not a number: {block[name]!r}") from None

    if kind == "constant":
        return constant(num("c", 1.0))
    if kind == "power":
        return power(num("sigma"), num("c", 1.0))
    if kind == "rational":
        return rational(num("a"), num("atilde"), num("beta"), num("gamma"))
    if kind == "matukuma":
        return matukuma(num("mu"))
    if kind == "example1":
        nn = int(num("n", float(n) if n is not None else None))
        kk = int(num("k", float(k) if k is not None else None))
        return example1(nn, kk)
    if kind == "tabulated":
        if "path" not in block:
            raise DomainError("[weight] kind=tabulated needs field 'path'")
        return load_tabulated(block["path"])
    raise DomainError(f"[weight] unknown kind {kind!r}; expected one of {', '.join(BUILTIN_KINDS)}")


# ---------------------------------------------------------------------------
# assumption checks


@dataclass
class AssumptionEntry:
    status: str
    witness: Optional[dict] = None
    detail: str = ""

    def to_dict(self):
        return {"status": self.status, "witness": self.witness, "detail": self.detail}


@dataclass
class AssumptionReport:
    """Sampling-based verdicts on the hypotheses about the weight.

    ``entries`` maps ``rho.1`` ... ``rho.6`` to an :class:`AssumptionEntry`.
    ``flags`` lists which alternatives (``"1"``, ``"2"``) of ``rho.2``,
    ``rho.4`` and ``rho.6`` hold, plus ``boundary_q_star`` when ``q``
    equals ``q*(k, l0)``. Verdicts are "holds on grid", not proofs.
    """

    entries: dict
    flags: dict
    l0: float
    l_inf: float
    vartheta: Optional[float]
    delta: float
    q_star_l0: float
    grid: dict

    def status(self, name: str) -> str:
        return self.entries[name].status

    def holds(self, *names: str) -> bool:
        return all(self.entries[nm].status == HOLDS for nm in names)

    def to_dict(self) -> dict:
        return {
            "entries": {k: v.to_dict() for k, v in self.entries.items()},
            "flags": dict(self.flags),
            "l0": self.l0, "l_inf": self.l_inf, "vartheta": self.vartheta,
            "delta": self.delta, "q_star_l0": self.q_star_l0, "grid": dict(self.grid),
        }


def _wit(r, v):
    return {"r": float(r), "value": float(v)}


def fit_tail_rate(w: WeightSpec, lo: float = 1e2, hi: float = 1e4, points: int = 41):
    """Fit ``ln|R - l_inf|`` against ``ln r`` on ``[lo, hi]``.

    Returns ``(vartheta, residual)``; ``(None, 0.0)`` when ``R`` equals
    ``l_inf`` on the whole window.
    """
    r = np.geomspace(lo, hi, points)
    d = np.abs(np.asarray(w.R_minus_linf(r), dtype=float))
    if np.all(d < 1e-13):
        return None, 0.0
    mask = d > 0
    if mask.sum() < 3:
        return float("nan"), float("inf")
    x, y = np.log(r[mask]), np.log(d[mask])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = math.sqrt(float(res[0]) / mask.sum()) if res.size else 0.0
    return float(-coef[0]), resid


def check_assumptions(w: WeightSpec, p: ProblemParams, points: int = 2000,
                      r_min: float = 1e-6, r_max: float = 1e6) -> AssumptionReport:
    """Test the structural hypotheses on a log grid over ``[r_min, r_max]``."""
    n, k, q = p.n, p.k, p.q
    r = np.geomspace(r_min, r_max, points)
    entries: dict = {}
    flags: dict = {"rho.2": [], "rho.4": [], "rho.6": [], "boundary_q_star": False}
    l0, l_inf = w.l0, w.l_inf
    qs = q_star(k, l0, n)
    delta = delta_param(k, l_inf) if np.isfinite(l_inf) else float("nan")
    grid = {"r_min": r_min, "r_max": r_max, "points": points}

    # rho.1: positivity, finiteness, continuity at 0
    rho = np.asarray(w.rho(r), dtype=float)
    bad = ~(np.isfinite(rho) & (rho > 0))
    if bad.any():
        i = int(np.argmax(bad))
        entries["rho.1"] = AssumptionEntry(FAILS, _wit(r[i], rho[i]), "rho not positive and finite")
    elif l0 < 0:
        entries["rho.1"] = AssumptionEntry(
            FAILS, _wit(r[0], rho[0]), f"rho is unbounded at 0 (l0={l0} < 0), not continuous on [0, inf)")
    else:
        entries["rho.1"] = AssumptionEntry(HOLDS, detail="positive and finite on grid")

    # rho.2: l0 >= R and q against q*(k, l0)
    Rv = np.asarray(w.R(r), dtype=float)
    imax = int(np.argmax(Rv))
    strict = bool(np.all(Rv < l0))
    weak = bool(np.all(Rv <= l0 + 1e-12))
    on_boundary = abs(q - qs) <= 1e-12 * max(1.0, abs(qs))
    flags["boundary_q_star"] = on_boundary
    if strict and q >= qs - 1e-12 * max(1.0, abs(qs)):
        flags["rho.2"].append("1")
    if weak and q > qs and not on_boundary:
        flags["rho.2"].append("2")
    if flags["rho.2"]:
        entries["rho.2"] = AssumptionEntry(HOLDS, detail=f"cases {flags['rho.2']} hold on grid; q*={qs}")
    else:
        why = []
        if not weak:
            why.append(f"R exceeds l0={l0}")
        elif not strict:
            why.append("R reaches l0, so the strict branch needs q > q*")
        if q < qs or on_boundary:
            why.append(f"q={q} vs q*(k,l0)={qs}")
        entries["rho.2"] = AssumptionEntry(FAILS, _wit(r[imax], Rv[imax]), "; ".join(why))

    # rho.3: K = r^-l0 rho bounded and positive
    Kv = np.asarray(w.K(r), dtype=float)
    if not np.all(np.isfinite(Kv) & (Kv > 0)):
        i = int(np.argmax(~(np.isfinite(Kv) & (Kv > 0))))
        entries["rho.3"] = AssumptionEntry(FAILS, _wit(r[i], Kv[i]), "K not positive and finite")
    else:
        tail = Kv[-points // 12:]
        growing = tail[-1] > tail[0] * (1 + 1e-6) and int(np.argmax(Kv)) >= points - points // 12
        if growing:
            entries["rho.3"] = AssumptionEntry(FAILS, _wit(r[-1], Kv[-1]), "K grows at the end of the grid")
        else:
            entries["rho.3"] = AssumptionEntry(
                HOLDS, detail=f"max K/K0 = {float(Kv.max() / w.K0):.12g} on grid")

    # rho.4: l_inf against l0
    if not np.isfinite(l_inf):
        entries["rho.4"] = AssumptionEntry(FAILS, _wit(r[-1], Rv[-1]), "limit of R at infinity not available")
    else:
        if l_inf < l0 and q >= qs - 1e-12 * max(1.0, abs(qs)):
            flags["rho.4"].append("1")
        if l_inf <= l0 + 1e-12 and q > qs and not on_boundary:
            flags["rho.4"].append("2")
        if flags["rho.4"]:
            entries["rho.4"] = AssumptionEntry(HOLDS, detail=f"cases {flags['rho.4']}")
        else:
            entries["rho.4"] = AssumptionEntry(
                FAILS, _wit(r[-1], Rv[-1]), f"l_inf={l_inf}, l0={l0}, q={q}, q*={qs}")

    # rho.5: algebraic approach to l_inf
    theta, resid = (None, 0.0) if not np.isfinite(l_inf) else fit_tail_rate(w)
    if not np.isfinite(l_inf):
        entries["rho.5"] = AssumptionEntry(UNCHECKED, detail="no l_inf")
    elif theta is None:
        entries["rho.5"] = AssumptionEntry(HOLDS, detail="R equals l_inf on the tail window")
    elif np.isfinite(theta) and theta > 0 and resid < 0.05:
        entries["rho.5"] = AssumptionEntry(HOLDS, detail=f"fitted vartheta={theta:.6g}, residual {resid:.3g}")
    else:
        rr = np.geomspace(1e2, 1e4, 5)
        dv = np.abs(np.asarray(w.R_minus_linf(rr)))
        entries["rho.5"] = AssumptionEntry(
            FAILS, _wit(rr[-1], dv[-1]), f"no algebraic rate: slope fit {theta}, residual {resid:.3g}")
    vth = w.vartheta if w.vartheta is not None else (theta if theta is not None and np.isfinite(theta) else None)

    # rho.6 through the sufficient condition rho.6'
    nu_plus = n + l_inf
    if not np.isfinite(l_inf):
        entries["rho.6"] = AssumptionEntry(UNCHECKED, detail="no l_inf")
    elif theta is None:
        # zeta vanishes identically: case (1) with limit 0
        if nu_plus > delta:
            flags["rho.6"].append("1")
            entries["rho.6"] = AssumptionEntry(HOLDS, detail="R - l_inf vanishes on the tail; nu+ > delta")
        else:
            entries["rho.6"] = AssumptionEntry(FAILS, _wit(r[-1], nu_plus), f"nu+={nu_plus} <= delta={delta}")
    elif vth is None:
        entries["rho.6"] = AssumptionEntry(UNCHECKED, detail="tail rate unknown")
    else:
        rt = np.geomspace(1e4, 1e6, 201)
        psi = rt ** vth * np.abs(np.asarray(w.R_minus_linf(rt)))
        ok_a = bool(np.min(psi) > 1e-10)
        ok_b = nu_plus > min(delta, vth)
        same = abs(delta - vth) <= 1e-9
        ok_c = (not same) or bool(abs(psi[-1] - psi[-21]) <= 1e-3 * abs(psi[-1]))
        if ok_a and ok_b and ok_c:
            flags["rho.6"].append("1" if delta <= vth else "2")
            entries["rho.6"] = AssumptionEntry(
                HOLDS, detail=f"via rho.6': psi liminf > 0, nu+={nu_plus} > min(delta, vartheta)")
        else:
            i = int(np.argmin(psi))
            entries["rho.6"] = AssumptionEntry(
                FAILS, _wit(rt[i], psi[i]),
                f"rho.6' fails: liminf psi>0 {ok_a}, nu+>min(delta,vartheta) {ok_b}, psi limit {ok_c}")

    return AssumptionReport(entries, flags, l0, l_inf, vth, delta, qs, grid)
