"""Change of variables between radial profiles and Lotka-Volterra orbits.

For a negative increasing profile ``w`` of
``c_{n,k} r^{1-n} (r^{n-k} (w')^k)' = lam rho(r) (-w)^q`` put::

    x = r^k lam rho(r) (-w)^q / (c_{n,k} (w')^k),   y = r w' / (-w),   t = ln r.

Then ``(x, y)`` solves the quadratic system::

    x' = x (nu(t) - x - q y),   y' = y (-(n-2k)/k + x/k + y),

with ``nu(t) = n + R(e^t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np
from scipy import integrate
from scipy.interpolate import make_interp_spline
from scipy.special import roots_legendre

from .errors import DomainError
from .exponents import ProblemParams
from .weights import WeightSpec

#: beyond this |t| the weight is replaced by its limit power law
T_GUARD = 700.0


def c_nk(n: int, k: int) -> Fraction:
    """``binom(n, k) / n`` as an exact rational."""
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    return Fraction(comb(n, k), n)


@dataclass(frozen=True)
class PhasePoint:
    t: float
    x: float
    y: float


def _log_prefactor(p: ProblemParams, wt: WeightSpec, r):
    """``ln(lam rho(r) / c_{n,k})``."""
    return math.log(p.lam) - math.log(float(c_nk(p.n, p.k))) + wt.ln_rho(r)


def forward(w_val: float, w_deriv: float, r: float, p: ProblemParams, wt: WeightSpec) -> PhasePoint:
    """Map ``(w, w', r)`` to ``(t, x, y)``; needs ``w < 0``, ``w' > 0``, ``r > 0``."""
    if not (w_val < 0 and w_deriv > 0 and r > 0):
        raise DomainError(f"transform needs w < 0, w' > 0, r > 0; got w={w_val}, w'={w_deriv}, r={r}")
    x, y = forward_arrays(np.array([w_val]), np.array([w_deriv]), np.array([r]), p, wt)
    return PhasePoint(math.log(r), float(x[0]), float(y[0]))


def forward_arrays(w, wp, r, p: ProblemParams, wt: WeightSpec):
    """Vectorised :func:`forward`; returns ``(x, y)`` arrays."""
    w, wp, r = (np.asarray(a, dtype=float) for a in (w, wp, r))
    if np.any(w >= 0) or np.any(wp <= 0) or np.any(r <= 0):
        raise DomainError("transform needs w < 0, w' > 0 and r > 0 at every sample")
    lr = np.log(r)
    lx = p.k * lr + _log_prefactor(p, wt, r) + p.q * np.log(-w) - p.k * np.log(wp)
    return np.exp(lx), r * wp / (-w)


def inverse(pt: PhasePoint, p: ProblemParams, wt: WeightSpec) -> tuple[float, float]:
    """Recover ``(w, w')`` at ``r = e^t`` from a phase point with ``x, y > 0``."""
    if not (pt.x > 0 and pt.y > 0):
        raise DomainError(f"inverse transform needs x > 0 and y > 0, got x={pt.x}, y={pt.y}")
    w, wp = inverse_arrays(np.array([pt.t]), np.array([pt.x]), np.array([pt.y]), p, wt)
    return float(w[0]), float(wp[0])


def inverse_arrays(t, x, y, p: ProblemParams, wt: WeightSpec):
    t, x, y = (np.asarray(a, dtype=float) for a in (t, x, y))
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("inverse transform needs x > 0 and y > 0 at every sample")
    k, q = p.k, p.q
    r = np.exp(t)
    lw = (np.log(x) + k * np.log(y) - _log_prefactor(p, wt, r) - 2 * k * t) / (q - k)
    w = -np.exp(lw)
    return w, -w * y / r


@dataclass(frozen=True, eq=False)
class LVField:
    """The non-autonomous field with ``nu(t) = n + R(e^t)``."""

    params: ProblemParams
    weight: WeightSpec

    @property
    def nu_minus(self) -> float:
        return self.params.n + self.weight.l0

    @property
    def nu_plus(self) -> float:
        return self.params.n + self.weight.l_inf

    def nu(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, -T_GUARD, T_GUARD)
        out = self.params.n + np.asarray(self.weight.R(np.exp(tc)), dtype=float)
        out = np.where(t < -T_GUARD, self.nu_minus, out)
        out = np.where(t > T_GUARD, self.nu_plus, out)
        return out if out.ndim else float(out)


def lv_rhs(t, x, y, field: LVField):
    """Right-hand side of the Lotka-Volterra system."""
    p = field.params
    dx = x * (field.nu(t) - x - p.q * y)
    dy = y * (-(p.n - 2 * p.k) / p.k + x / p.k + y)
    return dx, dy


@dataclass(frozen=True, eq=False)
class ResidualReport:
    max: float
    l2: float
    r: np.ndarray
    residual: np.ndarray


_GL_X, _GL_W = roots_legendre(10)


def hessian_residual(sol, p: ProblemParams, wt: WeightSpec) -> ResidualReport:
    """Relative defect of the integral identity along a sampled profile.

    At each sample ``r`` compare ``c_{n,k} r^{n-k} (w')^k`` with
    ``lam int_0^r s^{n-1} rho(s) (-w(s))^q ds``, normalised by the latter.
    The integral is taken over a degree-5 spline of the log-integrand in
    ``t = ln s``; the piece below the first sample uses the leading-order
    local model of the profile, so nothing is differentiated twice.
    """
    r = np.asarray(sol.r, dtype=float)
    w = np.asarray(sol.w, dtype=float)
    wp = np.asarray(sol.wp, dtype=float)
    if r.size < 5:
        raise DomainError("residual needs at least 5 samples")
    if np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise DomainError("residual needs strictly increasing positive r")
    if np.any(w >= 0):
        raise DomainError("residual needs w < 0 at every sample")
    n, k, q, lam = p.n, p.k, p.q, p.lam
    cnk = float(c_nk(n, k))
    t = np.log(r)
    lg = n * t + wt.ln_rho(r) + q * np.log(-w)  # integrand in dt
    spl = make_interp_spline(t, lg, k=5)
    a, b = t[:-1], t[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    panel = half * (np.exp(spl(nodes)) @ _GL_W)

    r0 = r[0]
    if np.isfinite(sol.w0):
        pw = (wt.l0 + 2 * k) / k

        def model(s):
            return -(w[0] - wp[0] * r0 / pw * (1 - (s / r0) ** pw))

        head, _ = integrate.quad(
            lambda s: s ** (n - 1) * float(wt.rho(np.asarray(s))) * model(s) ** q,
            0.0, r0, limit=200, epsabs=0.0, epsrel=1e-13,
        )
    else:
        slope = float(spl.derivative()(t[0]))
        if slope <= 0:
            raise DomainError("singular profile is not integrable at the origin")
        head = math.exp(lg[0]) / slope
    total = head + np.concatenate([[0.0], np.cumsum(panel)])
    lhs = cnk * r ** (n - k) * wp ** k
    res = np.abs(lhs - lam * total) / (lam * total)
    return ResidualReport(float(res.max()), float(np.sqrt(np.mean(res ** 2))), r, res)
