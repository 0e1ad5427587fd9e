"""Critical exponents and stationary points of the limit Lotka-Volterra systems.

Everything here is closed-form algebra in the structural parameters
``(n, k, q)`` and the limit ``l`` of ``R(r) = r rho'(r) / rho(r)`` (either
``l0`` at the origin or ``l_inf`` at infinity).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AssumptionError, DomainError

#: exact-boundary tolerance used for the saddle-node columns of the table
BOUNDARY_TOL = 1e-12

SADDLE = "saddle"
STABLE_NODE = "stable node"
UNSTABLE_NODE = "unstable node"
STABLE_FOCUS = "stable focus"
UNSTABLE_FOCUS = "unstable focus"
CENTER = "center"
SADDLE_NODE = "saddle-node"
DEGENERATE_NODE = "degenerate node"


@dataclass(frozen=True)
class ProblemParams:
    """Structural parameters of ``S_k(D^2 u) = lam * rho * (1 - u)^q``.

    ``lam`` stands for the positive parameter lambda (a reserved word in
    Python). Problems posed on the whole space use ``lam = 1``.
    """

    n: int
    k: int
    q: float
    lam: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k:
            raise DomainError(f"n and k must be integers, got n={self.n}, k={self.k}")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if not self.n > 2 * self.k:
            raise DomainError(f"need n > 2k, got n={self.n}, k={self.k}")
        if not self.q > self.k:
            raise DomainError(f"need q > k, got q={self.q}, k={self.k}")
        if not self.lam > 0:
            raise DomainError(f"need lambda > 0, got {self.lam}")

    @property
    def y_p2(self) -> float:
        """Ordinate ``(n - 2k) / k`` of the stationary point P2."""
        return (self.n - 2 * self.k) / self.k


def _check_nk(k, n):
    if k < 1 or not n > 2 * k:
        raise DomainError(f"need n > 2k >= 2, got n={n}, k={k}")


def q_star(k: int, sigma: float, n: int) -> float:
    """Tso-type exponent ``((n + 2)k + sigma(k + 1)) / (n - 2k)``."""
    _check_nk(k, n)
    return ((n + 2) * k + sigma * (k + 1)) / (n - 2 * k)


def q_jl(k: int, sigma: float, n: int) -> float:
    """Joseph-Lundgren-type exponent; ``math.inf`` for ``n <= 2k + 8 + 4 sigma / k``."""
    _check_nk(k, n)
    if n <= 2 * k + 8 + 4 * sigma / k:
        return math.inf
    radicand = k * (2 * k + sigma) * ((k + 1) * n - k * (2 - sigma))
    if radicand < 0:
        raise ArithmeticError(f"negative radicand {radicand} in q_JL")
    root = 2.0 * math.sqrt(radicand)
    num = k * (k + 1) * n - k * k * (2 - sigma) + 2 * k + sigma - root
    den = k * (k + 1) * n - 2 * k * k * (k + 3) - 2 * k * sigma - root
    return k * num / den


def delta_param(k: int, l_inf: float) -> float:
    """Decay parameter ``-(2k + l_inf) / k``; its sign separates P3+ from P4+."""
    return -(2 * k + l_inf) / k


def mu12(k: int, q: float) -> tuple[float, float]:
    """Roots ``mu1 < mu2`` of the discriminant polynomial at P4+."""
    s = q / k
    root = 2.0 * math.sqrt(max(s * s - s, 0.0))
    return 2 * s - 1 - root, 2 * s - 1 + root


def p4_node_thresholds(p: ProblemParams) -> tuple[float, float]:
    """Thresholds ``(lo, hi)`` on ``l``: P4 is a (non-degenerate) node iff ``l < lo`` or ``l > hi``."""
    n, k, q = p.n, p.k, p.q
    m1, m2 = mu12(k, q)
    lo = (q * (n - 2 * k) - k * (n + 2 * m2)) / (k + m2)
    hi = (q * (n - 2 * k) - k * (n + 2 * m1)) / (k + m1)
    return lo, hi


def p4_is_node(p: ProblemParams, l: float) -> bool:
    lo, hi = p4_node_thresholds(p)
    return l < lo or l > hi


def p2_rate(p: ProblemParams, l_inf: float) -> float:
    """Exponential rate ``gamma = (q/k)(n - 2k) - (n + l_inf)`` of approach to P2."""
    g = p.q / p.k * (p.n - 2 * p.k) - (p.n + l_inf)
    if not g > 0:
        raise AssumptionError(f"P2 rate gamma={g} is not positive; check q against q*(k, l0)")
    return g


def p4_coords(p: ProblemParams, l: float) -> tuple[float, float]:
    n, k, q = p.n, p.k, p.q
    return (q * (n - 2 * k) - k * (n + l)) / (q - k), (2 * k + l) / (q - k)


def linearization(p: ProblemParams, l: float, a: float, b: float) -> np.ndarray:
    """Jacobian of the autonomous system with ``nu = n + l`` at ``(a, b)``."""
    n, k, q = p.n, p.k, p.q
    return np.array([
        [n + l - 2 * a - q * b, -q * a],
        [b / k, a / k + 2 * b - (n - 2 * k) / k],
    ])


def limit_rhs(p: ProblemParams, l: float, x: float, y: float) -> tuple[float, float]:
    n, k, q = p.n, p.k, p.q
    return x * (n + l - x - q * y), y * (-(n - 2 * k) / k + x / k + y)


@dataclass(frozen=True, eq=False)
class StationaryPoint:
    label: str
    coords: tuple[float, float]
    nu_used: float
    linearization: np.ndarray
    eigenvalues: tuple[complex, complex]
    eigenvectors: tuple[np.ndarray, np.ndarray] | None
    kind: str

    @property
    def in_closed_quadrant(self) -> bool:
        return self.coords[0] >= 0 and self.coords[1] >= 0

    def to_dict(self) -> dict:
        ev = [[z.real, z.imag] for z in self.eigenvalues]
        return {
            "label": self.label,
            "coords": [float(self.coords[0]), float(self.coords[1])],
            "nu_used": self.nu_used,
            "eigenvalues": ev,
            "kind": self.kind,
        }


def eigen2(A: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix from trace and determinant, ordered by real part."""
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = tr * tr - 4 * det
    root = cmath.sqrt(disc)
    l1, l2 = (tr - root) / 2, (tr + root) / 2
    if disc >= 0:
        # avoid cancellation in the smaller-magnitude root
        big = (tr + math.copysign(math.sqrt(disc), tr)) / 2 if tr != 0 else math.sqrt(disc) / 2
        small = det / big if big != 0 else 0.0
        l1, l2 = sorted([big, small])
        return complex(l1), complex(l2)
    return l1, l2


def _eigvec(A, lam):
    if abs(A[0, 1]) > 0:
        v = np.array([A[0, 1], lam - A[0, 0]])
    elif abs(A[1, 0]) > 0:
        v = np.array([lam - A[1, 1], A[1, 0]])
    elif abs(lam - A[0, 0]) <= abs(lam - A[1, 1]):
        v = np.array([1.0, 0.0])
    else:
        v = np.array([0.0, 1.0])
    return v / np.linalg.norm(v)


def classify_eigen(A: np.ndarray) -> str:
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = tr * tr - 4 * det
    scale = max(tr * tr, abs(det), 1e-300)
    if det < 0:
        return SADDLE
    if abs(det) <= BOUNDARY_TOL * scale:
        return SADDLE_NODE
    if abs(disc) <= BOUNDARY_TOL * scale:
        return DEGENERATE_NODE
    if disc > 0:
        return STABLE_NODE if tr < 0 else UNSTABLE_NODE
    if tr == 0:
        return CENTER
    return STABLE_FOCUS if tr < 0 else UNSTABLE_FOCUS


def stationary_points(p: ProblemParams, l: float) -> list[StationaryPoint]:
    """P1..P4 of the autonomous system with ``nu = n + l`` and their local type.

    Points that coincide at the exact boundaries ``l = -n`` (P1 = P3) and
    ``l = -2k`` (P3 = P4) are labelled saddle-nodes.
    """
    n, k = p.n, p.k
    at_minus_n = abs(l + n) <= BOUNDARY_TOL
    at_minus_2k = abs(l + 2 * k) <= BOUNDARY_TOL
    if at_minus_n:
        l = -float(n)
    if at_minus_2k:
        l = -2.0 * k
    pts = {
        "P1": (0.0, 0.0),
        "P2": (0.0, p.y_p2),
        "P3": (n + l, 0.0),
        "P4": p4_coords(p, l),
    }
    out = []
    for label, (a, b) in pts.items():
        A = linearization(p, l, a, b)
        ev = eigen2(A)
        vecs = None
        if ev[0].imag == 0 and ev[1].imag == 0:
            vecs = (_eigvec(A, ev[0].real), _eigvec(A, ev[1].real))
        kind = classify_eigen(A)
        if at_minus_n and label in ("P1", "P3"):
            kind = SADDLE_NODE
        if at_minus_2k and label in ("P3", "P4"):
            kind = SADDLE_NODE
        out.append(StationaryPoint(label, (a, b), n + l, A, ev, vecs, kind))
    return out


def stationary_point(p: ProblemParams, l: float, label: str) -> StationaryPoint:
    for sp in stationary_points(p, l):
        if sp.label == label:
            return sp
    raise KeyError(label)


def exponent_summary(p: ProblemParams, l0: float, l_inf: float) -> dict:
    """Everything the ``exponents`` subcommand reports, as plain Python types."""
    n, k = p.n, p.k

    def _num(v):
        return "inf" if math.isinf(v) else v

    return {
        "n": n, "k": k, "q": p.q, "l0": l0, "l_inf": l_inf,
        "q_star": {"l0": q_star(k, l0, n), "l_inf": q_star(k, l_inf, n)},
        "q_jl": {"l0": _num(q_jl(k, l0, n)), "l_inf": _num(q_jl(k, l_inf, n))},
        "delta": delta_param(k, l_inf),
        "mu": list(mu12(k, p.q)),
        "stationary_points": {
            "l0": [sp.to_dict() for sp in stationary_points(p, l0)],
            "l_inf": [sp.to_dict() for sp in stationary_points(p, l_inf)],
        },
    }
