"""Sampled radial profiles and phase-plane orbits."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .exponents import ProblemParams
from .weights import WeightSpec

FROM_PROFILE = "from-profile"
DIRECT_LV = "direct-LV"
SINGULAR_FROM_P4 = "singular-from-P4"


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """Samples ``(r, w, w')`` of a radial solution.

    ``w0`` is ``w(0)``; it is ``-inf`` for singular profiles. ``truncated``
    is set when the integration stopped before the requested radius, with
    the cause in ``reason``.
    """

    r: np.ndarray
    w: np.ndarray
    wp: np.ndarray
    w0: float
    params: ProblemParams
    weight: WeightSpec
    stats: dict = field(default_factory=dict)
    truncated: bool = False
    reason: str = ""

    def __post_init__(self):
        if not (self.r.shape == self.w.shape == self.wp.shape) or self.r.ndim != 1:
            raise DomainError("r, w, wprime must be 1-d arrays of equal length")

    @property
    def u(self):
        return 1.0 + self.w

    def __call__(self, r):
        """Interpolate ``w`` (cubic Hermite in ``ln r``)."""
        from scipy.interpolate import CubicHermiteSpline

        t = np.log(self.r)
        spl = CubicHermiteSpline(t, self.w, self.wp * self.r)
        return spl(np.log(np.asarray(r, dtype=float)))

    def write_csv(self, path):
        write_columns(path, ("r", "w", "wprime"), (self.r, self.w, self.wp))


@dataclass(frozen=True, eq=False)
class Orbit:
    """Samples ``(t, x, y)`` of the non-autonomous Lotka-Volterra system."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    provenance: str
    params: ProblemParams
    weight: WeightSpec
    truncated: bool = False
    reason: str = ""
    stats: dict = field(default_factory=dict)
    dense: Optional[object] = None

    def write_csv(self, path):
        write_columns(path, ("t", "x", "y"), (self.t, self.x, self.y))

    def at(self, t):
        """State at time ``t``: dense output when present, else linear interpolation."""
        if self.dense is not None:
            return self.dense(t)
        return np.interp(t, self.t, self.x), np.interp(t, self.t, self.y)


def write_columns(path, names, cols):
    """CSV with shortest round-trip float formatting, so reruns are byte-identical."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(names)
        for row in zip(*cols):
            wr.writerow([repr(float(v)) for v in row])


def read_columns(path, names):
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames is None or not set(names) <= set(rd.fieldnames):
            raise DomainError(f"{path}: expected columns {','.join(names)}")
        rows = list(rd)
    try:
        return [np.array([float(r[nm]) for r in rows]) for nm in names]
    except ValueError as exc:
        raise DomainError(f"{path}: bad number ({exc})") from None
