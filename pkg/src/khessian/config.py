"""INI run configuration.

A run file has up to four sections::

    [params]
    n = 3
    k = 1
    q = 6
    lambda = 1

    [weight]
    kind = rational
    a = 1
    atilde = 1
    beta = 0
    gamma = 3

    [integrator]
    rel_tol = 1e-10
    abs_tol = 1e-12
    r_start = 1e-6
    t_min = -40
    t_max = 40

    [output]
    dir = out
    format = csv

Unknown keys are rejected with the section and field named.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import DomainError
from .exponents import ProblemParams
from .solver import DEFAULT, IntegratorConfig
from .weights import WeightSpec, constant, weight_from_config

SECTIONS = ("params", "weight", "integrator", "output")
FORMATS = ("csv", "json")

_INT_FIELDS = {"max_steps", "samples_per_decade"}
_CFG_FIELDS = {f.name for f in fields(IntegratorConfig)} - {"t_span"} | {"t_min", "t_max"}


class ConfigReadError(OSError):
    """The config file is missing, unreadable or not valid INI."""


@dataclass
class RunConfig:
    params: ProblemParams
    weight: WeightSpec
    integrator: IntegratorConfig = DEFAULT
    output_dir: Path = Path(".")
    output_format: str = "csv"
    raw: dict = field(default_factory=dict)


def _num(section, key, val, cast=float):
    try:
        return cast(val)
    except ValueError:
        raise DomainError(f"[{section}] field '{key}' is not a valid number: {val!r}") from None


def read_ini(path) -> dict:
    """Sections of an INI file as plain dicts; raises ``ConfigReadError``."""
    cp = configparser.ConfigParser(interpolation=None)
    if not os.access(path, os.R_OK) or not os.path.isfile(path):
        raise ConfigReadError(f"cannot read config file {path}")
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigReadError(f"{path}: {' '.join(str(exc).split())}") from None
    out = {s: dict(cp[s]) for s in cp.sections()}
    extra = set(out) - set(SECTIONS)
    if extra:
        raise DomainError(f"{path}: unknown section(s) {', '.join(sorted(extra))}")
    return out


def apply_overrides(raw: dict, items) -> dict:
    """``section.key=value`` overrides on top of the parsed file."""
    raw = {s: dict(v) for s, v in raw.items()}
    for item in items or ():
        key, sep, val = item.partition("=")
        sec, dot, name = key.strip().partition(".")
        if not (sep and dot and sec in SECTIONS and name):
            raise DomainError(f"override {item!r} is not of the form section.key=value")
        raw.setdefault(sec, {})[name.strip()] = val.strip()
    return raw


def build(raw: dict) -> RunConfig:
    pb = raw.get("params", {})
    for key in ("n", "k", "q"):
        if key not in pb:
            raise DomainError(f"[params] missing field '{key}'")
    extra = set(pb) - {"n", "k", "q", "lambda"}
    if extra:
        raise DomainError(f"[params] unknown field(s) {', '.join(sorted(extra))}")
    params = ProblemParams(_num("params", "n", pb["n"], int), _num("params", "k", pb["k"], int),
                           _num("params", "q", pb["q"]), _num("params", "lambda", pb.get("lambda", "1")))

    wb = raw.get("weight")
    weight = weight_from_config(wb, params.n, params.k) if wb else constant()

    ib = raw.get("integrator", {})
    extra = set(ib) - _CFG_FIELDS
    if extra:
        raise DomainError(f"[integrator] unknown field(s) {', '.join(sorted(extra))}")
    kw = {}
    for key, val in ib.items():
        if key in ("t_min", "t_max"):
            continue
        kw[key] = _num("integrator", key, val, int if key in _INT_FIELDS else float)
    t0, t1 = DEFAULT.t_span
    kw["t_span"] = (_num("integrator", "t_min", ib.get("t_min", t0)),
                    _num("integrator", "t_max", ib.get("t_max", t1)))
    integ = replace(DEFAULT, **kw)

    ob = raw.get("output", {})
    extra = set(ob) - {"dir", "format"}
    if extra:
        raise DomainError(f"[output] unknown field(s) {', '.join(sorted(extra))}")
    fmt = ob.get("format", "csv")
    if fmt not in FORMATS:
        raise DomainError(f"[output] format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    return RunConfig(params, weight, integ, Path(ob.get("dir", ".")), fmt, raw)


def load(path, overrides=None) -> RunConfig:
    return build(apply_overrides(read_ini(path), overrides))
