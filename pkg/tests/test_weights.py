import math

import numpy as np
import pytest

from khessian import weights as W
from khessian.errors import ConstructionError, DomainError, EstimationError
from khessian.exponents import ProblemParams

BUILTINS = [W.constant(2.0), W.power(2.0), W.rational(1, 1, 0, 3), W.rational(1, 1, 3, 1),
            W.matukuma(2.0), W.matukuma(0.5), W.example1(3, 1)]


def test_eval_rho_examples():
    assert W.eval_rho(W.constant(1.0), 17.3) == 1.0
    assert W.eval_rho(W.power(2.0), 3.0) == pytest.approx(9.0, rel=1e-15)
    # the weight for which -(1 + r^2)^(-1/2) solves the equation with n=3, k=1, q=3
    assert W.eval_rho(W.example1(3, 1), 1.0) == pytest.approx(1.5, rel=1e-15)


def test_eval_rho_domain():
    with pytest.raises(DomainError):
        W.eval_rho(W.constant(), 0.0)


@pytest.mark.parametrize("wt", BUILTINS, ids=lambda w: w.kind)
def test_numeric_R_matches_closed_form(wt):
    r = np.geomspace(1e-3, 1e3, 100)
    num = W.numeric_R(wt.rho, r)
    assert np.max(np.abs(num - wt.R(r))) < 1e-8


@pytest.mark.parametrize("wt", BUILTINS, ids=lambda w: w.kind)
def test_estimated_limits_agree(wt):
    l0, li = W.estimate_limits(wt)
    assert l0 == pytest.approx(wt.l0, abs=1e-6)
    assert li == pytest.approx(wt.l_inf, abs=1e-6)


def test_limits_examples():
    assert W.estimate_limits(W.rational(1, 1, 3, 1)) == pytest.approx((3, 2), abs=1e-6)
    assert W.estimate_limits(W.matukuma(2)) == pytest.approx((0, -2), abs=1e-6)
    assert W.estimate_limits(W.constant()) == pytest.approx((0, 0), abs=1e-12)


def test_limits_nonconvergent():
    wt = W.WeightSpec(rho=lambda r: np.exp(np.sin(np.log(r))), R=lambda r: np.cos(np.log(r)),
                      l0=0.0, l_inf=0.0, vartheta=None, K0=1.0, c_rho=None, kind="tabulated")
    with pytest.raises(EstimationError):
        W.estimate_limits(wt)


def test_krho_convergence():
    for wt in (W.rational(1, 1, 0, 3), W.matukuma(2), W.rational(1, 1, 3, 1)):
        gaps = [abs(W.eval_rho(wt, r) * r ** (-wt.l_inf) - wt.c_rho) for r in (1e2, 1e3, 1e4)]
        assert gaps[0] > gaps[1] > gaps[2]


def test_K_bounded_by_K0():
    for wt in (W.rational(1, 1, 0, 3), W.matukuma(2), W.constant()):
        r = np.geomspace(1e-6, 1e6, 500)
        assert np.all(wt.K(r) <= wt.K0 * (1 + 1e-9))
        assert np.all(wt.K(r) > 0)


def test_build_from_R_power():
    wt = W.build_weight_from_R(lambda r: np.full_like(np.asarray(r, float), 1.5), 1.5, 1.0)
    for r in (0.01, 1.0, 30.0):
        assert W.eval_rho(wt, r) == pytest.approx(r ** 1.5, rel=1e-10)


def test_build_from_R_rational():
    wt = W.build_weight_from_R(lambda r: 3 - r / (1 + r), 3.0, 1.0)
    r = np.geomspace(1e-3, 1e3, 60)
    ratio = np.array([W.eval_rho(wt, s) for s in r]) / (r ** 3 / (1 + r))
    assert np.std(ratio) / np.mean(ratio) < 1e-8
    l0, li = W.estimate_limits(wt)
    assert l0 == pytest.approx(3, abs=1e-6)
    assert li == pytest.approx(2, abs=1e-6)


def test_build_from_R_roundtrip():
    ref = W.matukuma(2)
    wt = W.build_weight_from_R(ref.R, ref.l0, ref.K0)
    r = np.geomspace(1e-3, 1e3, 50)
    ratio = np.array([W.eval_rho(wt, s) for s in r]) / ref.rho(r)
    assert np.std(ratio) / np.mean(ratio) < 1e-8


def test_build_from_R_divergent():
    with pytest.raises(ConstructionError):
        W.build_weight_from_R(lambda r: np.full_like(np.asarray(r, float), -1.0), 0.0, 1.0)


def test_assumptions_rational_fast():
    rep = W.check_assumptions(W.rational(1, 1, 0, 3), ProblemParams(5, 1, 3))
    for nm in ("rho.1", "rho.2", "rho.4", "rho.5"):
        assert rep.status(nm) == W.HOLDS
    assert "2" in rep.flags["rho.2"]
    assert "1" in rep.flags["rho.4"]
    assert rep.l0 == 0 and rep.l_inf == -3
    assert rep.vartheta == pytest.approx(3, rel=1e-3)


def test_assumptions_example1_fails_rho2():
    rep = W.check_assumptions(W.example1(3, 1), ProblemParams(3, 1, 3))
    e = rep.entries["rho.2"]
    assert e.status == W.FAILS
    assert e.witness is not None


def test_assumptions_power_boundary():
    rep = W.check_assumptions(W.power(2.0), ProblemParams(7, 2, 8))
    assert rep.flags["boundary_q_star"]


def test_failures_carry_witness():
    for wt, p in [(W.example1(3, 1), ProblemParams(3, 1, 3)), (W.power(2.0), ProblemParams(7, 2, 8)),
                  (W.constant(), ProblemParams(3, 1, 2))]:
        rep = W.check_assumptions(wt, p)
        for e in rep.entries.values():
            if e.status == W.FAILS:
                assert e.witness is not None


def test_tabulated_roundtrip(tmp_path):
    ref = W.rational(1, 1, 0, 3)
    r = np.geomspace(1e-4, 1e4, 801)
    path = tmp_path / "w.csv"
    path.write_text("r,rho\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(r, ref.rho(r))))
    wt = W.load_tabulated(path)
    s = np.geomspace(2e-4, 5e3, 37)
    assert np.max(np.abs(wt.rho(s) / ref.rho(s) - 1)) < 1e-3
    assert wt.l0 == pytest.approx(0, abs=1e-3)
    assert wt.l_inf == pytest.approx(-3, abs=1e-3)


def test_tabulated_rejects_bad(tmp_path):
    with pytest.raises(DomainError):
        W.tabulated([1.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        W.tabulated([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])


def test_weight_from_config():
    wt = W.weight_from_config({"kind": "rational", "a": "1", "atilde": "1", "beta": "3", "gamma": "1"})
    assert (wt.l0, wt.l_inf) == (3, 2)
    with pytest.raises(DomainError):
        W.weight_from_config({"kind": "rational", "a": "1"})
    with pytest.raises(DomainError):
        W.weight_from_config({"kind": "nope"})


def test_scaled_weight_doubles():
    wt = W.matukuma(2).scaled(2.0)
    assert W.eval_rho(wt, 0.7) == pytest.approx(2 * W.eval_rho(W.matukuma(2), 0.7), rel=1e-15)
    assert wt.K0 == 2 and wt.c_rho == pytest.approx(2 * W.matukuma(2).c_rho)
