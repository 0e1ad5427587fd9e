import math

import numpy as np
import pytest

from khessian.errors import AssumptionError, DomainError
from khessian.exponents import (CENTER, DEGENERATE_NODE, SADDLE, SADDLE_NODE, STABLE_FOCUS,
                                STABLE_NODE, UNSTABLE_NODE, ProblemParams, classify_eigen,
                                delta_param, eigen2, exponent_summary, limit_rhs, linearization,
                                mu12, p2_rate, p4_coords, q_jl, q_star, stationary_point,
                                stationary_points)

NODES = {STABLE_NODE, UNSTABLE_NODE, DEGENERATE_NODE}


def test_q_star_values():
    assert q_star(1, 0, 3) == 5
    assert q_star(2, 2, 7) == 8
    for n in (5, 7, 11):
        assert q_star(2, -4, n) == pytest.approx(2, abs=1e-15)


def test_q_star_domain():
    with pytest.raises(DomainError):
        q_star(2, 0, 4)


def test_q_jl_values():
    assert q_jl(1, 0, 11) == pytest.approx((11 - 2 * math.sqrt(10)) / (7 - 2 * math.sqrt(10)), rel=1e-12)
    assert q_jl(1, 0, 11) == pytest.approx(6.92198, abs=1e-4)
    assert math.isinf(q_jl(1, 0, 10))
    assert math.isinf(q_jl(2, 0, 12))


def test_q_jl_classical_laplacian():
    # k = 1, sigma = 0: 1 + 4/(n - 4 - 2 sqrt(n-1))
    for n in range(11, 21):
        assert q_jl(1, 0, n) == pytest.approx(1 + 4 / (n - 4 - 2 * math.sqrt(n - 1)), rel=1e-12)


def test_exponent_ordering_grid():
    for n in range(11, 21):
        prev = -math.inf
        for s in np.linspace(0, 4, 9):
            qs = q_star(1, s, n)
            assert qs > prev
            prev = qs
            qj = q_jl(1, s, n)
            if math.isfinite(qj):
                assert qj > qs


def test_delta():
    assert delta_param(1, -2) == 0
    assert delta_param(1, -3) == 1
    assert delta_param(2, 1) == -2.5


def test_mu12():
    m1, m2 = mu12(1, 2)
    assert m1 == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-14)
    assert m2 == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-14)
    m1, m2 = mu12(1, 6)
    assert (m1, m2) == pytest.approx((11 - 2 * math.sqrt(30), 11 + 2 * math.sqrt(30)), rel=1e-12)
    m1, m2 = mu12(3, 3 * (1 + 1e-12))
    assert m1 == pytest.approx(1, abs=1e-5) and m2 == pytest.approx(1, abs=1e-5)


def test_p2_rate():
    assert p2_rate(ProblemParams(3, 1, 3), -2) == 2
    assert p2_rate(ProblemParams(5, 1, 3), -3) == 7
    assert p2_rate(ProblemParams(3, 1, 5), 0) == 2
    with pytest.raises(AssumptionError):
        p2_rate(ProblemParams(3, 1, 2), 0)


def test_params_validation():
    with pytest.raises(DomainError):
        ProblemParams(4, 2, 3)
    with pytest.raises(DomainError):
        ProblemParams(5, 1, 1)
    with pytest.raises(DomainError):
        ProblemParams(5, 1, 3, lam=0)


def test_canonical_p4_focus():
    p = ProblemParams(3, 1, 6)
    sp = stationary_point(p, 0, "P4")
    assert sp.coords == pytest.approx((0.6, 0.4), abs=1e-15)
    assert sp.kind == STABLE_FOCUS
    np.testing.assert_allclose(sp.linearization, [[-0.6, -3.6], [0.4, 0.4]], atol=1e-15)
    for z in sp.eigenvalues:
        assert abs(z.real + 0.1) < 1e-12
        assert abs(z.imag) > 0


def test_saddle_node_cases():
    p = ProblemParams(3, 1, 3)
    pts = {s.label: s for s in stationary_points(p, -2)}
    assert pts["P3"].coords == pytest.approx((1, 0))
    assert pts["P4"].coords == pytest.approx((1, 0))
    assert pts["P3"].kind == SADDLE_NODE and pts["P4"].kind == SADDLE_NODE
    pts = {s.label: s for s in stationary_points(p, -3)}
    assert pts["P1"].kind == SADDLE_NODE and pts["P3"].kind == SADDLE_NODE


def test_p4_coords_hand():
    assert p4_coords(ProblemParams(5, 1, 5), 2) == pytest.approx((2, 1))


@pytest.mark.parametrize("n,k,q", [(3, 1, 6), (5, 1, 3), (7, 2, 5), (9, 3, 4.5)])
def test_stationarity_and_eigen_residuals(n, k, q):
    p = ProblemParams(n, k, q)
    for l in (-n - 1, -n, -(n + 2 * k) / 2, -2 * k, 0.5):
        for sp in stationary_points(p, l):
            dx, dy = limit_rhs(p, l, *sp.coords)
            assert abs(dx) < 1e-12 and abs(dy) < 1e-12
            A = sp.linearization
            for z in sp.eigenvalues:
                assert abs(z * z - np.trace(A) * z + np.linalg.det(A)) < 1e-10


@pytest.mark.parametrize("n,k,q", [(3, 1, 6), (5, 1, 3), (7, 2, 5)])
def test_stationary_table_scan(n, k, q):
    """Labels for the five columns of the stationary-point table."""
    p = ProblemParams(n, k, q)
    cols = [-n - 1, -n, 0.5 * (-n - 2 * k), -2 * k, -2 * k + 1]
    for j, l in enumerate(cols):
        pts = {s.label: s for s in stationary_points(p, l)}
        assert pts["P2"].kind == SADDLE
        if j == 0:
            assert pts["P1"].kind in NODES
            assert pts["P3"].kind == SADDLE and pts["P3"].coords[0] < 0
            assert pts["P4"].kind == SADDLE and pts["P4"].coords[1] < 0
        elif j == 1:
            assert pts["P1"].kind == SADDLE_NODE and pts["P3"].kind == SADDLE_NODE
            assert pts["P4"].kind == SADDLE and pts["P4"].coords[1] < 0
        elif j == 2:
            assert pts["P1"].kind == SADDLE
            assert pts["P3"].kind in NODES
            assert pts["P4"].kind == SADDLE and pts["P4"].coords[1] < 0
        elif j == 3:
            assert pts["P1"].kind == SADDLE
            assert pts["P3"].kind == SADDLE_NODE and pts["P4"].kind == SADDLE_NODE
        else:
            assert pts["P1"].kind == SADDLE and pts["P3"].kind == SADDLE
            assert "node" in pts["P4"].kind or "focus" in pts["P4"].kind


def test_p4_in_G_minus():
    """For l > -2k, P4 in the open quadrant lies in G-."""
    seen = 0
    for n, k, q in [(3, 1, 6), (5, 1, 3), (7, 2, 5), (9, 3, 4.5)]:
        p = ProblemParams(n, k, q)
        for l in (-2 * k + 0.1, -k, 0, 0.5, 1, 3):
            x, y = p4_coords(p, l)
            if x <= 0 or y <= 0:
                continue
            seen += 1
            G = x + (n - 2 * k) * (q + 1) / (k + 1) * (k / (n - 2 * k) * y - 1)
            assert G < 0
    assert seen >= 10


def test_classify_eigen_kinds():
    assert classify_eigen(np.array([[-1.0, 0], [0, -2]])) == STABLE_NODE
    assert classify_eigen(np.array([[1.0, 0], [0, 2]])) == UNSTABLE_NODE
    assert classify_eigen(np.array([[1.0, 0], [0, -2]])) == SADDLE
    assert classify_eigen(np.array([[0.0, 1], [-1, 0]])) == CENTER
    assert classify_eigen(np.array([[-1.0, 1], [0, -1]])) == DEGENERATE_NODE


def test_eigen2_symmetric_pair():
    z1, z2 = eigen2(np.array([[-0.6, -3.6], [0.4, 0.4]]))
    assert z1 == z2.conjugate()


def test_summary_plain_types():
    import json

    s = exponent_summary(ProblemParams(3, 1, 6), 0, -2)
    json.dumps(s)
    assert s["q_jl"]["l0"] == "inf"
    assert s["delta"] == 0
