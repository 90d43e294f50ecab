import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srsphere.algebra import lie_bracket
from srsphere.htype import (
    FieldAlongCurve,
    HTypePoint,
    HTypeState,
    admissibility_residual,
    build_admissible_field,
    build_htype_frame,
    connection_table,
    curvature_invariants,
    discrepancy_sweep,
    first_variation,
    group_mul,
    htype_checks,
    integrate_closed_form,
    integrate_geodesic,
    integrate_rk4,
    j_structures,
    koszul_connection,
    left_invariance_check,
    observed_order,
    vertical_velocity_residual,
)

reals = st.floats(-5, 5, allow_nan=False)
points = st.builds(HTypePoint, st.lists(reals, min_size=4, max_size=4), st.lists(reals, min_size=3, max_size=3))


def e(i):
    x = np.zeros(4)
    x[i] = 1
    return HTypePoint(x, np.zeros(3))


@settings(max_examples=50)
@given(points)
def test_identity_and_inverse(a):
    ident = HTypePoint.identity()
    assert np.allclose((a * ident).as_array(), a.as_array())
    assert np.allclose((a * a.inverse()).as_array(), 0)


@settings(max_examples=50)
@given(points, points, points)
def test_associative(a, b, c):
    assert np.allclose(((a * b) * c).as_array(), (a * (b * c)).as_array())


def test_group_law_commutator_sign():
    z12 = group_mul(e(0), e(1)).z[0] - group_mul(e(1), e(0)).z[0]
    assert z12 == -1


def test_brackets():
    X = build_htype_frame()
    assert lie_bracket(X[0], X[1]) == X[4].scale(-1)
    assert lie_bracket(X[2], X[3]) == X[4].scale(-1)
    assert lie_bracket(X[1], X[2]) == X[5]
    assert lie_bracket(X[0], X[3]) == X[5]
    assert lie_bracket(X[0], X[2]) == X[6]
    assert lie_bracket(X[3], X[1]) == X[6]
    for a in range(7):
        for r in range(4, 7):
            assert lie_bracket(X[a], X[r]).is_zero()


def test_left_invariance():
    assert left_invariance_check()


def test_connection_table_entries():
    table = connection_table()
    assert np.array_equal(table[(0, 0)], [0, 0.5, 0, 0, 0, 0, 0])
    assert np.array_equal(table[(3, 2)], [0, -0.5, 0, 0, 0, 0, 0])
    G = koszul_connection()
    assert np.all(G[:4, 4:, 4:] == 0)


def test_j_structures():
    J = j_structures()
    rng = np.random.default_rng(0)
    for _ in range(10):
        u = rng.normal(size=4)
        gram = np.array([[(J[r] @ u) @ (J[s] @ u) for s in range(3)] for r in range(3)])
        assert np.allclose(gram, (u @ u) * np.eye(3))


def test_invalid_steps():
    s = HTypeState(HTypePoint.identity(), [1, 0, 0, 0], [0, 0, 0])
    with pytest.raises(ValueError):
        integrate_rk4(s, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_closed_form(s, -1.0, 0.1)


def test_straight_line_when_lambda_zero():
    x0 = np.array([1.0, 2, 3, 4])
    u0 = np.array([0.6, 0, 0.8, 0])
    s = HTypeState(HTypePoint(x0, np.zeros(3)), u0, [0, 0, 0])
    tr = integrate_rk4(s, 2.0, 0.01)
    assert np.allclose(tr.x, x0 + tr.times[:, None] * u0)
    assert np.allclose(tr.u, u0)


def test_rk4_matches_closed_form_and_conserves_speed():
    s = HTypeState(HTypePoint.identity(), [1, 0, 0, 0], [1, 0, 0])
    res = integrate_geodesic(s, 10.0, 1e-3)
    assert res.max_discrepancy <= 1e-6
    assert np.abs(res.rk4.speed - 1).max() <= 1e-10
    assert vertical_velocity_residual(res.rk4) <= 1e-8


def test_rk4_fourth_order():
    s = HTypeState(HTypePoint([0.1, 0, 0, 0], [0, 0, 0]), [0.6, 0.8, 0, 0], [0.7, -0.3, 0.2])
    sweep = discrepancy_sweep(s, 5.0, [0.2, 0.1, 0.05, 0.025])
    assert observed_order(sweep) == pytest.approx(4, abs=0.3)


def _solution():
    s = HTypeState(HTypePoint.identity(), [0.6, 0.8, 0, 0], [0.7, -0.3, 0.2])
    return integrate_closed_form(s, 5.0, 1e-3)


def test_curvature_invariants_constant():
    tr = _solution()
    ci = curvature_invariants(tr)
    assert np.abs(ci - 2 * tr.lam * 1.0).max() <= 1e-8


def test_first_variation_zero_field():
    tr = _solution()
    W = FieldAlongCurve(np.zeros((tr.times.size, 4)), np.zeros((tr.times.size, 3)))
    assert first_variation(tr, W) == 0


def test_admissible_field():
    tr = _solution()
    T = tr.times[-1]
    f = [lambda s: np.sin(2 * np.pi * s / T), lambda s: 0 * s, lambda s: 0 * s]
    W = build_admissible_field(tr, f)
    assert admissibility_residual(tr, W) <= 1e-8
    assert np.abs(W.vertical[-1]).max() <= 1e-10
    assert abs(first_variation(tr, W)) <= 1e-6
    zero = build_admissible_field(tr, [lambda s: 0 * s] * 3)
    assert np.abs(zero.stacked()).max() == 0


def test_admissible_field_rejects_bad_f():
    tr = _solution()
    with pytest.raises(ValueError):
        build_admissible_field(tr, [lambda s: np.sin(np.pi * s / 5.0) ** 2 + 0 * s, lambda s: 0 * s, lambda s: 0 * s])
    with pytest.raises(ValueError):
        build_admissible_field(tr, [lambda s: np.cos(2 * np.pi * s / 5.0), lambda s: 0 * s, lambda s: 0 * s])


def test_first_variation_endpoint_guard():
    tr = _solution()
    hor = np.ones((tr.times.size, 4))
    with pytest.raises(ValueError):
        first_variation(tr, FieldAlongCurve(hor, np.zeros((tr.times.size, 3))))


def test_inadmissible_control():
    tr = _solution()
    T = tr.times[-1]
    J = j_structures()
    hor = np.sin(np.pi * tr.times / T)[:, None] * (tr.u @ J[0].T)
    W = FieldAlongCurve(hor, np.zeros((tr.times.size, 3)))
    val = first_variation(tr, W)
    assert abs(val) >= 0.1 * abs(tr.lam[0]) * T
    # analytic: -int 2 lam_I sin(pi s/T) ds = -4 lam_I T / pi
    assert val == pytest.approx(-4 * tr.lam[0] * T / np.pi, rel=1e-6)


def test_check_suite():
    assert not [c.name for c in htype_checks() if c.failed]
