import numpy as np
import pytest

from srsphere.algebra import Poly, lie_bracket, radius_squared
from srsphere.frames import (
    OffSphereError,
    build_contact_frame,
    build_quaternionic_frame,
    build_s3_frame,
    build_s7_frame,
    contact_form_eval,
    frame_identity_checks,
    horizontal_basis,
    is_tangent,
    verify_inertia_constancy,
)


def unit(rng, dim):
    p = rng.normal(size=dim)
    return p / np.linalg.norm(p)


def test_contact_field_coefficients():
    V = build_contact_frame(1).vertical[0]
    x = [Poly.var(V.variables, i) for i in range(4)]
    assert list(V.coefficients) == [-x[1], x[0], -x[3], x[2]]


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_contact_field_tangent_unit(n):
    V = build_contact_frame(n).vertical[0]
    assert is_tangent(V)
    assert V.dot(V) == radius_squared(V.variables)


def test_contact_frame_rejects_small_n():
    with pytest.raises(ValueError):
        build_contact_frame(0)
    with pytest.raises(ValueError):
        build_quaternionic_frame(-1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_quaternionic_commutators(n):
    V1, V2, V3 = build_quaternionic_frame(n).vertical
    assert lie_bracket(V1, V2) == V3.scale(2)
    assert lie_bracket(V2, V3) == V1.scale(2)
    assert lie_bracket(V1, V3) == V2.scale(-2)
    assert all(map(is_tangent, (V1, V2, V3)))


def test_quaternionic_fields_at_base_point():
    fr = build_quaternionic_frame(0)
    assert np.array_equal(fr.vertical_at([1, 0, 0, 0]), np.eye(4)[1:])


def test_s3_bracket_orientation():
    fr = build_s3_frame()
    V = fr.vertical[0]
    X, Y = fr.horizontal
    # bracket convention [A,B]_i = A(B_i) - B(A_i)
    assert lie_bracket(Y, X) == V.scale(2)
    assert lie_bracket(X, Y) == V.scale(-2)


def test_s7_frame():
    fr = build_s7_frame()
    X1 = fr.vertical[0]
    x = [Poly.var(X1.variables, i) for i in range(8)]
    assert list(X1.coefficients) == [-x[1], x[0], -x[3], x[2], -x[5], x[4], -x[7], x[6]]
    assert X1 == build_contact_frame(3).vertical[0]
    fields = fr.fields
    r2 = radius_squared(X1.variables)
    for a in range(7):
        for b in range(7):
            assert fields[a].dot(fields[b]) == (r2 if a == b else 0)
    for a in range(1, 7):
        for b in range(7):
            assert fields[b].dot(lie_bracket(fields[a], fields[b])).is_zero()


def test_contact_form_examples():
    fr = build_s3_frame()
    p = np.array([1.0, 0, 0, 0])
    assert contact_form_eval(fr, p, [0, 1, 1, 0]) == pytest.approx([1.0])
    rng = np.random.default_rng(1)
    q = unit(rng, 4)
    assert contact_form_eval(fr, q, fr.vertical_at(q)[0]) == pytest.approx([1.0], abs=1e-12)
    with pytest.raises(OffSphereError):
        contact_form_eval(fr, [2, 0, 0, 0], [0, 1, 0, 0])


@pytest.mark.parametrize("frame", [build_contact_frame(2), build_quaternionic_frame(1), build_quaternionic_frame(2)])
def test_horizontal_basis_annihilated(frame):
    rng = np.random.default_rng(2)
    p = unit(rng, frame.ambient_dim)
    H = horizontal_basis(frame, p)
    assert H.shape == (frame.ambient_dim - 1 - len(frame.vertical), frame.ambient_dim)
    assert np.allclose(H @ H.T, np.eye(len(H)), atol=1e-12)
    assert np.abs(H @ p).max() < 1e-12
    for v in H:
        assert np.abs(contact_form_eval(frame, p, v)).max() < 1e-12


@pytest.mark.parametrize("frame", [build_s3_frame(), build_quaternionic_frame(1)])
def test_inertia_is_identity(frame):
    rng = np.random.default_rng(4)
    pts = np.array([unit(rng, frame.ambient_dim) for _ in range(100)])
    rep = verify_inertia_constancy(frame, pts)
    assert rep["max_deviation"] < 1e-12


def test_identity_suite_passes():
    checks = frame_identity_checks()
    assert checks
    assert not [c.name for c in checks if c.failed]
