import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import cdist

from srsphere.geodesics import (
    CONTACT,
    QUATERNIONIC,
    GeodesicSpec,
    SpecError,
    curvature_ode_residual,
    curvature_s3,
    fd_derivative,
    first_return,
    geodesic,
    geodesic_velocity,
    great_circle,
    hermitian_velocity_product,
    is_closed_contact,
    is_closed_quaternionic,
    orbit_return_distances,
    trace,
)
from srsphere.suites import random_tangent_spec

P = np.array([1.0, 0, 0, 0])


def test_great_circle_examples():
    v = np.array([0.0, 0, 1, 0])
    assert np.allclose(great_circle(P, v, 0.0), P)
    assert np.allclose(great_circle(P, v, math.pi), -P)
    assert np.allclose(great_circle(P, v, math.pi / 2), [0, 0, 1, 0])


def test_spec_validation():
    with pytest.raises(SpecError):
        GeodesicSpec([1, 0, 0, 0], [1, 0, 0, 0])
    with pytest.raises(SpecError):
        GeodesicSpec([2, 0, 0, 0], [0, 1, 0, 0])
    with pytest.raises(SpecError):
        GeodesicSpec([1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], QUATERNIONIC)


def test_horizontal_contact_is_great_circle():
    spec = GeodesicSpec(P, [0, 0, 1, 0])
    t = np.linspace(0, 5, 50)
    assert spec.moments[0] == 0
    assert np.allclose(geodesic(spec, t), great_circle(P, spec.v, t))


def test_quaternionic_zero_moments_great_circle():
    p = np.eye(8)[0]
    spec = GeodesicSpec(p, np.eye(8)[5], QUATERNIONIC)
    t = np.linspace(0, 5, 50)
    assert np.allclose(spec.moments, 0)
    assert np.allclose(geodesic(spec, t), great_circle(p, spec.v, t))


def test_starts_at_p():
    rng = np.random.default_rng(0)
    for dim, kind in [(4, CONTACT), (8, QUATERNIONIC)]:
        spec = random_tangent_spec(rng, dim, kind)
        assert np.allclose(geodesic(spec, 0.0), spec.p)


def test_unit_speed_example():
    spec = GeodesicSpec(P, [0, 1, 1, 0])
    tr = trace(spec, np.linspace(0, 10, 1000))
    assert np.abs(tr.speed - 1).max() < 1e-9
    assert tr.max_horizontality() < 1e-10
    assert tr.max_radius_error() < 1e-9


@pytest.mark.parametrize("dim,kind", [(4, CONTACT), (6, CONTACT), (8, QUATERNIONIC), (12, QUATERNIONIC)])
def test_analytic_velocity_matches_fd(dim, kind):
    rng = np.random.default_rng(dim)
    spec = random_tangent_spec(rng, dim, kind)
    t = np.linspace(0, 3, 40)
    fd = fd_derivative(lambda s: geodesic(spec, s), t)
    assert np.abs(geodesic_velocity(spec, t) - fd).max() < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(4, CONTACT), (8, CONTACT), (8, QUATERNIONIC), (12, QUATERNIONIC)]))
def test_speed_identity_and_length(seed, space):
    dim, kind = space
    spec = random_tangent_spec(np.random.default_rng(seed), dim, kind)
    tr = trace(spec, np.linspace(0, 4, 200))
    assert np.abs(tr.pythagoras_residual()).max() <= 1e-9 * max(1.0, spec.v @ spec.v)
    assert tr.max_horizontality() <= 1e-9 * max(1.0, np.linalg.norm(spec.v)) ** 2
    assert spec.length(1.0, 3.0) == pytest.approx(2 * math.sqrt(spec.v @ spec.v - spec.moments @ spec.moments))


def test_hermitian_identity():
    rng = np.random.default_rng(7)
    spec = random_tangent_spec(rng, 6, CONTACT)
    t = np.linspace(0, 10, 300)
    assert np.abs(hermitian_velocity_product(spec, t) - 1j * spec.moments[0]).max() < 1e-10


def test_curvature_examples():
    assert curvature_s3(GeodesicSpec(P, [0, 0, 1, 0])) == 0
    assert curvature_s3(GeodesicSpec(P, [0, 0.75, 1, 0])) == pytest.approx(0.75)
    assert curvature_s3(GeodesicSpec(P, [0, -0.5, 0.6, 0.8])) == pytest.approx(-0.5)
    with pytest.raises(SpecError):
        curvature_s3(GeodesicSpec(P, [0, 1, 2, 0]))


def test_curvature_ode():
    samples = np.linspace(0, 10, 200)
    assert curvature_ode_residual(GeodesicSpec(P, [0, 0, 1, 0]), samples) <= 1e-6
    spec = GeodesicSpec(P, [0, 1, 1, 0])
    assert curvature_ode_residual(spec, samples, 1e-4) <= 1e-6
    r1 = curvature_ode_residual(spec, samples, 2e-2)
    r2 = curvature_ode_residual(spec, samples, 1e-2)
    assert r1 / r2 == pytest.approx(4, rel=0.05)


def test_exact_closedness():
    assert is_closed_contact(0) == (True, 2 * math.pi)
    closed, T = is_closed_contact(Fraction(3, 4))
    assert closed and T == pytest.approx(4 * math.pi)
    assert is_closed_contact(1) == (False, None)
    with pytest.raises(TypeError):
        is_closed_contact(0.75)


@pytest.mark.parametrize("lam", [Fraction(0), Fraction(3, 4), Fraction(4, 3), Fraction(5, 12), Fraction(-8, 15)])
def test_exact_period_matches_orbit(lam):
    closed, T = is_closed_contact(lam)
    assert closed
    spec = GeodesicSpec(P, [0, float(lam), 1, 0])
    assert np.linalg.norm(geodesic(spec, T) - P) < 1e-9
    k, T_found = first_return(spec, 200)
    assert T_found == pytest.approx(T)


def test_irrational_orbit_never_returns():
    d = orbit_return_distances(GeodesicSpec(P, [0, 1, 1, 0]), 100)
    assert d.min() > 1e-3


def test_quaternionic_report_horizontal():
    p = np.eye(8)[0]
    rep = is_closed_quaternionic(GeodesicSpec.from_exact(p, [0, 0, 0, 0, 1, 0, 0, 0], QUATERNIONIC))
    assert rep["criterion_as_stated"] and rep["orbit_criterion"] and rep["numeric_closed"]
    assert rep["agree"]


def test_quaternionic_report_side_by_side():
    p = np.eye(8)[0]
    spec = GeodesicSpec(p, [0, 1, 0, 0, 1, 0, 0, 0], QUATERNIONIC)
    rep = is_closed_quaternionic(spec, moment_squares=[1, 0, 0], norm_sq=2)
    assert rep["criterion_as_stated"] is True
    assert rep["orbit_criterion"] is False
    assert rep["numeric_closed"] is False
    # moment sqrt(2) s: the printed criterion says open
    s = Fraction(1, 3)
    rep2 = is_closed_quaternionic(spec, moment_squares=[2 * s * s, 0, 0], norm_sq=2)
    assert rep2["criterion_as_stated"] is False


def test_quaternionic_float_input_has_no_exact_verdict():
    p = np.eye(8)[0]
    rep = is_closed_quaternionic(GeodesicSpec(p, [0, 0.3, 0, 0, 1, 0, 0, 0], QUATERNIONIC), t_max=20)
    assert rep["criterion_as_stated"] is None and rep["agree"] is None


def _complex_rotate(w, theta):
    # multiply by e^{i theta} with the pairing (x0 + i x1, x2 + i x3, ...)
    z = w[0::2] + 1j * w[1::2]
    z = np.exp(1j * theta) * z
    out = np.empty_like(w)
    out[0::2], out[1::2] = z.real, z.imag
    return out


def _hausdorff(a, b):
    d = cdist(a, b)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def _span_residual(points, basis):
    q, _ = np.linalg.qr(basis.T)
    return float(np.abs(points - points @ q @ q.T).max())


def test_moduli_of_horizontal_geodesics():
    p = np.array([1.0, 0, 0, 0, 0, 0])
    v = np.array([0.0, 0, 1, 0, 0, 0])
    ts = np.linspace(0, 2 * np.pi, 4001)
    base = geodesic(GeodesicSpec(p, v), ts)
    line = np.array([p, _complex_rotate(p, np.pi / 2), v, _complex_rotate(v, np.pi / 2)])

    # same complex line: stays in the complex span of p and v
    for theta in (np.pi / 3, np.pi / 2):
        rot = geodesic(GeodesicSpec(p, _complex_rotate(v, theta)), ts)
        assert _span_residual(rot, line) <= 1e-8
    # the point set only repeats for theta in pi Z
    flip = geodesic(GeodesicSpec(p, _complex_rotate(v, np.pi)), ts)
    assert _hausdorff(base, flip) <= 1e-8
    assert _hausdorff(base, geodesic(GeodesicSpec(p, _complex_rotate(v, np.pi / 2)), ts)) >= 0.1

    other = geodesic(GeodesicSpec(p, np.array([0.0, 0, 0, 0, 1, 0])), ts)
    assert _span_residual(other, line) >= 0.1
    assert _hausdorff(base, other) >= 0.1
