import math

import numpy as np
import pytest

from srsphere.algebra import DiffOperator, Poly, radius_squared, reduce_mod_sphere
from srsphere.frames import s7_fields
from srsphere.subelliptic import (
    ChartBoundaryError,
    QuotientBasis,
    ambient_to_hopf,
    build_sublaplacian,
    commutation_certificate,
    degree_block_spectrum,
    divergence_corrections,
    expected_symbol,
    h1,
    heat_factorization,
    hopf_chart_ops,
    hopf_to_ambient,
    ideal_preservation,
    laplace_beltrami,
    laplace_beltrami_certificate,
    operator_matrix,
    pushforward,
    representative_independence,
    space_matrices,
    sublaplacian_via_popp,
    symbol_matrix,
    vertical_square,
)


@pytest.mark.parametrize("space,value", [("s7", -6), ("s3", -2)])
def test_sublaplacian_on_coordinate(space, value):
    D = build_sublaplacian(space)
    x0 = Poly.var(D.variables, 0)
    assert D(x0) == value * x0
    assert D(Poly.constant(D.variables, 1)).is_zero()


@pytest.mark.parametrize("space", ["s3", "s7"])
def test_divergence_form_matches_sum_of_squares(space):
    assert all(c.is_zero() for c in divergence_corrections(space))
    P = sublaplacian_via_popp(space)
    D = build_sublaplacian(space)
    basis = QuotientBasis(len(D.variables), 3)
    for j in range(len(basis)):
        m = basis.poly(j)
        assert reduce_mod_sphere(P(m) - D(m)).is_zero()
    assert P(Poly.constant(D.variables, 1)).is_zero()


def test_quotient_basis_sizes():
    assert [len(QuotientBasis(8, d)) for d in range(5)] == [1, 9, 44, 156, 450]
    for d in range(5):
        assert len(QuotientBasis(8, d)) == QuotientBasis.expected_size(8, d)
    basis = QuotientBasis(4, 3)
    assert all(m[0] <= 1 for m in basis.monomials)
    assert len(set(basis.monomials)) == len(basis)


def test_basis_is_reduce_image():
    basis = QuotientBasis(8, 4)
    for j in range(len(basis)):
        m = basis.poly(j)
        assert reduce_mod_sphere(m) == m


def test_ideal_preserved_and_representatives():
    assert ideal_preservation("s7") and ideal_preservation("s3")
    assert representative_independence(build_sublaplacian("s7"), n_cosets=20)
    assert representative_independence(laplace_beltrami("s3"), n_cosets=20, seed=4)


def test_degree_one_blocks():
    mats = space_matrices("s7", 1)
    sl = mats["sublaplacian"].basis.degree_slices[1]
    for name, val in [("sublaplacian", -6), ("vertical", -1), ("laplace_beltrami", -7)]:
        assert mats[name].block(sl, sl) == [[val if i == j else 0 for j in range(8)] for i in range(8)]
        assert all(not c for c in mats[name].columns[:1])


def test_operator_matrix_rejects_degree_zero():
    with pytest.raises(ValueError):
        operator_matrix(build_sublaplacian("s7"), 0)


def test_decomposition_exact():
    for d in (1, 2, 3):
        m = space_matrices("s7", d)
        assert m["laplace_beltrami"] == m["sublaplacian"] + m["vertical"]


def test_matrix_product_is_composition():
    fr = s7_fields()
    A = DiffOperator.sum_of_squares(fr[2:3])
    B = DiffOperator.sum_of_squares(fr[4:5])
    MA, MB = operator_matrix(A, 2), operator_matrix(B, 2)
    assert MA @ MB == operator_matrix(A.compose(B), 2)


def test_commutation_certificate_degree_2():
    rep = commutation_certificate(2)
    assert rep.matrix_commutator_zero and rep.polynomial_commutator_zero
    # squared rotations commute on quadratics: the control only bites from degree 3
    assert rep.control_frobenius_sq[2] == 0
    assert rep.control_frobenius_sq[3] > 0
    assert rep.certified


def test_commutation_certificate_needs_degree_2():
    with pytest.raises(ValueError):
        commutation_certificate(1)


@pytest.mark.parametrize("space,dim", [("s7", 7), ("s3", 3)])
def test_laplace_beltrami_spectrum(space, dim):
    cert = laplace_beltrami_certificate(3, space)
    assert cert["filtered"] and cert["scalar_diagonal_blocks"] and cert["annihilating_product_zero"]
    blocks = degree_block_spectrum(space_matrices(space, 3)["laplace_beltrami"])
    assert [b["distinct"] for b in blocks] == [[-k * (k + dim - 1)] for k in range(4)]


def test_sublaplacian_spectrum_splits():
    blocks = degree_block_spectrum(space_matrices("s7", 3)["sublaplacian"])
    # -k(k+6) + m^2 with m = k, k-2, ...
    assert blocks[2]["distinct"] == [-16, -12]
    assert blocks[3]["distinct"] == [-26, -18]
    assert all(b["exact"] for b in blocks)


def test_chart_round_trip_and_boundary():
    rng = np.random.default_rng(0)
    th = np.concatenate([rng.uniform(-3, 3, 4), [0.3, 1.1, 0.7]])
    p = hopf_to_ambient(th)
    assert abs(np.linalg.norm(p) - 1) < 1e-15
    assert np.allclose(ambient_to_hopf(p), th, atol=1e-12)
    with pytest.raises(ChartBoundaryError):
        ambient_to_hopf([1, 0, 0, 0, 0, 0, 0, 0])


def test_chart_symbol_example():
    th = np.array([0.1, -0.4, 2.0, 1.0, 0.5, 0.9, 0.6])
    X1 = s7_fields()[0]
    assert np.allclose(pushforward(X1, th), [1, 1, 1, 1, 0, 0, 0], atol=1e-12)
    S = symbol_matrix(th)
    assert np.allclose(S, expected_symbol(th), atol=1e-9)
    assert S[0, 0] == pytest.approx(1 / (math.cos(0.5) * math.cos(0.6)) ** 2 - 1)
    assert h1(0.5, 0.6) == pytest.approx(S[0, 0])


def test_chart_symbol_independent_of_xi():
    th = np.array([0.1, -0.4, 2.0, 1.0, 0.5, 0.9, 0.6])
    th2 = th.copy()
    th2[:4] += [0.7, -1.1, 0.2, 3.0]
    assert np.allclose(symbol_matrix(th), symbol_matrix(th2), atol=1e-12)


def test_chart_report():
    rep = hopf_chart_ops(100)
    assert rep.x1_pushforward <= 1e-9
    assert rep.symbol_full <= 1e-9
    assert rep.min_symbol_eigenvalue >= -1e-9
    assert rep.symbol_rank == 6


def test_heat_factorization():
    small = heat_factorization(0.5, 1)
    assert small.split_discrepancy <= 1e-12 and small.laplace_beltrami_discrepancy <= 1e-12
    rep = heat_factorization(0.5, 3)
    assert rep.decomposition_exact
    assert rep.split_discrepancy <= 1e-8 and rep.laplace_beltrami_discrepancy <= 1e-8
    with pytest.raises(ValueError):
        heat_factorization(0.0, 2)


def test_non_commuting_heat_split_is_visible():
    # sanity: the same split with X2^2 in place of X1^2 must fail
    from scipy.linalg import expm

    fr = s7_fields()
    A = -operator_matrix(build_sublaplacian("s7"), 3).to_array()
    B = -operator_matrix(DiffOperator.sum_of_squares(fr[1:2]), 3).to_array()
    gap = np.linalg.norm(expm(-0.5 * (A + B)) - expm(-0.5 * A) @ expm(-0.5 * B))
    assert gap > 1e-6


def test_vertical_square_is_x1_squared():
    assert vertical_square("s7") == DiffOperator.sum_of_squares(s7_fields()[:1])
    r2 = radius_squared(s7_fields()[0].variables)
    assert vertical_square("s7")(r2).is_zero()
