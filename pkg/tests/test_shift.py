import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_poly, random_unitary
from drury_arveson import basis as basis_mod
from drury_arveson.fock import ResourceError
from drury_arveson.h2space import Poly, h2_norm, to_vector
from drury_arveson.multiindex import dim_symmetric
from drury_arveson.shift import (
    OperatorMatrix,
    apply_polynomial,
    build_basis,
    covariance_residual,
    e0_projection,
    multiplication_matrix,
    number_operator,
    pstar_power_diagonal,
    pstar_power_diagonal_exact,
    pstar_power_direct,
    relation_residuals,
    shift_matrix,
    word_norm_sum,
)


@pytest.mark.parametrize("d,N,size", [(2, 2, 6), (1, 5, 6), (3, 3, 20)])
def test_basis_size(d, N, size):
    b = build_basis(d, N)
    assert b.size == size == sum(dim_symmetric(d, n) for n in range(N + 1))
    assert b.indices[0] == (0,) * d


def test_basis_cap():
    with pytest.raises(ResourceError):
        build_basis(6, 40)


def test_shift_examples():
    b = build_basis(2, 3)
    S1 = shift_matrix(0, b).matrix
    assert S1[b.index((1, 0)), 0] == 1.0
    assert S1[b.index((1, 1)), b.index((0, 1))] == pytest.approx(math.sqrt(0.5))
    for col in range(b.block(3).start, b.size):
        assert not np.any(S1[:, col])
    assert all(np.count_nonzero(S1[:, c]) <= 1 for c in range(b.size))


def test_multiplication_examples():
    b = build_basis(2, 5)
    assert np.array_equal(multiplication_matrix(Poly.constant(2), b).matrix, np.eye(b.size))
    z1, z2 = Poly.coordinate(2, 0), Poly.coordinate(2, 1)
    S1, S2 = shift_matrix(0, b).matrix, shift_matrix(1, b).matrix
    M = multiplication_matrix(z1 * z2, b).matrix
    assert np.max(np.abs(M - S1 @ S2)) < 1e-14
    assert np.max(np.abs(M - S2 @ S1)) < 1e-14
    f = random_poly(2, 3, 4)
    Mf = multiplication_matrix(f, b).matrix
    assert np.linalg.norm(Mf[:, 0]) == pytest.approx(h2_norm(f), rel=1e-12)


def test_multiplication_matches_shift_products():
    b = build_basis(3, 4)
    f = random_poly(3, 3, 11)
    S = [shift_matrix(k, b).matrix for k in range(3)]
    expected = np.zeros((b.size, b.size), dtype=complex)
    for alpha, c in f.coeffs.items():
        P = np.eye(b.size)
        for k, a in enumerate(alpha):
            P = P @ np.linalg.matrix_power(S[k], a)
        expected += c * P
    assert np.max(np.abs(multiplication_matrix(f, b).matrix - expected)) < 1e-12
    # block lower triangular in the grading
    M = multiplication_matrix(f, b).matrix
    degs = b.degrees()
    assert not np.any(M[degs[:, None] < degs[None, :]])


def test_multiplication_degree_overflow():
    with pytest.raises(ValueError):
        multiplication_matrix(Poly.coordinate(2, 0) ** 4, build_basis(2, 3))


def test_apply_polynomial_matches_coefficients():
    b = build_basis(2, 6)
    f = random_poly(2, 4, 3)
    v = apply_polynomial(f, b)
    assert np.allclose(v, to_vector(f, b), atol=1e-13)
    assert np.allclose(v, multiplication_matrix(f, b).matrix[:, 0], atol=1e-13)


def test_number_and_e0():
    b = build_basis(3, 4)
    assert np.trace(e0_projection(b).matrix) == 1
    vals, counts = np.unique(np.diag(number_operator(b).matrix).real, return_counts=True)
    assert list(vals) == [0, 1, 2, 3, 4]
    assert list(counts) == [dim_symmetric(3, n) for n in range(5)]
    S = [shift_matrix(k, b).matrix for k in range(3)]
    total = sum(s @ s.conj().T for s in S) + e0_projection(b).matrix
    assert np.max(np.abs(total - np.eye(b.size))) < 1e-15


def test_relations_d2():
    res = relation_residuals(build_basis(2, 6))
    for name, value in res.items():
        if name.startswith("hyponormal"):
            assert value >= -1e-12
        elif name == "adjoint_sum_norm":
            assert value == pytest.approx(2.0, abs=1e-12)
        else:
            assert value < 1e-12, name


def test_relations_d1_self_commutator_is_e0():
    b = build_basis(1, 6)
    res = relation_residuals(b)
    assert res["commutator[0,0]"] < 1e-12
    S = shift_matrix(0, b).matrix
    inner = b.upto(5)
    E0 = e0_projection(b).matrix
    assert np.max(np.abs((S.conj().T @ S - S @ S.conj().T - E0)[inner, inner])) < 1e-12


def test_relations_need_interior():
    with pytest.raises(ValueError):
        relation_residuals(build_basis(2, 1))


def test_relations_fail_on_top_degree():
    # the identities are interior statements; the full truncation violates them
    b = build_basis(2, 4)
    S = [shift_matrix(k, b).matrix for k in range(2)]
    adj = sum(s.conj().T @ s for s in S)
    degs = b.degrees()
    assert np.linalg.norm(adj - np.diag((2 + degs) / (1 + degs))) > 0.1


def test_pstar_diagonal_examples():
    assert pstar_power_diagonal_exact(2, 1, 3) == [2, Fraction(3, 2), Fraction(4, 3), Fraction(5, 4)]
    assert pstar_power_diagonal_exact(2, 2, 0) == [3]
    assert np.array_equal(pstar_power_diagonal(1, 5, 6), np.ones(7))


def test_pstar_direct_matches_closed_form():
    b = build_basis(2, 8)
    A = pstar_power_direct(b, 3).matrix
    inner = b.upto(5)
    sub = A[inner, inner]
    assert np.max(np.abs(sub - np.diag(np.diag(sub)))) < 1e-12
    g = pstar_power_diagonal(2, 3, 5)
    assert np.max(np.abs(np.diag(sub).real - g[b.degrees()[inner]])) < 1e-12
    assert pstar_power_direct(build_basis(3, 4), 1).matrix[0, 0] == pytest.approx(3)
    one = pstar_power_direct(build_basis(1, 7), 3).matrix
    assert np.allclose(np.diag(one)[:5], 1)
    with pytest.raises(ValueError):
        pstar_power_direct(b, 9)


def test_truncation_compression_law():
    small, big = build_basis(3, 4), build_basis(3, 7)
    k = small.upto(3).stop
    for c in range(3):
        a = shift_matrix(c, small).matrix[:k, :k]
        b = shift_matrix(c, big).matrix[:k, :k]
        assert np.array_equal(a, b)


@pytest.mark.parametrize("d,N", [(1, 5), (2, 6), (3, 4)])
def test_row_contraction_and_commutativity(d, N):
    b = build_basis(d, N)
    S = [shift_matrix(k, b).matrix for k in range(d)]
    assert np.linalg.norm(sum(s @ s.conj().T for s in S), 2) <= 1 + 1e-15
    for i in range(d):
        for j in range(d):
            # same weight product along both paths, up to one rounding per factor
            assert np.max(np.abs(S[i] @ S[j] - S[j] @ S[i])) < 1e-15


def test_unitary_covariance():
    assert covariance_residual(random_unitary(2, 5), build_basis(2, 5)) < 1e-10
    assert covariance_residual(random_unitary(3, 6), build_basis(3, 3)) < 1e-10


def test_word_norm_sum_is_dimension():
    for d in range(1, 4):
        for n in range(9):
            assert word_norm_sum(d, n) == dim_symmetric(d, n)


def test_operator_matrix_json_roundtrip():
    b = build_basis(2, 2)
    M = shift_matrix(1, b) * (1 + 1j)
    back = OperatorMatrix.from_json(M.to_json())
    assert back.basis == b
    assert np.array_equal(back.matrix, M.matrix)


def test_dense_cap(monkeypatch):
    monkeypatch.setattr(basis_mod, "DENSE_CAP", 10)
    with pytest.raises(ResourceError):
        shift_matrix(0, build_basis(2, 4))
