"""Acceptance criteria 1-9, each at its stated tolerance and time budget."""
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_poly
from drury_arveson.dilation import a_infinity, amorphism_apply, build_L, defect, degree_subspace, model_compress, vn_check
from drury_arveson.extremal import (
    ExtremalSeries,
    build_extremal_fN,
    energy_lower_bound,
    ratio_growth,
    sample_commuting_tuple,
)
from drury_arveson.fock import monomial_norm_sq, sym_project_oracle, word_for
from drury_arveson.h2space import Poly, weight_monte_carlo, weight_system
from drury_arveson.multiindex import dim_by_recurrence, dim_symmetric, enumerate_degree, enumerate_upto
from drury_arveson.shift import (
    apply_polynomial,
    build_basis,
    constant_vector,
    multiplication_matrix,
    pstar_power_direct,
    relation_residuals,
)
from drury_arveson.zeta import convergence_verdict


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.1f} s, budget {seconds} s"


def test_criterion_1_monomial_norm_oracle():
    with budget(30):
        for d in (1, 2, 3):
            for k in enumerate_upto(d, 6):
                assert sym_project_oracle(word_for(k), d).norm_sq == monomial_norm_sq(k), k


@pytest.mark.parametrize("d,N", [(2, 6), (3, 5)])
def test_criterion_2_commutation_relations(d, N):
    with budget(60):
        res = relation_residuals(build_basis(d, N))
        for name, value in res.items():
            if name.startswith("hyponormal"):
                assert value >= -1e-12, name
            elif name == "adjoint_sum_norm":
                assert abs(value - d) < 1e-10
            else:
                assert value < 1e-10, name


def test_criterion_3_growth_and_extremal_norm():
    with budget(60):
        assert 4.0 <= ratio_growth(2, 100).ratio <= 4.5
        assert 0.98 <= ratio_growth(2, 200).relative <= 1.02
        series = ExtremalSeries(2)
        basis = build_basis(2, 128)
        one = constant_vector(basis)
        prev = 0.0
        for N in (1, 4, 8, 16, 32, 64):
            f, closed = build_extremal_fN(series, N)
            direct = float(np.linalg.norm(apply_polynomial(f, basis, one)) ** 2)
            assert abs(direct - closed) <= 1e-9 * max(closed, 1.0), N
            assert closed >= prev
            prev = closed


def test_criterion_4_coisometry():
    with budget(120):
        for seed in range(10):
            T = sample_commuting_tuple(2, 2 + seed % 7, seed, row_norm=0.8)
            res = build_L(T, 20)
            assert res.norm_L <= 1 + 1e-9
            assert res.coisometry_residual <= 0.8**42 + 1e-9


def _monomials(d, degree):
    return [Poly.monomial(a) for a in enumerate_upto(d, degree)]


@pytest.mark.parametrize("t,tol", [((0.5, 0.0), 1e-6), ((0.0, 0.0), 1e-12)])
def test_criterion_5_amorphism_scalar_model(t, tol):
    from drury_arveson.dilation import validate
    from drury_arveson.h2space import evaluate

    N = 40
    T = validate([np.array([[c]], dtype=complex) for c in t])
    dil = build_L(T, N)
    mats = [(f, multiplication_matrix(f, dil.basis).matrix) for f in _monomials(2, 3)]
    assert len(mats) ** 2 == 100
    for f, Mf in mats:
        for g, Mg in mats:
            value = amorphism_apply(T, N, Mf @ Mg.conj().T, dilation=dil)[0, 0]
            expected = evaluate(f, t) * np.conj(evaluate(g, t))
            assert abs(value - expected) <= tol


def test_criterion_6_energy_maximality():
    for d in (1, 2, 3):
        for n in range(1, 6):
            direct = pstar_power_direct(build_basis(d, n + 1), n).matrix[0, 0]
            assert abs(direct - math.comb(n + d - 1, d - 1)) <= 1e-10
    violations = 0
    for seed in range(50):
        d = 2 + seed % 2
        T = sample_commuting_tuple(d, 4, 1000 + seed)
        for n in range(1, 9):
            if energy_lower_bound(T, n) > dim_symmetric(d, n) + 1e-9:
                violations += 1
    assert violations == 0


def test_criterion_7_model_theory():
    d, m, N = 2, 3, 8
    T = model_compress(1, None, degree_subspace(d, N, m), N, d=d)
    assert defect(T).rank == 1
    null = a_infinity(T)
    assert null.verdict == "null" and null.exact_zero
    for seed in range(20):
        rep = vn_check(T, random_poly(d, 3, seed), N, assert_bound=True)
        assert rep.lhs <= rep.rhs + 1e-9, seed


def test_criterion_8_appendix():
    with budget(60):
        for d in range(1, 7):
            for n in range(61):
                assert dim_by_recurrence(d, n) == dim_symmetric(d, n)
        assert abs(ratio_growth(3, 1000).relative - 1) < 0.01
        assert convergence_verdict(2, 2).verdict == "divergent"
        rep = convergence_verdict(2, 3, M=10**6)
        assert rep.verdict == "convergent"
        assert abs(rep.partial_sum - 1.644934) <= 1e-5


SPOT = [(1, 0), (1, 1), (2, 1), (1, 1, 1), (2, 0, 0, 1)]


def test_criterion_9_norm_domination():
    for kind in ("HardyBoundary", "Bergman"):
        for alpha in SPOT:
            exact = weight_system(kind, len(alpha)).weight(alpha)
            assert abs(weight_monte_carlo(kind, len(alpha), alpha) - float(exact)) <= 1e-3, (kind, alpha)
    for d in range(1, 5):
        da = weight_system("DruryArveson", d)
        others = [weight_system(k, d) for k in ("HardyBoundary", "Bergman")]
        for n in range(21):
            for alpha in enumerate_degree(d, n):
                w = da.weight(alpha)
                assert isinstance(w, Fraction)
                for ws in others:
                    assert ws.weight(alpha) <= w
