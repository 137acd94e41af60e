import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drury_arveson.extremal import (
    ExtremalSeries,
    build_extremal_fN,
    energy_lower_bound,
    energy_shift,
    exact_energy,
    multiplier_lower_bound,
    partial_coefficient_sum,
    ratio_growth,
    sample_commuting_tuple,
)
from drury_arveson.h2space import Poly, h2_norm
from drury_arveson.multiindex import dim_symmetric
from drury_arveson.numerics import sphere_sup
from drury_arveson.shift import build_basis


def ratio_oracle(d, n):
    # direct from exact integers: ||p^n||^2 = (n!)^d/(nd)!, sup|p^n|^2 = d^{-nd}
    return math.sqrt(Fraction(d ** (n * d) * math.factorial(n) ** d, math.factorial(n * d)))


@pytest.mark.parametrize("d,n", [(1, 5), (2, 1), (2, 7), (3, 4), (4, 3)])
def test_ratio_matches_exact_oracle(d, n):
    assert ratio_growth(d, n).ratio == pytest.approx(ratio_oracle(d, n), rel=1e-12)


def test_ratio_examples():
    assert ratio_growth(1, 9).ratio == pytest.approx(1.0)
    assert ratio_growth(2, 1).ratio == pytest.approx(math.sqrt(2))
    row = ratio_growth(2, 100)
    assert row.ratio == pytest.approx(4.21, abs=0.01)
    assert abs(row.relative - 1) < 0.02
    assert 0.98 <= ratio_growth(2, 200).relative <= 1.02


def test_ratio_matches_h2_norm_of_power():
    d, n = 2, 6
    p = Poly.coordinate(d, 0) * Poly.coordinate(d, 1)
    sup = d ** (-n * d / 2)
    assert h2_norm(p**n) / sup == pytest.approx(ratio_growth(d, n).ratio, rel=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_ratio_asymptote_relative_tends_to_one(d):
    assert abs(ratio_growth(d, 2000).relative - 1) < 1e-3


def test_series_coefficients():
    s = ExtremalSeries(2)
    assert list(s.support(100)) == [4, 16, 64]
    assert s.coefficient(8) == 0 and s.coefficient(1) == 0
    assert s.coefficient(16) == pytest.approx(s.scale * 16 ** -0.25)
    q = 4**-0.25
    assert 1 - partial_coefficient_sum(s, 4**30) == pytest.approx(q**30, rel=1e-9)
    with pytest.raises(ValueError):
        ExtremalSeries(1)


def test_fN_examples():
    s = ExtremalSeries(2)
    f0, n0 = build_extremal_fN(s, 0)
    assert f0.degree == -1 and n0 == 0
    f, norm_sq = build_extremal_fN(s, 64)
    assert h2_norm(f) ** 2 == pytest.approx(norm_sq, rel=1e-12)
    assert sphere_sup(f) <= partial_coefficient_sum(s, 64) + 1e-6
    assert sphere_sup(f) == pytest.approx(partial_coefficient_sum(s, 64), abs=1e-6)


def test_fN_norm_nondecreasing():
    s = ExtremalSeries(2)
    norms = [build_extremal_fN(s, N)[1] for N in (4, 16, 64, 256)]
    assert all(a < b for a, b in zip(norms, norms[1:]))


def test_multiplier_lower_bound_examples():
    z1, z2 = Poly.coordinate(2, 0), Poly.coordinate(2, 1)
    basis = build_basis(2, 8)
    assert multiplier_lower_bound(z1, basis) == pytest.approx(1, abs=1e-9)
    assert multiplier_lower_bound(Poly.constant(2, 1), basis) == pytest.approx(1, abs=1e-12)
    assert multiplier_lower_bound(2 * z1 * z2, basis) >= math.sqrt(2) - 1e-9


def test_energy_examples():
    assert exact_energy(2, 3) == 4
    assert exact_energy(3, 2) == 6
    for d, n in [(2, 3), (3, 2), (2, 5)]:
        r = energy_shift(d, n)
        assert r.closed_form == pytest.approx(r.direct, rel=1e-12)
        assert r.closed_form == r.bound == dim_symmetric(d, n)


def test_energy_of_scaled_unitaries_is_one():
    rng = np.random.default_rng(1)
    d, m = 3, 4
    mats = [np.diag(np.exp(2j * np.pi * rng.random(m))) / math.sqrt(d) for _ in range(d)]
    for n in (1, 3, 6):
        assert energy_lower_bound(mats, n) == pytest.approx(1, abs=1e-12)


def test_energy_of_nilpotent_vanishes():
    m = 4
    J = np.diag(np.ones(m - 1), 1)
    mats = [J, np.zeros((m, m))]
    assert energy_lower_bound(mats, m - 1) > 0
    for n in (m, m + 2):
        assert energy_lower_bound(mats, n) == 0


@pytest.mark.parametrize("seed", range(50))
def test_sampled_energy_within_binomial_bound(seed):
    d = 2 + seed % 3
    T = sample_commuting_tuple(d, 4, seed)
    for n in (1, 2, 4, 8):
        assert energy_lower_bound(T, n) <= dim_symmetric(d, n) * (1 + 1e-9)


def test_sample_tuple_is_commuting_row_contraction():
    T = sample_commuting_tuple(3, 5, 7, row_norm=0.8)
    assert T.row_norm == pytest.approx(0.8, rel=1e-12)
    a, b = T.matrices[0], T.matrices[2]
    assert np.max(np.abs(a @ b - b @ a)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 12))
def test_energy_closed_form_is_binomial(d, n):
    assert exact_energy(d, n) == math.comb(n + d - 1, d - 1)
