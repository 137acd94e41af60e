import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drury_arveson.multiindex import (
    dim_asymptotic_ratio,
    dim_by_recurrence,
    dim_symmetric,
    enumerate_degree,
)


def generating_coefficient(d, n):
    """Coefficient of z^n in (1 + z + ... + z^n)^d over exact rationals."""
    geometric = [Fraction(1)] * (n + 1)
    poly = [Fraction(1)] + [Fraction(0)] * n
    for _ in range(d):
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(poly):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * geometric[j]
        poly = out
    return poly[n]


def test_enumerate_examples():
    assert enumerate_degree(1, 5) == ((5,),)
    assert enumerate_degree(2, 3) == ((3, 0), (2, 1), (1, 2), (0, 3))
    assert len(enumerate_degree(3, 2)) == 6
    assert enumerate_degree(3, 0) == ((0, 0, 0),)


@pytest.mark.parametrize("d,n", [(1, 4), (2, 5), (3, 4), (4, 3), (5, 2)])
def test_enumerate_order_and_content(d, n):
    out = enumerate_degree(d, n)
    assert len(out) == dim_symmetric(d, n)
    assert all(sum(a) == n and len(a) == d for a in out)
    assert all(a > b for a, b in zip(out, out[1:]))  # strictly descending, no duplicates


def test_dim_examples():
    assert dim_symmetric(2, 3) == 4
    assert dim_symmetric(1, 100) == 1
    assert dim_symmetric(3, 2) == 6
    assert dim_by_recurrence(2, 4) == 5
    assert dim_by_recurrence(2, 0) == 1
    assert dim_by_recurrence(4, 3) == 20


def test_recurrence_matches_closed_form():
    for d in range(1, 7):
        for n in range(61):
            assert dim_by_recurrence(d, n) == dim_symmetric(d, n)


def test_generating_function():
    for d in range(1, 5):
        for n in range(31):
            assert generating_coefficient(d, n) == dim_symmetric(d, n)


def test_asymptotic_ratio():
    for n in (1, 7, 50):
        assert dim_asymptotic_ratio(1, n) == 1.0
    assert dim_asymptotic_ratio(2, 9) == 1.0
    assert abs(dim_asymptotic_ratio(3, 1000) - 1.0) < 0.01
    with pytest.raises(ValueError):
        dim_asymptotic_ratio(2, 0)


@given(st.integers(1, 6), st.integers(0, 200))
def test_dim_closed_form_is_factorial_ratio(d, n):
    assert dim_symmetric(d, n) * math.factorial(n) * math.factorial(d - 1) == math.factorial(n + d - 1)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        enumerate_degree(0, 2)
    with pytest.raises(ValueError):
        dim_symmetric(2, -1)
