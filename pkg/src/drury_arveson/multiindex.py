"""Exact combinatorics of multi-indices and symmetric tensor dimensions.

A multi-index is a plain tuple of nonnegative ints ``(a_1, ..., a_d)``.
Every basis in this package is ordered graded-lexicographically: by total
degree first, then lexicographically *descending* on the exponent tuple, so
that for ``d = 2, n = 3`` the order is ``(3,0), (2,1), (1,2), (0,3)``.

Factorial ratios are exact (``int`` / ``fractions.Fraction``); conversion to
floating point is left to the numerical modules.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Tuple

MultiIndex = Tuple[int, ...]


def _check_dim(d: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")


def _check_degree(n: int) -> None:
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")


def _descending(d: int, n: int) -> Iterator[MultiIndex]:
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _descending(d - 1, n - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_degree(d: int, n: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length ``d`` and total degree ``n``, graded-lex order."""
    _check_dim(d)
    _check_degree(n)
    return tuple(_descending(d, n))


def enumerate_upto(d: int, N: int) -> list[MultiIndex]:
    """All multi-indices with total degree ``0..N``, degree blocks in order."""
    out: list[MultiIndex] = []
    for n in range(N + 1):
        out.extend(enumerate_degree(d, n))
    return out


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def dim_symmetric(d: int, n: int) -> int:
    """Dimension of the degree-``n`` symmetric power of ``C^d``.

    Equal to ``(n+d-1)! / (n! (d-1)!)``, the number of monomials of degree
    ``n`` in ``d`` variables.
    """
    _check_dim(d)
    _check_degree(n)
    return math.comb(n + d - 1, d - 1)


def dim_by_recurrence(d: int, n: int) -> int:
    """Same number as :func:`dim_symmetric`, via running prefix sums.

    Seeds ``a[k, 1] = 1`` and applies ``a[n, e+1] = a[0, e] + ... + a[n, e]``
    ``d - 1`` times.  Used to cross-check the closed form.
    """
    _check_dim(d)
    _check_degree(n)
    row = [1] * (n + 1)
    for _ in range(d - 1):
        acc = 0
        for k in range(n + 1):
            acc += row[k]
            row[k] = acc
    return row[n]


def dim_asymptotic_ratio(d: int, n: int) -> float:
    """``dim_symmetric(d, n) * (d-1)! / (n+1)**(d-1)``; tends to 1 as n grows."""
    _check_dim(d)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ratio = Fraction(dim_symmetric(d, n) * math.factorial(d - 1), (n + 1) ** (d - 1))
    return float(ratio)


def factorial_product(alpha: MultiIndex) -> int:
    """``alpha! = a_1! a_2! ... a_d!``."""
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def add_unit(alpha: MultiIndex, k: int, step: int = 1) -> MultiIndex:
    """``alpha + step * e_k`` (0-based coordinate ``k``)."""
    lst = list(alpha)
    lst[k] += step
    if lst[k] < 0:
        raise ValueError(f"negative exponent in coordinate {k} of {alpha}")
    return tuple(lst)


def zero(d: int) -> MultiIndex:
    _check_dim(d)
    return (0,) * d
