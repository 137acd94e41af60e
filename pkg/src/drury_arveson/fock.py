"""Symmetric tensors over ``C^d`` in monomial coordinates.

A degree-``n`` symmetric tensor is stored as a map from multi-indices of
degree ``n`` to amplitudes relative to the (orthogonal, *non-normalized*)
symmetric products ``e_1^{k_1} ... e_d^{k_d}``, i.e. the projections of
``e_1^{(x)k_1} (x) ... (x) e_d^{(x)k_d}`` onto the symmetric subspace.  Their
squared norms are ``k! / |k|!``.

The full ``d**n`` dimensional tensor representation only appears in
:func:`sym_project_oracle`, which exists to cross-check the closed forms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .multiindex import MultiIndex, add_unit, factorial_product

#: Largest full tensor space (``d ** n`` entries) the oracle will materialize.
ORACLE_MAX_ENTRIES = 10**7
#: Largest word length for explicit permutation averaging.
ORACLE_MAX_LENGTH = 8


class ResourceError(RuntimeError):
    """Raised when a requested object would exceed a materialization bound."""


def monomial_norm_sq(k: Sequence[int]) -> Fraction:
    """Exact squared norm ``k_1! ... k_d! / |k|!`` of ``e_1^{k_1} ... e_d^{k_d}``."""
    k = tuple(k)
    if any(a < 0 for a in k):
        raise ValueError(f"negative exponent in {k}")
    return Fraction(factorial_product(k), math.factorial(sum(k)))


@dataclass(frozen=True)
class SymTensor:
    """A homogeneous symmetric tensor of degree ``degree`` over ``C^d``."""

    d: int
    degree: int
    coeffs: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.d:
                raise ValueError(f"multi-index {alpha} has wrong length for d={self.d}")
            if sum(alpha) != self.degree:
                raise ValueError(f"multi-index {alpha} is not of degree {self.degree}")
            if c != 0:
                clean[alpha] = complex(c)
        object.__setattr__(self, "coeffs", clean)

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 * float(monomial_norm_sq(a)) for a, c in self.coeffs.items()))


def sym_inner(s: SymTensor, t: SymTensor) -> complex:
    """``<s, t>``, linear in ``s`` and conjugate-linear in ``t``."""
    if s.d != t.d:
        raise ValueError(f"dimension mismatch: {s.d} != {t.d}")
    if s.degree != t.degree:
        return 0j
    total = 0j
    for alpha, c in s.coeffs.items():
        other = t.coeffs.get(alpha)
        if other is not None:
            total += c * other.conjugate() * float(monomial_norm_sq(alpha))
    return total


def creation_apply(a: Sequence[complex], s: SymTensor) -> SymTensor:
    """Symmetric product ``a . s`` (creation operator for the vector ``a``)."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (s.d,):
        raise ValueError(f"vector of length {s.d} expected")
    out: dict[MultiIndex, complex] = {}
    for alpha, c in s.coeffs.items():
        for j in range(s.d):
            if a[j] != 0:
                beta = add_unit(alpha, j)
                out[beta] = out.get(beta, 0j) + a[j] * c
    return SymTensor(s.d, s.degree + 1, out)


def creation_adjoint_apply(a: Sequence[complex], t: SymTensor) -> SymTensor:
    """Adjoint of :func:`creation_apply`, lowering the degree by one.

    On a symmetric product of basis vectors this averages over which factor
    is removed, weighting each by its inner product with ``a``; in monomial
    coordinates the amplitude of ``k`` feeds ``k - e_j`` with weight
    ``(k_j / |k|) * conj(a_j)``.
    """
    if t.degree < 1:
        raise ValueError("creation adjoint is undefined on degree-0 tensors")
    a = np.asarray(a, dtype=complex)
    if a.shape != (t.d,):
        raise ValueError(f"vector of length {t.d} expected")
    out: dict[MultiIndex, complex] = {}
    for k, c in t.coeffs.items():
        for j in range(t.d):
            if k[j] and a[j] != 0:
                beta = add_unit(k, j, -1)
                out[beta] = out.get(beta, 0j) + (k[j] / t.degree) * a[j].conjugate() * c
    return SymTensor(t.d, t.degree - 1, out)


@dataclass(frozen=True)
class SymmetrizedTensor:
    """Result of brute-force symmetrization of one basis word.

    ``counts[idx] / n_perms`` is the amplitude of the full tensor at flat
    index ``idx`` of ``(C^d)^{(x) n}``.
    """

    d: int
    word: tuple[int, ...]
    counts: np.ndarray
    n_perms: int
    norm_sq: Fraction

    def dense(self) -> np.ndarray:
        return self.counts.reshape((self.d,) * len(self.word)) / self.n_perms


def sym_project_oracle(word: Sequence[int], d: int) -> SymmetrizedTensor:
    """Average ``e_{i_1} (x) ... (x) e_{i_n}`` over all ``n!`` permutations.

    ``word`` holds 0-based basis labels.  The full tensor space is
    materialized explicitly, so this is only usable for tiny ``d ** n``;
    the returned squared norm is exact.
    """
    word = tuple(int(i) for i in word)
    n = len(word)
    if any(not 0 <= i < d for i in word):
        raise ValueError(f"labels must lie in 0..{d - 1}: {word}")
    if n > ORACLE_MAX_LENGTH or d**n > ORACLE_MAX_ENTRIES:
        raise ResourceError(f"word of length {n} over d={d} is too large to symmetrize explicitly")
    counts = np.zeros(d**n, dtype=np.int64)
    strides = [d ** (n - 1 - p) for p in range(n)]
    for perm in itertools.permutations(range(n)):
        counts[sum(word[perm[p]] * strides[p] for p in range(n))] += 1
    n_perms = math.factorial(n)
    norm_sq = Fraction(int(sum(int(c) * int(c) for c in counts[counts != 0])), n_perms * n_perms)
    return SymmetrizedTensor(d, word, counts, n_perms, norm_sq)


def word_for(k: Sequence[int]) -> tuple[int, ...]:
    """The sorted word with exponent profile ``k`` (``k_j`` copies of ``j``)."""
    return tuple(j for j, kj in enumerate(k) for _ in range(kj))
