"""Growth of ``||p^n||_{H^2} / ||p^n||_inf`` for ``p = z_1...z_d``, the
bounded-but-not-multiplier series built from it, and energy sequences.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .basis import TruncatedBasis, build_basis
from .dilation import DContraction, validate
from .h2space import Poly
from .multiindex import dim_symmetric
from .numerics import operator_norm
from .shift import multiplication_matrix, pstar_power_diagonal_exact, pstar_power_direct


def log_ratio_sq(d: int, n: int) -> float:
    """``log( d^{nd} (n!)^d / (nd)! )``, i.e. ``log R_n^2``."""
    return n * d * math.log(d) + d * math.lgamma(n + 1) - math.lgamma(n * d + 1)


@dataclass(frozen=True)
class GrowthRow:
    d: int
    n: int
    ratio: float
    asymptote: float

    @property
    def relative(self) -> float:
        return self.ratio / self.asymptote


def ratio_growth(d: int, n: int) -> GrowthRow:
    """``R_n = ||p^n||_{H^2} / ||p^n||_inf = sqrt(d^{nd} (n!)^d / (nd)!)``.

    The asymptote is the Stirling form ``((2 pi)^{d-1} / d)^{1/4} n^{(d-1)/4}``.
    """
    if d < 1 or n < 1:
        raise ValueError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    ratio = math.exp(0.5 * log_ratio_sq(d, n))
    asym = ((2 * math.pi) ** (d - 1) / d) ** 0.25 * n ** ((d - 1) / 4)
    return GrowthRow(d, n, ratio, asym)


@dataclass(frozen=True)
class ExtremalSeries:
    """Coefficients ``c_n = scale * n^{-(d-1)/4}`` on ``n in {base, base^2, ...}``.

    ``scale`` makes ``sum c_n = 1``: the support sum is geometric with ratio
    ``q = base^{-(d-1)/4}``, so it equals ``q / (1 - q)``.
    """

    d: int
    base: int = 4

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("the extremal series needs d >= 2")
        if self.base < 2:
            raise ValueError("support base must be >= 2")

    @property
    def exponent(self) -> float:
        return -(self.d - 1) / 4

    @property
    def scale(self) -> float:
        q = self.base**self.exponent
        return (1 - q) / q

    def support(self, N: int) -> Iterator[int]:
        n = self.base
        while n <= N:
            yield n
            n *= self.base

    def coefficient(self, n: int) -> float:
        if n < self.base:
            return 0.0
        m = n
        while m % self.base == 0:
            m //= self.base
        return self.scale * n**self.exponent if m == 1 else 0.0

    def metadata(self) -> dict:
        return {"d": self.d, "support": f"powers of {self.base}", "exponent": self.exponent, "scale": self.scale}


def build_extremal_fN(series: ExtremalSeries, N: int) -> tuple[Poly, float]:
    """Partial sum ``f_N = sum_{n<=N} c_n s^{-n} (z_1...z_d)^n`` with ``s = d^{-d/2}``.

    Returns the polynomial and its squared H^2 norm in closed form,
    ``sum_{n<=N} c_n^2 R_n^2``.
    """
    d = series.d
    coeffs = {}
    norm_sq = 0.0
    for n in series.support(N):
        c = series.coefficient(n)
        coeffs[(n,) * d] = c * d ** (n * d / 2)
        norm_sq += c * c * math.exp(log_ratio_sq(d, n))
    return Poly(d, coeffs), norm_sq


def partial_coefficient_sum(series: ExtremalSeries, N: int) -> float:
    return sum(series.coefficient(n) for n in series.support(N))


def multiplier_lower_bound(f: Poly, basis: TruncatedBasis) -> float:
    """``||M_f||`` on the truncation: a lower bound for the multiplier norm."""
    return operator_norm(multiplication_matrix(f, basis)).value


@dataclass(frozen=True)
class EnergyReport:
    d: int
    n: int
    closed_form: float
    direct: float
    bound: int

    def row(self) -> dict:
        return asdict(self)


def energy_shift(d: int, n: int) -> EnergyReport:
    """``||P_*^n(1)||`` for the d-shift three ways: closed form, direct, dimension bound."""
    if d < 1 or n < 1:
        raise ValueError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    closed = pstar_power_diagonal_exact(d, n, 0)[0]
    basis = build_basis(d, n + 2)
    direct = float(pstar_power_direct(basis, n).matrix[0, 0].real)
    return EnergyReport(d, n, float(closed), direct, dim_symmetric(d, n))


def energy_lower_bound(T: DContraction | Sequence[np.ndarray], n: int) -> float:
    """``||sum_{|w|=n} T_w^* T_w||`` by iterating ``A -> sum_k T_k^* A T_k`` from 1."""
    if not isinstance(T, DContraction):
        T = validate(T)
    A = np.eye(T.m, dtype=complex)
    for _ in range(n):
        A = sum(t.conj().T @ A @ t for t in T.matrices)
    return operator_norm(A).value


def sample_commuting_tuple(d: int, m: int, seed: int, row_norm: float = 1.0, degree: int = 3) -> DContraction:
    """Deterministic commuting tuple ``(p_1(J), ..., p_d(J))`` scaled to ``row_norm``.

    ``J`` is a Jordan block followed by a diagonal part and the ``p_k`` are
    polynomials with seeded Gaussian coefficients, so commutativity holds by
    construction rather than numerically.
    """
    rng = np.random.default_rng(seed)
    jb = max(1, m // 2)
    J = np.zeros((m, m), dtype=complex)
    lam = 0.5 * (rng.standard_normal() + 1j * rng.standard_normal())
    for i in range(jb):
        J[i, i] = lam
        if i + 1 < jb:
            J[i, i + 1] = 1.0
    for i in range(jb, m):
        J[i, i] = rng.standard_normal() + 1j * rng.standard_normal()
    powers = [np.eye(m, dtype=complex)]
    for _ in range(degree):
        powers.append(powers[-1] @ J)
    mats = []
    for _ in range(d):
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        mats.append(sum(ci * P for ci, P in zip(c, powers)))
    current = math.sqrt(max(np.linalg.eigvalsh(sum(t @ t.conj().T for t in mats))[-1], 0.0))
    if current == 0:
        return validate(mats)
    return validate([t * (row_norm / current) for t in mats])


def experiment_rows(d: int, n_max: int) -> list[dict]:
    rows = []
    for n in range(1, n_max + 1):
        g = ratio_growth(d, n)
        rows.append({"d": d, "n": n, "ratio": g.ratio, "asymptote": g.asymptote, "relative": g.relative})
    return rows


def exact_energy(d: int, n: int) -> Fraction:
    return pstar_power_diagonal_exact(d, n, 0)[0]
