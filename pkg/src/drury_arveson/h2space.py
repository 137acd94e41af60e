"""Polynomials in the Drury-Arveson space: inner product, kernels, symmetries."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .basis import OperatorMatrix, TruncatedBasis, check_dense
from .fock import monomial_norm_sq
from .multiindex import MultiIndex, enumerate_upto

UNITARY_TOL = 1e-12


class Poly:
    """Finitely supported map ``multi-index -> complex`` in ``d`` variables.

    Zero coefficients are never stored, so the zero polynomial is the empty
    map; its ``degree`` is ``-1``.
    """

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: Mapping[Sequence[int], complex] | None = None):
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        self.d = d
        clean: dict[MultiIndex, complex] = {}
        for alpha, c in (coeffs or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != d or any(a < 0 for a in alpha):
                raise ValueError(f"invalid multi-index {alpha} for d={d}")
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0j) + c
        self.coeffs = {a: c for a, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, d: int, c: complex = 1.0) -> "Poly":
        return cls(d, {(0,) * d: c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: complex = 1.0) -> "Poly":
        return cls(len(alpha), {tuple(alpha): c})

    @classmethod
    def coordinate(cls, d: int, k: int) -> "Poly":
        """The coordinate function ``z_k`` (0-based ``k``)."""
        alpha = [0] * d
        alpha[k] = 1
        return cls(d, {tuple(alpha): 1.0})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def homogeneous_part(self, n: int) -> "Poly":
        return Poly(self.d, {a: c for a, c in self.coeffs.items() if sum(a) == n})

    def _check(self, other: "Poly") -> None:
        if other.d != self.d:
            raise ValueError(f"dimension mismatch: {self.d} != {other.d}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.d, other)
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0j) + c
        return Poly(self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.d, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -complex(other))

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.d, {a: c * other for a, c in self.coeffs.items()})
        self._check(other)
        out: dict[MultiIndex, complex] = {}
        for a, c in self.coeffs.items():
            for b, e in other.coeffs.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0j) + c * e
        return Poly(self.d, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = Poly.constant(self.d), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.d == other.d and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"Poly(d={self.d}, {self.coeffs!r})"

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix ``(m, d)`` and coefficient vector ``(m,)``."""
        if not self.coeffs:
            return np.zeros((0, self.d), dtype=int), np.zeros(0, dtype=complex)
        keys = sorted(self.coeffs)
        return np.array(keys, dtype=int), np.array([self.coeffs[k] for k in keys], dtype=complex)

    def to_json(self) -> str:
        terms = [
            {"alpha": list(a), "re": float(c.real), "im": float(c.imag)}
            for a, c in sorted(self.coeffs.items())
        ]
        return json.dumps({"d": self.d, "terms": terms})

    @classmethod
    def from_json(cls, text: str | dict) -> "Poly":
        obj = json.loads(text) if isinstance(text, str) else text
        d = int(obj["d"])
        out: dict[MultiIndex, complex] = {}
        for i, term in enumerate(obj["terms"]):
            try:
                alpha = tuple(int(a) for a in term["alpha"])
                c = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"terms[{i}]: malformed term {term!r}") from exc
            out[alpha] = out.get(alpha, 0j) + c
        return cls(d, out)


def h2_inner(f: Poly, g: Poly) -> complex:
    """``<f, g>`` in the Drury-Arveson space, with monomial weights ``a!/|a|!``."""
    if f.d != g.d:
        raise ValueError(f"dimension mismatch: {f.d} != {g.d}")
    total = 0j
    for a, c in f.coeffs.items():
        e = g.coeffs.get(a)
        if e is not None:
            total += c * e.conjugate() * float(monomial_norm_sq(a))
    return total


def h2_norm(f: Poly) -> float:
    return math.sqrt(max(h2_inner(f, f).real, 0.0))


def evaluate(f: Poly, z: Sequence[complex]) -> complex:
    z = np.asarray(z, dtype=complex)
    if z.shape != (f.d,):
        raise ValueError(f"point of length {f.d} expected")
    exps, coeffs = f.arrays()
    if not len(coeffs):
        return 0j
    return complex(np.sum(coeffs * np.prod(z[None, :] ** exps, axis=1)))


def _point(x: Sequence[complex]) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError("point must be a vector")
    if np.vdot(x, x).real >= 1:
        raise ValueError(f"point {x} is not in the open unit ball")
    return x


def kernel_value(x: Sequence[complex], y: Sequence[complex]) -> complex:
    """``<u_x, u_y> = 1 / (1 - <y, x>)`` with ``<y, x> = sum y_i conj(x_i)``."""
    x, y = _point(x), _point(y)
    return 1.0 / (1.0 - complex(np.sum(y * x.conj())))


def kernel_poly(x: Sequence[complex], N: int) -> tuple[Poly, float]:
    """Degree ``<= N`` truncation of the kernel function ``u_x``.

    Returns the polynomial and the exact squared norm of the discarded tail,
    ``|x|^(2(N+1)) / (1 - |x|^2)``.
    """
    x = _point(x)
    d = len(x)
    xc = x.conj()
    coeffs = {}
    for alpha in enumerate_upto(d, N):
        # <z^a, u_x> = x^a, so the coefficient is conj(x)^a / ||z^a||^2
        c = complex(np.prod(xc ** np.array(alpha))) / float(monomial_norm_sq(alpha))
        coeffs[alpha] = c
    r2 = float(np.vdot(x, x).real)
    return Poly(d, coeffs), r2 ** (N + 1) / (1.0 - r2)


def gram_matrix(points: Iterable[Sequence[complex]], N: int | None = None) -> np.ndarray:
    """``G[i, j] = kernel_value(x_i, x_j)``.

    ``N`` is accepted for interface symmetry with :func:`kernel_poly` and is
    unused: the entries are evaluated in closed form.
    """
    pts = [_point(p) for p in points]
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_value(pts[i], pts[j])
    return G


def to_vector(f: Poly, basis: TruncatedBasis) -> np.ndarray:
    """Coordinates of ``f`` in the orthonormal basis: ``f_a * ||z^a||``."""
    if f.d != basis.d:
        raise ValueError(f"dimension mismatch: {f.d} != {basis.d}")
    if f.degree > basis.N:
        raise ValueError(f"degree {f.degree} exceeds truncation N={basis.N}")
    v = np.zeros(basis.size, dtype=complex)
    for a, c in f.coeffs.items():
        i = basis.index(a)
        v[i] = c * math.sqrt(basis.weights[i])
    return v


def from_vector(v: np.ndarray, basis: TruncatedBasis, atol: float = 0.0) -> Poly:
    sw = basis.sqrt_weights()
    return Poly(basis.d, {a: v[i] / sw[i] for i, a in enumerate(basis.indices) if abs(v[i]) > atol})


def gamma_matrix(V: np.ndarray, basis: TruncatedBasis) -> OperatorMatrix:
    """Matrix of the composition operator ``f -> f(V^{-1} z)`` for unitary ``V``.

    It is block diagonal across degrees and unitary.
    """
    V = np.asarray(V, dtype=complex)
    d = basis.d
    if V.shape != (d, d):
        raise ValueError(f"{d}x{d} matrix expected")
    if np.max(np.abs(V.conj().T @ V - np.eye(d))) > UNITARY_TOL:
        raise ValueError("V is not unitary")
    check_dense(basis.size)
    Vinv = V.conj().T
    linear = [Poly(d, {tuple(int(i == j) for i in range(d)): Vinv[k, j] for j in range(d)}) for k in range(d)]
    sw = basis.sqrt_weights()
    M = np.zeros((basis.size, basis.size), dtype=complex)
    powers: dict[tuple[int, int], Poly] = {}
    for col, alpha in enumerate(basis.indices):
        image = Poly.constant(d)
        for k, a in enumerate(alpha):
            if a:
                if (k, a) not in powers:
                    powers[(k, a)] = linear[k] ** a
                image = image * powers[(k, a)]
        for beta, c in image.coeffs.items():
            row = basis.index(beta)
            M[row, col] = c * sw[row] / sw[col]
    return OperatorMatrix(M, basis)


@dataclass(frozen=True)
class WeightSystem:
    """Monomial-orthogonal Hilbert norm: ``||z^a||^2 = weight(a)``, ``weight(0) = 1``."""

    name: str
    d: int
    weight: Callable[[MultiIndex], Fraction]

    def __call__(self, alpha: Sequence[int]) -> Fraction:
        alpha = tuple(alpha)
        if len(alpha) != self.d:
            raise ValueError(f"multi-index of length {self.d} expected")
        return self.weight(alpha)


WEIGHT_KINDS = ("DruryArveson", "HardyBoundary", "Bergman")


def weight_system(kind: str, d: int) -> WeightSystem:
    """Monomial weights of the Drury-Arveson, sphere (Hardy) and ball (Bergman) norms.

    The Hardy and Bergman forms are the standard moments of ``|z^a|^2`` for
    normalized surface and volume measure; :func:`weight_monte_carlo`
    estimates them independently.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if kind == "DruryArveson":
        return WeightSystem(kind, d, monomial_norm_sq)
    if kind == "HardyBoundary":
        c = math.factorial(d - 1)
        return WeightSystem(kind, d, lambda a: Fraction(c * _fact(a), math.factorial(d - 1 + sum(a))))
    if kind == "Bergman":
        c = math.factorial(d)
        return WeightSystem(kind, d, lambda a: Fraction(c * _fact(a), math.factorial(d + sum(a))))
    raise ValueError(f"unknown weight system {kind!r}; expected one of {WEIGHT_KINDS}")


def _fact(alpha: MultiIndex) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def weight_monte_carlo(kind: str, d: int, alpha: Sequence[int], samples: int = 2_000_000, seed: int = 0) -> float:
    """Monte Carlo estimate of ``E|z^a|^2`` under the measure behind ``kind``.

    ``HardyBoundary`` samples the unit sphere of ``C^d``; ``Bergman`` samples
    the unit ball uniformly.  ``DruryArveson`` has no such measure.
    """
    if kind not in ("HardyBoundary", "Bergman"):
        raise ValueError(f"no sampling measure for {kind!r}")
    rng = np.random.default_rng(seed)
    alpha = np.asarray(alpha, dtype=float)
    total, done, chunk = 0.0, 0, 500_000
    while done < samples:
        m = min(chunk, samples - done)
        g = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
        z = g / np.linalg.norm(g, axis=1, keepdims=True)
        if kind == "Bergman":
            # radius of a uniform point in the real 2d-ball
            z *= rng.random((m, 1)) ** (1.0 / (2 * d))
        total += float(np.sum(np.prod(np.abs(z) ** (2 * alpha), axis=1)))
        done += m
    return total / samples
