"""Truncated orthonormal monomial basis and the matrix carrier built on it."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fock import ResourceError, monomial_norm_sq
from .multiindex import MultiIndex, dim_symmetric, enumerate_upto

#: Hard limit on the number of basis elements.
MAX_BASIS_SIZE = 200_000
#: Limit for dense matrices; configurable at module level.
DENSE_CAP = 4_000


@dataclass(frozen=True, eq=False)
class TruncatedBasis:
    """Normalized monomials ``z^a / ||z^a||`` of total degree ``<= N``.

    ``weights[i]`` is the exact squared norm ``a! / |a|!`` of the i-th monomial.
    """

    d: int
    N: int
    indices: tuple[MultiIndex, ...]
    weights: tuple[Fraction, ...]
    position: dict = field(repr=False)
    degree_offsets: tuple[int, ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedBasis) and (self.d, self.N) == (other.d, other.N)

    def __hash__(self) -> int:
        return hash((self.d, self.N))

    def index(self, alpha) -> int:
        return self.position[tuple(alpha)]

    def degrees(self) -> np.ndarray:
        return np.array([sum(a) for a in self.indices])

    def block(self, n: int) -> slice:
        """Slice of positions holding degree ``n``."""
        return slice(self.degree_offsets[n], self.degree_offsets[n + 1])

    def upto(self, n: int) -> slice:
        """Slice of positions with degree ``<= n``."""
        return slice(0, self.degree_offsets[min(n, self.N) + 1])

    def sqrt_weights(self) -> np.ndarray:
        return np.array([math.sqrt(w) for w in self.weights])

    def descriptor(self) -> dict:
        return {"d": self.d, "N": self.N}


def build_basis(d: int, N: int) -> TruncatedBasis:
    """Graded-lex ordered orthonormal monomial basis of degree ``<= N`` in ``d`` variables."""
    if d < 1 or N < 0:
        raise ValueError(f"need d >= 1 and N >= 0, got d={d}, N={N}")
    size = sum(dim_symmetric(d, n) for n in range(N + 1))
    if size > MAX_BASIS_SIZE:
        raise ResourceError(f"basis of size {size} exceeds the cap {MAX_BASIS_SIZE}")
    indices = tuple(enumerate_upto(d, N))
    offsets = [0]
    for n in range(N + 1):
        offsets.append(offsets[-1] + dim_symmetric(d, n))
    return TruncatedBasis(
        d=d,
        N=N,
        indices=indices,
        weights=tuple(monomial_norm_sq(a) for a in indices),
        position={a: i for i, a in enumerate(indices)},
        degree_offsets=tuple(offsets),
    )


def check_dense(size: int) -> None:
    if size > DENSE_CAP:
        raise ResourceError(f"dense matrix of side {size} exceeds DENSE_CAP={DENSE_CAP}")


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix acting on the span of ``basis``."""

    matrix: np.ndarray
    basis: TruncatedBasis

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.basis.size, self.basis.size):
            raise ValueError(f"matrix shape {m.shape} does not match basis size {self.basis.size}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix.conj().T, self.basis)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _same_basis(self, other)
            return OperatorMatrix(self.matrix @ other.matrix, self.basis)
        return self.matrix @ other

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_basis(self, other)
        return OperatorMatrix(self.matrix + other.matrix, self.basis)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_basis(self, other)
        return OperatorMatrix(self.matrix - other.matrix, self.basis)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.matrix * scalar, self.basis)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def restrict(self, n: int) -> np.ndarray:
        """Sub-block on degrees ``<= n``."""
        s = self.basis.upto(n)
        return self.matrix[s, s]

    def to_json(self) -> str:
        entries = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return json.dumps({"basis": self.basis.descriptor(), "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "OperatorMatrix":
        obj = json.loads(text)
        basis = build_basis(int(obj["basis"]["d"]), int(obj["basis"]["N"]))
        m = np.array([[complex(re, im) for re, im in row] for row in obj["entries"]], dtype=complex)
        return cls(m, basis)


def _same_basis(a: OperatorMatrix, b: OperatorMatrix) -> None:
    if a.basis != b.basis:
        raise ValueError("operator matrices live on different bases")
