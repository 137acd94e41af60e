"""Commuting row contractions and their dilation to the d-shift.

For a d-contraction ``T`` on ``C^m`` with defect ``Delta = (1 - sum T_k T_k^*)^{1/2}``
the operator ``L`` sends ``(normalized Fock monomial a) (x) xi`` to
``T^a Delta xi / ||z^a||``.  On the degree ``<= N`` truncation
``L L^* = 1 - P^{N+1}(1)`` where ``P(A) = sum T_k A T_k^*``, so the
coisometry defect is exactly the tail of the iteration that decides
nullity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import TruncatedBasis, build_basis
from .fock import ResourceError
from .h2space import Poly, to_vector
from .numerics import operator_norm

COMMUTE_TOL = 1e-10
ROW_NORM_TOL = 1e-10
DEFECT_EIG_TOL = 1e-10
CLAMP_TOL = 1e-12
COINVARIANCE_TOL = 1e-10
#: Maximum entries of an assembled ``L`` (rows times columns).
L_ENTRY_CAP = 50_000_000


class DContractionError(ValueError):
    """A matrix tuple fails to be a d-contraction."""


class NonCommutingError(DContractionError):
    def __init__(self, pair: tuple[int, int], residual: float):
        self.pair = pair
        self.residual = residual
        super().__init__(f"T_{pair[0]} and T_{pair[1]} do not commute (residual {residual:.3e})")


class RowNormExceededError(DContractionError):
    def __init__(self, row_norm_sq: float):
        self.row_norm_sq = row_norm_sq
        self.excess = row_norm_sq - 1.0
        super().__init__(f"sum T_k T_k^* has norm {row_norm_sq:.6g} > 1 (excess {self.excess:.3e})")


class CoinvarianceError(ValueError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"subspace is not co-invariant (residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class DContraction:
    """Validated commuting tuple with ``sum T_k T_k^* <= 1``; build with :func:`validate`."""

    matrices: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def m(self) -> int:
        return self.matrices[0].shape[0]

    def row_gram(self) -> np.ndarray:
        return sum(t @ t.conj().T for t in self.matrices)

    @property
    def row_norm(self) -> float:
        """``||[T_1 ... T_d]|| = ||sum T_k T_k^*||^{1/2}``."""
        return math.sqrt(max(float(np.linalg.eigvalsh(self.row_gram())[-1]), 0.0))

    def power(self, alpha: Sequence[int]) -> np.ndarray:
        out = np.eye(self.m, dtype=complex)
        for t, a in zip(self.matrices, alpha):
            out = out @ np.linalg.matrix_power(t, a)
        return out

    def scaled(self, r: float) -> "DContraction":
        return DContraction(tuple(r * t for t in self.matrices))

    def to_json(self) -> str:
        mats = [[[float(z.real), float(z.imag)] for z in t.reshape(-1)] for t in self.matrices]
        return json.dumps({"d": self.d, "m": self.m, "matrices": mats})

    @classmethod
    def from_json(cls, text: str | dict) -> "DContraction":
        return validate(parse_tuple(text))


def parse_tuple(text: str | dict) -> list[np.ndarray]:
    """Read ``{"d", "m", "matrices"}``; each matrix is a row-major list of
    ``[re, im]`` pairs (flat, or nested by rows)."""
    obj = json.loads(text) if isinstance(text, str) else text
    for key in ("d", "m", "matrices"):
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    d, m = int(obj["d"]), int(obj["m"])
    mats = obj["matrices"]
    if len(mats) != d:
        raise ValueError(f"field 'matrices': expected {d} matrices, got {len(mats)}")
    out = []
    for k, raw in enumerate(mats):
        flat = raw
        if raw and isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list):
            flat = [z for row in raw for z in row]
        if len(flat) != m * m:
            raise ValueError(f"field 'matrices[{k}]': expected {m * m} entries, got {len(flat)}")
        try:
            vals = [complex(float(z[0]), float(z[1])) if isinstance(z, list) else complex(z) for z in flat]
        except (TypeError, ValueError, IndexError) as exc:
            raise ValueError(f"field 'matrices[{k}]': malformed entry") from exc
        out.append(np.array(vals, dtype=complex).reshape(m, m))
    return out


def validate(T: Sequence[np.ndarray]) -> DContraction:
    """Check commutativity and ``sum T_k T_k^* <= 1`` (both to ``1e-10``)."""
    mats = tuple(np.array(t, dtype=complex) for t in T)
    if not mats:
        raise DContractionError("empty tuple")
    m = mats[0].shape[0]
    for t in mats:
        if t.shape != (m, m):
            raise DContractionError("matrices must be square and of equal size")
        t.setflags(write=False)
    norms = [float(np.linalg.norm(t, 2)) for t in mats]
    worst = None
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            res = float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i], 2))
            if res > COMMUTE_TOL * max(1.0, norms[i] * norms[j]) and (worst is None or res > worst[1]):
                worst = ((i, j), res)
    if worst is not None:
        raise NonCommutingError(*worst)
    top = float(np.linalg.eigvalsh(sum(t @ t.conj().T for t in mats))[-1])
    if top > 1 + ROW_NORM_TOL:
        raise RowNormExceededError(top)
    return DContraction(mats)


# -- defect and nullity ----------------------------------------------------


@dataclass(frozen=True)
class Defect:
    delta: np.ndarray
    rank: int
    k_basis: np.ndarray  # columns: orthonormal basis of the closed range of delta


def defect(T: DContraction) -> Defect:
    """``Delta = (1 - sum T_k T_k^*)^{1/2}``; eigenvalues in ``[-1e-12, 0)`` clamp to 0."""
    D = np.eye(T.m) - T.row_gram()
    w, V = np.linalg.eigh((D + D.conj().T) / 2)
    if w[0] < -CLAMP_TOL:
        raise DContractionError(f"defect has eigenvalue {w[0]:.3e} < 0")
    w = np.clip(w, 0.0, None)
    delta = (V * np.sqrt(w)) @ V.conj().T
    keep = w > DEFECT_EIG_TOL
    return Defect(delta, int(keep.sum()), V[:, keep])


def p_map(T: DContraction, A: np.ndarray) -> np.ndarray:
    """``P(A) = sum T_k A T_k^*``."""
    return sum(t @ A @ t.conj().T for t in T.matrices)


def p_power_identity(T: DContraction, n: int) -> np.ndarray:
    A = np.eye(T.m, dtype=complex)
    for _ in range(n):
        A = p_map(T, A)
    return A


@dataclass(frozen=True)
class NullityReport:
    verdict: str  # "null", "non-null" or "undecided"
    iterations: int
    limit: np.ndarray
    exact_zero: bool
    monotone: bool
    trend: tuple[float, ...] = field(repr=False)


def a_infinity(T: DContraction, maxiter: int = 10_000, null_tol: float = 1e-10, stall_tol: float = 1e-12) -> NullityReport:
    """Iterate ``A_{n+1} = P(A_n)`` from the identity and classify the limit.

    The sequence is nonincreasing in the PSD order; each step is checked.
    """
    A = np.eye(T.m, dtype=complex)
    trend = [1.0]
    monotone = True
    for it in range(1, maxiter + 1):
        B = p_map(T, A)
        diff = A - B
        if np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0] < -1e-10:
            monotone = False
        nb = float(np.linalg.norm(B, 2))
        trend.append(nb)
        if nb < null_tol:
            return NullityReport("null", it, B, not np.any(B), monotone, tuple(trend))
        if float(np.linalg.norm(diff, 2)) < stall_tol:
            return NullityReport("non-null", it, B, False, monotone, tuple(trend))
        A = B
    return NullityReport("undecided", maxiter, A, False, monotone, tuple(trend))


# -- the dilation operator ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class DilationResult:
    basis: TruncatedBasis
    delta: np.ndarray
    defect_rank: int
    k_basis: np.ndarray
    L: np.ndarray  # m x (basis.size * defect_rank), column (i, j) at i * rank + j
    norm_L: float
    coisometry_residual: float
    tail_bound: float
    r: float = 1.0

    def summary(self) -> dict:
        return {
            "d": self.basis.d,
            "N": self.basis.N,
            "m": int(self.L.shape[0]),
            "defect_rank": self.defect_rank,
            "norm_L": self.norm_L,
            "coisometry_residual": self.coisometry_residual,
            "tail_bound": self.tail_bound,
            "r": self.r,
        }


def tuple_powers(T: DContraction, basis: TruncatedBasis) -> list[np.ndarray]:
    """``T^a`` for every multi-index of ``basis``, built degree by degree."""
    out: list[np.ndarray] = [np.eye(T.m, dtype=complex)]
    for alpha in basis.indices[1:]:
        k = next(i for i, a in enumerate(alpha) if a)
        prev = list(alpha)
        prev[k] -= 1
        out.append(T.matrices[k] @ out[basis.index(tuple(prev))])
    return out


def build_L(T: DContraction, N: int, r: float = 1.0) -> DilationResult:
    """Assemble ``L`` on the degree ``<= N`` Fock truncation tensor ``K``.

    ``r < 1`` dilates ``r T`` instead, which is always null.
    """
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")
    Tr = T if r == 1 else T.scaled(r)
    basis = build_basis(Tr.d, N)
    df = defect(Tr)
    cols = basis.size * df.rank
    if cols * Tr.m > L_ENTRY_CAP:
        raise ResourceError(f"L would have {cols * Tr.m} entries (cap {L_ENTRY_CAP})")
    DK = df.delta @ df.k_basis  # m x rank
    sw = basis.sqrt_weights()
    L = np.empty((Tr.m, basis.size, df.rank), dtype=complex)
    for i, P in enumerate(tuple_powers(Tr, basis)):
        L[:, i, :] = (P @ DK) / sw[i]
    L = L.reshape(Tr.m, cols)
    resid = float(np.linalg.norm(np.eye(Tr.m) - L @ L.conj().T, 2))
    tail = float(np.linalg.norm(p_power_identity(Tr, N + 1), 2))
    return DilationResult(basis, df.delta, df.rank, df.k_basis, L, operator_norm(L).value, resid, tail, r)


def amorphism_apply(T: DContraction, N: int, X, r: float = 1.0, dilation: DilationResult | None = None) -> np.ndarray:
    """``phi(X) = L (X (x) 1_K) L^*`` for ``X`` on the degree ``<= N`` Fock truncation."""
    res = dilation if dilation is not None else build_L(T, N, r)
    X = getattr(X, "matrix", X)
    X = np.asarray(X, dtype=complex)
    if X.shape != (res.basis.size, res.basis.size):
        raise ValueError(f"X must act on the degree <= {res.basis.N} truncation (side {res.basis.size})")
    Ls = res.L.reshape(res.L.shape[0], res.basis.size, res.defect_rank)
    out = np.zeros((res.L.shape[0],) * 2, dtype=complex)
    for j in range(res.defect_rank):
        Lj = Ls[:, :, j]
        out += Lj @ X @ Lj.conj().T
    return out


def poly_of_tuple(f: Poly, T: DContraction) -> np.ndarray:
    if f.d != T.d:
        raise ValueError(f"dimension mismatch: {f.d} != {T.d}")
    out = np.zeros((T.m, T.m), dtype=complex)
    cache: dict[tuple[int, ...], np.ndarray] = {}
    for alpha, c in f.coeffs.items():
        if alpha not in cache:
            cache[alpha] = T.power(alpha)
        out += c * cache[alpha]
    return out


@dataclass(frozen=True)
class VNReport:
    lhs: float
    rhs: float
    rhs_half: float | None
    margin: float
    asserted: bool
    holds: bool


def vn_check(T: DContraction, f: Poly, N: int, assert_bound: bool = False, tol: float = 1e-9) -> VNReport:
    """Compare ``||f(T)||`` with the truncated multiplier norm of ``f`` at ``N``.

    The truncated norm increases with ``N`` towards the multiplier norm.  At
    finite ``N`` the inequality is only guaranteed when ``T`` is itself a
    compression of the shift at degree ``<= N``; pass ``assert_bound=True``
    for such tuples.  Otherwise ``holds`` just reports the observed sign.
    """
    from .extremal import multiplier_lower_bound

    if f.degree > N:
        raise ValueError(f"degree {f.degree} exceeds truncation N={N}")
    lhs = operator_norm(poly_of_tuple(f, T)).value
    rhs = multiplier_lower_bound(f, build_basis(T.d, N))
    half = N // 2
    rhs_half = multiplier_lower_bound(f, build_basis(T.d, half)) if half >= max(f.degree, 0) else None
    holds = lhs <= rhs + tol
    return VNReport(lhs, rhs, rhs_half, rhs - lhs, assert_bound, holds)


# -- model theory -------------------------------------------------------------


@dataclass(frozen=True)
class SphericalTuple:
    """Joint-diagonal spherical tuple: ``Z_k = diag(points[:, k])`` with unit-norm points."""

    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=complex))
        if np.max(np.abs(np.sum(np.abs(p) ** 2, axis=1) - 1.0)) > 1e-12:
            raise ValueError("spherical points must have unit norm")
        object.__setattr__(self, "points", p)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def matrices(self) -> list[np.ndarray]:
        return [np.diag(self.points[:, k]) for k in range(self.d)]


def model_operators(d: int, N: int, n: int, Z: SphericalTuple | None) -> list[np.ndarray]:
    """``n`` copies of the truncated d-shift followed by the diagonal ``Z``."""
    from .shift import shift_matrix

    basis = build_basis(d, N)
    z = Z.matrices() if Z is not None else [np.zeros((0, 0))] * d
    out = []
    for k in range(d):
        S = shift_matrix(k, basis).matrix
        blocks = [S] * n + [z[k]]
        size = sum(b.shape[0] for b in blocks)
        A = np.zeros((size, size), dtype=complex)
        pos = 0
        for b in blocks:
            s = b.shape[0]
            A[pos : pos + s, pos : pos + s] = b
            pos += s
        out.append(A)
    return out


def model_compress(n: int, Z: SphericalTuple | None, coinvariant: np.ndarray, N: int, d: int | None = None) -> DContraction:
    """Compress ``n . S (+) Z`` to a co-invariant subspace.

    ``coinvariant`` holds spanning columns in the coordinates of
    ``n`` copies of the degree ``<= N`` truncation followed by ``len(Z)``
    sphere points; it is orthonormalized here.
    """
    if Z is not None:
        d = Z.d if d is None else d
        if Z.d != d:
            raise ValueError("dimension mismatch between d and Z")
    if d is None:
        raise ValueError("d is required when Z is None")
    if n < 0:
        raise ValueError("multiplicity must be >= 0")
    A = model_operators(d, N, n, Z)
    V = np.asarray(coinvariant, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != A[0].shape[0]:
        raise ValueError(f"subspace vectors must have length {A[0].shape[0]}")
    Q, R = np.linalg.qr(V)
    keep = np.abs(np.diag(R)) > 1e-12 * max(1.0, float(np.max(np.abs(R)))) if R.size else np.zeros(0, bool)
    Q = Q[:, keep]
    if Q.shape[1] == 0:
        raise ValueError("the zero subspace is not a valid model space")
    proj_out = np.eye(Q.shape[0]) - Q @ Q.conj().T
    resid = max(float(np.linalg.norm(proj_out @ a.conj().T @ Q, 2)) for a in A)
    if resid > COINVARIANCE_TOL:
        raise CoinvarianceError(resid)
    return validate([Q.conj().T @ a @ Q for a in A])


def degree_subspace(d: int, N: int, m: int, n: int = 1, z_count: int = 0) -> np.ndarray:
    """Columns spanning degrees ``<= m`` in each shift copy; sphere part excluded."""
    basis = build_basis(d, N)
    k = basis.upto(m).stop
    cols = []
    for c in range(n):
        for i in range(k):
            v = np.zeros(n * basis.size + z_count, dtype=complex)
            v[c * basis.size + i] = 1.0
            cols.append(v)
    return np.array(cols).T


def kernel_subspace(t: Sequence[complex], N: int, n: int = 1, z_count: int = 0) -> np.ndarray:
    """The truncated kernel vector ``u_t`` in the first shift copy."""
    from .h2space import kernel_poly

    t = np.asarray(t, dtype=complex)
    basis = build_basis(len(t), N)
    u, _ = kernel_poly(t, N)
    v = np.zeros(n * basis.size + z_count, dtype=complex)
    v[: basis.size] = to_vector(u, basis)
    return v[:, None]
