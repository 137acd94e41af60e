"""The d-shift and friends as matrices on the degree ``<= N`` truncation.

Every operator here is the compression ``P_N A P_N`` of its infinite
counterpart.  Consequences worth knowing:

* ``sum_k S_k S_k^* + E_0 = 1`` holds on the whole truncation;
* the commutator identities and ``sum_k S_k^* S_k = (d + N)(1 + N)^{-1}``
  hold only on the interior (degrees ``<= N - 1``), because ``S_k`` kills
  the top degree.

Coordinates ``k`` are 0-based throughout.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .basis import DENSE_CAP, OperatorMatrix, TruncatedBasis, build_basis, check_dense
from .h2space import Poly, gamma_matrix
from .multiindex import add_unit

__all__ = [
    "TruncatedBasis",
    "OperatorMatrix",
    "build_basis",
    "shift_matrix",
    "shift_sparse",
    "multiplication_matrix",
    "apply_polynomial",
    "number_operator",
    "e0_projection",
    "relation_residuals",
    "pstar_power_diagonal",
    "pstar_power_direct",
    "DENSE_CAP",
]


def _shift_entries(k: int, basis: TruncatedBasis):
    if not 0 <= k < basis.d:
        raise ValueError(f"coordinate index must be in 0..{basis.d - 1}, got {k}")
    rows, cols, vals = [], [], []
    for col, alpha in enumerate(basis.indices):
        n = sum(alpha)
        if n == basis.N:
            continue
        rows.append(basis.index(add_unit(alpha, k)))
        cols.append(col)
        vals.append(math.sqrt(Fraction(alpha[k] + 1, n + 1)))
    return rows, cols, vals


def shift_sparse(k: int, basis: TruncatedBasis) -> sp.csr_matrix:
    """Sparse form of :func:`shift_matrix`; no size cap beyond the basis cap."""
    rows, cols, vals = _shift_entries(k, basis)
    return sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(basis.size, basis.size))


def shift_matrix(k: int, basis: TruncatedBasis) -> OperatorMatrix:
    """Compression of multiplication by ``z_k``.

    The normalized monomial for ``a`` goes to ``sqrt((a_k + 1)/(|a| + 1))``
    times the normalized monomial for ``a + e_k``; top-degree columns vanish.
    """
    check_dense(basis.size)
    rows, cols, vals = _shift_entries(k, basis)
    M = np.zeros((basis.size, basis.size), dtype=complex)
    M[rows, cols] = vals
    return OperatorMatrix(M, basis)


def multiplication_matrix(f: Poly, basis: TruncatedBasis) -> OperatorMatrix:
    """Compression of ``M_f`` to the truncation, built entrywise from exact weights."""
    if f.d != basis.d:
        raise ValueError(f"dimension mismatch: {f.d} != {basis.d}")
    if f.degree > basis.N:
        raise ValueError(f"degree {f.degree} exceeds truncation N={basis.N}")
    check_dense(basis.size)
    M = np.zeros((basis.size, basis.size), dtype=complex)
    for col, beta in enumerate(basis.indices):
        room = basis.N - sum(beta)
        for alpha, c in f.coeffs.items():
            if sum(alpha) > room:
                continue
            gamma = tuple(a + b for a, b in zip(alpha, beta))
            row = basis.index(gamma)
            M[row, col] += c * math.sqrt(basis.weights[row] / basis.weights[col])
    return OperatorMatrix(M, basis)


def apply_polynomial(f: Poly, basis: TruncatedBasis, v: np.ndarray | None = None) -> np.ndarray:
    """``f(S) v`` using sparse shift products; ``v`` defaults to the constant 1.

    Independent of :func:`multiplication_matrix`: the vector is pushed through
    the shift matrices one factor at a time.
    """
    if f.d != basis.d:
        raise ValueError(f"dimension mismatch: {f.d} != {basis.d}")
    if v is None:
        v = np.zeros(basis.size, dtype=complex)
        v[0] = 1.0
    shifts = [shift_sparse(k, basis) for k in range(basis.d)]
    cache: dict[tuple[int, ...], np.ndarray] = {(0,) * basis.d: np.asarray(v, dtype=complex)}

    def power(alpha):
        if alpha not in cache:
            k = max(i for i, a in enumerate(alpha) if a)
            cache[alpha] = shifts[k] @ power(add_unit(alpha, k, -1))
        return cache[alpha]

    out = np.zeros(basis.size, dtype=complex)
    for alpha, c in sorted(f.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        out += c * power(alpha)
    return out


def number_operator(basis: TruncatedBasis) -> OperatorMatrix:
    check_dense(basis.size)
    return OperatorMatrix(np.diag(basis.degrees().astype(complex)), basis)


def e0_projection(basis: TruncatedBasis) -> OperatorMatrix:
    check_dense(basis.size)
    M = np.zeros((basis.size, basis.size), dtype=complex)
    M[0, 0] = 1.0
    return OperatorMatrix(M, basis)


def _norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def relation_residuals(basis: TruncatedBasis) -> dict[str, float]:
    """Residual norms of the d-shift commutation relations on the truncation.

    Keys:

    ``commutator[i,j]``
        ``S_i^* S_j - S_j S_i^* - (1+N)^{-1}(delta_ij - S_j S_i^*)`` on the interior.
    ``adjoint_sum``
        ``sum_k S_k^* S_k - (d+N)(1+N)^{-1}`` on the interior.
    ``row_sum``
        ``sum_k S_k S_k^* + E_0 - 1`` on the full truncation.
    ``hyponormal_min_eig[k]``
        smallest eigenvalue of ``S_k^* S_k - S_k S_k^*`` on the interior
        (a value, not a residual: it should be ``>= 0``).
    ``adjoint_sum_norm``
        ``||sum_k S_k^* S_k||`` on the interior; equals ``d``.
    ``commuting[i,j]``
        ``S_i S_j - S_j S_i`` on the full truncation.
    """
    if basis.N < 2:
        raise ValueError("relations need N >= 2 so that the interior has positive degree")
    d = basis.d
    S = [shift_matrix(k, basis).matrix for k in range(d)]
    Sh = [s.conj().T for s in S]
    I = np.eye(basis.size)
    degs = basis.degrees()
    inv1N = np.diag(1.0 / (1.0 + degs))
    inner = basis.upto(basis.N - 1)
    out: dict[str, float] = {}
    for i in range(d):
        for j in range(d):
            lhs = Sh[i] @ S[j] - S[j] @ Sh[i]
            rhs = inv1N @ ((i == j) * I - S[j] @ Sh[i])
            out[f"commutator[{i},{j}]"] = _norm((lhs - rhs)[inner, inner])
    adj = sum(Sh[k] @ S[k] for k in range(d))
    target = np.diag((d + degs) / (1.0 + degs))
    out["adjoint_sum"] = _norm((adj - target)[inner, inner])
    out["adjoint_sum_norm"] = _norm(adj[inner, inner])
    E0 = np.zeros_like(I)
    E0[0, 0] = 1.0
    out["row_sum"] = _norm(sum(S[k] @ Sh[k] for k in range(d)) + E0 - I)
    for k in range(d):
        self_comm = (Sh[k] @ S[k] - S[k] @ Sh[k])[inner, inner]
        out[f"hyponormal_min_eig[{k}]"] = float(np.linalg.eigvalsh((self_comm + self_comm.conj().T) / 2)[0])
    for i in range(d):
        for j in range(i + 1, d):
            out[f"commuting[{i},{j}]"] = _norm(S[i] @ S[j] - S[j] @ S[i])
    return out


def pstar_power_diagonal_exact(d: int, n: int, maxdeg: int) -> list[Fraction]:
    """``g_n(x) = prod_{k=1..n} (x+k+d-1)/(x+k)`` at ``x = 0..maxdeg``, exactly."""
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    out = []
    for x in range(maxdeg + 1):
        g = Fraction(1)
        for k in range(1, n + 1):
            g *= Fraction(x + k + d - 1, x + k)
        out.append(g)
    return out


def pstar_power_diagonal(d: int, n: int, maxdeg: int) -> np.ndarray:
    """Eigenvalues of ``P_*^n(1)`` on degrees ``0..maxdeg`` (see the exact variant)."""
    return np.array([float(g) for g in pstar_power_diagonal_exact(d, n, maxdeg)])


def pstar_power_direct(basis: TruncatedBasis, n: int) -> OperatorMatrix:
    """Iterate ``A -> sum_k S_k^* A S_k`` ``n`` times starting from the identity.

    Only degrees ``<= N - n`` are free of truncation effects.
    """
    if n < 0 or n > basis.N:
        raise ValueError(f"power must lie in 0..N={basis.N}, got {n}")
    S = [shift_sparse(k, basis) for k in range(basis.d)]
    A = np.eye(basis.size, dtype=complex)
    for _ in range(n):
        A = sum(np.asarray(s.conj().T @ A @ s) for s in S)
    return OperatorMatrix(A, basis)


def shift_tuple(basis: TruncatedBasis) -> list[np.ndarray]:
    return [shift_matrix(k, basis).matrix for k in range(basis.d)]


def rotated_shifts(V: np.ndarray, basis: TruncatedBasis) -> list[np.ndarray]:
    """Shift tuple in the coordinates ``V^{-1} z``: ``sum_j conj(V)[j, k] S_j``."""
    V = np.asarray(V, dtype=complex)
    S = shift_tuple(basis)
    Vinv = V.conj().T
    return [sum(Vinv[k, j] * S[j] for j in range(basis.d)) for k in range(basis.d)]


def covariance_residual(V: np.ndarray, basis: TruncatedBasis) -> float:
    """``max_k ||G S_k G^* - S'_k||`` with ``G`` the matrix of the composition by ``V^{-1}``."""
    G = gamma_matrix(V, basis).matrix
    S = shift_tuple(basis)
    Sp = rotated_shifts(V, basis)
    return max(_norm(G @ S[k] @ G.conj().T - Sp[k]) for k in range(basis.d))


def word_norm_sum(d: int, n: int) -> Fraction:
    """Sum over all length-``n`` words of ``||z_{i_1} ... z_{i_n}||^2``, exactly."""
    from itertools import product

    from .fock import monomial_norm_sq

    total = Fraction(0)
    for word in product(range(d), repeat=n):
        k = [0] * d
        for i in word:
            k[i] += 1
        total += monomial_norm_sq(k)
    return total


def constant_vector(basis: TruncatedBasis) -> np.ndarray:
    e = np.zeros(basis.size, dtype=complex)
    e[0] = 1.0
    return e
