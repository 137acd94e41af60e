"""Deterministic linear algebra and sphere optimization.

Nothing here draws fresh randomness: start vectors come from a fixed seed and
sphere samples from an unscrambled Halton sequence, so repeated runs are
bit-identical.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm as _gauss
from scipy.stats import qmc

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-10
SPHERE_STEP_TOL = 1e-8
#: Largest side for which the dense eigensolver fallback is used.
DENSE_FALLBACK_SIDE = 1500


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    residual: float
    converged: bool
    method: str = "power"


def _as_array(M) -> np.ndarray:
    return np.asarray(getattr(M, "matrix", M), dtype=complex)


def start_vector(n: int) -> np.ndarray:
    """Fixed generic unit vector of length ``n``."""
    rng = np.random.default_rng(20240601)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _dense_top(G: np.ndarray) -> tuple[float, float]:
    w, V = np.linalg.eigh(G)
    lam = max(float(w[-1]), 0.0)
    v = V[:, -1]
    res = float(np.linalg.norm(G @ v - lam * v)) / lam if lam > 0 else 0.0
    return lam, res


def operator_norm(M, tol: float = NORM_TOL, maxiter: int = 500) -> NormResult:
    """Largest singular value of a (possibly rectangular) complex matrix.

    Power iteration on ``M^* M``; converged once the relative eigen-residual
    ``||G v - lam v|| / lam`` drops below ``tol``.  If that does not happen
    within ``maxiter`` steps and the Gram matrix is small enough, a dense
    Hermitian eigensolve takes over.  Non-convergence is reported through
    ``converged``, never hidden.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = _as_array(M)
    if A.size == 0:
        return NormResult(0.0, 0, 0.0, True, "empty")
    wide = A.shape[0] < A.shape[1]
    G = A @ A.conj().T if wide else A.conj().T @ A
    if not np.any(G):
        return NormResult(0.0, 0, 0.0, True, "zero")
    v = start_vector(G.shape[0])
    lam, res = 0.0, np.inf
    for it in range(1, maxiter + 1):
        w = G @ v
        lam = float(np.vdot(v, w).real)
        if lam <= 0:
            break
        res = float(np.linalg.norm(w - lam * v)) / lam
        if res <= tol:
            return NormResult(float(np.sqrt(lam)), it, res, True, "power")
        v = w / np.linalg.norm(w)
    if G.shape[0] <= DENSE_FALLBACK_SIDE:
        lam, res = _dense_top(G)
        return NormResult(float(np.sqrt(lam)), maxiter, res, res <= tol or lam == 0.0, "dense")
    logger.warning("power iteration did not converge (residual %.3g)", res)
    return NormResult(float(np.sqrt(max(lam, 0.0))), maxiter, res, False, "power")


def _check_hermitian(M: np.ndarray) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix expected")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.conj().T)) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")


def min_eigenvalue_hermitian(M) -> float:
    A = _as_array(M)
    _check_hermitian(A)
    return float(np.linalg.eigvalsh((A + A.conj().T) / 2)[0])


def is_psd(M, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue_hermitian(M) >= -tol


# -- sphere optimization ---------------------------------------------------


def sphere_points(d: int, count: int) -> np.ndarray:
    """``count`` deterministic points on the unit sphere of ``C^d``.

    Unscrambled Halton points in ``[0,1)^{2d}`` are pushed through the
    Gaussian quantile function and normalized.
    """
    sampler = qmc.Halton(d=2 * d, scramble=False)
    u = sampler.random(count + 1)[1:]  # first Halton point is the origin
    g = _gauss.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    z = g[:, :d] + 1j * g[:, d:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


class _Evaluator:
    def __init__(self, f):
        self.exps, self.coeffs = f.arrays()
        self.d = f.d

    def values(self, Z: np.ndarray) -> np.ndarray:
        if not len(self.coeffs):
            return np.zeros(Z.shape[0], dtype=complex)
        mon = np.prod(Z[:, None, :] ** self.exps[None, :, :], axis=2)
        return mon @ self.coeffs

    def gradient(self, z: np.ndarray) -> np.ndarray:
        """Holomorphic partial derivatives at a single point."""
        out = np.zeros(self.d, dtype=complex)
        for j in range(self.d):
            e = self.exps.copy()
            mult = e[:, j].astype(float)
            e[:, j] = np.maximum(e[:, j] - 1, 0)
            out[j] = np.sum(self.coeffs * mult * np.prod(z[None, :] ** e, axis=1))
        return out


def _ascend(ev: _Evaluator, z: np.ndarray, step_tol: float, maxiter: int) -> tuple[float, np.ndarray]:
    fz = ev.values(z[None, :])[0]
    h = abs(fz) ** 2
    step = 1.0
    for _ in range(maxiter):
        # real gradient of |f|^2 in complex notation: 2 f conj(grad f)
        g = 2 * fz * ev.gradient(z).conj()
        g = g - np.real(np.vdot(z, g)) * z
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        while step >= step_tol:
            cand = z + (step / gn) * g
            cand = cand / np.linalg.norm(cand)
            fc = ev.values(cand[None, :])[0]
            if abs(fc) ** 2 > h:
                z, fz, h = cand, fc, abs(fc) ** 2
                step = min(step * 1.5, 1.0)
                break
            step /= 2
        else:
            break
    return float(np.sqrt(h)), z


def sphere_sup(f, budget: int = 2048, starts: int = 8, step_tol: float = SPHERE_STEP_TOL, maxiter: int = 5000) -> float:
    """Lower estimate of ``sup |f|`` over the unit ball (attained on the sphere).

    Samples ``budget`` low-discrepancy sphere points, then runs projected
    gradient ascent of ``|f|^2`` from the best ``starts`` of them with step
    halving on non-improvement.  The returned value is always attained at a
    point of the sphere, so it never exceeds the true sup up to rounding.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    ev = _Evaluator(f)
    if not len(ev.coeffs):
        return 0.0
    Z = sphere_points(f.d, budget)
    vals = np.abs(ev.values(Z))
    order = np.argsort(-vals, kind="stable")[: min(starts, budget)]
    best = float(vals[order[0]])
    for i in order:
        v, _ = _ascend(ev, Z[i].copy(), step_tol, maxiter)
        best = max(best, v)
    return best
