"""Partial traces of ``(1 + N)^{-p}`` on the symmetric Fock space over ``C^d``.

``trace (1+N)^{-p} = sum_n dim_symmetric(d, n) / (n+1)^p`` converges iff
``p > d``.  Verdicts come from the integral test applied to a bound on the
dimensions, never from watching partial sums grow.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterator

#: Tail bound relative to the partial sum above which convergence is flagged as slow.
SLOW_FRACTION = 1e-2


def _terms(d: int, p: float, M: int) -> Iterator[float]:
    dim = 1  # dim_symmetric(d, 0)
    for n in range(M + 1):
        yield dim / (n + 1) ** p
        dim = dim * (n + d) // (n + 1)


def zeta_partial(d: int, p: float, M: int) -> float:
    """``sum_{n=0}^{M} dim_symmetric(d, n) / (n+1)^p`` with exact dimensions.

    Accumulation is correctly rounded (``math.fsum``).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    if M < 1:
        raise ValueError(f"cutoff must be >= 1, got {M}")
    return math.fsum(_terms(d, p, M))


def integral_tail(d: int, p: float, M: int) -> float:
    """Rigorous bound on ``sum_{n>M} dim_symmetric(d, n) / (n+1)^p``; ``inf`` for ``p <= d``.

    For ``n > M``, ``dim_symmetric(d, n) <= c (n+1)^{d-1} / (d-1)!`` with
    ``c = prod_{k<d} (1 + (k-1)/(M+2))``, and the remaining sum of
    ``(n+1)^{d-1-p}`` is at most ``int_{M+1}^inf x^{d-1-p} dx``.
    """
    if p <= d:
        return math.inf
    e = p - d
    c = math.prod(1 + (k - 1) / (M + 2) for k in range(1, d))
    return c * (M + 1) ** (-e) / (e * math.factorial(d - 1))


@dataclass(frozen=True)
class TraceReport:
    d: int
    p: float
    M: int
    partial_sum: float
    tail_bound: float
    verdict: str  # "convergent" or "divergent"
    at_boundary: bool
    slow: bool

    def row(self) -> dict:
        out = asdict(self)
        if math.isinf(self.tail_bound):
            out["tail_bound"] = None
        return out


def convergence_verdict(d: int, p: float, M: int = 10_000) -> TraceReport:
    """Integral-test verdict for ``trace (1+N)^{-p}``: convergent iff ``p > d``.

    ``p == d`` is divergent and additionally flagged ``at_boundary``.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    partial = zeta_partial(d, p, M)
    tail = integral_tail(d, p, M)
    verdict = "convergent" if p > d else "divergent"
    slow = verdict == "convergent" and tail > SLOW_FRACTION * partial
    return TraceReport(d, p, M, partial, tail, verdict, p == d, slow)
