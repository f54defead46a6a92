"""Fractional parts of exact polynomial phases over long ranges of n.

Evaluating alpha*n^6 in doubles at n = 10^6 leaves no fractional digits, so
phases are never formed in floating point.  For each chunk [n0, n0 + L) the
forward differences Delta^j P(n0) are computed exactly, reduced mod 1 and
stored as 128-bit fixed point numbers F_j (two uint64 limbs).  Newton's
forward formula

    P(n0 + t) = sum_j C(t, j) * Delta^j P(n0)        (mod 1)

is then evaluated for all t at once in wrapping uint64 arithmetic.  C(t, j)
is kept below 2^78, so every term carries at most 2^-50 of rounding error.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .affine import evaluate_phase, trim_phase
from .symbolic import SymbolicReal

MAX_CHUNK = 1 << 16
BINOM_BITS = 78
MASK64 = (1 << 64) - 1
_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
SCALE = 2.0 ** -64


def chunk_length(degree: int) -> int:
    """Largest L <= MAX_CHUNK with C(L - 1, degree) < 2^78."""
    lo, hi = 1, MAX_CHUNK
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if comb(mid - 1, max(degree, 0)) < 1 << BINOM_BITS:
            lo = mid
        else:
            hi = mid - 1
    return lo


@lru_cache(maxsize=16)
def _binomial_limbs(L: int, degree: int):
    """C(t, j) for t < L, j <= degree, split as (lo, hi) uint64 arrays of shape (degree+1, L)."""
    lo = np.zeros((degree + 1, L), dtype=np.uint64)
    hi = np.zeros((degree + 1, L), dtype=np.uint64)
    row = [1] * L  # C(t, 0)
    for j in range(degree + 1):
        if j > 0:
            # C(t, j) = sum_{s < t} C(s, j - 1)
            acc, new = 0, [0] * L
            for t in range(L):
                new[t] = acc
                acc += row[t]
            row = new
        arr = np.array(row, dtype=object)
        lo[j] = (arr & MASK64).astype(np.uint64)
        hi[j] = (arr >> 64).astype(np.uint64)
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def _mulhi(a: np.ndarray, b: int) -> np.ndarray:
    """High 64 bits of the 128-bit product a * b (a array, b scalar)."""
    b0, b1 = np.uint64(b & 0xFFFFFFFF), np.uint64(b >> 32)
    a0, a1 = a & _M32, a >> _S32
    p00, p01, p10, p11 = a0 * b0, a0 * b1, a1 * b0, a1 * b1
    mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
    return p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)


def difference_table(P: Sequence[SymbolicReal], n0: int) -> list[SymbolicReal]:
    """Delta^j P(n0) for j = 0..deg P, exactly."""
    D = len(P) - 1
    vals = [evaluate_phase(P, n0 + i) for i in range(D + 1)]
    out = []
    for _ in range(D + 1):
        out.append(vals[0])
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return out


def _chunk_phases(P, n0: int, count: int, L: int, degree: int) -> np.ndarray:
    lo_tab, hi_tab = _binomial_limbs(L, degree)
    acc = np.zeros(count, dtype=np.uint64)
    for j, dj in enumerate(difference_table(P, n0)):
        F = dj.fixed_point(128)
        f_hi, f_lo = F >> 64, F & MASK64
        c_lo, c_hi = lo_tab[j, :count], hi_tab[j, :count]
        if f_lo:
            acc += _mulhi(c_lo, f_lo)
            acc += c_hi * np.uint64(f_lo)
        if f_hi:
            acc += c_lo * np.uint64(f_hi)
    return acc


def phase_chunks(P: Sequence, M: int, N: int, chunk: int | None = None,
                 workers: int = 1) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n_start, phases) with phases = floor(2^64 * frac(P(n))) as uint64,
    for n in [M, N), in ascending chunks."""
    if N < M:
        raise ValueError(f"empty range [{M}, {N})")
    P = trim_phase([SymbolicReal.of(c) for c in P]) or [SymbolicReal()]
    degree = len(P) - 1
    L = chunk or chunk_length(degree)
    if L > chunk_length(degree):
        raise ValueError(f"chunk length {L} too long for degree {degree}")
    starts = list(range(M, N, L))

    def job(n0):
        return n0, _chunk_phases(P, n0, min(L, N - n0), L, degree)

    if workers <= 1 or len(starts) < 2:
        for n0 in starts:
            yield job(n0)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves order, so downstream reductions stay deterministic
        yield from pool.map(job, starts)


def to_unit(phases: np.ndarray) -> np.ndarray:
    """uint64 fixed point -> float64 in [0, 1]."""
    return phases.astype(np.float64) * SCALE


def phases(P: Sequence, M: int, N: int, **kw) -> np.ndarray:
    """All fractional parts of P(n), n in [M, N), as float64 (convenience)."""
    parts = [to_unit(ph) for _, ph in phase_chunks(P, M, N, **kw)]
    return np.concatenate(parts) if parts else np.zeros(0)


def exponential_sum(P: Sequence, M: int, N: int, workers: int = 1) -> complex:
    """sum_{n=M}^{N-1} e(P(n)), partial sums reduced in chunk order."""
    total = 0j
    for _, ph in phase_chunks(P, M, N, workers=workers):
        total += complex(np.exp(2j * np.pi * to_unit(ph)).sum())
    return total


def common_chunk(*polys) -> int:
    """A chunk length valid for every polynomial given (for aligned iteration)."""
    degs = [len(trim_phase([SymbolicReal.of(c) for c in P]) or [0]) - 1 for P in polys]
    return min(chunk_length(max(d, 0)) for d in degs)


def aligned_chunks(polys: Sequence[Sequence], M: int, N: int, workers: int = 1):
    """Iterate several phase sequences in lockstep: yields (n_start, [phases...])."""
    L = common_chunk(*polys)
    gens = [phase_chunks(P, M, N, chunk=L, workers=workers) for P in polys]
    for items in zip(*gens):
        yield items[0][0], [ph for _, ph in items]


__all__ = [
    "aligned_chunks", "chunk_length", "common_chunk", "difference_table", "exponential_sum",
    "phase_chunks", "phases", "to_unit",
]
