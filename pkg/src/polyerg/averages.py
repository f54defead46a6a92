"""Empirical multiple ergodic averages on torus systems.

All averages are driven by exact phase polynomials (see affine.py) fed to
the fixed-point phase engine, so the only floating point step is e(.) of a
correctly reduced fractional part.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .affine import Character, UnipotentAffineMap, phase_limit, phase_polynomial, sequence_polynomial
from .boxes import BoxSet, arc_intersection_lengths, _arcs
from .phases import aligned_chunks, exponential_sum, to_unit
from .polynomial import IntPolynomial, PolyFamily, primitive_part, proportionality
from .symbolic import SymbolicReal, to_symbolic_vector


def _exact_point(x0) -> tuple[SymbolicReal, ...]:
    # floats are converted exactly (their binary value), symbolic input kept
    return to_symbolic_vector(x0)


def empirical_multiple_average(T: UnipotentAffineMap, f: PolyFamily, chars: Sequence[Character],
                               x0: Sequence, M: int, N: int, workers: int = 1) -> complex:
    """(1/(N-M)) sum_{n=M}^{N-1} prod_i chi_i(T^{p_i(n)} x0)."""
    if N - M < 1:
        raise ValueError("need N - M >= 1")
    P = phase_polynomial(T, f, chars, _exact_point(x0))
    if not P:
        return 1 + 0j
    return exponential_sum(P, M, N, workers=workers) / (N - M)


def compare_limit(T, f, chars, x0, N: int, M: int = 0, workers: int = 1) -> dict:
    """Empirical average next to the exact limit, for one system and point."""
    x = _exact_point(x0)
    emp = empirical_multiple_average(T, f, chars, x, M, N, workers)
    ana = phase_limit(phase_polynomial(T, f, chars, x))
    return {"N": N, "M": M, "empirical": emp, "analytic": ana, "abs_error": abs(emp - ana)}


# restricted averages ---------------------------------------------------------

@dataclass
class RestrictedResult:
    status: str            # "ok" or "no samples"
    average: Optional[float]
    count: int
    N: int
    delta: float

    def to_dict(self) -> dict:
        return {"status": self.status, "average": self.average, "count": self.count,
                "N": self.N, "delta": self.delta}


def _torus_distance(u: np.ndarray) -> np.ndarray:
    return np.minimum(u, 1.0 - u)


def restricted_average(T: UnipotentAffineMap, A: BoxSet, f: PolyFamily, q1: IntPolynomial,
                       q2: IntPolynomial, delta: float, N: int, M: int = 0) -> RestrictedResult:
    """Average of mu(A ∩ T^{-p_1(n)}A ∩ ...) over n in S_delta ∩ [M, N), where
    S_delta = {n : ||q1(n) b||, ||q2(n) b|| <= delta} for the rotation number b."""
    if not (0 < delta <= 0.5):
        raise ValueError("delta must lie in (0, 1/2]")
    if T.dimension != 1 or not T.is_rotation:
        raise ValueError("restricted averages are implemented for rotations of T^1")
    if A.dimension != 1:
        raise ValueError("A must be a subset of T^1")
    b = T.b[0]
    polys = [sequence_polynomial([0, b], q) for q in (q1, q2)]
    polys += [sequence_polynomial([0, b], p) for p in f.members]
    arcs = _arcs(A.projection(0))
    k = len(f)
    total, count = 0.0, 0
    for _, chunks in aligned_chunks(polys, M, N):
        u1, u2 = to_unit(chunks[0]), to_unit(chunks[1])
        sel = (_torus_distance(u1) <= delta) & (_torus_distance(u2) <= delta)
        if not sel.any():
            continue
        # x in T^{-m}A  <=>  x in A - m b
        shifts = np.column_stack([np.zeros(int(sel.sum()))] + [-to_unit(c[sel]) for c in chunks[2:]])
        vals = arc_intersection_lengths([arcs] * (k + 1), np.mod(shifts, 1.0))
        total += float(vals.sum())
        count += int(sel.sum())
    if count == 0:
        return RestrictedResult("no samples", None, 0, N, delta)
    return RestrictedResult("ok", total / count, count, N, delta)


# weighted averages ------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """h(u) = values[i] for edges[i] <= u < edges[i+1] on [0, 1)."""

    edges: tuple
    values: tuple

    def __post_init__(self):
        e = tuple(float(x) for x in self.edges)
        if len(e) != len(self.values) + 1 or e[0] != 0.0 or e[-1] != 1.0 or any(a >= b for a, b in zip(e, e[1:])):
            raise ValueError("edges must increase from 0 to 1 with one more entry than values")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    @classmethod
    def indicator(cls, a: float, b: float) -> "StepFunction":
        pts = sorted({0.0, float(a), float(b), 1.0})
        vals = [1.0 if a <= lo and lo < b else 0.0 for lo in pts[:-1]]
        return cls(tuple(pts), tuple(vals))

    @classmethod
    def constant(cls, c) -> "StepFunction":
        return cls((0.0, 1.0), (c,))

    @classmethod
    def from_function(cls, g: Callable[[float], complex], bins: int) -> "StepFunction":
        """Midpoint step approximation with ``bins`` equal bins."""
        edges = np.linspace(0.0, 1.0, bins + 1)
        return cls(tuple(edges), tuple(g((i + 0.5) / bins) for i in range(bins)))

    @property
    def integral(self) -> complex:
        return complex(sum(v * (b - a) for v, a, b in zip(self.values, self.edges, self.edges[1:])))

    def __call__(self, u: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(np.array(self.edges), u, side="right") - 1, 0, len(self.values) - 1)
        return np.array(self.values)[idx]

    def to_dict(self) -> dict:
        vals = [v.real if v.imag == 0 else [v.real, v.imag] for v in self.values]
        return {"edges": list(self.edges), "values": vals}


@dataclass
class WeightedResult:
    weighted: complex
    unweighted: complex
    integral_h: complex
    N: int
    warnings: list = field(default_factory=list)

    @property
    def predicted(self) -> complex:
        return self.integral_h * self.unweighted

    @property
    def discrepancy(self) -> float:
        return abs(self.weighted - self.predicted)

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]  # noqa: E731
        return {"weighted": c(self.weighted), "unweighted": c(self.unweighted),
                "integral_h": c(self.integral_h), "predicted": c(self.predicted),
                "discrepancy": self.discrepancy, "N": self.N, "warnings": list(self.warnings)}


def multiples_hypothesis(f: PolyFamily) -> Optional[str]:
    """Explain why f is not of the form {l_1 p, ..., l_k p} with deg p > 1, or None."""
    p = primitive_part(f.tilde_members[0])
    if any(proportionality(q, p) is None for q in f.tilde_members):
        return "family is not a set of multiples of one polynomial"
    if p.degree <= 1:
        return "common polynomial has degree <= 1; the factorization needs deg p > 1"
    return None


def weighted_average(T: UnipotentAffineMap, f: PolyFamily, chars: Sequence[Character], h: StepFunction,
                     beta, N: int, x0: Sequence | None = None, M: int = 0) -> WeightedResult:
    """(1/(N-M)) sum h({n beta}) prod_i chi_i(T^{p_i(n)} x0) together with the
    unweighted average, for comparison with (integral of h) * unweighted."""
    beta = SymbolicReal.of(beta)
    if not beta.is_irrational():
        raise ValueError("beta must be irrational")
    if N - M < 1:
        raise ValueError("need N - M >= 1")
    x = _exact_point(x0 if x0 is not None else [0] * T.dimension)
    notes = []
    reason = multiples_hypothesis(f)
    if reason is not None:
        notes.append(reason)
        warnings.warn(f"weighted factorization hypothesis violated: {reason}", stacklevel=2)
    P = phase_polynomial(T, f, chars, x) or [SymbolicReal()]
    wsum, usum = 0j, 0j
    for _, (ph, hb) in aligned_chunks([P, [0, beta]], M, N):
        z = np.exp(2j * np.pi * to_unit(ph))
        wsum += complex(np.dot(h(to_unit(hb)), z))
        usum += complex(z.sum())
    n = N - M
    return WeightedResult(wsum / n, usum / n, h.integral, N, notes)


__all__ = [
    "RestrictedResult", "StepFunction", "WeightedResult", "compare_limit", "empirical_multiple_average",
    "multiples_hypothesis", "restricted_average", "weighted_average",
]
