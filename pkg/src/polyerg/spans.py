"""Density of polynomial sequences in T^m via rational spans.

Write u(n) = u_0(n) q + sum_i u_i(n) a_i with u_i integer (rational) vector
polynomials and a_i the declared irrational basis.  The sequence is dense in
T^m iff the rational span of the coefficient vectors of n^j, j >= 1, of all
irrational parts u_i is all of Q^m.  Constant terms only translate the orbit
and rational parts only split it into finitely many progressions, so neither
enters the span.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .affine import sequence_polynomial, trim_phase
from .linalg import rref
from .phases import aligned_chunks, to_unit
from .polynomial import IntPolynomial
from .symbolic import SymbolicReal


@dataclass(frozen=True)
class VectorPolynomial:
    """m components, each a list of SymbolicReal coefficients in n."""

    components: tuple

    def __post_init__(self):
        comps = tuple(tuple(trim_phase([SymbolicReal.of(c) for c in comp])) for comp in self.components)
        object.__setattr__(self, "components", comps)

    @classmethod
    def times_irrational(cls, polys: Sequence, name: str) -> "VectorPolynomial":
        """(p_1(n), ..., p_m(n)) * a for a basis element a."""
        a = SymbolicReal.basis(name)
        comps = []
        for p in polys:
            p = IntPolynomial.parse(p) if isinstance(p, str) else p
            comps.append([c * a for c in p.coeffs])
        return cls(tuple(comps))

    @property
    def m(self) -> int:
        return len(self.components)

    def __add__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        if self.m != other.m:
            raise ValueError("dimension mismatch")
        out = []
        for a, b in zip(self.components, other.components):
            size = max(len(a), len(b))
            out.append([(a[j] if j < len(a) else SymbolicReal()) + (b[j] if j < len(b) else SymbolicReal())
                        for j in range(size)])
        return VectorPolynomial(tuple(out))

    def compose(self, p: IntPolynomial) -> "VectorPolynomial":
        return VectorPolynomial(tuple(sequence_polynomial(comp, p) for comp in self.components))

    def stack(self, other: "VectorPolynomial") -> "VectorPolynomial":
        return VectorPolynomial(self.components + other.components)

    def coefficient_vectors(self) -> list[list[Fraction]]:
        """Coefficient vectors in Q^m of every (basis element, degree >= 1) pair."""
        keys = sorted({(name, j) for comp in self.components for j, c in enumerate(comp) if j >= 1
                       for name, _ in c.irr})
        vecs = []
        for name, j in keys:
            vecs.append([dict(comp[j].irr).get(name, Fraction(0)) if j < len(comp) else Fraction(0)
                         for comp in self.components])
        return vecs


@dataclass(frozen=True)
class SpanDescriptor:
    m: int
    basis: tuple   # reduced row echelon rows, exact

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dense(self) -> bool:
        return self.m >= 1 and self.rank == self.m

    def to_dict(self) -> dict:
        return {"m": self.m, "rank": self.rank, "dense": self.dense,
                "basis": [[str(x) for x in row] for row in self.basis]}


def span_closure(u: VectorPolynomial) -> SpanDescriptor:
    vecs = u.coefficient_vectors()
    rows = rref(vecs)[0] if vecs else []
    return SpanDescriptor(u.m, tuple(tuple(r) for r in rows))


def substitution_invariance(u: VectorPolynomial, p: IntPolynomial) -> bool:
    if p.is_constant():
        raise ValueError("substitution needs a nonconstant polynomial")
    return span_closure(u.compose(p)) == span_closure(u)


def product_density(beta, u: VectorPolynomial, p: IntPolynomial) -> bool:
    """Is {(n beta, u(p(n)))} dense in T^{1+m}?

    Decided by the span criterion on the stacked sequence; when
    deg p > 1 and u(p(n)) is dense this is always true, and
    for p linear with u built on the same irrational as beta the sequence
    lies on a subtorus.
    """
    beta = SymbolicReal.of(beta)
    if not beta.is_irrational():
        raise ValueError("beta must be irrational")
    first = VectorPolynomial(((SymbolicReal(), beta),))
    return span_closure(first.stack(u.compose(p))).dense


def bin_coverage(u: VectorPolynomial, N: int, bins: int = 16, M: int = 0) -> float:
    """Fraction of the bins^m grid cells visited by u(n) mod 1, n in [M, N)."""
    m = u.m
    seen = np.zeros(bins ** m, dtype=bool)
    polys = [list(c) if c else [SymbolicReal()] for c in u.components]
    for _, chunks in aligned_chunks(polys, M, N):
        idx = np.zeros(len(chunks[0]), dtype=np.int64)
        for ph in chunks:
            cell = np.minimum((to_unit(ph) * bins).astype(np.int64), bins - 1)
            idx = idx * bins + cell
        seen[idx] = True
    return float(seen.mean())


__all__ = ["SpanDescriptor", "VectorPolynomial", "bin_coverage", "product_density", "span_closure",
           "substitution_invariance"]
