"""Unipotent affine maps x -> (I + N) x + b on the torus T^d.

Because N is strictly lower triangular, N^d = 0 and

    T^n x = sum_k C(n, k) (N^k x + N^(k-1) b)

is a polynomial in n of degree <= d (the k = 0 term has no b part).  The
identity is valid for negative n as well, with C(n, k) the generalized
binomial coefficient.  All of this is exact over SymbolicReal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .polynomial import IntPolynomial, PolyFamily
from .symbolic import SymbolicReal, to_symbolic_vector

Vector = tuple[SymbolicReal, ...]


def binom(n: int, k: int) -> int:
    """Generalized binomial coefficient C(n, k) for any integer n, k >= 0."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= n - i
    return num // math.factorial(k)


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)) for i in range(n))


def _identity(d: int):
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def matvec(mat, v: Sequence) -> Vector:
    out = []
    for row in mat:
        acc = SymbolicReal()
        for c, x in zip(row, v):
            if c:
                acc = acc + c * SymbolicReal.of(x)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class Character:
    frequency: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "frequency", tuple(int(x) for x in self.frequency))

    @property
    def trivial(self) -> bool:
        return not any(self.frequency)

    def phase(self, x: Sequence) -> SymbolicReal:
        """frequency . x (exact)."""
        acc = SymbolicReal()
        for f, xi in zip(self.frequency, x):
            if f:
                acc = acc + f * SymbolicReal.of(xi)
        return acc

    def __call__(self, x: Sequence[float]) -> complex:
        return complex(np.exp(2j * np.pi * float(np.dot(self.frequency, x))))


@dataclass(frozen=True)
class UnipotentAffineMap:
    N: tuple[tuple[int, ...], ...]
    b: Vector

    def __post_init__(self):
        N = tuple(tuple(int(x) for x in row) for row in self.N)
        b = to_symbolic_vector(self.b)
        d = len(N)
        if any(len(row) != d for row in N):
            raise ValueError("N must be square")
        if len(b) != d:
            raise ValueError(f"translation has length {len(b)}, expected {d}")
        for i in range(d):
            for j in range(i, d):
                if N[i][j] != 0:
                    raise ValueError("N must be strictly lower triangular (zero on and above the diagonal)")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "b", b)

    # constructors
    @classmethod
    def rotation(cls, *alphas) -> "UnipotentAffineMap":
        d = len(alphas)
        return cls(tuple((0,) * d for _ in range(d)), tuple(alphas))

    @classmethod
    def skew(cls, alpha, coupling: int = 2, beta=None) -> "UnipotentAffineMap":
        """(t, s) -> (t + alpha, s + coupling*t + beta), beta defaulting to alpha."""
        return cls(((0, 0), (coupling, 0)), (alpha, alpha if beta is None else beta))

    @classmethod
    def standard(cls, alpha, d: int) -> "UnipotentAffineMap":
        """(x1 + alpha, x2 + x1, ..., xd + x_{d-1})."""
        N = tuple(tuple(int(j == i - 1) for j in range(d)) for i in range(d))
        return cls(N, (alpha,) + (0,) * (d - 1))

    @property
    def dimension(self) -> int:
        return len(self.N)

    @property
    def quasi_standard(self) -> bool:
        d = self.dimension
        return self.b[0].is_irrational() and all(self.N[i][i - 1] != 0 for i in range(1, d))

    @property
    def is_rotation(self) -> bool:
        return not any(any(row) for row in self.N)

    def apply(self, x: Sequence) -> Vector:
        x = to_symbolic_vector(x)
        Nx = matvec(self.N, x)
        return tuple(xi + nxi + bi for xi, nxi, bi in zip(x, Nx, self.b))

    def iterate(self, x: Sequence, n: int) -> Vector:
        if n < 0:
            raise ValueError("iterate only supports n >= 0; use power() for negative n")
        x = to_symbolic_vector(x)
        for _ in range(n):
            x = self.apply(x)
        return x

    def nilpotent_powers(self) -> list:
        """[N^0, N^1, ..., N^d] (the last one is zero)."""
        d = self.dimension
        out = [_identity(d)]
        for _ in range(d):
            out.append(_matmul(out[-1], self.N))
        return out

    def power(self, m: int):
        """(U_m, v_m) with T^m x = U_m x + v_m, exactly; any integer m."""
        pw = self.nilpotent_powers()
        d = self.dimension
        U = [[0] * d for _ in range(d)]
        for k in range(d):
            c = binom(m, k)
            for i in range(d):
                for j in range(d):
                    U[i][j] += c * pw[k][i][j]
        v = [SymbolicReal()] * d
        for k in range(1, d + 1):
            c = binom(m, k)
            if c:
                Nb = matvec(pw[k - 1], self.b)
                v = [vi + c * w for vi, w in zip(v, Nb)]
        return tuple(tuple(r) for r in U), tuple(v)

    def to_dict(self) -> dict:
        return {"N": [list(r) for r in self.N], "b": [str(x) for x in self.b]}


@dataclass(frozen=True)
class OrbitPolynomial:
    """Orbit of a symbolic point in the binomial basis C(n, 0), ..., C(n, d).

    ``linear[k]`` is N^k (acting on the initial point) and ``translation[k]``
    is N^(k-1) b (zero for k = 0).
    """

    linear: tuple
    translation: tuple

    @property
    def dimension(self) -> int:
        return len(self.linear[0])

    def coefficient(self, k: int, x: Sequence) -> Vector:
        """Vector multiplying C(n, k) for initial point x."""
        lx = matvec(self.linear[k], to_symbolic_vector(x))
        return tuple(a + b for a, b in zip(lx, self.translation[k]))

    def evaluate(self, n: int, x: Sequence) -> Vector:
        x = to_symbolic_vector(x)
        out = [SymbolicReal()] * self.dimension
        for k in range(len(self.linear)):
            c = binom(n, k)
            if c:
                out = [o + c * w for o, w in zip(out, self.coefficient(k, x))]
        return tuple(out)

    def monomial(self, x: Sequence) -> list[list[SymbolicReal]]:
        """Per coordinate, coefficients of n^0, n^1, ..., n^d."""
        x = to_symbolic_vector(x)
        d = len(self.linear) - 1
        out = [[SymbolicReal()] * (d + 1) for _ in range(self.dimension)]
        for k in range(d + 1):
            bpoly = binomial_polynomial(IntPolynomial((0, 1)), k)
            vec = self.coefficient(k, x)
            for i in range(self.dimension):
                for j, c in enumerate(bpoly):
                    if c:
                        out[i][j] = out[i][j] + c * vec[i]
        return out


def orbit_closed_form(T: UnipotentAffineMap) -> OrbitPolynomial:
    pw = T.nilpotent_powers()
    d = T.dimension
    zero = tuple(SymbolicReal() for _ in range(d))
    translation = [zero] + [matvec(pw[k - 1], T.b) for k in range(1, d + 1)]
    return OrbitPolynomial(tuple(pw), tuple(translation))


@lru_cache(maxsize=512)
def binomial_polynomial(p: IntPolynomial, k: int) -> tuple[Fraction, ...]:
    """Rational coefficients (in n) of C(p(n), k) = p(p-1)...(p-k+1)/k!."""
    acc = IntPolynomial((1,))
    for i in range(k):
        acc = acc * (p - i)
    f = math.factorial(k)
    return tuple(Fraction(c, f) for c in acc.coeffs)


# phase polynomials -----------------------------------------------------------

def _add_scaled(target: list, coeffs: Sequence[Fraction], scalar: SymbolicReal) -> list:
    if len(target) < len(coeffs):
        target = target + [SymbolicReal()] * (len(coeffs) - len(target))
    for j, c in enumerate(coeffs):
        if c:
            target[j] = target[j] + c * scalar
    return target


def trim_phase(P: Sequence[SymbolicReal]) -> list[SymbolicReal]:
    P = list(P)
    while P and P[-1].is_zero():
        P.pop()
    return P


def phase_polynomial(T: UnipotentAffineMap, f: PolyFamily, chars: Sequence[Character],
                     x: Sequence) -> list[SymbolicReal]:
    """Coefficients (in n) of sum_i chi_i(T^{p_i(n)} x), as exact SymbolicReals."""
    if len(chars) != len(f):
        raise ValueError(f"{len(chars)} characters for {len(f)} polynomials")
    d = T.dimension
    x = to_symbolic_vector(x)
    if len(x) != d:
        raise ValueError(f"initial point has length {len(x)}, expected {d}")
    for ch in chars:
        if len(ch.frequency) != d:
            raise ValueError(f"character {ch.frequency} does not match dimension {d}")
    orbit = orbit_closed_form(T)
    coeff_vectors = [orbit.coefficient(k, x) for k in range(d + 1)]
    total: list[SymbolicReal] = []
    for p, ch in zip(f.members, chars):
        if ch.trivial:
            continue
        for k in range(d + 1):
            scalar = ch.phase(coeff_vectors[k])
            if scalar.is_zero():
                continue
            total = _add_scaled(total, binomial_polynomial(p, k), scalar)
    return trim_phase(total)


def sequence_polynomial(coeffs: Sequence, p: IntPolynomial) -> list[SymbolicReal]:
    """Compose a phase polynomial (coefficients in n) with an integer polynomial p."""
    total: list[SymbolicReal] = []
    power = IntPolynomial((1,))
    for c in coeffs:
        c = SymbolicReal.of(c)
        if not c.is_zero():
            total = _add_scaled(total, [Fraction(v) for v in power.coeffs], c)
        power = power * p
    return trim_phase(total)


def evaluate_phase(P: Sequence[SymbolicReal], n: int) -> SymbolicReal:
    acc = SymbolicReal()
    for c in reversed(P):
        acc = acc * n + c
    return acc


# exact limits ----------------------------------------------------------------

MAX_PERIOD = 2_000_000


def e(x) -> complex:
    """e(x) = exp(2 pi i x) for a SymbolicReal, via its high-precision fractional part."""
    frac = float(SymbolicReal.of(x).frac_mpf(30))
    return complex(np.exp(2j * np.pi * frac))


def phase_limit(P: Sequence) -> complex:
    """Uniform Cesaro limit of e(P(n)).

    Zero if some coefficient of n^j, j >= 1, is irrational (Weyl).  Otherwise
    P(n) mod 1 - P(0) is periodic with period D = common denominator of the
    nonconstant coefficients, and the limit is the exact period average.
    """
    P = trim_phase([SymbolicReal.of(c) for c in P])
    if not P:
        return 1 + 0j
    if any(c.is_irrational() for c in P[1:]):
        return 0j
    const = e(P[0])
    rat = [c.rational for c in P[1:]]
    if not any(rat):
        return const
    D = 1
    for r in rat:
        D = D * r.denominator // math.gcd(D, r.denominator)
    if D > MAX_PERIOD:
        raise ValueError(f"period {D} exceeds the exact-averaging limit {MAX_PERIOD}")
    # D * (P(n) - P(0)) has integer coefficients; evaluate it mod D for n in [0, D)
    ints = [0] + [int(r * D) % D for r in rat]
    n = np.arange(D, dtype=np.int64)
    acc = np.zeros(D, dtype=np.int64)
    for c in reversed(ints):
        acc = (acc * n + c) % D
    counts = np.bincount(acc, minlength=D)
    roots = np.exp(2j * np.pi * np.arange(D) / D)
    avg = complex(np.dot(counts, roots) / D)
    return _snap(const * avg)


def _snap(z: complex, eps: float = 1e-13) -> complex:
    """Round away floating residue of exact zeros (e.g. a period sum of +1, -1)."""
    return complex(0.0 if abs(z.real) < eps else z.real, 0.0 if abs(z.imag) < eps else z.imag)


def analytic_multiple_limit(T: UnipotentAffineMap, f: PolyFamily, chars: Sequence[Character],
                            x: Sequence) -> complex:
    """Exact limit of the average of prod_i chi_i(T^{p_i(n)} x) over n."""
    return phase_limit(phase_polynomial(T, f, chars, x))


__all__ = [
    "Character", "OrbitPolynomial", "UnipotentAffineMap", "analytic_multiple_limit", "binom",
    "binomial_polynomial", "e", "evaluate_phase", "orbit_closed_form", "phase_limit",
    "phase_polynomial", "sequence_polynomial", "trim_phase",
]
