"""Independent reference implementations used only by the tests.

Each oracle takes a different route from the package code: sympy for
polynomial algebra, integer Bareiss elimination instead of Fraction RREF,
plain backtracking instead of bitmask branch-and-bound, sympy matrix powers
instead of the binomial closed form, and mpmath instead of the fixed-point
difference engine.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import mpmath
import sympy

n_sym = sympy.Symbol("n")


# polynomials / linear algebra -------------------------------------------------

def to_sympy(p) -> sympy.Expr:
    return sum(int(c) * n_sym ** j for j, c in enumerate(p.coeffs))


def bareiss_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [[int(x) for x in r] for r in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank, prev = 0, 1
    for c in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, n_rows):
            for j in range(c + 1, n_cols):
                num = m[i][j] * m[rank][c] - m[i][c] * m[rank][j]
                assert num % prev == 0
                m[i][j] = num // prev
            m[i][c] = 0
        prev = m[rank][c]
        rank += 1
        if rank == n_rows:
            break
    return rank


def e12_oracle(polys) -> bool:
    """Does k1 p1 + l1 p2 + m1 p3 = 0 and k1 p1^2 + l1 p2^2 + m1 p3^2 + k2 p1 + l2 p2 + m2 p3 = 0
    have a solution with (k1, l1, m1) != 0?  Matrix built with sympy, rank by Bareiss."""
    ks = sympy.symbols("k1 l1 m1 k2 l2 m2")
    p = [to_sympy(q) for q in polys]
    e1 = sympy.expand(ks[0] * p[0] + ks[1] * p[1] + ks[2] * p[2])
    e2 = sympy.expand(ks[0] * p[0] ** 2 + ks[1] * p[1] ** 2 + ks[2] * p[2] ** 2
                      + ks[3] * p[0] + ks[4] * p[1] + ks[5] * p[2])
    rows = []
    for e in (e1, e2):
        poly = sympy.Poly(e, n_sym)
        for coeff in poly.all_coeffs():
            rows.append([int(sympy.expand(coeff).coeff(k)) for k in ks])
    full = bareiss_rank(rows)
    tail = bareiss_rank([r[3:] for r in rows])
    # projection of the kernel onto (k1, l1, m1) has dimension 3 - (full - tail)
    return full - tail < 3


def e12_residuals_vanish(sol, polys) -> bool:
    k1, l1, m1, k2, l2, m2 = sol
    p = [to_sympy(q) for q in polys]
    e1 = sympy.expand(k1 * p[0] + l1 * p[1] + m1 * p[2])
    e2 = sympy.expand(k1 * p[0] ** 2 + l1 * p[1] ** 2 + m1 * p[2] ** 2 + k2 * p[0] + l2 * p[1] + m2 * p[2])
    return e1 == 0 and e2 == 0 and (k1, l1, m1) != (0, 0, 0)


def sympy_rank(polys) -> int:
    vecs = [sympy.Poly(to_sympy(p), n_sym).all_coeffs()[::-1] for p in polys]
    width = max(len(v) for v in vecs)
    return sympy.Matrix([list(v) + [0] * (width - len(v)) for v in vecs]).rank()


def random_poly_coeffs(rng: random.Random, max_deg: int = 6, bound: int = 9) -> list[int]:
    deg = rng.randint(1, max_deg)
    coeffs = [rng.randint(-bound, bound) for _ in range(deg + 1)]
    if coeffs[-1] == 0:
        coeffs[-1] = rng.choice([c for c in range(-bound, bound + 1) if c])
    return coeffs


# solution-free sets --------------------------------------------------------------

def solution_sets(coeffs, N: int) -> list[frozenset]:
    """All sets of k distinct elements of {1..N} forming a solution (some ordering)."""
    k = len(coeffs)
    out = set()
    for tup in itertools.permutations(range(1, N + 1), k - 1):
        rest = -sum(a * x for a, x in zip(coeffs[:-1], tup))
        if rest % coeffs[-1]:
            continue
        last = rest // coeffs[-1]
        if 1 <= last <= N and last not in tup:
            out.add(frozenset(tup + (last,)))
    return sorted(out, key=sorted)


def is_solution_free(elements, coeffs) -> bool:
    """Exhaustive check over all ordered tuples with distinct entries."""
    for tup in itertools.permutations(sorted(set(elements)), len(coeffs)):
        if sum(a * x for a, x in zip(coeffs, tup)) == 0:
            return False
    return True


def brute_max_free(coeff_lists, N: int) -> int:
    """Maximum size of a subset of {1..N} free of all given equations (backtracking)."""
    sols = [s for c in coeff_lists for s in solution_sets(c, N)]
    by_max = {}
    for s in sols:
        by_max.setdefault(max(s), []).append(s - {max(s)})
    best = 0

    def rec(x, chosen: set, size: int):
        nonlocal best
        if size + (N - x + 1) <= best:
            return
        if x > N:
            best = max(best, size)
            return
        if all(not rest <= chosen for rest in by_max.get(x, [])):
            chosen.add(x)
            rec(x + 1, chosen, size + 1)
            chosen.discard(x)
        rec(x + 1, chosen, size)

    rec(1, set(), 0)
    return best


# dynamics --------------------------------------------------------------------------

def symbolic_to_sympy(x) -> sympy.Expr:
    expr = sympy.Rational(x.rational.numerator, x.rational.denominator)
    for name, c in x.irr:
        assert name.startswith("sqrt")
        expr += sympy.Rational(c.numerator, c.denominator) * sympy.sqrt(int(name[4:]))
    return expr


def sympy_orbit(T, x, n: int):
    """(I+N)^n x + sum_{j<n} (I+N)^j b via sympy matrices."""
    d = T.dimension
    A = sympy.eye(d) + sympy.Matrix(T.N)
    b = sympy.Matrix([symbolic_to_sympy(v) for v in T.b])
    xv = sympy.Matrix([symbolic_to_sympy(v) for v in x])
    acc = sympy.zeros(d, 1)
    Aj = sympy.eye(d)
    for _ in range(n):
        acc += Aj * b
        Aj = Aj * A
    return [sympy.expand(e) for e in (Aj * xv + acc)]


def mp_phase(P, n: int, dps: int = 60):
    """Fractional part of sum_j P[j] n^j evaluated with mpmath."""
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for j, c in enumerate(P):
            total += c.to_mpf(dps) * mpmath.mpf(n) ** j
        return total - mpmath.floor(total)


def arc_measure_1d(intervals, shifts) -> Fraction:
    """mu(cap_m (A - s_m)) for A a union of [a,b) in [0,1) and exact rational shifts."""
    def pieces(s):
        out = []
        for a, b in intervals:
            lo, hi = (a - s) % 1, (a - s) % 1 + (b - a)
            if hi <= 1:
                out.append((lo, hi))
            else:
                out += [(lo, Fraction(1)), (Fraction(0), hi - 1)]
        return out
    cur = pieces(Fraction(shifts[0]))
    for s in shifts[1:]:
        nxt = pieces(Fraction(s))
        cur = [(max(a, c), min(b, d)) for a, b in cur for c, d in nxt if max(a, c) < min(b, d)]
    return sum((b - a for a, b in cur), Fraction(0))


def triple_corpus(size: int = 500, seed: int = 2024, max_deg: int = 6, bound: int = 9):
    """Essentially distinct triples (deg <= max_deg, |coeff| <= bound): a mix of
    uniform random triples and structured ones (multiples, span of {p, p^2},
    rank-two combinations) so every complexity value is well represented."""
    from polyerg.polynomial import IntPolynomial, PolyFamily, essentially_distinct

    rng = random.Random(seed)
    out, seen = [], set()

    def small(k=3):
        return rng.choice([c for c in range(-k, k + 1) if c])

    while len(out) < size:
        kind = rng.randrange(5)
        if kind == 0:
            polys = [IntPolynomial(random_poly_coeffs(rng, max_deg, bound)) for _ in range(3)]
        else:
            p = IntPolynomial(random_poly_coeffs(rng, 3, 3))
            p = p.strip_constant()
            if p.is_zero():
                continue
            sq = p * p
            if kind == 1:        # multiples of one polynomial
                polys = [small() * p for _ in range(3)]
            elif kind == 2:      # two multiples and one element of span{p, p^2}
                polys = [small() * p, small() * p, small(2) * sq + rng.randint(-3, 3) * p]
            elif kind == 3:      # common p^2 coefficient
                k = small(2)
                polys = [k * sq + rng.randint(-3, 3) * p for _ in range(3)]
            else:                # rank two: q1, q2, a q1 + b q2
                q1 = IntPolynomial(random_poly_coeffs(rng, 4, 4))
                q2 = IntPolynomial(random_poly_coeffs(rng, 4, 4))
                polys = [q1, q2, small(2) * q1 + small(2) * q2]
            polys = [q + rng.randint(-2, 2) for q in polys]
        if any(q.degree > max_deg or max(map(abs, q.coeffs)) > bound for q in polys):
            continue
        fam = PolyFamily(tuple(polys))
        key = tuple(q.coeffs for q in polys)
        if key in seen or not essentially_distinct(fam):
            continue
        seen.add(key)
        out.append(fam)
    return out
