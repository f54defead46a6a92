"""Solution-free sets for homogeneous linear equations a_1 x_1 + ... + a_k x_k = 0
with sum a_i = 0, Behrend-type 3-AP-free sets, empirical type estimates, and
the two finite counterexample experiments built from such sets.

A solution "with distinct entries" uses k pairwise distinct integers; solutions
with a repeated entry are allowed inside a solution-free set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .affine import UnipotentAffineMap
from .boxes import BoxSet, correlation_for_shifts
from .phases import aligned_chunks, to_unit
from .polynomial import PolyFamily
from .affine import orbit_closed_form
from .symbolic import SymbolicReal, to_symbolic_vector

EXACT_LIMIT = 40
GREEDY_LIMIT = 100_000


@dataclass(frozen=True)
class LinearEquation:
    coefficients: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coefficients)
        if len(cs) < 2:
            raise ValueError("an equation needs at least two terms")
        if any(c == 0 for c in cs):
            raise ValueError(f"coefficients must be nonzero: {cs}")
        if sum(cs) != 0:
            raise ValueError(f"coefficients must sum to zero: {cs}")
        object.__setattr__(self, "coefficients", cs)

    @classmethod
    def parse(cls, text: str) -> "LinearEquation":
        return cls(tuple(int(x) for x in text.replace(" ", "").split(",") if x))

    @property
    def k(self) -> int:
        return len(self.coefficients)

    def canonical(self) -> tuple[int, ...]:
        """Sorted coefficients, overall sign fixed; equal for equations that
        differ by a permutation of variables or by multiplying through by -1."""
        a = tuple(sorted(self.coefficients))
        b = tuple(sorted(-c for c in self.coefficients))
        return min(a, b)

    def equivalent(self, other: "LinearEquation") -> bool:
        return self.canonical() == other.canonical()

    def is_solution(self, xs: Sequence[int]) -> bool:
        return sum(a * x for a, x in zip(self.coefficients, xs)) == 0

    def __str__(self) -> str:
        terms = " ".join(f"{'+' if c > 0 else '-'} {abs(c)}*x{i + 1}" for i, c in enumerate(self.coefficients))
        return terms.lstrip("+ ") + " = 0"


THREE_AP = LinearEquation((1, 1, -2))
EQ_I = LinearEquation((1, 8, -6, -3))       # x + 8z = 6y + 3w
EQ_II = LinearEquation((2, 1, 1, -2, -2))   # 2x + y + w = 2z + 2v


def distinct_solutions(eq: LinearEquation, N: int) -> np.ndarray:
    """All solutions in {1..N}^k with pairwise distinct entries, shape (s, k)."""
    a = eq.coefficients
    k = eq.k
    last = k - 1
    # enumerate the first k-1 entries, solve for the last
    grids = np.meshgrid(*[np.arange(1, N + 1, dtype=np.int64)] * (k - 1), indexing="ij")
    cols = [g.ravel() for g in grids]
    partial = sum(c * x for c, x in zip(a[:-1], cols))
    ok = partial % a[last] == 0
    xk = -partial // a[last]
    ok &= (xk >= 1) & (xk <= N)
    sols = np.column_stack([c[ok] for c in cols] + [xk[ok]])
    srt = np.sort(sols, axis=1)
    distinct = np.all(srt[:, 1:] != srt[:, :-1], axis=1) if k > 1 else np.ones(len(sols), bool)
    return sols[distinct]


@dataclass
class Hypergraph:
    """Solution sets as bitmasks over {1..N} (bit i-1 for element i)."""

    N: int
    masks: np.ndarray      # uint64 (N <= 63) or object
    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def build(cls, eqs: Sequence[LinearEquation], N: int) -> "Hypergraph":
        if N > 63:
            raise ValueError("bitmask hypergraph supports N <= 63")
        all_masks = []
        for eq in eqs:
            sols = distinct_solutions(eq, N)
            if len(sols):
                bits = np.left_shift(np.uint64(1), (sols - 1).astype(np.uint64))
                all_masks.append(np.bitwise_or.reduce(bits, axis=1))
        masks = np.unique(np.concatenate(all_masks)) if all_masks else np.zeros(0, dtype=np.uint64)
        mins = np.array([_low_bit(int(m)) + 1 for m in masks], dtype=np.int64)
        maxs = np.array([int(m).bit_length() for m in masks], dtype=np.int64)
        return cls(N, masks, mins, maxs)

    def edges_with_min(self, i: int, max_allowed: int) -> np.ndarray:
        sel = (self.mins == i) & (self.maxs <= max_allowed)
        return self.masks[sel]


def _low_bit(m: int) -> int:
    return (m & -m).bit_length() - 1


@dataclass
class SolutionFreeSet:
    N: int
    elements: tuple[int, ...]
    equations: tuple[LinearEquation, ...]
    verified: bool = False
    method: str = ""
    certified_maximum: bool = False

    @property
    def equation(self) -> LinearEquation:
        return self.equations[0]

    def __len__(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {"N": self.N, "size": len(self.elements), "elements": list(self.elements),
                "equations": [list(e.coefficients) for e in self.equations], "verified": self.verified,
                "method": self.method, "certified_maximum": self.certified_maximum}


def find_distinct_solution(elements: Sequence[int], eq: LinearEquation) -> Optional[tuple[int, ...]]:
    """Exhaustive search for a distinct-entry solution inside ``elements``."""
    S = np.array(sorted(set(elements)), dtype=np.int64)
    if len(S) < eq.k:
        return None
    a = eq.coefficients
    members = set(S.tolist())
    k = eq.k
    # iterate the first k-1 coordinates over S (chunked), solve for the last
    if len(S) ** (k - 1) > 5 * 10**7:
        raise ValueError("set too large for exhaustive verification")
    grids = np.meshgrid(*[S] * (k - 1), indexing="ij")
    cols = [g.ravel() for g in grids]
    partial = sum(c * x for c, x in zip(a[:-1], cols))
    ok = partial % a[-1] == 0
    xk = -partial // a[-1]
    ok &= np.isin(xk, S)
    if not ok.any():
        return None
    cand = np.column_stack([c[ok] for c in cols] + [xk[ok]])
    srt = np.sort(cand, axis=1)
    good = np.all(srt[:, 1:] != srt[:, :-1], axis=1)
    if not good.any():
        return None
    sol = tuple(int(x) for x in cand[np.argmax(good)])
    assert all(x in members for x in sol)
    return sol


def verify_solution_free(elements: Sequence[int], eqs: Sequence[LinearEquation]) -> bool:
    return all(find_distinct_solution(elements, eq) is None for eq in eqs)


def is_3ap_free(elements: Sequence[int]) -> bool:
    """No x < z in the set with (x + z)/2 also in it (pairwise scan)."""
    S = np.array(sorted(set(elements)), dtype=np.int64)
    if len(S) < 3:
        return True
    present = np.zeros(int(S[-1]) * 2 + 2, dtype=bool)
    present[S] = True
    for i in range(len(S) - 1):
        tot = S[i] + S[i + 1:]
        even = tot % 2 == 0
        if present[tot[even] // 2].any():
            return False
    return True


def _as_eqs(eq) -> tuple[LinearEquation, ...]:
    if isinstance(eq, LinearEquation):
        return (eq,)
    return tuple(eq)


# exact maximum ------------------------------------------------------------------

class SearchBudgetExceeded(ValueError):
    pass


def exact_profile(eqs, N: int) -> tuple[list[int], list[tuple[int, ...]]]:
    """f(L) = max solution-free subset size of {1..L}, for L = 0..N, and witnesses.

    Translation invariance (sum a_i = 0) gives f(L-1) <= f(L) <= f(L-1) + 1,
    and any set of size f(L-1) + 1 in {1..L} must contain both 1 and L.
    """
    eqs = _as_eqs(eqs)
    if N > EXACT_LIMIT:
        raise SearchBudgetExceeded(
            f"exact search is limited to N <= {EXACT_LIMIT}; use greedy mode for larger N")
    H = Hypergraph.build(eqs, N)
    f = [0]
    wit: list[tuple[int, ...]] = [()]
    for L in range(1, N + 1):
        target = f[-1] + 1
        edges = {i: H.edges_with_min(i, L) for i in range(1, L + 1)}
        found = _search(L, target, f, edges)
        if found is None:
            f.append(f[-1])
            wit.append(wit[-1])
        else:
            f.append(target)
            wit.append(found)
    return f, wit


def _search(L: int, target: int, f: list[int], edges) -> Optional[tuple[int, ...]]:
    """Find a solution-free subset of {1..L} of size ``target`` containing 1 and L."""
    start_mask = 1 << (L - 1)
    if target == 1:
        return (L,) if L == 1 else None
    # elements decided in descending order; adding i can only complete edges with min i
    stack = [(L - 1, start_mask, 1)]
    while stack:
        i, mask, size = stack.pop()
        if i == 0:
            if size == target:
                return tuple(j + 1 for j in range(L) if mask >> j & 1)
            continue
        # bound: at most f(i) more among {1..i}
        if size + f[i] < target:
            continue
        # exclude branch (never exclude 1)
        if i > 1:
            stack.append((i - 1, mask, size))
        new = mask | (1 << (i - 1))
        e = edges[i]
        if len(e) == 0 or not np.any((e & ~np.uint64(new)) == 0):
            stack.append((i - 1, new, size + 1))
    return None


def greedy_solution_free(eqs, N: int) -> tuple[int, ...]:
    """Ascending scan: keep n unless it completes a distinct-entry solution."""
    eqs = _as_eqs(eqs)
    if N > GREEDY_LIMIT:
        raise ValueError(f"greedy mode is limited to N <= {GREEDY_LIMIT}")
    chosen: list[int] = []
    present = np.zeros(N + 1, dtype=bool)
    for n in range(1, N + 1):
        if _completes(n, chosen, present, eqs):
            continue
        chosen.append(n)
        present[n] = True
    return tuple(chosen)


def _completes(n: int, chosen: list[int], present: np.ndarray, eqs) -> bool:
    """Would adding n create a distinct-entry solution using n (as any variable)?"""
    if not chosen:
        return False
    S = np.array(chosen, dtype=np.int64)
    for eq in eqs:
        a = eq.coefficients
        k = eq.k
        if len(chosen) < k - 1:
            continue
        for pos in range(k):
            others = [a[j] for j in range(k) if j != pos]
            # others[:-1] range over S, solve for others[-1]
            free = others[:-1]
            if len(S) ** len(free) > 2 * 10**7:
                raise ValueError("greedy step too large")
            grids = np.meshgrid(*[S] * len(free), indexing="ij") if free else []
            cols = [g.ravel() for g in grids]
            partial = a[pos] * n + (sum(c * x for c, x in zip(free, cols)) if free else 0)
            partial = np.atleast_1d(partial)
            ok = partial % others[-1] == 0
            last = -partial // others[-1]
            ok &= (last >= 1) & (last < len(present))
            if not ok.any():
                continue
            idx = np.nonzero(ok)[0]
            idx = idx[present[last[idx]]]
            if len(idx) == 0:
                continue
            tup = np.column_stack([c[idx] for c in cols] + [last[idx], np.full(len(idx), n)])
            srt = np.sort(tup, axis=1)
            if np.any(np.all(srt[:, 1:] != srt[:, :-1], axis=1)):
                return True
    return False


def max_solution_free(eq, N: int, mode: str = "exact") -> SolutionFreeSet:
    eqs = _as_eqs(eq)
    if mode == "exact":
        f, wit = exact_profile(eqs, N)
        elems, certified = wit[N], True
    elif mode == "greedy":
        elems, certified = greedy_solution_free(eqs, N), False
    else:
        raise ValueError(f"mode must be 'exact' or 'greedy', got {mode!r}")
    ok = verify_solution_free(elems, eqs) if len(elems) ** (max(e.k for e in eqs) - 1) <= 5 * 10**7 else False
    return SolutionFreeSet(N, tuple(elems), eqs, ok, mode, certified)


# Behrend ------------------------------------------------------------------------

def behrend_candidates(N: int) -> list[tuple[int, int, tuple[int, ...]]]:
    """(d, norm, elements) for every digit base 2d-1 and squared norm; norm -1 marks
    the full {0,1}-digit cube in base 3."""
    out = []
    d = 2
    while 2 * d - 1 <= max(N, 3):
        base = 2 * d - 1
        D = 1
        while base ** D < N:
            D += 1
        digits = np.array(list(product(range(d), repeat=D)), dtype=np.int64)
        values = digits @ (base ** np.arange(D, dtype=np.int64)) + 1
        keep = values <= N
        values, digits = values[keep], digits[keep]
        norms = (digits ** 2).sum(axis=1)
        for r in np.unique(norms):
            out.append((d, int(r), tuple(sorted(values[norms == r].tolist()))))
        if d == 2:
            out.append((2, -1, tuple(sorted(values.tolist()))))
        d += 1
        if d ** D > 5 * 10**6:
            break
    return out


def behrend_set(N: int) -> SolutionFreeSet:
    """Largest set produced by the digit/sphere construction (ties: smaller d, then norm)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    best = max(behrend_candidates(N), key=lambda c: (len(c[2]), -c[0], -c[1]))
    d, r, elems = best
    verified = is_3ap_free(elems) if N <= 10**4 else False
    method = f"behrend(d={d}, norm={'cube' if r < 0 else r})"
    return SolutionFreeSet(N, elems, (THREE_AP,), verified, method)


# type estimates -------------------------------------------------------------------

@dataclass
class TypeEstimate:
    samples: list
    fitted_exponent: Optional[float]
    label: str = "empirical lower estimate of the equation type"

    def to_dict(self) -> dict:
        return {"samples": [{"N": n, "size": s, "exact": e} for n, s, e in self.samples],
                "fitted_exponent": self.fitted_exponent, "label": self.label}


def type_estimate(eq, N_list: Sequence[int], mode: str = "exact") -> TypeEstimate:
    eqs = _as_eqs(eq)
    Ns = list(N_list)
    if Ns != sorted(Ns):
        raise ValueError("N_list must be ascending")
    samples = []
    exact_prof = None
    if mode == "exact":
        limit = min(max(Ns), EXACT_LIMIT)
        exact_prof = exact_profile(eqs, limit)[0]
    for n in Ns:
        if mode == "behrend":
            if not all(e.equivalent(THREE_AP) for e in eqs):
                raise ValueError("behrend mode only applies to x + y = 2z")
            samples.append((n, len(behrend_set(n)), False))
        elif exact_prof is not None and n <= EXACT_LIMIT:
            samples.append((n, exact_prof[n], True))
        else:
            samples.append((n, len(greedy_solution_free(eqs, n)), False))
    fit = None
    pts = [(math.log(n), math.log(s)) for n, s, _ in samples if n > 1 and s > 0]
    if len(pts) >= 2:
        xs, ys = zip(*pts)
        fit = float(np.clip(np.polyfit(xs, ys, 1)[0], 0.0, 1.0))
    return TypeEstimate(samples, fit)


def single_exponent(size: int, N: int) -> float:
    """log|Lambda| / log N."""
    return math.log(size) / math.log(N)


# counterexample experiments -------------------------------------------------------

@dataclass
class CounterexampleReport:
    construction: str
    Lambda: tuple
    N: int
    mu_A: Fraction
    delta: float
    exponent: float
    mu_A_power: float
    bound: Fraction
    correlations: list
    bound_satisfied: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "Lambda": list(self.Lambda),
            "N": self.N,
            "mu_A": {"exact": str(self.mu_A), "value": float(self.mu_A)},
            "delta": self.delta,
            "c_or_d": self.exponent,
            "mu_A_power": self.mu_A_power,
            "bound": {"exact": str(self.bound), "value": float(self.bound)},
            "per_n_correlations": [{"n": n, "value": v, "method": m} for n, v, m in self.correlations],
            "bound_satisfied": self.bound_satisfied,
            "max_ratio_to_bound": max((v / float(self.bound) for _, v, _ in self.correlations), default=0.0),
            "notes": list(self.notes),
            "conditional": "the asymptotic statement depends on unproven equation types; only the finite bound is checked",
        }


def _check_lambda(L: SolutionFreeSet, eq: LinearEquation):
    if not L.verified:
        raise ValueError("the set Lambda must be verified before building a counterexample")
    if not any(e.equivalent(eq) for e in L.equations):
        raise ValueError(f"Lambda must be solution-free for {eq}")
    if not verify_solution_free(L.elements, [eq]):
        raise ValueError("Lambda contains a distinct-entry solution")


def interval_union(L: SolutionFreeSet, spacing: int, width: int) -> BoxSet:
    """Union of [j/(spacing*N), j/(spacing*N) + 1/(width*N)) over j in Lambda."""
    N = L.N
    return BoxSet.interval_union([(Fraction(j, spacing * N), Fraction(j, spacing * N) + Fraction(1, width * N))
                                  for j in L.elements])


def _run(T, A, fam, ns):
    out = []
    for n in ns:
        est = correlation_for_shifts(T, A, [p(n) for p in fam.members])
        out.append((n, est.value, est.method))
    return out


def construct_counterexample_i(L: SolutionFreeSet, alpha, delta: float | None = None,
                               n_values: Sequence[int] = range(1, 101), tol: float = 1e-12) -> CounterexampleReport:
    _check_lambda(L, EQ_I)
    alpha = SymbolicReal.of(alpha)
    if not alpha.is_irrational():
        raise ValueError("alpha must be irrational")
    T = UnipotentAffineMap.skew(alpha, 2)
    B = interval_union(L, 9, 81)
    A = BoxSet.product(BoxSet.full(1), B)
    N, size = L.N, len(L)
    mu = Fraction(size, 81 * N)
    assert A.measure == mu
    notes = []
    if delta is None:
        delta = single_exponent(size, N) if N > 1 else 0.0
        notes.append("delta fitted as log|Lambda|/log N")
    c = (2 - delta) / (1 - delta)
    bound = Fraction(size, N * N)
    corr = _run(T, A, PolyFamily.of("2*n", "3*n", "4*n"), n_values)
    ok = all(v <= float(bound) + tol for _, v, _ in corr)
    return CounterexampleReport("i", L.elements, N, mu, delta, c, float(mu) ** c, bound, corr, ok, notes)


def construct_counterexample_ii(L: SolutionFreeSet, alpha, delta: float | None = None,
                                n_values: Sequence[int] = range(1, 101), tol: float = 1e-12) -> CounterexampleReport:
    _check_lambda(L, EQ_II)
    if not is_3ap_free(L.elements):
        raise ValueError("Lambda must also be free of 3-term progressions")
    alpha = SymbolicReal.of(alpha)
    if not alpha.is_irrational():
        raise ValueError("alpha must be irrational")
    T = UnipotentAffineMap.skew(alpha, 2)
    B = interval_union(L, 4, 16)
    A = BoxSet.product(B, B)
    N, size = L.N, len(L)
    mu = Fraction(size, 16 * N) ** 2
    assert A.measure == mu
    notes = []
    if delta is None:
        delta = single_exponent(size, N) if N > 1 else 0.0
        notes.append("delta fitted as log|Lambda|/log N")
    dexp = 0.5 * (2 - delta) / (1 - delta)
    bound = Fraction(size, N * N)
    corr = _run(T, A, PolyFamily.of("n", "2*n", "n^2"), n_values)
    ok = all(v <= float(bound) + tol for _, v, _ in corr)
    return CounterexampleReport("ii", L.elements, N, mu, delta, dexp, float(mu) ** dexp, bound, corr, ok, notes)


# orbit transfer ------------------------------------------------------------------

def orbit_transfer(T: UnipotentAffineMap, A: BoxSet, x0: Sequence, N: int, M: int = 1) -> np.ndarray:
    """{n in [M, N] : T^n x0 in A}, as a sorted int64 array."""
    if N < 1:
        raise ValueError("N must be >= 1")
    x = to_symbolic_vector(x0)
    coords = orbit_closed_form(T).monomial(x)
    out = []
    for n0, chunks in aligned_chunks(coords, M, N + 1):
        pts = np.column_stack([to_unit(c) for c in chunks])
        hit = A.contains(pts)
        out.append(np.nonzero(hit)[0] + n0)
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def transfer_density(Lambda: np.ndarray, shifts: Sequence[int], N: int) -> float:
    """Density in [1, N] of Lambda ∩ (Lambda + s_1) ∩ ... (a finite-N diagnostic)."""
    present = np.zeros(N + 1, dtype=bool)
    present[Lambda[(Lambda >= 1) & (Lambda <= N)]] = True
    hit = present.copy()
    for s in shifts:
        shifted = np.zeros(N + 1, dtype=bool)
        if s >= 0:
            shifted[s:] = present[:N + 1 - s]
        else:
            shifted[:N + 1 + s] = present[-s:]
        hit &= shifted
    return float(hit[1:].mean())


__all__ = [
    "EQ_I", "EQ_II", "THREE_AP", "CounterexampleReport", "Hypergraph", "LinearEquation",
    "SearchBudgetExceeded", "SolutionFreeSet", "TypeEstimate", "behrend_candidates", "behrend_set",
    "construct_counterexample_i", "construct_counterexample_ii", "distinct_solutions", "exact_profile",
    "find_distinct_solution", "greedy_solution_free", "is_3ap_free", "max_solution_free",
    "orbit_transfer", "transfer_density", "type_estimate", "verify_solution_free",
]
