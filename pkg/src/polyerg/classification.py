"""Weyl complexity, family type and smallest characteristic factor for
families of two or three integer polynomials.

Everything here is exact linear algebra over Q.  Weyl complexity of a triple
is decided from the coefficient-matching system

    k1*p1 + l1*p2 + m1*p3 = 0
    k1*p1^2 + l1*p2^2 + m1*p3^2 + k2*p1 + l2*p2 + m2*p3 = 0

which has a solution with (k1, l1, m1) != 0 exactly when the complexity is 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from .linalg import nullspace, primitive_integer_vector, rref
from .polynomial import (
    IntPolynomial,
    PolyFamily,
    essentially_distinct,
    linear_rank,
    primitive_part,
    proportionality,
    qpoly_divmod,
)


class NotEssentiallyDistinct(ValueError):
    pass


class ClassificationInconsistency(RuntimeError):
    """Type detector and complexity solver disagree; always a bug."""


E12_UNKNOWNS = ("k1", "l1", "m1", "k2", "l2", "m2")


@dataclass(frozen=True)
class WeylComplexity:
    value: int

    def __post_init__(self):
        if self.value not in (1, 2, 3):
            raise ValueError(f"Weyl complexity of a 2- or 3-member family is 1, 2 or 3, got {self.value}")

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class E12Solution:
    k1: int
    l1: int
    m1: int
    k2: int
    l2: int
    m2: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.k1, self.l1, self.m1, self.k2, self.l2, self.m2)

    def residuals(self, polys: Sequence[IntPolynomial]) -> tuple[IntPolynomial, IntPolynomial]:
        p1, p2, p3 = polys
        first = self.k1 * p1 + self.l1 * p2 + self.m1 * p3
        second = (self.k1 * p1 * p1 + self.l1 * p2 * p2 + self.m1 * p3 * p3
                  + self.k2 * p1 + self.l2 * p2 + self.m2 * p3)
        return first, second

    def verify(self, polys: Sequence[IntPolynomial]) -> bool:
        if (self.k1, self.l1, self.m1) == (0, 0, 0):
            return False
        first, second = self.residuals(polys)
        return first.is_zero() and second.is_zero()


@dataclass(frozen=True)
class FamilyType:
    """Tag plus witness.

    ``p`` is the primitive polynomial of the form, ``coefficients`` holds
    (l, m, r) for E1 and (k, l, m, r) for E2/E3, as Fractions.  ``integral``
    records whether those coefficients are integers for the primitive ``p``.
    ``permutation`` maps form slot -> member index.
    """

    tag: str
    p: Optional[IntPolynomial] = None
    coefficients: tuple[Fraction, ...] = ()
    permutation: tuple[int, ...] = (0, 1, 2)
    integral: bool = True

    def reconstruct(self) -> tuple[IntPolynomial, ...] | None:
        """Members of the form in slot order, or None for non-typed tags."""
        if self.tag not in ("E1", "E2", "E3"):
            return None
        p = [Fraction(c) for c in self.p.coeffs]
        p2 = [Fraction(c) for c in (self.p * self.p).coeffs]

        def comb(k, c):
            size = max(len(p), len(p2))
            out = [k * (p2[j] if j < len(p2) else 0) + c * (p[j] if j < len(p) else 0) for j in range(size)]
            if any(x.denominator != 1 for x in out):
                raise ClassificationInconsistency("non-integral reconstruction")
            return IntPolynomial(int(x) for x in out)

        if self.tag == "E1":
            l, m, r = self.coefficients
            return (comb(0, l), comb(0, m), comb(0, r))
        k, l, m, r = self.coefficients
        if self.tag == "E2":
            return (comb(0, l), comb(0, m), comb(k, r))
        return (comb(k, l), comb(k, m), comb(k, r))

    def to_dict(self) -> dict:
        out = {"tag": self.tag}
        if self.p is not None:
            names = ("l", "m", "r") if self.tag == "E1" else ("k", "l", "m", "r")
            out["p"] = str(self.p)
            out["coefficients"] = {n: str(c) for n, c in zip(names, self.coefficients)}
            out["permutation"] = list(self.permutation)
            out["integral"] = self.integral
        return out


@dataclass(frozen=True)
class FactorClass:
    label: str
    step: Optional[int] = None

    def __str__(self) -> str:
        return f"NilK({self.step})" if self.label == "NilK" else self.label


KRAT = FactorClass("KRat")
KRONECKER = FactorClass("Kronecker")
AFFINE2 = FactorClass("Affine2")
NIL2 = FactorClass("Nil2")


def _require_distinct(f: PolyFamily, size: int | None = None):
    if size is not None and len(f) != size:
        raise ValueError(f"expected a family of {size} polynomials, got {len(f)}")
    if not essentially_distinct(f):
        raise NotEssentiallyDistinct(f"family {f} is not essentially distinct")


# coefficient-matching system ---------------------------------------------

def e12_matrix(polys: Sequence[IntPolynomial]) -> list[list[int]]:
    """Coefficient-matching matrix in the unknowns (k1, l1, m1, k2, l2, m2).

    Rows are powers of n in the first equation followed by powers of n in the
    second one.
    """
    p1, p2, p3 = polys
    squares = [p1 * p1, p2 * p2, p3 * p3]
    rows = []
    width1 = max(len(p.coeffs) for p in polys)
    for j in range(width1):
        rows.append([p1.coefficient(j), p2.coefficient(j), p3.coefficient(j), 0, 0, 0])
    width2 = max(width1, max(len(s.coeffs) for s in squares))
    for j in range(width2):
        rows.append([s.coefficient(j) for s in squares] + [p.coefficient(j) for p in polys])
    return rows


def solve_e12_system(f: PolyFamily) -> Optional[E12Solution]:
    """A solution with (k1, l1, m1) != 0 of the system above, or None.

    Works on the constant-stripped members.  The returned vector is the first
    nullspace row (in reduced echelon form) with a pivot among k1, l1, m1,
    scaled to coprime integers.
    """
    if len(f) != 3:
        raise ValueError(f"the E12 system needs exactly 3 polynomials, got {len(f)}")
    polys = f.tilde_members
    basis = nullspace(e12_matrix(polys), 6)
    if not basis:
        return None
    reduced, pivots = rref(basis)
    for row, pc in zip(reduced, pivots):
        if pc < 3:
            sol = E12Solution(*primitive_integer_vector(row))
            assert sol.verify(polys), "nullspace vector failed substitution"
            return sol
    return None


# complexity -----------------------------------------------------------------

def weyl_complexity_3(f: PolyFamily) -> WeylComplexity:
    _require_distinct(f, 3)
    if linear_rank(f) == 3:
        return WeylComplexity(1)
    return WeylComplexity(3 if solve_e12_system(f) is not None else 2)


def weyl_complexity_2(f: PolyFamily) -> WeylComplexity:
    _require_distinct(f, 2)
    return WeylComplexity(1 if linear_rank(f) == 2 else 2)


def weyl_complexity(f: PolyFamily) -> WeylComplexity:
    if len(f) == 2:
        return weyl_complexity_2(f)
    if len(f) == 3:
        return weyl_complexity_3(f)
    raise ValueError("Weyl complexity is only decided for families of 2 or 3 polynomials")


def shift_reduce(f: PolyFamily) -> PolyFamily:
    """{p1 - p3, p2 - p3, -p3}."""
    if len(f) != 3:
        raise ValueError("shift_reduce expects three polynomials")
    p1, p2, p3 = f.members
    return PolyFamily((p1 - p3, p2 - p3, -p3))


# family type ----------------------------------------------------------------

def _span_p_p2(c: IntPolynomial, p: IntPolynomial) -> Optional[tuple[Fraction, Fraction]]:
    """(k, r) with c == k*p^2 + r*p over Q, or None."""
    q, rem = qpoly_divmod(c.coeffs, p.coeffs)
    if rem:
        return None
    r = q[0] if q else Fraction(0)
    rest = [Fraction(0)] + q[1:] if q else []
    while rest and rest[-1] == 0:
        rest.pop()
    if not rest:
        return Fraction(0), r
    pp = [Fraction(x) for x in p.coeffs]
    if len(rest) != len(pp):
        return None
    k = rest[-1] / pp[-1]
    if any(a != k * b for a, b in zip(rest, pp)):
        return None
    return k, r


def _all_integral(values) -> bool:
    return all(Fraction(v).denominator == 1 for v in values)


def detect_family_type(f: PolyFamily) -> FamilyType:
    _require_distinct(f, 3)
    t = f.tilde_members
    if linear_rank(f) == 3:
        return FamilyType("LinearlyIndependent")

    p = primitive_part(t[0])
    ratios = [proportionality(x, p) for x in t]
    if all(r is not None for r in ratios):
        return FamilyType("E1", p, tuple(ratios), (0, 1, 2), _all_integral(ratios))

    for perm in permutations(range(3)):
        a, b, c = (t[i] for i in perm)
        p = primitive_part(a)
        l, m = proportionality(a, p), proportionality(b, p)
        if m is None:
            continue
        kr = _span_p_p2(c, p)
        if kr is None or kr[0] == 0:
            continue
        k, r = kr
        coeffs = (k, l, m, r)
        return FamilyType("E2", p, coeffs, perm, _all_integral(coeffs))

    for perm in permutations(range(3)):
        a, b, c = (t[i] for i in perm)
        p = primitive_part(b - a)
        if proportionality(c - a, p) is None:
            continue
        forms = [_span_p_p2(x, p) for x in (a, b, c)]
        if any(fm is None for fm in forms):
            continue
        ks = {fm[0] for fm in forms}
        if len(ks) != 1 or 0 in ks:
            continue
        coeffs = (forms[0][0], forms[0][1], forms[1][1], forms[2][1])
        return FamilyType("E3", p, coeffs, perm, _all_integral(coeffs))

    return FamilyType("Generic")


# factors ----------------------------------------------------------------------

_TYPE_FACTOR = {
    "LinearlyIndependent": KRAT,
    "E1": NIL2,
    "E2": AFFINE2,
    "E3": AFFINE2,
    "Generic": KRONECKER,
}


def smallest_factor(f: PolyFamily) -> FactorClass:
    ftype = detect_family_type(f)
    w = weyl_complexity_3(f).value
    typed = ftype.tag in ("E1", "E2", "E3")
    if typed != (w == 3) or (ftype.tag == "LinearlyIndependent") != (w == 1):
        raise ClassificationInconsistency(
            f"type {ftype.tag} disagrees with Weyl complexity {w} for {f}")
    return _TYPE_FACTOR[ftype.tag]


def smallest_factor_multiple(multipliers: Sequence[int], p: IntPolynomial) -> FactorClass:
    """Factor for {l_1 p, ..., l_k p} with distinct nonzero l_i."""
    ls = list(multipliers)
    if not ls:
        raise ValueError("need at least one multiplier")
    if any(x == 0 for x in ls) or len(set(ls)) != len(ls):
        raise ValueError(f"multipliers must be distinct and nonzero, got {ls}")
    if p.is_constant():
        raise ValueError("p must be nonconstant")
    if len(ls) == 1:
        return KRAT
    return FactorClass("NilK", len(ls) - 1)


def lower_bound_exceptional(f: PolyFamily) -> bool:
    """True for the families excluded from the four-term lower bound.

    E2 and E3 are always excluded; an E1 family {l p, m p, r p} is excluded
    unless one multiplier is the sum of the other two.
    """
    if len(f) != 3:
        raise ValueError("expected three polynomials")
    if any(p.constant_term() != 0 for p in f.members):
        raise ValueError("lower-bound classification requires zero constant terms")
    ftype = detect_family_type(f)
    if ftype.tag in ("E2", "E3"):
        return True
    if ftype.tag == "E1":
        a, b, c = ftype.coefficients
        return not (a == b + c or b == a + c or c == a + b)
    return False


@dataclass
class ClassificationResult:
    family: PolyFamily
    weyl_complexity: WeylComplexity
    family_type: Optional[FamilyType]
    smallest_factor: Optional[FactorClass]
    lower_bound_exceptional: Optional[bool]
    e12_solution: Optional[E12Solution] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "family": [str(p) for p in self.family],
            "weyl_complexity": self.weyl_complexity.value,
            "family_type": self.family_type.tag if self.family_type else None,
            "witness": self.family_type.to_dict() if self.family_type and self.family_type.p else None,
            "smallest_factor": str(self.smallest_factor) if self.smallest_factor else None,
            "lower_bound_exceptional": self.lower_bound_exceptional,
            "e12_solution": (dict(zip(E12_UNKNOWNS, self.e12_solution.as_tuple()))
                             if self.e12_solution else None),
            "notes": list(self.notes),
        }


def classify(f: PolyFamily) -> ClassificationResult:
    """Full classification of a 2- or 3-member family."""
    if len(f) == 2:
        w = weyl_complexity_2(f)
        return ClassificationResult(
            f, w, None, KRAT if w.value == 1 else KRONECKER, None,
            notes=["pairs: the Kronecker factor is characteristic"])
    _require_distinct(f, 3)
    w = weyl_complexity_3(f)
    ftype = detect_family_type(f)
    factor = smallest_factor(f)
    notes = []
    if all(p.constant_term() == 0 for p in f.members):
        exc = lower_bound_exceptional(f)
    else:
        exc = None
        notes.append("lower-bound exceptionality needs zero constant terms")
    return ClassificationResult(f, w, ftype, factor, exc, solve_e12_system(f), notes)


__all__ = [
    "AFFINE2", "KRAT", "KRONECKER", "NIL2",
    "ClassificationInconsistency", "ClassificationResult", "E12Solution", "FactorClass",
    "FamilyType", "NotEssentiallyDistinct", "WeylComplexity",
    "classify", "detect_family_type", "e12_matrix", "lower_bound_exceptional", "shift_reduce",
    "smallest_factor", "smallest_factor_multiple", "solve_e12_system", "weyl_complexity",
    "weyl_complexity_2", "weyl_complexity_3",
]
