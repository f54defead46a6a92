"""Exact integer polynomials in one variable ``n`` and small families of them.

Coefficients are stored densely by exponent (index ``j`` holds the coefficient
of ``n**j``) as Python ints, so every operation is exact.  Families carry
their constant-stripped members, which is what the classification code works
with.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence


class PolynomialError(ValueError):
    """Raised for inputs outside the domain of a polynomial operation."""


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    out = [int(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial; ``coeffs[j]`` is the coefficient of ``n**j``.

    The zero polynomial has ``coeffs == ()``.
    """

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # construction -----------------------------------------------------
    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        return cls((0,) * degree + (coeff,))

    @classmethod
    def constant(cls, c: int) -> "IntPolynomial":
        return cls((c,))

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        return parse_polynomial(text)

    # basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def strip_constant(self) -> "IntPolynomial":
        """The polynomial minus its value at 0."""
        if not self.coeffs:
            return self
        return IntPolynomial((0,) + self.coeffs[1:])

    def coefficient(self, j: int) -> int:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        size = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(self.coefficient(j) + other.coefficient(j) for j in range(size))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolynomialError("negative power of a polynomial")
        result = IntPolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "IntPolynomial") -> "IntPolynomial":
        """``self(inner(n))``."""
        acc = IntPolynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(j * c for j, c in enumerate(self.coeffs) if j > 0)

    def eval_mod(self, x: int, m: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % m
        return acc

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"IntPolynomial({format_polynomial(self)!r})"


def _coerce(x):
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial.constant(x)
    return NotImplemented


N = IntPolynomial((0, 1))


def format_polynomial(p: IntPolynomial, var: str = "n") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for j in range(p.degree, -1, -1):
        c = p.coeffs[j]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if j == 0:
            body = str(a)
        else:
            mono = var if j == 1 else f"{var}^{j}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(n)|(\*\*|[-+*^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialError(f"cannot parse polynomial {text!r} at position {pos}")
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append("^" if tok == "**" else tok)
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise PolynomialError(f"cannot parse polynomial {self.text!r}: expected {expected or 'token'}")
        self.i += 1
        return tok

    def parse(self) -> IntPolynomial:
        if not self.toks:
            raise PolynomialError("empty polynomial expression")
        value = self.expr()
        if self.peek() is not None:
            raise PolynomialError(f"cannot parse polynomial {self.text!r}: trailing {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                value = value * self.unary()
            elif tok is not None and (tok in ("(", "n") or tok.isdigit()):
                # implicit multiplication: 2n, (n+1)(n-1), n(n+1)
                value = value * self.unary()
            else:
                return value

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            exp = self.take()
            if not exp.isdigit():
                raise PolynomialError(f"exponent must be a nonnegative integer in {self.text!r}")
            base = base ** int(exp)
        return base

    def atom(self):
        tok = self.take()
        if tok.isdigit():
            return IntPolynomial.constant(int(tok))
        if tok == "n":
            return N
        if tok == "(":
            value = self.expr()
            self.take(")")
            return value
        raise PolynomialError(f"unexpected {tok!r} in {self.text!r}")


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse an integer polynomial in ``n``: ``+ - * ^`` (or ``**``), parentheses, integers."""
    return _Parser(text).parse()


# operations ---------------------------------------------------------------

def compose_affine(p: IntPolynomial, r: int, s: int) -> IntPolynomial:
    """Return q with q(n) = p(r*n + s)."""
    if r < 1 or not 0 <= s < r:
        raise PolynomialError(f"need r >= 1 and 0 <= s < r, got r={r}, s={s}")
    return p.compose(IntPolynomial((s, r)))


def primitive_decompose(p: IntPolynomial) -> tuple[int, int, IntPolynomial]:
    """Split p as sign * content * primitive, primitive having positive leading coefficient."""
    if p.is_zero():
        raise PolynomialError("no primitive part: zero polynomial")
    content = p.content()
    sign = 1 if p.leading > 0 else -1
    return sign, content, IntPolynomial(c // (sign * content) for c in p.coeffs)


def primitive_part(p: IntPolynomial) -> IntPolynomial:
    return primitive_decompose(p)[2]


def proportionality(p: IntPolynomial, q: IntPolynomial) -> Fraction | None:
    """Return c with p == c*q (q nonzero), or None if p is not a multiple of q."""
    if q.is_zero():
        raise PolynomialError("proportionality to the zero polynomial")
    if p.is_zero():
        return Fraction(0)
    if p.degree != q.degree:
        return None
    c = Fraction(p.leading, q.leading)
    if all(Fraction(a) == c * b for a, b in zip(p.coeffs, q.coeffs)):
        return c
    return None


# rational polynomial helpers (lists of Fractions, low degree first) -------

def _qtrim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def qpoly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = _qtrim([Fraction(x) for x in a])
    b = _qtrim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b):
        shift = len(r) - len(b)
        c = r[-1] / b[-1]
        q[shift] = c
        for i, bc in enumerate(b):
            r[shift + i] -= c * bc
        r = _qtrim(r)
    return _qtrim(q), r


def _qgcd(a: list, b: list) -> list:
    a, b = _qtrim(a), _qtrim(b)
    while b:
        _, r = qpoly_divmod(a, b)
        a, b = b, r
    return a


def _from_rational(coeffs: Sequence[Fraction]) -> IntPolynomial:
    """Clear denominators and return the primitive integer polynomial."""
    if not coeffs:
        return IntPolynomial()
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in coeffs), 1)
    return primitive_part(IntPolynomial(int(c * den) for c in coeffs))


def poly_gcd(*polys: IntPolynomial) -> IntPolynomial:
    """Greatest common divisor over the rationals, as a primitive integer polynomial.

    Returns the constant 1 when the polynomials are coprime and the zero
    polynomial when all inputs are zero.
    """
    g: list = []
    for p in polys:
        g = _qgcd(g, [Fraction(c) for c in p.coeffs])
    if not g:
        return IntPolynomial()
    return _from_rational(g)


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """Primitive integer polynomial with the same complex roots as p, all simple."""
    if p.is_zero():
        raise PolynomialError("squarefree part of the zero polynomial")
    if p.is_constant():
        return IntPolynomial.constant(1)
    g = poly_gcd(p, p.derivative())
    q, r = qpoly_divmod(p.coeffs, g.coeffs)
    assert not r
    return _from_rational(q)


@dataclass(frozen=True)
class PolyFamily:
    """Ordered list of integer polynomials."""

    members: tuple[IntPolynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    @classmethod
    def of(cls, *items) -> "PolyFamily":
        return cls(tuple(parse_polynomial(x) if isinstance(x, str) else x for x in items))

    @property
    def tilde_members(self) -> tuple[IntPolynomial, ...]:
        return tuple(p.strip_constant() for p in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def permuted(self, perm: Sequence[int]) -> "PolyFamily":
        return PolyFamily(tuple(self.members[i] for i in perm))

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.members) + "}"


def essentially_distinct(f: PolyFamily) -> bool:
    """Every member and every pairwise difference is nonconstant."""
    ms = f.members
    if any(p.is_constant() for p in ms):
        return False
    return all(not (ms[i] - ms[j]).is_constant() for i in range(len(ms)) for j in range(i + 1, len(ms)))


def coefficient_matrix(polys: Sequence[IntPolynomial]) -> list[list[int]]:
    width = max((len(p.coeffs) for p in polys), default=0)
    return [[p.coefficient(j) for j in range(width)] for p in polys]


def linear_rank(f: PolyFamily) -> int:
    """Rank over Q of the constant-stripped members."""
    from .linalg import rank

    return rank(coefficient_matrix(f.tilde_members))
