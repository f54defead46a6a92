"""Exact reals of the form r0 + r1*a1 + ... + rk*ak.

The a_i are named irrationals from a registry; they are *asserted* (not
checked) to be linearly independent over Q together with 1.  Arithmetic is
exact in Fractions; decimals are produced on demand with mpmath.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath

DEFAULT_BASIS = {"sqrt2": "sqrt(2)", "sqrt3": "sqrt(3)", "sqrt5": "sqrt(5)"}
_BASIS: dict[str, str] = dict(DEFAULT_BASIS)
_CACHE: dict[tuple[str, int], mpmath.mpf] = {}

DECIMAL_DIGITS = 50


def register_basis(name: str, expression: str) -> None:
    """Declare a new irrational, e.g. ``register_basis("pi", "pi")``.

    ``expression`` is evaluated by mpmath (``mpmath.<name>`` functions and
    constants are available).  Redefining an existing name is an error unless
    the expression is unchanged.
    """
    if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
        raise ValueError(f"invalid basis name {name!r}")
    if name in _BASIS and _BASIS[name] != expression:
        raise ValueError(f"basis element {name!r} already defined as {_BASIS[name]!r}")
    try:
        value = _evaluate_expression(expression, 30)  # fail early on bad input
    except Exception as exc:
        raise ValueError(f"cannot evaluate basis element {name} = {expression!r}: {exc}") from None
    if not isinstance(value, mpmath.mpf):
        raise ValueError(f"basis element {name} = {expression!r} is not a real number")
    _BASIS[name] = expression


def reset_basis(basis: Mapping[str, str] | None = None) -> None:
    _BASIS.clear()
    _BASIS.update(DEFAULT_BASIS if basis is None else basis)
    _CACHE.clear()


def basis_names() -> list[str]:
    return sorted(_BASIS)


def basis_expressions() -> dict[str, str]:
    return dict(sorted(_BASIS.items()))


def _evaluate_expression(expr: str, dps: int):
    namespace = {k: getattr(mpmath, k) for k in dir(mpmath) if not k.startswith("_")}
    with mpmath.workdps(dps):
        return +eval(expr, {"__builtins__": {}}, namespace)  # noqa: S307 - registry values only


def basis_value(name: str, dps: int = DECIMAL_DIGITS + 10):
    if name not in _BASIS:
        raise KeyError(f"unknown irrational basis element {name!r}")
    key = (name, dps)
    if key not in _CACHE:
        _CACHE[key] = _evaluate_expression(_BASIS[name], dps)
    return _CACHE[key]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    return Fraction(x)


@dataclass(frozen=True)
class SymbolicReal:
    rational: Fraction = Fraction(0)
    irr: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rational", _frac(self.rational))
        merged: dict[str, Fraction] = {}
        for name, c in self.irr:
            merged[name] = merged.get(name, Fraction(0)) + _frac(c)
        object.__setattr__(self, "irr", tuple(sorted((k, v) for k, v in merged.items() if v != 0)))

    # constructors
    @classmethod
    def of(cls, x) -> "SymbolicReal":
        if isinstance(x, SymbolicReal):
            return x
        if isinstance(x, str):
            return parse_symbolic(x)
        return cls(_frac(x))

    @classmethod
    def basis(cls, name: str, coeff=1) -> "SymbolicReal":
        if name not in _BASIS:
            raise KeyError(f"unknown irrational basis element {name!r}")
        return cls(Fraction(0), ((name, _frac(coeff)),))

    # queries
    @property
    def irr_coeffs(self) -> dict[str, Fraction]:
        return dict(self.irr)

    def is_irrational(self) -> bool:
        return bool(self.irr)

    def is_rational(self) -> bool:
        return not self.irr

    def is_zero(self) -> bool:
        return self.rational == 0 and not self.irr

    # arithmetic
    def __add__(self, other):
        o = SymbolicReal.of(other)
        return SymbolicReal(self.rational + o.rational, self.irr + o.irr)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicReal(-self.rational, tuple((k, -v) for k, v in self.irr))

    def __sub__(self, other):
        return self + (-SymbolicReal.of(other))

    def __rsub__(self, other):
        return SymbolicReal.of(other) - self

    def __mul__(self, other):
        o = SymbolicReal.of(other)
        if o.is_rational():
            c = o.rational
            return SymbolicReal(self.rational * c, tuple((k, v * c) for k, v in self.irr))
        if self.is_rational():
            return o * self
        raise ArithmeticError("product of two irrational SymbolicReals is outside the basis span")

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = SymbolicReal.of(other)
        if not o.is_rational() or o.rational == 0:
            raise ArithmeticError("division only by nonzero rationals")
        return self * (1 / o.rational)

    def frac_rational(self) -> "SymbolicReal":
        """Same value mod 1: rational part reduced to [0, 1)."""
        r = self.rational - math.floor(self.rational)
        return SymbolicReal(r, self.irr)

    # numerics
    def to_mpf(self, dps: int = DECIMAL_DIGITS + 10):
        """High-precision value; ``dps`` is increased automatically for huge coefficients."""
        size = max([_digits(self.rational)] + [_digits(v) for _, v in self.irr])
        work = dps + size
        with mpmath.workdps(work):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for name, c in self.irr:
                total += mpmath.mpf(c.numerator) / c.denominator * basis_value(name, work)
            return +total

    def frac_mpf(self, dps: int = DECIMAL_DIGITS + 10):
        """Fractional part in [0, 1) at ``dps`` significant digits after reduction."""
        red = self.frac_rational()
        size = max([0] + [_digits(v) for _, v in red.irr])
        with mpmath.workdps(dps + size):
            x = red.to_mpf(dps)
            return x - mpmath.floor(x)

    def fixed_point(self, bits: int = 128) -> int:
        """floor(2^bits * frac(self)), computed with ample guard digits."""
        dps = int(bits * 0.30103) + 20
        size = max([0] + [_digits(v) for _, v in self.irr])
        with mpmath.workdps(dps + size):
            f = self.frac_mpf(dps)
            v = int(mpmath.floor(f * mpmath.mpf(2) ** bits))
        return v % (1 << bits)

    def __float__(self) -> float:
        return float(self.to_mpf(30))

    def decimal(self, digits: int = DECIMAL_DIGITS) -> str:
        return mpmath.nstr(self.to_mpf(digits + 10), digits)

    def __str__(self) -> str:
        parts = []
        if self.rational != 0 or not self.irr:
            parts.append(str(self.rational))
        for name, c in self.irr:
            if c == 1:
                term = name
            elif c == -1:
                term = f"-{name}"
            else:
                term = f"{c}*{name}"
            parts.append(term)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def to_dict(self) -> dict:
        return {"rational": str(self.rational), "irr": {k: str(v) for k, v in self.irr}}


def _digits(x: Fraction) -> int:
    return max(len(str(abs(x.numerator))), len(str(x.denominator)))


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d*\.\d+|\d+(?:/\d+)?)\s*\*?\s*)?
        (?P<name>[A-Za-z_][A-Za-z_0-9]*(?:\(\d+\))?)?\s*""",
    re.VERBOSE,
)


def _normalize_name(name: str) -> str:
    m = re.fullmatch(r"sqrt\((\d+)\)", name)
    return f"sqrt{m.group(1)}" if m else name


def parse_symbolic(text: str) -> SymbolicReal:
    """Parse e.g. ``"1/3 + 2*sqrt2"``, ``"-sqrt(5)"``, ``"0.25"``.

    ``sqrt(k)`` is accepted as a spelling of basis element ``sqrtk``.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    pos, total, first = 0, SymbolicReal(), True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (not m.group("num") and not m.group("name")):
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        if not first and not m.group("sign"):
            raise ValueError(f"missing operator in {text!r} at position {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        coeff = Fraction(m.group("num")) if m.group("num") else Fraction(1)
        if m.group("name"):
            total = total + SymbolicReal.basis(_normalize_name(m.group("name")), sign * coeff)
        else:
            total = total + sign * coeff
        pos, first = m.end(), False
    return total


def to_symbolic_vector(xs: Iterable) -> tuple[SymbolicReal, ...]:
    return tuple(SymbolicReal.of(x) for x in xs)


__all__ = [
    "DEFAULT_BASIS", "SymbolicReal", "basis_expressions", "basis_names", "basis_value",
    "parse_symbolic", "register_basis", "reset_basis", "to_symbolic_vector",
]
