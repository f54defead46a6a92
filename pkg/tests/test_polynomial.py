import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from oracles import n_sym, sympy_rank, to_sympy
from polyerg.linalg import nullspace, primitive_integer_vector, rank, rref
from polyerg.polynomial import (IntPolynomial, PolyFamily, PolynomialError, compose_affine, essentially_distinct,
                                linear_rank, parse_polynomial, poly_gcd, primitive_decompose, primitive_part,
                                proportionality, squarefree_part)

P = parse_polynomial
coeff_lists = st.lists(st.integers(-9, 9), min_size=1, max_size=7)


@pytest.mark.parametrize("text,coeffs", [
    ("(n^2-13)*(n^2-17)*(n^2-221)", None),
    ("n^3 - 2*n + 7", (7, -2, 0, 1)),
    ("-(n+1)^2", (-1, -2, -1)),
    ("3", (3,)),
    ("2*n*(n-1)", (0, -2, 2)),
])
def test_parse(text, coeffs):
    p = P(text)
    expected = sympy.Poly(sympy.sympify(text.replace("^", "**"), locals={"n": n_sym}), n_sym)
    assert sympy.expand(to_sympy(p) - expected.as_expr()) == 0
    if coeffs is not None:
        assert p.coeffs == coeffs


@pytest.mark.parametrize("bad", ["", "n^", "2**n", "n^-1", "x+1", "1/2*n", "(n+1", "n^n"])
def test_parse_rejects(bad):
    with pytest.raises(PolynomialError):
        P(bad)


@pytest.mark.parametrize("p,r,s,expected", [
    ("n^2", 2, 1, "4*n^2+4*n+1"),
    ("n", 1, 0, "n"),
    ("n^2+n", 3, 0, "9*n^2+3*n"),
])
def test_compose_affine_examples(p, r, s, expected):
    assert compose_affine(P(p), r, s) == P(expected)


@settings(max_examples=150, deadline=None)
@given(coeff_lists, st.integers(1, 5), st.integers(1, 5), st.data())
def test_compose_affine_law(coeffs, r1, r2, data):
    s1 = data.draw(st.integers(0, r1 - 1))
    s2 = data.draw(st.integers(0, r2 - 1))
    p = IntPolynomial(coeffs)
    lhs = compose_affine(compose_affine(p, r1, s1), r2, s2)
    assert lhs == compose_affine(p, r1 * r2, r1 * s2 + s1)


@pytest.mark.parametrize("p,expected", [
    ("6*n^2+4*n", (1, 2, "3*n^2+2*n")),
    ("-3*n", (-1, 3, "n")),
    ("n^3", (1, 1, "n^3")),
])
def test_primitive_decompose_examples(p, expected):
    sign, content, prim = primitive_decompose(P(p))
    assert (sign, content, prim) == (expected[0], expected[1], P(expected[2]))


def test_primitive_decompose_zero():
    with pytest.raises(ValueError, match="no primitive part"):
        primitive_decompose(IntPolynomial([0]))


@settings(max_examples=200, deadline=None)
@given(coeff_lists.filter(lambda c: any(c)))
def test_primitive_roundtrip(coeffs):
    p = IntPolynomial(coeffs)
    sign, content, prim = primitive_decompose(p)
    assert sign * content * prim == p
    assert prim.leading > 0 and prim.content() == 1


@pytest.mark.parametrize("fam,expected", [
    (("n", "n+1"), False), (("n", "2*n"), True), (("n^2", "n^2+n", "n"), True), (("n", "3"), False),
])
def test_essentially_distinct(fam, expected):
    assert essentially_distinct(PolyFamily.of(*fam)) is expected


@pytest.mark.parametrize("fam,expected", [
    (("n", "n^2", "n^3"), 3), (("n", "2*n", "n^2"), 2), (("n", "2*n", "3*n"), 1),
])
def test_linear_rank_examples(fam, expected):
    assert linear_rank(PolyFamily.of(*fam)) == expected


def test_linear_rank_against_sympy_and_invariances():
    rng = random.Random(11)
    for _ in range(200):
        polys = [IntPolynomial([rng.randint(-4, 4) for _ in range(rng.randint(2, 5))]) for _ in range(3)]
        polys = [p if not p.is_zero() else P("n") for p in polys]
        f = PolyFamily(tuple(polys))
        r = linear_rank(f)
        assert r == sympy_rank([p.strip_constant() for p in polys])
        perm = rng.sample(range(3), 3)
        assert linear_rank(f.permuted(perm)) == r
        scaled = PolyFamily(tuple(c * p for c, p in zip([rng.choice([-3, -1, 2, 5]) for _ in range(3)], polys)))
        assert linear_rank(scaled) == r


def test_proportionality_and_gcd():
    assert proportionality(P("6*n^2+4*n"), P("3*n^2+2*n")) == 2
    assert proportionality(P("n"), P("2*n")) == Fraction(1, 2)
    assert proportionality(P("n"), P("n^2")) is None
    assert poly_gcd(P("n^2-1"), P("n^2+2*n+1")) == P("n+1")
    assert squarefree_part(P("(n-1)^3*(n+2)^2")) == P("(n-1)*(n+2)")
    assert primitive_part(P("-4*n^2+2")) == P("2*n^2-1")


def test_linalg_against_sympy():
    rng = random.Random(5)
    for _ in range(100):
        rows = [[rng.randint(-3, 3) for _ in range(5)] for _ in range(rng.randint(1, 5))]
        M = sympy.Matrix(rows)
        assert rank(rows) == M.rank()
        red, piv = rref(rows)
        sred, spiv = M.rref()
        assert tuple(piv) == spiv
        assert [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in sred.row(i)]
                for i in range(len(piv))] == red
        for v in nullspace(rows, 5):
            assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    assert primitive_integer_vector([Fraction(1, 2), Fraction(-1, 3), 0]) == [3, -2, 0]
