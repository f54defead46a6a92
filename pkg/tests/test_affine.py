import random
from math import comb
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from oracles import mp_phase, symbolic_to_sympy, sympy_orbit
from polyerg.affine import (Character, UnipotentAffineMap, analytic_multiple_limit, binomial_polynomial,
                            orbit_closed_form, phase_limit, phase_polynomial, sequence_polynomial)
from polyerg.averages import empirical_multiple_average
from polyerg.phases import chunk_length, exponential_sum, phase_chunks, phases
from polyerg.polynomial import PolyFamily, parse_polynomial
from polyerg.symbolic import SymbolicReal, parse_symbolic

S = SymbolicReal
F = PolyFamily.of


# symbolic reals -------------------------------------------------------------------

def test_symbolic_arithmetic_and_parse():
    x = parse_symbolic("1/3 + 2*sqrt2")
    y = parse_symbolic("-sqrt(5) + 0.25")
    assert x.rational == Fraction(1, 3) and x.irr_coeffs == {"sqrt2": 2}
    assert y.rational == Fraction(1, 4) and y.irr_coeffs == {"sqrt5": -1}
    z = 3 * x - y
    assert z == S(Fraction(3, 4), (("sqrt2", 6), ("sqrt5", 1)))
    assert (x - x).is_zero() and not x.is_rational() and S.of(5).is_rational()
    assert abs(float(x) - (1 / 3 + 2 * 2 ** 0.5)) < 1e-15
    with mpmath.workdps(50):
        assert abs(x.to_mpf(50) - (mpmath.mpf(1) / 3 + 2 * mpmath.sqrt(2))) < mpmath.mpf(10) ** -45


def test_symbolic_rejects_unknown_basis():
    with pytest.raises((KeyError, ValueError)):
        parse_symbolic("sqrt7")


def test_fixed_point_matches_mpmath():
    x = parse_symbolic("12345*sqrt3 - 7/11")
    fp = x.fixed_point(128)
    with mpmath.workdps(60):
        ref = mpmath.floor(x.frac_mpf(60) * mpmath.mpf(2) ** 128)
    assert abs(fp - int(ref)) <= 1


# orbits ------------------------------------------------------------------------------

def test_skew_orbit_formula():
    T = UnipotentAffineMap.skew("sqrt2", 2)
    orb = orbit_closed_form(T)
    t, s = S.basis("sqrt3"), S.basis("sqrt5")
    a = S.basis("sqrt2")
    for n in range(0, 12):
        got = orb.evaluate(n, (t, s))
        assert got == (t + n * a, s + 2 * n * t + n * n * a)
        assert got == T.iterate((t, s), n)


def test_identity_map_orbit_constant():
    T = UnipotentAffineMap(((0, 0), (0, 0)), (0, 0))
    x = (S.basis("sqrt2"), S(Fraction(1, 3)))
    assert all(orbit_closed_form(T).evaluate(n, x) == x for n in range(6))


def test_standard_map_orbit_binomials():
    T = UnipotentAffineMap.standard("sqrt2", 3)
    a = S.basis("sqrt2")
    x = (S(0), S(0), S(0))
    for n in range(8):
        assert orbit_closed_form(T).evaluate(n, x) == (n * a, comb(n, 2) * a, comb(n, 3) * a)


def test_power_negative_and_composition():
    T = UnipotentAffineMap(((0, 0, 0), (2, 0, 0), (-1, 3, 0)), ("sqrt2", "1/3", "sqrt5"))
    x = (S.basis("sqrt3"), S(1), S(Fraction(2, 7)))
    U, v = T.power(-3)
    y = tuple(sum((U[i][j] * x[j] for j in range(3)), S()) + v[i] for i in range(3))
    assert T.iterate(y, 3) == x


def test_closed_form_against_sympy_matrix_powers():
    rng = random.Random(3)
    for _ in range(10):
        d = rng.randint(1, 4)
        N = tuple(tuple(rng.randint(-3, 3) if j < i else 0 for j in range(d)) for i in range(d))
        b = tuple(S(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), ((rng.choice(["sqrt2", "sqrt3"]), rng.randint(-2, 2)),))
                  for _ in range(d))
        T = UnipotentAffineMap(N, b)
        x = tuple(S(Fraction(rng.randint(-3, 3), 5), (("sqrt5", rng.randint(-1, 1)),)) for _ in range(d))
        orb = orbit_closed_form(T)
        for n in (0, 1, 5, 13):
            got = [symbolic_to_sympy(c) for c in orb.evaluate(n, x)]
            ref = sympy_orbit(T, x, n)
            assert all(sympy.simplify(g - r) == 0 for g, r in zip(got, ref))


def test_map_validation_and_flags():
    with pytest.raises(ValueError):
        UnipotentAffineMap(((1, 0), (0, 0)), (0, 0))
    with pytest.raises(ValueError):
        UnipotentAffineMap(((0, 1), (0, 0)), (0, 0))
    assert UnipotentAffineMap.skew("sqrt2").quasi_standard
    assert not UnipotentAffineMap.skew("1/2").quasi_standard
    assert not UnipotentAffineMap(((0, 0), (0, 0)), ("sqrt2", 0)).quasi_standard
    assert Character((0, 0)).trivial and not Character((0, 1)).trivial


# phase polynomials and limits ----------------------------------------------------------

def test_binomial_polynomial():
    # C(n^2, 2) = (n^4 - n^2) / 2
    assert binomial_polynomial(parse_polynomial("n^2"), 2) == (0, 0, Fraction(-1, 2), 0, Fraction(1, 2))


@pytest.mark.parametrize("P,expected", [
    ([S(0), S(0), S.basis("sqrt2")], 0),
    ([S(0), S(Fraction(1, 2))], 0),
    ([S(Fraction(1, 3))], complex(np.exp(2j * np.pi / 3))),
    ([S(0), S(Fraction(1, 3)), S(Fraction(1, 3))], None),
])
def test_phase_limit_examples(P, expected):
    got = phase_limit(P)
    if expected is None:
        # exact period-3 average of e((n + n^2)/3): n mod 3 -> 0, 2/3, 2 -> phases 0, 2/3, 0
        expected = (1 + np.exp(2j * np.pi * 2 / 3) + 1) / 3
    assert abs(got - expected) < 1e-12


def test_phase_limit_rational_periodic_brute_force():
    rng = random.Random(8)
    for _ in range(30):
        D = rng.randint(1, 24)
        P = [S(Fraction(rng.randint(0, D - 1), D)) for _ in range(rng.randint(1, 4))]
        P[0] = S(Fraction(rng.randint(0, 9), 10))
        brute = sum(np.exp(2j * np.pi * float(sum((c.rational * n ** j for j, c in enumerate(P)), Fraction(0)) % 1))
                    for n in range(D)) / D
        assert abs(phase_limit(P) - brute) < 1e-12


def test_rotation_limit_zero_and_trivial_one():
    T = UnipotentAffineMap.rotation("sqrt2")
    f = F("n", "n^2", "n^3")
    chars = [Character((1,))] * 3
    assert analytic_multiple_limit(T, f, chars, [S.basis("sqrt3")]) == 0
    triv = [Character((0,))] * 3
    assert analytic_multiple_limit(T, f, triv, [0]) == 1
    assert empirical_multiple_average(T, f, triv, [0], 0, 1000) == 1
    emp = empirical_multiple_average(T, f, chars, [0], 0, 10**5)
    assert abs(emp) < 0.03


def test_skew_symbolic_cancellation():
    T = UnipotentAffineMap.skew("sqrt2", 2)
    f = F("n", "2*n", "2*n^2+n")
    x = (S.basis("sqrt3"), S.basis("sqrt5"))
    # these characters leave only an irrational n-coefficient: limit 0
    P = phase_polynomial(T, f, [Character((0, 1)), Character((0, 1)), Character((0, -1))], x)
    assert any(c.is_irrational() for c in P[1:])
    assert phase_limit(P) == 0
    # these cancel every nonconstant coefficient: limit e(constant)
    P = phase_polynomial(T, f, [Character((1, -2)), Character((0, 1)), Character((-1, 0))], x)
    assert all(c.is_zero() for c in P[1:])
    assert abs(phase_limit(P) - np.exp(2j * np.pi * float(P[0].frac_mpf()))) < 1e-12


def test_single_term_average():
    T = UnipotentAffineMap.rotation("sqrt2")
    chars = [Character((1,)), Character((2,))]
    f = F("n", "n^2")
    n = 7
    direct = np.exp(2j * np.pi * (float(np.sqrt(2)) * n + 2 * float(np.sqrt(2)) * n * n))
    assert abs(empirical_multiple_average(T, f, chars, [0], n, n + 1) - direct) < 1e-9


# phase engine ---------------------------------------------------------------------------

def test_phase_engine_against_mpmath():
    P = [parse_symbolic(t) for t in ("1/7", "sqrt2", "-3*sqrt3", "5/11", "sqrt5", "2/3", "1/9*sqrt2")]
    M, N = 10**6 - 50, 10**6 + 50
    raw = np.concatenate([ph for _, ph in phase_chunks(P, M, N, chunk=37)])
    got = phases(P, M, N)
    with mpmath.workdps(80):
        for n in range(M, N):
            ref = mp_phase(P, n, 80)
            # each of the deg+1 product terms keeps only its top word, so the 64-bit
            # phase may sit up to deg+1 units below floor(2^64 * frac)
            diff = abs(int(raw[n - M]) - int(mpmath.floor(ref * mpmath.mpf(2) ** 64)))
            assert min(diff, 2**64 - diff) <= len(P) + 1
            err = abs(float(ref) - got[n - M])
            assert min(err, 1 - err) < 1e-9


def test_weyl_sum_small():
    P = [S(0), S(0), S.basis("sqrt2")]
    assert abs(exponential_sum(P, 0, 10**6)) / 10**6 < 0.01


def test_chunking_does_not_change_result():
    P = [parse_symbolic(t) for t in ("0", "sqrt3", "1/5", "sqrt2")]
    a = exponential_sum(P, 0, 50_000)
    b = sum(exponential_sum(P, lo, lo + 7_919) for lo in range(0, 50_000, 7_919) if lo + 7_919 <= 50_000)
    b += exponential_sum(P, (50_000 // 7_919) * 7_919, 50_000)
    assert abs(a - b) < 1e-8
    assert abs(exponential_sum(P, 0, 50_000, workers=3) - a) < 1e-9
    assert chunk_length(1) >= chunk_length(6) >= chunk_length(12) > 0


def test_sequence_polynomial_composition():
    beta = S.basis("sqrt2")
    P = sequence_polynomial([0, beta], parse_polynomial("n^2+3"))
    assert P == [3 * beta, S(0), beta]
