"""Solvability of p(n) = 0 mod m for every m, prime by prime.

By the Chinese remainder theorem it suffices to look at prime powers.  For a
prime q we enumerate roots modulo q, q^2, ... by lifting; either the root set
dies out (an explicit unsolvable modulus) or some root n0 satisfies the
Newton-Hensel condition v(f(n0)) > 2 v(f'(n0)), which guarantees a q-adic
root and hence roots modulo every power of q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sympy import isprime, primerange

from .polynomial import IntPolynomial, PolyFamily, poly_gcd, squarefree_part

DEFAULT_PRIME_BOUND = 100
DEFAULT_EXPONENT_CAP = 12
ROOT_LIMIT = 200_000      # give up (Inconclusive) if a lifted root set grows past this
CROSS_CHECK_EXPONENT = 10
BRUTE_FORCE_LIMIT = 10**6

CERTIFIED = "CertifiedSolvable"
WITNESS = "UnsolvableWitness"
INCONCLUSIVE = "InconclusiveUpTo"


def valuation(x: int, q: int) -> Optional[int]:
    """q-adic valuation; None stands for +infinity (x == 0)."""
    if x == 0:
        return None
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v


def roots_mod(p: IntPolynomial, m: int) -> set[int]:
    """All n in [0, m) with p(n) = 0 mod m, by exhaustive evaluation."""
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m < 2**31:
        xs = np.arange(m, dtype=np.int64)
        acc = np.zeros(m, dtype=np.int64)
        for c in reversed(p.coeffs):
            acc = (acc * xs + (c % m)) % m
        return set(np.nonzero(acc == 0)[0].tolist())
    return {n for n in range(m) if p.eval_mod(n, m) == 0}


def joint_roots_mod(polys: Sequence[IntPolynomial], m: int) -> set[int]:
    out = roots_mod(polys[0], m)
    for p in polys[1:]:
        out &= roots_mod(p, m)
    return out


@dataclass(frozen=True)
class HenselCertificate:
    prime: int
    base_root: int
    valuation_f: Optional[int]   # None = infinity (exact root)
    valuation_df: Optional[int]
    lifts_forever: bool
    polynomial: str = ""
    found_at_exponent: int = 1

    def __post_init__(self):
        if self.lifts_forever != hensel_condition(self.valuation_f, self.valuation_df):
            raise ValueError("lifts_forever must equal the Newton-Hensel condition")

    def to_dict(self) -> dict:
        inf = lambda v: "inf" if v is None else v  # noqa: E731
        return {
            "prime": self.prime,
            "base_root": self.base_root,
            "valuation_f": inf(self.valuation_f),
            "valuation_df": inf(self.valuation_df),
            "lifts_forever": self.lifts_forever,
            "polynomial": self.polynomial,
            "found_at_exponent": self.found_at_exponent,
        }


def hensel_condition(vf: Optional[int], vdf: Optional[int]) -> bool:
    if vf is None:
        return True
    if vdf is None:
        return False
    return vf > 2 * vdf


@dataclass(frozen=True)
class PrimeOutcome:
    """Result of scanning one prime: exactly one of the three fields is meaningful."""

    prime: int
    certificate: Optional[HenselCertificate] = None
    witness_modulus: Optional[int] = None
    reached_exponent: int = 0

    @property
    def status(self) -> str:
        if self.certificate is not None:
            return CERTIFIED
        if self.witness_modulus is not None:
            return WITNESS
        return INCONCLUSIVE


def _try_certificate(g: IntPolynomial, dg: IntPolynomial, n0: int, q: int, e: int):
    vf = valuation(g(n0), q)
    vdf = valuation(dg(n0), q)
    if hensel_condition(vf, vdf):
        return HenselCertificate(q, n0, vf, vdf, True, str(g), e)
    return None


def _scan_prime(root_polys: Sequence[IntPolynomial], cert_poly: Optional[IntPolynomial],
                q: int, exponent_cap: int) -> PrimeOutcome:
    """Lift common roots of ``root_polys`` and look for a certificate for ``cert_poly``.

    ``cert_poly`` must divide every root polynomial over Q, so a q-adic root of
    it is a common q-adic root of all of them.
    """
    if exponent_cap < 1:
        raise ValueError("exponent cap must be at least 1")
    dg = cert_poly.derivative() if cert_poly is not None else None
    roots = sorted(joint_roots_mod(root_polys, q))
    modulus = q
    for e in range(1, exponent_cap + 1):
        if e > 1:
            prev = modulus
            modulus *= q
            roots = [r + t * prev for r in roots for t in range(q)
                     if all(p.eval_mod(r + t * prev, modulus) == 0 for p in root_polys)]
            roots.sort()
        if not roots:
            return PrimeOutcome(q, witness_modulus=modulus, reached_exponent=e)
        if cert_poly is not None:
            for n0 in roots:
                cert = _try_certificate(cert_poly, dg, n0, q, e)
                if cert is not None:
                    return PrimeOutcome(q, certificate=cert, reached_exponent=e)
        if len(roots) * q > ROOT_LIMIT:
            return PrimeOutcome(q, reached_exponent=e)
    return PrimeOutcome(q, reached_exponent=exponent_cap)


def certify_prime(p: IntPolynomial, q: int, exponent_cap: int = DEFAULT_EXPONENT_CAP):
    """HenselCertificate, witness modulus (int) or None for inconclusive."""
    if not isprime(q):
        raise ValueError(f"{q} is not prime")
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere; nothing to certify")
    out = _scan_prime([p], p, q, exponent_cap)
    if out.certificate is not None:
        return out.certificate
    return out.witness_modulus


# lifting a certificate to an explicit root ------------------------------------

def hensel_lift(g: IntPolynomial, cert: HenselCertificate, exponent: int) -> int:
    """A root of g modulo q^exponent congruent to the certificate's base root
    modulo q^(v_f - v_df) (Newton iteration)."""
    q, x = cert.prime, cert.base_root
    if cert.valuation_f is None:
        return x % q**exponent
    dg = g.derivative()
    v = cert.valuation_df
    mod = q ** (exponent + v + 1)
    for _ in range(4 * exponent + 64):
        fx = g(x)
        if fx % q**exponent == 0:
            return x % q**exponent
        d = dg(x)
        unit = (d // q**v) % mod
        t = (fx // q**v) * pow(unit, -1, mod) % mod
        x = (x - t) % mod
    raise RuntimeError("Newton iteration did not converge; certificate invalid")


def cross_check_certificate(root_polys: Sequence[IntPolynomial], cert_poly: IntPolynomial,
                            cert: HenselCertificate, max_exponent: int = CROSS_CHECK_EXPONENT) -> bool:
    """Check that root sets modulo q^e are nonempty for e <= max_exponent.

    An explicit root modulo q^max_exponent is produced by Newton lifting and
    substituted into every polynomial; moduli up to ``BRUTE_FORCE_LIMIT`` are
    additionally confirmed by exhaustive search.
    """
    q = cert.prime
    for extra in range(0, 60, 10):
        x = hensel_lift(cert_poly, cert, max_exponent + extra)
        if all(p.eval_mod(x, q**max_exponent) == 0 for p in root_polys):
            break
    else:
        return False
    for e in range(1, max_exponent + 1):
        if q**e > BRUTE_FORCE_LIMIT:
            break
        if not joint_roots_mod(root_polys, q**e):
            return False
    return True


# verdicts -----------------------------------------------------------------

@dataclass
class CongruenceVerdict:
    status: str
    witness_modulus: Optional[int] = None
    certificates: dict = field(default_factory=dict)
    checked_prime_bound: int = DEFAULT_PRIME_BOUND
    checked_exponent_cap: int = DEFAULT_EXPONENT_CAP
    inconclusive_primes: list = field(default_factory=list)
    certified_polynomial: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness_modulus": self.witness_modulus,
            "certificates": {str(q): c.to_dict() for q, c in sorted(self.certificates.items())},
            "checked_prime_bound": self.checked_prime_bound,
            "checked_exponent_cap": self.checked_exponent_cap,
            "inconclusive_primes": list(self.inconclusive_primes),
            "certified_polynomial": self.certified_polynomial,
            "scope": f"all powers of primes <= {self.checked_prime_bound}",
        }


def _verdict(root_polys, cert_poly, prime_bound, exponent_cap) -> CongruenceVerdict:
    certs, pending = {}, []
    for q in primerange(2, prime_bound + 1):
        q = int(q)
        out = _scan_prime(root_polys, cert_poly, q, exponent_cap)
        if out.status == WITNESS:
            return CongruenceVerdict(WITNESS, out.witness_modulus, certs, prime_bound, exponent_cap,
                                     pending, str(cert_poly) if cert_poly is not None else None)
        if out.status == CERTIFIED:
            certs[q] = out.certificate
        else:
            pending.append(q)
    status = INCONCLUSIVE if pending else CERTIFIED
    return CongruenceVerdict(status, None, certs, prime_bound, exponent_cap, pending,
                             str(cert_poly) if cert_poly is not None else None)


def intersective_verdict(p: IntPolynomial, prime_bound: int = DEFAULT_PRIME_BOUND,
                         exponent_cap: int = DEFAULT_EXPONENT_CAP) -> CongruenceVerdict:
    """Is p(n) = 0 mod q^e solvable for every prime q <= prime_bound and every e?

    Certificates are issued for the squarefree part of p, whose q-adic roots
    are roots of p; the root enumeration (and hence any witness) uses p itself.
    """
    if p.is_constant():
        raise ValueError("intersectivity needs a nonconstant polynomial")
    return _verdict([p], squarefree_part(p), prime_bound, exponent_cap)


def joint_verdict(f: PolyFamily, prime_bound: int = DEFAULT_PRIME_BOUND,
                  exponent_cap: int = DEFAULT_EXPONENT_CAP) -> CongruenceVerdict:
    """Simultaneous version for a family: a common n0 must work for all members.

    A common q-adic root is a root of the rational gcd, so certificates are
    issued for the squarefree part of the gcd; when the gcd is constant no
    certificate exists and the scan can only produce witnesses.
    """
    members = list(f.members)
    if any(p.is_constant() for p in members):
        raise ValueError("joint congruence needs nonconstant polynomials")
    g = poly_gcd(*members)
    cert = None if g.is_constant() else squarefree_part(g)
    return _verdict(members, cert, prime_bound, exponent_cap)
