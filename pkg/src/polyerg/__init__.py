"""Exact classification, congruence certification and torus simulation for
polynomial multiple ergodic averages."""

__version__ = "0.1.0"

from .polynomial import IntPolynomial, PolyFamily, parse_polynomial  # noqa: F401
