"""Regression goldens: the standard worked examples, re-run and diffed."""

from __future__ import annotations

from .affine import Character, UnipotentAffineMap
from .averages import compare_limit
from .classification import classify
from .congruence import CERTIFIED, WITNESS, intersective_verdict
from .polynomial import PolyFamily, parse_polynomial

# (label, family, expected fields of the classification)
CLASSIFICATION_GOLDENS = [
    ("a", ("n", "n^2", "n^3"), {"smallest_factor": "KRat", "weyl_complexity": 1}),
    ("b", ("n", "n^2", "n^2+n"), {"smallest_factor": "Kronecker", "weyl_complexity": 2}),
    ("c", ("n", "2*n", "n^3"), {"smallest_factor": "Kronecker", "weyl_complexity": 2}),
    ("d", ("n", "2*n", "n^2"), {"smallest_factor": "Affine2", "weyl_complexity": 3,
                                "family_type": "E2", "lower_bound_exceptional": True}),
    ("e1", ("n", "2*n", "3*n"), {"smallest_factor": "Nil2", "weyl_complexity": 3,
                                 "family_type": "E1", "lower_bound_exceptional": False}),
    ("e2", ("n^2", "2*n^2", "3*n^2"), {"smallest_factor": "Nil2", "weyl_complexity": 3,
                                       "family_type": "E1"}),
]

CONGRUENCE_GOLDENS = [
    ("(n^2-13)*(n^2-17)*(n^2-221)", {"status": CERTIFIED}),
    ("(n^3-19)*(n^2+n+1)", {"status": CERTIFIED}),
    ("n^2-2", {"status": WITNESS, "witness_modulus": 4}),
]

LIMIT_N = 10**6
LIMIT_TOLERANCE = 0.02


def _diff(label: str, got: dict, expected: dict) -> list[str]:
    return [f"{label}: {k} = {got.get(k)!r}, expected {v!r}" for k, v in expected.items() if got.get(k) != v]


def run_gallery() -> tuple[bool, dict]:
    rows, mismatches = [], []
    for label, fam, expected in CLASSIFICATION_GOLDENS:
        got = classify(PolyFamily.of(*fam)).to_dict()
        bad = _diff(f"classify {label}", got, expected)
        mismatches += bad
        rows.append({"case": label, "family": list(fam), "result": {k: got[k] for k in expected},
                     "expected": expected, "match": not bad, "provenance": "exact"})
    cong = []
    for text, expected in CONGRUENCE_GOLDENS:
        got = intersective_verdict(parse_polynomial(text)).to_dict()
        bad = _diff(f"congruence {text}", got, expected)
        mismatches += bad
        cong.append({"polynomial": text, "status": got["status"], "witness_modulus": got["witness_modulus"],
                     "expected": expected, "match": not bad, "provenance": "exact"})
    T = UnipotentAffineMap.rotation("sqrt2")
    chars = [Character((1,))] * 3
    cmp = compare_limit(T, PolyFamily.of("n", "n^2", "n^3"), chars, [0], LIMIT_N)
    ok = cmp["abs_error"] < LIMIT_TOLERANCE
    if not ok:
        mismatches.append(f"rotation limit: abs_error {cmp['abs_error']:.3g} >= {LIMIT_TOLERANCE}")
    limit = {"system": "rotation by sqrt2", "family": ["n", "n^2", "n^3"], "characters": [[1]] * 3,
             "N": LIMIT_N, "empirical": cmp["empirical"], "analytic": cmp["analytic"],
             "abs_error": cmp["abs_error"], "tolerance": LIMIT_TOLERANCE, "match": ok,
             "provenance": {"empirical": f"empirical({LIMIT_N}, deterministic)", "analytic": "analytic"}}
    return not mismatches, {"classification": rows, "congruence": cong, "limit": limit, "mismatches": mismatches}
