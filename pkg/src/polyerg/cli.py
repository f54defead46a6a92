"""Command-line interface: ``polyerg <subcommand> ...``.

Exit codes: 0 success, 2 argument error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .affine import Character, UnipotentAffineMap, phase_limit, phase_polynomial
from .averages import StepFunction, compare_limit, restricted_average, weighted_average
from .boxes import BoxSet
from .classification import classify
from .config import ConfigError, RunConfig, load_config, parse_matrix, parse_vector
from .congruence import (DEFAULT_EXPONENT_CAP, DEFAULT_PRIME_BOUND, cross_check_certificate,
                         intersective_verdict, joint_verdict)
from .extremal import (EQ_I, EQ_II, THREE_AP, LinearEquation, SearchBudgetExceeded, behrend_set,
                       construct_counterexample_i, construct_counterexample_ii, max_solution_free,
                       type_estimate)
from .gallery import run_gallery
from .phases import exponential_sum
from .polynomial import PolyFamily, parse_polynomial
from .report import Report, empirical_tag, write_csv

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 3


class UsageError(ValueError):
    pass


# argument helpers ---------------------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _chars(text: str) -> list[Character]:
    """``"1,-2;0,1;-1,0"`` -> one character per member."""
    return [Character(row) for row in parse_matrix(text)]


def _intervals(text: str) -> list[tuple[Fraction, Fraction]]:
    """``"0,1/5;1/2,3/5"`` -> [(0, 1/5), (1/2, 3/5)]."""
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        a, b = part.split(",")
        out.append((Fraction(a.strip()), Fraction(b.strip())))
    return out


def _step_function(text: str) -> StepFunction:
    kind, _, arg = text.partition(":")
    if kind == "indicator":
        a, b = (Fraction(x) for x in arg.split(","))
        return StepFunction.indicator(a, b)
    if kind == "const":
        return StepFunction.constant(float(arg))
    if kind == "steps":
        # steps:v0,v1,...  equal-width bins
        vals = [float(x) for x in arg.split(",")]
        k = len(vals)
        return StepFunction(tuple(i / k for i in range(k + 1)), tuple(vals))
    raise UsageError(f"unknown weight {text!r}; use indicator:a,b | const:c | steps:v0,v1,...")


def _equation(text: str) -> LinearEquation:
    named = {"3ap": THREE_AP, "I": EQ_I, "II": EQ_II}
    if text in named:
        return named[text]
    return LinearEquation(_ints(text))


def _family(polys: Sequence[str]) -> PolyFamily:
    return PolyFamily.of(*polys)


def _map(cfg: RunConfig, args) -> UnipotentAffineMap:
    if getattr(args, "matrix", None):
        cfg.map_matrix = args.matrix
    if getattr(args, "translation", None):
        cfg.map_translation = args.translation
    return cfg.build_map()


def _checkpoints(N: int, given: Optional[str]) -> list[int]:
    if given:
        pts = sorted(set(_ints(given)))
        if pts[0] < 1 or pts[-1] > N:
            raise UsageError("checkpoints must lie in [1, N]")
        return pts if pts[-1] == N else pts + [N]
    pts, n = [], 100
    while n < N:
        pts.append(n)
        n *= 10
    return pts + [N]


# subcommands ----------------------------------------------------------------------

def cmd_classify(args, cfg):
    res = classify(_family(args.polynomials)).to_dict()
    res["provenance"] = "exact"
    return res, True, []


def cmd_congruence(args, cfg):
    if args.joint:
        v = joint_verdict(_family(args.polynomials), args.prime_bound, args.exp_cap)
        if v is None:
            raise UsageError("family has no common nonconstant factor over Q; joint verdict needs a shared root")
    else:
        if len(args.polynomials) != 1:
            raise UsageError("give one polynomial, or use --joint for a family")
        v = intersective_verdict(parse_polynomial(args.polynomials[0]), args.prime_bound, args.exp_cap)
    res = v.to_dict()
    ok, msgs = True, []
    if args.cross_check and v.certificates:
        polys = [parse_polynomial(p) for p in args.polynomials]
        cert_poly = parse_polynomial(v.certified_polynomial)
        checks = {str(q): cross_check_certificate(polys, cert_poly, c) for q, c in sorted(v.certificates.items())}
        res["cross_check"] = checks
        if not all(checks.values()):
            ok = False
            msgs.append("certificate cross-check failed")
    res["provenance"] = "exact"
    return res, ok, msgs


def _series(T, fam, chars, x0, N, points):
    P = phase_polynomial(T, fam, chars, x0)
    analytic = phase_limit(P)
    rows, acc, prev = [], 0j, 0
    for n in points:
        acc += exponential_sum(P, prev, n) if P else complex(n - prev)
        prev = n
        emp = acc / n
        rows.append({"N": n, "empirical": emp, "analytic": analytic, "abs_error": abs(emp - analytic)})
    return rows


def _limit_setup(args, cfg):
    T = _map(cfg, args)
    fam = _family(args.family)
    chars = _chars(args.chars)
    if len(chars) != len(fam):
        raise UsageError(f"need one character per family member ({len(fam)}), got {len(chars)}")
    if any(len(c.frequency) != T.dimension for c in chars):
        raise UsageError(f"characters must have {T.dimension} entries")
    x0 = parse_vector(args.x0) if args.x0 else (0,) * T.dimension
    if len(x0) != T.dimension:
        raise UsageError(f"x0 must have {T.dimension} entries")
    return T, fam, chars, x0


def cmd_simulate(args, cfg):
    T, fam, chars, x0 = _limit_setup(args, cfg)
    rows = _series(T, fam, chars, x0, args.N, _checkpoints(args.N, args.checkpoints))
    if args.csv:
        write_csv(rows, args.csv)
    res = {"map": T.to_dict(), "family": [str(p) for p in fam.members], "series": rows,
           "provenance": {"empirical": empirical_tag(args.N), "analytic": "analytic"}}
    return res, True, []


def cmd_verify_limit(args, cfg):
    T, fam, chars, x0 = _limit_setup(args, cfg)
    rows = _series(T, fam, chars, x0, args.N, _checkpoints(args.N, args.checkpoints) if args.csv else [args.N])
    if args.csv:
        write_csv(rows, args.csv)
    last = rows[-1]
    ok = last["abs_error"] < args.tolerance
    res = {"map": T.to_dict(), "family": [str(p) for p in fam.members], "N": args.N,
           "empirical": last["empirical"], "analytic": last["analytic"], "abs_error": last["abs_error"],
           "tolerance": args.tolerance, "passed": ok,
           "provenance": {"empirical": empirical_tag(args.N), "analytic": "analytic"}}
    return res, ok, [] if ok else [f"abs_error {last['abs_error']:.6g} >= tolerance {args.tolerance}"]


def cmd_restricted(args, cfg):
    T = _map(cfg, args)
    A = BoxSet.interval_union(_intervals(args.A))
    fam = _family(args.family)
    r = restricted_average(T, A, fam, parse_polynomial(args.q1), parse_polynomial(args.q2),
                           args.delta, args.N)
    mu = A.measure
    bound = float(mu) ** (len(fam) + 1) - args.epsilon
    ok = r.average is not None and r.average >= bound
    res = {"result": r.to_dict(), "mu_A": str(mu), "lower_bound": bound, "epsilon": args.epsilon,
           "passed": ok,
           "provenance": {"average": empirical_tag(args.N), "mu_A": "exact", "lower_bound": "exact"}}
    return res, ok, [] if ok else ["restricted average below mu(A)^(k+1) - epsilon"]


def cmd_weighted(args, cfg):
    T, fam, chars, x0 = _limit_setup(args, cfg)
    h = _step_function(args.h)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = weighted_average(T, fam, chars, h, parse_vector(args.beta)[0], args.N, x0)
    applicable = not r.warnings
    ok = (r.discrepancy < args.tolerance) if applicable else True
    msgs = list(r.warnings)
    if not ok:
        msgs.append(f"discrepancy {r.discrepancy:.6g} >= tolerance {args.tolerance}")
    res = {"result": r.to_dict(), "h": h.to_dict(), "tolerance": args.tolerance,
           "hypothesis_holds": applicable, "passed": ok,
           "provenance": {"weighted": empirical_tag(args.N), "unweighted": empirical_tag(args.N),
                          "integral_h": "exact"}}
    return res, ok, msgs


def cmd_extremal(args, cfg):
    eqs = [_equation(e) for e in args.equation]
    if args.mode == "behrend":
        if not all(e.equivalent(THREE_AP) for e in eqs):
            raise UsageError("behrend mode only applies to x + y = 2z (--equation 1,1,-2)")
        s = behrend_set(args.N)
    else:
        s = max_solution_free(eqs, args.N, args.mode)
    res = {"set": s.to_dict(), "provenance": "exact" if args.mode == "exact" else "exact (construction)"}
    if args.type_N:
        res["type_estimate"] = type_estimate(eqs, sorted(set(_ints(args.type_N))), args.mode).to_dict()
        res["type_estimate"]["provenance"] = "empirical fit"
    ok = s.verified or args.N > 10**4
    return res, ok, [] if ok else ["constructed set failed verification"]


def cmd_counterexample(args, cfg):
    alpha = parse_vector(args.alpha)[0]
    ns = range(1, args.n_max + 1)
    if args.construction == "i":
        N = args.N or 32
        L = max_solution_free(EQ_I, N, "exact")
        rep = construct_counterexample_i(L, alpha, args.delta, ns)
    else:
        N = args.N or 24
        L = max_solution_free([EQ_II, THREE_AP], N, "exact")
        rep = construct_counterexample_ii(L, alpha, args.delta, ns)
    res = rep.to_dict()
    res["Lambda_certified_maximum"] = L.certified_maximum
    res["provenance"] = {"Lambda": "exact", "mu_A": "exact", "bound": "exact",
                         "per_n_correlations": "exact (slice integration)"}
    return res, rep.bound_satisfied, [] if rep.bound_satisfied else ["correlation bound violated"]


def cmd_gallery(args, cfg):
    ok, res = run_gallery()
    return res, ok, list(res["mismatches"])


# parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [map], [basis], [run] sections")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall time in the provenance block")

    mapopts = argparse.ArgumentParser(add_help=False)
    mapopts.add_argument("--matrix", help='strictly lower triangular N, rows separated by ";" e.g. "0,0;2,0"')
    mapopts.add_argument("--translation", help='b, e.g. "sqrt2,sqrt2" (default: rotation by sqrt2)')

    limit = argparse.ArgumentParser(add_help=False)
    limit.add_argument("--family", nargs="+", required=True, help="polynomials in n")
    limit.add_argument("--chars", required=True, help='one integer frequency per member, e.g. "1,-2;0,1;-1,0"')
    limit.add_argument("--x0", help='starting point, e.g. "sqrt3,sqrt5" (default 0)')
    limit.add_argument("--N", type=int, default=10**6)
    limit.add_argument("--checkpoints", help="comma-separated N values for the time series")
    limit.add_argument("--csv", help="write the time series CSV here")

    p = argparse.ArgumentParser(prog="polyerg", description="Polynomial multiple-recurrence toolkit.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("classify", parents=[common], help="classify a family of 2 or 3 polynomials")
    s.add_argument("polynomials", nargs="+")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("congruence", parents=[common], help="solvability of p(n) = 0 mod m for all m")
    s.add_argument("polynomials", nargs="+")
    s.add_argument("--prime-bound", type=int, default=DEFAULT_PRIME_BOUND)
    s.add_argument("--exp-cap", type=int, default=DEFAULT_EXPONENT_CAP)
    s.add_argument("--joint", action="store_true", help="common roots of the whole family")
    s.add_argument("--cross-check", action="store_true", help="verify certificates by lifting and brute force")
    s.set_defaults(func=cmd_congruence)

    s = sub.add_parser("simulate", parents=[common, mapopts, limit], help="empirical average time series")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify-limit", parents=[common, mapopts, limit], help="empirical vs analytic limit")
    s.add_argument("--tolerance", type=float, default=0.05)
    s.set_defaults(func=cmd_verify_limit)

    s = sub.add_parser("restricted", parents=[common, mapopts], help="average over a Bohr-type return set")
    s.add_argument("--A", default="0,1/5", help='arcs "a,b;c,d" in [0,1)')
    s.add_argument("--family", nargs="+", default=["n", "2*n"])
    s.add_argument("--q1", default="n")
    s.add_argument("--q2", default="n")
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--N", type=int, default=10**7)
    s.set_defaults(func=cmd_restricted)

    s = sub.add_parser("weighted", parents=[common, mapopts], help="average weighted by h(n beta)")
    s.add_argument("--family", nargs="+", required=True)
    s.add_argument("--chars", required=True)
    s.add_argument("--x0")
    s.add_argument("--beta", default="sqrt3")
    s.add_argument("--h", default="indicator:0,1/2", help="indicator:a,b | const:c | steps:v0,v1,...")
    s.add_argument("--N", type=int, default=10**6)
    s.add_argument("--tolerance", type=float, default=0.05)
    s.set_defaults(func=cmd_weighted)

    s = sub.add_parser("extremal", parents=[common], help="largest solution-free subsets of {1..N}")
    s.add_argument("--equation", action="append", required=True,
                   help='coefficients, e.g. "1,8,-6,-3" (repeatable; also 3ap, I, II)')
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--mode", choices=["exact", "greedy", "behrend"], default="exact")
    s.add_argument("--type-N", help="comma-separated N values for an equation-type estimate")
    s.set_defaults(func=cmd_extremal)

    s = sub.add_parser("counterexample", parents=[common], help="finite bound chain for the constructions")
    s.add_argument("--construction", choices=["i", "ii"], default="i")
    s.add_argument("--N", type=int)
    s.add_argument("--alpha", default="sqrt2")
    s.add_argument("--n-max", type=int, default=100)
    s.add_argument("--delta", type=float)
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("gallery", parents=[common], help="re-run the worked examples against goldens")
    s.set_defaults(func=cmd_gallery)
    p.subparsers = sub.choices
    return p


def _apply_config_defaults(parser, argv, cfg: RunConfig) -> None:
    """[run] keys become defaults of the chosen subcommand; explicit flags still win."""
    sub = parser.subparsers.get(next((a for a in argv if not a.startswith("-")), ""), None)
    if sub is None or not cfg.params:
        return
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.params.items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ConfigError(f"[run] key {key!r} is not an option of this subcommand")
        act = actions[dest]
        if act.nargs in ("+", "*") or isinstance(act, argparse._AppendAction):
            defaults[dest] = value.split()
        elif act.type is not None and isinstance(value, str):
            defaults[dest] = act.type(value)
        elif isinstance(act, argparse._StoreTrueAction):
            defaults[dest] = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = value
        if act.required:
            act.required = False
    sub.set_defaults(**defaults)


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, Optional[Report]]:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        cfg = load_config(known.config)
        _apply_config_defaults(parser, argv, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"polyerg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    start = time.perf_counter()
    try:
        cfg.subcommand = args.subcommand
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("func", "config", "timing", "subcommand")}
        cfg.params = params
        result, ok, msgs = args.func(args, cfg)
    except (UsageError, ConfigError, SearchBudgetExceeded, ValueError) as exc:
        # includes NotEssentiallyDistinct and malformed polynomials
        print(f"polyerg {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    report = Report(args.subcommand, cfg, result, ok, msgs,
                    time.perf_counter() - start if args.timing else None)
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for m in msgs:
        print(f"polyerg {args.subcommand}: {m}", file=sys.stderr)
    return (EXIT_OK if ok else EXIT_VERIFY), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
