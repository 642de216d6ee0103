"""Command-line front end.

Every command prints JSON lines (or CSV where a table makes sense) to
stdout.  Exit codes: 0 success, 1 verification failure, 2 usage or domain
error.  Output never contains timings, so identical invocations produce
identical bytes regardless of ``--threads``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Iterable, List, Optional, Sequence

import gmpy2

from . import profiles, trees, verify
from .asymptotics import bessel, saddle, thresholds
from .asymptotics.hp import check_precision, default_precision, fmt, working
from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n")


def _emit_csv(header: Sequence[str], rows: Iterable[Sequence], out) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    out.write(buf.getvalue())


def _precision(args) -> int:
    return check_precision(args.precision if args.precision is not None else default_precision())


def _log10(x) -> str:
    return fmt(x / gmpy2.log(gmpy2.mpfr(10)), 20)


def _positive(name: str, value, minimum: int = 1) -> None:
    if value is not None and value < minimum:
        raise DomainError(f"--{name} must be >= {minimum}, got {value}")


# exact

def cmd_exact(args, out) -> int:
    if args.k is None:
        raise UsageError("exact needs --k")
    _positive("k", args.k)
    _positive("d", args.d)
    k, cap = args.k, args.d
    if args.n is not None:
        # validate before any heavy work
        if args.n <= 2 * k:
            raise DomainError(f"n must exceed 2k (got n={args.n}, k={k})")
    table = []
    if not args.no_table:
        for p in profiles.enumerate_profiles(k, cap):
            table.append((list(p.counts), profiles.count_trees_with_profile(p)))
    N = profiles.twin_profile_count_direct(k, cap, workers=args.threads)
    N_series = profiles.twin_profile_count_series(k, cap)
    summary = {"op": "exact", "k": k, "cap": cap,
               "profiles": str(profiles.count_profiles(k, cap)),
               "N": str(N), "N_series": str(N_series), "routes_agree": N == N_series}
    if args.n is not None:
        n = args.n
        S = profiles.host_pair_count(n, k, cap)
        total = n ** (n - 1)
        m = profiles.expected_twin_pairs(n, k, cap)
        summary.update({"n": n, "S": str(S), "rooted_trees": str(total),
                        "m": profiles.format_exact(m), "m_unreduced": f"{S}/{total}",
                        "m_decimal": repr(float(m))})
    if args.format == "csv":
        rows = [("M", json.dumps(prof, separators=(",", ":")), str(M)) for prof, M in table]
        rows += [("summary", key, value if isinstance(value, str) else json.dumps(value))
                 for key, value in summary.items() if key != "op"]
        _emit_csv(("record", "key", "value"), rows, out)
    else:
        for prof, M in table:
            _emit({"op": "exact", "record": "profile", "k": k, "profile": prof, "M": str(M)}, out)
        _emit({"record": "summary", **summary}, out)
    return EXIT_OK if N == N_series else EXIT_FAIL


# verify

def _parse_ks(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def cmd_verify(args, out) -> int:
    opts = {"precision": _precision(args), "threads": args.threads}
    if args.kmax is not None:
        _positive("kmax", args.kmax)
        opts["kmax"] = args.kmax
    if args.nmax is not None:
        _positive("nmax", args.nmax)
        if args.nmax > trees.BRUTE_FORCE_MAX_N:
            raise DomainError(f"--nmax is limited to {trees.BRUTE_FORCE_MAX_N} (brute force)")
        opts["nmax"] = args.nmax
    if args.trials is not None:
        _positive("trials", args.trials, 2)
        opts["trials"] = args.trials
    if args.seed is not None:
        opts["seed"] = args.seed
    if args.points is not None:
        _positive("points", args.points, 4)
        opts["points"] = opts["real_points"] = args.points
    ks = _parse_ks(args.k)
    if args.suite == "saddle":
        if args.tol is not None:
            if not 0 < args.tol < 1:
                raise DomainError("--tol must lie in (0, 1)")
            opts["tol"] = args.tol
        if ks is not None:
            for k in ks:
                if k < 2:
                    raise DomainError(f"saddle needs k >= 2, got {k}")
            opts["ks"] = ks
            opts["capped"] = [(k, args.d) for k in ks] if args.d is not None else []
    elif ks is not None:
        raise UsageError("--k applies to the saddle suite only")
    if args.suite == "montecarlo" and args.n is not None:
        opts["cases"] = [(args.n, args.mc_k or 1)]
    if args.suite == "bounds" and args.d is not None:
        opts["caps"] = (args.d,)
    if args.suite == "routes" and args.d is not None:
        opts["caps"] = (args.d,)

    failed = None
    checks = 0
    for check in verify.SUITES[args.suite](**opts):
        checks += 1
        record = check.to_dict()
        _emit(record, out)
        if not check.passed and failed is None:
            failed = record
            if args.fail_fast:
                break
    summary = {"suite": args.suite, "record": "summary", "checks": checks, "pass": failed is None}
    if failed is not None:
        summary["counterexample"] = failed
    _emit(summary, out)
    return EXIT_OK if failed is None else EXIT_FAIL


# thresholds

def cmd_thresholds(args, out) -> int:
    prec = _precision(args)
    if not 0 < args.delta < 2:
        raise DomainError("delta must lie in (0, 2)")
    rows = []
    for n in args.n:
        if n < 3:
            raise DomainError(f"thresholds need n >= 3, got {n}")
    for n in args.n:
        K = thresholds.threshold_upper(n, args.delta, prec, args.log_base)
        k_lo = thresholds.threshold_lower(n, args.delta, prec, args.log_base)
        a = b = None
        if K >= 16:
            a = fmt(thresholds.part_a_envelope_log(n, K, args.eps2, prec, args.log_base))
        if k_lo >= 16:
            b = fmt(thresholds.part_b_estimate_log(n, k_lo, prec, args.log_base))
        rows.append((n, args.delta, K, k_lo, a, b))
    header = ("n", "delta", "K_n", "k_n", "part_a_envelope_log", "part_b_estimate_log")
    if args.format == "csv":
        _emit_csv(header, [(str(n), repr(d), str(K), str(k), a, b) for n, d, K, k, a, b in rows], out)
        return EXIT_OK
    for n, d, K, k, a, b in rows:
        _emit({"op": "thresholds",
               "inputs": {"n": str(n), "delta": d, "eps2": args.eps2, "log_base": args.log_base},
               "precision_bits": prec, "K_n": str(K), "k_n": str(k),
               "part_a_envelope_log": a, "part_b_estimate_log": b,
               "tolerance_flags": [thresholds.ENVELOPE_NOTE]}, out)
    return EXIT_OK


# bound and integral

def cmd_bound(args, out) -> int:
    prec = _precision(args)
    if args.k is None:
        raise UsageError("bound needs --k")
    _positive("k", args.k, 2)
    _positive("d", args.d)
    value = saddle.chernoff_bound_logN(args.k, args.d, refine=args.refine, form=args.form, prec=prec)
    flags = ["upper bound on log N(k)"]
    result = {"op": "bound",
              "inputs": {"k": args.k, "cap": args.d, "refine": args.refine, "form": args.form},
              "precision_bits": prec, "value": fmt(value, 20)}
    with working(prec):
        result["value_log10"] = _log10(value)
        if args.exact:
            exact = saddle.log_exact(profiles.twin_profile_count_series(args.k, args.d))
            result["exact_log_N"] = fmt(exact, 20)
            result["dominates"] = bool(value >= exact)
            if not result["dominates"]:
                flags.append("bound below exact value")
    result["tolerance_flags"] = flags
    _emit(result, out)
    return EXIT_OK if result.get("dominates", True) else EXIT_FAIL


def cmd_integral(args, out) -> int:
    prec = _precision(args)
    if args.k is None:
        raise UsageError("integral needs --k")
    _positive("k", args.k, 2)
    _positive("d", args.d)
    spec = saddle.QuadratureSpec(nodes_per_axis=args.nodes, precision_bits=prec,
                                 relative_tolerance=args.tol if args.tol is not None else 1e-12,
                                 max_nodes_per_axis=args.max_nodes)
    res = saddle.saddle_integral(args.k, args.d, spec)
    flags = []
    if res.imag_ratio > 1e-10:
        flags.append("imaginary part above 1e-10")
    result = {"op": "integral",
              "inputs": {"k": args.k, "cap": args.d, "nodes": args.nodes,
                         "tol": spec.relative_tolerance},
              "precision_bits": prec, "value": fmt(res.log_value, 20)}
    with working(prec):
        result["value_log10"] = _log10(res.log_value)
        result["nodes_per_axis"] = res.nodes_per_axis
        result["imag_ratio"] = fmt(res.imag_ratio, 5)
        if args.exact:
            exact = saddle.log_exact(profiles.twin_profile_count_series(args.k, args.d))
            result["exact_log_N"] = fmt(exact, 20)
            result["relative_error"] = fmt(abs(res.log_value - exact) / abs(exact), 5)
    result["tolerance_flags"] = flags
    _emit(result, out)
    return EXIT_OK if not flags else EXIT_FAIL


# sample

def cmd_sample(args, out) -> int:
    if args.n is None:
        raise UsageError("sample needs --n")
    _positive("n", args.n)
    _positive("k", args.k)
    _positive("trials", args.trials)
    if args.seed < 0:
        raise DomainError("--seed must be nonnegative")
    rng = trees.RandomSource(args.seed)
    tables = trees.sample_twin_tables(args.n, args.trials, rng, workers=args.threads)
    total = total_sq = 0
    max_sizes = []
    for i, table in enumerate(tables):
        m = max(table, default=0)
        max_sizes.append(m)
        if args.k is not None:
            c = table.get(args.k, 0)
            total += c
            total_sq += c * c
        if args.report == "full":
            _emit({"trial": i, "max_twin_size": m,
                   "twin_counts": {str(s): c for s, c in sorted(table.items())}}, out)
        elif args.report == "max-twin":
            _emit({"trial": i, "max_twin_size": m}, out)
    final = {"op": "sample", "record": "summary", "n": args.n, "trials": args.trials,
             "seed": args.seed}
    if args.k is not None:
        final["k"] = args.k
        if args.trials >= 2:
            final.update(trees.summarize(total, total_sq, args.trials, args.seed).to_dict())
        else:
            final.update({"mean": float(total), "std_error": None})
        if args.n > 2 * args.k:
            exact = profiles.expected_twin_pairs(args.n, args.k)
            final["exact"] = profiles.format_exact(exact)
            final["exact_float"] = float(exact)
    final["max_twin_size_mean"] = sum(max_sizes) / len(max_sizes)
    final["max_twin_size_max"] = max(max_sizes)
    if args.n >= 16:
        # conjectured growth scale sqrt(log n log log n) of log(max twin size)
        ln = math.log(args.n)
        final["log_scale"] = math.sqrt(ln * math.log(ln))
    _emit(final, out)
    return EXIT_OK


# lemma1

def cmd_lemma1(args, out) -> int:
    prec = _precision(args)
    _positive("radii", args.radii, 2)
    _positive("phases", args.phases, 1)
    if not 0 < args.rmin < args.rmax:
        raise DomainError("need 0 < rmin < rmax")
    grid = bessel.lemma1_grid(args.radii, args.phases, args.rmin, args.rmax, prec=prec)
    desc = (f"{args.radii} log-spaced |z| in [{args.rmin!r}, {args.rmax!r}] x "
            f"{args.phases} phases in (-pi, pi], plus z=0")
    if args.alpha is not None:
        if args.alpha <= 0:
            raise DomainError("alpha must be positive")
        alpha = args.alpha
    else:
        first = bessel.lemma1_validate(grid, 1, prec)
        with working(prec):
            alpha = first.alpha_hat * (1 - gmpy2.mpfr("1e-6"))
    report = bessel.lemma1_validate(grid, alpha, prec, desc)
    _emit({"op": "lemma1", "precision_bits": prec, **report.to_dict(),
           "tolerance_flags": ["empirical constant on this grid only"]}, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default: $TWIN_PRECISION_BITS or 256)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes; never changes the output")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="twintrees", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", parents=[common], help="exact profile counts, N(k), S_n(k), m_n(k)")
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--d", "--cap", dest="d", type=int, help="out-degree cap (all degrees < d)")
    p.add_argument("--no-table", action="store_true", help="omit the per-profile M table")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("verify", parents=[common], help="run a cross-validation suite")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--kmax", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--k", help="comma-separated k values (saddle)")
    p.add_argument("--d", "--cap", dest="d", type=int)
    p.add_argument("--n", type=int, help="tree size (montecarlo)")
    p.add_argument("--mc-k", type=int, help="twin size (montecarlo)")
    p.add_argument("--tol", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--points", type=int, help="grid points (lemma1)")
    p.add_argument("--fail-fast", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("thresholds", parents=[common], help="K_n, k_n and the envelopes")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps2", type=float, default=0.49)
    p.add_argument("--log-base", type=float, default=None)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("bound", parents=[common], help="Chernoff upper bound on log N(k)")
    p.add_argument("--k", type=int)
    p.add_argument("--d", "--cap", dest="d", type=int)
    p.add_argument("--refine", action="store_true")
    p.add_argument("--form", choices=("H", "exp"), default="H")
    p.add_argument("--exact", action="store_true", help="also report exact log N(k)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("integral", parents=[common], help="log N(k) by torus quadrature")
    p.add_argument("--k", type=int)
    p.add_argument("--d", "--cap", dest="d", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--nodes", type=int, default=8)
    p.add_argument("--max-nodes", type=int, default=1024)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("sample", parents=[common], help="uniform random rooted trees")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", choices=("full", "max-twin", "summary"), default="full")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("lemma1", parents=[common], help="largest alpha with |H(z)| <= |exp(2 sqrt z)| / max(1, alpha |z|^(1/4)) on a grid")
    p.add_argument("--radii", type=int, default=100)
    p.add_argument("--phases", type=int, default=100)
    p.add_argument("--rmin", type=float, default=1e-3)
    p.add_argument("--rmax", type=float, default=1e6)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_lemma1)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise DomainError("--threads must be >= 1")
        return args.func(args, out)
    except UsageError as exc:
        _emit({"error": str(exc), "type": "usage"}, out)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        _emit({"error": str(exc), "type": "domain"}, out)
        return EXIT_USAGE
    except ConvergenceError as exc:
        _emit({"error": str(exc), "type": "convergence",
               "diagnostics": json.loads(json.dumps(exc.diagnostics, default=str))}, out)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
