"""Acceptance gate: one test per criterion, each printing a single pass/fail line."""
import subprocess
import sys
import time

import gmpy2
from gmpy2 import mpfr

from conftest import record_criterion
from twintrees import (count_trees_with_profile, enumerate_profiles, expected_twin_pairs,
                       twin_profile_count_direct, twin_profile_count_series)
from twintrees.asymptotics import (QuadratureSpec, W_grid_scan, W_hessian_origin,
                                   chernoff_bound_logN, log_exact, part_a_envelope_log,
                                   part_b_estimate_log, saddle_integral_logN, threshold_lower,
                                   threshold_upper)
from twintrees.asymptotics.hp import working
from twintrees.trees import RandomSource, brute_force_expected, monte_carlo_expected
from twintrees.verify import lemma1


def test_criterion_01_cayley():
    start = time.perf_counter()
    bad = [k for k in range(1, 31)
           if sum(count_trees_with_profile(p) for p in enumerate_profiles(k)) != k ** (k - 1)]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record_criterion(1, "sum_r M(r) = k^(k-1) for k <= 30", ok, f"bad={bad} time={elapsed:.1f}s")
    assert ok


def test_criterion_02_routes():
    start = time.perf_counter()
    bad = [(k, cap) for k in range(1, 61) for cap in (2, 3, 5, None)
           if twin_profile_count_direct(k, cap) != twin_profile_count_series(k, cap)]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 300
    record_criterion(2, "direct = series for k <= 60, caps 2,3,5,none", ok,
                     f"bad={bad} time={elapsed:.1f}s")
    assert ok


def test_criterion_03_oracle():
    start = time.perf_counter()
    bad = [(n, k) for n in range(3, 8) for k in range(1, (n - 1) // 2 + 1)
           if brute_force_expected(n, k) != expected_twin_pairs(n, k)]
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 600
    record_criterion(3, "brute force = exact m_n(k) for n <= 7", ok,
                     f"bad={bad} time={elapsed:.1f}s")
    assert ok


def test_criterion_04_monte_carlo():
    start = time.perf_counter()
    parts, ok = [], True
    for n, k in [(20, 1), (50, 2), (100, 3)]:
        est = monte_carlo_expected(n, k, 100000, RandomSource(2024))
        exact = float(expected_twin_pairs(n, k))
        z = abs(est.mean - exact) / est.std_error
        ok &= z <= 5
        parts.append(f"({n},{k}) z={z:.2f}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 300
    record_criterion(4, "MC mean within 5 SE, 1e5 trials", ok,
                     f"{' '.join(parts)} time={elapsed:.1f}s")
    assert ok


def test_criterion_05_chernoff():
    bad = []
    for k in range(2, 61):
        with working(256):
            exact = log_exact(twin_profile_count_series(k))
        if chernoff_bound_logN(k, prec=256) < exact:
            bad.append(k)
    value = chernoff_bound_logN(2, form="exp", prec=256)
    with working(256):
        rel = abs(gmpy2.exp(value) - gmpy2.exp(mpfr(6))) / gmpy2.exp(mpfr(6))
    pinned = rel < mpfr("1e-12")
    ok = not bad and pinned
    record_criterion(5, "bound >= log N(k) for k in [2,60]; k=2 exp-form = e^6", ok,
                     f"bad={bad} e6_rel_err={float(rel):.1e}")
    assert ok


def test_criterion_06_saddle():
    start = time.perf_counter()
    spec = QuadratureSpec(precision_bits=256)
    worst, bad = 0.0, []
    for k in (2, 5, 10, 20, 40):
        approx = saddle_integral_logN(k, None, spec)
        with working(256):
            exact = log_exact(twin_profile_count_series(k))
            rel = float(abs(approx - exact) / abs(exact))
        worst = max(worst, rel)
        if rel > 1e-6:
            bad.append(k)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 600
    record_criterion(6, "torus quadrature within 1e-6 of log N(k)", ok,
                     f"worst_rel={worst:.1e} time={elapsed:.1f}s")
    assert ok


def test_criterion_07_lemma1():
    start = time.perf_counter()
    checks = list(lemma1(points=10000, real_points=10000, precision=256))
    elapsed = time.perf_counter() - start
    ok = all(c.passed for c in checks) and elapsed < 120
    alpha = checks[-1].detail["alpha_hat"]
    record_criterion(7, "dual-route H, H(x) <= exp(2 sqrt x), alpha_hat validates", ok,
                     f"{[c.name for c in checks if not c.passed]} alpha_hat={alpha} "
                     f"time={elapsed:.1f}s")
    assert ok


def test_criterion_08_W():
    ok, parts = True, []
    for x2 in ("0.25", "0.5", "1.0"):
        scan = W_grid_scan(x2, 401)
        hess = W_hessian_origin(x2)
        ok &= scan.unique_at_origin and hess.agrees(1e-6)
        parts.append(f"x2={x2} unique={scan.unique_at_origin} "
                     f"hess_err={float(hess.max_relative_error):.1e}")
    record_criterion(8, "W max only at origin on 401x401; Hessian matches", ok, "; ".join(parts))
    assert ok


def test_criterion_09_trends():
    ns = [10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12]
    a = [float(part_a_envelope_log(n, threshold_upper(n, 0.5), 0.49)) for n in ns]
    b = [float(part_b_estimate_log(n, threshold_lower(n, 0.5))) for n in ns]
    ok = all(x > y for x, y in zip(a, a[1:])) and all(x < y for x, y in zip(b, b[1:]))
    record_criterion(9, "part_a at K_n decreasing, part_b at k_n increasing", ok,
                     f"a={[round(v, 2) for v in a]} b={[round(v, 2) for v in b]}")
    assert ok


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "twintrees", *argv], capture_output=True).stdout


def test_criterion_10_determinism():
    commands = [
        ("exact", "--n", "9", "--k", "3"),
        ("verify", "oracle", "--nmax", "6"),
        ("verify", "montecarlo", "--n", "30", "--mc-k", "2", "--trials", "300", "--seed", "4"),
        ("thresholds", "--n", "1000", "1000000", "--delta", "0.5"),
        ("bound", "--k", "7", "--refine"),
        ("integral", "--k", "5", "--exact"),
        ("lemma1", "--radii", "6", "--phases", "6"),
        ("sample", "--n", "40", "--k", "2", "--trials", "200", "--seed", "11"),
    ]
    bad = []
    for argv in commands:
        first = _cli(*argv)
        if not first or first != _cli(*argv):
            bad.append(argv[0])
    # thread count must not change bytes
    for argv in commands[1:3] + commands[-1:]:
        if _cli(*argv) != _cli(*argv, "--threads", "3"):
            bad.append(argv[0] + " --threads")
    ok = not bad
    record_criterion(10, "CLI output byte-identical across runs and thread counts", ok, f"bad={bad}")
    assert ok
