"""Cross-validation suites run by ``twintrees verify``.

Each suite yields :class:`Check` records, one per invariant instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from . import profiles, trees
from .asymptotics import bessel, landscape, saddle
from .asymptotics.hp import default_precision, default_tolerance, fmt, pi, working


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: Dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "check": self.name, "pass": self.passed, **self.detail}


def cayley(kmax: int = 30, **_) -> Iterator[Check]:
    """sum_r M(r) = k^(k-1)."""
    for k in range(1, kmax + 1):
        total = sum(profiles.count_trees_with_profile(p) for p in profiles.enumerate_profiles(k))
        yield Check("cayley", f"k={k}", total == k ** (k - 1),
                    {"k": k, "sum_M": str(total), "expected": str(k ** (k - 1))})


def routes(kmax: int = 60, caps: Sequence = (2, 3, 5, None), threads: int = 1, **_) -> Iterator[Check]:
    """Profile sum and series coefficient give the same N(k)."""
    for k in range(1, kmax + 1):
        for cap in caps:
            direct = profiles.twin_profile_count_direct(k, cap, workers=threads)
            series = profiles.twin_profile_count_series(k, cap)
            yield Check("routes", f"k={k},d={cap}", direct == series,
                        {"k": k, "cap": cap, "direct": str(direct), "series": str(series)})


def oracle(nmax: int = 7, **_) -> Iterator[Check]:
    """Exhaustive average over all rooted trees equals S_n(k)/n^(n-1)."""
    for n in range(3, nmax + 1):
        for k in range(1, (n - 1) // 2 + 1):
            brute = trees.brute_force_expected(n, k)
            formula = profiles.expected_twin_pairs(n, k)
            yield Check("oracle", f"n={n},k={k}", brute == formula,
                        {"n": n, "k": k, "brute_force": profiles.format_exact(brute),
                         "formula": profiles.format_exact(formula)})


def bounds(kmax: int = 60, caps: Sequence = (3, 5, None), refine_ks: Sequence = (2, 5, 10),
           precision: Optional[int] = None, **_) -> Iterator[Check]:
    """The Chernoff bound dominates log N(k); refinement only lowers it."""
    prec = precision or default_precision()
    with working(prec):
        six = saddle.chernoff_bound_logN(2, form="exp", prec=prec)
        rel = abs(six - 6) / 6
        yield Check("bounds", "k=2 exp-form = 6", rel < mpfr("1e-12"),
                    {"value": fmt(six, 20), "relative_error": fmt(rel, 5)})
    for k in range(2, kmax + 1):
        for cap in caps:
            bound = saddle.chernoff_bound_logN(k, cap, prec=prec)
            with working(prec):
                exact = saddle.log_exact(profiles.twin_profile_count_series(k, cap))
            yield Check("bounds", f"k={k},d={cap}", bound >= exact,
                        {"k": k, "cap": cap, "bound": fmt(bound), "log_N": fmt(exact)})
    for k in refine_ks:
        plain = saddle.chernoff_bound_logN(k, prec=prec)
        refined = saddle.chernoff_bound_logN(k, refine=True, prec=prec)
        with working(prec):
            exact = saddle.log_exact(profiles.twin_profile_count_series(k))
        yield Check("bounds", f"refine k={k}", exact <= refined <= plain,
                    {"k": k, "bound": fmt(plain), "refined": fmt(refined), "log_N": fmt(exact)})


def saddle_suite(ks: Sequence = (2, 5, 10, 20, 40), capped: Sequence = ((10, 3), (20, 4)),
                 tol: float = 1e-6, precision: Optional[int] = None, **_) -> Iterator[Check]:
    """Torus quadrature reproduces log N(k)."""
    spec = saddle.QuadratureSpec(precision_bits=precision or default_precision())
    for k, cap in [(k, None) for k in ks] + list(capped):
        result = saddle.saddle_integral(k, cap, spec)
        with working(spec.precision_bits):
            exact = saddle.log_exact(profiles.twin_profile_count_series(k, cap))
            rel = abs(result.log_value - exact) / abs(exact)
        ok = rel <= tol and result.imag_ratio < mpfr("1e-10")
        yield Check("saddle", f"k={k},d={cap}", bool(ok),
                    {"k": k, "cap": cap, "log_integral": fmt(result.log_value),
                     "log_N": fmt(exact), "relative_error": fmt(rel, 5),
                     "imag_ratio": fmt(result.imag_ratio, 5),
                     "nodes_per_axis": result.nodes_per_axis})


def band_points(moduli: int = 25):
    """Log-spaced |z| in [1e-2, 1e6] and the eight phases 0, +-pi/4, +-pi/2, +-3pi/4, pi."""
    with working(64):
        mods = [mpfr(10) ** (-2 + mpfr(8) * i / (moduli - 1)) for i in range(moduli)]
    phases = [0, 1, -1, 2, -2, 3, -3, 4]
    return mods, phases


def lemma1(points: int = 10000, real_points: int = 10000, band_moduli: int = 25,
           precision: Optional[int] = None, **_) -> Iterator[Check]:
    """Dual-route H, H(x) <= exp(2 sqrt x), and the empirical decay constant alpha_hat."""
    prec = precision or default_precision()
    tol = default_tolerance(prec)
    mods, quarter_turns = band_points(band_moduli)
    with working(prec + 32):
        thetas = [pi() * q / 4 for q in quarter_turns]
    worst = mpfr(0)
    for z, _s, _q, diff in bessel.dual_route_band(mods, thetas, prec):
        worst = max(worst, diff)
    yield Check("lemma1", "dual route", worst <= 10 * tol,
                {"max_relative_difference": fmt(worst, 5), "limit": fmt(10 * tol, 5),
                 "points": len(mods) * len(thetas)})

    bad = None
    with working(prec):
        for i in range(real_points):
            x = mpfr(10) ** (-6 + mpfr(14) * i / (real_points - 1))
            if bessel.log_H_real(x, prec) > 2 * gmpy2.sqrt(x):
                bad = x
                break
    yield Check("lemma1", "H(x) <= exp(2 sqrt x)", bad is None,
                {"points": real_points, "counterexample": fmt(bad)})

    side = max(int(round(points ** 0.5)), 2)
    grid = bessel.lemma1_grid(side, side, prec=prec)
    first = bessel.lemma1_validate(grid, 1, prec)
    with working(prec):
        alpha = first.alpha_hat * (1 - mpfr("1e-6"))
    report = bessel.lemma1_validate(grid, alpha, prec,
                                    f"{side}x{side} log-spaced |z| in [1e-3, 1e6] plus z=0")
    yield Check("lemma1", "alpha_hat validates", report.passed, report.to_dict())


def W_suite(x2s: Sequence = ("0.25", "0.5", "1.0"), points: int = 401,
            precision: Optional[int] = None, **_) -> Iterator[Check]:
    """W peaks only at the origin; its Hessian matches the closed form."""
    prec = precision or default_precision()
    for x2 in x2s:
        scan = landscape.W_grid_scan(x2, points, prec)
        yield Check("W", f"grid x2={x2}", scan.unique_at_origin, scan.to_dict())
        hess = landscape.W_hessian_origin(x2, prec)
        with working(prec):
            det_ok = abs(hess.determinant - hess.determinant_closed_form) <= \
                mpfr("1e-30") * hess.determinant_closed_form
        yield Check("W", f"hessian x2={x2}", hess.agrees(1e-6) and det_ok and hess.concave,
                    hess.to_dict())


def montecarlo(cases: Sequence = ((20, 1), (50, 2), (100, 3)), trials: int = 100000,
               seed: int = 2024, threads: int = 1, **_) -> Iterator[Check]:
    """Sample mean of twin counts lies within 5 standard errors of m_n(k)."""
    for n, k in cases:
        est = trees.monte_carlo_expected(n, k, trials, trees.RandomSource(seed), workers=threads)
        exact = profiles.expected_twin_pairs(n, k)
        gap = abs(est.mean - float(exact))
        yield Check("montecarlo", f"n={n},k={k}", gap <= 5 * est.std_error,
                    est.to_dict(n=n, k=k, exact=profiles.format_exact(exact),
                                exact_float=float(exact)))


SUITES: Dict[str, Callable[..., Iterator[Check]]] = {
    "cayley": cayley,
    "routes": routes,
    "oracle": oracle,
    "bounds": bounds,
    "saddle": saddle_suite,
    "lemma1": lemma1,
    "W": W_suite,
    "montecarlo": montecarlo,
}
