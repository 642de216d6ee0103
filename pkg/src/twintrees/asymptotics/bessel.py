"""H(z) = sum_r z^r / (r!)^2 = I0(2 sqrt z), by series and by quadrature.

Values are returned in log space (:class:`LogComplex`) because |H| grows
like exp(2 |z|^(1/2)).

Quadrature route: for Re w >= 0,

    I0(2w) = pi^-1 exp(2w) int_0^4 exp(-w y) / sqrt(y (4 - y)) dy,

and y = 2 - 2 cos t turns the integral into int_0^pi exp(-2w (1 - cos t)) dt,
a smooth even periodic integrand for which the trapezoid rule converges
geometrically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import ConvergenceError, DomainError
from .hp import (LogComplex, check_precision, default_precision, default_tolerance, fmt,
                 hp_complex, hp_real, ln2, pi, working, wrap_phase)

MAX_TRAPEZOID_NODES = 2 ** 20


def series_cutoff(prec: int) -> float:
    """Largest |z|^(1/2) for which the automatic route uses the series.

    Beyond it the series of H on the negative axis cancels away more bits
    than the working precision itself, so the quadrature takes over.
    """
    return prec * math.log(2) / 4


def _window_start(abs_z: float, bits: int) -> int:
    """First index whose term |z|^r/(r!)^2 is within 2^-bits of the largest term."""
    if abs_z == 0.0:
        return 0
    lz = math.log(abs_z)

    def log_term(r):
        return r * lz - 2 * math.lgamma(r + 1)

    top = max(int(math.sqrt(abs_z)), 0)
    if log_term(top + 1) > log_term(top):
        top += 1
    floor = log_term(top) - (bits + 16) * math.log(2)
    lo, hi = 0, top
    while lo < hi:
        mid = (lo + hi) // 2
        if log_term(mid) < floor:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _H_series(z, prec: int) -> LogComplex:
    with working(prec + 32):
        z = hp_complex(z)
        w = gmpy2.sqrt(z)
        aw = abs(w)
        shortfall = float(2 * (aw - w.real))
    # bits lost to cancellation: terms peak near exp(2|w|), the sum is ~|exp(2w)|
    wp = prec + int(shortfall / math.log(2)) + 40
    with working(wp):
        z = hp_complex(z)
        az = abs(z)
        if az == 0:
            return LogComplex(mpfr(0), mpfr(0))
        aw = gmpy2.sqrt(az)
        r = _window_start(float(az), wp)
        log_start = r * gmpy2.log(az) - 2 * gmpy2.lngamma(mpfr(r + 1)) - 2 * aw
        mag = gmpy2.exp(log_start)
        s, c = gmpy2.sin_cos(r * gmpy2.phase(z))
        term = mag * mpc(c, s)
        total = term
        peak = mag
        eps = mpfr(2) ** (-wp - 8)
        while True:
            r += 1
            r2 = r * r
            term = term * z / r2
            mag = mag * az / r2
            total += term
            if mag > peak:
                peak = mag
            if r > aw and mag <= eps * peak:
                break
        log_abs = gmpy2.log(abs(total)) + 2 * aw
        phase = gmpy2.phase(total)
    with working(prec):
        return LogComplex(+log_abs, +phase)


def eval_I0_integral(w, prec: Optional[int] = None, tol=None,
                     max_nodes: int = MAX_TRAPEZOID_NODES) -> LogComplex:
    """I0(2w) for Re w >= 0 by trapezoid quadrature with node doubling.

    Nodes where |exp(-2w(1 - cos t))| falls below the working epsilon are
    skipped.  Doubling stops once two successive sums agree to ``tol``
    relative (default 2^(-prec/2)).
    """
    prec = check_precision(prec or default_precision())
    wp = prec + 24
    with working(wp):
        w = hp_complex(w)
        a, b = w.real, w.imag
        if a < 0:
            raise DomainError(f"integral formula needs Re w >= 0, got {w}")
        tol = hp_real(tol) if tol is not None else default_tolerance(prec)
        half_pi = pi()
        cut = (wp + 16) * ln2()
        if a > 0 and cut / (2 * a) < 2:
            tmax = gmpy2.acos(1 - cut / (2 * a))
        else:
            tmax = half_pi
        real = b == 0

        def g(t):
            u = 1 - gmpy2.cos(t)
            if real:
                return gmpy2.exp(-2 * a * u)
            s, c = gmpy2.sin_cos(-2 * b * u)
            return gmpy2.exp(-2 * a * u) * mpc(c, s)

        n = 8
        while half_pi / n > tmax / 8 and n < max_nodes:
            n *= 2
        h = half_pi / n
        acc = g(mpfr(0)) / 2
        if tmax >= half_pi:
            acc += g(half_pi) / 2
        for m in range(1, min(n - 1, int(tmax / h)) + 1):
            acc += g(m * h)
        prev = h * acc
        floor = mpfr(2) ** (-prec)
        history = [prev]
        while True:
            if 2 * n > max_nodes:
                raise ConvergenceError(
                    f"I0 quadrature did not converge for w={fmt(a, 8)}{fmt(b, 8):+}j",
                    {"nodes": n, "history": [str(v) for v in history[-4:]]})
            n *= 2
            h = half_pi / n
            for m in range(1, min(n - 1, int(tmax / h)) + 1, 2):
                acc += g(m * h)
            cur = h * acc
            history.append(cur)
            delta = abs(cur - prev)
            if delta <= tol * abs(cur) or delta <= floor:
                break
            prev = cur
        cur = mpc(cur)
        log_abs = 2 * a + gmpy2.log(abs(cur)) - gmpy2.log(half_pi)
        phase = wrap_phase(2 * b + gmpy2.phase(cur))
    with working(prec):
        return LogComplex(+log_abs, +phase)


def eval_H(z, prec: Optional[int] = None, method: str = "auto", tol=None) -> LogComplex:
    """H(z) in log space.

    ``method``: "series" (scaled power series with guard bits against
    cancellation), "integral" (I0 quadrature at the principal sqrt), or
    "auto" (series while |z|^(1/2) <= :func:`series_cutoff`).
    """
    prec = check_precision(prec or default_precision())
    with working(prec + 32):
        z = hp_complex(z)
        w = gmpy2.sqrt(z)
    if method == "auto":
        method = "series" if abs(w) <= series_cutoff(prec) else "integral"
    if method == "series":
        return _H_series(z, prec)
    if method == "integral":
        return eval_I0_integral(w, prec, tol)
    raise ValueError(f"unknown method {method!r}")


def log_H_real(x, prec: Optional[int] = None) -> mpfr:
    """log H(x) for real x >= 0."""
    return eval_H(x, prec).log_abs


@dataclass
class Lemma1Report:
    alpha: mpfr
    alpha_hat: mpfr
    alpha_hat_outside_unit: Optional[mpfr]
    max_ratio: mpfr
    points: int
    grid: str
    passed: bool
    violations: List[mpc] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"alpha": fmt(self.alpha), "alpha_hat": fmt(self.alpha_hat),
                "alpha_hat_outside_unit": fmt(self.alpha_hat_outside_unit),
                "max_ratio": fmt(self.max_ratio), "points": self.points,
                "grid": self.grid, "passed": self.passed,
                "violations": [str(v) for v in self.violations[:10]]}


def lemma1_grid(radii: int = 100, phases: int = 100, rmin: float = 1e-3,
                rmax: float = 1e6, include_zero: bool = True,
                prec: Optional[int] = None) -> List[mpc]:
    """Log-spaced moduli times equally spaced phases in (-pi, pi]."""
    prec = prec or default_precision()
    with working(prec):
        pts = [mpc(0)] if include_zero else []
        ratio = mpfr(rmax) / rmin
        for i in range(radii):
            r = mpfr(rmin) * ratio ** (mpfr(i) / max(radii - 1, 1))
            for m in range(phases):
                theta = -pi() + 2 * pi() * (m + 1) / phases
                s, c = gmpy2.sin_cos(theta)
                z = mpc(r * c, r * s)
                if m == phases - 1:
                    z = mpc(-r, 0)
                pts.append(z)
        return pts


@lru_cache(maxsize=65536)
def _lemma1_terms(z: mpc, prec: int):
    logh = eval_H(z, prec).log_abs
    with working(prec):
        loge = 2 * gmpy2.sqrt(z).real
        logq = gmpy2.log(abs(z)) / 4 if z != 0 else None
    return logh, loge, logq


def lemma1_validate(grid: Sequence, alpha, prec: Optional[int] = None,
                    description: Optional[str] = None) -> Lemma1Report:
    """Check |H(z)| <= |exp(2 sqrt z)| / max(1, alpha |z|^(1/4)) on ``grid``.

    Also reports alpha_hat, the largest alpha for which the inequality holds
    at every grid point (inf of |exp(2 sqrt z)| / (|H(z)| |z|^(1/4)) over
    z != 0), and the same infimum restricted to |z| >= 1.  Point values are
    cached, so re-validating a grid with another alpha is cheap.
    """
    prec = check_precision(prec or default_precision())
    with working(prec):
        alpha = hp_real(alpha)
        if alpha <= 0:
            raise DomainError("alpha must be positive")
        log_alpha = gmpy2.log(alpha)
    best = best_outside = None
    worst = None
    violations = []
    count = 0
    for z in grid:
        count += 1
        with working(prec + 32):
            z = hp_complex(z)
        logh, loge, logq = _lemma1_terms(z, prec)
        with working(prec):
            penalty = mpfr(0)
            if logq is not None and log_alpha + logq > 0:
                penalty = log_alpha + logq
            excess = logh + penalty - loge
            if worst is None or excess > worst:
                worst = excess
            if excess > 0:
                violations.append(z)
            if logq is not None:
                ratio = loge - logh - logq
                if best is None or ratio < best:
                    best = ratio
                if logq >= 0 and (best_outside is None or ratio < best_outside):
                    best_outside = ratio
    with working(prec):
        alpha_hat = gmpy2.exp(best) if best is not None else mpfr("inf")
        outside = gmpy2.exp(best_outside) if best_outside is not None else None
        max_ratio = gmpy2.exp(worst) if worst is not None else mpfr(0)
    return Lemma1Report(alpha, alpha_hat, outside, max_ratio, count,
                        description or f"{count} points", not violations, violations)


def dual_route_band(moduli: Iterable, phases: Iterable, prec: Optional[int] = None,
                    tol=None):
    """Yield (z, series value, integral value, relative difference) per point."""
    prec = check_precision(prec or default_precision())
    phases = list(phases)
    for r in moduli:
        for theta in phases:
            with working(prec + 32):
                r, theta = hp_real(r), hp_real(theta)
                s, c = gmpy2.sin_cos(theta)
                z = mpc(r * c, r * s + 0)
                w = gmpy2.sqrt(z)
            ser = _H_series(z, prec)
            quad = eval_I0_integral(w, prec, tol)
            with working(prec):
                diff = abs(gmpy2.exp(ser.log() - quad.log()) - 1)
            yield z, ser, quad, diff
