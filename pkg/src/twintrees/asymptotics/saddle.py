"""Upper bound and exact contour integral for N(k).

Both start from

    N(k) = (k!(k-1)!)^2 [x1^k x2^(k-1)] prod_j H(X_j),   X_j = x1 x2^j / (j!)^2,

evaluated on circles of radii x1 = k^2 exp(-2(k-1)/k), x2 = ((k-1)/k)^2,
the minimiser of the bound obtained by replacing H(x) with exp(2 sqrt x).
Everything is carried as natural logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import ConvergenceError, DomainError
from ..profiles import Cap
from .bessel import log_H_real
from .hp import check_precision, default_precision, fmt, hp_real, pi, working


@dataclass(frozen=True)
class SaddleParams:
    k: int
    x1: mpfr
    x2: mpfr

    @classmethod
    def for_k(cls, k: int, prec: Optional[int] = None) -> "SaddleParams":
        if k < 2:
            raise DomainError(f"saddle parameters need k >= 2 (x2 = 0 at k = 1), got {k}")
        with working(prec or default_precision()):
            x1 = mpfr(k) ** 2 * gmpy2.exp(mpfr(-2 * (k - 1)) / k)
            x2 = (mpfr(k - 1) / k) ** 2
        return cls(k, x1, x2)


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_axis: int = 8
    precision_bits: int = 256
    relative_tolerance: float = 1e-12
    max_nodes_per_axis: int = 1024

    def __post_init__(self):
        if self.nodes_per_axis < 2 or self.nodes_per_axis % 2:
            raise DomainError("nodes_per_axis must be a positive even integer")
        check_precision(self.precision_bits)
        if not 0 < self.relative_tolerance < 1:
            raise DomainError("relative_tolerance must lie in (0, 1)")


def log_factorial_pair(k: int) -> mpfr:
    """log(k! (k-1)!)."""
    return gmpy2.lngamma(mpfr(k + 1)) + gmpy2.lngamma(mpfr(k))


def log_exact(n: int) -> mpfr:
    """Natural log of a positive exact integer at the current precision."""
    return gmpy2.log(mpfr(gmpy2.mpz(n)))


def _check_k(k: int, cap: Cap) -> None:
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if cap is not None and cap < 1:
        raise DomainError(f"degree cap must be >= 1, got {cap}")


def _weights(x1: mpfr, x2: mpfr, cap: Cap, prec: int) -> List[mpfr]:
    """X_j for every j that matters: all j < cap, or until the tail is negligible.

    X_j is decreasing once (j+1)^2 > x2, and log H(X) <= X, so the dropped
    tail is at most X_J / (1 - x2/(J+1)^2) times the last term.
    """
    out = []
    j, xj = 0, x1
    total = mpfr(0)
    eps = mpfr(2) ** (-(prec + 8))
    while True:
        if cap is not None and j >= cap:
            break
        if cap is None and j > 0:
            rho = x2 / (j + 1) ** 2
            if rho < 1 and xj <= eps * (1 - rho) * max(total, mpfr(1)):
                break
        out.append(xj)
        total += xj
        j += 1
        xj = xj * x2 / (j * j)
    return out


def _chernoff_objective(k, u1, u2, cap, form, prec):
    x1, x2 = gmpy2.exp(u1), gmpy2.exp(u2)
    value = 2 * log_factorial_pair(k) - k * u1 - (k - 1) * u2
    if form == "exp":
        if cap is None:
            return value + 2 * gmpy2.sqrt(x1) * gmpy2.exp(gmpy2.sqrt(x2))
        s, term = mpfr(0), gmpy2.sqrt(x1)
        for j in range(cap):
            s += term
            term = term * gmpy2.sqrt(x2) / (j + 1)
        return value + 2 * s
    for xj in _weights(x1, x2, cap, prec):
        value += log_H_real(xj, prec)
    return value


def chernoff_bound_logN(k: int, cap: Cap = None, refine: bool = False,
                        form: str = "H", prec: Optional[int] = None,
                        min_step: float = 1e-7) -> mpfr:
    """log of (k!(k-1)!)^2 / (x1^k x2^(k-1)) * prod_{j<cap} H(x1 x2^j / (j!)^2).

    Evaluated at :class:`SaddleParams`.  ``form="exp"`` uses exp(2 sqrt X)
    in place of H(X).  With ``refine`` the objective is further minimised by
    coordinate descent in (log x1, log x2) with halving steps, stopping once
    the step drops below ``min_step``; the smaller value is returned.
    """
    _check_k(k, cap)
    if form not in ("H", "exp"):
        raise ValueError(f"unknown form {form!r}")
    prec = check_precision(prec or default_precision())
    params = SaddleParams.for_k(k, prec + 16)
    with working(prec + 16):
        u = [gmpy2.log(params.x1), gmpy2.log(params.x2)]
        best = start = _chernoff_objective(k, u[0], u[1], cap, form, prec + 16)
        if refine:
            step = mpfr("0.25")
            while step > min_step:
                moved = False
                for axis in (0, 1):
                    for sign in (1, -1):
                        trial = list(u)
                        trial[axis] += sign * step
                        val = _chernoff_objective(k, trial[0], trial[1], cap, form, prec + 16)
                        if val < best:
                            u, best, moved = trial, val, True
                            break
                if not moved:
                    step /= 2
        result = min(best, start)
    with working(prec):
        return +result


@dataclass
class SaddleIntegral:
    k: int
    cap: Cap
    log_value: mpfr
    nodes_per_axis: int
    imag_ratio: mpfr
    history: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"k": self.k, "cap": self.cap, "log_value": fmt(self.log_value, 20),
                "log10_value": fmt(self.log_value / gmpy2.log(mpfr(10)), 20),
                "nodes_per_axis": self.nodes_per_axis,
                "imag_ratio": fmt(self.imag_ratio, 5)}


def _normalized_series(xj: mpfr, wp: int):
    """Coefficients of H(xj u)/H(xj) in u, truncated at relative size 2^-wp."""
    coeffs = [mpfr(1)]
    term = mpfr(1)
    r = 0
    peak = mpfr(1)
    eps = mpfr(2) ** (-wp)
    root = gmpy2.sqrt(xj)
    while True:
        r += 1
        term = term * xj / (r * r)
        coeffs.append(term)
        if term > peak:
            peak = term
        if r > root and term <= eps * peak:
            break
    total = sum(coeffs, mpfr(0))
    return [c / total for c in coeffs], gmpy2.log(total)


def saddle_integral(k: int, cap: Cap = None, spec: QuadratureSpec = QuadratureSpec()) -> SaddleIntegral:
    """N(k) from the Cauchy integral over the torus |z1| = x1, |z2| = x2.

    With z_s = x_s exp(i xi_s),

        N(k) = (k!(k-1)!)^2 / (2 pi)^2 * int prod_j H(X_j e^{i(xi1 + j xi2)})
               / (x1^k x2^(k-1) e^{i(k xi1 + (k-1) xi2)}) dxi1 dxi2.

    The integrand is divided by its value at the origin, so every sample
    has modulus at most 1 and the scale is kept as a logarithm.  The
    periodic trapezoid rule is applied on both axes and the grid doubled
    until the mean changes by less than the relative tolerance.
    """
    _check_k(k, cap)
    prec = spec.precision_bits
    params = SaddleParams.for_k(k, prec + 32)
    # H(X e^{i theta}) can be exp(4 sqrt X) smaller than its coefficient sum
    guard = int(4 * math.sqrt(float(params.x1)) / math.log(2)) + 32
    wp = prec + guard
    with working(wp):
        x1, x2 = hp_real(params.x1), hp_real(params.x2)
        tol = hp_real(spec.relative_tolerance)
        series, log_h0 = [], mpfr(0)
        for xj in _weights(x1, x2, cap, wp):
            coeffs, lh = _normalized_series(xj, wp)
            series.append(coeffs[::-1])
            log_h0 += lh
        log_f0 = log_h0 - k * gmpy2.log(x1) - (k - 1) * gmpy2.log(x2)

        def point(m1, m2, roots, n):
            prod = roots[(-(k * m1 + (k - 1) * m2)) % n]
            for j, coeffs in enumerate(series):
                u = roots[(m1 + j * m2) % n]
                acc = mpc(coeffs[0])
                for c in coeffs[1:]:
                    acc = acc * u + c
                prod *= acc
            return prod

        def unit_roots(n):
            out = []
            for m in range(n):
                s, c = gmpy2.sin_cos(2 * pi() * m / n)
                out.append(mpc(c, s))
            return out

        n = spec.nodes_per_axis
        roots = unit_roots(n)
        total = mpc(0)
        for m1 in range(n):
            for m2 in range(n):
                total += point(m1, m2, roots, n)
        mean = total / (n * n)
        history = [str(mean)]
        while True:
            if 2 * n > spec.max_nodes_per_axis:
                raise ConvergenceError(
                    f"saddle quadrature for k={k} did not converge within "
                    f"{spec.max_nodes_per_axis} nodes per axis",
                    {"nodes_per_axis": n, "history": history[-4:]})
            n *= 2
            roots = unit_roots(n)
            for m1 in range(n):
                # the previous grid is the even-even subgrid
                cols = range(n) if m1 % 2 else range(1, n, 2)
                for m2 in cols:
                    total += point(m1, m2, roots, n)
            new_mean = total / (n * n)
            history.append(str(new_mean))
            if abs(new_mean - mean) <= tol * abs(new_mean):
                mean = new_mean
                break
            mean = new_mean
        imag_ratio = abs(mean.imag) / abs(mean)
        if mean.real <= 0:
            raise ConvergenceError(f"non-positive torus mean for k={k}",
                                   {"history": history[-4:]})
        log_value = 2 * log_factorial_pair(k) + log_f0 + gmpy2.log(mean.real)
    with working(prec):
        return SaddleIntegral(k, cap, +log_value, n, +imag_ratio, history)


def saddle_integral_logN(k: int, cap: Cap = None,
                         spec: QuadratureSpec = QuadratureSpec()) -> mpfr:
    """log N(k) by torus quadrature; raises ConvergenceError rather than guess."""
    result = saddle_integral(k, cap, spec)
    if result.imag_ratio > max(spec.relative_tolerance, 1e-10):
        raise ConvergenceError(f"imaginary part did not vanish for k={k}",
                               {"imag_ratio": str(result.imag_ratio)})
    return result.log_value
