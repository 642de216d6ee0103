"""Size thresholds for twins and the expectation envelopes around them.

Logarithms are natural unless ``log_base`` is given.  The envelopes are
determined only up to unquantified constant factors, so they are meant for
comparing trends in n and k, never as absolute expectations.
"""
from __future__ import annotations

import math
from typing import Optional

import gmpy2
from gmpy2 import mpfr

from ..errors import DomainError
from .hp import check_precision, default_precision, hp_real, working

ENVELOPE_NOTE = "log value up to an additive O(1) / unquantified O-term"


def _log(x, base):
    if base is None:
        return gmpy2.log(x)
    return gmpy2.log(x) / gmpy2.log(hp_real(base))


def default_degree_cap(k: int, log_base: Optional[float] = None) -> int:
    """floor(2 log k / log log k), the out-degree cap used for lower bounds."""
    if k < 16:
        raise DomainError(f"degree cap needs k >= 16 (log log k > 1), got {k}")
    if log_base is None:
        value = 2 * math.log(k) / math.log(math.log(k))
        if abs(value - round(value)) > 1e-9:
            return int(value)
    with working(256):
        lk = _log(mpfr(k), log_base)
        return int(gmpy2.floor(2 * lk / _log(lk, log_base)))


def _threshold(n: int, factor, prec: int, log_base) -> int:
    with working(prec):
        ln = _log(mpfr(n), log_base)
        exponent = hp_real(factor) * gmpy2.sqrt(ln * _log(ln, log_base))
        if log_base is None:
            value = gmpy2.exp(exponent)
        else:
            value = hp_real(log_base) ** exponent
        return int(gmpy2.floor(value))


def threshold_upper(n: int, delta, prec: Optional[int] = None,
                    log_base: Optional[float] = None) -> int:
    """K_n = floor(exp((2 + delta) sqrt(log n log log n)))."""
    if n < 3:
        raise DomainError(f"thresholds need n >= 3, got {n}")
    prec = check_precision(prec or default_precision())
    with working(prec):
        delta = hp_real(delta)
        if delta <= 0:
            raise DomainError("delta must be positive")
        return _threshold(n, 2 + delta, prec, log_base)


def threshold_lower(n: int, delta, prec: Optional[int] = None,
                    log_base: Optional[float] = None) -> int:
    """k_n = floor(exp((2 - delta) sqrt(log n log log n))), 0 < delta < 2."""
    if n < 3:
        raise DomainError(f"thresholds need n >= 3, got {n}")
    prec = check_precision(prec or default_precision())
    with working(prec):
        delta = hp_real(delta)
        if not 0 < delta < 2:
            raise DomainError("delta must lie in (0, 2)")
        return _threshold(n, 2 - delta, prec, log_base)


def _check_envelope_k(k: int) -> None:
    if k < 16:
        raise DomainError(f"envelopes need k >= 16, got {k}")


def part_a_envelope_log(n: int, k: int, eps2, prec: Optional[int] = None,
                        log_base: Optional[float] = None) -> mpfr:
    """log of n^2/k^3 * exp(-eps2 (1 - eps2) log^2 k / log log k), up to O(1)."""
    _check_envelope_k(k)
    if n < 1:
        raise DomainError("n must be positive")
    prec = check_precision(prec or default_precision())
    with working(prec):
        eps2 = hp_real(eps2)
        if not 0 < eps2 < mpfr(1) / 2:
            raise DomainError("eps2 must lie in (0, 1/2)")
        lk = _log(mpfr(k), log_base)
        return (2 * _log(mpfr(n), log_base) - 3 * lk
                - eps2 * (1 - eps2) * lk * lk / _log(lk, log_base))


def part_b_estimate_log(n: int, k: int, prec: Optional[int] = None,
                        log_base: Optional[float] = None) -> mpfr:
    """log of n^2 exp(-log^2 k / (4 log log k)), leading term only."""
    _check_envelope_k(k)
    if n < 1:
        raise DomainError("n must be positive")
    prec = check_precision(prec or default_precision())
    with working(prec):
        lk = _log(mpfr(k), log_base)
        return 2 * _log(mpfr(n), log_base) - lk * lk / (4 * _log(lk, log_base))
