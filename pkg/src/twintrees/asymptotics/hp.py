"""Precision handling and log-space complex values (MPFR/MPC via gmpy2)."""
from __future__ import annotations

import os
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import DomainError

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


def default_precision() -> int:
    """Precision in bits; TWIN_PRECISION_BITS overrides the built-in 256."""
    raw = os.environ.get("TWIN_PRECISION_BITS")
    if raw:
        return check_precision(int(raw))
    return DEFAULT_PRECISION


def check_precision(bits) -> int:
    bits = int(bits)
    if bits < MIN_PRECISION:
        raise DomainError(f"precision must be at least {MIN_PRECISION} bits, got {bits}")
    return bits


def working(bits: int):
    """Context manager setting the MPFR working precision."""
    return gmpy2.context(gmpy2.get_context(), precision=int(bits))


def default_tolerance(bits: int) -> mpfr:
    """Relative tolerance matched to a precision: 2^(-bits/2)."""
    with working(bits):
        return mpfr(2) ** (-(bits // 2))


def pi() -> mpfr:
    return gmpy2.const_pi()


def ln2() -> mpfr:
    return gmpy2.const_log2()


def _from_foreign(x):
    # mpmath and similar types round-trip through their decimal repr
    return mpfr(str(x))


def hp_real(x) -> mpfr:
    """Convert a number or decimal string at the current precision."""
    if isinstance(x, (int, float, str, gmpy2.mpz, gmpy2.mpq, gmpy2.mpfr)):
        return mpfr(x)
    return _from_foreign(x)


def hp_complex(z) -> mpc:
    """Convert to mpc; a zero imaginary part is made +0 so arg z lies in (-pi, pi]."""
    if isinstance(z, str):
        z = mpc(z)
    if hasattr(z, "imag") and not isinstance(z, (int, float)):
        re, im = hp_real(z.real), hp_real(z.imag)
    else:
        re, im = hp_real(z), mpfr(0)
    return mpc(re, im + 0)


def wrap_phase(phase: mpfr) -> mpfr:
    """Reduce an angle into (-pi, pi]."""
    two_pi = 2 * pi()
    phase = phase - two_pi * gmpy2.floor(phase / two_pi)
    if phase > pi():
        phase -= two_pi
    return phase


@dataclass(frozen=True)
class LogComplex:
    """A nonzero complex number stored as log|v| and arg v in (-pi, pi]."""

    log_abs: mpfr
    phase: mpfr

    @classmethod
    def from_value(cls, v) -> "LogComplex":
        v = hp_complex(v)
        return cls(gmpy2.log(abs(v)), gmpy2.phase(v))

    def value(self) -> mpc:
        s, c = gmpy2.sin_cos(self.phase)
        return gmpy2.exp(self.log_abs) * mpc(c, s)

    def log(self) -> mpc:
        return mpc(self.log_abs, self.phase)

    @property
    def log10_abs(self) -> mpfr:
        return self.log_abs / gmpy2.log(mpfr(10))


def fmt(x, digits: int = 17) -> str:
    """Locale-independent decimal rendering of an mpfr (or None)."""
    if x is None:
        return None
    if not isinstance(x, gmpy2.mpfr):
        x = mpfr(x)
    return format(x, f".{digits}g")
