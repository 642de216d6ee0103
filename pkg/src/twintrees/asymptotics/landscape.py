"""The phase function W(xi1, xi2) that controls the torus integrand near its peak.

    W(xi1, xi2) = cos(xi1/2 + sqrt(x2) sin(xi2/2)) * exp(sqrt(x2) cos(xi2/2))
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import gmpy2
from gmpy2 import mpfr

from ..errors import DomainError
from .hp import check_precision, default_precision, fmt, hp_real, pi, working


def eval_W(xi1, xi2, x2, prec: Optional[int] = None) -> mpfr:
    prec = check_precision(prec or default_precision())
    with working(prec):
        xi1, xi2, x2 = hp_real(xi1), hp_real(xi2), hp_real(x2)
        if x2 <= 0:
            raise DomainError("x2 must be positive")
        s = gmpy2.sqrt(x2)
        sin_h, cos_h = gmpy2.sin_cos(xi2 / 2)
        return gmpy2.cos(xi1 / 2 + s * sin_h) * gmpy2.exp(s * cos_h)


@dataclass
class HessianReport:
    x2: mpfr
    analytic: List[List[mpfr]]
    finite_difference: List[List[mpfr]]
    determinant: mpfr
    determinant_closed_form: mpfr
    max_relative_error: mpfr

    @property
    def concave(self) -> bool:
        return self.analytic[0][0] < 0 and self.determinant > 0

    def agrees(self, rel_tol=1e-6) -> bool:
        return self.max_relative_error <= rel_tol

    def to_dict(self) -> dict:
        return {"x2": fmt(self.x2),
                "analytic": [[fmt(v) for v in row] for row in self.analytic],
                "finite_difference": [[fmt(v) for v in row] for row in self.finite_difference],
                "determinant": fmt(self.determinant),
                "determinant_closed_form": fmt(self.determinant_closed_form),
                "max_relative_error": fmt(self.max_relative_error, 5),
                "concave": self.concave}


def W_hessian_origin(x2, prec: Optional[int] = None) -> HessianReport:
    """Closed-form Hessian of W at (0, 0), checked against central differences."""
    prec = check_precision(prec or default_precision())
    with working(prec):
        x2 = hp_real(x2)
        if x2 <= 0:
            raise DomainError("x2 must be positive")
        s = gmpy2.sqrt(x2)
        e = gmpy2.exp(s)
        a = -e / 4
        b = -(x2 + s) * e / 4
        c = -s * e / 4
        analytic = [[a, c], [c, b]]
        det = a * b - c * c
        det_closed = s * gmpy2.exp(2 * s) / 16

        h = mpfr(2) ** (-(prec // 4))

        def W(u, v):
            return eval_W(u, v, x2, prec)

        w0 = W(0, 0)
        d11 = (W(h, 0) - 2 * w0 + W(-h, 0)) / (h * h)
        d22 = (W(0, h) - 2 * w0 + W(0, -h)) / (h * h)
        d12 = (W(h, h) - W(h, -h) - W(-h, h) + W(-h, -h)) / (4 * h * h)
        fd = [[d11, d12], [d12, d22]]
        err = max(abs(fd[i][j] - analytic[i][j]) / abs(analytic[i][j])
                  for i in range(2) for j in range(2))
    return HessianReport(x2, analytic, fd, det, det_closed, err)


@dataclass
class GridScan:
    x2: mpfr
    points_per_axis: int
    peak: mpfr
    argmax: Tuple[mpfr, mpfr]
    origin_value: mpfr
    unique_at_origin: bool
    runner_up: mpfr

    def to_dict(self) -> dict:
        return {"x2": fmt(self.x2), "points_per_axis": self.points_per_axis,
                "peak": fmt(self.peak), "argmax": [fmt(v) for v in self.argmax],
                "origin_value": fmt(self.origin_value),
                "unique_at_origin": self.unique_at_origin,
                "runner_up": fmt(self.runner_up)}


def W_grid_scan(x2, points: int = 401, prec: Optional[int] = None) -> GridScan:
    """Evaluate W on an odd points x points grid of [-pi, pi]^2 containing the origin."""
    if points < 3 or points % 2 == 0:
        raise DomainError("points per axis must be odd and at least 3")
    prec = check_precision(prec or default_precision())
    with working(prec):
        x2 = hp_real(x2)
        s = gmpy2.sqrt(x2)
        ticks = [-pi() + 2 * pi() * i / (points - 1) for i in range(points)]
        ticks[(points - 1) // 2] = mpfr(0)
        halves = [gmpy2.sin_cos(t / 2) for t in ticks]
        origin = gmpy2.exp(s)
        best, arg, runner = None, None, None
        for i, t1 in enumerate(ticks):
            h1 = t1 / 2
            for j, (sin_h, cos_h) in enumerate(halves):
                v = gmpy2.cos(h1 + s * sin_h) * gmpy2.exp(s * cos_h)
                if best is None or v > best:
                    best, arg = v, (t1, ticks[j])
                if (i, j) != ((points - 1) // 2,) * 2 and (runner is None or v > runner):
                    runner = v
        unique = arg == (0, 0) and runner < origin
    return GridScan(x2, points, best, arg, origin, unique, runner)
