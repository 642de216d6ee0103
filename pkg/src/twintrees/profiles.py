"""Exact counts of rooted labeled trees by out-degree profile.

A degree profile of a tree on k vertices is the vector r = (r_0, r_1, ...)
with r_j the number of vertices having j children.  A vector is a profile
iff sum r_j = k and sum j*r_j = k - 1.  The number of rooted trees on [k]
realising r is

    M(r) = (k-1)! / prod_j (j!)^{r_j} * k! / (r_0! r_1! ...)

and N(k) = sum_r M(r)^2 counts ordered pairs of trees on two fixed disjoint
k-sets that share a profile.  N(k) is computed two ways: by summing over the
profile stream, and by extracting [x1^k x2^(k-1)] of prod_j H(x1 x2^j/(j!)^2)
with H(z) = sum z^r/(r!)^2.

A degree cap ``d`` restricts to trees whose out-degrees are all < d; ``None``
means no cap.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from math import comb, factorial
from typing import Iterator, Optional, Sequence, Tuple

from .errors import DomainError

Cap = Optional[int]


@dataclass(frozen=True)
class DegreeProfile:
    """Counts of vertices by out-degree, trailing zeros trimmed."""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts or counts[-1] <= 0:
            raise DomainError(f"profile must be nonempty with a positive last entry: {counts}")
        if any(c < 0 for c in counts):
            raise DomainError(f"negative count in profile {counts}")
        k = sum(counts)
        if sum(j * c for j, c in enumerate(counts)) != k - 1:
            raise DomainError(f"{counts} is not the profile of a tree")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "DegreeProfile":
        """Build a profile, trimming any trailing zeros first."""
        counts = list(counts)
        while counts and counts[-1] == 0:
            counts.pop()
        return cls(tuple(counts))

    @property
    def k(self) -> int:
        return sum(self.counts)

    @property
    def max_degree(self) -> int:
        return len(self.counts) - 1

    def to_json(self) -> str:
        return json.dumps(list(self.counts))

    def __iter__(self):
        return iter(self.counts)

    def __len__(self):
        return len(self.counts)


def _check_k(k: int) -> None:
    if k < 1:
        raise DomainError(f"tree size k must be >= 1, got {k}")


def _check_cap(cap: Cap) -> None:
    if cap is not None and cap < 1:
        raise DomainError(f"degree cap must be >= 1, got {cap}")


def _degree_limit(k: int, cap: Cap) -> int:
    # out-degrees run over 0..limit-1; no vertex of a k-tree has k children
    return k if cap is None else min(cap, k)


@lru_cache(maxsize=64)
def _factor_table(k: int, limit: int) -> Tuple[Tuple[int, ...], ...]:
    """table[j][v] = v! * (j!)^v, the per-degree denominator of M(r)."""
    table = []
    for j in range(limit):
        jf = factorial(j)
        row, acc = [1], 1
        for v in range(1, k + 1):
            acc *= v * jf
            row.append(acc)
        table.append(tuple(row))
    return tuple(table)


def _walk(k: int, cap: Cap) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """Yield (counts, prod_j r_j! (j!)^{r_j}) in lexicographic order of counts."""
    limit = _degree_limit(k, cap)
    if k == 1:
        if limit >= 1:
            yield (1,), 1
        return
    if limit < 2:
        return
    table = _factor_table(k, limit)
    prefix = []

    def rec(j, left, degsum, den):
        row = table[j]
        top = left if j == 0 else min(left, degsum // j)
        nxt = j + 1
        for v in range(top + 1):
            rest, rest_deg = left - v, degsum - j * v
            if rest == 0:
                if rest_deg == 0:
                    yield (*prefix, v), den * row[v]
                continue
            # remaining vertices all need out-degree in [j+1, limit-1]
            if nxt < limit and nxt * rest <= rest_deg <= (limit - 1) * rest:
                prefix.append(v)
                yield from rec(nxt, rest, rest_deg, den * row[v])
                prefix.pop()

    yield from rec(0, k, k - 1, 1)


def enumerate_profiles(k: int, cap: Cap = None, start: int = 0,
                       stop: Optional[int] = None) -> Iterator[DegreeProfile]:
    """Stream every degree profile of a k-vertex tree with out-degrees < cap.

    Order is lexicographic on the count vectors.  ``start``/``stop`` select an
    index range of that order, so disjoint ranges can be consumed in parallel.
    """
    _check_k(k)
    _check_cap(cap)
    for counts, _ in islice(_walk(k, cap), start, stop):
        yield DegreeProfile(counts)


def count_profiles(k: int, cap: Cap = None) -> int:
    """Number of profiles in :func:`enumerate_profiles`, without enumerating.

    Profiles correspond to partitions of k-1 into at most k parts, each part
    below the cap (the parts being the positive out-degrees).
    """
    _check_k(k)
    _check_cap(cap)
    limit = _degree_limit(k, cap)
    if k == 1:
        return 1
    # ways[p][m]: partitions of m into exactly p parts from the sizes seen so far
    total = k - 1
    ways = [[0] * (total + 1) for _ in range(k + 1)]
    ways[0][0] = 1
    for part in range(1, limit):
        for p in range(1, k + 1):
            row, prev = ways[p], ways[p - 1]
            for m in range(part, total + 1):
                row[m] += prev[m - part]
    return sum(ways[p][total] for p in range(k + 1))


def count_trees_with_profile(profile: DegreeProfile) -> int:
    """M(r): rooted labeled trees on [k] with the given out-degree counts."""
    k = profile.k
    den = 1
    for j, r in enumerate(profile.counts):
        den *= factorial(r) * factorial(j) ** r
    num = factorial(k - 1) * factorial(k)
    value, rem = divmod(num, den)
    assert rem == 0, "M(r) must be an integer"
    return value


def _sum_squares(k: int, cap: Cap, start: int, stop: Optional[int]) -> int:
    scale = factorial(k) * factorial(k - 1)
    total = 0
    for _, den in islice(_walk(k, cap), start, stop):
        m = scale // den
        total += m * m
    return total


def twin_profile_count_direct(k: int, cap: Cap = None, workers: int = 1) -> int:
    """N(k) = sum_r M(r)^2 over the profile stream.

    With ``workers > 1`` the stream is split into contiguous index ranges
    summed in separate processes; integer addition makes the result
    independent of the split.
    """
    _check_k(k)
    _check_cap(cap)
    if workers <= 1:
        return _sum_squares(k, cap, 0, None)
    size = count_profiles(k, cap)
    bounds = [size * i // workers for i in range(workers + 1)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_sum_squares, [k] * workers, [cap] * workers,
                         bounds[:-1], bounds[1:])
        return sum(parts)


def twin_profile_count_series(k: int, cap: Cap = None) -> int:
    """N(k) as (k!(k-1)!)^2 [x1^k x2^(k-1)] prod_{j<cap} H(x1 x2^j / (j!)^2).

    The truncated bivariate product is built one degree j at a time.  Every
    coefficient is a rational whose denominator divides (k!(k-1)!)^2, so the
    coefficients are held as exact numerators over that common denominator;
    each update is an exact division, checked as it happens.
    """
    _check_k(k)
    _check_cap(cap)
    limit = _degree_limit(k, cap)
    scale = (factorial(k) * factorial(k - 1)) ** 2
    top = k - 1
    # (vertices, degree sum) -> numerator over `scale`
    poly = {(0, 0): scale}
    for j in range(limit):
        jf = factorial(j)
        weights = [1]
        for r in range(1, k + 1):
            weights.append(weights[-1] * (r * jf) ** 2)
        later = j + 1
        grown = {}
        for (a, b), c in poly.items():
            r = 0
            while a + r <= k and b + j * r <= top:
                a2, b2 = a + r, b + j * r
                left, left_deg = k - a2, top - b2
                done = left == 0 and left_deg == 0
                if done or (later < limit and later * left <= left_deg
                            <= (limit - 1) * left):
                    q, rem = divmod(c, weights[r])
                    if rem:
                        raise ArithmeticError(
                            f"non-integral series coefficient at j={j}, state={(a2, b2)}")
                    grown[(a2, b2)] = grown.get((a2, b2), 0) + q
                r += 1
        poly = grown
    return poly.get((k, top), 0)


def host_pair_count(n: int, k: int, cap: Cap = None) -> int:
    """S_n(k): ordered twin pairs of size k summed over all rooted trees on [n].

    The first subtree's vertex set is chosen first, so each unordered pair
    is counted twice.  Requires n >= 2k + 1 (the remainder tree is nonempty).
    """
    _check_k(k)
    if n < 2 * k + 1:
        raise DomainError(f"n must exceed 2k (got n={n}, k={k})")
    rest = n - 2 * k
    return (comb(n, k) * comb(n - k, k) * twin_profile_count_series(k, cap)
            * rest ** (rest + 1))


def expected_twin_pairs(n: int, k: int, cap: Cap = None) -> Fraction:
    """m_n(k) = S_n(k) / n^(n-1), in lowest terms."""
    return Fraction(host_pair_count(n, k, cap), n ** (n - 1))


def format_exact(value) -> str:
    """Decimal string for an int, "p/q" for a non-integral rational."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return str(int(value))
