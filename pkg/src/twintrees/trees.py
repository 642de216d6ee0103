"""Random rooted Cayley trees and their twin fringe subtrees.

Vertices are labelled 1..n.  The fringe subtree at v is v with all of its
descendants; two distinct fringe subtrees are twins when they have the same
out-degree profile.  Equal-size distinct fringe subtrees never overlap, so
twins are automatically vertex-disjoint.  The whole tree is never part of a
twin pair.
"""
from __future__ import annotations

import json
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import sqrt
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .profiles import DegreeProfile

BRUTE_FORCE_MAX_N = 8


@dataclass(frozen=True)
class RandomSource:
    """A reproducible random stream keyed by (seed, stream_index).

    Streams are derived with numpy's SeedSequence spawn keys and drive a
    Philox counter-based generator, so distinct indices give independent
    streams and any one of them can be regenerated in isolation.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise DomainError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(seq))

    def stream(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, index)


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree on {1..n}; ``parent[v-1]`` is the parent of v, 0 for the root."""

    n: int
    root: int
    parent: Tuple[int, ...]

    def __post_init__(self):
        n, parent = self.n, tuple(int(p) for p in self.parent)
        object.__setattr__(self, "parent", parent)
        if n < 1 or len(parent) != n:
            raise DomainError("parent map must list one entry per vertex")
        if not 1 <= self.root <= n or parent[self.root - 1] != 0:
            raise DomainError("root must be a vertex with no parent")
        if sum(1 for p in parent if p == 0) != 1:
            raise DomainError("exactly one vertex may lack a parent")
        if any(not 0 <= p <= n for p in parent):
            raise DomainError("parent labels must lie in 1..n")
        if len(_preorder(self)) != n:
            raise DomainError("parent map has a cycle")

    def children(self) -> List[List[int]]:
        """children[v] for v in 0..n (index 0 unused)."""
        kids: List[List[int]] = [[] for _ in range(self.n + 1)]
        for v, p in enumerate(self.parent, start=1):
            if p:
                kids[p].append(v)
        return kids

    def out_degree(self, v: int) -> int:
        return sum(1 for p in self.parent if p == v)

    def to_dict(self) -> dict:
        return {"n": self.n, "root": self.root,
                "parent": [p if p else None for p in self.parent]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "RootedTree":
        return cls(int(data["n"]), int(data["root"]),
                   tuple(p or 0 for p in data["parent"]))

    @classmethod
    def from_json(cls, text: str) -> "RootedTree":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_edges(cls, n: int, root: int, edges: Sequence[Tuple[int, int]]) -> "RootedTree":
        """Orient an undirected edge list away from ``root``."""
        adj: List[List[int]] = [[] for _ in range(n + 1)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        parent = [0] * (n + 1)
        seen = [False] * (n + 1)
        seen[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    queue.append(w)
        return cls(n, root, tuple(parent[1:]))


@dataclass(frozen=True)
class FringeRecord:
    vertex: int
    size: int
    profile: DegreeProfile


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    std_error: float
    trials: int
    seed: int

    def to_dict(self, **extra) -> dict:
        return {**extra, "trials": self.trials, "seed": self.seed,
                "mean": self.mean, "std_error": self.std_error}


def _preorder(t: RootedTree) -> List[int]:
    kids = t.children()
    order, stack = [], [t.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(kids[v])
        if len(order) > t.n:
            break
    return order


def prufer_to_edges(seq: Sequence[int], n: int) -> List[Tuple[int, int]]:
    """Decode a Pruefer sequence over {1..n} (length n-2) in linear time."""
    if n == 1:
        return []
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 1
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, x))
        degree[x] -= 1
        if x < ptr and degree[x] == 1:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    # the last two vertices of degree one; one of them is always n
    edges.append((leaf, n))
    return edges


def _parents_from_edges(n: int, root: int, edges) -> List[int]:
    adj: List[List[int]] = [[] for _ in range(n + 1)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [0] * (n + 1)
    parent[root] = -1
    stack = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if parent[w] == 0:
                parent[w] = v
                stack.append(w)
    parent[root] = 0
    return parent


def sample_rooted_cayley(n: int, rng: RandomSource) -> RootedTree:
    """Uniform rooted labelled tree: uniform Pruefer sequence, then uniform root."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n == 1:
        return RootedTree(1, 1, (0,))
    gen = rng.generator()
    seq = gen.integers(1, n + 1, size=n - 2).tolist() if n > 2 else []
    root = int(gen.integers(1, n + 1))
    parent = _parents_from_edges(n, root, prufer_to_edges(seq, n))
    return RootedTree(n, root, tuple(parent[1:]))


def _fringe_data(n: int, root: int, parent: Sequence[int]):
    """Sizes and trimmed profile tuples of every fringe subtree (1-based lists)."""
    kids: List[List[int]] = [[] for _ in range(n + 1)]
    for v in range(1, n + 1):
        p = parent[v]
        if p:
            kids[p].append(v)
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(kids[v])
    size = [0] * (n + 1)
    prof: List[Tuple[int, ...]] = [()] * (n + 1)
    for v in reversed(order):
        ch = kids[v]
        deg = len(ch)
        acc = [0] * (deg + 1)
        s = 1
        for c in ch:
            s += size[c]
            pc = prof[c]
            if len(pc) > len(acc):
                acc.extend([0] * (len(pc) - len(acc)))
            for i, x in enumerate(pc):
                acc[i] += x
        acc[deg] += 1
        while acc[-1] == 0:
            acc.pop()
        size[v] = s
        prof[v] = tuple(acc)
    return size, prof


def _twin_table(n: int, root: int, parent: Sequence[int]) -> Dict[int, int]:
    """Ordered twin pairs by size: {k: count} for every k with count > 0."""
    size, prof = _fringe_data(n, root, parent)
    groups = Counter(prof[v] for v in range(1, n + 1) if v != root)
    table: Dict[int, int] = {}
    for p, c in groups.items():
        if c > 1:
            k = sum(p)
            table[k] = table.get(k, 0) + c * (c - 1)
    return table


def _padded(t: RootedTree) -> List[int]:
    return [0, *t.parent]


def fringe_profiles(t: RootedTree) -> List[FringeRecord]:
    """One record per vertex, in label order, from a single post-order pass."""
    size, prof = _fringe_data(t.n, t.root, _padded(t))
    return [FringeRecord(v, size[v], DegreeProfile(prof[v])) for v in range(1, t.n + 1)]


def twin_counts_by_size(t: RootedTree) -> Dict[int, int]:
    """Map k -> number of ordered twin pairs of size k (only nonzero entries)."""
    return dict(sorted(_twin_table(t.n, t.root, _padded(t)).items()))


def count_twin_pairs(t: RootedTree, k: int) -> int:
    """Ordered pairs (u, v), u != v, of non-root fringe subtrees of size k with equal profiles."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return _twin_table(t.n, t.root, _padded(t)).get(k, 0)


def max_twin_size(t: RootedTree) -> int:
    table = _twin_table(t.n, t.root, _padded(t))
    return max(table, default=0)


@lru_cache(maxsize=16)
def _brute_force_totals(n: int) -> Tuple[Tuple[int, int], ...]:
    totals: Dict[int, int] = {}
    for seq in product(range(1, n + 1), repeat=max(n - 2, 0)):
        edges = prufer_to_edges(seq, n)
        for root in range(1, n + 1):
            parent = _parents_from_edges(n, root, edges)
            for k, c in _twin_table(n, root, parent).items():
                totals[k] = totals.get(k, 0) + c
    return tuple(sorted(totals.items()))


def all_rooted_trees(n: int):
    """Every rooted tree on {1..n}, each exactly once (n^(n-1) of them)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    for seq in product(range(1, n + 1), repeat=max(n - 2, 0)):
        edges = prufer_to_edges(seq, n)
        for root in range(1, n + 1):
            parent = _parents_from_edges(n, root, edges)
            yield RootedTree(n, root, tuple(parent[1:]))


def brute_force_expected(n: int, k: int, max_n: int = BRUTE_FORCE_MAX_N) -> Fraction:
    """Exact mean of count_twin_pairs(., k) over all n^(n-1) rooted trees on [n]."""
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    if n > max_n:
        raise DomainError(f"brute force refused for n={n} > {max_n} (raise max_n to override)")
    totals = dict(_brute_force_totals(n))
    return Fraction(totals.get(k, 0), n ** (n - 1))


def _trial_counts(n: int, k: int, seed: int, start: int, stop: int) -> Tuple[int, int]:
    s = q = 0
    for i in range(start, stop):
        c = count_twin_pairs(sample_rooted_cayley(n, RandomSource(seed, i)), k)
        s += c
        q += c * c
    return s, q


def summarize(total: int, total_sq: int, trials: int, seed: int) -> EstimateWithCI:
    """Mean and standard error from exact integer sums."""
    mean = Fraction(total, trials)
    var = (Fraction(total_sq) - Fraction(total * total, trials)) / (trials - 1)
    return EstimateWithCI(float(mean), sqrt(float(var / trials)), trials, seed)


def monte_carlo_expected(n: int, k: int, trials: int, rng: RandomSource,
                         workers: int = 1) -> EstimateWithCI:
    """Estimate m_n(k) from ``trials`` uniform trees.

    Trial i uses stream i of ``rng.seed``.  Per-trial counts are integers and
    are reduced exactly, so the estimate does not depend on ``workers``.
    """
    if trials < 2:
        raise DomainError("monte carlo needs at least two trials")
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    if workers <= 1:
        s, q = _trial_counts(n, k, rng.seed, 0, trials)
    else:
        bounds = [trials * i // workers for i in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_counts, [n] * workers, [k] * workers,
                                  [rng.seed] * workers, bounds[:-1], bounds[1:]))
        s = sum(p[0] for p in parts)
        q = sum(p[1] for p in parts)
    return summarize(s, q, trials, rng.seed)


def _trial_tables(n: int, seed: int, start: int, stop: int) -> List[Dict[int, int]]:
    out = []
    for i in range(start, stop):
        t = sample_rooted_cayley(n, RandomSource(seed, i))
        out.append(_twin_table(t.n, t.root, _padded(t)))
    return out


def sample_twin_tables(n: int, trials: int, rng: RandomSource,
                       workers: int = 1) -> List[Dict[int, int]]:
    """Twin counts by size for trees 0..trials-1, in trial order."""
    if n < 1 or trials < 1:
        raise DomainError("n and trials must be positive")
    if workers <= 1:
        return _trial_tables(n, rng.seed, 0, trials)
    bounds = [trials * i // workers for i in range(workers + 1)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_trial_tables, [n] * workers, [rng.seed] * workers,
                         bounds[:-1], bounds[1:])
        return [table for part in parts for table in part]


def path_tree(n: int) -> RootedTree:
    """1 -> 2 -> ... -> n rooted at 1."""
    return RootedTree(n, 1, tuple([0] + list(range(1, n))))


def star_tree(n: int) -> RootedTree:
    """Root 1 with children 2..n."""
    return RootedTree(n, 1, tuple([0] + [1] * (n - 1)))
