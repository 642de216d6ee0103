from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from conftest import naive_rooted_trees, naive_twin_pairs
from twintrees import DomainError, expected_twin_pairs
from twintrees.trees import (RandomSource, RootedTree, all_rooted_trees, brute_force_expected,
                             count_twin_pairs, fringe_profiles, max_twin_size,
                             monte_carlo_expected, path_tree, prufer_to_edges,
                             sample_rooted_cayley, sample_twin_tables, star_tree,
                             twin_counts_by_size)


def test_rooted_tree_validation():
    RootedTree(3, 2, (2, 0, 2))
    with pytest.raises(DomainError):
        RootedTree(3, 1, (0, 3, 2))  # 2 and 3 form a cycle
    with pytest.raises(DomainError):
        RootedTree(3, 1, (0, 0, 1))  # two roots
    with pytest.raises(DomainError):
        RootedTree(2, 1, (0, 5))


def test_json_round_trip():
    t = RootedTree(4, 3, (3, 1, 0, 3))
    assert RootedTree.from_json(t.to_json()) == t
    assert t.to_dict()["parent"][2] is None


def test_from_edges():
    t = RootedTree.from_edges(4, 2, [(1, 2), (2, 3), (3, 4)])
    assert t.parent == (2, 0, 2, 3)
    assert t.out_degree(2) == 2


def test_prufer_known_case():
    # sequence (4, 4, 4, 5) on 6 vertices: star-ish around 4
    edges = {tuple(sorted(e)) for e in prufer_to_edges([4, 4, 4, 5], 6)}
    assert edges == {(1, 4), (2, 4), (3, 4), (4, 5), (5, 6)}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_all_rooted_trees_matches_naive(n):
    ours = {(t.root, t.parent) for t in all_rooted_trees(n)}
    naive = {(root, tuple(parent.get(v, 0) for v in range(1, n + 1)))
             for root, parent in naive_rooted_trees(n)}
    assert ours == naive
    assert len(ours) == n ** (n - 1)


@given(st.integers(1, 40), st.integers(0, 2 ** 32), st.integers(0, 1000))
def test_sampler_returns_valid_trees(n, seed, stream):
    t = sample_rooted_cayley(n, RandomSource(seed, stream))
    assert t.n == n
    assert sum(1 for p in t.parent if p == 0) == 1
    assert sum(t.out_degree(v) for v in range(1, n + 1)) == n - 1


@pytest.mark.parametrize("n", [3, 4])
def test_sampler_uniform(n):
    trials = 200 * n ** (n - 1)
    tally = Counter((t.root, t.parent) for t in
                    (sample_rooted_cayley(n, RandomSource(11, i)) for i in range(trials)))
    assert len(tally) == n ** (n - 1)
    _, p = chisquare(list(tally.values()))
    assert p > 1e-4


def test_sampler_reproducible():
    a = sample_rooted_cayley(50, RandomSource(3, 17))
    b = sample_rooted_cayley(50, RandomSource(3, 17))
    c = sample_rooted_cayley(50, RandomSource(3, 18))
    assert a == b
    assert a != c


def test_fringe_profiles_path_and_star():
    recs = fringe_profiles(path_tree(4))
    assert [(r.vertex, r.size, r.profile.counts) for r in recs] == [
        (1, 4, (1, 3)), (2, 3, (1, 2)), (3, 2, (1, 1)), (4, 1, (1,))]
    star = fringe_profiles(star_tree(4))
    assert star[0].profile.counts == (3, 0, 0, 1)
    assert all(r.size == 1 for r in star[1:])


def test_twin_counts_star():
    # 5 leaves: 5*4 ordered pairs of size 1
    assert twin_counts_by_size(star_tree(6)) == {1: 20}
    assert count_twin_pairs(path_tree(5), 1) == 0
    assert max_twin_size(path_tree(5)) == 0


def test_two_disjoint_copies():
    # root 1 with two copies of the path a -> b -> c hanging off it
    t = RootedTree(7, 1, (0, 1, 2, 3, 1, 5, 6))
    assert max_twin_size(t) == 3
    assert twin_counts_by_size(t) == {1: 2, 2: 2, 3: 2}


def test_root_never_counts():
    # the whole tree is excluded even when it matches nothing else
    assert twin_counts_by_size(RootedTree(1, 1, (0,))) == {}
    assert twin_counts_by_size(RootedTree(2, 1, (0, 1))) == {}


@pytest.mark.parametrize("n", range(3, 7))
def test_twin_counts_match_naive(n):
    lookup = {(t.root, t.parent): t for t in all_rooted_trees(n)}
    for root, parent in naive_rooted_trees(n):
        t = lookup[(root, tuple(parent.get(v, 0) for v in range(1, n + 1)))]
        table = twin_counts_by_size(t)
        for k in range(1, n):
            assert table.get(k, 0) == naive_twin_pairs(root, parent, n, k)


@pytest.mark.parametrize("n", range(3, 7))
def test_brute_force_matches_formula(n):
    for k in range(1, (n - 1) // 2 + 1):
        assert brute_force_expected(n, k) == expected_twin_pairs(n, k)


def test_brute_force_refuses_large_n():
    with pytest.raises(DomainError):
        brute_force_expected(9, 1)


def test_monte_carlo_close_to_exact():
    est = monte_carlo_expected(3, 1, 20000, RandomSource(7))
    assert abs(est.mean - 2 / 3) <= 5 * est.std_error


def test_monte_carlo_independent_of_workers():
    one = monte_carlo_expected(40, 2, 400, RandomSource(5), workers=1)
    many = monte_carlo_expected(40, 2, 400, RandomSource(5), workers=8)
    assert one == many


def test_sample_tables_consistent():
    tables = sample_twin_tables(30, 50, RandomSource(9))
    assert tables == sample_twin_tables(30, 50, RandomSource(9), workers=3)
    for i, table in enumerate(tables):
        t = sample_rooted_cayley(30, RandomSource(9, i))
        assert table == twin_counts_by_size(t)


def test_monte_carlo_validation():
    with pytest.raises(DomainError):
        monte_carlo_expected(5, 1, 1, RandomSource(0))
    with pytest.raises(DomainError):
        RandomSource(-1)


def test_exact_mean_small_case():
    # n = 3: 6 rooted paths have no twins, 3 cherries give 2 ordered leaf pairs each
    total = sum(count_twin_pairs(t, 1) for t in all_rooted_trees(3))
    assert Fraction(total, 9) == Fraction(2, 3)
