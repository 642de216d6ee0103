import math

import pytest
from hypothesis import given, strategies as st

from twintrees import DomainError
from twintrees.asymptotics import (ENVELOPE_NOTE, default_degree_cap, part_a_envelope_log,
                                   part_b_estimate_log, threshold_lower, threshold_upper)


def float_threshold(n, c):
    ln = math.log(n)
    return math.floor(math.exp(c * math.sqrt(ln * math.log(ln))))


@pytest.mark.parametrize("n", [10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12])
def test_thresholds_match_float(n):
    assert threshold_upper(n, 0.5) == float_threshold(n, 2.5)
    assert threshold_lower(n, 0.5) == float_threshold(n, 1.5)


def test_pinned_values():
    assert threshold_upper(10 ** 6, 0.1) == 311240
    assert threshold_lower(10 ** 6, 0.5) == 8387
    assert default_degree_cap(16) == 5
    assert threshold_lower(10 ** 6, 1.9999999) == 1


@given(st.integers(16, 10 ** 9))
def test_degree_cap_matches_float(k):
    value = 2 * math.log(k) / math.log(math.log(k))
    if abs(value - round(value)) > 1e-9:
        assert default_degree_cap(k) == math.floor(value)


def test_lower_below_upper():
    for n in (100, 10 ** 5, 10 ** 10):
        assert threshold_lower(n, 0.3) <= threshold_upper(n, 0.3)


def test_trends():
    ns = [10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12]
    a = [part_a_envelope_log(n, threshold_upper(n, 0.5), 0.49) for n in ns]
    b = [part_b_estimate_log(n, threshold_lower(n, 0.5)) for n in ns]
    assert all(x > y for x, y in zip(a, a[1:]))
    assert all(x < y for x, y in zip(b, b[1:]))
    assert "O(1)" in ENVELOPE_NOTE


def test_envelope_formulas_match_float():
    n, k, e = 10 ** 8, 5000, 0.3
    lk = math.log(k)
    a = 2 * math.log(n) - 3 * lk - e * (1 - e) * lk ** 2 / math.log(lk)
    b = 2 * math.log(n) - lk ** 2 / (4 * math.log(lk))
    assert math.isclose(float(part_a_envelope_log(n, k, e)), a, rel_tol=1e-13)
    assert math.isclose(float(part_b_estimate_log(n, k)), b, rel_tol=1e-13)


def test_log_base():
    # base-2 thresholds rescale the exponent
    n = 10 ** 6
    l2 = math.log2(n)
    assert threshold_upper(n, 0.5, log_base=2) == math.floor(2 ** (2.5 * math.sqrt(l2 * math.log2(l2))))


def test_domains():
    for bad in (0, 2, -1, 2.5):
        with pytest.raises(DomainError):
            threshold_lower(1000, bad)
    with pytest.raises(DomainError):
        threshold_upper(1000, 0)
    with pytest.raises(DomainError):
        threshold_upper(2, 0.5)
    with pytest.raises(DomainError):
        part_a_envelope_log(1000, 20, 0.5)
    with pytest.raises(DomainError):
        part_b_estimate_log(1000, 15)
    with pytest.raises(DomainError):
        default_degree_cap(15)
