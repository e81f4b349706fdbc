import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defect_forge.complexity import (
    HEADER,
    E_from_table,
    build_table,
    complexity,
    good_addition_splits,
    good_factorizations,
    load_table,
    oracle_complexity,
    selfridge_E,
    table_from_bytes,
)
from defect_forge.errors import ArgumentError, RangeError, ResourceError, TableFormatError
from oracles import naive_complexity


def test_first_ten_entries():
    assert list(build_table(10).entries[1:]) == [1, 2, 3, 4, 5, 5, 6, 6, 6, 7]


def test_eleven_needs_eight_ones():
    assert build_table(11).entries[11] == 8


def test_five_to_the_sixth():
    assert build_table(15625).entries[15625] == 29


def test_lookup_examples(big_table):
    assert complexity(big_table, 1) == 1
    assert complexity(big_table, 2**20) == 40
    assert complexity(big_table, 3**7) == 21


def test_oracle_examples():
    assert oracle_complexity(11)[11] == 8
    assert oracle_complexity(6)[6] == 5
    assert oracle_complexity(1) == {1: 1}


def test_oracle_agrees_with_dp_to_5000():
    oracle = oracle_complexity(5000)
    table = build_table(5000)
    assert [oracle[n] for n in range(1, 5001)] == list(table.entries[1:])


def test_full_scan_dp_agrees_to_1500():
    assert naive_complexity(1500)[1:] == list(build_table(1500).entries[1:])


def test_paranoid_build_matches_pruned():
    assert build_table(4000, paranoid=True) == build_table(4000)


def test_oracle_guard():
    with pytest.raises(ArgumentError):
        oracle_complexity(10**4 + 1)
    with pytest.raises(ArgumentError):
        oracle_complexity(0)


def test_bad_limits():
    with pytest.raises(ArgumentError):
        build_table(0)
    with pytest.raises(ArgumentError):
        build_table(2.5)
    with pytest.raises(ResourceError):
        build_table(2**41)


def test_range_errors(small_table):
    with pytest.raises(RangeError):
        complexity(small_table, 0)
    with pytest.raises(RangeError):
        small_table[small_table.limit + 1]


def test_entries_are_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.entries[5] = 1


def test_sandwich_bounds(big_table):
    n = np.arange(2, big_table.limit + 1, dtype=np.float64)
    c = big_table.entries[2:].astype(np.float64)
    assert np.all(c >= 3 * np.log(n) / np.log(3) - 1e-9)
    assert np.all(c <= 3 * np.log2(n) + 1e-9)


def test_lower_bound_is_tight_exactly_at_powers_of_three(small_table):
    tight = [n for n in range(1, small_table.limit + 1) if 3 ** small_table[n] == n**3]
    assert tight == [3**k for k in range(1, 10) if 3**k <= small_table.limit]


def test_powers_of_three_and_two(big_table):
    for k in range(1, 13):
        assert big_table[3**k] == 3 * k
    for k in range(1, 21):
        assert big_table[2**k] == 2 * k


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 1_200_000))
def test_dp_fixpoint(big_table, n):
    e = big_table.entries.astype(np.int64)
    half = n // 2
    best = int((e[1 : half + 1] + e[n - 1 : n - half - 1 : -1]).min())
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            best = min(best, int(e[d] + e[n // d]))
    assert big_table[n] == best


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 1000), st.integers(1, 1000))
def test_subadditive_and_submultiplicative(big_table, a, b):
    assert big_table[a + b] <= big_table[a] + big_table[b]
    assert big_table[a * b] <= big_table[a] + big_table[b]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5000))
def test_small_builds_are_prefixes(big_table, m):
    assert build_table(m) == big_table.prefix(m)


def test_selfridge_examples():
    assert [selfridge_E(k) for k in (1, 3, 5, 7)] == [1, 3, 6, 12]
    assert selfridge_E(36) == 3**12 == 531441
    assert selfridge_E(300) == 3**100


def test_E_from_table(big_table):
    assert E_from_table(big_table, 1) == 1
    assert E_from_table(big_table, 7) == 12
    assert E_from_table(big_table, 37) == 708588 == 4 * 3**11
    for k in range(2, 38):
        assert E_from_table(big_table, k) == selfridge_E(k)
    with pytest.raises(RangeError):
        E_from_table(big_table, 39)


def _naive_splits(table, n):
    return [(a, n - a) for a in range(1, n // 2 + 1) if table[a] + table[n - a] == table[n]]


def _naive_factors(table, n):
    return [(d, n // d) for d in range(2, math.isqrt(n) + 1) if n % d == 0 and table[d] + table[n // d] == table[n]]


def test_split_examples(small_table):
    assert good_addition_splits(small_table, 2) == [(1, 1)]
    assert good_addition_splits(small_table, 8) == []
    assert good_addition_splits(small_table, 7) == [(1, 6)]
    assert good_factorizations(small_table, 6) == [(2, 3)]
    assert good_factorizations(small_table, 7) == []
    assert good_factorizations(small_table, 9) == [(3, 3)]


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 20_000))
def test_splits_match_naive_scan(small_table, n):
    assert good_addition_splits(small_table, n) == _naive_splits(small_table, n)
    assert good_factorizations(small_table, n) == _naive_factors(small_table, n)


def test_cache_round_trip(tmp_path):
    t = build_table(5000)
    path = tmp_path / "t.ict"
    t.save(path)
    data = path.read_bytes()
    assert len(data) == 13 + 5000
    assert data[:4] == b"ICT1" and data[4] == 1
    assert int.from_bytes(data[5:13], "little") == 5000
    assert load_table(path) == t


def test_determinism():
    a, b = build_table(50_000), build_table(50_000)
    assert a.to_bytes() == b.to_bytes()
    assert a.checksum() == b.checksum()


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: b"XCT1" + d[4:],
        lambda d: d[:4] + bytes([2]) + d[5:],
        lambda d: d[:-1],
        lambda d: d[:HEADER.size] + bytes([9]) + d[HEADER.size + 1 :],
        lambda d: d[:5],
    ],
    ids=["magic", "version", "truncated", "spot-check", "header-only"],
)
def test_loader_rejects_bad_files(mutate):
    data = build_table(100).to_bytes()
    with pytest.raises(TableFormatError):
        table_from_bytes(mutate(data))
