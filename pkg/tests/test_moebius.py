import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mobius_orbits.moebius import (
    CACHE_MAGIC,
    SieveLimitError,
    build_moebius_table,
    divisor_mu_sum,
    load_cache,
    load_or_build,
    mertens,
    mobius_oracle,
    save_cache,
    squarefree_density,
)


@pytest.mark.parametrize("limit,n,expected", [(1, 1, 1), (10, 4, 0), (30, 30, -1), (10, 6, 1)])
def test_build_examples(limit, n, expected):
    assert build_moebius_table(limit).values[n] == expected


@pytest.mark.parametrize("n,expected", [(1, 1), (12, 0), (105, -1), (30, -1), (6, 1)])
def test_oracle_examples(n, expected):
    assert mobius_oracle(n) == expected


def test_oracle_large_prime_square():
    # 999983 is prime
    assert mobius_oracle(999983) == -1
    assert mobius_oracle(999983**2) == 0
    assert mobius_oracle(2 * 999983) == 1


@pytest.mark.parametrize("N,expected", [(1, 1), (2, 0), (10, -1)])
def test_mertens_examples(small_table, N, expected):
    assert mertens(small_table, N) == expected
    assert expected == sum(mobius_oracle(n) for n in range(1, N + 1))


def test_squarefree_density_examples(small_table):
    assert squarefree_density(small_table, 1) == 1.0
    assert squarefree_density(small_table, 4) == 0.75


def test_squarefree_density_limit(table_1e7):
    assert abs(squarefree_density(table_1e7, 10**7) - 6 / math.pi**2) < 1e-3


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 0), (360, 0)])
def test_divisor_mu_sum_examples(n, expected):
    assert divisor_mu_sum(n) == expected


def test_divisor_mu_sum_indicator():
    assert all(divisor_mu_sum(n) == (n == 1) for n in range(1, 10**4 + 1))


def test_sieve_matches_oracle_random(table_1e6):
    rng = random.Random(7)
    ns = [rng.randint(1, 10**6) for _ in range(10**4)]
    assert all(table_1e6.values[n] == mobius_oracle(n) for n in ns)


def test_sieve_matches_oracle_prefix(small_table):
    assert [int(v) for v in small_table.values[1:2001]] == [mobius_oracle(n) for n in range(1, 2001)]


def test_multiplicative_on_coprime_pairs(table_1e6):
    rng = random.Random(11)
    checked = 0
    while checked < 1000:
        a = rng.randint(1, 1000)
        b = rng.randint(1, 10**6 // a)
        if math.gcd(a, b) != 1:
            continue
        assert table_1e6.values[a * b] == table_1e6.values[a] * table_1e6.values[b]
        checked += 1


def test_table_invariants(small_table):
    v = small_table.values
    assert v[1] == 1
    assert set(np.unique(v[1:]).tolist()) <= {-1, 0, 1}
    assert np.array_equal(np.diff(small_table.mertens[1:]), v[2:].astype(np.int64))
    for p in (2, 3, 5, 7, 11):
        assert not v[p * p :: p * p].any()


def test_table_is_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.values[5] = 1


@given(st.integers(min_value=1, max_value=10**4))
@settings(max_examples=200, deadline=None)
def test_density_in_unit_interval(small_table, n):
    assert 0.0 <= squarefree_density(small_table, n) <= 1.0


def test_mertens_small_relative_to_n(table_1e7):
    assert abs(mertens(table_1e7, 10**7)) / 10**7 < 1e-3


def test_out_of_range(small_table):
    with pytest.raises(IndexError):
        mertens(small_table, 10**4 + 1)
    with pytest.raises(IndexError):
        squarefree_density(small_table, 0)


def test_limit_checks():
    with pytest.raises(ValueError):
        build_moebius_table(0)
    with pytest.raises(SieveLimitError):
        build_moebius_table(2**31 + 1)
    with pytest.raises(SieveLimitError):
        build_moebius_table(10**6, memory_budget=10**6)


def test_cache_roundtrip(tmp_path, small_table):
    path = tmp_path / "mu.bin"
    save_cache(small_table, path)
    raw = path.read_bytes()
    assert raw[:4] == CACHE_MAGIC
    assert int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:16], "little") == 10**4
    assert len(raw) == 16 + 10**4
    assert np.frombuffer(raw[16:], dtype=np.int8)[29] == -1  # μ(30)
    loaded = load_cache(path)
    assert loaded.limit == small_table.limit
    assert np.array_equal(loaded.values, small_table.values)
    assert np.array_equal(loaded.mertens, small_table.mertens)


def test_cache_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"XXXX" + bytes(12))
    with pytest.raises(ValueError, match="magic"):
        load_cache(path)


def test_load_or_build_extends_short_cache(tmp_path):
    path = tmp_path / "mu.bin"
    save_cache(build_moebius_table(100), path)
    table = load_or_build(1000, path)
    assert table.limit == 1000
    assert load_cache(path).limit == 1000
