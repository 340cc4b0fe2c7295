import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from stlab import oracles
from stlab.numtheory import (
    FactorBase,
    PrimeSet,
    exact_div,
    factor_against_base,
    gcd,
    is_prime,
    is_union_of_atoms,
    primes_of_bitlength,
    sample_prime,
    split_by_gcd,
    trial_factor,
)


@pytest.mark.parametrize("a,b,expected", [(1, 210, 1), (10, 6, 2), (210, 210, 210)])
def test_gcd_examples(a, b, expected):
    assert gcd(a, b) == expected


@pytest.mark.parametrize("a,b,expected", [(210, 6, 35), (210, 4, None), (97, 1, 97)])
def test_exact_div_examples(a, b, expected):
    assert exact_div(a, b) == expected


def test_gcd_and_exact_div_match_naive_oracles_up_to_1000():
    table = {n: oracles.divisors(n) for n in range(1, 1001)}
    for a in range(1, 1001):
        for b in range(1, 1001):
            assert gcd(a, b) == oracles.naive_gcd(a, b, table)
            assert exact_div(a, b) == oracles.naive_exact_div(a, b)


@pytest.mark.parametrize("n,expected", [(0, False), (1, False), (2, True), (561, False),
                                        (7919, True), (3215031751, False)])
def test_is_prime_examples(n, expected):
    # 3215031751 is a strong pseudoprime to bases 2, 3, 5 and 7
    assert is_prime(n) is expected


def test_is_prime_matches_trial_division():
    assert [n for n in range(5000) if is_prime(n)] == [n for n in range(5000) if oracles.naive_is_prime(n)]


def test_is_prime_on_large_known_values():
    assert is_prime(2**61 - 1)
    assert is_prime(2**89 - 1)
    assert not is_prime((2**61 - 1) * (2**31 - 1))
    # Arnault's composite that fools many fixed-base tests
    assert not is_prime(3825123056546413051)


@pytest.mark.parametrize("n,expected", [(2, (2, 3)), (3, (5, 7)), (4, (11, 13))])
def test_primes_of_bitlength_examples(n, expected):
    ps = primes_of_bitlength(n)
    assert ps.primes == expected and ps.bit_length == n


@pytest.mark.parametrize("n", range(2, 17))
def test_primes_of_bitlength_matches_naive(n):
    assert list(primes_of_bitlength(n).primes) == oracles.naive_primes_of_bitlength(n)


def test_primes_of_bitlength_refuses_above_cap():
    with pytest.raises(ValueError, match="cap"):
        primes_of_bitlength(23)
    with pytest.raises(ValueError):
        primes_of_bitlength(1)


def test_bit_length_8_has_23_primes():
    assert len(primes_of_bitlength(8)) == 23


@pytest.mark.parametrize("n,support", [(2, {2, 3}), (3, {5, 7})])
def test_sample_prime_support(n, support):
    rng = random.Random(1)
    assert {sample_prime(n, rng) for _ in range(200)} == support


def test_sample_prime_is_uniform_on_enumerable_set():
    rng = random.Random(12345)
    counts = Counter(sample_prime(3, rng) for _ in range(10_000))
    for p in (5, 7):
        assert abs(counts[p] / 10_000 - 0.5) <= 0.05


def test_sample_prime_above_cap_uses_rejection():
    rng = random.Random(3)
    p = sample_prime(40, rng, cap=22)
    assert p.bit_length() == 40 and is_prime(p)


def test_prime_set_rejects_composites_and_duplicates():
    with pytest.raises(ValueError):
        PrimeSet((2, 4))
    with pytest.raises(ValueError):
        PrimeSet((3, 3))


def test_factor_base_validation():
    with pytest.raises(ValueError):
        FactorBase((2, 3, 4))
    with pytest.raises(ValueError):
        FactorBase((3, 3))
    b = FactorBase((2, 3, 5, 7))
    assert b.x == 210 and b.d == 4 and b.index_set(35) == {3, 4}


BASE = FactorBase((2, 3, 5, 7))


@pytest.mark.parametrize("y,S,r", [(6, {1, 2}, 1), (1, set(), 1), (35 * 11, {3, 4}, 11)])
def test_factor_against_base_examples(y, S, r):
    assert factor_against_base(y, BASE) == (frozenset(S), r)


def test_factor_against_base_on_all_divisors():
    for mask in range(16):
        S = {i + 1 for i in range(4) if mask >> i & 1}
        y = BASE.product(S)
        found, r = factor_against_base(y, BASE)
        assert found == S and r == 1 and BASE.product(found) == y


@given(st.integers(min_value=1, max_value=10**9))
def test_factor_against_base_remainder_is_free_of_base(y):
    S, r = factor_against_base(y, BASE)
    assert all(r % p for p in BASE.primes)
    assert all(y % BASE.prime(i) == 0 for i in S)


def test_split_by_gcd_matches_index_refinement():
    assert split_by_gcd(210, []) == [210]
    assert split_by_gcd(210, [6]) == [6, 35]
    assert split_by_gcd(210, [6, 10]) == [2, 3, 5, 7]
    # non-divisors contribute their gcd with x
    assert split_by_gcd(210, [22]) == [2, 105]


def test_is_union_of_atoms():
    atoms = [6, 35]
    assert is_union_of_atoms(1, atoms) and is_union_of_atoms(210, atoms)
    assert is_union_of_atoms(35, atoms) and not is_union_of_atoms(10, atoms)


def test_trial_factor():
    assert trial_factor(360) == [2, 2, 2, 3, 3, 5]
    assert trial_factor(97) == [97]
