"""Deliberately naive reference computations used to cross-check the fast
paths. Nothing here is shared with the code it checks."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterable


def divisors(n: int) -> set[int]:
    return {k for k in range(1, n + 1) if n % k == 0}


def naive_gcd(a: int, b: int, table: dict[int, set[int]] | None = None) -> int:
    da = table[a] if table else divisors(a)
    db = table[b] if table else divisors(b)
    return max(da & db)


def naive_exact_div(a: int, b: int) -> int | None:
    """Quotient by repeated subtraction, None when a remainder is left."""
    q = 0
    while a >= b:
        a -= b
        q += 1
    return q if a == 0 else None


def naive_is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, n))


def naive_primes_of_bitlength(n: int) -> list[int]:
    return [k for k in range(1 << (n - 1), 1 << n) if naive_is_prime(k)]


def closure(generators: Iterable[int], size: int) -> set[int]:
    """Field generated by bitmask sets over ``size`` points, by fixpoint
    iteration of union, intersection and complement."""
    full = (1 << size) - 1
    family = {0, full, *generators}
    while True:
        new = set(family)
        for a in family:
            new.add(full & ~a)
            for b in family:
                new.add(a | b)
                new.add(a & b)
        if new == family:
            return family
        family = new


def atoms_of(family: set[int]) -> set[int]:
    """Minimal non-empty members (bitmasks)."""
    nonempty = [m for m in family if m]
    return {m for m in nonempty if not any(o != m and o & m == o for o in nonempty)}


def to_mask(s: Iterable[int]) -> int:
    """1-based index set to bitmask (bit i-1 for index i)."""
    m = 0
    for i in s:
        m |= 1 << (i - 1)
    return m


def pair_sampling_by_subsets(
    omega_size: int, d: int, pairs_for: Callable[[frozenset[int]], Iterable[frozenset[int]]]
) -> Fraction:
    """Conditional probability that {x1, x2} lands in F(T), counted per subset.

    Given that the tuple is a uniformly random ordering of T, {x1, x2} is a
    uniformly random pair of T, so each T contributes |F(T)| / C(d, 2).
    """
    subsets = list(combinations(range(omega_size), d))
    total = sum(Fraction(len(set(pairs_for(frozenset(t)))), comb(d, 2)) for t in subsets)
    return total / len(subsets)
