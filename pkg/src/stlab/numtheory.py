"""Exact integer primitives: primality, primes of a fixed bit length,
divisibility, and factorization against a known base of primes.

Everything works on Python ints, so products of many primes never overflow.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

ENUMERATION_CAP = 22

# Strong-pseudoprime test with the first twelve primes as witnesses is exact
# for n < 3.317e24 (Sorenson & Webster). Beyond that we add more witnesses;
# no composite is known to pass them, but it is no longer a proof.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_EXACT_LIMIT = 3317044064679887385961981
_EXTRA_WITNESSES = (41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def exact_div(a: int, b: int) -> int | None:
    """Return a // b if b divides a, else None."""
    q, r = divmod(a, b)
    return q if r == 0 else None


def _strong_probe(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = _WITNESSES if n < _EXACT_LIMIT else _WITNESSES + _EXTRA_WITNESSES
    return all(_strong_probe(n, a, d, s) for a in witnesses)


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]
    bit_length: int | None = None

    def __post_init__(self):
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be pairwise distinct")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {bad[:5]}")

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __contains__(self, p) -> bool:
        return p in self.primes


def _sieve(limit: int) -> bytearray:
    """Primality flags for 0..limit-1."""
    flags = bytearray([1]) * max(limit, 2)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit - 1) + 1 if limit > 1 else 0):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit, i)))
    return flags


@lru_cache(maxsize=32)
def _primes_in_bit_range(n: int) -> tuple[int, ...]:
    lo, hi = 1 << (n - 1), 1 << n
    flags = _sieve(hi)
    return tuple(p for p in range(lo, hi) if flags[p])


def primes_of_bitlength(n: int, cap: int = ENUMERATION_CAP) -> PrimeSet:
    """All primes whose binary length is exactly ``n``, ascending."""
    if n < 2:
        raise ValueError("bit length must be at least 2")
    if n > cap:
        raise ValueError(
            f"bit length {n} exceeds enumeration cap {cap}; use sample_prime instead"
        )
    return PrimeSet(_primes_in_bit_range(n), n)


def sample_prime(n: int, rng: random.Random, cap: int = ENUMERATION_CAP) -> int:
    """Uniform prime of bit length ``n``.

    Exact choice from the enumerated set up to ``cap``, rejection sampling
    over the bit range above it; both are uniform on the primes of length n.
    """
    if n < 2:
        raise ValueError("bit length must be at least 2")
    if n <= cap:
        return rng.choice(_primes_in_bit_range(n))
    lo, hi = 1 << (n - 1), 1 << n
    while True:
        candidate = rng.randrange(lo, hi)
        if is_prime(candidate):
            return candidate


def sample_distinct_primes(n: int, k: int, rng: random.Random) -> tuple[int, ...]:
    """``k`` distinct primes of bit length ``n``, in sampling order."""
    if n <= ENUMERATION_CAP and len(_primes_in_bit_range(n)) < k:
        raise ValueError(f"fewer than {k} primes of bit length {n}")
    chosen: list[int] = []
    while len(chosen) < k:
        p = sample_prime(n, rng)
        if p not in chosen:
            chosen.append(p)
    return tuple(chosen)


@dataclass(frozen=True)
class FactorBase:
    """Ordered tuple of distinct primes; ``x`` is their product.

    Indices into the base are 1-based throughout the package.
    """

    primes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))
        if not self.primes:
            raise ValueError("factor base must be non-empty")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError(f"duplicate primes in base {self.primes}")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {', '.join(map(str, bad))}")

    @property
    def d(self) -> int:
        return len(self.primes)

    @property
    def x(self) -> int:
        return math.prod(self.primes)

    def prime(self, i: int) -> int:
        return self.primes[i - 1]

    def product(self, indices: Iterable[int]) -> int:
        return math.prod(self.primes[i - 1] for i in indices)

    def index_set(self, n: int) -> frozenset[int]:
        """Indices of the base primes dividing ``n``."""
        return frozenset(i for i, p in enumerate(self.primes, 1) if n % p == 0)

    def permuted(self, perm: Sequence[int]) -> "FactorBase":
        """Base whose position j holds prime ``perm[j]`` (1-based indices)."""
        return FactorBase(tuple(self.primes[i - 1] for i in perm))


def factor_against_base(y: int, base: FactorBase | Sequence[int]) -> tuple[frozenset[int], int]:
    """Split ``y`` into base primes and a remainder free of base primes.

    Returns ``(S, r)``. Every base prime is divided out completely, so
    ``y == r * prod(p_i for i in S)`` holds exactly when y is squarefree
    over the base, which is the case for every divisor of a base product.
    """
    if y < 1:
        raise ValueError("y must be positive")
    primes = base.primes if isinstance(base, FactorBase) else tuple(base)
    found = set()
    r = y
    for i, p in enumerate(primes, 1):
        if r % p == 0:
            found.add(i)
            while r % p == 0:
                r //= p
    return frozenset(found), r


def split_by_gcd(x: int, numbers: Iterable[int]) -> list[int]:
    """Atoms of the divisor field generated by ``x`` and ``numbers``.

    ``x`` must be squarefree. Each number contributes ``gcd(n, x)``; every
    current atom ``a`` is replaced by ``gcd(a, g)`` and ``a // gcd(a, g)``.
    The result (ascending) is the list of minimal non-trivial divisors
    reachable by gcd and exact division, computed without factoring anything.
    """
    atoms = [x] if x > 1 else []
    for n in numbers:
        if not isinstance(n, int) or n < 1:
            continue
        g = math.gcd(n, x)
        if g == 1 or g == x:
            continue
        nxt = []
        for a in atoms:
            h = math.gcd(a, g)
            if 1 < h < a:
                nxt.extend((h, a // h))
            else:
                nxt.append(a)
        atoms = nxt
    return sorted(atoms)


def is_union_of_atoms(n: int, atoms: Iterable[int]) -> bool:
    """True iff n is a product of some of the (pairwise coprime) atoms."""
    rest = n
    for a in atoms:
        g = math.gcd(rest, a)
        if g == a:
            rest //= a
        elif g != 1:
            return False
    return rest == 1


def smallest_factor(n: int, limit: int | None = None) -> int | None:
    """Least divisor of n in [2, limit] by trial division (limit defaults to sqrt n)."""
    if n < 2:
        return None
    bound = math.isqrt(n) if limit is None else min(limit, n)
    for k in range(2, bound + 1):
        if n % k == 0:
            return k
    return n if limit is None else None


def trial_factor(n: int) -> list[int]:
    """Prime factors of n with multiplicity, ascending. Desk-scale only."""
    out = []
    while n > 1:
        p = smallest_factor(n)
        out.append(p)
        n //= p
    return out
