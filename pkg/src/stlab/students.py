"""A gallery of students.

Students only ever see x and the teacher's replies. Those that need the
obvious field rebuild it from that transcript prefix with gcd splitting,
never from teacher internals. Omniscient students get their factor base
out of band, standing in for a student that provably wins.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .numtheory import FactorBase, smallest_factor, split_by_gcd, trial_factor
from .protocol import Student, coordinates

SELECTORS: dict[str, Callable[[list[int]], int]] = {
    "smallest": lambda atoms: atoms[0],
    "largest": lambda atoms: atoms[-1],
}

POLICIES = ("immediate", "halving", "adaptive")


def trivial_student() -> Student:
    return Student(lambda x, replies: x, name="trivial")


def scripted_student(answers: Sequence, width: int = 1) -> Student:
    """Answers ``answers[i]`` in round i+1 and repeats the last one after that."""
    answers = tuple(answers)
    if not answers:
        raise ValueError("script must contain at least one answer")

    def answer(x, replies):
        return answers[min(len(replies), len(answers) - 1)]

    return Student(answer, width, name="scripted")


def _flatten(values) -> list:
    out = []
    for v in values:
        out.extend(coordinates(v))
    return out


def obvious_student(selector: str | Callable[[list[int]], int] = "smallest") -> Student:
    """Answers the product of one atom of the current obvious field."""
    pick = SELECTORS[selector] if isinstance(selector, str) else selector

    def answer(x, replies):
        own: list[int] = []
        for j in range(len(replies) + 1):
            atoms = split_by_gcd(x, own + list(replies[:j]))
            own.append(pick(atoms))
        return own[-1]

    name = selector if isinstance(selector, str) else "custom"
    return Student(answer, name=f"obvious:{name}")


def _hidden_primes(hidden: FactorBase | Sequence[int]) -> tuple[int, ...]:
    return hidden.primes if isinstance(hidden, FactorBase) else tuple(hidden)


def _policy_answer(primes: tuple[int, ...], policy: str, x: int, replies: tuple) -> int:
    if policy == "immediate":
        return primes[0]
    if policy == "halving":
        remaining = list(primes)
        y = remaining[0]
        for _ in range(len(replies) + 1):
            if len(remaining) <= 1:
                y = remaining[0]
                continue
            half = len(remaining) // 2
            y = math.prod(remaining[:half])
            remaining = remaining[half:]
        return y
    if policy == "adaptive":
        if not replies:
            return x
        z = replies[-1]
        if isinstance(z, int) and z > 1:
            for p in primes:
                if z % p == 0:
                    return p
        return primes[0]
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def omniscient_student(hidden: FactorBase | Sequence[int], policy: str = "halving") -> Student:
    """A student that knows the primes of x.

    ``immediate`` names the first hidden prime every round. ``halving``
    answers the product of the first half of the primes it has not tried yet,
    ending on a single prime after about log2(d) rounds. ``adaptive`` answers
    x, then the first hidden prime dividing the teacher's latest reply.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    primes = _hidden_primes(hidden)
    if not primes:
        raise ValueError("hidden base must be non-empty")
    return Student(lambda x, replies: _policy_answer(primes, policy, x, replies),
                   name=f"omniscient:{policy}")


def factoring_oracle_student(policy: str = "halving") -> Student:
    """Omniscient student that recovers the primes of x by trial division.

    Only usable at desk scale; it exists so a command line can run an
    omniscient student on an x whose factors were never handed over.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    cache: dict[int, tuple[int, ...]] = {}

    def answer(x, replies):
        if x not in cache:
            cache[x] = tuple(sorted(set(trial_factor(x))))
        return _policy_answer(cache[x], policy, x, replies)

    return Student(answer, name=f"oracle:{policy}")


def trial_division_student(budget: int) -> Student:
    """Answers the least divisor of x in [2, budget] (always prime), else x."""

    def answer(x, replies):
        if budget < 2:
            return x
        p = smallest_factor(x, budget)
        return x if p is None else p

    return Student(answer, name=f"trial:{budget}")


def _pad(atoms: list[int], width: int) -> tuple[int, ...]:
    return tuple(atoms[j % len(atoms)] for j in range(width))


def parallel_obvious_student(width: int) -> Student:
    """Answers every current atom at once, cycled or cut to ``width``."""
    if width < 1:
        raise ValueError("width must be positive")

    def answer(x, replies):
        own: list[tuple] = []
        for j in range(len(replies) + 1):
            atoms = split_by_gcd(x, _flatten(own) + _flatten(replies[:j]))
            own.append(_pad(atoms, width))
        return own[-1]

    return Student(answer, width, name=f"parallel-obvious:{width}")


def parallel_omniscient_student(
    hidden: FactorBase | Sequence[int], width: int, reveal_round: int = 1
) -> Student:
    """Parallel student answering the current atoms, except that from
    ``reveal_round`` on its last coordinate is the first hidden prime."""
    if width < 1:
        raise ValueError("width must be positive")
    primes = _hidden_primes(hidden)
    plain = parallel_obvious_student(width)

    def answer(x, replies):
        y = plain(x, replies)
        if len(replies) + 1 >= reveal_round:
            y = y[:-1] + (primes[0],)
        return y

    return Student(answer, width, name=f"parallel-omniscient:{width}@{reveal_round}")
