"""The prime-factor teacher over a known factor base, its parallel variant,
and break detection.

The teacher knows the primes p_1..p_d of x. The obvious numbers at a round
are those reachable from x and all earlier answers and replies by gcd and
exact division; their index sets form a field of sets, tracked as an atom
partition over base positions 1..d.

Replies to an answer y:
  * y not a divisor of x, or y < 2: reply 1.
  * y = p_j: reply p_j.
  * gcd(y, o) is a proper divisor of y for some obvious o: reply the
    smallest such gcd.
  * otherwise y lies inside one atom: with its primes in base order,
    reply the product of the first floor(l/2) and record the rest as
    "divided by".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Any, Sequence

from .numtheory import FactorBase
from .protocol import Student, Transcript, coordinates, run_protocol
from .setfield import AtomPartition, refine

__all__ = [
    "FactorBase",
    "ObviousState",
    "BreakWitness",
    "initial_state",
    "teacher_reply",
    "parallel_teacher_reply",
    "PrimeFactorTeacher",
    "ParallelPrimeFactorTeacher",
    "obvious_partitions",
    "obvious_numbers",
    "find_break",
    "break_holds",
    "detect_break",
]


@dataclass(frozen=True)
class ObviousState:
    base: FactorBase
    partition: AtomPartition
    round: int = 1

    def is_obvious(self, n: int) -> bool:
        if n == 1:
            return True
        if n < 1 or self.base.x % n:
            return False
        s = self.base.index_set(n)
        return all(a <= s or not (a & s) for a in self.partition.atoms)


def initial_state(base: FactorBase) -> ObviousState:
    return ObviousState(base, AtomPartition.trivial(base.d), 1)


def _index_set(base: FactorBase, v: Any) -> frozenset[int] | None:
    """Positions of base primes dividing ``v``, i.e. the set of gcd(v, x)."""
    if not isinstance(v, int) or v < 1:
        return None
    return base.index_set(v)


def _incorporate(partition: AtomPartition, base: FactorBase, values) -> AtomPartition:
    for v in values:
        s = _index_set(base, v)
        if s is not None:
            partition = refine(partition, s)
    return partition


def _rule(state: ObviousState, y: Any) -> tuple[int, frozenset[int]]:
    """Reply and divided-by primes for one answer against a fixed state."""
    base = state.base
    x = base.x
    if not isinstance(y, int) or y < 2 or x % y:
        return 1, frozenset()
    ys = base.index_set(y)
    if len(ys) == 1:
        return y, frozenset()
    pieces = [a & ys for a in state.partition.atoms if a & ys]
    if len(pieces) >= 2:
        # any proper gcd is a union of pieces, so the smallest is a single piece
        return min(base.product(p) for p in pieces), frozenset()
    order = sorted(ys)
    half = len(order) // 2
    return base.product(order[:half]), frozenset(base.prime(i) for i in order[half:])


def teacher_reply(state: ObviousState, y: Any) -> tuple[int, frozenset[int], ObviousState]:
    z, divided = _rule(state, y)
    partition = _incorporate(state.partition, state.base, (y, z))
    return z, divided, ObviousState(state.base, partition, state.round + 1)


def parallel_teacher_reply(
    state: ObviousState, y_seq: Any, width: int | None = None
) -> tuple[Any, frozenset[int], ObviousState]:
    """Coordinate-wise replies, all against the round-start state."""
    if not isinstance(y_seq, tuple) or (width is not None and len(y_seq) != width):
        return 1, frozenset(), ObviousState(state.base, state.partition, state.round + 1)
    replies = []
    divided: set[int] = set()
    for y in y_seq:
        z, dv = _rule(state, y)
        replies.append(z)
        divided |= dv
    partition = _incorporate(state.partition, state.base, (*y_seq, *replies))
    return tuple(replies), frozenset(divided), ObviousState(state.base, partition, state.round + 1)


class _CachingTeacher:
    """Teacher callable ``t(x, y_1..y_i)``; states are memoized per answer prefix,
    so a replayed prefix always yields the same state."""

    def __init__(self, base: FactorBase):
        self.base = base
        self._states: dict[tuple, ObviousState] = {(): initial_state(base)}

    def _step(self, state: ObviousState, y: Any):
        raise NotImplementedError

    def _state(self, prefix: tuple) -> ObviousState:
        if prefix not in self._states:
            prev = self._state(prefix[:-1])
            self._states[prefix] = self._step(prev, prefix[-1])[2]
        return self._states[prefix]

    def __call__(self, x: int, answers: Sequence) -> tuple[Any, frozenset[int]]:
        if x != self.base.x:
            raise ValueError(f"teacher built for x={self.base.x}, got x={x}")
        answers = tuple(answers)
        if not answers:
            raise ValueError("teacher needs at least one answer")
        state = self._state(answers[:-1])
        z, divided, new_state = self._step(state, answers[-1])
        self._states.setdefault(answers, new_state)
        return z, divided

    def state_after(self, answers: Sequence) -> ObviousState:
        return self._state(tuple(answers))


class PrimeFactorTeacher(_CachingTeacher):
    def _step(self, state, y):
        return teacher_reply(state, y)


class ParallelPrimeFactorTeacher(_CachingTeacher):
    def __init__(self, base: FactorBase, width: int | None = None):
        super().__init__(base)
        self.width = width

    def _step(self, state, y):
        return parallel_teacher_reply(state, y, self.width)


def obvious_partitions(transcript: Transcript, base: FactorBase) -> list[AtomPartition]:
    """Field of obvious sets at the start of each round 1..c, rebuilt from
    the transcript alone."""
    partition = AtomPartition.trivial(base.d)
    out = [partition]
    for r in transcript.rounds[:-1]:
        partition = _incorporate(partition, base, (*coordinates(r.y), *coordinates(r.z)))
        out.append(partition)
    return out


def obvious_numbers(partition: AtomPartition, base: FactorBase) -> list[int]:
    """All obvious numbers (1 included), ascending."""
    products = [base.product(a) for a in partition.atoms]
    out = {1}
    for k in range(1, len(products) + 1):
        for chosen in combinations(products, k):
            out.add(math.prod(chosen))
    return sorted(out)


@dataclass(frozen=True)
class BreakWitness:
    """``perm[j]`` is the original base index placed at teacher position j+1;
    ``pair`` holds original base indices."""

    perm: tuple[int, ...]
    round: int
    pair: tuple[int, int]
    transcript: Transcript = field(compare=True)

    def to_dict(self) -> dict:
        return {
            "perm": list(self.perm),
            "round": self.round,
            "pair": list(self.pair),
            "transcript": self.transcript.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BreakWitness":
        return cls(
            tuple(data["perm"]),
            int(data["round"]),
            tuple(data["pair"]),
            Transcript.from_dict(data["transcript"]),
        )


def _separates(y: Any, pl: int, pk: int) -> bool:
    return isinstance(y, int) and y >= 1 and math.gcd(y, pl * pk) in (pl, pk)


def _pair_kept(divided_by: frozenset, pl: int, pk: int) -> bool:
    return (pl in divided_by) == (pk in divided_by)


def find_break(transcript: Transcript, base: FactorBase) -> tuple[int, tuple[int, int]] | None:
    """First (round, pair) at which an answer separates a pair that no earlier
    division separated. Rounds are scanned in order, pairs lexicographically."""
    rounds = transcript.rounds
    d = base.d
    for i, r in enumerate(rounds, 1):
        for l, k in combinations(range(1, d + 1), 2):
            pl, pk = base.prime(l), base.prime(k)
            if not _separates(r.y, pl, pk):
                continue
            if all(_pair_kept(rounds[j].divided_by, pl, pk) for j in range(i - 1)):
                return i, (l, k)
    return None


def break_holds(witness: BreakWitness, base: FactorBase) -> bool:
    """Re-validate a witness against its own transcript."""
    t = witness.transcript
    l, k = witness.pair
    if not (1 <= l < k <= base.d) or not (1 <= witness.round <= len(t.rounds)):
        return False
    if t.x != base.x or sorted(witness.perm) != list(range(1, base.d + 1)):
        return False
    pl, pk = base.prime(l), base.prime(k)
    i = witness.round
    return _separates(t.rounds[i - 1].y, pl, pk) and all(
        _pair_kept(t.rounds[j].divided_by, pl, pk) for j in range(i - 1)
    )


def detect_break(student: Student, base: FactorBase, c: int) -> BreakWitness | None:
    """Search permutations of the base (lexicographic) for a break."""
    x = base.x
    for perm in permutations(range(1, base.d + 1)):
        teacher = PrimeFactorTeacher(base.permuted(perm))
        t = run_protocol(student, teacher, c, x)
        found = find_break(t, base)
        if found is not None:
            i, pair = found
            return BreakWitness(perm, i, pair, t)
    return None
