"""Blinded factoring from a winning student, and parallel-to-sequential
student conversion.

The blinded simulation runs the prime-factor teacher on
x = pq * p_1 * ... * p_{d-2} while knowing only the product pq. Base
positions hold either a supplied prime or one of two placeholders "*1",
"*2" standing for the unknown p and q. A value is computable exactly when
it contains both placeholders or neither (pq is known). A teacher step
that would need a value with a single placeholder aborts that ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Any, Sequence

from .numtheory import FactorBase, factor_against_base, split_by_gcd, is_union_of_atoms
from .protocol import Round, Student, Transcript, coordinates, normalize
from .setfield import AtomPartition, refine

STAR1, STAR2 = "*1", "*2"
STARS = frozenset({STAR1, STAR2})

Symbol = Any  # STAR1, STAR2, or a 1-based index into the supplied primes


@dataclass(frozen=True)
class SymbolicDivisor:
    """prod(supplied[i] for i in known) times the placeholders in ``stars``."""

    known: frozenset[int] = frozenset()
    stars: frozenset[str] = frozenset()

    @property
    def computable(self) -> bool:
        return len(self.stars) != 1

    def value(self, pq: int, supplied: Sequence[int]) -> int:
        if not self.computable:
            raise ValueError("value needs exactly one of p, q")
        v = math.prod(supplied[i - 1] for i in self.known)
        return v * pq if self.stars else v

    def tokens(self) -> list:
        return sorted(self.known) + sorted(self.stars)


@dataclass(frozen=True)
class BlindInstance:
    pq: int
    supplied: tuple[int, ...]
    c: int

    def __post_init__(self):
        object.__setattr__(self, "supplied", tuple(int(p) for p in self.supplied))
        if self.c < 1:
            raise ValueError("c must be at least 1")

    @property
    def d(self) -> int:
        return len(self.supplied) + 2

    @property
    def x(self) -> int:
        return self.pq * math.prod(self.supplied)


class Abort(Exception):
    """A teacher step needs a value holding exactly one placeholder."""


@dataclass(frozen=True)
class SymbolicState:
    order: tuple[Symbol, ...]
    partition: AtomPartition

    def positions(self, d: SymbolicDivisor) -> frozenset[int]:
        wanted = set(d.known) | set(d.stars)
        return frozenset(j for j, s in enumerate(self.order, 1) if s in wanted)

    def divisor(self, positions) -> SymbolicDivisor:
        syms = [self.order[j - 1] for j in positions]
        return SymbolicDivisor(
            frozenset(s for s in syms if isinstance(s, int)),
            frozenset(s for s in syms if isinstance(s, str)),
        )


def initial_symbolic_state(order: Sequence[Symbol]) -> SymbolicState:
    return SymbolicState(tuple(order), AtomPartition.trivial(len(order)))


def classify(y: Any, inst: BlindInstance) -> tuple[SymbolicDivisor, bool] | None:
    """Symbolic form of gcd(y, x) and whether y itself divides x.

    Returns None for non-integer or non-positive answers. The caller must
    already have returned any proper factor gcd(y, pq).
    """
    if not isinstance(y, int) or y < 1:
        return None
    known, rest = factor_against_base(y, inst.supplied)
    g = math.gcd(rest, inst.pq)
    if 1 < g < inst.pq:
        raise ValueError("answer shares a proper factor with pq")
    sd = SymbolicDivisor(known, STARS if g == inst.pq else frozenset())
    return sd, sd.value(inst.pq, inst.supplied) == y


def symbolic_teacher_reply(
    state: SymbolicState, y: Any, inst: BlindInstance
) -> tuple[int, frozenset, SymbolicState]:
    """Mirror of the transparent teacher over placeholder positions.

    Returns ``(z, divided_by, state')`` where ``divided_by`` holds supplied
    primes and placeholder tokens. Raises :class:`Abort`.
    """
    pq, supplied = inst.pq, inst.supplied
    cls = classify(y, inst)
    if cls is None:
        return 1, frozenset(), state
    sd, divides = cls
    ys = state.positions(sd)
    partition = refine(state.partition, ys)
    if not divides or y < 2:
        return 1, frozenset(), SymbolicState(state.order, partition)
    if len(ys) == 1:
        z, zs, divided = y, ys, frozenset()
    else:
        pieces = [a & ys for a in state.partition.atoms if a & ys]
        if len(pieces) >= 2:
            values = []
            for piece in pieces:
                pd = state.divisor(piece)
                if not pd.computable:
                    raise Abort("gcd candidate holds a single placeholder")
                values.append((pd.value(pq, supplied), piece))
            z, zs = min(values, key=lambda t: t[0])
            divided = frozenset()
        else:
            order = sorted(ys)
            half = len(order) // 2
            head = state.divisor(order[:half])
            if not head.computable:
                raise Abort("split separates the placeholders")
            z, zs = head.value(pq, supplied), frozenset(order[:half])
            tail = state.divisor(order[half:])
            divided = frozenset(supplied[i - 1] for i in tail.known) | tail.stars
    return z, divided, SymbolicState(state.order, refine(partition, zs))


@dataclass
class BlindRun:
    """Outcome of simulating one placeholder ordering.

    ``status`` is "factor", "abort" or "complete"; ``rounds`` is the
    transcript prefix produced before the run stopped.
    """

    order: tuple[Symbol, ...]
    status: str
    factor: int | None = None
    rounds: list[Round] = field(default_factory=list)

    def transcript(self, inst: BlindInstance) -> Transcript:
        return Transcript(inst.x, inst.c, tuple(self.rounds))


def run_blind_ordering(inst: BlindInstance, student: Student, order: Sequence[Symbol]) -> BlindRun:
    x, pq = inst.x, inst.pq
    state = initial_symbolic_state(order)
    replies: list = []
    rounds: list[Round] = []
    run = BlindRun(tuple(order), "complete", rounds=rounds)
    for i in range(1, inst.c + 1):
        y = normalize(student(x, tuple(replies)))
        if isinstance(y, int) and y >= 1:
            g = math.gcd(y, pq)
            if 1 < g < pq:
                rounds.append(Round(y))
                run.status, run.factor = "factor", g
                return run
        if i == inst.c:
            rounds.append(Round(y))
            break
        try:
            z, divided, state = symbolic_teacher_reply(state, y, inst)
        except Abort:
            rounds.append(Round(y))
            run.status = "abort"
            return run
        replies.append(z)
        rounds.append(Round(y, z, divided))
    return run


def orderings(inst: BlindInstance):
    """Placeholder orderings, lexicographic over positions of (*1, *2, p_1, ..)."""
    return permutations((STAR1, STAR2, *range(1, inst.d - 1)))


def blind_simulate(inst: BlindInstance, student: Student) -> int | None:
    """Try to return a proper factor of ``inst.pq``; None means failure."""
    supplied, pq = inst.supplied, inst.pq
    if pq < 4 or len(set(supplied)) != len(supplied):
        return None
    for p in supplied:
        if 1 < p < pq and pq % p == 0:
            return p
    for order in orderings(inst):
        run = run_blind_ordering(inst, student, order)
        if run.status == "factor":
            return run.factor
    return None


def transparent_base(inst: BlindInstance, order: Sequence[Symbol], p: int, q: int) -> FactorBase:
    """The real permuted base an ordering stands for, given *1 = p and *2 = q."""
    value = {STAR1: p, STAR2: q}
    return FactorBase(tuple(value[s] if isinstance(s, str) else inst.supplied[s - 1] for s in order))


def substitute(transcript: Transcript, p: int, q: int) -> Transcript:
    """Replace placeholder tokens in divided-by sets by true primes."""
    value = {STAR1: p, STAR2: q}
    rounds = tuple(
        Round(r.y, r.z, frozenset(value.get(f, f) for f in r.divided_by))
        for r in transcript.rounds
    )
    return Transcript(transcript.x, transcript.c, rounds, transcript.width)


def block_bounds(i: int) -> range:
    """Sequential rounds 2**(i-1) .. 2**i - 1 used for parallel round i."""
    return range(2 ** (i - 1), 2**i)


def convert_parallel_student(parallel: Student, e: int) -> Student:
    """Sequential student for c = 2**e - 1 rounds simulating ``parallel``.

    Parallel round i is played in the block of sequential rounds
    2**(i-1) .. 2**i - 1: each distinct atom-valued coordinate is asked
    once, ascending, and the rest of the block is padded with 1, which the
    teacher answers with 1 and which adds nothing to the obvious field.
    Replies to the other obvious coordinates are computed locally. Once the parallel student produces a coordinate whose gcd with
    x is not obvious, that coordinate is answered for every remaining round.
    """
    if e < 1:
        raise ValueError("e must be at least 1")

    def answer(x, replies):
        r = len(replies) + 1
        history: list = []
        p_replies: list = []
        for i in range(1, e + 1):
            atoms = split_by_gcd(x, _flat(history) + _flat(p_replies))
            y = normalize(parallel(x, tuple(p_replies)))
            block = block_bounds(i)
            coords = y if isinstance(y, tuple) else ()
            stall = next(
                (v for v in coords
                 if isinstance(v, int) and v >= 1
                 and not is_union_of_atoms(math.gcd(v, x), atoms)),
                None,
            )
            if stall is not None:
                return stall
            queries = sorted({v for v in coords if isinstance(v, int) and v in atoms})
            if len(queries) > len(block):
                raise RuntimeError(
                    f"{len(queries)} atoms asked in parallel round {i}, block holds {len(block)}"
                )
            if r in block:
                k = r - block.start
                return queries[k] if k < len(queries) else 1
            asked = dict(zip(queries, replies[block.start - 1 : block.start - 1 + len(queries)]))
            history.append(y)
            p_replies.append(_parallel_reply(y, x, atoms, asked))
        return x

    return Student(answer, name=f"converted({parallel.name},e={e})")


def _flat(values) -> list:
    out = []
    for v in values:
        out.extend(coordinates(v))
    return out


def _parallel_reply(y: Any, x: int, atoms: list[int], asked: dict[int, Any]) -> Any:
    """The parallel teacher's reply, rebuilt from round-start atoms plus the
    sequential replies to the atom queries."""
    if not isinstance(y, tuple):
        return 1
    out = []
    for v in y:
        if not isinstance(v, int) or v < 2 or x % v:
            out.append(1)
        elif v in asked:
            out.append(asked[v])
        else:
            # an obvious divisor that is not an atom meets at least two atoms
            out.append(min(g for g in (math.gcd(v, a) for a in atoms) if g > 1))
    return tuple(out)
