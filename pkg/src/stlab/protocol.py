"""Generic student-teacher protocol engine.

A run of ``(s, t, c)`` on input ``x`` alternates student answers and teacher
replies: y1, z1, y2, z2, ..., y_c. The student sees x and the replies so far;
the teacher sees x and the answers so far. Answers and replies are ints, or
tuples of ints for parallel (width > 1) protocols.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, Sequence, Union

from .numtheory import is_prime

Value = Union[int, tuple]


class ProtocolError(RuntimeError):
    """A student or teacher raised during a run; ``round`` is 1-based."""

    def __init__(self, round_index: int, role: str, cause: BaseException):
        super().__init__(f"{role} failed at round {round_index}: {cause!r}")
        self.round = round_index
        self.role = role


@dataclass(frozen=True)
class Student:
    """Strategy ``answer(x, replies) -> y``; must be deterministic."""

    answer: Callable[[int, tuple], Any]
    width: int = 1
    name: str = "student"

    def __call__(self, x: int, replies: Sequence = ()) -> Any:
        return self.answer(x, tuple(replies))


class Teacher(Protocol):
    def __call__(self, x: int, answers: tuple) -> tuple[Any, frozenset]:
        """Reply to the last answer; returns ``(z, divided_by)``."""


@dataclass(frozen=True)
class Round:
    y: Any
    z: Any = None
    divided_by: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class Transcript:
    """The computation of one run. The last round carries no reply and an
    empty divided-by set."""

    x: int
    c: int
    rounds: tuple[Round, ...]
    width: int = 1

    @property
    def answers(self) -> tuple:
        return tuple(r.y for r in self.rounds)

    @property
    def replies(self) -> tuple:
        return tuple(r.z for r in self.rounds[:-1])

    def to_dict(self) -> dict:
        return {
            "x": str(self.x),
            "c": self.c,
            "width": self.width,
            "rounds": [
                {
                    "y": _encode(r.y),
                    "z": None if r.z is None else _encode(r.z),
                    "divided_by": _encode_factors(r.divided_by),
                }
                for r in self.rounds
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        rounds = tuple(
            Round(
                _decode(r["y"]),
                None if r["z"] is None else _decode(r["z"]),
                frozenset(_decode_factor(f) for f in r["divided_by"]),
            )
            for r in data["rounds"]
        )
        return cls(int(data["x"]), int(data["c"]), rounds, int(data.get("width", 1)))

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_dict(json.loads(text))


def _encode(v: Any):
    if isinstance(v, (tuple, list)):
        return [_encode(e) for e in v]
    return str(v)


def _decode(v: Any):
    if isinstance(v, list):
        return tuple(_decode(e) for e in v)
    return int(v)


def _factor_key(f) -> tuple:
    return (0, f, "") if isinstance(f, int) else (1, 0, str(f))


def _encode_factors(factors) -> list[str]:
    # placeholder tokens such as "*1" stay verbatim and sort after numbers
    return [str(f) for f in sorted(factors, key=_factor_key)]


def _decode_factor(s: str):
    return s if s.startswith("*") else int(s)


def normalize(v: Any) -> Any:
    """Lists become tuples so answers are hashable and serialize uniformly."""
    if isinstance(v, list):
        v = tuple(v)
    if isinstance(v, tuple):
        return tuple(normalize(e) for e in v)
    return v


def run_protocol(student: Student, teacher: Teacher, c: int, x: int) -> Transcript:
    if c < 1:
        raise ValueError("round count c must be at least 1")
    if x < 2:
        raise ValueError("input x must be at least 2")
    answers: list = []
    replies: list = []
    rounds: list[Round] = []
    for i in range(1, c + 1):
        try:
            y = normalize(student(x, tuple(replies)))
        except Exception as exc:
            raise ProtocolError(i, "student", exc) from exc
        answers.append(y)
        if i == c:
            rounds.append(Round(y))
            break
        try:
            z, divided_by = teacher(x, tuple(answers))
        except Exception as exc:
            raise ProtocolError(i, "teacher", exc) from exc
        z = normalize(z)
        replies.append(z)
        rounds.append(Round(y, z, frozenset(divided_by)))
    return Transcript(x, c, tuple(rounds), getattr(student, "width", 1))


def is_prime_divisor(y: Any, x: int) -> bool:
    return isinstance(y, int) and y >= 2 and x % y == 0 and is_prime(y)


def coordinates(y: Any) -> tuple:
    return y if isinstance(y, tuple) else (y,)


def wins(transcript: Transcript) -> int | None:
    """Least round whose answer (or some coordinate of it) is a prime factor of x."""
    x = transcript.x
    for i, r in enumerate(transcript.rounds, 1):
        if any(is_prime_divisor(v, x) for v in coordinates(r.y)):
            return i
    return None


def _refutes(x: int, y: Any, z: Any) -> bool:
    """Whether reply z makes the prime-factor condition on (x, y, z) false,
    given that no reply can make it true for y as a prime divisor."""
    if not isinstance(y, int) or y < 2 or x % y:
        return True
    if is_prime(y):
        return True
    return isinstance(z, int) and 1 < z < y and y % z == 0


def check_correcting(transcript: Transcript) -> bool:
    """Every composite divisor answer got a proper divisor as its reply.

    For tuple answers the condition is existential over coordinates, so it
    only binds when no coordinate is a prime divisor; then each composite
    divisor coordinate needs a proper-divisor reply on that coordinate.
    """
    x = transcript.x
    for r in transcript.rounds[:-1]:
        if isinstance(r.y, tuple):
            if any(is_prime_divisor(v, x) for v in r.y):
                continue
            if not isinstance(r.z, tuple) or len(r.z) != len(r.y):
                if any(isinstance(v, int) and v >= 2 and x % v == 0 for v in r.y):
                    return False
                continue
            if not all(_refutes(x, v, w) for v, w in zip(r.y, r.z)):
                return False
        elif not _refutes(x, r.y, r.z):
            return False
    return True


def replay_answers(student: Student, x: int, replies: Sequence) -> list:
    """The student's own answers y1..y_{k+1} given replies z1..z_k."""
    replies = tuple(replies)
    return [normalize(student(x, replies[:j])) for j in range(len(replies) + 1)]
