"""Validation harness: Monte-Carlo estimates for the blinded reduction,
exact enumerations, exhaustive lemma checks, and report persistence."""

from __future__ import annotations

import csv
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from . import oracles
from .numtheory import FactorBase, PrimeSet
from .protocol import Student, run_protocol, wins
from .reduction import BlindInstance, blind_simulate, convert_parallel_student
from .setfield import (
    AtomPartition,
    all_partitions,
    find_unseparated_pair,
    generate,
    members,
    refine,
)
from .students import (
    obvious_student,
    omniscient_student,
    parallel_obvious_student,
    parallel_omniscient_student,
    trivial_student,
)
from .teacher import (
    ParallelPrimeFactorTeacher,
    PrimeFactorTeacher,
    break_holds,
    detect_break,
    obvious_numbers,
    obvious_partitions,
)

CSV_COLUMNS = ["experiment", "d", "c", "n", "trials", "seed", "successes",
               "empirical", "bound_num", "bound_den", "pass"]
MAX_ENUMERATION = 10**7
SIGMAS = 3


class ReportFormatError(ValueError):
    pass


class LemmaViolation(AssertionError):
    pass


@dataclass
class ExperimentReport:
    name: str
    parameters: dict[str, Any]
    trials: int
    successes: int
    bound: Fraction
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)
    duration: float = 0.0

    @property
    def empirical(self) -> Fraction:
        return Fraction(self.successes, self.trials) if self.trials else Fraction(0)

    def to_dict(self) -> dict:
        return {
            "experiment": self.name,
            "parameters": _encode(self.parameters),
            "trials": self.trials,
            "successes": self.successes,
            "empirical": _encode(self.empirical),
            "bound": _encode(self.bound),
            "passed": self.passed,
            "details": _encode(self.details),
            "duration": self.duration,
        }

    def to_json(self, with_duration: bool = True) -> str:
        data = self.to_dict()
        if not with_duration:
            data.pop("duration")
        return json.dumps(data, indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        report = cls(
            name=data["experiment"],
            parameters=_decode(data["parameters"]),
            trials=int(data["trials"]),
            successes=int(data["successes"]),
            bound=_decode(data["bound"]),
            passed=bool(data["passed"]),
            details=_decode(data.get("details", {})),
            duration=float(data.get("duration", 0.0)),
        )
        if _decode(data["empirical"]) != report.empirical:
            raise ReportFormatError("empirical does not equal successes/trials")
        return report


def _encode(v: Any) -> Any:
    if isinstance(v, Fraction):
        return {"num": str(v.numerator), "den": str(v.denominator)}
    if isinstance(v, dict):
        return {str(k): _encode(e) for k, e in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(e) for e in v]
    return v


def _decode(v: Any) -> Any:
    if isinstance(v, dict):
        if set(v) == {"num", "den"}:
            return Fraction(int(v["num"]), int(v["den"]))
        return {k: _decode(e) for k, e in v.items()}
    if isinstance(v, list):
        return [_decode(e) for e in v]
    return v


def save_report(report: ExperimentReport, path: str | Path) -> None:
    Path(path).write_text(report.to_json() + "\n", encoding="utf-8")


def load_report(path: str | Path) -> ExperimentReport:
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ReportFormatError(f"{path}: {exc.msg} at byte {offset}") from exc
    try:
        return ExperimentReport.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportFormatError(f"{path}: malformed report ({exc})") from exc


def append_csv(report: ExperimentReport, path: str | Path) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    p = report.parameters
    with path.open("a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(CSV_COLUMNS)
        writer.writerow([
            report.name, p.get("d", ""), p.get("c", ""), p.get("n", ""),
            report.trials, p.get("seed", ""), report.successes,
            f"{float(report.empirical):.6f}", report.bound.numerator,
            report.bound.denominator, int(report.passed),
        ])


def strip_duration(report: ExperimentReport) -> str:
    return report.to_json(with_duration=False)


# -- the blinded reduction ---------------------------------------------------

def reduction_bound(d: int) -> Fraction:
    """1 / (4 * C(d, 2))."""
    return Fraction(1, 4 * comb(d, 2))


def lower_threshold(bound: Fraction, trials: int, sigmas: int = SIGMAS) -> float:
    b = float(bound)
    return b - sigmas * math.sqrt(b * (1 - b) / trials)


def omniscient_family(policy: str = "halving") -> Callable[[Sequence[int]], Student]:
    """Students that know the primes of x, taken in ascending order so the
    answers depend on x alone and not on which two primes form pq."""

    def make(primes: Sequence[int]) -> Student:
        return omniscient_student(tuple(sorted(set(primes))), policy)

    return make


def trivial_family() -> Callable[[Sequence[int]], Student]:
    return lambda primes: trivial_student()


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def estimate_reduction_success(
    family: Callable[[Sequence[int]], Student],
    D: PrimeSet | Sequence[int],
    d: int,
    c: int,
    trials: int,
    seed: int,
    name: str = "reduction",
) -> ExperimentReport:
    """Sample p, q, p_1..p_{d-2} from D per trial and run the blinded reduction."""
    pool = tuple(D)
    if len(pool) < 2 or trials < 1 or d < 2:
        raise ValueError("need |D| >= 2, d >= 2 and at least one trial")
    start = time.perf_counter()
    successes = unsound = distinct = distinct_successes = divisibility = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        drawn = [rng.choice(pool) for _ in range(d)]
        p, q, supplied = drawn[0], drawn[1], tuple(drawn[2:])
        pq = p * q
        result = blind_simulate(BlindInstance(pq, supplied, c), family(drawn))
        ok = result in (p, q)
        successes += ok
        if result is not None and not (1 < result < pq and pq % result == 0):
            unsound += 1
        if len(set(drawn)) == d:
            distinct += 1
            distinct_successes += ok
        elif ok and any(pq % s == 0 for s in supplied):
            divisibility += 1
    bound = reduction_bound(d)
    threshold = lower_threshold(bound, trials)
    empirical = Fraction(successes, trials)
    return ExperimentReport(
        name=name,
        parameters={"d": d, "c": c, "n": getattr(D, "bit_length", None), "D_size": len(pool),
                    "trials": trials, "seed": seed},
        trials=trials,
        successes=successes,
        bound=bound,
        passed=empirical >= threshold and unsound == 0,
        details={
            "threshold": threshold,
            "unsound_returns": unsound,
            "distinct_trials": distinct,
            "distinct_successes": distinct_successes,
            "conditional_bound": Fraction(1, comb(d, 2)),
            "divisibility_successes": divisibility,
        },
        duration=time.perf_counter() - start,
    )


# -- exact enumerations --------------------------------------------------------

def verify_pair_sampling(
    omega_size: int, d: int, F: Callable[[frozenset[int]], Iterable[Iterable[int]]]
) -> Fraction:
    """Pr[{x1, x2} in F({x1..xd}) | all distinct], by enumerating every tuple.

    Raises LemmaViolation if the result is below 1 / C(d, 2).
    """
    if not omega_size >= d >= 2:
        raise ValueError("need omega_size >= d >= 2")
    if omega_size**d > MAX_ENUMERATION:
        raise ValueError(f"{omega_size}^{d} tuples exceed the enumeration limit")
    cache: dict[frozenset[int], set[frozenset[int]]] = {}
    hits = total = 0
    for xs in product(range(omega_size), repeat=d):
        t = frozenset(xs)
        if len(t) != d:
            continue
        if t not in cache:
            pairs = {frozenset(pr) for pr in F(t)}
            if not pairs or any(len(pr) != 2 or not pr <= t for pr in pairs):
                raise ValueError(f"F({sorted(t)}) must be a non-empty set of pairs inside T")
            cache[t] = pairs
        total += 1
        hits += frozenset(xs[:2]) in cache[t]
    result = Fraction(hits, total)
    if result < Fraction(1, comb(d, 2)):
        raise LemmaViolation(f"pair sampling probability {result} < 1/C({d},2)")
    return result


def least_pair(t: frozenset[int]) -> list[frozenset[int]]:
    a, b = sorted(t)[:2]
    return [frozenset((a, b))]


def all_pairs(t: frozenset[int]) -> list[frozenset[int]]:
    return [frozenset(pr) for pr in combinations(sorted(t), 2)]


def random_pair_function(omega_size: int, d: int, rng: random.Random):
    """A fixed random F: every d-subset gets a random non-empty set of its pairs."""
    table = {}
    for t in combinations(range(omega_size), d):
        pairs = list(combinations(t, 2))
        k = rng.randint(1, len(pairs))
        table[frozenset(t)] = [frozenset(pr) for pr in rng.sample(pairs, k)]
    return lambda t: table[t]


def verify_distinctness_bound(D_size: int, d: int) -> tuple[Fraction, bool]:
    """prod_{i<d} (1 - i/|D|), and whether |D| >= 4 C(d,2) implies it is >= 1/2."""
    if D_size < d:
        raise ValueError("need D_size >= d")
    value = Fraction(1)
    for i in range(d):
        value *= Fraction(D_size - i, D_size)
    holds = D_size < 4 * comb(d, 2) or value >= Fraction(1, 2)
    return value, holds


def distinctness_sweep(max_d: int = 6, max_size: int = 200) -> ExperimentReport:
    start = time.perf_counter()
    cases = failures = applicable = 0
    for d in range(1, max_d + 1):
        for size in range(d, max_size + 1):
            _, ok = verify_distinctness_bound(size, d)
            cases += 1
            failures += not ok
            applicable += size >= 4 * comb(d, 2)
    return ExperimentReport(
        "distinctness", {"max_d": max_d, "max_size": max_size}, cases, cases - failures,
        Fraction(1, 2), failures == 0, {"applicable_cases": applicable},
        time.perf_counter() - start,
    )


# -- exhaustive lemma checks ---------------------------------------------------

@dataclass
class CheckTally:
    cases: int = 0
    failures: int = 0
    counterexample: Any = None

    def record(self, ok: bool, example: Any = None) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = example


def _refinement_cases(partition: AtomPartition, tally: CheckTally) -> None:
    """Refine by every proper non-empty subset of every atom; the generated
    field must only gain the two halves, and must match ``refine``."""
    size = partition.size
    old = set(partition.atoms)
    for atom in partition.atoms:
        elems = sorted(atom)
        for k in range(1, len(elems)):
            for sub in combinations(elems, k):
                sub = frozenset(sub)
                regenerated = generate([*partition.atoms, sub], size)
                allowed = old | {sub, atom - sub}
                ok = set(regenerated.atoms) <= allowed and refine(partition, sub) == regenerated
                tally.record(ok, {"atoms": [sorted(a) for a in partition.atoms],
                                  "subset": sorted(sub)})


def check_atom_refinement(max_universe: int, max_generators: int = 3) -> CheckTally:
    """Every generator list (ordered, repeats allowed) of up to
    ``max_generators`` sets over every universe up to ``max_universe``."""
    tally = CheckTally()
    per_partition: dict[AtomPartition, CheckTally] = {}
    for size in range(1, max_universe + 1):
        subsets = [frozenset(i for i in range(1, size + 1) if m >> (i - 1) & 1)
                   for m in range(1 << size)]
        for k in range(max_generators + 1):
            for gens in product(subsets, repeat=k):
                partition = generate(gens, size)
                if partition not in per_partition:
                    sub = CheckTally()
                    _refinement_cases(partition, sub)
                    per_partition[partition] = sub
                sub = per_partition[partition]
                tally.cases += sub.cases
                tally.failures += sub.failures
                if sub.counterexample is not None and tally.counterexample is None:
                    tally.counterexample = sub.counterexample
    return tally


def check_unseparated_pairs(max_universe: int) -> CheckTally:
    """For every field over every universe up to ``max_universe`` and every
    set outside it, the returned pair is kept together by all members."""
    tally = CheckTally()
    for size in range(1, max_universe + 1):
        for partition in all_partitions(size):
            field_masks = [oracles.to_mask(m) for m in members(partition)]
            in_field = set(field_masks)
            for mask in range(1 << size):
                if mask in in_field:
                    continue
                a = frozenset(i for i in range(1, size + 1) if mask >> (i - 1) & 1)
                u, v = find_unseparated_pair(partition, a)
                bu, bv = 1 << (u - 1), 1 << (v - 1)
                ok = u != v and bool(mask & bu) != bool(mask & bv) and all(
                    bool(m & bu) == bool(m & bv) for m in field_masks
                )
                tally.record(ok, {"atoms": [sorted(x) for x in partition.atoms],
                                  "set": sorted(a), "pair": [u, v]})
    return tally


def check_field_oracle(max_universe: int, max_generators: int = 3) -> CheckTally:
    """Unions of generated atoms equal the fixpoint closure of the generators."""
    tally = CheckTally()
    for size in range(1, max_universe + 1):
        masks = range(1 << size)
        seen: set[frozenset[int]] = set()
        for k in range(max_generators + 1):
            for gens in combinations(masks, k):
                key = frozenset(gens)
                if key in seen:
                    continue
                seen.add(key)
                sets = [frozenset(i for i in range(1, size + 1) if g >> (i - 1) & 1) for g in gens]
                fast = {oracles.to_mask(m) for m in members(generate(sets, size))}
                tally.record(fast == oracles.closure(gens, size),
                             {"size": size, "generators": [sorted(s) for s in sets]})
    return tally


def check_obvious_sizes(base: FactorBase, c: int, student: Student) -> tuple[CheckTally, list[int]]:
    """With d = 2**c and obvious-only answers, every obvious number at round
    i has 0 or at least 2**(c-i+1) prime factors, and the student never wins.

    Returns the tally and the least atom size seen at each round.
    """
    if base.d != 2**c:
        raise ValueError("needs d = 2**c")
    t = run_protocol(student, PrimeFactorTeacher(base), c, base.x)
    tally = CheckTally()
    least = []
    for i, partition in enumerate(obvious_partitions(t, base), 1):
        bound = 2 ** (c - i + 1)
        counts = [len(base.index_set(o)) for o in obvious_numbers(partition, base)]
        tally.record(all(k == 0 or k >= bound for k in counts),
                     {"round": i, "atoms": [sorted(a) for a in partition.atoms]})
        least.append(min(partition.sizes()))
        tally.record(partition_is_obvious_only(t, i, partition, base), {"round": i, "non_obvious": True})
    tally.record(wins(t) is None, {"won": wins(t)})
    return tally, least


def partition_is_obvious_only(t, i: int, partition: AtomPartition, base: FactorBase) -> bool:
    """Whether answer i lies in the field of round i (the lemma's hypothesis)."""
    y = t.rounds[i - 1].y
    s = base.index_set(y) if isinstance(y, int) and y >= 1 else frozenset()
    return all(a <= s or not (a & s) for a in partition.atoms)


def check_parallel_atoms(base: FactorBase, e: int, width: int) -> CheckTally:
    """Parallel teacher against an all-atoms student: at round i at most 2**i
    atoms, each of size at least 2**(e-i+1), a power of two, and all exactly
    that size while the width covers every atom."""
    if base.d != 2**e:
        raise ValueError("needs d = 2**e")
    student = parallel_obvious_student(width)
    t = run_protocol(student, ParallelPrimeFactorTeacher(base, width), e, base.x)
    tally = CheckTally()
    full_width = True
    for i, partition in enumerate(obvious_partitions(t, base), 1):
        sizes = partition.sizes()
        target = 2 ** (e - i + 1)
        ok = len(partition) <= 2**i and all(s >= target and s & (s - 1) == 0 for s in sizes)
        if full_width:
            ok = ok and set(sizes) == {target}
        full_width = full_width and width >= len(partition)
        tally.record(ok, {"round": i, "width": width, "sizes": sizes})
    tally.record(wins(t) is None, {"won": wins(t)})
    return tally


def first_primes(k: int, odd: bool = False) -> tuple[int, ...]:
    out = []
    n = 3 if odd else 2
    while len(out) < k:
        if oracles.naive_is_prime(n):
            out.append(n)
        n += 1
    return tuple(out)


def obvious_size_suite(max_c: int) -> tuple[CheckTally, dict]:
    """Trivial and obvious students on the first 2**c odd primes, c = 1..max_c."""
    tally = CheckTally()
    observed = {}
    for c in range(1, max_c + 1):
        base = FactorBase(first_primes(2**c, odd=True))
        for student in (trivial_student(), obvious_student("smallest"), obvious_student("largest")):
            sub, least = check_obvious_sizes(base, c, student)
            tally.cases += sub.cases
            tally.failures += sub.failures
            tally.counterexample = tally.counterexample or sub.counterexample
            observed[f"c={c}/{student.name}"] = least
    return tally, observed


def run_lemma_suite(max_universe: int) -> ExperimentReport:
    """Exhaustive checks of the field-of-sets lemmas, plus the teacher size
    lemmas for every d = 2**c not exceeding ``max_universe``."""
    if not 1 <= max_universe <= 8:
        raise ValueError("max_universe must be between 1 and 8")
    start = time.perf_counter()
    checks: dict[str, CheckTally] = {
        "field_oracle": check_field_oracle(min(max_universe, 5)),
        "atom_refinement": CheckTally(),
        "unseparated_pair": check_unseparated_pairs(max_universe),
    }
    refinement = checks["atom_refinement"]
    for size in range(1, max_universe + 1):
        for partition in all_partitions(size):
            _refinement_cases(partition, refinement)
    max_c = max_universe.bit_length() - 1
    if max_c >= 1:
        checks["obvious_size"], observed = obvious_size_suite(max_c)
        parallel = CheckTally()
        for e in range(1, max_c + 1):
            base = FactorBase(first_primes(2**e, odd=True))
            for width in (1, 2, 2 ** (e - 1) if e > 1 else 1, 2**e):
                sub = check_parallel_atoms(base, e, width)
                parallel.cases += sub.cases
                parallel.failures += sub.failures
                parallel.counterexample = parallel.counterexample or sub.counterexample
        checks["parallel_atoms"] = parallel
    else:
        observed = {}
    cases = sum(t.cases for t in checks.values())
    failures = sum(t.failures for t in checks.values())
    details = {name: {"cases": t.cases, "failures": t.failures} for name, t in checks.items()}
    for name, t in checks.items():
        if t.counterexample is not None:
            details[name]["counterexample"] = t.counterexample
    details["least_atom_sizes"] = observed
    return ExperimentReport(
        "lemmas", {"max_universe": max_universe}, cases, cases - failures,
        Fraction(1), failures == 0, details, time.perf_counter() - start,
    )


# -- parallel-to-sequential conversion ----------------------------------------

def run_conversion_check(
    e: int = 2,
    pool: Sequence[int] | None = None,
    seed: int = 0,
    samples: int | None = None,
    widths: Sequence[int] = (1, 2, 4),
) -> ExperimentReport:
    """Convert winning parallel students and look for breaks.

    Bases of d = 2**e primes come from ``pool`` (default: the first eight
    primes), all combinations or ``samples`` of them drawn with ``seed``.
    Winning students reveal a hidden prime at some round; each converted
    student must yield a re-validated break witness. Plain all-atoms students
    are run as a control: converted, they must neither win nor break.
    """
    d = 2**e
    pool = tuple(pool) if pool is not None else first_primes(8)
    bases = [FactorBase(b) for b in combinations(pool, d)]
    if samples is not None:
        bases = random.Random(seed).sample(bases, min(samples, len(bases)))
    start = time.perf_counter()
    c = 2**e - 1
    winning = found = control = control_clean = 0
    failures = []
    for base in bases:
        hidden = tuple(sorted(base.primes))
        for width in widths:
            for reveal in range(1, e + 1):
                sp = parallel_omniscient_student(hidden, width, reveal)
                witness = detect_break(convert_parallel_student(sp, e), base, c)
                winning += 1
                if witness is not None and break_holds(witness, base):
                    found += 1
                elif len(failures) < 5:
                    failures.append({"base": list(base.primes), "width": width, "reveal": reveal})
            plain = convert_parallel_student(parallel_obvious_student(width), e)
            control += 1
            t = run_protocol(plain, PrimeFactorTeacher(base), c, base.x)
            control_clean += wins(t) is None and detect_break(plain, base, c) is None
    details = {"control_runs": control, "control_clean": control_clean, "c": c}
    if failures:
        details["missing_witness"] = failures
    return ExperimentReport(
        "conversion",
        {"e": e, "d": d, "c": c, "pool": list(pool), "seed": seed,
         "samples": samples, "widths": list(widths)},
        winning, found, Fraction(1),
        found == winning and control_clean == control,
        details, time.perf_counter() - start,
    )
