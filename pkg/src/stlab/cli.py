"""Command line: ``stlab {simulate,blind-factor,verify,experiment,play}``.

Exit codes: 0 success or pass, 1 negative result (lose, FAIL, bound
missed), 2 usage or input error. The default seed comes from the
``STLAB_SEED`` environment variable (0 when unset).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Callable, Sequence

from . import experiments as ex
from .numtheory import FactorBase, is_prime, primes_of_bitlength, sample_distinct_primes
from .protocol import Round, Student, Transcript, run_protocol, wins
from .reduction import BlindInstance, blind_simulate
from .students import (
    POLICIES,
    factoring_oracle_student,
    obvious_student,
    omniscient_student,
    parallel_obvious_student,
    parallel_omniscient_student,
    trial_division_student,
    trivial_student,
)
from .teacher import ParallelPrimeFactorTeacher, PrimeFactorTeacher

SEED_ENV = "STLAB_SEED"

STUDENT_NAMES = ("trivial", "obvious", "omniscient", "trial", "parallel-obvious",
                 "parallel-omniscient")


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers: {text!r}")


def parse_primes(text: str) -> FactorBase:
    primes = parse_int_list(text, "--primes")
    if not primes:
        raise UsageError("--primes is empty")
    if len(set(primes)) != len(primes):
        raise UsageError(f"--primes has duplicates: {text}")
    composite = [p for p in primes if not is_prime(p)]
    if composite:
        raise UsageError(f"--primes has non-primes: {', '.join(map(str, composite))}")
    return FactorBase(primes)


def resolve_base(args) -> tuple[FactorBase, bool]:
    """The factor base and whether it was given explicitly (visible)."""
    if args.primes:
        return parse_primes(args.primes), True
    if args.bits is None or args.d is None:
        raise UsageError("give --primes, or both --bits and --d")
    rng = random.Random(args.seed)
    try:
        return FactorBase(sample_distinct_primes(args.bits, args.d, rng)), False
    except ValueError as exc:
        raise UsageError(str(exc))


def build_student(spec: str, base: FactorBase | None, width: int = 1) -> Student:
    name, _, param = spec.partition(":")
    if name == "trivial":
        return trivial_student()
    if name == "obvious":
        sel = param or "smallest"
        if sel not in ("smallest", "largest"):
            raise UsageError(f"obvious selector must be smallest or largest, got {sel!r}")
        return obvious_student(sel)
    if name == "omniscient":
        policy = param or "halving"
        if policy not in POLICIES:
            raise UsageError(f"omniscient policy must be one of {', '.join(POLICIES)}")
        return omniscient_student(base, policy) if base else factoring_oracle_student(policy)
    if name == "trial":
        try:
            budget = int(param) if param else 100
        except ValueError:
            raise UsageError(f"trial budget must be an integer, got {param!r}")
        return trial_division_student(budget)
    if name == "parallel-obvious":
        return parallel_obvious_student(width)
    if name == "parallel-omniscient":
        if base is None:
            raise UsageError("parallel-omniscient needs a known base")
        reveal = int(param) if param.isdigit() else 1
        return parallel_omniscient_student(tuple(sorted(base.primes)), width, reveal)
    raise UsageError(f"unknown student {name!r}; choose from {', '.join(STUDENT_NAMES)}")


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")


def describe(t: Transcript) -> str:
    lines = [f"x = {t.x}"]
    for i, r in enumerate(t.rounds, 1):
        line = f"round {i}: y = {r.y}"
        if r.z is not None:
            line += f", z = {r.z}"
            if r.divided_by:
                line += f", divided by {sorted(r.divided_by)}"
        lines.append(line)
    return "\n".join(lines)


def cmd_simulate(args) -> int:
    base, _ = resolve_base(args)
    width = args.parallel or 1
    student = build_student(args.student, base, width)
    if args.parallel:
        teacher = ParallelPrimeFactorTeacher(base, width)
        student = Student(student.answer, width, student.name)
    else:
        teacher = PrimeFactorTeacher(base)
    t = run_protocol(student, teacher, args.rounds, base.x)
    _write(args.out, t.to_json())
    print(describe(t))
    won = wins(t)
    if won is None:
        print("no prime found")
        return 1
    print(f"wins at round {won}")
    return 0


def cmd_blind_factor(args) -> int:
    supplied = parse_int_list(args.supplied, "--supplied") if args.supplied else ()
    if args.pq < 1:
        raise UsageError("--pq must be positive")
    student = build_student(args.student, None)
    result = blind_simulate(BlindInstance(args.pq, supplied, args.rounds), student)
    if result is None:
        print("FAIL")
        return 1
    print(result)
    return 0


def _pair_function(kind: str, omega: int, d: int, seed: int):
    if kind == "least":
        return ex.least_pair
    if kind == "all":
        return ex.all_pairs
    if kind == "random":
        return ex.random_pair_function(omega, d, random.Random(seed))
    raise UsageError(f"unknown pair function {kind!r}")


def run_suite(args) -> ex.ExperimentReport:
    suite = args.suite
    if suite == "lemmas":
        return ex.run_lemma_suite(args.max_universe)
    if suite == "distinctness":
        if args.size is not None:
            value, ok = ex.verify_distinctness_bound(args.size, args.d)
            print(f"product = {value} ~ {float(value):.4f}")
            return ex.ExperimentReport("distinctness", {"D_size": args.size, "d": args.d},
                                       1, int(ok), Fraction(1, 2), ok, {"product": value})
        return ex.distinctness_sweep(args.d, 200)
    if suite == "pair-sampling":
        if args.omega ** args.d > ex.MAX_ENUMERATION:
            raise UsageError(f"enumeration of {args.omega}^{args.d} tuples is infeasible")
        F = _pair_function(args.pairs, args.omega, args.d, args.seed)
        value = ex.verify_pair_sampling(args.omega, args.d, F)
        bound = Fraction(1, comb(args.d, 2))
        print(f"probability = {value}, bound = {bound}")
        return ex.ExperimentReport("pair-sampling",
                                   {"omega_size": args.omega, "d": args.d, "pairs": args.pairs,
                                    "seed": args.seed},
                                   1, int(value >= bound), bound, value >= bound,
                                   {"probability": value})
    if suite == "reduction":
        D = primes_of_bitlength(args.bits)
        name, _, policy = args.student.partition(":")
        if name == "trivial":
            family = ex.trivial_family()
        elif name == "omniscient":
            family = ex.omniscient_family(policy or "halving")
        else:
            raise UsageError("reduction suite supports students trivial and omniscient[:policy]")
        return ex.estimate_reduction_success(family, D, args.d, args.rounds, args.trials, args.seed)
    if suite == "conversion":
        return ex.run_conversion_check(args.e, seed=args.seed, samples=args.samples)
    raise UsageError(f"unknown suite {suite!r}")


def cmd_verify(args) -> int:
    try:
        report = run_suite(args)
    except ex.LemmaViolation as exc:
        print(f"{args.suite}: FAIL ({exc})")
        return 1
    except ValueError as exc:
        raise UsageError(str(exc))
    ex.save_report(report, args.out)
    if args.csv:
        ex.append_csv(report, args.csv)
    print(f"{report.name}: {report.successes}/{report.trials} "
          f"(empirical {float(report.empirical):.4f}, bound {report.bound}) "
          f"{'PASS' if report.passed else 'FAIL'}")
    threshold = report.details.get("threshold")
    if threshold is not None:
        print(f"threshold (bound - 3 sigma) = {threshold:.4f}")
    return 0 if report.passed else 1


def _read_answer(prompt: str, read: Callable[[str], str], out) -> int | None:
    for _ in range(3):
        try:
            text = read(prompt)
        except EOFError:
            return None
        try:
            return int(text.strip())
        except ValueError:
            print(f"not an integer: {text.strip()!r}", file=out)
    return None


def cmd_play(args, read: Callable[[str], str] = input, out=None) -> int:
    out = out or sys.stdout
    base, visible = resolve_base(args)
    x = base.x
    teacher = PrimeFactorTeacher(base)
    print(f"x = {x}" + (f" = {' * '.join(map(str, base.primes))}" if visible else ""), file=out)
    print(f"{args.rounds} rounds; name a prime factor of x.", file=out)
    answers: list[int] = []
    rounds: list[Round] = []
    result = 1
    for i in range(1, args.rounds + 1):
        y = _read_answer(f"round {i} y = ", read, out)
        if y is None:
            print("aborted: no valid answer", file=out)
            return 2
        answers.append(y)
        if y >= 2 and x % y == 0 and is_prime(y):
            rounds.append(Round(y))
            print(f"you win: {y} is a prime factor", file=out)
            result = 0
            break
        if i == args.rounds:
            rounds.append(Round(y))
            print("you lose: no prime factor named", file=out)
            break
        z, divided = teacher(x, tuple(answers))
        rounds.append(Round(y, z, divided))
        line = f"teacher: z = {z}"
        if visible and divided:
            line += f", divided by {sorted(divided)}"
        print(line, file=out)
    _write(args.out, Transcript(x, len(rounds), tuple(rounds)).to_json())
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def base_flags(p):
        p.add_argument("--primes", help="comma-separated distinct primes, e.g. 2,3,5,7")
        p.add_argument("--bits", type=int, help="sample primes of this bit length")
        p.add_argument("--d", type=int, help="number of primes to sample")
        p.add_argument("--rounds", type=int, default=2, help="round count c")

    p = sub.add_parser("simulate", help="run one protocol and write its transcript")
    base_flags(p)
    p.add_argument("--student", default="trivial", help="NAME[:param]")
    p.add_argument("--parallel", type=int, metavar="L", help="parallel width")
    p.add_argument("--out", default="transcript.json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("blind-factor", help="blinded reduction: factor pq given extra primes")
    p.add_argument("--pq", type=int, required=True)
    p.add_argument("--supplied", default="", help="comma-separated primes p1..p_{d-2}")
    p.add_argument("--rounds", type=int, default=2)
    p.add_argument("--student", default="omniscient")
    p.set_defaults(func=cmd_blind_factor)

    for name in ("verify", "experiment"):
        p = sub.add_parser(name, help="run a validation suite and write a report")
        p.add_argument("--suite", required=True,
                       choices=["lemmas", "reduction", "pair-sampling", "distinctness", "conversion"])
        p.add_argument("--max-universe", type=int, default=6)
        p.add_argument("--bits", type=int, default=8)
        p.add_argument("--d", type=int, default=4)
        p.add_argument("--rounds", type=int, default=2)
        p.add_argument("--trials", type=int, default=10000)
        p.add_argument("--student", default="omniscient:halving")
        p.add_argument("--size", type=int, help="|D| for the distinctness suite")
        p.add_argument("--omega", type=int, default=5, help="|Omega| for pair sampling")
        p.add_argument("--pairs", default="least", choices=["least", "all", "random"])
        p.add_argument("--e", type=int, default=2, help="parallel rounds for conversion")
        p.add_argument("--samples", type=int, help="sample this many bases (conversion)")
        p.add_argument("--out", default="report.json")
        p.add_argument("--csv", help="append a results row to this CSV file")
        p.set_defaults(func=cmd_verify)

    p = sub.add_parser("play", help="play the student against the teacher")
    base_flags(p)
    p.add_argument("--out", default="transcript.json")
    p.set_defaults(func=cmd_play)

    for p in sub.choices.values():
        p.add_argument("--seed", type=int, default=None,
                       help=f"random seed (default: ${SEED_ENV} or 0)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = default_seed()
        if getattr(args, "rounds", 1) < 1:
            raise UsageError("--rounds must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"stlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
