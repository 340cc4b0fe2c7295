"""Student-teacher counterexample protocols for "every number has a prime
factor": the adaptive prime-factor teacher, atom partitions of fields of
sets, the blinded factoring reduction, and a validation harness."""

from .numtheory import FactorBase, PrimeSet
from .protocol import Round, Student, Transcript, check_correcting, run_protocol, wins
from .reduction import BlindInstance, blind_simulate, convert_parallel_student
from .setfield import AtomPartition
from .teacher import BreakWitness, ParallelPrimeFactorTeacher, PrimeFactorTeacher, detect_break

__all__ = [
    "AtomPartition",
    "BlindInstance",
    "BreakWitness",
    "FactorBase",
    "ParallelPrimeFactorTeacher",
    "PrimeFactorTeacher",
    "PrimeSet",
    "Round",
    "Student",
    "Transcript",
    "blind_simulate",
    "check_correcting",
    "convert_parallel_student",
    "detect_break",
    "run_protocol",
    "wins",
]

__version__ = "0.1.0"
