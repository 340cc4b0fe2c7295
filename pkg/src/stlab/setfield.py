"""Finite fields of sets over the index universe {1..d}.

A finite field of sets is exactly the family of unions of its atoms, so a
field is stored as its atom partition. Membership and refinement are then
linear in the universe size instead of exponential in the number of atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

IndexSet = frozenset[int]


def universe(size: int) -> IndexSet:
    if size < 1:
        raise ValueError("universe size must be at least 1")
    return frozenset(range(1, size + 1))


@dataclass(frozen=True)
class AtomPartition:
    """Atoms of a field of sets, kept sorted by least element."""

    size: int
    atoms: tuple[IndexSet, ...]

    def __post_init__(self):
        atoms = tuple(sorted((frozenset(a) for a in self.atoms), key=min))
        seen: set[int] = set()
        for a in atoms:
            if not a:
                raise ValueError("atoms must be non-empty")
            if seen & a:
                raise ValueError("atoms must be pairwise disjoint")
            seen |= a
        if seen != universe(self.size):
            raise ValueError("atoms must cover the universe")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def trivial(cls, size: int) -> "AtomPartition":
        return cls(size, (universe(size),))

    def __len__(self) -> int:
        return len(self.atoms)

    def atom_of(self, i: int) -> IndexSet:
        for a in self.atoms:
            if i in a:
                return a
        raise KeyError(i)

    def sizes(self) -> list[int]:
        return [len(a) for a in self.atoms]


def _check_subset(a: Iterable[int], size: int) -> IndexSet:
    a = frozenset(a)
    if not a <= universe(size):
        raise ValueError(f"set {sorted(a)} is not inside universe 1..{size}")
    return a


def generate(generators: Iterable[Iterable[int]], size: int) -> AtomPartition:
    """Atom partition of the field generated by ``generators``.

    Two indices share an atom iff every generator contains both or neither,
    i.e. the atoms are the classes of equal membership pattern.
    """
    gens = [_check_subset(g, size) for g in generators]
    classes: dict[tuple[bool, ...], set[int]] = {}
    for i in range(1, size + 1):
        classes.setdefault(tuple(i in g for g in gens), set()).add(i)
    return AtomPartition(size, tuple(frozenset(c) for c in classes.values()))


def contains(partition: AtomPartition, a: Iterable[int]) -> bool:
    """True iff ``a`` is a union of atoms (the empty set included)."""
    a = _check_subset(a, partition.size)
    return all(atom <= a or not (atom & a) for atom in partition.atoms)


def refine(partition: AtomPartition, a: Iterable[int]) -> AtomPartition:
    """Field generated by the old field together with ``a``."""
    a = _check_subset(a, partition.size)
    out = []
    for atom in partition.atoms:
        inside, outside = atom & a, atom - a
        out.extend(part for part in (inside, outside) if part)
    if len(out) == len(partition.atoms):
        return partition
    return AtomPartition(partition.size, tuple(out))


def find_unseparated_pair(partition: AtomPartition, a: Iterable[int]) -> tuple[int, int]:
    """Indices ``(u, v)`` with ``u`` in ``a``, ``v`` not, sharing an atom.

    No member of the field can then contain exactly one of them. Picks the
    first atom (by least element) that ``a`` splits, then the least u in
    ``a`` and least v outside ``a`` within that atom.
    """
    a = _check_subset(a, partition.size)
    for atom in partition.atoms:
        inside, outside = atom & a, atom - a
        if inside and outside:
            return min(inside), min(outside)
    raise ValueError(f"{sorted(a)} belongs to the field; no unseparated pair exists")


def members(partition: AtomPartition) -> Iterator[IndexSet]:
    """Every set of the field (all 2**len(atoms) unions of atoms)."""
    atoms = partition.atoms
    for k in range(len(atoms) + 1):
        for chosen in combinations(atoms, k):
            yield frozenset().union(*chosen)


def all_partitions(size: int) -> Iterator[AtomPartition]:
    """Every partition of {1..size}, i.e. every field of sets over it."""

    def grow(i: int, blocks: list[list[int]]):
        if i > size:
            yield AtomPartition(size, tuple(frozenset(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            yield from grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from grow(i + 1, blocks)
        blocks.pop()

    yield from grow(1, [])
