from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from stlab import oracles
from stlab.setfield import (
    AtomPartition,
    all_partitions,
    contains,
    find_unseparated_pair,
    generate,
    members,
    refine,
)


def atoms(p):
    return [set(a) for a in p.atoms]


@pytest.mark.parametrize("gens,expected", [
    ([], [{1, 2, 3, 4}]),
    ([{1, 2}], [{1, 2}, {3, 4}]),
    ([{1, 2}, {2, 3}], [{1}, {2}, {3}, {4}]),
])
def test_generate_examples(gens, expected):
    assert atoms(generate(gens, 4)) == expected


def test_generate_rejects_out_of_universe():
    with pytest.raises(ValueError):
        generate([{1, 5}], 4)


P12_34 = AtomPartition(4, (frozenset({1, 2}), frozenset({3, 4})))


def test_contains_examples():
    assert contains(P12_34, {1, 2, 3, 4})
    assert not contains(P12_34, {1, 3})
    assert contains(P12_34, set())
    assert contains(AtomPartition.trivial(3), set())


def test_refine_examples():
    assert atoms(refine(AtomPartition.trivial(4), {1, 2})) == [{1, 2}, {3, 4}]
    assert refine(P12_34, {1, 2}) == P12_34
    assert atoms(refine(P12_34, {1, 3})) == [{1}, {2}, {3}, {4}]


@pytest.mark.parametrize("partition,a,pair", [
    (P12_34, {1, 3}, (1, 2)),
    (AtomPartition.trivial(4), {4}, (4, 1)),
    (AtomPartition(4, (frozenset({1}), frozenset({2}), frozenset({3, 4}))), {1, 3}, (3, 4)),
])
def test_find_unseparated_pair_examples(partition, a, pair):
    assert find_unseparated_pair(partition, a) == pair


def test_find_unseparated_pair_requires_non_member():
    with pytest.raises(ValueError):
        find_unseparated_pair(P12_34, {1, 2})


def test_partition_invariants_are_enforced():
    with pytest.raises(ValueError):
        AtomPartition(3, (frozenset({1, 2}), frozenset({2, 3})))
    with pytest.raises(ValueError):
        AtomPartition(3, (frozenset({1, 2}),))
    p = AtomPartition(4, (frozenset({3, 4}), frozenset({1, 2})))
    assert p.atoms[0] == {1, 2}


def test_all_partitions_counts_are_bell_numbers():
    assert [sum(1 for _ in all_partitions(n)) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


def _mask(s):
    return oracles.to_mask(s)


@pytest.mark.parametrize("size", range(1, 6))
def test_generated_field_equals_fixpoint_closure(size):
    # every list of up to three generators, order ignored (order-insensitivity is tested below)
    from itertools import combinations_with_replacement
    for k in range(4):
        for gens in combinations_with_replacement(range(1 << size), k):
            sets = [{i for i in range(1, size + 1) if g >> (i - 1) & 1} for g in gens]
            fast = {_mask(m) for m in members(generate(sets, size))}
            assert fast == oracles.closure(gens, size)
            assert {_mask(a) for a in generate(sets, size).atoms} == oracles.atoms_of(fast)


def test_closure_oracle_on_size_7_samples():
    gens = [{1, 2, 3}, {3, 4, 5}, {5, 6, 7}]
    fast = {_mask(m) for m in members(generate(gens, 7))}
    assert fast == oracles.closure([_mask(g) for g in gens], 7)


index_sets = st.frozensets(st.integers(1, 7))


@given(st.lists(index_sets, max_size=4))
def test_generate_is_order_insensitive(gens):
    ref = generate(gens, 7)
    for perm in list(permutations(gens))[:6]:
        assert generate(list(perm), 7) == ref


@given(st.lists(index_sets, max_size=4), index_sets)
def test_refine_equals_generate_with_extra_set(gens, a):
    assert refine(generate(gens, 7), a) == generate([*gens, a], 7)


@given(st.lists(index_sets, max_size=4), index_sets)
def test_refine_is_idempotent_and_fixes_members(gens, a):
    p = generate(gens, 7)
    once = refine(p, a)
    assert refine(once, a) == once
    assert contains(once, a)
    if contains(p, a):
        assert once == p


@pytest.mark.parametrize("size", range(1, 8))
def test_refining_inside_an_atom_adds_only_the_two_halves(size):
    for p in all_partitions(size):
        old = set(p.atoms)
        for atom in p.atoms:
            elems = sorted(atom)
            for mask in range(1, (1 << len(elems)) - 1):
                sub = frozenset(e for j, e in enumerate(elems) if mask >> j & 1)
                assert set(refine(p, sub).atoms) <= old | {sub, atom - sub}


@pytest.mark.parametrize("size", range(1, 7))
def test_unseparated_pair_survives_every_member(size):
    for p in all_partitions(size):
        field = [_mask(m) for m in members(p)]
        assert len(field) == 2 ** len(p)
        for a in range(1 << size):
            if a in field:
                continue
            aset = {i for i in range(1, size + 1) if a >> (i - 1) & 1}
            u, v = find_unseparated_pair(p, aset)
            assert u != v and (u in aset) != (v in aset)
            for m in field:
                assert bool(m >> (u - 1) & 1) == bool(m >> (v - 1) & 1)
