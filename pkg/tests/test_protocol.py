import json

import pytest
from hypothesis import given, strategies as st

from stlab.numtheory import FactorBase
from stlab.protocol import (
    ProtocolError,
    Round,
    Student,
    Transcript,
    check_correcting,
    replay_answers,
    run_protocol,
    wins,
)
from stlab.students import scripted_student, trivial_student
from stlab.teacher import PrimeFactorTeacher

BASE = FactorBase((2, 3, 5, 7))


def t(rounds, x=210):
    return Transcript(x, len(rounds), tuple(Round(*r) for r in rounds))


def test_single_round_has_no_teacher_turn():
    tr = run_protocol(trivial_student(), PrimeFactorTeacher(BASE), 1, 210)
    assert tr.answers == (210,) and tr.replies == ()


def test_two_rounds_of_constant_student():
    tr = run_protocol(trivial_student(), PrimeFactorTeacher(BASE), 2, 210)
    assert tr.answers == (210, 210) and tr.replies == (6,)
    assert tr.rounds[0].divided_by == {5, 7} and tr.rounds[-1].divided_by == frozenset()


def test_prime_first_answer_wins_round_one():
    tr = run_protocol(scripted_student([7]), PrimeFactorTeacher(BASE), 2, 210)
    assert tr.answers[0] == 7 and wins(tr) == 1


@pytest.mark.parametrize("c,x", [(0, 210), (1, 1)])
def test_run_protocol_rejects_bad_arguments(c, x):
    with pytest.raises(ValueError):
        run_protocol(trivial_student(), PrimeFactorTeacher(BASE), c, x)


def test_raising_student_is_reported_with_round():
    def answer(x, replies):
        if replies:
            raise RuntimeError("boom")
        return x

    with pytest.raises(ProtocolError) as info:
        run_protocol(Student(answer), PrimeFactorTeacher(BASE), 3, 210)
    assert info.value.round == 2 and info.value.role == "student"


def test_teacher_for_other_input_is_reported():
    with pytest.raises(ProtocolError) as info:
        run_protocol(trivial_student(), PrimeFactorTeacher(BASE), 2, 30)
    assert info.value.role == "teacher"


@pytest.mark.parametrize("answers,expected", [
    ((210, 5), 2),
    ((210, 210, 210), None),
    ((4, 210), None),
])
def test_wins(answers, expected):
    tr = t([(y,) for y in answers])
    assert wins(tr) == expected


def test_wins_on_tuple_coordinates():
    tr = Transcript(210, 1, (Round((210, 5)),), width=2)
    assert wins(tr) == 1


@pytest.mark.parametrize("y,z,expected", [(210, 6, True), (210, 210, False), (11, 1, True),
                                          (7, 7, True), (6, 4, False), (6, 3, True)])
def test_check_correcting(y, z, expected):
    assert check_correcting(t([(y, z), (1,)])) is expected


def test_check_correcting_tuple_answers():
    good = Transcript(210, 2, (Round((210, 35), (6, 5)), Round((1, 1))), 2)
    bad = Transcript(210, 2, (Round((210, 35), (6, 35)), Round((1, 1))), 2)
    won = Transcript(210, 2, (Round((210, 7), (210, 7)), Round((1, 1))), 2)
    assert check_correcting(good) and not check_correcting(bad) and check_correcting(won)


def test_json_layout():
    tr = run_protocol(trivial_student(), PrimeFactorTeacher(BASE), 2, 210)
    data = json.loads(tr.to_json())
    assert data == {"x": "210", "c": 2, "width": 1, "rounds": [
        {"y": "210", "z": "6", "divided_by": ["5", "7"]},
        {"y": "210", "z": None, "divided_by": []},
    ]}


def test_placeholder_tokens_sort_after_numbers():
    tr = t([(210, 6, frozenset({"*2", 7, "*1"})), (1,)])
    assert tr.to_dict()["rounds"][0]["divided_by"] == ["7", "*1", "*2"]
    assert Transcript.from_json(tr.to_json()) == tr


values = st.integers(1, 10**30) | st.tuples(st.integers(1, 10**6), st.integers(1, 10**6))


@given(st.lists(st.tuples(values, values, st.frozensets(st.integers(2, 10**20))), min_size=1, max_size=5),
       st.integers(2, 10**40))
def test_transcript_json_round_trip(rows, x):
    rounds = [Round(y, z, dv) for y, z, dv in rows[:-1]] + [Round(rows[-1][0])]
    tr = Transcript(x, len(rounds), tuple(rounds))
    assert Transcript.from_json(tr.to_json()) == tr
    assert Transcript.from_json(tr.to_json()).to_json() == tr.to_json()


def test_replay_answers_reproduces_run():
    tr = run_protocol(scripted_student([210, 10, 5]), PrimeFactorTeacher(BASE), 3, 210)
    assert replay_answers(scripted_student([210, 10, 5]), 210, tr.replies) == list(tr.answers)


def test_list_answers_are_normalized_to_tuples():
    tr = run_protocol(Student(lambda x, r: [x, 7], width=2), lambda x, a: ((1, 1), ()), 2, 210)
    assert tr.answers == ((210, 7), (210, 7)) and tr.width == 2
