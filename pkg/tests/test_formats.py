import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import DATA, FIXTURES, LIN
from normsim.formats import (
    FormatError, certificate_to_json, dump_automaton, dump_certificate, load_automaton,
    load_execution, parse_automaton, parse_certificate,
)
from normsim.generators import random_automaton
from normsim.lts import Action, Relation
from normsim.simulation import Backward, Forward, History, NormTable, Prophecy, Refinement


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_data_files_match_fixtures(name):
    assert load_automaton(DATA / f"{name.lower()}.aut") == FIXTURES[name]


def test_comments_and_implicit_states():
    A = parse_automaton("# a chain\nstart q0\nstep q0 a q1   # first\nstep q1 b q2\n")
    assert A == LIN


def test_declared_action_without_step():
    A = parse_automaton("start q\naction c\n")
    assert Action("c") in A.external


@pytest.mark.parametrize("text", ["start q0\nstep q0 a\n", "state x\n", "start q\nfoo bar\n",
                                  "start q\nstep q tau(1) q\n"])
def test_bad_automata(text):
    with pytest.raises(FormatError):
        parse_automaton(text)


def test_error_line_number():
    with pytest.raises(FormatError, match="line 2"):
        parse_automaton("start q\nstep q\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_automaton_roundtrip(seed):
    A = random_automaton(random.Random(seed))
    assert parse_automaton(dump_automaton(A)) == A


def test_execution_file(tmp_path):
    p = tmp_path / "e.exec"
    p.write_text("q0 a q1\n  b q2  # done\n")
    assert str(load_execution(p)) == "q0 a q1 b q2"


def test_spec_json_shapes():
    fwd = parse_certificate({
        "kind": "forward", "relation": [["s", "u"]],
        "norm": [{"key": {"step": ["s", "a", "t"]}, "state": "u", "value": 2},
                 {"key": {"start": "s"}, "state": "u", "value": 1}],
    })
    assert fwd.norm(("s", Action("a"), "t"), "u") == 2 and fwd.norm("s", "u") == 1
    ref = parse_certificate({"kind": "refinement", "map": {"s": "u", "t": "v"}, "domain_predicate": ["s"]})
    assert ref.map == {"s": "u"}
    bwd = parse_certificate({"kind": "backward", "relation": [["s", "u"]], "Q": ["u"]})
    assert bwd.Q == {"u"}


@pytest.mark.parametrize("cert", [
    Refinement({"q0": "q0"}),
    Forward(Relation([("q0", "q0")]), NormTable({(("q0", Action("send", (1,)), "q1"), "q0"): 3})),
    Backward(Relation([("q0", "q0")]), NormTable({("q0", "q0"): 1}), frozenset({"q0"})),
    History({"x": "q0"}, NormTable()),
    Prophecy({"x": "q0"}, NormTable(), True),
    Relation([("a", "b")]),
])
def test_certificate_roundtrip(cert):
    text = dump_certificate(cert)
    again = parse_certificate(json.loads(text))
    assert certificate_to_json(again) == certificate_to_json(cert)
    assert again == cert


def test_unknown_kind():
    with pytest.raises(FormatError):
        parse_certificate({"kind": "magic"})
