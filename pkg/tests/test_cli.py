import io
import json
import shutil
from importlib import resources

import jsonschema
import pytest

from normsim.cli import FAILED, OK, USAGE, run
from normsim.formats import dump_automaton, dump_certificate, load_automaton, load_certificate
from normsim.simulation import Forward, Refinement, check_history, check_step_refinement
from normsim.speclang.examples import channel_example
from normsim.speclang.fixtures import fixture_path

from conftest import DATA

SCHEMA = json.loads(resources.files("normsim").joinpath("schemas/cli_output.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(x) for x in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--format", "json")
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    return code, payload


@pytest.fixture(scope="module")
def example(tmp_path_factory):
    d = tmp_path_factory.mktemp("channel")
    ex = channel_example()
    (d / "ch.aut").write_text(dump_automaton(ex.channel))
    (d / "wide.aut").write_text(dump_automaton(ex.channel_wide))
    (d / "two.aut").write_text(dump_automaton(ex.two_channels))
    (d / "ref.json").write_text(dump_certificate(ex.refinement))
    (d / "fwd.json").write_text(dump_certificate(ex.forward))
    return d


def test_check_forward_accepts(example):
    code, out, _ = call("check", "--kind", "forward", "--lower", example / "ch.aut",
                        "--upper", example / "two.aut", "--cert", example / "fwd.json")
    assert code == OK and out.startswith("accepted")


def test_check_refinement_json(example):
    code, payload = call_json("check", "--kind", "refinement", "--lower", example / "two.aut",
                              "--upper", example / "wide.aut", "--cert", example / "ref.json")
    assert code == OK and payload["accepted"] and payload["violations"] == []


def test_check_rejects_with_report(tmp_path):
    (tmp_path / "r.json").write_text(json.dumps({"kind": "refinement", "map": {"t0": "q0", "t1": "q0", "t2": "q2"}}))
    code, payload = call_json("check", "--kind", "refinement", "--lower", DATA / "tau1.aut",
                              "--upper", DATA / "lin.aut", "--cert", tmp_path / "r.json")
    assert code == FAILED and not payload["accepted"]
    assert payload["violations"]


def test_check_kind_mismatch(example):
    code, payload = call_json("check", "--kind", "backward", "--lower", example / "ch.aut",
                              "--upper", example / "two.aut", "--cert", example / "fwd.json")
    assert code == USAGE and "forward" in payload["error"]


def test_include_witness():
    code, out, _ = call("include", "--lower", DATA / "lin.aut", "--upper", DATA / "tau1.aut")
    assert code == FAILED and "a b" in out
    code, payload = call_json("include", "--lower", DATA / "lin.aut", "--upper", DATA / "tau1.aut")
    assert payload == {"command": "include", "holds": False, "witness": "a b"}
    code, payload = call_json("include", "--lower", DATA / "tau1.aut", "--upper", DATA / "lin.aut")
    assert code == OK and payload["holds"] and payload["witness"] is None


def test_missing_file():
    code, _, err = call("include", "--lower", DATA / "nope.aut", "--upper", DATA / "lin.aut")
    assert code == USAGE and "no such file" in err
    code, payload = call_json("include", "--lower", DATA / "nope.aut", "--upper", DATA / "lin.aut")
    assert code == USAGE and "error" in payload


def test_bad_arguments():
    assert call("include", "--lower")[0] == USAGE
    assert call("frobnicate")[0] == USAGE
    assert call("traces", "--spec", DATA / "lin.aut", "--depth", "-1")[0] == USAGE


def test_malformed_automaton(tmp_path):
    (tmp_path / "bad.aut").write_text("start q0\nstep q0 a\n")
    code, _, err = call("traces", "--spec", tmp_path / "bad.aut", "--depth", 2)
    assert code == USAGE and "line 2" in err


def test_traces():
    code, out, _ = call("traces", "--spec", DATA / "lin.aut", "--depth", 2)
    assert code == OK and out.splitlines() == ["λ", "a", "a b"]
    code, payload = call_json("traces", "--spec", DATA / "lin.aut", "--depth", 1)
    assert payload["traces"] == ["", "a"]


def test_find_and_write(tmp_path):
    target = tmp_path / "cert.json"
    code, payload = call_json("find", "--kind", "forward", "--lower", DATA / "tau1.aut",
                              "--upper", DATA / "det1.aut", "-o", target)
    assert code == OK and payload["found"]
    cert = load_certificate(target)
    assert isinstance(cert, Forward)
    code, _, _ = call("check", "--kind", "forward", "--lower", DATA / "tau1.aut",
                      "--upper", DATA / "det1.aut", "--cert", target)
    assert code == OK


def test_find_none():
    code, payload = call_json("find", "--kind", "refinement", "--lower", DATA / "lin.aut",
                              "--upper", DATA / "tau1.aut")
    assert code == FAILED and payload["found"] is False


def test_find_budget():
    code, payload = call_json("find", "--kind", "forward", "--lower", DATA / "lin.aut",
                              "--upper", DATA / "tau1.aut", "--budget", 2)
    assert code == USAGE and "budget" in payload["error"].lower()


def test_correspond(tmp_path, example):
    (tmp_path / "run.txt").write_text("buffer=[] send(0) buffer=[0] send(1) buffer=[0,1]\n"
                                      "receive(0) buffer=[1]\n")
    code, payload = call_json("correspond", "--lower", example / "ch.aut", "--upper", example / "two.aut",
                              "--cert", example / "fwd.json", "--exec", tmp_path / "run.txt")
    assert code == OK and payload["ok"]
    assert payload["trace"] == "send(0) send(1) receive(0)"
    assert [0, 0] in payload["index_relation"]


def test_correspond_not_related(tmp_path, example):
    (tmp_path / "run.txt").write_text("nowhere\n")
    code, _, out = call("correspond", "--lower", example / "ch.aut", "--upper", example / "two.aut",
                        "--cert", example / "fwd.json", "--exec", tmp_path / "run.txt")
    assert code == FAILED


def test_unfold(tmp_path):
    out = tmp_path / "u.aut"
    code, payload = call_json("unfold", "--spec", DATA / "lin.aut", "-o", out)
    assert code == OK and payload["states"] == 3
    U = load_automaton(out)
    last = load_certificate(str(out) + ".last")
    assert isinstance(last, Refinement)
    assert check_history(load_automaton(DATA / "lin.aut"), U, last.map)


def test_superpose(tmp_path, example):
    out = tmp_path / "c.aut"
    code, payload = call_json("superpose", "--lower", example / "ch.aut", "--upper", example / "two.aut",
                              "--rel", example / "fwd.json", "-o", out)
    assert code == OK and payload["states"] > 0
    C = load_automaton(out)
    pi2 = load_certificate(str(out) + ".pi2")
    assert check_step_refinement(C, load_automaton(example / "two.aut"), pi2.map)


def test_elaborate(tmp_path):
    out = tmp_path / "ch.aut"
    code, payload = call_json("elaborate", "--spec", fixture_path("channel.spec"),
                              "--nat-max", 2, "--seq-max", 2, "-o", out)
    assert code == OK and payload["states"] == 7
    assert len(load_automaton(out).states) == 7


def test_elaborate_syntax_error(tmp_path):
    (tmp_path / "bad.spec").write_text("automaton X states\n")
    code, _, err = call("elaborate", "--spec", tmp_path / "bad.spec", "--nat-max", 2,
                        "--seq-max", 2, "-o", tmp_path / "x.aut")
    assert code == USAGE and err


def test_vcgen(tmp_path):
    out = tmp_path / "vc.smt2"
    code, payload = call_json("vcgen", "--kind", "refinement", "--lower", fixture_path("twochannels.spec"),
                              "--upper", fixture_path("channel.spec"),
                              "--cert", fixture_path("twochannels_to_channel.refinement"), "-o", out)
    assert code == OK and len(payload["groups"]) == 8
    assert out.read_text().startswith("; step refinement")


@pytest.mark.skipif(shutil.which("z3") is None, reason="no z3 on PATH")
def test_vcgen_with_solver(tmp_path):
    code, payload = call_json("vcgen", "--kind", "forward", "--lower", fixture_path("channel.spec"),
                              "--upper", fixture_path("twochannels.spec"),
                              "--cert", fixture_path("channel_to_twochannels.forward"),
                              "-o", tmp_path / "vc.smt2", "--solver", shutil.which("z3"))
    assert code == OK and set(payload["solver"].values()) == {"unsat"}


def test_vcgen_solver_missing(tmp_path):
    code, _, err = call("vcgen", "--kind", "forward", "--lower", fixture_path("channel.spec"),
                        "--upper", fixture_path("twochannels.spec"),
                        "--cert", fixture_path("channel_to_twochannels.forward"),
                        "-o", tmp_path / "vc.smt2", "--solver", tmp_path / "no-solver")
    assert code == USAGE and "solver" in err
