import random
from pathlib import Path

import pytest

from normsim.lts import TAU, Action, Automaton

DATA = Path(__file__).parent / "data"

a, b = Action("a"), Action("b")

ID1 = Automaton({"q0"}, {"q0"})
LIN = Automaton({"q0", "q1", "q2"}, {"q0"}, [("q0", a, "q1"), ("q1", b, "q2")])
TAU1 = Automaton({"t0", "t1", "t2"}, {"t0"}, [("t0", TAU, "t1"), ("t1", a, "t2")])
NDET = Automaton({"n0", "n1", "n2"}, {"n0"}, [("n0", a, "n1"), ("n0", a, "n2")])
DIV = Automaton({"d0", "d1"}, {"d0"}, [("d0", TAU, "d0"), ("d0", a, "d1")])
DET1 = Automaton({"q0", "q1"}, {"q0"}, [("q0", a, "q1")])
LOOP = Automaton({"u"}, {"u"}, [("u", TAU, "u")])

FIXTURES = {"ID1": ID1, "LIN": LIN, "TAU1": TAU1, "NDET": NDET, "DIV": DIV, "DET1": DET1}


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def data_dir():
    return DATA



# -- acceptance reporting ---------------------------------------------------------

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    item.config._criteria[mark.args[0]] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        verdict, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}" + (f"  ({detail})" if detail else ""))
