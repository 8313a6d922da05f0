"""Text format for explicit automata and the JSON certificate format.

Automaton files hold one declaration per line::

    state q0
    start q0
    action a
    step q0 a q1
    step q1 tau q1      # comments run to the end of the line

States and actions mentioned by ``start``/``step`` lines are declared
implicitly.
"""
from __future__ import annotations

import json
from typing import Optional

from .lts import Action, Automaton, ExecutionFragment, Relation
from .simulation import Backward, Forward, History, NormTable, Prophecy, Refinement

__all__ = [
    "FormatError", "parse_automaton", "dump_automaton", "load_automaton",
    "parse_certificate", "certificate_to_json", "dump_certificate",
    "load_certificate", "load_execution", "norm_to_json", "norm_from_json",
]


class FormatError(ValueError):
    def __init__(self, message, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def parse_automaton(text: str) -> Automaton:
    states, start, actions, steps = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, *rest = line.split()
        try:
            if kw == "state" and len(rest) == 1:
                states.append(rest[0])
            elif kw == "start" and len(rest) == 1:
                start.append(rest[0])
                states.append(rest[0])
            elif kw == "action" and len(rest) == 1:
                actions.append(Action.parse(rest[0]))
            elif kw == "step" and len(rest) == 3:
                s, a, t = rest
                steps.append((s, Action.parse(a), t))
                states += [s, t]
            else:
                raise FormatError(f"cannot read {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), lineno) from None
    if not start:
        raise FormatError("no start state declared")
    return Automaton(states, start, steps, actions)


def dump_automaton(A: Automaton) -> str:
    lines = [f"state {s}" for s in sorted(A.states)]
    lines += [f"start {s}" for s in sorted(A.start)]
    lines += [f"action {a}" for a in sorted(A.external)]
    lines += [f"step {s} {a} {t}" for s, a, t in sorted(A.steps)]
    return "\n".join(lines) + "\n"


def load_automaton(path) -> Automaton:
    with open(path) as fh:
        return parse_automaton(fh.read())


def load_execution(path) -> ExecutionFragment:
    with open(path) as fh:
        text = " ".join(line.split("#", 1)[0] for line in fh)
    return ExecutionFragment.parse(text)


# -- certificates -----------------------------------------------------------------

def _step_from_json(raw):
    s, a, t = raw
    return (s, Action.parse(a), t)


def norm_from_json(rows) -> NormTable:
    entries = {}
    for row in rows or ():
        key = row["key"]
        if "step" in key:
            k = _step_from_json(key["step"])
        elif "start" in key:
            k = key["start"]
        else:
            raise FormatError(f"bad norm key {key!r}")
        entries[(k, row["state"])] = int(row["value"])
    return NormTable(entries)


def norm_to_json(n: NormTable) -> list:
    rows = []
    for (key, u), val in n.entries.items():
        if isinstance(key, tuple):
            k = {"step": [key[0], str(key[1]), key[2]]}
        else:
            k = {"start": key}
        rows.append({"key": k, "state": u, "value": val})
    rows.sort(key=lambda r: (json.dumps(r["key"], sort_keys=True), r["state"]))
    return rows


def parse_certificate(data):
    """Build a certificate from parsed JSON (or a JSON string)."""
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "refinement":
        r = dict(data["map"])
        dom = data.get("domain_predicate")
        if dom is not None:
            r = {s: u for s, u in r.items() if s in set(dom)}
        return Refinement(r)
    if kind == "forward":
        return Forward(Relation(map(tuple, data["relation"])), norm_from_json(data.get("norm")))
    if kind == "backward":
        Q = data.get("Q")
        return Backward(Relation(map(tuple, data["relation"])), norm_from_json(data.get("norm")),
                        None if Q is None else frozenset(Q))
    if kind == "history":
        return History(dict(data["map"]), norm_from_json(data.get("norm")))
    if kind == "prophecy":
        return Prophecy(dict(data["map"]), norm_from_json(data.get("norm")),
                        bool(data.get("image_finite_required", False)))
    if kind == "relation":
        return Relation(map(tuple, data["relation"]))
    raise FormatError(f"unknown certificate kind {kind!r}")


def certificate_to_json(cert) -> dict:
    if isinstance(cert, Relation):
        return {"kind": "relation", "relation": sorted([list(p) for p in cert])}
    out = {"kind": cert.kind}
    if isinstance(cert, (Refinement, History, Prophecy)):
        out["map"] = dict(sorted(cert.map.items()))
    else:
        out["relation"] = sorted([list(p) for p in cert.relation])
    if not isinstance(cert, Refinement):
        out["norm"] = norm_to_json(cert.norm)
    if isinstance(cert, Backward) and cert.Q is not None:
        out["Q"] = sorted(cert.Q)
    if isinstance(cert, Prophecy):
        out["image_finite_required"] = cert.image_finite_required
    return out


def dump_certificate(cert) -> str:
    return json.dumps(certificate_to_json(cert), indent=2, ensure_ascii=False) + "\n"


def load_certificate(path):
    with open(path) as fh:
        return parse_certificate(json.load(fh))
