"""Command-line entry point.

Exit codes: 0 the check passed or the artifact was written, 1 the check
failed (the report goes to stdout), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from dataclasses import dataclass, field
from typing import Optional

from .constructions import (
    LiftingError, lift_execution_backward, lift_execution_forward, lift_execution_refinement,
    superpose, unfold,
)
from .formats import (
    FormatError, certificate_to_json, dump_automaton, dump_certificate, load_automaton,
    load_certificate, load_execution,
)
from .lts import DepthBudgetError, Relation, finite_traces, trace_of
from .oracle import format_trace, trace_inclusion
from .simulation import (
    ADAPTED, PLAIN, Backward, BudgetExceeded, CertificateError, Forward, History, Prophecy,
    Refinement, check_certificate, find_certificate,
)

__all__ = ["CliConfig", "run", "main", "build_parser"]

OK, FAILED, USAGE = 0, 1, 2

_KIND_TYPES = {
    "refinement": Refinement, "forward": Forward, "backward": Backward,
    "history": History, "prophecy": Prophecy,
}


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    mode: str = PLAIN
    depth: Optional[int] = None
    budget: Optional[int] = None
    output: Optional[str] = None
    format: str = "text"


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _natural(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="normsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    c = common(sub.add_parser("check", help="check a certificate between two automata"))
    c.add_argument("--kind", required=True, choices=sorted(_KIND_TYPES))
    c.add_argument("--lower", required=True)
    c.add_argument("--upper", required=True)
    c.add_argument("--cert", required=True)
    c.add_argument("--adapted", action="store_true", help="reachability-adapted conditions")

    f = common(sub.add_parser("find", help="search for a certificate"))
    f.add_argument("--kind", required=True, choices=("refinement", "forward", "backward"))
    f.add_argument("--lower", required=True)
    f.add_argument("--upper", required=True)
    f.add_argument("--budget", type=_positive, default=10000)
    f.add_argument("-o", "--output")

    i = common(sub.add_parser("include", help="decide finite-trace inclusion"))
    i.add_argument("--lower", required=True)
    i.add_argument("--upper", required=True)

    t = common(sub.add_parser("traces", help="list finite traces up to a depth"))
    t.add_argument("--spec", required=True)
    t.add_argument("--depth", type=_natural, required=True)

    co = common(sub.add_parser("correspond", help="lift an execution along a certificate"))
    co.add_argument("--lower", required=True)
    co.add_argument("--upper", required=True)
    co.add_argument("--cert", required=True)
    co.add_argument("--exec", dest="execution", required=True)

    u = common(sub.add_parser("unfold", help="unfold an automaton into a forest"))
    u.add_argument("--spec", required=True)
    u.add_argument("--depth", type=_natural)
    u.add_argument("-o", "--output", required=True)

    s = common(sub.add_parser("superpose", help="superpose two automata along a relation"))
    s.add_argument("--lower", required=True)
    s.add_argument("--upper", required=True)
    s.add_argument("--rel", required=True)
    s.add_argument("-o", "--output", required=True)

    v = common(sub.add_parser("vcgen", help="emit SMT-LIB verification conditions"))
    v.add_argument("--kind", required=True, choices=("refinement", "forward"))
    v.add_argument("--lower", required=True)
    v.add_argument("--upper", required=True)
    v.add_argument("--cert", required=True)
    v.add_argument("-o", "--output", required=True)
    v.add_argument("--solver", help="run this SMT solver on the output")

    e = common(sub.add_parser("elaborate", help="elaborate a spec into an explicit automaton"))
    e.add_argument("--spec", required=True)
    e.add_argument("--nat-max", type=_positive, required=True)
    e.add_argument("--seq-max", type=_natural, required=True)
    e.add_argument("-o", "--output", required=True)
    return p


def _config(args) -> CliConfig:
    inputs = {k: getattr(args, k) for k in ("lower", "upper", "cert", "spec", "rel", "execution")
              if getattr(args, k, None) is not None}
    for path in inputs.values():
        if not os.path.isfile(path):
            raise InputError(f"no such file: {path}")
    return CliConfig(
        subcommand=args.subcommand, inputs=inputs,
        mode=ADAPTED if getattr(args, "adapted", False) else PLAIN,
        depth=getattr(args, "depth", None), budget=getattr(args, "budget", None),
        output=getattr(args, "output", None), format=args.format,
    )


class _Out:
    def __init__(self, fmt, stream):
        self.fmt, self.stream = fmt, stream

    def emit(self, payload: dict, text: str):
        if self.fmt == "json":
            self.stream.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")
        else:
            self.stream.write(text.rstrip("\n") + "\n")


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _report_text(report) -> str:
    if report.accepted:
        lines = ["accepted"]
    else:
        lines = ["rejected"] + [f"  {v}" for v in report.violations]
    if report.max_image_size is not None:
        lines.append(f"max image size: {report.max_image_size}")
    return "\n".join(lines)


def _cmd_check(args, cfg, out):
    A, B = load_automaton(args.lower), load_automaton(args.upper)
    cert = load_certificate(args.cert)
    if not isinstance(cert, _KIND_TYPES[args.kind]):
        raise InputError(f"certificate file holds a {getattr(cert, 'kind', 'relation')} certificate, "
                         f"not {args.kind}")
    report = check_certificate(A, B, cert, cfg.mode)
    out.emit(report.to_json(), _report_text(report))
    return OK if report.accepted else FAILED


def _cmd_find(args, cfg, out):
    A, B = load_automaton(args.lower), load_automaton(args.upper)
    cert = find_certificate(A, B, args.kind, cfg.budget)
    if cert is None:
        out.emit({"command": "find", "found": False, "certificate": None},
                 f"no {args.kind} certificate exists")
        return FAILED
    if cfg.output:
        _write(cfg.output, dump_certificate(cert))
    out.emit({"command": "find", "found": True, "certificate": certificate_to_json(cert)},
             dump_certificate(cert) if not cfg.output else f"wrote {cfg.output}")
    return OK


def _cmd_include(args, cfg, out):
    A, B = load_automaton(args.lower), load_automaton(args.upper)
    v = trace_inclusion(A, B)
    wit = None if v.holds else format_trace(v.witness)
    out.emit({"command": "include", "holds": v.holds, "witness": wit},
             "included" if v.holds else f"not included; witness: {wit}")
    return OK if v.holds else FAILED


def _cmd_traces(args, cfg, out):
    A = load_automaton(args.spec)
    traces = sorted(finite_traces(A, cfg.depth), key=lambda b: (len(b), b))
    rows = [format_trace(b) for b in traces]
    out.emit({"command": "traces", "traces": rows},
             "\n".join(r if r else "λ" for r in rows))
    return OK


def _cmd_correspond(args, cfg, out):
    A, B = load_automaton(args.lower), load_automaton(args.upper)
    cert = load_certificate(args.cert)
    alpha = load_execution(args.execution)
    try:
        if isinstance(cert, Refinement):
            beta, I = lift_execution_refinement(A, B, cert.map, alpha)
        elif isinstance(cert, Forward):
            img = sorted(cert.relation.image(alpha.first))
            if not img:
                raise LiftingError("first state of the execution is not related")
            beta, I = lift_execution_forward(A, B, cert.relation, cert.norm, alpha, img[0])
        elif isinstance(cert, Backward):
            img = sorted(cert.relation.image(alpha.last))
            if not img:
                raise LiftingError("last state of the execution is not related")
            beta, I = lift_execution_backward(A, B, cert.relation, cert.norm, alpha, img[0])
        else:
            raise InputError("correspond needs a refinement, forward or backward certificate")
    except LiftingError as exc:
        out.emit({"command": "correspond", "ok": False, "error": str(exc)}, f"cannot lift: {exc}")
        return FAILED
    payload = {
        "command": "correspond", "ok": True, "fragment": str(beta),
        "index_relation": sorted([list(p) for p in I]), "trace": format_trace(trace_of(beta)),
    }
    text = f"fragment: {beta}\nindex relation: {sorted(I)}\ntrace: {format_trace(trace_of(beta))}"
    out.emit(payload, text)
    return OK


def _cmd_unfold(args, cfg, out):
    A = load_automaton(args.spec)
    U, last = unfold(A, cfg.depth)
    _write(cfg.output, dump_automaton(U))
    _write(cfg.output + ".last", dump_certificate(Refinement(last)))
    out.emit({"command": "unfold", "output": cfg.output, "states": len(U.states)},
             f"wrote {cfg.output} ({len(U.states)} states) and {cfg.output}.last")
    return OK


def _cmd_superpose(args, cfg, out):
    A, B = load_automaton(args.lower), load_automaton(args.upper)
    rel = load_certificate(args.rel)
    if not isinstance(rel, Relation):
        rel = getattr(rel, "relation", None)
        if rel is None:
            raise InputError("--rel needs a relation, forward or backward certificate")
    C, pi1, pi2 = superpose(A, rel, B)
    _write(cfg.output, dump_automaton(C))
    _write(cfg.output + ".pi1", dump_certificate(Refinement(pi1)))
    _write(cfg.output + ".pi2", dump_certificate(Refinement(pi2)))
    out.emit({"command": "superpose", "output": cfg.output, "states": len(C.states)},
             f"wrote {cfg.output} ({len(C.states)} states), {cfg.output}.pi1, {cfg.output}.pi2")
    return OK


def _cmd_vcgen(args, cfg, out):
    from .speclang import load_symbolic_certificate, parse_spec, vcgen_forward, vcgen_refinement

    with open(args.lower) as fh:
        specA = parse_spec(fh.read())
    with open(args.upper) as fh:
        specB = parse_spec(fh.read())
    cert = load_symbolic_certificate(args.cert)
    gen = vcgen_refinement if args.kind == "refinement" else vcgen_forward
    text = gen(specA, specB, cert)
    _write(cfg.output, text)
    names = [line.rsplit(":named ", 1)[1].rstrip(")") for line in text.splitlines()
             if ":named " in line]
    payload = {"command": "vcgen", "output": cfg.output, "groups": names}
    if not args.solver:
        out.emit(payload, f"wrote {cfg.output} ({len(names)} groups)")
        return OK
    try:
        proc = subprocess.run([args.solver, cfg.output], capture_output=True, text=True, timeout=600)
    except OSError as exc:
        raise InputError(f"cannot run solver: {exc}") from None
    answers = [ln.strip() for ln in proc.stdout.splitlines() if ln.strip() in ("sat", "unsat", "unknown")]
    results = dict(zip(names, answers + ["none"] * (len(names) - len(answers))))
    ok = all(r == "unsat" for r in results.values())
    payload["solver"] = results
    text = "\n".join(f"{n}: {r}" for n, r in results.items())
    out.emit(payload, text + ("\nall obligations hold" if ok else "\nsome obligations failed"))
    return OK if ok else FAILED


def _cmd_elaborate(args, cfg, out):
    from .speclang import Bounds, elaborate_explicit, parse_spec

    with open(args.spec) as fh:
        spec = parse_spec(fh.read())
    A = elaborate_explicit(spec, Bounds(args.nat_max, args.seq_max))
    _write(cfg.output, dump_automaton(A))
    out.emit({"command": "elaborate", "output": cfg.output, "states": len(A.states),
              "steps": len(A.steps)},
             f"wrote {cfg.output} ({len(A.states)} states, {len(A.steps)} steps)")
    return OK


_COMMANDS = {
    "check": _cmd_check, "find": _cmd_find, "include": _cmd_include, "traces": _cmd_traces,
    "correspond": _cmd_correspond, "unfold": _cmd_unfold, "superpose": _cmd_superpose,
    "vcgen": _cmd_vcgen, "elaborate": _cmd_elaborate,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    out = _Out(args.format, stdout)
    try:
        cfg = _config(args)
        return _COMMANDS[args.subcommand](args, cfg, out)
    except (InputError, FormatError, CertificateError, BudgetExceeded, DepthBudgetError,
            OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        msg = str(exc) or type(exc).__name__
        if args.format == "json":
            out.emit({"command": args.subcommand, "error": msg}, msg)
        stderr.write(f"normsim {args.subcommand}: error: {msg}\n")
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
