"""SMT-LIB 2 term printing and a strict S-expression well-formedness validator."""
from __future__ import annotations

import re

from .syntax import BOOL, NAT, SEQ, BinOp, BoolLit, Call, EmptySeq, Expr, Ite, NatLit, Not, Var

__all__ = ["sort_of", "symbol", "to_smt", "SExprError", "parse_sexprs", "validate_smtlib"]

_SORTS = {BOOL: "Bool", NAT: "Int", SEQ: "(Seq Int)"}
_SIMPLE = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*\Z")


def sort_of(typ: str) -> str:
    return _SORTS[typ]


def symbol(name: str, primed: bool = False) -> str:
    """SMT symbol for a spec variable; primed copies use quoted ``|x'|``."""
    return f"|{name}'|" if primed else name


def _nary(op, parts):
    return f"({op} {' '.join(parts)})"


def _flat(e, op):
    if isinstance(e, BinOp) and e.op == op:
        return _flat(e.left, op) + _flat(e.right, op)
    return [e]


def to_smt(e: Expr) -> str:
    if isinstance(e, Var):
        return symbol(e.name, e.primed)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NatLit):
        return str(e.value)
    if isinstance(e, EmptySeq):
        return "(as seq.empty (Seq Int))"
    if isinstance(e, Not):
        return f"(not {to_smt(e.arg)})"
    if isinstance(e, Call):
        s = to_smt(e.arg)
        if e.fn == "head":
            return f"(seq.nth {s} 0)"
        return f"(seq.extract {s} 1 (- (seq.len {s}) 1))"
    if isinstance(e, Ite):
        return f"(ite {to_smt(e.cond)} {to_smt(e.then)} {to_smt(e.other)})"
    if isinstance(e, BinOp):
        l, r = to_smt(e.left), to_smt(e.right)
        if e.op == "/\\":
            return _nary("and", [to_smt(x) for x in _flat(e, "/\\")])
        if e.op == "\\/":
            return _nary("or", [to_smt(x) for x in _flat(e, "\\/")])
        if e.op == "=>":
            return f"(=> {l} {r})"
        if e.op == "=":
            return f"(= {l} {r})"
        if e.op == "~=":
            return f"(not (= {l} {r}))"
        if e.op == "<":
            return f"(< {l} {r})"
        if e.op == "|-":
            return f"(seq.++ {l} (seq.unit {r}))"
        if e.op == "||":
            return f"(seq.++ {l} {r})"
    raise TypeError(f"not an expression: {e!r}")


# -- validator -------------------------------------------------------------------

class SExprError(ValueError):
    pass


_LEX = re.compile(r"""
    (?P<ws>\s+|;[^\n]*)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<num>0|[1-9][0-9]*)(?![A-Za-z0-9~!@$%^&*_+=<>.?/\-])
  | (?P<quoted>\|[^|\\]*\|)
  | (?P<string>"(?:[^"]|"")*")
  | (?P<keyword>:[A-Za-z0-9~!@$%^&*_+=<>.?/\-]+)
  | (?P<sym>[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*)
""", re.VERBOSE)

COMMANDS = {
    "set-logic", "set-option", "set-info", "declare-const", "declare-fun",
    "define-fun", "declare-sort", "assert", "check-sat", "push", "pop",
    "get-model", "get-unsat-core", "exit",
}


def parse_sexprs(text: str) -> list:
    """Parse into nested lists of token strings; raises on any malformed input."""
    stack, top, pos = [], [], 0
    while pos < len(text):
        m = _LEX.match(text, pos)
        if not m:
            line = text.count("\n", 0, pos) + 1
            raise SExprError(f"line {line}: bad token at {text[pos:pos + 20]!r}")
        kind = m.lastgroup
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "lp":
            stack.append([])
        elif kind == "rp":
            if not stack:
                raise SExprError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else top).append(done)
        else:
            (stack[-1] if stack else top).append(m.group())
    if stack:
        raise SExprError("unbalanced '(' at end of input")
    return top


def validate_smtlib(text: str) -> list:
    """Check a script is a balanced sequence of known commands.

    Also checks that ``push``/``pop`` levels match, and that every ``!``
    annotation carries a ``:named`` symbol.  Returns the parsed commands.
    """
    forms = parse_sexprs(text)
    depth = 0
    names = set()
    for f in forms:
        if not isinstance(f, list) or not f or not isinstance(f[0], str):
            raise SExprError(f"top-level item is not a command: {f!r}")
        if f[0] not in COMMANDS:
            raise SExprError(f"unknown command {f[0]!r}")
        if f[0] in ("push", "pop"):
            n = int(f[1]) if len(f) > 1 else 1
            depth += n if f[0] == "push" else -n
            if depth < 0:
                raise SExprError("pop below level 0")
        if f[0] == "assert":
            if len(f) != 2:
                raise SExprError("assert takes one term")
            _check_term(f[1], names)
    if depth:
        raise SExprError("unmatched push")
    return forms


def _check_term(t, names):
    if isinstance(t, str):
        return
    if not t:
        raise SExprError("empty application ()")
    if t[0] == "!":
        if len(t) != 4 or t[2] != ":named" or not isinstance(t[3], str):
            raise SExprError(f"bad annotation {t!r}")
        if t[3] in names:
            raise SExprError(f"duplicate name {t[3]}")
        names.add(t[3])
        _check_term(t[1], names)
        return
    for x in t:
        _check_term(x, names)
