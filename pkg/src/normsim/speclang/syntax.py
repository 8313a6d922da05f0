"""Abstract syntax, parser, printer and typechecker for automaton specs.

The accepted text looks like::

    automaton Channel
      states
        buffer: Seq[Nat]
      initial condition
        buffer = {}
      actions
        send(v: Nat), receive(v: Nat), tau
      transitions
        action send(v)
          predicate buffer' = buffer |- v
        ...

Operators, loosest first: ``=>`` (right associative), ``\\/``, ``/\\``,
``~`` (negation), ``=``/``~=``/``<``, then ``|-`` (append) and ``||``
(concatenate), left associative.  ``if c then e1 else e2``, ``head(e)``
and ``tail(e)`` are primaries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

__all__ = [
    "BOOL", "NAT", "SEQ", "TYPES", "Expr", "Var", "BoolLit", "NatLit", "EmptySeq",
    "Not", "BinOp", "Call", "Ite", "SpecAst", "SpecSyntaxError", "SpecTypeError",
    "parse_spec", "parse_expr", "format_expr", "format_spec", "typecheck_spec",
    "type_of", "conj", "disj", "TRUE", "FALSE",
]

BOOL, NAT, SEQ = "Bool", "Nat", "Seq[Nat]"
TYPES = (BOOL, NAT, SEQ)


# -- AST --------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True)
class Var(Expr):
    name: str
    primed: bool = False


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class NatLit(Expr):
    value: int


@dataclass(frozen=True)
class EmptySeq(Expr):
    pass


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class Ite(Expr):
    cond: Expr
    then: Expr
    other: Expr


TRUE, FALSE = BoolLit(True), BoolLit(False)


def conj(*parts: Expr) -> Expr:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = BinOp("/\\", out, p)
    return out


def disj(*parts: Expr) -> Expr:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = BinOp("\\/", out, p)
    return out


@dataclass(frozen=True)
class SpecAst:
    name: str
    state_vars: tuple          # ((name, type), ...)
    initial: Expr
    actions: tuple             # ((name, ((param, type), ...)), ...)
    transitions: Mapping = field(hash=False)   # action name -> Expr

    @property
    def var_types(self) -> dict:
        return dict(self.state_vars)

    @property
    def var_names(self) -> tuple:
        return tuple(n for n, _ in self.state_vars)

    def params(self, action) -> tuple:
        return dict(self.actions)[action]

    @property
    def action_names(self) -> tuple:
        return tuple(n for n, _ in self.actions)


# -- errors ----------------------------------------------------------------------

class SpecSyntaxError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)
        self.line, self.col = line, col


class SpecTypeError(ValueError):
    def __init__(self, message, expr: Optional[Expr] = None):
        super().__init__(f"{message}: {format_expr(expr)}" if expr is not None else message)
        self.expr = expr


# -- lexer -----------------------------------------------------------------------

KEYWORDS = {
    "automaton", "states", "initial", "condition", "actions", "transitions",
    "action", "predicate", "if", "then", "else", "true", "false", "head", "tail",
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'?)
  | (?P<num>[0-9]+)
  | (?P<sym>\{\}|=>|⇒|/\\|\\/|\|-|\|\||~=|[=~<(),:\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str      # ident, num, sym, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tok = m.group()
            if tok == "⇒":
                tok = "=>"
            toks.append(Token(kind, tok, line, pos - line_start + 1))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ----------------------------------------------------------------------

_CMP = ("=", "~=", "<")
_SEQOPS = ("|-", "||")


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise SpecSyntaxError(f"{msg}, found {found!r}", tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "ident")

    def eat(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, allow_primed=False) -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error("expected an identifier")
        if tok.text.endswith("'") and not allow_primed:
            self.error("primed name not allowed here")
        self.pos += 1
        return tok.text

    # spec structure
    def spec(self) -> SpecAst:
        self.eat("automaton")
        name = self.ident()
        self.eat("states")
        svars = []
        while True:
            v = self.ident()
            self.eat(":")
            svars.append((v, self.type_()))
            if not self.at(","):
                break
            self.eat(",")
        self.eat("initial")
        self.eat("condition")
        initial = self.expr()
        self.eat("actions")
        acts = []
        while True:
            a = self.ident() if not self.at("tau") else self._tau()
            params = []
            if self.at("("):
                self.eat("(")
                while True:
                    p = self.ident()
                    self.eat(":")
                    params.append((p, self.type_()))
                    if not self.at(","):
                        break
                    self.eat(",")
                self.eat(")")
            acts.append((a, tuple(params)))
            if not self.at(","):
                break
            self.eat(",")
        self.eat("transitions")
        trans: dict = {}
        declared = dict(acts)
        while self.at("action"):
            head = self.eat("action")
            a = self.ident()
            names = []
            if self.at("("):
                self.eat("(")
                while True:
                    names.append(self.ident())
                    if not self.at(","):
                        break
                    self.eat(",")
                self.eat(")")
            if a not in declared:
                raise SpecSyntaxError(f"transition for undeclared action {a!r}", head.line, head.col)
            if tuple(names) != tuple(p for p, _ in declared[a]):
                raise SpecSyntaxError(f"parameters of {a!r} do not match its declaration",
                                      head.line, head.col)
            if a in trans:
                raise SpecSyntaxError(f"second transition predicate for {a!r}", head.line, head.col)
            self.eat("predicate")
            trans[a] = self.expr()
        if self.tok.kind != "eof":
            self.error("expected 'action' or end of input")
        return SpecAst(name, tuple(svars), initial, tuple(acts), trans)

    def _tau(self):
        self.pos += 1
        return "tau"

    def type_(self) -> str:
        tok = self.tok
        if tok.text in ("Bool", "Nat"):
            self.pos += 1
            return tok.text
        if tok.text == "Seq":
            self.pos += 1
            self.eat("[")
            if self.tok.text != "Nat":
                self.error("only Seq[Nat] is supported")
            self.pos += 1
            self.eat("]")
            return SEQ
        self.error("expected a type (Bool, Nat, Seq[Nat])")

    # formulas
    def expr(self) -> Expr:
        left = self.or_()
        if self.at("=>"):
            self.eat("=>")
            return BinOp("=>", left, self.expr())
        return left

    def or_(self) -> Expr:
        left = self.and_()
        while self.at("\\/"):
            self.eat("\\/")
            left = BinOp("\\/", left, self.and_())
        return left

    def and_(self) -> Expr:
        left = self.not_()
        while self.at("/\\"):
            self.eat("/\\")
            left = BinOp("/\\", left, self.not_())
        return left

    def not_(self) -> Expr:
        if self.at("~"):
            self.eat("~")
            return Not(self.not_())
        return self.cmp()

    def cmp(self) -> Expr:
        left = self.seq()
        if self.tok.kind == "sym" and self.tok.text in _CMP:
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.seq())
            if self.tok.kind == "sym" and self.tok.text in _CMP:
                self.error("comparisons do not chain")
        return left

    def seq(self) -> Expr:
        left = self.primary()
        while self.tok.kind == "sym" and self.tok.text in _SEQOPS:
            op = self.tok.text
            self.pos += 1
            left = BinOp(op, left, self.primary())
        return left

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return NatLit(int(tok.text))
        if tok.text == "{}":
            self.pos += 1
            return EmptySeq()
        if tok.text == "(":
            self.eat("(")
            e = self.expr()
            self.eat(")")
            return e
        if tok.kind == "ident":
            if tok.text in ("true", "false"):
                self.pos += 1
                return BoolLit(tok.text == "true")
            if tok.text in ("head", "tail"):
                self.pos += 1
                self.eat("(")
                e = self.expr()
                self.eat(")")
                return Call(tok.text, e)
            if tok.text == "if":
                self.pos += 1
                c = self.expr()
                self.eat("then")
                a = self.expr()
                self.eat("else")
                return Ite(c, a, self.expr())
            name = self.ident(allow_primed=True)
            if name.endswith("'"):
                return Var(name[:-1], True)
            return Var(name)
        self.error("expected an expression")


def parse_spec(text: str, check: bool = True) -> SpecAst:
    spec = _Parser(text).spec()
    if check:
        typecheck_spec(spec)
    return spec


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return e


# -- printer ---------------------------------------------------------------------

_PREC = {"=>": 1, "\\/": 2, "/\\": 3, "=": 5, "~=": 5, "<": 5, "|-": 6, "||": 6}


def _fmt(e: Expr, ctx: int) -> str:
    if isinstance(e, Var):
        return e.name + ("'" if e.primed else "")
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NatLit):
        return str(e.value)
    if isinstance(e, EmptySeq):
        return "{}"
    if isinstance(e, Call):
        return f"{e.fn}({_fmt(e.arg, 0)})"
    if isinstance(e, Ite):
        s = f"if {_fmt(e.cond, 0)} then {_fmt(e.then, 0)} else {_fmt(e.other, 0)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(e, Not):
        s = "~" + _fmt(e.arg, 4)
        return f"({s})" if ctx > 4 else s
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "=>":
            lp, rp = p + 1, p
        elif p == 5:
            lp = rp = p + 1
        else:
            lp, rp = p, p + 1
        s = f"{_fmt(e.left, lp)} {e.op} {_fmt(e.right, rp)}"
        return f"({s})" if ctx > p else s
    raise TypeError(f"not an expression: {e!r}")


def format_expr(e: Expr) -> str:
    return _fmt(e, 0)


def format_spec(spec: SpecAst) -> str:
    def params(ps):
        return "(" + ", ".join(f"{p}: {t}" for p, t in ps) + ")" if ps else ""

    lines = [f"automaton {spec.name}", "  states"]
    lines.append("    " + ",\n    ".join(f"{n}: {t}" for n, t in spec.state_vars))
    lines += ["  initial condition", "    " + format_expr(spec.initial), "  actions"]
    lines.append("    " + ",\n    ".join(a + params(ps) for a, ps in spec.actions))
    lines.append("  transitions")
    for a, ps in spec.actions:
        if a not in spec.transitions:
            continue
        names = "(" + ", ".join(p for p, _ in ps) + ")" if ps else ""
        lines.append(f"    action {a}{names}")
        lines.append(f"      predicate {format_expr(spec.transitions[a])}")
    return "\n".join(lines) + "\n"


# -- typechecker -----------------------------------------------------------------

def type_of(e: Expr, env: Mapping, primed_env: Optional[Mapping] = None) -> str:
    """Type of ``e``; ``env`` types unprimed names, ``primed_env`` primed ones."""
    if isinstance(e, Var):
        scope = primed_env if e.primed else env
        if scope is None or e.name not in scope:
            what = "primed variable" if e.primed else "variable"
            raise SpecTypeError(f"unknown {what} {format_expr(e)!r}", e)
        return scope[e.name]
    if isinstance(e, BoolLit):
        return BOOL
    if isinstance(e, NatLit):
        return NAT
    if isinstance(e, EmptySeq):
        return SEQ
    if isinstance(e, Not):
        _expect(e.arg, BOOL, env, primed_env)
        return BOOL
    if isinstance(e, Call):
        _expect(e.arg, SEQ, env, primed_env)
        return NAT if e.fn == "head" else SEQ
    if isinstance(e, Ite):
        _expect(e.cond, BOOL, env, primed_env)
        t = type_of(e.then, env, primed_env)
        _expect(e.other, t, env, primed_env)
        return t
    if isinstance(e, BinOp):
        if e.op in ("=>", "\\/", "/\\"):
            _expect(e.left, BOOL, env, primed_env)
            _expect(e.right, BOOL, env, primed_env)
            return BOOL
        if e.op in ("=", "~="):
            t = type_of(e.left, env, primed_env)
            _expect(e.right, t, env, primed_env)
            return BOOL
        if e.op == "<":
            _expect(e.left, NAT, env, primed_env)
            _expect(e.right, NAT, env, primed_env)
            return BOOL
        if e.op == "|-":
            _expect(e.left, SEQ, env, primed_env)
            _expect(e.right, NAT, env, primed_env)
            return SEQ
        if e.op == "||":
            _expect(e.left, SEQ, env, primed_env)
            _expect(e.right, SEQ, env, primed_env)
            return SEQ
    raise TypeError(f"not an expression: {e!r}")


def _expect(e, want, env, primed_env):
    got = type_of(e, env, primed_env)
    if got != want:
        raise SpecTypeError(f"expected {want}, got {got}", e)


def typecheck_spec(spec: SpecAst) -> None:
    names = [n for n, _ in spec.state_vars]
    if len(set(names)) != len(names):
        raise SpecTypeError("duplicate state variable")
    env = dict(spec.state_vars)
    _expect(spec.initial, BOOL, env, None)
    acts = dict(spec.actions)
    if len(acts) != len(spec.actions):
        raise SpecTypeError("duplicate action name")
    if "tau" not in acts:
        raise SpecTypeError("the internal action tau must be declared")
    if acts["tau"]:
        raise SpecTypeError("tau takes no parameters")
    for a, params in spec.actions:
        if a not in spec.transitions:
            raise SpecTypeError(f"missing transition predicate for action {a!r}")
        penv = dict(env)
        for p, t in params:
            if p in env:
                raise SpecTypeError(f"parameter {p!r} of {a!r} shadows a state variable")
            penv[p] = t
        _expect(spec.transitions[a], BOOL, penv, env)
