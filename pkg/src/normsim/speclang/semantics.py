"""Evaluation, substitution and syntactic normal forms for spec formulas."""
from __future__ import annotations

from typing import Mapping

from .syntax import (
    BinOp, BoolLit, Call, EmptySeq, Expr, FALSE, Ite, NatLit, Not, Var, format_expr,
)

__all__ = [
    "evaluate", "substitute", "prime", "free_vars", "conjuncts", "disjuncts",
    "AssumptionViolated", "initial_disjuncts", "transition_disjuncts", "format_value",
]


class AssumptionViolated(ValueError):
    """A spec does not have the finite start/transition shape a VC needs."""

    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"AssumptionViolated({clause})" + (f": {detail}" if detail else ""))
        self.clause = clause


def evaluate(e: Expr, env: Mapping):
    """Value of ``e``; ``env`` maps ``Var`` objects or plain names to values.

    Sequences are tuples.  ``head`` of the empty sequence is 0 and
    ``tail`` of it is empty, so every expression has a value.
    """
    if isinstance(e, Var):
        if e in env:
            return env[e]
        if not e.primed and e.name in env:
            return env[e.name]
        raise KeyError(f"no value for {format_expr(e)}")
    if isinstance(e, (BoolLit, NatLit)):
        return e.value
    if isinstance(e, EmptySeq):
        return ()
    if isinstance(e, Not):
        return not evaluate(e.arg, env)
    if isinstance(e, Call):
        s = evaluate(e.arg, env)
        if e.fn == "head":
            return s[0] if s else 0
        return s[1:]
    if isinstance(e, Ite):
        return evaluate(e.then, env) if evaluate(e.cond, env) else evaluate(e.other, env)
    if isinstance(e, BinOp):
        op = e.op
        if op == "/\\":
            return evaluate(e.left, env) and evaluate(e.right, env)
        if op == "\\/":
            return evaluate(e.left, env) or evaluate(e.right, env)
        if op == "=>":
            return (not evaluate(e.left, env)) or evaluate(e.right, env)
        a, b = evaluate(e.left, env), evaluate(e.right, env)
        if op == "=":
            return a == b
        if op == "~=":
            return a != b
        if op == "<":
            return a < b
        if op == "|-":
            return a + (b,)
        if op == "||":
            return a + b
    raise TypeError(f"not an expression: {e!r}")


def substitute(e: Expr, mapping: Mapping) -> Expr:
    """Simultaneous substitution of ``Var -> Expr``.

    The language has no binders, so plain replacement is capture free.
    """
    if isinstance(e, Var):
        return mapping.get(e, e)
    if isinstance(e, (BoolLit, NatLit, EmptySeq)):
        return e
    if isinstance(e, Not):
        return Not(substitute(e.arg, mapping))
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, mapping))
    if isinstance(e, Ite):
        return Ite(substitute(e.cond, mapping), substitute(e.then, mapping),
                   substitute(e.other, mapping))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    raise TypeError(f"not an expression: {e!r}")


def prime(e: Expr, names) -> Expr:
    """Replace every unprimed occurrence of the given variables by its primed copy."""
    return substitute(e, {Var(n): Var(n, True) for n in names})


def free_vars(e: Expr) -> set:
    if isinstance(e, Var):
        return {e}
    if isinstance(e, (BoolLit, NatLit, EmptySeq)):
        return set()
    if isinstance(e, (Not, Call)):
        return free_vars(e.arg)
    if isinstance(e, Ite):
        return free_vars(e.cond) | free_vars(e.then) | free_vars(e.other)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    raise TypeError(f"not an expression: {e!r}")


def _flatten(e, op):
    if isinstance(e, BinOp) and e.op == op:
        return _flatten(e.left, op) + _flatten(e.right, op)
    return [e]


def conjuncts(e: Expr) -> list:
    return _flatten(e, "/\\")


def disjuncts(e: Expr) -> list:
    if e == FALSE:
        return []
    return _flatten(e, "\\/")


def _equation(c, want_primed):
    """``(name, rhs)`` if ``c`` is ``y = e`` or ``e = y`` with ``y`` of the wanted priming."""
    if not (isinstance(c, BinOp) and c.op == "="):
        return None
    for lhs, rhs in ((c.left, c.right), (c.right, c.left)):
        if isinstance(lhs, Var) and lhs.primed == want_primed:
            return lhs.name, rhs
    return None


def initial_disjuncts(spec) -> list:
    """Start states listed as ``\\/_i y = e0_i``; each entry maps y -> closed expr."""
    names = set(spec.var_names)
    out = []
    for d in disjuncts(spec.initial):
        assign = {}
        for c in conjuncts(d):
            eq = _equation(c, False)
            if eq is None or eq[0] not in names or eq[0] in assign or free_vars(eq[1]):
                raise AssumptionViolated("finitestart", format_expr(c))
            assign[eq[0]] = eq[1]
        if set(assign) != names:
            raise AssumptionViolated("finitestart", f"not every state variable is fixed in {format_expr(d)}")
        out.append(assign)
    return out


def transition_disjuncts(spec, action: str, strict: bool = True):
    """``[(chi, {y: e})]`` for ``\\/_i (chi_i /\\ y' = e_i)``.

    Returns ``None`` (or raises when ``strict``) if the predicate has
    another shape.
    """
    names = set(spec.var_names)
    out = []
    for d in disjuncts(spec.transitions[action]):
        effects, guard = {}, []
        ok = True
        for c in conjuncts(d):
            eq = _equation(c, True)
            if (eq is not None and eq[0] in names and eq[0] not in effects
                    and not any(v.primed for v in free_vars(eq[1]))):
                effects[eq[0]] = eq[1]
            elif not any(v.primed for v in free_vars(c)):
                guard.append(c)
            else:
                ok = False
                break
        if not ok or set(effects) != names:
            if strict:
                raise AssumptionViolated("finitetransitions", f"action {action}: {format_expr(d)}")
            return None
        chi = guard[0] if guard else BoolLit(True)
        for g in guard[1:]:
            chi = BinOp("/\\", chi, g)
        out.append((chi, effects))
    return out


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ",".join(format_value(x) for x in v) + "]"
    return str(v)
