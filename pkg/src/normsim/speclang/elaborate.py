"""Bounded explicit-state elaboration of specs, and explicit certificates from symbolic ones."""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from ..lts import TAU, Action, Automaton, Relation
from ..simulation import Forward, NormTable, Refinement
from .semantics import evaluate, format_value, transition_disjuncts
from .syntax import BOOL, NAT, SEQ, SpecAst, Var

__all__ = [
    "Bounds", "ElaborationError", "elaborate_explicit", "domain", "state_id",
    "valuation", "max_states", "explicit_refinement", "explicit_forward",
]

DEFAULT_MAX_STATES = 100_000


class ElaborationError(ValueError):
    pass


@dataclass(frozen=True)
class Bounds:
    nat_max: int = 2
    seq_max: int = 2

    def __post_init__(self):
        if self.nat_max < 1 or self.seq_max < 0:
            raise ValueError("need nat_max >= 1 and seq_max >= 0")


def max_states() -> int:
    raw = os.environ.get("NORMSIM_MAX_STATES")
    return int(raw) if raw else DEFAULT_MAX_STATES


def domain(typ: str, bounds: Bounds) -> list:
    """Values of a type within bounds; sequences ordered by length, then lexicographically."""
    if typ == BOOL:
        return [False, True]
    if typ == NAT:
        return list(range(bounds.nat_max))
    if typ == SEQ:
        nats = range(bounds.nat_max)
        return [s for n in range(bounds.seq_max + 1) for s in itertools.product(nats, repeat=n)]
    raise ValueError(f"unknown type {typ!r}")


def _in_bounds(typ, v, bounds) -> bool:
    if typ == BOOL:
        return isinstance(v, bool)
    if typ == NAT:
        return 0 <= v < bounds.nat_max
    return len(v) <= bounds.seq_max and all(0 <= x < bounds.nat_max for x in v)


def state_id(spec: SpecAst, values) -> str:
    return ";".join(f"{n}={format_value(v)}" for n, v in zip(spec.var_names, values))


def valuation(spec: SpecAst, values) -> dict:
    return dict(zip(spec.var_names, values))


def _count(spec, bounds):
    total = 1
    for _, t in spec.state_vars:
        total *= len(domain(t, bounds))
    return total


def elaborate_explicit(spec: SpecAst, bounds: Bounds, cap: int = None) -> Automaton:
    """The finite automaton a spec denotes within ``bounds``.

    Steps whose target leaves the bounds are dropped, so the result's
    steps are a subset of the unbounded semantics.
    """
    cap = max_states() if cap is None else cap
    n = _count(spec, bounds)
    if n > cap:
        raise ElaborationError(f"{n} states exceed the cap of {cap} (NORMSIM_MAX_STATES)")
    names, types = spec.var_names, [t for _, t in spec.state_vars]
    space = list(itertools.product(*(domain(t, bounds) for t in types)))
    ids = {vals: state_id(spec, vals) for vals in space}
    start = [ids[v] for v in space if evaluate(spec.initial, valuation(spec, v))]

    actions, steps = [], []
    for a, params in spec.actions:
        instances = list(itertools.product(*(domain(t, bounds) for _, t in params)))
        form = transition_disjuncts(spec, a, strict=False)
        phi = spec.transitions[a]
        for args in instances:
            label = TAU if a == "tau" else Action(a, args)
            actions.append(label)
            penv = {p: d for (p, _), d in zip(params, args)}
            for src in space:
                env = {**valuation(spec, src), **penv}
                if form is not None:
                    targets = set()
                    for chi, eff in form:
                        if evaluate(chi, env):
                            tgt = tuple(evaluate(eff[x], env) for x in names)
                            if all(_in_bounds(t, v, bounds) for t, v in zip(types, tgt)):
                                targets.add(tgt)
                else:
                    targets = set()
                    for tgt in space:
                        full = dict(env)
                        full.update({Var(x, True): v for x, v in zip(names, tgt)})
                        if evaluate(phi, full):
                            targets.add(tgt)
                steps += [(ids[src], label, ids[t]) for t in sorted(targets, key=space.index)]
    return Automaton(ids.values(), start, steps, actions)


def _decode(spec, bounds, A):
    names, types = spec.var_names, [t for _, t in spec.state_vars]
    space = itertools.product(*(domain(t, bounds) for t in types))
    return {state_id(spec, v): valuation(spec, v) for v in space}


def explicit_refinement(specA, boundsA, specB, boundsB, theta, expr_map) -> Refinement:
    """Partial map ``s -> e(s)`` on elaborated states satisfying ``theta``.

    States whose image falls outside B's bounds are left out of the domain.
    """
    va = _decode(specA, boundsA, None)
    types_b = [t for _, t in specB.state_vars]
    r = {}
    for sid, env in va.items():
        if not evaluate(theta, env):
            continue
        img = tuple(evaluate(expr_map[y], env) for y in specB.var_names)
        if all(_in_bounds(t, v, boundsB) for t, v in zip(types_b, img)):
            r[sid] = state_id(specB, img)
    return Refinement(r)


def explicit_forward(specA, boundsA, specB, boundsB, rho, norms, A: Automaton) -> Forward:
    """Relation ``{(s, u) | rho}`` and the norm table obtained by evaluating ``n_a``.

    ``norms`` maps action names (or ``"*"``) to expressions over
    X, the action's parameters, X' and Y.
    """
    va, vb = _decode(specA, boundsA, None), _decode(specB, boundsB, None)
    pairs = [(s, u) for s, es in va.items() for u, eu in vb.items() if evaluate(rho, {**es, **eu})]
    rel = Relation(pairs)
    entries = {}
    for s, a, t in A.steps:
        expr = norms.get(a.name, norms.get("*"))
        if expr is None:
            continue
        params = specA.params(a.name)
        penv = {p: d for (p, _), d in zip(params, a.args)}
        post = {Var(x, True): v for x, v in va[t].items()}
        for u in rel.image(s):
            val = evaluate(expr, {**va[s], **penv, **post, **vb[u]})
            if val:
                entries[((s, a, t), u)] = val
    return Forward(rel, NormTable(entries))
