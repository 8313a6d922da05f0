"""Constructive content of the soundness and completeness arguments.

Lifting executions through certificates, unfolding, superposition,
the canonical ``after_B ∘ past_A`` relation, certificate composition, and
isomorphism of reachable subautomata.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .lts import (TAU, Automaton, ExecutionFragment, Relation, has_reachable_cycle,
                  is_execution_fragment, reachable_states, tau_closure)
from .simulation import (Backward, Forward, NormTable, Refinement, check_branching_forward,
                         check_normed_backward, check_normed_forward, check_step_refinement,
                         norm_from_branching_forward)

__all__ = [
    "ChoiceOutcome", "lift_execution_refinement", "lift_execution_forward",
    "lift_execution_backward", "unfold", "superpose", "canonical_relation",
    "compose_certificates", "check_isomorphism", "UNFOLD_SEP", "lift_norm",
]

UNFOLD_SEP = "·"


@dataclass(frozen=True)
class ChoiceOutcome:
    """How a lower step is matched: skipped (L), common move (C), or τ-descent (R)."""

    tag: str
    witness: Optional[str] = None

    def __post_init__(self):
        if self.tag not in ("L", "C", "R"):
            raise ValueError(self.tag)
        if (self.tag == "L") != (self.witness is None):
            raise ValueError("C and R carry a witness, L does not")


class LiftingError(ValueError):
    pass


def lift_execution_refinement(A: Automaton, B: Automaton, r: Mapping,
                              alpha: ExecutionFragment):
    """Image of ``alpha`` under a step refinement, with its index relation."""
    if not check_step_refinement(A, B, r, max_violations=1):
        raise LiftingError("map is not a step refinement")
    if not is_execution_fragment(A, alpha) or alpha.first not in r:
        raise LiftingError("fragment is not in the refinement's domain")
    j = 0
    tail = []
    I = {(0, 0)}
    for i, (s, a, t) in enumerate(alpha.steps()):
        if B.has_step(r[s], a, r[t]):
            tail.append((a, r[t]))
            j += 1
        I.add((i + 1, j))
    return ExecutionFragment(r[alpha.first], tail), frozenset(I)


def _forward_choice(B, f: Relation, n: NormTable, step, u) -> ChoiceOutcome:
    s, a, t = step
    match = [v for v in B.successors(u, a) if v in f.image(t)]
    if match:
        return ChoiceOutcome("C", min(match))
    if a.is_tau and u in f.image(t):
        return ChoiceOutcome("L")
    down = [v for v in B.successors(u, TAU) if v in f.image(s) and n(step, v) < n(step, u)]
    if down:
        return ChoiceOutcome("R", min(down, key=lambda v: (n(step, v), v)))
    raise LiftingError(f"no choice for {step} at {u}")


def lift_execution_forward(A: Automaton, B: Automaton, f: Relation, n: NormTable,
                           alpha: ExecutionFragment, u):
    """Fragment of B from ``u`` that corresponds to ``alpha`` via ``f``."""
    f = f if isinstance(f, Relation) else Relation(f)
    if not check_normed_forward(A, B, f, n, max_violations=1):
        raise LiftingError("not a normed forward simulation")
    if not is_execution_fragment(A, alpha) or u not in f.image(alpha.first):
        raise LiftingError("start state is not related to the fragment's first state")
    i = j = 0
    cur = u
    tail = []
    I = {(0, 0)}
    steps = list(alpha.steps())
    while i < len(steps):
        c = _forward_choice(B, f, n, steps[i], cur)
        if c.tag == "L":
            i += 1
        elif c.tag == "C":
            i, j, cur = i + 1, j + 1, c.witness
            tail.append((steps[i - 1][1], cur))
        else:
            j, cur = j + 1, c.witness
            tail.append((TAU, cur))
        I.add((i, j))
    return ExecutionFragment(u, tail), frozenset(I)


def _backward_choice(B, b: Relation, n: NormTable, step, u) -> ChoiceOutcome:
    t, a, s = step
    match = [v for v in B.predecessors(u, a) if v in b.image(t)]
    if match:
        return ChoiceOutcome("C", min(match))
    if a.is_tau and u in b.image(t):
        return ChoiceOutcome("L")
    down = [v for v in B.predecessors(u, TAU) if v in b.image(s) and n(step, v) < n(step, u)]
    if down:
        return ChoiceOutcome("R", min(down, key=lambda v: (n(step, v), v)))
    raise LiftingError(f"no choice for {step} at {u}")


def lift_execution_backward(A: Automaton, B: Automaton, b: Relation, n: NormTable,
                            alpha: ExecutionFragment, u):
    """Fragment of B ending in ``u`` that corresponds to ``alpha`` via ``b``.

    Built right to left.  When ``alpha`` starts in a start state the result
    is extended backwards, by norm descent, until it starts in one too.
    """
    b = b if isinstance(b, Relation) else Relation(b)
    if not check_normed_backward(A, B, b, n, max_violations=1):
        raise LiftingError("not a normed backward simulation")
    if not is_execution_fragment(A, alpha) or u not in b.image(alpha.last):
        raise LiftingError("end state is not related to the fragment's last state")
    steps = list(alpha.steps())
    i, k = len(steps), 0          # k counts B-steps taken so far, right to left
    cur = u
    rev = [(i, k, cur)]
    labels = []
    while i > 0:
        c = _backward_choice(B, b, n, steps[i - 1], cur)
        if c.tag == "L":
            i -= 1
        elif c.tag == "C":
            labels.append(steps[i - 1][1])
            i, k, cur = i - 1, k + 1, c.witness
        else:
            labels.append(TAU)
            k, cur = k + 1, c.witness
        rev.append((i, k, cur))
    s0 = alpha.first
    if s0 in A.start:
        while cur not in B.start:
            down = [v for v in B.predecessors(cur, TAU)
                    if v in b.image(s0) and n(s0, v) < n(s0, cur)]
            if not down:
                raise LiftingError(f"no start descent at {cur}")
            labels.append(TAU)
            k, cur = k + 1, min(down, key=lambda v: (n(s0, v), v))
            rev.append((0, k, cur))
    # reverse: B-state with k B-steps to its right sits at index total - k
    total = k
    states = [None] * (total + 1)
    for _, kk, w in rev:
        states[total - kk] = w
    labels.reverse()
    frag = ExecutionFragment(states[0], zip(labels, states[1:]))
    I = frozenset((ii, total - kk) for ii, kk, _ in rev)
    return frag, I


# -- unfolding and superposition -------------------------------------------------

def _exec_id(alpha: ExecutionFragment) -> str:
    parts = [alpha.head]
    for a, t in alpha.tail:
        parts += [str(a), t]
    return UNFOLD_SEP.join(parts)


def unfold(A: Automaton, depth: Optional[int] = None):
    """Forest of executions of A with at most ``depth`` steps.

    Returns ``(U, last_map)``.  Exact for acyclic A once ``depth`` reaches
    ``|states(A)|``; the default is ``|states(A)| + 1``.
    """
    if depth is None:
        depth = len(A.states) + 1
    if has_reachable_cycle(A):
        warnings.warn(f"unfolding a cyclic automaton is truncated at depth {depth}",
                      stacklevel=2)
    states, steps, last = [], [], {}
    frontier = [ExecutionFragment(s) for s in sorted(A.start)]
    for alpha in frontier:
        states.append(_exec_id(alpha))
        last[_exec_id(alpha)] = alpha.last
    for _ in range(depth):
        nxt = []
        for alpha in frontier:
            src = _exec_id(alpha)
            for a, t in A.out_steps(alpha.last):
                beta = alpha.extend(a, t)
                dst = _exec_id(beta)
                states.append(dst)
                steps.append((src, a, dst))
                last[dst] = t
                nxt.append(beta)
        if not nxt:
            break
        frontier = nxt
    U = Automaton(states, [_exec_id(ExecutionFragment(s)) for s in A.start], steps, A.actions)
    return U, last


def _pair_id(s, u) -> str:
    return f"({s}|{u})"


def superpose(A: Automaton, R: Relation, B: Automaton):
    """Parallel composition of A and B restricted to the pairs of ``R``.

    Returns ``(C, pi1, pi2)`` with the projections as state maps.
    """
    R = R if isinstance(R, Relation) else Relation(R)
    starts = [(s, u) for s, u in R if s in A.start and u in B.start]
    if not starts:
        raise ValueError("relation contains no pair of start states")
    ids = {p: _pair_id(*p) for p in R}
    if len(set(ids.values())) != len(ids):
        raise ValueError("state names collide in the superposition")
    acts = A.actions & B.actions
    steps = set()
    for s, u in R:
        for a, v in B.out_steps(u):
            if a.is_tau and (s, v) in R:
                steps.add((ids[(s, u)], TAU, ids[(s, v)]))
        for a, t in A.out_steps(s):
            if a.is_tau and (t, u) in R:
                steps.add((ids[(s, u)], TAU, ids[(t, u)]))
            if a not in acts:
                continue
            for v in B.successors(u, a):
                if (t, v) in R:
                    steps.add((ids[(s, u)], a, ids[(t, v)]))
    C = Automaton(ids.values(), [ids[p] for p in starts], steps, acts)
    pi1 = {ids[p]: p[0] for p in R}
    pi2 = {ids[p]: p[1] for p in R}
    return C, pi1, pi2


def lift_norm(n: NormTable, pi2: Mapping) -> NormTable:
    """``n'(key, w) = n(key, pi2(w))`` as an explicit table."""
    back: dict = {}
    for w, u in pi2.items():
        back.setdefault(u, []).append(w)
    return NormTable({(key, w): val for (key, u), val in n.entries.items()
                      for w in back.get(u, ())})


# -- canonical relation ------------------------------------------------------------

def canonical_relation(A: Automaton, B: Automaton, depth: Optional[int] = None) -> Relation:
    """``after_B ∘ past_A``: pairs ``(s, u)`` sharing some trace.

    Computed over A-states paired with τ-closed subsets of B, which is exact
    on any finite A.  ``depth`` optionally limits A's executions to that many
    steps.
    """
    start = [(s, tau_closure(B, B.start)) for s in A.start]
    seen = {(s, sub): 0 for s, sub in start}
    queue = deque(start)
    while queue:
        s, sub = queue.popleft()
        d = seen[(s, sub)]
        if depth is not None and d >= depth:
            continue
        for a, t in A.out_steps(s):
            if a.is_tau:
                sub2 = sub
            else:
                sub2 = tau_closure(B, {v for w in sub for v in B.successors(w, a)})
            node = (t, sub2)
            if node not in seen:
                seen[node] = d + 1
                queue.append(node)
    return Relation((s, u) for s, sub in seen for u in sub)


# -- composition -----------------------------------------------------------------

def compose_certificates(c1, c2, A: Optional[Automaton] = None,
                         C: Optional[Automaton] = None):
    """Compose ``c1: A → B`` with ``c2: B → C``.

    Refinements compose as functions.  Forward certificates compose their
    relations as branching simulations; the norm is re-synthesised, which
    needs the outer automata ``A`` and ``C``.
    """
    if isinstance(c1, Refinement) and isinstance(c2, Refinement):
        return Refinement({s: c2.map[u] for s, u in c1.map.items() if u in c2.map})
    if isinstance(c1, Forward) and isinstance(c2, Forward):
        if A is None or C is None:
            raise ValueError("composing forward certificates needs both outer automata")
        g = c1.relation.then(c2.relation)
        return Forward(g, norm_from_branching_forward(A, C, g))
    raise TypeError(f"cannot compose {c1.kind} with {c2.kind}")


# -- isomorphism -----------------------------------------------------------------

def check_isomorphism(A: Automaton, B: Automaton) -> Optional[dict]:
    """Bijection between the reachable subautomata of A and B, if any."""
    ra, rb = reachable_states(A), reachable_states(B)
    if len(ra) != len(rb):
        return None
    A, B = A.restrict(ra), B.restrict(rb)
    if len(A.steps) != len(B.steps):
        return None

    def signature(X, s):
        return (s in X.start,
                tuple(sorted((str(a), t == s) for a, t in X.out_steps(s))),
                tuple(sorted(str(a) for _, a in X.in_steps(s))))

    sig_b: dict = {}
    for u in rb:
        sig_b.setdefault(signature(B, u), []).append(u)
    cands = {s: sorted(sig_b.get(signature(A, s), [])) for s in ra}
    if any(not c for c in cands.values()):
        return None
    # order A-states so neighbours of assigned states come early
    order, seen = [], set()
    for root in sorted(ra, key=lambda s: (len(cands[s]), s)):
        if root in seen:
            continue
        queue = deque([root])
        seen.add(root)
        while queue:
            s = queue.popleft()
            order.append(s)
            for _, t in A.out_steps(s):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
            for t, _ in A.in_steps(s):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    phi: dict = {}
    used: set = set()

    def ok(s, u):
        for a, t in A.out_steps(s):
            if t in phi and not B.has_step(u, a, phi[t]):
                return False
            if t == s and not B.has_step(u, a, u):
                return False
        for t, a in A.in_steps(s):
            if t in phi and not B.has_step(phi[t], a, u):
                return False
        return True

    def go(k):
        if k == len(order):
            return True
        s = order[k]
        for u in cands[s]:
            if u in used or not ok(s, u):
                continue
            phi[s] = u
            used.add(u)
            if go(k + 1):
                return True
            del phi[s]
            used.discard(u)
        return False

    return dict(phi) if go(0) else None
