"""Explicit-state labeled transition systems.

Automata here are finite and immutable.  States are opaque strings, actions
are :class:`Action` values, and the internal action is :data:`TAU`.
Infinite executions only ever appear as finite prefixes.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Action", "TAU", "ext", "Automaton", "ExecutionFragment", "Relation",
    "DepthBudgetError", "is_execution_fragment", "trace_of", "moves",
    "reachable_states", "after", "past", "is_deterministic", "is_forest",
    "has_fin", "finite_traces", "tau_closure", "has_reachable_cycle",
    "DEFAULT_DEPTH_BUDGET",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Largest ``past`` depth allowed on cyclic automata unless ``bounded=True``.
DEFAULT_DEPTH_BUDGET = 32


class DepthBudgetError(ValueError):
    """A depth-bounded enumeration was asked to go past its budget."""


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ",".join(_format_value(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True, order=True)
class Action:
    """An action label: ``tau`` or an external name with ground arguments."""

    name: str
    args: tuple = ()

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise ValueError(f"bad action name {self.name!r}")
        if self.name == "tau" and self.args:
            raise ValueError("tau carries no arguments")

    @property
    def is_tau(self) -> bool:
        return self.name == "tau"

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(_format_value(a) for a in self.args)})"

    @classmethod
    def parse(cls, text: str) -> "Action":
        """Inverse of ``str``: ``a``, ``tau``, ``send(1)``, ``f([0,1],true)``."""
        text = text.strip()
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\((.*)\))?", text)
        if not m:
            raise ValueError(f"bad action label {text!r}")
        name, body = m.group(1), m.group(2)
        if body is None or body.strip() == "":
            return cls(name)
        return cls(name, tuple(_parse_values(body)))


def _parse_values(body: str) -> list:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            out.append(_parse_value(cur))
            cur = ""
            continue
        depth += ch == "["
        depth -= ch == "]"
        cur += ch
    out.append(_parse_value(cur))
    return out


def _parse_value(tok: str):
    tok = tok.strip()
    if tok == "true":
        return True
    if tok == "false":
        return False
    if tok.startswith("[") and tok.endswith("]"):
        inner = tok[1:-1].strip()
        return tuple(_parse_values(inner)) if inner else ()
    return int(tok)


TAU = Action("tau")

Trace = tuple  # tuple of external Actions
Step = tuple  # (source, Action, target)


def ext(actions: Iterable[Action]) -> frozenset:
    return frozenset(a for a in actions if not a.is_tau)


@dataclass(frozen=True)
class Automaton:
    """A finite automaton ``(states, start, actions, steps)``.

    ``actions`` always contains :data:`TAU`; it is added if missing.
    """

    states: frozenset
    start: frozenset
    actions: frozenset
    steps: frozenset

    def __init__(self, states, start, steps=(), actions=()):
        steps = frozenset((s, a, t) for s, a, t in steps)
        acts = set(actions) | {a for _, a, _ in steps} | {TAU}
        object.__setattr__(self, "states", frozenset(states))
        object.__setattr__(self, "start", frozenset(start))
        object.__setattr__(self, "actions", frozenset(acts))
        object.__setattr__(self, "steps", steps)
        if not self.start:
            raise ValueError("an automaton needs at least one start state")
        if not self.start <= self.states:
            raise ValueError(f"start states not declared: {sorted(self.start - self.states)}")
        for s, a, t in steps:
            if s not in self.states or t not in self.states:
                raise ValueError(f"step {s} {a} {t} uses an undeclared state")
            if not isinstance(a, Action):
                raise TypeError(f"step label {a!r} is not an Action")

    # lookups; cached_property writes straight into __dict__, so frozen is fine
    @cached_property
    def _out(self) -> Mapping:
        out: dict = {s: [] for s in self.states}
        for s, a, t in sorted(self.steps, key=_step_key):
            out[s].append((a, t))
        return out

    @cached_property
    def _in(self) -> Mapping:
        inc: dict = {s: [] for s in self.states}
        for s, a, t in sorted(self.steps, key=_step_key):
            inc[t].append((s, a))
        return inc

    def out_steps(self, s) -> list:
        """``[(a, t), ...]`` for every step leaving ``s``, in sorted order."""
        return self._out[s]

    def in_steps(self, t) -> list:
        """``[(s, a), ...]`` for every step entering ``t``, in sorted order."""
        return self._in[t]

    def successors(self, s, a: Action) -> list:
        return [t for b, t in self._out[s] if b == a]

    def predecessors(self, t, a: Action) -> list:
        return [s for s, b in self._in[t] if b == a]

    def has_step(self, s, a, t) -> bool:
        return (s, a, t) in self.steps

    @property
    def external(self) -> frozenset:
        return ext(self.actions)

    def rename(self, mapping: Mapping) -> "Automaton":
        """Rename states through ``mapping`` (must be injective)."""
        if len(set(mapping[s] for s in self.states)) != len(self.states):
            raise ValueError("renaming is not injective")
        return Automaton(
            [mapping[s] for s in self.states],
            [mapping[s] for s in self.start],
            [(mapping[s], a, mapping[t]) for s, a, t in self.steps],
            self.actions,
        )

    def restrict(self, keep: Iterable) -> "Automaton":
        """Subautomaton on ``keep`` (start states outside ``keep`` are dropped)."""
        keep = frozenset(keep) & self.states
        return Automaton(
            keep,
            self.start & keep,
            [(s, a, t) for s, a, t in self.steps if s in keep and t in keep],
            self.actions,
        )


def _step_key(step):
    s, a, t = step
    return (s, a, t)


@dataclass(frozen=True)
class ExecutionFragment:
    """``head a1 s1 a2 s2 ...`` stored as a head state and a tail of pairs."""

    head: str
    tail: tuple = ()

    def __init__(self, head, tail=()):
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", tuple((a, t) for a, t in tail))

    @classmethod
    def of(cls, *items) -> "ExecutionFragment":
        """``ExecutionFragment.of("q0", a, "q1", b, "q2")``."""
        if len(items) % 2 != 1:
            raise ValueError("a fragment alternates states and actions and ends in a state")
        return cls(items[0], zip(items[1::2], items[2::2]))

    @property
    def first(self):
        return self.head

    @property
    def last(self):
        return self.tail[-1][1] if self.tail else self.head

    def __len__(self):
        """Number of steps."""
        return len(self.tail)

    @property
    def states(self) -> tuple:
        return (self.head,) + tuple(t for _, t in self.tail)

    @property
    def labels(self) -> tuple:
        return tuple(a for a, _ in self.tail)

    def state(self, i):
        return self.head if i == 0 else self.tail[i - 1][1]

    def label(self, i):
        """Label of the step entering index ``i`` (``i >= 1``)."""
        return self.tail[i - 1][0]

    def steps(self) -> Iterator[Step]:
        s = self.head
        for a, t in self.tail:
            yield (s, a, t)
            s = t

    def prefix(self, i) -> "ExecutionFragment":
        return ExecutionFragment(self.head, self.tail[:i])

    def extend(self, a, t) -> "ExecutionFragment":
        return ExecutionFragment(self.head, self.tail + ((a, t),))

    def __str__(self):
        parts = [str(self.head)]
        for a, t in self.tail:
            parts += [str(a), str(t)]
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ExecutionFragment":
        toks = text.split()
        if not toks or len(toks) % 2 != 1:
            raise ValueError(f"bad execution text {text!r}")
        return cls.of(toks[0], *[Action.parse(x) if k % 2 == 0 else x
                                 for k, x in enumerate(toks[1:])])


class Relation:
    """A finite relation between states, with cached images.

    Behaves like a frozenset of pairs.
    """

    __slots__ = ("pairs", "_img", "_pre")

    def __init__(self, pairs=()):
        self.pairs = frozenset((s, u) for s, u in pairs)
        self._img = None
        self._pre = None

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __eq__(self, other):
        if isinstance(other, Relation):
            return self.pairs == other.pairs
        if isinstance(other, (set, frozenset)):
            return self.pairs == other
        return NotImplemented

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return f"Relation({sorted(self.pairs)!r})"

    def image(self, s) -> frozenset:
        """``R[s]``."""
        if self._img is None:
            img: dict = {}
            for a, b in self.pairs:
                img.setdefault(a, set()).add(b)
            self._img = {k: frozenset(v) for k, v in img.items()}
        return self._img.get(s, frozenset())

    __getitem__ = image

    def preimage(self, u) -> frozenset:
        if self._pre is None:
            pre: dict = {}
            for a, b in self.pairs:
                pre.setdefault(b, set()).add(a)
            self._pre = {k: frozenset(v) for k, v in pre.items()}
        return self._pre.get(u, frozenset())

    @property
    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    @property
    def range(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def inverse(self) -> "Relation":
        return Relation((b, a) for a, b in self.pairs)

    def then(self, other: "Relation") -> "Relation":
        """Relational composition: first ``self``, then ``other``."""
        return Relation((a, c) for a, b in self.pairs for c in other.image(b))

    def restrict(self, left=None, right=None) -> "Relation":
        return Relation((a, b) for a, b in self.pairs
                        if (left is None or a in left) and (right is None or b in right))

    @classmethod
    def graph(cls, mapping: Mapping) -> "Relation":
        return cls(mapping.items())

    @classmethod
    def identity(cls, states) -> "Relation":
        return cls((s, s) for s in states)

    def is_functional(self) -> bool:
        return len(self.domain) == len(self.pairs)

    def as_map(self) -> dict:
        if not self.is_functional():
            raise ValueError("relation is not functional")
        return dict(self.pairs)


# -- executions and traces ---------------------------------------------------

def is_execution_fragment(A: Automaton, alpha: ExecutionFragment) -> bool:
    if alpha.head not in A.states:
        return False
    return all(step in A.steps for step in alpha.steps())


def is_execution(A: Automaton, alpha: ExecutionFragment) -> bool:
    return alpha.first in A.start and is_execution_fragment(A, alpha)


def trace_of(alpha: ExecutionFragment) -> Trace:
    return tuple(a for a in alpha.labels if not a.is_tau)


def tau_closure(A: Automaton, states: Iterable) -> frozenset:
    seen = set(states)
    todo = list(seen)
    while todo:
        s = todo.pop()
        for a, t in A.out_steps(s):
            if a.is_tau and t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def _post(A: Automaton, states: Iterable, a: Action) -> set:
    return {t for s in states for t in A.successors(s, a)}


def moves(A: Automaton, s, beta: Trace) -> frozenset:
    """All ``t`` with ``s =beta=> t``.

    Breadth-first over ``(state, position in beta)`` pairs, so τ-cycles
    terminate.
    """
    if s not in A.states:
        raise KeyError(s)
    seen = {(s, 0)}
    queue = deque(seen)
    hits = set()
    while queue:
        q, k = queue.popleft()
        if k == len(beta):
            hits.add(q)
        for a, t in A.out_steps(q):
            if a.is_tau:
                nxt = (t, k)
            elif k < len(beta) and a == beta[k]:
                nxt = (t, k + 1)
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(hits)


def reachable_states(A: Automaton) -> frozenset:
    seen = set(A.start)
    todo = list(seen)
    while todo:
        s = todo.pop()
        for _, t in A.out_steps(s):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def after(A: Automaton, beta: Trace) -> frozenset:
    """``after_A[beta]``: last states of executions with trace ``beta``."""
    cur = tau_closure(A, A.start)
    for a in beta:
        cur = tau_closure(A, _post(A, cur, a))
        if not cur:
            break
    return cur


def has_reachable_cycle(A: Automaton) -> bool:
    reach = reachable_states(A)
    colour = dict.fromkeys(reach, 0)
    for root in sorted(reach):
        if colour[root]:
            continue
        stack = [(root, iter(A.out_steps(root)))]
        colour[root] = 1
        while stack:
            s, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[s] = 2
                stack.pop()
                continue
            t = nxt[1]
            if colour[t] == 1:
                return True
            if colour[t] == 0:
                colour[t] = 1
                stack.append((t, iter(A.out_steps(t))))
    return False


def _bounded_runs(A: Automaton, depth: int):
    """Yield ``(state, trace)`` for every execution of at most ``depth`` steps.

    Pairs are deduplicated, so each is reported once at its smallest depth.
    """
    frontier = {(s, ()) for s in A.start}
    seen = set(frontier)
    yield from frontier
    for _ in range(depth):
        nxt = set()
        for s, beta in frontier:
            for a, t in A.out_steps(s):
                pair = (t, beta if a.is_tau else beta + (a,))
                if pair not in seen:
                    seen.add(pair)
                    nxt.add(pair)
        if not nxt:
            return
        yield from nxt
        frontier = nxt


def past(A: Automaton, s, depth: int, *, bounded: bool = False,
         budget: int = DEFAULT_DEPTH_BUDGET) -> frozenset:
    """Traces of executions of at most ``depth`` steps that end in ``s``.

    Exact on acyclic automata once ``depth >= |states(A)|``.  On cyclic
    automata a depth beyond ``budget`` must be acknowledged with
    ``bounded=True``.
    """
    if depth > budget and not bounded and has_reachable_cycle(A):
        raise DepthBudgetError(
            f"depth {depth} exceeds budget {budget} on a cyclic automaton; "
            "pass bounded=True to accept a truncated result")
    return frozenset(beta for t, beta in _bounded_runs(A, depth) if t == s)


def finite_traces(A: Automaton, depth: int) -> frozenset:
    """Traces of executions with at most ``depth`` steps."""
    return frozenset(beta for _, beta in _bounded_runs(A, depth))


# -- structural predicates ---------------------------------------------------

def is_deterministic(A: Automaton) -> bool:
    if len(A.start) != 1:
        return False
    for s in A.states:
        seen = set()
        for a, t in A.out_steps(s):
            if a.is_tau:
                if t != s:
                    return False
                continue
            if a in seen:
                return False
            seen.add(a)
    return True


def is_forest(A: Automaton) -> bool:
    if reachable_states(A) != A.states:
        return False
    for s in A.states:
        n_in = len(A.in_steps(s))
        if s in A.start and n_in:
            return False
        if s not in A.start and n_in != 1:
            return False
    return True


def has_fin(A: Automaton) -> bool:
    """Finite invisible nondeterminism; always true for explicit automata."""
    return True
