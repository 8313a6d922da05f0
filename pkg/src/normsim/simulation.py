"""Certificate checkers for refinements and normed simulations.

Every checker returns a :class:`CheckReport` listing violations (up to a
cap) instead of stopping at the first one.  Condition identifiers follow the
numbering of the definitions, e.g. ``forward-2`` when no clause of the
transfer condition applies and ``forward-2c`` when a τ-successor is related
but the norm does not decrease.

``mode="adapted"`` selects the variants that only constrain reachable
states (and, for backward simulations, states satisfying ``Q``).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .lts import TAU, Action, Automaton, Relation, reachable_states

__all__ = [
    "NormTable", "Refinement", "Forward", "Backward", "History", "Prophecy",
    "Certificate", "Violation", "CheckReport", "CertificateError", "BudgetExceeded",
    "check_step_refinement", "check_normed_forward", "check_normed_backward",
    "check_image_finite", "check_branching_forward", "check_branching_backward",
    "norm_from_branching_forward", "norm_from_branching_backward",
    "check_history", "check_prophecy", "check_certificate", "find_certificate",
    "greatest_branching_forward", "greatest_branching_backward",
    "DEFAULT_MAX_VIOLATIONS", "DEFAULT_BUDGET",
]

DEFAULT_MAX_VIOLATIONS = 10
DEFAULT_BUDGET = 10_000

PLAIN, ADAPTED = "plain", "adapted"


class CertificateError(ValueError):
    """A certificate mentions states or steps that its automata lack."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class NormTable:
    """Norm values keyed by ``(key, B-state)``; absent entries read as 0.

    A key is either a step ``(s, a, t)`` of the lower automaton or a start
    state ``s`` of it (backward simulations only).
    """

    entries: Mapping = field(default_factory=dict)

    def __call__(self, key, u) -> int:
        return self.entries.get((key, u), 0)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def zero(cls) -> "NormTable":
        return cls({})


@dataclass(frozen=True)
class Refinement:
    map: Mapping

    kind = "refinement"


@dataclass(frozen=True)
class Forward:
    relation: Relation
    norm: NormTable = field(default_factory=NormTable)

    kind = "forward"


@dataclass(frozen=True)
class Backward:
    relation: Relation
    norm: NormTable = field(default_factory=NormTable)
    Q: Optional[frozenset] = None

    kind = "backward"


@dataclass(frozen=True)
class History:
    map: Mapping
    norm: NormTable = field(default_factory=NormTable)

    kind = "history"


@dataclass(frozen=True)
class Prophecy:
    map: Mapping
    norm: NormTable = field(default_factory=NormTable)
    image_finite_required: bool = False

    kind = "prophecy"


Certificate = Union[Refinement, Forward, Backward, History, Prophecy]


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: object          # a step (s, a, t) or a state
    related: object = None   # the B-state involved, if any
    detail: str = ""

    def __str__(self):
        w = _fmt(self.witness)
        rel = f" with {self.related}" if self.related is not None else ""
        det = f": {self.detail}" if self.detail else ""
        return f"{self.condition} at {w}{rel}{det}"


def _fmt(w):
    if isinstance(w, tuple) and len(w) == 3:
        return f"{w[0]} -{w[1]}-> {w[2]}"
    return str(w)


@dataclass
class CheckReport:
    accepted: bool
    violations: list = field(default_factory=list)
    max_image_size: Optional[int] = None

    def __bool__(self):
        return self.accepted

    def to_json(self) -> dict:
        out = {
            "accepted": self.accepted,
            "violations": [
                {
                    "condition": v.condition,
                    "witness": _jsonable(v.witness),
                    "related": v.related,
                    "detail": v.detail,
                }
                for v in self.violations
            ],
        }
        if self.max_image_size is not None:
            out["max_image_size"] = self.max_image_size
        return out


def _jsonable(w):
    if isinstance(w, tuple):
        return {"step": [str(x) for x in w]}
    return {"state": w}


class _Collector:
    def __init__(self, cap):
        self.cap = cap
        self.items = []

    def add(self, *args, **kw):
        if self.cap is None or len(self.items) < self.cap:
            self.items.append(Violation(*args, **kw))

    @property
    def full(self):
        return self.cap is not None and len(self.items) >= self.cap

    def report(self, **kw):
        return CheckReport(not self.items, self.items, **kw)


def _check_mode(mode):
    if mode not in (PLAIN, ADAPTED):
        raise ValueError(f"mode must be 'plain' or 'adapted', not {mode!r}")


def _check_states(rel_pairs, A, B, what):
    for s, u in rel_pairs:
        if s not in A.states:
            raise CertificateError(f"{what} mentions unknown lower state {s!r}")
        if u not in B.states:
            raise CertificateError(f"{what} mentions unknown upper state {u!r}")


def _check_norm(n: NormTable, A, B, allow_start=False):
    for key, u in n.entries:
        if u not in B.states:
            raise CertificateError(f"norm mentions unknown upper state {u!r}")
        if isinstance(key, tuple):
            if key not in A.steps:
                raise CertificateError(f"norm mentions unknown step {_fmt(key)}")
        elif not allow_start or key not in A.start:
            raise CertificateError(f"norm key {key!r} is not a start state")


# -- step refinements ----------------------------------------------------------

def check_step_refinement(A: Automaton, B: Automaton, r: Mapping, mode: str = PLAIN,
                          max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    _check_mode(mode)
    _check_states(r.items(), A, B, "refinement map")
    out = _Collector(max_violations)
    for s in sorted(A.start):
        if s not in r:
            out.add("refinement-1", s, None, "start state outside the domain")
        elif r[s] not in B.start:
            out.add("refinement-1", s, r[s], "start state not mapped to a start state")
    if mode == ADAPTED:
        reach_a, reach_b = reachable_states(A), reachable_states(B)
    for s, a, t in sorted(A.steps):
        if out.full:
            break
        if s not in r:
            continue
        if mode == ADAPTED and not (s in reach_a and r[s] in reach_b):
            continue
        if t not in r:
            out.add("refinement-2", (s, a, t), r[s], "target outside the domain")
        elif not ((a.is_tau and r[s] == r[t]) or B.has_step(r[s], a, r[t])):
            out.add("refinement-2b", (s, a, t), r[s], f"no step {r[s]} -{a}-> {r[t]}")
    return out.report()


# -- normed forward simulations -------------------------------------------------

def check_normed_forward(A: Automaton, B: Automaton, f: Relation, n: NormTable = NormTable(),
                         mode: str = PLAIN,
                         max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    _check_mode(mode)
    f = f if isinstance(f, Relation) else Relation(f)
    _check_states(f, A, B, "relation")
    _check_norm(n, A, B)
    out = _Collector(max_violations)
    for s in sorted(A.start):
        if not f.image(s) & B.start:
            out.add("forward-1", s, None, "no related start state")
    if mode == ADAPTED:
        reach_a, reach_b = reachable_states(A), reachable_states(B)
    for step in sorted(A.steps):
        s, a, t = step
        for u in sorted(f.image(s)):
            if out.full:
                return out.report()
            if mode == ADAPTED and not (s in reach_a and u in reach_b):
                continue
            if a.is_tau and u in f.image(t):
                continue
            if any(v in f.image(t) for v in B.successors(u, a)):
                continue
            taus = [v for v in B.successors(u, TAU) if v in f.image(s)]
            if any(n(step, v) < n(step, u) for v in taus):
                continue
            if taus:
                out.add("forward-2c", step, u, "related τ-successors do not decrease the norm")
            else:
                out.add("forward-2", step, u, "no matching step and no related τ-successor")
    return out.report()


# -- normed backward simulations ------------------------------------------------

def check_normed_backward(A: Automaton, B: Automaton, b: Relation, n: NormTable = NormTable(),
                          Q=None, mode: str = PLAIN,
                          max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    """Normed backward simulation check.

    ``Q`` (default: all of ``states(B)``) is only consulted in adapted mode,
    where it is taken as given and never inferred.
    """
    _check_mode(mode)
    b = b if isinstance(b, Relation) else Relation(b)
    _check_states(b, A, B, "relation")
    _check_norm(n, A, B, allow_start=True)
    if Q is not None:
        Q = frozenset(Q)
        if not Q <= B.states:
            raise CertificateError(f"Q mentions unknown states {sorted(Q - B.states)}")
    adapted = mode == ADAPTED
    inQ = (lambda u: True) if (Q is None or not adapted) else (lambda u: u in Q)
    out = _Collector(max_violations)
    if adapted:
        reach_a = reachable_states(A)
        for s in sorted(reach_a):
            if not any(inQ(u) for u in b.image(s)):
                out.add("backward-3", s, None, "reachable state has no related Q-state")
    else:
        for s in sorted(A.states):
            if not b.image(s):
                out.add("backward-total", s, None, "state is related to nothing")
    for s in sorted(A.start):
        for u in sorted(b.image(s)):
            if out.full:
                return out.report()
            if not inQ(u) or u in B.start:
                continue
            preds = [v for v in B.predecessors(u, TAU) if v in b.image(s) and inQ(v)]
            if any(n(s, v) < n(s, u) for v in preds):
                continue
            if preds:
                out.add("backward-1b", s, u, "related τ-predecessors do not decrease the norm")
            else:
                out.add("backward-1", s, u, "not a start state and no related τ-predecessor")
    for step in sorted(A.steps, key=lambda st: (st[2], st[1], st[0])):
        t, a, s = step
        if adapted and t not in reach_a:
            continue
        for u in sorted(b.image(s)):
            if out.full:
                return out.report()
            if not inQ(u):
                continue
            if a.is_tau and u in b.image(t):
                continue
            if any(v in b.image(t) and inQ(v) for v in B.predecessors(u, a)):
                continue
            preds = [v for v in B.predecessors(u, TAU) if v in b.image(s) and inQ(v)]
            if any(n(step, v) < n(step, u) for v in preds):
                continue
            if preds:
                out.add("backward-2c", step, u, "related τ-predecessors do not decrease the norm")
            else:
                out.add("backward-2", step, u, "no matching step and no related τ-predecessor")
    return out.report()


def check_image_finite(rel) -> tuple:
    """``(True, max |rel[s]|)``; explicit relations are always image-finite.

    The distinction between image-finite and arbitrary backward simulations
    only bites on infinite automata, which are out of reach here.
    """
    rel = rel if isinstance(rel, Relation) else Relation(rel)
    return True, max((len(rel.image(s)) for s in rel.domain), default=0)


# -- branching simulations ------------------------------------------------------

def _forward_distance(A, B, f: Relation, step, u) -> Optional[int]:
    """Length of the shortest fragment from ``u`` f-related to ``step``."""
    s, a, t = step
    if u not in f.image(s):
        return None
    fs, ft = f.image(s), f.image(t)
    dist = {(0, u): 0}
    queue = deque([(0, u)])
    while queue:
        i, w = queue.popleft()
        d = dist[(i, w)]
        if i == 1:
            return d
        nxt = []
        if a.is_tau and w in ft:
            nxt.append(((1, w), d))       # left triangle costs no B-step
        for v in B.successors(w, a):
            if v in ft:
                nxt.append(((1, v), d + 1))
        for v in B.successors(w, TAU):
            if v in fs:
                nxt.append(((0, v), d + 1))
        for node, nd in nxt:
            if node not in dist or nd < dist[node]:
                dist[node] = nd
                (queue.appendleft if nd == d else queue.append)(node)
    return None


def _backward_distance(A, B, b: Relation, step, u) -> Optional[int]:
    """Length of the shortest fragment ending in ``u`` b-related to ``step``."""
    t, a, s = step
    if u not in b.image(s):
        return None
    bs, bt = b.image(s), b.image(t)
    dist = {(1, u): 0}
    queue = deque([(1, u)])
    while queue:
        i, w = queue.popleft()
        d = dist[(i, w)]
        if i == 0:
            return d
        nxt = []
        if a.is_tau and w in bt:
            nxt.append(((0, w), d))
        for v in B.predecessors(w, a):
            if v in bt:
                nxt.append(((0, v), d + 1))
        for v in B.predecessors(w, TAU):
            if v in bs:
                nxt.append(((1, v), d + 1))
        for node, nd in nxt:
            if node not in dist or nd < dist[node]:
                dist[node] = nd
                (queue.appendleft if nd == d else queue.append)(node)
    return None


def _start_distance(B, b: Relation, s, u) -> Optional[int]:
    """Shortest execution of B ending in ``u`` that stays inside ``b[s]``."""
    bs = b.image(s)
    if u not in bs:
        return None
    dist = {u: 0}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        if w in B.start:
            return dist[w]
        for v in B.predecessors(w, TAU):
            if v in bs and v not in dist:
                dist[v] = dist[w] + 1
                queue.append(v)
    return None


def check_branching_forward(A: Automaton, B: Automaton, f: Relation,
                            max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    f = f if isinstance(f, Relation) else Relation(f)
    _check_states(f, A, B, "relation")
    out = _Collector(max_violations)
    for s in sorted(A.start):
        if not f.image(s) & B.start:
            out.add("branching-forward-1", s, None, "no related start state")
    for step in sorted(A.steps):
        for u in sorted(f.image(step[0])):
            if out.full:
                return out.report()
            if _forward_distance(A, B, f, step, u) is None:
                out.add("branching-forward-2", step, u, "no f-related fragment")
    return out.report()


def check_branching_backward(A: Automaton, B: Automaton, b: Relation,
                             max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    b = b if isinstance(b, Relation) else Relation(b)
    _check_states(b, A, B, "relation")
    out = _Collector(max_violations)
    for s in sorted(A.states):
        if not b.image(s):
            out.add("branching-backward-total", s, None, "state is related to nothing")
    for s in sorted(A.start):
        for u in sorted(b.image(s)):
            if out.full:
                return out.report()
            if _start_distance(B, b, s, u) is None:
                out.add("branching-backward-1", s, u, "no b-related execution ends here")
    for step in sorted(A.steps):
        for u in sorted(b.image(step[2])):
            if out.full:
                return out.report()
            if _backward_distance(A, B, b, step, u) is None:
                out.add("branching-backward-2", step, u, "no b-related fragment")
    return out.report()


def norm_from_branching_forward(A: Automaton, B: Automaton, f: Relation,
                                strict: bool = True) -> NormTable:
    """Shortest-fragment norm for a branching forward simulation.

    With ``strict=False`` the precondition is not enforced and pairs with no
    related fragment are left at 0.
    """
    f = f if isinstance(f, Relation) else Relation(f)
    if strict:
        rep = check_branching_forward(A, B, f, max_violations=1)
        if not rep:
            raise ValueError(f"not a branching forward simulation: {rep.violations[0]}")
    entries = {}
    for step in A.steps:
        for u in f.image(step[0]):
            d = _forward_distance(A, B, f, step, u)
            if d:
                entries[(step, u)] = d
    return NormTable(entries)


def norm_from_branching_backward(A: Automaton, B: Automaton, b: Relation,
                                 strict: bool = True) -> NormTable:
    b = b if isinstance(b, Relation) else Relation(b)
    if strict:
        rep = check_branching_backward(A, B, b, max_violations=1)
        if not rep:
            raise ValueError(f"not a branching backward simulation: {rep.violations[0]}")
    entries = {}
    for s in A.start:
        for u in b.image(s):
            d = _start_distance(B, b, s, u)
            if d:
                entries[(s, u)] = d
    for step in A.steps:
        for u in b.image(step[2]):
            d = _backward_distance(A, B, b, step, u)
            if d:
                entries[(step, u)] = d
    return NormTable(entries)


# -- history and prophecy relations ---------------------------------------------

def _merge(*reports, max_image_size=None) -> CheckReport:
    violations = [v for r in reports for v in r.violations]
    return CheckReport(not violations, violations, max_image_size)


def check_history(A: Automaton, B: Automaton, r: Mapping, n: NormTable = NormTable(),
                  mode: str = PLAIN,
                  max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    """``r`` refines B into A, and its inverse is a normed forward simulation A → B."""
    return _merge(
        check_step_refinement(B, A, r, mode, max_violations),
        check_normed_forward(A, B, Relation.graph(r).inverse(), n, mode, max_violations),
    )


def check_prophecy(A: Automaton, B: Automaton, r: Mapping, n: NormTable = NormTable(),
                   image_finite_required: bool = False, mode: str = PLAIN,
                   max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    inv = Relation.graph(r).inverse()
    size = check_image_finite(inv)[1] if image_finite_required else None
    return _merge(
        check_step_refinement(B, A, r, mode, max_violations),
        check_normed_backward(A, B, inv, n, None, mode, max_violations),
        max_image_size=size,
    )


def check_certificate(A: Automaton, B: Automaton, cert: Certificate, mode: str = PLAIN,
                      max_violations: Optional[int] = DEFAULT_MAX_VIOLATIONS) -> CheckReport:
    if isinstance(cert, Refinement):
        return check_step_refinement(A, B, cert.map, mode, max_violations)
    if isinstance(cert, Forward):
        return check_normed_forward(A, B, cert.relation, cert.norm, mode, max_violations)
    if isinstance(cert, Backward):
        return check_normed_backward(A, B, cert.relation, cert.norm, cert.Q, mode, max_violations)
    if isinstance(cert, History):
        return check_history(A, B, cert.map, cert.norm, mode, max_violations)
    if isinstance(cert, Prophecy):
        return check_prophecy(A, B, cert.map, cert.norm, cert.image_finite_required,
                              mode, max_violations)
    raise TypeError(f"unknown certificate {cert!r}")


# -- certificate search ---------------------------------------------------------

def greatest_branching_forward(A: Automaton, B: Automaton) -> Relation:
    """Largest relation closed under the branching forward transfer condition.

    Branching forward simulations are closed under union, so removing
    failing pairs until nothing changes yields the greatest one (if any
    exists at all, it is contained in this relation and the start condition
    decides).
    """
    f = Relation((s, u) for s in A.states for u in B.states)
    while True:
        bad = {(s, u) for (s, a, t) in A.steps for u in f.image(s)
               if _forward_distance(A, B, f, (s, a, t), u) is None}
        if not bad:
            return f
        f = Relation(f.pairs - bad)


def greatest_branching_backward(A: Automaton, B: Automaton) -> Relation:
    b = Relation((s, u) for s in A.states for u in B.states)
    while True:
        bad = {(s, u) for s in A.start for u in b.image(s)
               if _start_distance(B, b, s, u) is None}
        bad |= {(s, u) for (t, a, s) in A.steps for u in b.image(s)
                if _backward_distance(A, B, b, (t, a, s), u) is None}
        if not bad:
            return b
        b = Relation(b.pairs - bad)


def _find_refinement(A: Automaton, B: Automaton) -> Optional[dict]:
    reach = reachable_states(A)
    order = []
    seen = set()
    queue = deque(sorted(A.start))
    seen.update(A.start)
    while queue:
        s = queue.popleft()
        order.append(s)
        for _, t in A.out_steps(s):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    steps = sorted(st for st in A.steps if st[0] in reach)
    cands_b = sorted(B.states)
    r: dict = {}

    def consistent(s):
        for x, a, y in steps:
            if s not in (x, y) or x not in r or y not in r:
                continue
            if not ((a.is_tau and r[x] == r[y]) or B.has_step(r[x], a, r[y])):
                return False
        return True

    def go(k):
        if k == len(order):
            return True
        s = order[k]
        for u in (sorted(B.start) if s in A.start else cands_b):
            r[s] = u
            if consistent(s) and go(k + 1):
                return True
            del r[s]
        return False

    return dict(r) if go(0) else None


def find_certificate(A: Automaton, B: Automaton, kind: str,
                     budget: int = DEFAULT_BUDGET) -> Optional[Certificate]:
    """Search for a refinement, forward or backward certificate from A to B.

    Forward and backward searches compute the greatest branching simulation
    and synthesise the shortest-fragment norm.  ``None`` means none exists.
    """
    if len(A.states) * len(B.states) > budget:
        raise BudgetExceeded(
            f"|states(A)|*|states(B)| = {len(A.states) * len(B.states)} exceeds budget {budget}")
    if kind == "refinement":
        r = _find_refinement(A, B)
        return None if r is None else Refinement(r)
    if kind == "forward":
        f = greatest_branching_forward(A, B)
        if not check_branching_forward(A, B, f, max_violations=1):
            return None
        return Forward(f, norm_from_branching_forward(A, B, f, strict=False))
    if kind == "backward":
        b = greatest_branching_backward(A, B)
        if not check_branching_backward(A, B, b, max_violations=1):
            return None
        return Backward(b, norm_from_branching_backward(A, B, b, strict=False))
    raise ValueError(f"cannot search for {kind!r} certificates")
