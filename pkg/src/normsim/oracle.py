"""Exact finite-trace inclusion between finite automata.

Independent of every simulation notion: A is run in product with the
on-the-fly τ-closed subset construction of B.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lts import Automaton, tau_closure

__all__ = ["InclusionVerdict", "trace_inclusion", "trace_equivalence", "format_trace"]


@dataclass(frozen=True)
class InclusionVerdict:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def format_trace(beta) -> str:
    return " ".join(str(a) for a in beta)


def trace_inclusion(A: Automaton, B: Automaton) -> InclusionVerdict:
    """Decide ``ftraces(A) ⊆ ftraces(B)``.

    The witness, if any, is the shortest trace of A that B lacks; among
    equally short ones the lexicographically least.
    """
    closure_cache: dict = {}

    def close(states):
        key = frozenset(states)
        if key not in closure_cache:
            closure_cache[key] = tau_closure(B, key)
        return closure_cache[key]

    post_cache: dict = {}

    def post(subset, a):
        key = (subset, a)
        if key not in post_cache:
            post_cache[key] = close({v for u in subset for v in B.successors(u, a)})
        return post_cache[key]

    b0 = close(B.start)
    best: dict = {}

    def tau_saturate(layer):
        # A-side τ-steps keep the trace; propagate the least trace
        todo = sorted(layer)
        while todo:
            node = todo.pop()
            s, sub = node
            for a, t in A.out_steps(s):
                if a.is_tau:
                    nxt = (t, sub)
                    if nxt in best:
                        continue
                    if nxt not in layer or layer[node] < layer[nxt]:
                        layer[nxt] = layer[node]
                        todo.append(nxt)
        return layer

    layer = tau_saturate({(s, b0): () for s in A.start})
    best.update(layer)
    while layer:
        failures = []
        nxt_layer: dict = {}
        for (s, sub), beta in layer.items():
            for a, t in A.out_steps(s):
                if a.is_tau:
                    continue
                sub2 = post(sub, a)
                cand = beta + (a,)
                if not sub2:
                    failures.append(cand)
                    continue
                node = (t, sub2)
                if node in best:
                    continue
                if node not in nxt_layer or cand < nxt_layer[node]:
                    nxt_layer[node] = cand
        if failures:
            return InclusionVerdict(False, min(failures))
        layer = tau_saturate(nxt_layer)
        best.update(layer)
    return InclusionVerdict(True)


def trace_equivalence(A: Automaton, B: Automaton) -> tuple:
    """``(A ⊆ B, B ⊆ A)`` as a pair of verdicts."""
    return trace_inclusion(A, B), trace_inclusion(B, A)
