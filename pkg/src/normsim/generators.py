"""Random automata, executions and index relations for property tests and experiments."""
from __future__ import annotations

import random
from typing import Optional

from .lts import TAU, Action, Automaton, ExecutionFragment, tau_closure

__all__ = [
    "random_automaton", "random_acyclic_automaton", "determinize", "random_execution",
    "random_sub_automaton", "random_index_pair", "bijective_renaming",
    "random_quotient", "included_acyclic_pair", "deterministic_pair",
]

DEFAULT_ALPHABET = ("a", "b")


def _labels(alphabet, tau):
    labs = [Action(x) for x in alphabet]
    return labs + [TAU] if tau else labs


def random_automaton(rng: random.Random, max_states: int = 6, max_steps: int = 10,
                     alphabet=DEFAULT_ALPHABET, tau: bool = True, prefix: str = "s",
                     min_states: int = 1) -> Automaton:
    n = rng.randint(min_states, max_states)
    states = [f"{prefix}{i}" for i in range(n)]
    labs = _labels(alphabet, tau)
    steps = {(rng.choice(states), rng.choice(labs), rng.choice(states))
             for _ in range(rng.randint(0, max_steps))}
    start = [states[0]] + [s for s in states[1:] if rng.random() < 0.15]
    return Automaton(states, start, steps, [Action(x) for x in alphabet])


def random_acyclic_automaton(rng: random.Random, max_states: int = 6, max_steps: int = 10,
                             alphabet=DEFAULT_ALPHABET, tau: bool = True,
                             prefix: str = "s") -> Automaton:
    """Steps only go from lower to higher state numbers."""
    n = rng.randint(1, max_states)
    states = [f"{prefix}{i}" for i in range(n)]
    labs = _labels(alphabet, tau)
    steps = set()
    if n > 1:
        for _ in range(rng.randint(0, max_steps)):
            i = rng.randrange(n - 1)
            j = rng.randrange(i + 1, n)
            steps.add((states[i], rng.choice(labs), states[j]))
    start = [states[0]] + [s for s in states[1:] if rng.random() < 0.1]
    return Automaton(states, start, steps, [Action(x) for x in alphabet])


def determinize(A: Automaton, prefix: str = "d") -> Automaton:
    """τ-free subset construction; reachable non-empty subsets only."""
    start = tau_closure(A, A.start)
    names = {start: f"{prefix}0"}
    todo = [start]
    steps = []
    ext = sorted(A.external)
    while todo:
        cur = todo.pop()
        for a in ext:
            nxt = tau_closure(A, {t for s in cur for t in A.successors(s, a)})
            if not nxt:
                continue
            if nxt not in names:
                names[nxt] = f"{prefix}{len(names)}"
                todo.append(nxt)
            steps.append((names[cur], a, names[nxt]))
    return Automaton(names.values(), [names[start]], steps, ext)


def random_sub_automaton(rng: random.Random, B: Automaton, keep: float = 0.7,
                         prefix: str = "x") -> Automaton:
    """Copy of B with some steps dropped and τ-detours inserted; its traces are B's."""
    ren = {s: f"{prefix}{i}" for i, s in enumerate(sorted(B.states))}
    steps = []
    extra = 0
    for s, a, t in sorted(B.steps):
        if rng.random() > keep:
            continue
        if rng.random() < 0.2:
            mid = f"{prefix}m{extra}"
            extra += 1
            steps += [(ren[s], TAU, mid), (mid, a, ren[t])]
        else:
            steps.append((ren[s], a, ren[t]))
    states = list(ren.values()) + [f"{prefix}m{i}" for i in range(extra)]
    return Automaton(states, [ren[s] for s in B.start], steps, B.external)


def random_execution(rng: random.Random, A: Automaton, length: int,
                     start: Optional[str] = None) -> ExecutionFragment:
    """Random walk from a start state, stopping early at deadlocks."""
    first = start if start is not None else rng.choice(sorted(A.start))
    s, tail = first, []
    for _ in range(length):
        out = sorted(A.out_steps(s))
        if not out:
            break
        a, s = rng.choice(out)
        tail.append((a, s))
    return ExecutionFragment(first, tail)


def random_index_pair(rng: random.Random, max_moves: int = 8, alphabet=DEFAULT_ALPHABET):
    """``(alpha, alpha2, I)`` with ``I`` a valid index relation on fresh states.

    ``I`` is a random staircase path, sometimes thickened with the extra
    corner of an N shape where both labels are τ.
    """
    labs = [Action(x) for x in alphabet]
    la, lb = [], []
    path = [(0, 0)]
    i = j = 0
    extras = set()
    for _ in range(rng.randint(0, max_moves)):
        kind = rng.choice(("sq", "sq", "left", "right"))
        if kind == "sq":
            lab = rng.choice(labs + [TAU])
            la.append(lab)
            lb.append(lab)
            if lab.is_tau and rng.random() < 0.5:
                extras.add(rng.choice(((i + 1, j), (i, j + 1))))
            i, j = i + 1, j + 1
        elif kind == "left":
            la.append(TAU)
            i += 1
        else:
            lb.append(TAU)
            j += 1
        path.append((i, j))
    alpha = ExecutionFragment("p0", [(a, f"p{k + 1}") for k, a in enumerate(la)])
    alpha2 = ExecutionFragment("q0", [(a, f"q{k + 1}") for k, a in enumerate(lb)])
    return alpha, alpha2, frozenset(path) | frozenset(extras)


def bijective_renaming(rng: random.Random, A: Automaton, prefix: str = "r") -> tuple:
    """A copy of A under a random bijection on states; returns ``(copy, mapping)``."""
    states = sorted(A.states)
    targets = [f"{prefix}{i}" for i in range(len(states))]
    rng.shuffle(targets)
    mapping = dict(zip(states, targets))
    return A.rename(mapping), mapping


def random_quotient(rng: random.Random, A: Automaton, max_states: int, extra_steps: int = 3,
                    prefix: str = "u") -> Automaton:
    """Merge A's states onto at most ``max_states`` classes and add a few random steps.

    Merging and adding steps only add behaviour, so A's traces are kept.
    """
    k = rng.randint(1, max(1, min(max_states, len(A.states))))
    cls = {s: f"{prefix}{rng.randrange(k)}" for s in sorted(A.states)}
    states = sorted(set(cls.values()))
    labs = sorted(A.actions, key=str)
    steps = {(cls[s], a, cls[t]) for s, a, t in A.steps}
    for _ in range(rng.randint(0, extra_steps)):
        steps.add((rng.choice(states), rng.choice(labs), rng.choice(states)))
    return Automaton(states, {cls[s] for s in A.start}, steps, A.external)


def included_acyclic_pair(rng: random.Random, max_states: int = 5, max_steps: int = 8,
                          attempts: int = 30):
    """``(A, B)`` with A acyclic and (by construction or by search) traces(A) ⊆ traces(B).

    Half the time B is an unrelated random automaton found by rejection
    sampling; otherwise, or when sampling gives up, B is a random quotient of A.
    """
    from .oracle import trace_inclusion

    A = random_acyclic_automaton(rng, max_states, max_steps, prefix="s")
    if rng.random() < 0.5:
        for _ in range(attempts):
            B = random_automaton(rng, max_states, max_steps, prefix="u")
            if trace_inclusion(A, B).holds:
                return A, B
    return A, random_quotient(rng, A, max_states)


def deterministic_pair(rng: random.Random, max_states: int = 5, max_steps: int = 9):
    """``(A, B)`` with B τ-free deterministic and traces(A) ⊆ traces(B).

    A is a pruned copy of B with τ-detours, sometimes with extra τ-loops and
    merged τ-chains on top.
    """
    B = determinize(random_automaton(rng, max_states, max_steps, prefix="s"), prefix="u")
    A = random_sub_automaton(rng, B, keep=rng.uniform(0.5, 1.0), prefix="s")
    if rng.random() < 0.3:
        steps = set(A.steps) | {(s, TAU, s) for s in A.states if rng.random() < 0.3}
        A = Automaton(A.states, A.start, steps, A.external)
    return A, B
