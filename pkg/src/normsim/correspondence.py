"""Index relations between finite execution fragments.

An index relation ``I`` relates positions of ``alpha`` to positions of
``alpha2``.  It witnesses that the fragments correspond via a state
relation ``R`` when it is R-respecting, monotone, total in both
directions, and its squares carry equal labels while its triangles carry τ.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .lts import ExecutionFragment, Relation, trace_of

__all__ = [
    "IndexRelation", "CorrespondenceVerdict", "CONDITIONS",
    "check_index_relation", "find_correspondence", "reduce_index_relation",
    "compose_index_relations", "is_reduced", "is_n_free",
]

CONDITIONS = (
    "states-related", "monotone", "total-left", "total-right",
    "square-label", "left-triangle-tau", "right-triangle-tau",
)

IndexRelation = frozenset  # of (i, j) pairs


def _as_index_relation(pairs: Iterable) -> frozenset:
    return frozenset((int(i), int(j)) for i, j in pairs)


@dataclass(frozen=True)
class CorrespondenceVerdict:
    accepted: bool
    violated_condition: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.accepted


def check_index_relation(alpha: ExecutionFragment, alpha2: ExecutionFragment,
                         R, I) -> CorrespondenceVerdict:
    """Check the four index-relation conditions, reporting the first failure.

    Out-of-range indices are reported as ``states-related`` failures.
    """
    I = _as_index_relation(I)
    pairs = sorted(I)
    n, m = len(alpha), len(alpha2)
    for i, j in pairs:
        if not (0 <= i <= n and 0 <= j <= m):
            return CorrespondenceVerdict(False, "states-related", (i, j))
        if (alpha.state(i), alpha2.state(j)) not in R:
            return CorrespondenceVerdict(False, "states-related", (i, j))
    # monotone: i < i' implies j <= j'; enough to compare neighbouring rows
    max_j: dict = {}
    min_j: dict = {}
    for i, j in pairs:
        max_j[i] = max(max_j.get(i, j), j)
        min_j[i] = min(min_j.get(i, j), j)
    rows = sorted(max_j)
    running = None
    for i in rows:
        if running is not None and min_j[i] < running[1]:
            return CorrespondenceVerdict(False, "monotone", (running[0], i))
        if running is None or max_j[i] >= running[1]:
            running = (i, max_j[i])
    cols = {j for _, j in pairs}
    for i in range(n + 1):
        if i not in max_j:
            return CorrespondenceVerdict(False, "total-left", (i, None))
    for j in range(m + 1):
        if j not in cols:
            return CorrespondenceVerdict(False, "total-right", (None, j))
    for i, j in pairs:
        if (i + 1, j + 1) in I and alpha.label(i + 1) != alpha2.label(j + 1):
            return CorrespondenceVerdict(False, "square-label", (i, j))
        if (i + 1, j) in I and not alpha.label(i + 1).is_tau:
            return CorrespondenceVerdict(False, "left-triangle-tau", (i, j))
        if (i, j + 1) in I and not alpha2.label(j + 1).is_tau:
            return CorrespondenceVerdict(False, "right-triangle-tau", (i, j))
    return CorrespondenceVerdict(True)


def _moves(alpha, alpha2, R, i, j):
    """Grid moves from ``(i, j)`` in the pair order that sorts lowest first."""
    n, m = len(alpha), len(alpha2)
    out = []
    if j < m and alpha2.label(j + 1).is_tau and (alpha.state(i), alpha2.state(j + 1)) in R:
        out.append((i, j + 1))
    if i < n and alpha.label(i + 1).is_tau and (alpha.state(i + 1), alpha2.state(j)) in R:
        out.append((i + 1, j))
    if (i < n and j < m and alpha.label(i + 1) == alpha2.label(j + 1)
            and (alpha.state(i + 1), alpha2.state(j + 1)) in R):
        out.append((i + 1, j + 1))
    return out


def find_correspondence(alpha: ExecutionFragment, alpha2: ExecutionFragment,
                        R) -> Optional[frozenset]:
    """Smallest witness index relation, ties broken by sorted pair order.

    Every index relation contains a staircase path from ``(0, 0)`` to the
    final corner, and such a path is itself an index relation, so minimal
    witnesses are shortest paths in the grid.
    """
    n, m = len(alpha), len(alpha2)
    if (alpha.state(0), alpha2.state(0)) not in R:
        return None
    if (alpha.state(n), alpha2.state(m)) not in R:
        return None
    INF = float("inf")
    dist = [[INF] * (m + 1) for _ in range(n + 1)]
    dist[n][m] = 1
    # moves only increase i + j, so sweep anti-diagonals backwards
    for total in range(n + m - 1, -1, -1):
        for i in range(max(0, total - m), min(n, total) + 1):
            j = total - i
            if (alpha.state(i), alpha2.state(j)) not in R:
                continue
            best = min((dist[a][b] for a, b in _moves(alpha, alpha2, R, i, j)), default=INF)
            dist[i][j] = best + 1
    if dist[0][0] == INF:
        return None
    path = [(0, 0)]
    i = j = 0
    while (i, j) != (n, m):
        want = dist[i][j] - 1
        i, j = next((a, b) for a, b in _moves(alpha, alpha2, R, i, j) if dist[a][b] == want)
        path.append((i, j))
    return frozenset(path)


def is_n_free(I) -> bool:
    I = _as_index_relation(I)
    return not any((i + 1, j + 1) in I and ((i + 1, j) in I or (i, j + 1) in I)
                   for i, j in I)


def is_reduced(alpha: ExecutionFragment, alpha2: ExecutionFragment, I) -> bool:
    I = _as_index_relation(I)
    final = {j for i, j in I if i == len(alpha)}
    return final == {len(alpha2)} and is_n_free(I)


def reduce_index_relation(alpha: ExecutionFragment, alpha2: ExecutionFragment, I,
                          R=None):
    """Cut ``alpha2`` to a prefix related to ``alpha`` by a reduced ``J ⊆ I``.

    Follows the pair sequence that prefers a square, then a left triangle,
    then a right triangle, stopping when the final index of ``alpha`` is
    reached.  Returns ``(prefix, J)``.  ``R`` defaults to the state pairs
    that ``I`` itself relates.
    """
    I = _as_index_relation(I)
    if R is None:
        n, m = len(alpha), len(alpha2)
        R = Relation((alpha.state(i), alpha2.state(j)) for i, j in I
                     if 0 <= i <= n and 0 <= j <= m)
    verdict = check_index_relation(alpha, alpha2, R, I)
    if not verdict:
        raise ValueError(f"not an index relation: {verdict.violated_condition} at {verdict.witness}")
    i = j = 0
    J = [(0, 0)]
    while i < len(alpha):
        if (i + 1, j + 1) in I:
            i, j = i + 1, j + 1
        elif (i + 1, j) in I:
            i = i + 1
        elif (i, j + 1) in I:
            j = j + 1
        else:  # unreachable for a valid index relation
            raise AssertionError("stuck while reducing")
        J.append((i, j))
    return alpha2.prefix(j), frozenset(J)


def compose_index_relations(I, J) -> frozenset:
    """``J ∘ I``: pairs ``(i, k)`` with ``(i, j) ∈ I`` and ``(j, k) ∈ J``."""
    I = _as_index_relation(I)
    J = _as_index_relation(J)
    by_left: dict = {}
    for j, k in J:
        by_left.setdefault(j, set()).add(k)
    return frozenset((i, k) for i, j in I for k in by_left.get(j, ()))


def same_trace_at(alpha, alpha2, i, j) -> bool:
    return trace_of(alpha.prefix(i)) == trace_of(alpha2.prefix(j))
