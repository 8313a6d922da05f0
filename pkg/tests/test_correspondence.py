import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from normsim.correspondence import (
    check_index_relation, compose_index_relations, find_correspondence, is_n_free,
    is_reduced, reduce_index_relation, same_trace_at,
)
from normsim.generators import random_index_pair
from normsim.lts import TAU, Action, ExecutionFragment, Relation

a, b = Action("a"), Action("b")


def frag(text):
    return ExecutionFragment.parse(text)


def R_of(alpha, alpha2, I):
    return Relation((alpha.state(i), alpha2.state(j)) for i, j in I)


class TestCheck:
    def test_square(self):
        v = check_index_relation(frag("q0 a q1"), frag("u0 a u1"),
                                 Relation([("q0", "u0"), ("q1", "u1")]), {(0, 0), (1, 1)})
        assert v.accepted and v.violated_condition is None

    def test_total_right(self):
        v = check_index_relation(frag("q0 a q1"), frag("u0 a u1"),
                                 Relation([("q0", "u0"), ("q1", "u1")]), {(0, 0)})
        assert not v.accepted
        assert v.violated_condition == "total-left" or v.violated_condition == "total-right"

    def test_total_right_only(self):
        v = check_index_relation(frag("q0"), frag("u0 tau u1"),
                                 Relation([("q0", "u0"), ("q0", "u1")]), {(0, 0)})
        assert (v.violated_condition, v.witness) == ("total-right", (None, 1))

    def test_triangle(self):
        alpha, alpha2 = frag("t0 tau t1 a t2"), frag("u0 a u1")
        R = Relation([("t0", "u0"), ("t1", "u0"), ("t2", "u1")])
        assert check_index_relation(alpha, alpha2, R, {(0, 0), (1, 0), (2, 1)})

    def test_out_of_range_is_a_violation(self):
        v = check_index_relation(frag("q0"), frag("u0"), Relation([("q0", "u0")]), {(0, 0), (3, 0)})
        assert v.violated_condition == "states-related" and v.witness == (3, 0)

    def test_square_label(self):
        v = check_index_relation(frag("q0 a q1"), frag("u0 b u1"),
                                 Relation([("q0", "u0"), ("q1", "u1")]), {(0, 0), (1, 1)})
        assert v.violated_condition == "square-label"

    def test_left_triangle_needs_tau(self):
        v = check_index_relation(frag("q0 a q1"), frag("u0"),
                                 Relation([("q0", "u0"), ("q1", "u0")]), {(0, 0), (1, 0)})
        assert v.violated_condition == "left-triangle-tau"

    def test_monotone(self):
        alpha, alpha2 = frag("s0 tau s1"), frag("u0 tau u1")
        I = {(0, 0), (1, 0), (0, 1), (1, 1)}
        v = check_index_relation(alpha, alpha2, R_of(alpha, alpha2, I), I)
        assert v.violated_condition == "monotone"


class TestFind:
    def test_triangle_example(self):
        alpha, alpha2 = frag("t0 tau t1 a t2"), frag("u0 a u1")
        R = Relation([("t0", "u0"), ("t1", "u0"), ("t2", "u1")])
        I = find_correspondence(alpha, alpha2, R)
        assert I == {(0, 0), (1, 0), (2, 1)}
        assert check_index_relation(alpha, alpha2, R, I)

    def test_empty_relation(self):
        assert find_correspondence(frag("q0 a q1"), frag("u0 a u1"), Relation()) is None

    def test_different_traces(self):
        R = Relation(itertools.product(["q0", "q1"], ["u0", "u1"]))
        assert find_correspondence(frag("q0 a q1"), frag("u0 b u1"), R) is None

    def test_prefers_fewest_pairs(self):
        alpha, alpha2 = frag("s0 tau s1"), frag("u0 tau u1")
        R = Relation(itertools.product(["s0", "s1"], ["u0", "u1"]))
        assert find_correspondence(alpha, alpha2, R) == {(0, 0), (1, 1)}


def _all_index_relations(n, m):
    cells = [(i, j) for i in range(n + 1) for j in range(m + 1)]
    for mask in range(1 << len(cells)):
        yield frozenset(c for k, c in enumerate(cells) if mask >> k & 1)


def _random_fragment(rng, prefix, length):
    labs = [a, b, TAU, TAU]
    return ExecutionFragment(f"{prefix}0", [(rng.choice(labs), f"{prefix}{k + 1}") for k in range(length)])


@pytest.mark.parametrize("seed", range(25))
def test_find_agrees_with_exhaustive_search(seed):
    rng = random.Random(seed)
    alpha = _random_fragment(rng, "s", rng.randint(0, 3))
    alpha2 = _random_fragment(rng, "u", rng.randint(0, 2))
    pairs = [(x, y) for x in alpha.states for y in alpha2.states]
    R = Relation(p for p in pairs if rng.random() < 0.7)
    found = find_correspondence(alpha, alpha2, R)
    witnesses = [I for I in _all_index_relations(len(alpha), len(alpha2))
                 if check_index_relation(alpha, alpha2, R, I)]
    if found is None:
        assert witnesses == []
    else:
        assert check_index_relation(alpha, alpha2, R, found)
        assert len(found) == min(len(I) for I in witnesses)


class TestReduce:
    def test_square_wins(self):
        alpha, alpha2 = frag("s0 tau s1"), frag("u0 tau u1")
        short, J = reduce_index_relation(alpha, alpha2, {(0, 0), (0, 1), (1, 1)})
        assert J == {(0, 0), (1, 1)}
        assert short == alpha2

    def test_non_monotone_input_rejected(self):
        with pytest.raises(ValueError, match="monotone"):
            reduce_index_relation(frag("s0 tau s1"), frag("u0 tau u1"),
                                  {(0, 0), (1, 0), (0, 1), (1, 1)})

    def test_already_reduced(self):
        alpha, alpha2 = frag("t0 tau t1 a t2"), frag("u0 a u1")
        I = frozenset({(0, 0), (1, 0), (2, 1)})
        assert reduce_index_relation(alpha, alpha2, I) == (alpha2, I)

    def test_prefix_cut(self):
        short, J = reduce_index_relation(frag("s0"), frag("u0 tau u1"), {(0, 0), (0, 1)})
        assert short == frag("u0") and J == {(0, 0)}

    def test_invalid_input(self):
        with pytest.raises(ValueError):
            reduce_index_relation(frag("s0 a s1"), frag("u0 a u1"), {(0, 0)})


class TestCompose:
    def test_identity(self):
        I = frozenset({(0, 0), (1, 0), (2, 1)})
        ident = {(j, j) for j in range(2)}
        assert compose_index_relations(I, ident) == I

    def test_empty(self):
        assert compose_index_relations(set(), {(0, 0)}) == frozenset()

    def test_longer_first_fragment_can_break_monotonicity(self):
        # reduced on both sides, yet a left triangle over a right triangle is not monotone
        alpha, alpha2, alpha3 = frag("p0 tau p1 a p2"), frag("q0 a q1"), frag("w0 tau w1 a w2")
        I = {(0, 0), (1, 0), (2, 1)}
        J = {(0, 0), (0, 1), (1, 2)}
        assert is_reduced(alpha, alpha2, I) and is_reduced(alpha2, alpha3, J)
        K = compose_index_relations(I, J)
        assert check_index_relation(alpha, alpha3, R_of(alpha, alpha3, K), K).violated_condition == "monotone"

    def test_example(self):
        assert compose_index_relations({(0, 0), (1, 1)}, {(0, 0), (1, 0)}) == {(0, 0), (1, 0)}
        alpha, alpha3 = frag("s0 tau s1"), frag("w0")
        K = compose_index_relations({(0, 0), (1, 1)}, {(0, 0), (1, 0)})
        assert check_index_relation(alpha, alpha3, R_of(alpha, alpha3, K), K)


seeds = st.integers(0, 10**6)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_generated_pairs_are_valid_and_traces_agree(seed):
    alpha, alpha2, I = random_index_pair(random.Random(seed))
    assert check_index_relation(alpha, alpha2, R_of(alpha, alpha2, I), I)
    for i, j in I:
        assert same_trace_at(alpha, alpha2, i, j)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_reduce_output_is_reduced(seed):
    alpha, alpha2, I = random_index_pair(random.Random(seed))
    short, J = reduce_index_relation(alpha, alpha2, I)
    assert J <= I
    assert alpha2.states[:len(short) + 1] == short.states
    assert check_index_relation(alpha, short, R_of(alpha, alpha2, I), J)
    assert is_n_free(J) and is_reduced(alpha, short, J)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_composition_of_reduced_relations(seed):
    # alpha is one step (as in the transitivity argument); alpha ~ alpha2 ~ alpha3, both reduced
    rng = random.Random(seed)
    alpha, alpha2, I = random_index_pair(rng)
    while len(alpha) != 1:
        alpha, alpha2, I = random_index_pair(rng)
    alpha2, J0 = reduce_index_relation(alpha, alpha2, I)
    # build a third fragment from alpha2 by re-running the generator's moves on its labels
    tail, K = [], {(0, 0)}
    j = k = 0
    for lab in alpha2.labels:
        while rng.random() < 0.3:
            tail.append((TAU, f"w{len(tail) + 1}"))
            k += 1
            K.add((j, k))
        if lab.is_tau and rng.random() < 0.5:
            j += 1
        else:
            tail.append((lab, f"w{len(tail) + 1}"))
            j, k = j + 1, k + 1
        K.add((j, k))
    alpha3 = ExecutionFragment("w0", tail)
    assert check_index_relation(alpha2, alpha3, R_of(alpha2, alpha3, K), K)
    alpha3, K = reduce_index_relation(alpha2, alpha3, K)
    L = compose_index_relations(J0, K)
    assert check_index_relation(alpha, alpha3, R_of(alpha, alpha3, L), L)
