import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from conftest import DET1, DIV, ID1, LIN, NDET, TAU1, a, b
from normsim.constructions import (
    ChoiceOutcome, LiftingError, canonical_relation, check_isomorphism, compose_certificates,
    lift_execution_backward, lift_execution_forward, lift_execution_refinement, lift_norm,
    superpose, unfold,
)
from normsim.correspondence import check_index_relation
from normsim.generators import (
    bijective_renaming, random_acyclic_automaton, random_automaton, random_execution,
)
from normsim.lts import (
    TAU, Action, ExecutionFragment, Relation, is_execution, is_forest, trace_of,
)
from normsim.oracle import trace_inclusion
from normsim.simulation import (
    Forward, NormTable, Refinement, check_branching_backward, check_branching_forward,
    check_history, check_normed_backward, check_normed_forward, check_prophecy,
    check_step_refinement, find_certificate,
)
from normsim.speclang.examples import channel_example


def frag(text):
    return ExecutionFragment.parse(text)


def ident(A):
    return {s: s for s in A.states}


@pytest.fixture(scope="module")
def ch():
    return channel_example()


def test_choice_outcome_invariant():
    with pytest.raises(ValueError):
        ChoiceOutcome("L", "u")
    with pytest.raises(ValueError):
        ChoiceOutcome("C")


class TestLiftRefinement:
    def test_tau_collapses(self):
        r = {"t0": "q0", "t1": "q0", "t2": "q1"}
        beta, I = lift_execution_refinement(TAU1, LIN, r, frag("t0 tau t1 a t2"))
        assert beta == frag("q0 a q1")
        assert I == {(0, 0), (1, 0), (2, 1)}

    def test_identity_is_diagonal(self):
        alpha = frag("q0 a q1 b q2")
        beta, I = lift_execution_refinement(LIN, LIN, ident(LIN), alpha)
        assert beta == alpha and I == {(0, 0), (1, 1), (2, 2)}

    def test_channel(self, ch):
        s1, r1 = Action("send", (1,)), Action("receive", (1,))
        alpha = ExecutionFragment("buffer1=[];buffer2=[]", [
            (s1, "buffer1=[1];buffer2=[]"), (TAU, "buffer1=[];buffer2=[1]"),
            (r1, "buffer1=[];buffer2=[]")])
        beta, I = lift_execution_refinement(ch.two_channels, ch.channel_wide, ch.refinement.map, alpha)
        assert beta.labels == (s1, r1)

    def test_rejects_non_refinement(self):
        with pytest.raises(LiftingError):
            lift_execution_refinement(TAU1, LIN, {"t0": "q0", "t1": "q1", "t2": "q2"}, frag("t0"))


class TestLiftForward:
    def test_identity(self):
        alpha = frag("q0 a q1 b q2")
        beta, I = lift_execution_forward(LIN, LIN, Relation.graph(ident(LIN)), NormTable(), alpha, "q0")
        assert beta == alpha

    def test_channel_pays_norm(self, ch):
        s1, r1 = Action("send", (1,)), Action("receive", (1,))
        alpha = ExecutionFragment("buffer=[]", [(s1, "buffer=[1]"), (r1, "buffer=[]")])
        beta, I = lift_execution_forward(ch.channel, ch.two_channels, ch.forward.relation,
                                         ch.forward.norm, alpha, "buffer1=[];buffer2=[]")
        assert beta.labels == (s1, TAU, r1)
        assert check_index_relation(alpha, beta, ch.forward.relation, I)

    def test_single_state(self):
        beta, I = lift_execution_forward(LIN, LIN, Relation.graph(ident(LIN)), NormTable(),
                                         frag("q1"), "q1")
        assert beta == frag("q1") and I == {(0, 0)}


class TestLiftBackward:
    def test_identity(self):
        alpha = frag("q0 a q1 b q2")
        beta, _ = lift_execution_backward(LIN, LIN, Relation.graph(ident(LIN)), NormTable(), alpha, "q2")
        assert beta == alpha

    def test_ndet(self):
        b_ = Relation([("n0", "q0"), ("n1", "q1"), ("n2", "q1")])
        beta, I = lift_execution_backward(NDET, DET1, b_, NormTable(), frag("n0 a n1"), "q1")
        assert beta == frag("q0 a q1") and I == {(0, 0), (1, 1)}

    def test_single_start_state(self):
        beta, I = lift_execution_backward(LIN, LIN, Relation.graph(ident(LIN)), NormTable(),
                                          frag("q0"), "q0")
        assert beta == frag("q0") and I == {(0, 0)}


class TestUnfold:
    def test_lin(self):
        U, last = unfold(LIN, 3)
        assert len(U.states) == 3 and is_forest(U)
        assert check_isomorphism(U, LIN) is not None
        assert check_step_refinement(U, LIN, last)

    def test_id1(self):
        U, _ = unfold(ID1, 4)
        assert len(U.states) == 1

    def test_ndet(self):
        U, _ = unfold(NDET, 2)
        assert len(U.states) == 3

    def test_cyclic_warns(self):
        with pytest.warns(UserWarning):
            U, _ = unfold(DIV, 3)
        assert is_forest(U)


class TestSuperpose:
    def test_identity(self):
        C, pi1, pi2 = superpose(LIN, Relation.graph(ident(LIN)), LIN)
        assert check_isomorphism(C, LIN) is not None

    def test_channel(self, ch):
        f, n = ch.forward.relation, ch.forward.norm
        C, pi1, pi2 = superpose(ch.channel, f, ch.two_channels)
        assert check_step_refinement(C, ch.two_channels, pi2)
        assert check_history(ch.channel, C, pi1, lift_norm(n, pi2))

    def test_no_start_pair(self):
        with pytest.raises(ValueError):
            superpose(LIN, Relation([("q1", "q1")]), LIN)


class TestCanonical:
    def test_lin(self):
        assert canonical_relation(LIN, LIN) == Relation.graph(ident(LIN))

    def test_unfold_ndet(self):
        U, _ = unfold(NDET, 2)
        R = canonical_relation(U, DET1)
        assert R.image("n0") == {"q0"}
        assert check_branching_backward(U, DET1, R)

    def test_id1(self):
        assert canonical_relation(ID1, ID1) == Relation([("q0", "q0")])


class TestCompose:
    def test_identity(self):
        r = Refinement(ident(LIN))
        assert compose_certificates(r, r).map == ident(LIN)

    def test_chain(self):
        r1 = Refinement({"t0": "q0", "t1": "q0", "t2": "q1"})
        c = compose_certificates(r1, Refinement(ident(LIN)))
        assert check_step_refinement(TAU1, LIN, c.map)

    def test_mismatch(self):
        with pytest.raises(TypeError):
            compose_certificates(Refinement(ident(LIN)), Forward(Relation(), NormTable()))

    def test_forward(self):
        f = Forward(Relation.graph(ident(LIN)), NormTable())
        g = compose_certificates(f, f, LIN, LIN)
        assert check_normed_forward(LIN, LIN, g.relation, g.norm)


class TestIsomorphism:
    def test_renamed(self, rng):
        copy, mapping = bijective_renaming(rng, LIN)
        assert check_isomorphism(LIN, copy) == mapping

    def test_none(self):
        assert check_isomorphism(LIN, TAU1) is None
        assert check_isomorphism(NDET, DET1) is None


seeds = st.integers(0, 10**6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_lifted_pairs_correspond(seed):
    rng = random.Random(seed)
    A, B = random_automaton(rng, 5, 8, prefix="s"), random_automaton(rng, 5, 8, prefix="u")
    for kind in ("refinement", "forward", "backward"):
        c = find_certificate(A, B, kind)
        if c is None:
            continue
        alpha = random_execution(rng, A, rng.randint(0, 6))
        if kind == "refinement":
            beta, I = lift_execution_refinement(A, B, c.map, alpha)
            R = Relation.graph(c.map)
        elif kind == "forward":
            u = min(c.relation.image(alpha.first) & B.start)
            beta, I = lift_execution_forward(A, B, c.relation, c.norm, alpha, u)
            R = c.relation
        else:
            u = min(c.relation.image(alpha.last))
            beta, I = lift_execution_backward(A, B, c.relation, c.norm, alpha, u)
            R = c.relation
            assert is_execution(B, beta)
        assert check_index_relation(alpha, beta, R, I)
        assert trace_of(alpha) == trace_of(beta)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_unfold_is_a_history_of_the_original(seed):
    A = random_acyclic_automaton(random.Random(seed))
    U, last = unfold(A, len(A.states))
    assert is_forest(U)
    assert check_step_refinement(U, A, last)
    assert check_normed_forward(A, U, Relation.graph(last).inverse(), NormTable())


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_history_accepts_any_norm(seed):
    rng = random.Random(seed)
    A = random_acyclic_automaton(rng)
    U, last = unfold(A, len(A.states))
    n = NormTable({((s, a_, t), w): rng.randint(0, 3) for s, a_, t in A.steps
                   for w in U.states if last[w] == s})
    assert check_history(A, U, last, n)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_superposition_projections(seed):
    rng = random.Random(seed)
    A, B = random_automaton(rng, 4, 7, prefix="s"), random_automaton(rng, 4, 7, prefix="u")
    fwd = find_certificate(A, B, "forward")
    if fwd is not None:
        C, pi1, pi2 = superpose(A, fwd.relation, B)
        assert check_step_refinement(C, B, pi2)
        assert check_history(A, C, pi1, lift_norm(fwd.norm, pi2))
    bwd = find_certificate(A, B, "backward")
    if bwd is not None:
        C, pi1, pi2 = superpose(A, bwd.relation, B)
        assert check_step_refinement(C, B, pi2)
        assert check_prophecy(A, C, pi1, lift_norm(bwd.norm, pi2))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_canonical_relations_are_complete(seed):
    rng = random.Random(seed)
    A = random_acyclic_automaton(rng, prefix="s")
    B = random_automaton(rng, 5, 8, prefix="u")
    if not trace_inclusion(A, B).holds:
        return
    U, _ = unfold(A, len(A.states))
    assert check_branching_backward(U, B, canonical_relation(U, B))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_forward_simulations_compose(seed):
    rng = random.Random(seed)
    A = random_automaton(rng, 4, 6, prefix="s")
    B = random_automaton(rng, 4, 6, prefix="u")
    C = random_automaton(rng, 4, 6, prefix="w")
    f, g = find_certificate(A, B, "forward"), find_certificate(B, C, "forward")
    if f is None or g is None:
        return
    h = compose_certificates(f, g, A, C)
    assert check_branching_forward(A, C, h.relation)
    assert check_normed_forward(A, C, h.relation, h.norm)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_mutual_history_gives_isomorphism(seed):
    rng = random.Random(seed)
    A = random_automaton(rng, 5, 8)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        B, mapping = bijective_renaming(rng, A)
    inv = {v: k for k, v in mapping.items()}
    assert check_history(A, B, inv) and check_history(B, A, mapping)
    assert check_isomorphism(A, B) is not None
