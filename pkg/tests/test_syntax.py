import pytest
from hypothesis import given, strategies as st

from compactlab.syntax import (
    App, Abort, EMPTY, EvalContext, Finite, Fun, FunctionSpec, HOLE, LetIn,
    MalformedContext, MalformedTerm, OMEGA, PAT, Pair, Throw, TRIV, UNIT, Var,
    ContVal, compose_ctx, equal, is_closed, occurs_free, plug, shift, size,
    subst, subst2, subterms,
)

from oracles import oracle_shift, oracle_subst
from strategies import closed_raw, closed_terms, raw

ID = Fun(UNIT, UNIT, Var(0))
F0 = Fun(UNIT, UNIT, App(Var(1), Var(0)))


# --- worked examples ---------------------------------------------------------

def test_shift_examples():
    assert shift(Var(0), 0, 1) == Var(1)
    assert shift(ID, 0, 5) == ID
    assert shift(App(Var(2), Var(0)), 1, 3) == App(Var(5), Var(0))


def test_shift_underflow_is_malformed():
    with pytest.raises(MalformedTerm):
        shift(Var(0), 0, -1)


def test_subst_examples():
    assert subst(Var(0), 0, TRIV) == TRIV
    assert subst(App(Var(1), Var(0)), 0, TRIV) == App(Var(0), TRIV)


def test_subst2_examples():
    v = TRIV
    assert subst2(App(Var(1), Var(0)), ID, v) == App(ID, v)
    assert subst2(Var(0), ID, TRIV) == TRIV
    assert subst2(TRIV, ID, v) == TRIV


def test_plug_examples():
    assert plug(EMPTY, ID) == ID
    assert plug(EvalContext(App(HOLE, TRIV)), ID) == App(ID, TRIV)
    k = ContVal(UNIT, HOLE)
    assert plug(EvalContext(Throw(TRIV, HOLE)), k) == Throw(TRIV, k)


def test_compose_examples():
    frame = EvalContext(App(HOLE, ID))
    assert compose_ctx(EMPTY, frame) == frame
    assert compose_ctx(frame, EMPTY) == frame
    outer = EvalContext(LetIn(HOLE, TRIV))
    assert compose_ctx(outer, frame).shape == LetIn(App(HOLE, ID), TRIV)


def test_malformed_contexts():
    with pytest.raises(MalformedContext):
        EvalContext(TRIV)
    with pytest.raises(MalformedContext):
        EvalContext(Pair(HOLE, HOLE))
    # a hole captured by a binder cannot be plugged without shifting
    with pytest.raises(MalformedContext):
        plug(EvalContext(LetIn(TRIV, HOLE)), TRIV)


def test_equal_size_closed():
    assert equal(TRIV, TRIV)
    assert not equal(ID, Fun(UNIT, UNIT, Var(1)))
    assert size(TRIV) == 1
    assert not is_closed(Var(0), 0)
    assert is_closed(F0, 0)
    assert is_closed(Var(1), 2) and not is_closed(Var(2), 2)


def test_occurs_free():
    assert occurs_free(App(Var(1), Var(0)), 1)
    assert not occurs_free(Fun(UNIT, UNIT, Var(1)), 0)
    assert occurs_free(Fun(UNIT, UNIT, Var(2)), 0)


def test_function_spec_validation():
    assert FunctionSpec(UNIT, UNIT, Var(1)).as_fun() == Fun(UNIT, UNIT, Var(1))
    with pytest.raises(ValueError):
        FunctionSpec(Var(0), UNIT, Var(0))
    with pytest.raises(ValueError):
        FunctionSpec(UNIT, UNIT, Var(2))
    with pytest.raises(ValueError):
        FunctionSpec(UNIT, UNIT, PAT)


def test_unroll_depths_are_distinct():
    assert Finite(0) != OMEGA and Finite(3) == Finite(3)
    with pytest.raises(ValueError):
        Finite(-1)


def test_subterms_preorder():
    e = App(ID, TRIV)
    assert list(subterms(e)) == [e, ID, UNIT, UNIT, Var(0), TRIV]


def test_deep_terms_do_not_overflow():
    e = TRIV
    for _ in range(3000):
        e = LetIn(e, Var(0))
    assert size(e) == 6001
    assert subst(e, 0, TRIV) == e


# --- oracle agreement --------------------------------------------------------

@given(raw, st.integers(0, 4), st.integers(0, 4))
def test_shift_matches_named_oracle(e, cutoff, amount):
    assert shift(e, cutoff, amount) == oracle_shift(e, cutoff, amount)


@given(raw, st.integers(0, 3), raw)
def test_subst_matches_named_oracle(e, index, repl):
    assert subst(e, index, repl) == oracle_subst(e, index, repl)


@given(raw, closed_raw, closed_raw)
def test_subst2_is_sequential_substitution(e, r1, r0):
    expect = subst(subst(e, 0, r0), 0, r1)
    assert subst2(e, r1, r0) == expect
    assert subst2(e, r1, r0) == subst(subst(e, 1, r1), 0, r0)


# --- laws ----------------------------------------------------------------------

@given(closed_terms(size=25), st.integers(0, 6), raw)
def test_subst_is_identity_on_closed_terms(e, index, repl):
    assert subst(e, index, repl) == e


@given(raw, st.integers(0, 4), st.integers(0, 3), st.integers(0, 3))
def test_shift_composes(e, c, a, b):
    assert shift(shift(e, c, a), c, b) == shift(e, c, a + b)
    assert shift(shift(e, c, a), c, -a) == e
    assert shift(e, c, 0) == e


@given(raw, raw, raw)
def test_equal_is_an_equivalence(a, b, c):
    assert equal(a, a)
    assert equal(a, b) == equal(b, a)
    if equal(a, b) and equal(b, c):
        assert equal(a, c)
    assert equal(a, b) == (repr(a) == repr(b))


@given(closed_terms(size=12), closed_terms(size=12))
def test_plug_compose_law(a, b):
    E = EvalContext(LetIn(Pair(HOLE, a), TRIV))
    F = EvalContext(App(Abort(UNIT, HOLE), b))
    e = TRIV
    assert plug(compose_ctx(E, F), e) == plug(E, plug(F, e))
