from pathlib import Path

import pytest
from hypothesis import given

from compactlab.surface import ParseError, UnboundName, parse, parse_type, show
from compactlab.syntax import (
    App, Arrow, ContVal, Fun, HOLE, LetCC, PAT, TRIV, UNIT, VOID, Var,
)
from compactlab.pattern import fill
from compactlab.syntax import Finite, OMEGA

from strategies import closed_terms, pattern_contexts, patterns

ROOT = Path(__file__).resolve().parent.parent


def test_parse_examples():
    assert parse("()") == TRIV
    assert parse("(fun f (x : unit) : unit x)") == Fun(UNIT, UNIT, Var(0))
    assert parse("(fun f (x : unit) : unit f)") == Fun(UNIT, UNIT, Var(1))
    assert parse("(@ ())") == App(PAT, TRIV)
    assert parse("_") == HOLE
    assert parse_type("(-> void unit)") == Arrow(VOID, UNIT)
    assert parse("(letcc (k : unit) k)") == LetCC(UNIT, Var(0))


def test_application_folds_left():
    f = "(fun f (x : unit) : unit x)"
    assert parse(f"({f} () ())") == App(App(parse(f), TRIV), TRIV)


def test_shadowing_and_mixed_binders():
    e = parse("(tlam a (fun a (x : a) : a x))")
    # the term binder a does not capture the type name a
    assert show(e) == "(tlam a0 (fun f1 (x2 : a0) : a0 x2))"
    with pytest.raises(ParseError):
        parse("(fun f (x : unit) : unit (tapp x f))")


def test_comments_and_whitespace():
    assert parse("; a comment\n  ( )  ; trailing\n") == TRIV


def test_errors_carry_positions():
    with pytest.raises(ParseError) as info:
        parse("(pair ()\n  (fst ))")
    assert (info.value.line, info.value.col) == (2, 3)
    with pytest.raises(UnboundName) as info:
        parse("(fun f (x : unit) : unit y)")
    assert info.value.col == 26
    with pytest.raises(ParseError):
        parse("(pair ()")
    with pytest.raises(ParseError):
        parse("() ()")


def test_contval_is_internal():
    with pytest.raises(ParseError):
        parse("(contval unit _)")
    assert parse("(contval unit _)", allow_internal=True) == ContVal(UNIT, HOLE)
    assert show(ContVal(UNIT, HOLE)) == "(contval unit _)"


def test_free_indices_print_and_parse():
    assert show(Var(3)) == "%3"
    assert parse("%3") == Var(3)
    e = Fun(UNIT, UNIT, Var(4))
    assert parse(show(e)) == e


def test_sample_files_reparse():
    for path in sorted((ROOT / "samples").iterdir()):
        e = parse(path.read_text())
        assert parse(show(e)) == e, path.name


@given(closed_terms(size=30, control=0.15))
def test_round_trip_terms(e):
    assert parse(show(e)) == e


@given(patterns(size=25))
def test_round_trip_patterns_and_fillings(case):
    spec, p = case
    assert parse(show(p)) == p
    for depth in (Finite(0), Finite(3), OMEGA):
        e = fill(p, spec, depth)
        assert parse(show(e)) == e


@given(pattern_contexts())
def test_round_trip_contexts(case):
    _, _, E = case
    assert parse(show(E.shape)) == E.shape
    # a captured continuation prints in internal syntax
    k = ContVal(UNIT, E.shape)
    assert parse(show(k), allow_internal=True) == k
