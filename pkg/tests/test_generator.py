from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from compactlab import specs, syntax as S
from compactlab.generator import (
    GenConfig, GiveUp, count_holes, gen_ctx, gen_pattern, gen_term, gen_type,
    gen_value,
)
from compactlab.pattern import fill
from compactlab.statics import TermVar, extend, typeof, typeof_ctx, wf_type
from compactlab.surface import parse, parse_type, show
from compactlab.syntax import Arrow, ContTy, EMPTY, OMEGA, UNIT, VOID, subterms

from strategies import SPECS, seeds

GOLDEN = Path(__file__).parent / "golden"


def golden(name):
    return (GOLDEN / name).read_text().strip()


def test_golden_type():
    ty = gen_type(GenConfig(seed=42, max_size=5))
    assert show(ty) == golden("gen_type_seed42_size5.lang")
    assert ty == parse_type(golden("gen_type_seed42_size5.lang"))


def test_golden_term():
    e = gen_term(GenConfig(seed=7), goal=Arrow(UNIT, UNIT))
    assert e == parse(golden("gen_term_seed7_arrow.lang"))
    assert typeof(None, (), e) == Arrow(UNIT, UNIT)


def test_golden_pattern():
    spec = specs.load("identity")
    p, holes = gen_pattern(GenConfig(seed=99, hole_weight=0.2), spec)
    assert p == parse(golden("gen_pattern_seed99_identity.lang"))
    assert holes >= 1 and holes == count_holes(p)


def test_smallest_budgets():
    assert gen_type(GenConfig(max_size=1)) == UNIT
    assert gen_term(GenConfig(max_size=1)) == S.TRIV
    assert gen_ctx(GenConfig(max_size=1), UNIT) == EMPTY


def test_void_goal_without_ammunition_gives_up():
    for seed in range(20):
        with pytest.raises(GiveUp):
            gen_term(GenConfig(seed=seed, max_size=15), goal=VOID)


def test_void_goal_with_a_continuation_in_scope():
    ctx = extend((), TermVar(ContTy(UNIT)))
    e = gen_term(GenConfig(seed=3, max_size=6, throw_weight=0.5), ctx=ctx, goal=VOID)
    assert typeof(None, ctx, e) == VOID


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(letcc_weight=0.6, throw_weight=0.6)
    with pytest.raises(ValueError):
        GenConfig(hole_weight=-0.1)
    with pytest.raises(ValueError):
        GenConfig(max_size=0)


@settings(max_examples=50)
@given(seeds, st.integers(1, 30))
def test_reproducible(seed, size):
    cfg = GenConfig(seed=seed, max_size=size, letcc_weight=0.1, throw_weight=0.1)
    assert gen_type(cfg) == gen_type(cfg)
    try:
        a = gen_term(cfg)
    except GiveUp:
        return
    assert a == gen_term(cfg)


@given(seeds, st.integers(1, 12))
def test_types_are_well_formed_and_bounded(seed, size):
    ty = gen_type(GenConfig(seed=seed, max_size=size))
    assert wf_type((), ty) and ty.size <= size


@given(seeds, st.integers(1, 40), st.sampled_from(range(len(SPECS))))
def test_terms_are_sound(seed, size, which):
    spec = SPECS[which]
    cfg = GenConfig(seed=seed, max_size=size, letcc_weight=0.1, throw_weight=0.1,
                    hole_weight=0.1)
    try:
        e = gen_term(cfg, spec=spec)
    except GiveUp:
        return
    assert typeof(spec, (), e) == UNIT
    assert not any(isinstance(s, S.ContVal) for s in subterms(e))


@given(seeds, st.sampled_from(range(len(SPECS))))
def test_patterns_without_holes_fill_to_themselves(seed, which):
    spec = SPECS[which]
    p, holes = gen_pattern(GenConfig(seed=seed, max_size=15), spec)
    assert holes == 0 and fill(p, spec, OMEGA) == p


@given(seeds, st.sampled_from(range(len(SPECS))))
def test_contexts_and_values_are_sound(seed, which):
    spec = SPECS[which]
    cfg = GenConfig(seed=seed, max_size=12, hole_weight=0.1)
    E = gen_ctx(cfg, spec.ret_ty, spec)
    assert typeof_ctx(spec, E, spec.ret_ty)
    v = gen_value(cfg, spec.arg_ty)
    assert typeof(None, (), v) == spec.arg_ty


def test_every_constructor_is_reachable():
    seen = Counter()
    for i in range(10_000):
        spec = SPECS[i % len(SPECS)]
        cfg = GenConfig(seed=i, max_size=12, letcc_weight=0.1, throw_weight=0.1,
                        hole_weight=0.1)
        seen.update(type(s).__name__ for s in subterms(gen_term(cfg, spec=spec)))
        if i % 4 == 0:
            E = gen_ctx(cfg.with_seed(i + 1), spec.hole_type, spec)
            seen.update(type(s).__name__ for s in subterms(E.shape))
    expected = {c.__name__ for c in S.Exp.__subclasses__()} - {"ContVal"}
    assert expected <= set(seen), expected - set(seen)
    assert "ContVal" not in seen
