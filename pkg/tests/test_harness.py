import pytest
from hypothesis import given, settings

from compactlab import harness, specs
from compactlab.dynamics import Stepped, run
from compactlab.fuzz import run_case
from compactlab.harness import (
    LemmaReport, PreconditionError, audit_safety_determinism, check_bottom,
    check_compactness, check_diagram, check_generalized_compactness,
    check_pattern_to_term, check_step_to_pattern, check_value_transfer,
)
from compactlab.pattern import fill, unroll
from compactlab.surface import parse
from compactlab.syntax import (
    Abort, App, Arrow, EMPTY, EvalContext, Finite, Fun, FunctionSpec, HOLE,
    LetCC, LetIn, OMEGA, PAT, Throw, TRIV, UNIT, VOID, Var,
)

from strategies import seeds

ID = Fun(UNIT, UNIT, Var(0))
SELF_APP = FunctionSpec(UNIT, UNIT, App(Var(1), Var(0)))
GROWING = FunctionSpec(UNIT, UNIT, App(ID, App(Var(1), Var(0))))
# argument type void: the call can only be reached by escaping first
VOID_ARG = FunctionSpec(VOID, UNIT, Abort(UNIT, Var(0)))


def test_bottom_examples(identity):
    assert check_bottom(identity, TRIV)
    takes_fn = FunctionSpec(Arrow(UNIT, UNIT), UNIT, App(Var(0), TRIV))
    assert check_bottom(takes_fn, ID)
    with pytest.raises(PreconditionError):
        check_bottom(identity, App(ID, TRIV))
    with pytest.raises(PreconditionError):
        check_bottom(takes_fn, TRIV)


def test_value_transfer_examples(identity):
    fw = identity.as_fun()
    assert check_value_transfer(identity, 0, fw, PAT)
    assert check_value_transfer(identity, 0, TRIV, TRIV)
    assert check_value_transfer(identity, 0, App(fw, TRIV), App(PAT, TRIV))
    with pytest.raises(PreconditionError):
        check_value_transfer(identity, 0, TRIV, PAT)


def test_step_to_pattern_examples(identity):
    fw = identity.as_fun()
    rep = check_step_to_pattern(identity, EMPTY, App(fw, TRIV), EMPTY, App(PAT, TRIV), 10)
    assert rep.passed and rep.cases_run == 1
    rep = check_step_to_pattern(identity, EMPTY, App(ID, TRIV), EMPTY, App(ID, TRIV), 10)
    assert rep.passed and rep.cases_run == 1


def test_step_to_pattern_skips_divergent_terms(identity):
    f0 = unroll(identity, Finite(0))
    rep = check_step_to_pattern(identity, EMPTY, App(f0, TRIV), EMPTY, App(PAT, TRIV), 50)
    assert rep.passed and rep.cases_run == 0
    assert "selfloop@0" in rep.inconclusive[0]
    # the square fails at exactly the F_0 redex the hypothesis excludes
    assert rep.data == [{"skipped": True, "involves_f0": True, "square_holds": False}]


def test_pattern_to_term_examples():
    f3 = unroll(GROWING, Finite(3))
    rep = check_pattern_to_term(GROWING, 2, EMPTY, App(f3, TRIV), EMPTY, App(PAT, TRIV))
    assert rep.passed and rep.cases_run == 1
    fw = GROWING.as_fun()
    for n in range(5):
        assert check_pattern_to_term(GROWING, n, EMPTY, App(fw, TRIV), EMPTY, App(PAT, TRIV)).passed
    plain = App(ID, TRIV)
    assert check_pattern_to_term(GROWING, 4, EMPTY, plain, EMPTY, plain).passed
    # F_2 is not deep enough for of^3
    with pytest.raises(PreconditionError):
        check_pattern_to_term(GROWING, 2, EMPTY, App(unroll(GROWING, 2), TRIV),
                              EMPTY, App(PAT, TRIV))


def test_generalized_compactness_examples(identity):
    p = App(PAT, TRIV)
    e, d = fill(p, identity, OMEGA), fill(p, identity, Finite(1))
    rep = check_generalized_compactness(identity, e, p, d, 10)
    assert rep.passed and rep.data == [{"steps": 1}]
    plain = LetIn(App(ID, TRIV), Var(0))
    rep = check_generalized_compactness(identity, plain, plain, plain, 10)
    assert rep.passed and rep.data == [{"steps": 2}]
    e = fill(p, SELF_APP, OMEGA)
    rep = check_generalized_compactness(SELF_APP, e, p, fill(p, SELF_APP, Finite(3)), 30)
    assert rep.cases_run == 0 and rep.inconclusive


def test_compactness_examples(identity):
    rep = check_compactness(identity, EMPTY, App(PAT, TRIV), 10)
    assert rep.passed
    assert rep.data[0]["omega"] == 1 and rep.data[0]["finite"] == 1
    # k in {0, 1, n, n+3} = {0, 1, 4}; F_0 diverges, the others take one step
    assert rep.data[0]["backward"] == {1: 1, 4: 1}
    rep = check_compactness(identity, EvalContext(LetIn(HOLE, TRIV)), App(ID, TRIV), 10)
    assert rep.passed and rep.data[0]["omega"] == 2


def test_compactness_with_an_escape():
    # letcc k. @ (throw () k): the throw fires before the call
    p = LetCC(UNIT, App(PAT, Throw(TRIV, Var(0))))
    rep = check_compactness(VOID_ARG, EMPTY, p, 20)
    assert rep.passed
    assert rep.data[0]["omega"] == 2 and rep.data[0]["finite"] == 2
    assert rep.data[0]["backward"] == {0: 2, 1: 2, 2: 2, 5: 2}


def test_compactness_rejects_wrong_answer_types(identity):
    with pytest.raises(PreconditionError):
        check_compactness(identity, EMPTY, PAT, 10)
    with pytest.raises(PreconditionError):
        check_compactness(identity, EMPTY, App(TRIV, TRIV), 10)


def test_audit_examples(identity):
    rep = audit_safety_determinism(identity, TRIV, 10)
    assert rep.passed and rep.data == [{"states": 0}]
    rep = audit_safety_determinism(identity, App(ID, TRIV), 10)
    assert rep.passed and rep.data == [{"states": 1}]
    with pytest.raises(PreconditionError):
        audit_safety_determinism(identity, App(TRIV, TRIV), 10)
    with pytest.raises(PreconditionError):
        audit_safety_determinism(identity, App(PAT, TRIV), 10)


# --- the harness notices broken semantics --------------------------------------

def test_sabotaged_filling_is_caught(identity, monkeypatch):
    real = harness.fill

    def shallow(p, spec, depth):
        if isinstance(depth, Finite) and depth.n > 0:
            depth = Finite(depth.n - 1)
        return real(p, spec, depth)

    monkeypatch.setattr(harness, "fill", shallow)
    rep = check_compactness(identity, EMPTY, App(PAT, TRIV), 10)
    assert not rep.passed
    v = rep.violations[0]
    assert v.expected == "value in 1 steps" and v.got == "selfloop@0"
    # inputs are replayable surface syntax
    fields = dict(part.split("=", 1) for part in v.inputs.split("; "))
    assert parse(fields["p"]) == App(PAT, TRIV)
    assert parse(fields["spec"]) == identity.as_fun()


def test_sabotaged_step_is_caught(identity, monkeypatch):
    real = harness.step

    def extra_beta(spec, E, e, pattern=False):
        out = real(spec, E, e, pattern)
        # a bogus second rule: beta also reduces to the function itself
        if isinstance(e, App) and isinstance(e.fn, Fun) and e.arg == TRIV:
            return Stepped(e.fn)
        return out

    monkeypatch.setattr(harness, "step", extra_beta)
    rep = audit_safety_determinism(identity, App(ID, TRIV), 10)
    assert not rep.passed
    assert "determinism" in rep.violations[0].expected


def test_report_merge_and_summary():
    a = LemmaReport("x", 2)
    b = LemmaReport("x", 3, inconclusive=["i"])
    b.fail("in", "exp", "got")
    m = a.merge(b)
    assert m.cases_run == 5 and not m.passed and m.inconclusive == ["i"]
    assert m.summary() == "x: FAIL (5 cases, 1 violations, 1 inconclusive)"


# --- diagram coherence -----------------------------------------------------

@settings(max_examples=60)
@given(seeds)
def test_diagram_agrees_with_generalized_compactness(seed):
    rec = run_case("bisim", seed, 0, 200, 18)
    if rec.verdict != "pass":
        assert rec.verdict in ("inconclusive", "skipped")
        return
    spec = specs.load(rec.spec_name)
    fields = dict(part.split("=", 1) for part in rec.inputs.split("; "))
    program = harness.plug(EvalContext(parse(fields["P"])), parse(fields["p"]))
    e = fill(program, spec, OMEGA)
    d = fill(program, spec, Finite(int(fields["depth"])))
    # the same case chained step by step and checked whole
    gc = check_generalized_compactness(spec, e, program, d, 200)
    diagram = check_diagram(spec, EMPTY, e, EMPTY, program, EMPTY, d, 200)
    assert gc.passed and diagram.passed
    assert gc.data == diagram.data == rec.report.data
