"""Executable checks for the compactness proof chain.

Each check replays one lemma on concrete inputs and returns a
:class:`LemmaReport`.  A violated conclusion becomes a :class:`Violation`
carrying the inputs in surface syntax.  A termination hypothesis that cannot
be confirmed within the fuel is recorded as inconclusive, never as a failure.
Structural preconditions (the ``of`` relations a lemma assumes) raise
:class:`PreconditionError`, since a caller that breaks them has built the
case wrongly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dynamics import (
    FuelExhausted, IsValue, SelfLoop, Stepped, Stuck, StuckError, Terminated,
    derivations, is_pattern_value, is_value, run, step,
)
from .pattern import fill, of_check, pattern_step, unroll
from .statics import IllTyped, typeof
from .surface import show
from .syntax import (
    App, EMPTY, EvalContext, Exp, Finite, FunctionSpec, OMEGA, UNIT, is_closed,
    plug, subterms,
)


class PreconditionError(ValueError):
    pass


@dataclass
class Violation:
    inputs: str
    expected: str
    got: str


@dataclass
class LemmaReport:
    lemma_id: str
    cases_run: int = 0
    violations: list[Violation] = field(default_factory=list)
    inconclusive: list[str] = field(default_factory=list)
    # per-case measurements (step counts and the like) for reports and figures
    data: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, inputs: str, expected: str, got: str) -> None:
        self.violations.append(Violation(inputs, expected, got))

    def merge(self, other: LemmaReport) -> LemmaReport:
        return LemmaReport(
            self.lemma_id,
            self.cases_run + other.cases_run,
            self.violations + other.violations,
            self.inconclusive + other.inconclusive,
            self.data + other.data,
        )

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"{self.lemma_id}: {verdict} ({self.cases_run} cases, "
                f"{len(self.violations)} violations, "
                f"{len(self.inconclusive)} inconclusive)")


def render(spec: FunctionSpec | None = None, **parts) -> str:
    out = []
    if spec is not None:
        out.append(f"spec={show(spec.as_fun())}")
    for name, x in parts.items():
        if isinstance(x, EvalContext):
            x = x.shape
        out.append(f"{name}={show(x) if isinstance(x, Exp) else x}")
    return "; ".join(out)


def _describe(out) -> str:
    match out:
        case Stepped(nxt):
            return f"step to {show(nxt)}"
        case IsValue():
            return "value"
        case Stuck(reason):
            return f"stuck: {reason}"
        case Terminated(v, n):
            return f"value {show(v)} in {n} steps"
        case SelfLoop(k):
            return f"selfloop@{k}"
        case FuelExhausted():
            return "fuel-exhausted"
    return str(out)


# --- bottom and value lemmas -----------------------------------------------

def check_bottom(spec: FunctionSpec, v: Exp) -> bool:
    """``F_0 v`` steps to itself, which under determinism means divergence."""
    if not is_value(v) or not is_closed(v):
        raise PreconditionError("check_bottom needs a closed value")
    try:
        ty = typeof(spec, (), v)
    except IllTyped as exc:
        raise PreconditionError(f"argument is ill-typed: {exc}") from exc
    if ty != spec.arg_ty:
        raise PreconditionError("argument does not have the function's argument type")
    redex = App(unroll(spec, Finite(0)), v)
    return step(spec, EMPTY, redex) == Stepped(redex)


def check_value_transfer(spec: FunctionSpec, n: int, v: Exp, vp: Exp) -> bool:
    if not of_check(spec, n, v, vp):
        raise PreconditionError("term is not related to the pattern")
    return is_value(v) == is_pattern_value(vp)


def _mentions(e: Exp, sub: Exp) -> bool:
    return any(x == sub for x in subterms(e))


# --- the two squares of the bisimulation diagram ---------------------------

def _to_pattern(spec, E, e, P, p, n_after: int, report: LemmaReport, inputs):
    """Upper square: ``E; e`` steps, so ``P; p`` pattern-steps to a related program."""
    out = step(spec, E, e)
    if not isinstance(out, Stepped):
        return None
    pout = pattern_step(spec, P, p)
    if not isinstance(pout, Stepped):
        report.fail(inputs(), "pattern step", _describe(pout))
        return None
    if not of_check(spec, n_after, out.next, pout.next):
        report.fail(inputs(), f"of^{n_after} after step",
                    f"e'={show(out.next)}; p'={show(pout.next)}")
        return None
    return out.next, pout.next


def _to_term(spec, n: int, D, d, P, p, report: LemmaReport, inputs):
    """Lower square: ``P; p`` pattern-steps, so ``D; d`` steps to a related program."""
    pout = pattern_step(spec, P, p)
    if not isinstance(pout, Stepped):
        return None
    out = step(spec, D, d)
    if not isinstance(out, Stepped):
        report.fail(inputs(), "term step", _describe(out))
        return None
    if not of_check(spec, n, out.next, pout.next):
        report.fail(inputs(), f"of^{n} after step",
                    f"d'={show(out.next)}; p'={show(pout.next)}")
        return None
    return out.next, pout.next


def check_step_to_pattern(spec: FunctionSpec, E: EvalContext, e: Exp,
                          P: EvalContext, p: Exp, fuel: int,
                          known_terminating: bool = False) -> LemmaReport:
    report = LemmaReport("step-to-pattern")
    if not (of_check(spec, 0, E.shape, P.shape) and of_check(spec, 0, e, p)):
        raise PreconditionError("of^0 does not relate the term and the pattern")
    if not known_terminating:
        res = run(spec, plug(E, e), fuel)
        if not isinstance(res, Terminated):
            report.inconclusive.append(
                render(spec, E=E, e=e, reason=_describe(res)))
            # Evidence, not an assertion: is the termination hypothesis only
            # guarding F_0 redexes?  Try the square anyway and note whether
            # F_0 was involved.
            scratch = LemmaReport("step-to-pattern")
            _to_pattern(spec, E, e, P, p, 0, scratch, lambda: "")
            report.data.append({
                "skipped": True,
                "involves_f0": _mentions(plug(E, e), unroll(spec, Finite(0))),
                "square_holds": scratch.passed,
            })
            return report
    report.cases_run = 1
    _to_pattern(spec, E, e, P, p, 0, report,
                lambda: render(spec, E=E, e=e, P=P, p=p))
    return report


def check_pattern_to_term(spec: FunctionSpec, n: int, D: EvalContext, d: Exp,
                          P: EvalContext, p: Exp) -> LemmaReport:
    report = LemmaReport("pattern-to-term")
    if not (of_check(spec, n + 1, D.shape, P.shape) and of_check(spec, n + 1, d, p)):
        raise PreconditionError(f"of^{n + 1} does not relate the term and the pattern")
    if not isinstance(pattern_step(spec, P, p), Stepped):
        raise PreconditionError("the pattern does not step")
    report.cases_run = 1
    _to_term(spec, n, D, d, P, p, report,
             lambda: render(spec, n=n, D=D, d=d, P=P, p=p))
    return report


def check_diagram(spec: FunctionSpec, E: EvalContext, e: Exp, P: EvalContext,
                  p: Exp, D: EvalContext, d: Exp, fuel: int) -> LemmaReport:
    """Chain both squares along the whole terminating trace of ``E[e]``.

    ``D[d]`` must be related to ``P[p]`` at the trace length ``n``; step ``i``
    then checks ``of^0`` on the upper row and ``of^(n-i-1)`` on the lower.
    """
    report = LemmaReport("diagram")
    res = run(spec, plug(E, e), fuel)
    if not isinstance(res, Terminated):
        report.inconclusive.append(render(spec, E=E, e=e, reason=_describe(res)))
        return report
    n = res.steps
    if not (of_check(spec, 0, E.shape, P.shape) and of_check(spec, 0, e, p)):
        raise PreconditionError("of^0 does not relate the upper row")
    if not (of_check(spec, n, D.shape, P.shape) and of_check(spec, n, d, p)):
        raise PreconditionError(f"of^{n} does not relate the lower row")
    report.cases_run = 1

    def inputs():
        return render(spec, E=E0, e=e0, P=P0, p=p0, D=D0, d=d0)

    E0, e0, P0, p0, D0, d0 = E, e, P, p, D, d
    if is_value(e):
        # E[v] steps through E alone, so run the plugged programs instead
        e, p, d = plug(E, e), plug(P, p), plug(D, d)
        E = P = D = EMPTY
    for i in range(n):
        here = lambda: f"{inputs()}; step={i}"
        up = _to_pattern(spec, E, e, P, p, 0, report, here)
        if up is None:
            if report.passed:
                report.fail(here(), "term step", _describe(step(spec, E, e)))
            return report
        down = _to_term(spec, n - i - 1, D, d, P, p, report, here)
        if down is None:
            if report.passed:
                report.fail(here(), "pattern step", _describe(pattern_step(spec, P, p)))
            return report
        (e, p), (d, _) = up, down
        E = P = D = EMPTY
    if not (is_value(e) and is_pattern_value(p) and is_value(d)):
        report.fail(inputs(), f"values after {n} steps",
                    f"e={show(e)}; p={show(p)}; d={show(d)}")
    report.data.append({"steps": n})
    return report


# --- multi-step compactness ------------------------------------------------

def check_generalized_compactness(spec: FunctionSpec, e: Exp, p: Exp, d: Exp,
                                  fuel: int) -> LemmaReport:
    """If ``e`` stops in ``n`` steps, every ``d`` with ``of^n d p`` stops in ``n``."""
    report = LemmaReport("generalized-compactness")
    if not of_check(spec, 0, e, p):
        raise PreconditionError("of^0 does not relate e and p")
    res = run(spec, e, fuel)
    if not isinstance(res, Terminated):
        report.inconclusive.append(render(spec, e=e, reason=_describe(res)))
        return report
    n = res.steps
    if not of_check(spec, n, d, p):
        raise PreconditionError(f"of^{n} does not relate d and p")
    report.cases_run = 1

    def inputs():
        return render(spec, e=e, p=p, d=d, n=n)

    # term trace to pattern trace, of^0 at every step
    pt = p
    for i in range(n):
        ps = step(spec, EMPTY, pt, pattern=True)
        if not isinstance(ps, Stepped):
            report.fail(inputs(), f"pattern step {i}", _describe(ps))
            return report
        pt = ps.next
    if not of_check(spec, 0, res.value, pt) or not is_pattern_value(pt):
        report.fail(inputs(), "of^0 v p' with p' a pattern value",
                    f"v={show(res.value)}; p'={show(pt)}")
        return report

    # pattern trace back to the d trace, of^(n-i-1) after step i
    dt, pt = d, p
    for i in range(n):
        ds = step(spec, EMPTY, dt)
        pt = step(spec, EMPTY, pt, pattern=True).next
        if not isinstance(ds, Stepped):
            report.fail(inputs(), f"d steps at step {i}", _describe(ds))
            return report
        dt = ds.next
        if not of_check(spec, n - i - 1, dt, pt):
            report.fail(inputs(), f"of^{n - i - 1} at step {i + 1}",
                        f"d={show(dt)}; p={show(pt)}")
            return report
    if not is_value(dt):
        report.fail(inputs(), f"d terminates in exactly {n} steps",
                    f"not a value after {n} steps: {show(dt)}")
    report.data.append({"steps": n})
    return report


def check_compactness(spec: FunctionSpec, E: EvalContext, p: Exp, fuel: int,
                      extra_k: tuple[int, ...] = ()) -> LemmaReport:
    """Compactness for ``E[p]``, forward at depth ``n`` and backward at sampled depths.

    Forward: if the ``F_omega`` filling stops in ``n`` steps, the ``F_n`` filling
    stops in exactly ``n``.  Backward, for ``k`` in ``{0, 1, n, n+3}``: if the
    ``F_k`` filling stops in ``m`` steps, the ``F_omega`` filling stops in ``m``.
    """
    report = LemmaReport("compactness")
    program = plug(E, p)
    try:
        ty = typeof(spec, (), program)
    except IllTyped as exc:
        raise PreconditionError(f"E[p] is ill-typed: {exc}") from exc
    if ty != UNIT:
        raise PreconditionError("E[p] must have the answer type")
    report.cases_run = 1
    omega = run(spec, fill(program, spec, OMEGA), fuel)
    record: dict = {"omega": omega.steps if isinstance(omega, Terminated) else None}

    def inputs(k):
        return f"{render(spec, E=E, p=p)}; depth={k}"

    ks = [0, 1]
    if isinstance(omega, Terminated):
        n = omega.steps
        fin = run(spec, fill(program, spec, Finite(n)), fuel)
        record["finite"] = fin.steps if isinstance(fin, Terminated) else None
        if not (isinstance(fin, Terminated) and fin.steps == n):
            report.fail(inputs(n), f"value in {n} steps", _describe(fin))
        ks += [n, n + 3]
    else:
        report.inconclusive.append(f"{inputs('omega')}; {_describe(omega)}")
    ks += list(extra_k)
    backward = {}
    for k in sorted(set(ks)):
        fin = run(spec, fill(program, spec, Finite(k)), fuel)
        if isinstance(fin, Terminated):
            backward[k] = fin.steps
            if not (isinstance(omega, Terminated) and omega.steps == fin.steps):
                report.fail(inputs(k), f"omega filling stops in {fin.steps} steps",
                            _describe(omega))
    record["backward"] = backward
    report.data.append(record)
    return report


# --- safety and determinism ------------------------------------------------

def audit_safety_determinism(spec: FunctionSpec | None, e: Exp, fuel: int,
                             determinism: bool = True,
                             safety: bool = True) -> LemmaReport:
    """Walk the trace of ``e`` checking determinism, progress and preservation."""
    if e.has_pat:
        raise PreconditionError("audit runs on @-free programs")
    try:
        ty = typeof(spec, (), e)
    except IllTyped as exc:
        raise PreconditionError(f"program is ill-typed: {exc}") from exc
    if ty != UNIT:
        raise PreconditionError("program must have the answer type")
    report = LemmaReport("safety-determinism")
    report.cases_run = 1
    states = 0
    for i in range(fuel + 1):
        here = lambda: render(spec, program=e, state=i)
        found = list(derivations(spec, EMPTY, e))
        value = is_value(e)
        out = step(spec, EMPTY, e)
        if value:
            if determinism and found:
                report.fail(here(), "no rule applies to a value (determinism)",
                            ", ".join(r for r, _ in found))
            break
        states += 1
        if determinism:
            if len(found) != 1:
                report.fail(here(), "exactly one rule applies (determinism)",
                            f"{len(found)}: " + ", ".join(r for r, _ in found))
                break
            if not isinstance(out, Stepped) or out.next != found[0][1]:
                report.fail(here(), "step agrees with the rule scan (determinism)",
                            _describe(out))
                break
        if not isinstance(out, Stepped):
            if safety:
                report.fail(here(), "a value or a step (progress)", _describe(out))
            break
        if safety:
            try:
                nty = typeof(spec, (), out.next)
            except IllTyped as exc:
                nty = exc
            if nty != UNIT:
                report.fail(here(), "successor has the answer type (preservation)",
                            f"{nty!s} for {show(out.next)}")
                break
        if out.next == e or i == fuel:
            break
        e = out.next
    report.data.append({"states": states})
    return report
