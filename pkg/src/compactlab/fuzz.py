"""Seeded fuzz campaigns over the curated specs.

Case ``i`` of a campaign with seed ``s`` draws everything from
``case_seed(s, i)``, so any single case can be replayed on its own and the
records come out in case order whatever the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import specs
from .dynamics import Terminated, run
from .generator import GenConfig, GiveUp, Generator, gen_ctx, gen_pattern, gen_term, gen_value
from .harness import (
    LemmaReport, audit_safety_determinism, check_bottom, check_compactness,
    check_diagram, check_generalized_compactness, render,
)
from .pattern import fill
from .rng import Rng, case_seed
from .syntax import (
    EMPTY, HOLE, OMEGA, TRIV, UNIT, EvalContext, Exp, Finite, FunctionSpec, LetIn,
    plug,
)

MODES = ("determinism", "safety", "bottom", "bisim", "compactness", "generalized")

LEMMA_IDS = {
    "determinism": "determinism",
    "safety": "safety",
    "bottom": "bottom",
    "bisim": "diagram",
    "compactness": "compactness",
    "generalized": "generalized-compactness",
}


@dataclass
class CaseRecord:
    index: int
    seed: int
    spec_name: str
    inputs: str
    verdict: str  # pass | fail | inconclusive | skipped
    report: LemmaReport = field(repr=False)


def _spec_for(index: int, spec: tuple[str, FunctionSpec] | None):
    if spec is not None:
        return spec
    name = specs.CORPUS[index % len(specs.CORPUS)]
    return name, specs.load(name)


def _verdict(report: LemmaReport) -> str:
    if report.violations:
        return "fail"
    if report.inconclusive and not report.cases_run:
        return "inconclusive"
    return "pass"


def _audit_case(mode, spec, seed, fuel, size):
    rng = Rng(seed)
    # alternate plain and control-heavy programs
    heavy = rng.chance(0.5)
    cfg = GenConfig(seed=rng.u64(), max_size=size,
                    letcc_weight=0.15 if heavy else 0.05,
                    throw_weight=0.15 if heavy else 0.05)
    e = gen_term(cfg, spec=spec)
    rep = audit_safety_determinism(spec, e, fuel,
                                   determinism=mode == "determinism",
                                   safety=mode == "safety")
    rep.lemma_id = mode
    return render(program=e), rep


def _bottom_case(spec, seed, fuel, size):
    v = gen_value(GenConfig(seed=seed, max_size=max(size // 2, 2)), spec.arg_ty)
    rep = LemmaReport("bottom", cases_run=1)
    if not check_bottom(spec, v):
        rep.fail(render(spec, v=v), "app(F_0, v) steps to itself", "no self-loop")
    return render(v=v), rep


@dataclass
class Triple:
    """Upper, pattern and lower rows of the diagram, related by construction."""
    spec: FunctionSpec
    P: EvalContext
    p: Exp
    E: EvalContext
    e: Exp
    D: EvalContext
    d: Exp
    depth: int
    steps: int | None  # trace length of E[e], None if it did not terminate


def bisim_triple(spec: FunctionSpec, seed: int, fuel: int, size: int) -> Triple:
    """Draw ``P, p`` and fill them: ``F_omega`` above, ``F_k`` with ``k >= n`` below."""
    rng = Rng(seed)
    ty = rng.choice([UNIT, spec.ret_ty, spec.hole_type])
    cfg = GenConfig(seed=rng.u64(), max_size=size, hole_weight=0.15,
                    letcc_weight=0.08, throw_weight=0.08)
    if rng.chance(0.6):
        P = gen_ctx(cfg, ty, spec)
    else:
        ty, P = UNIT, EMPTY
    p = gen_term(cfg.with_seed(rng.u64()), goal=ty, spec=spec)
    E = EvalContext(fill(P.shape, spec, OMEGA))
    e = fill(p, spec, OMEGA)
    res = run(spec, plug(E, e), fuel)
    n = res.steps if isinstance(res, Terminated) else None
    # any depth at or above the trace length will do
    k = (n or 0) + rng.below(3)
    D = EvalContext(fill(P.shape, spec, Finite(k)))
    return Triple(spec, P, p, E, e, D, fill(p, spec, Finite(k)), k, n)


def _bisim_case(spec, seed, fuel, size):
    t = bisim_triple(spec, seed, fuel, size)
    inputs = render(P=t.P, p=t.p)
    if t.steps is None:
        rep = LemmaReport("diagram")
        rep.inconclusive.append(f"{inputs}; did not terminate within {fuel} steps")
        return inputs, rep
    return f"{inputs}; depth={t.depth}", check_diagram(
        spec, t.E, t.e, t.P, t.p, t.D, t.d, fuel)


def _pattern(spec, seed, size, control: float):
    cfg = GenConfig(seed=seed, max_size=size, hole_weight=0.2,
                    letcc_weight=control, throw_weight=control)
    for attempt in range(8):
        p, holes = gen_pattern(cfg.with_seed(case_seed(seed, attempt)), spec)
        if holes:
            return p
    raise GiveUp()


def _generalized_case(spec, seed, fuel, size):
    p = _pattern(spec, seed, size, 0.05)
    e = fill(p, spec, OMEGA)
    res = run(spec, e, fuel)
    if not isinstance(res, Terminated):
        rep = LemmaReport("generalized-compactness")
        rep.inconclusive.append(f"{render(p=p)}; {type(res).__name__}")
        return render(p=p), rep
    d = fill(p, spec, Finite(res.steps))
    return render(p=p), check_generalized_compactness(spec, e, p, d, fuel)


def _compactness_case(spec, seed, fuel, size):
    rng = Rng(seed)
    p = _pattern(spec, rng.u64(), size, 0.15)
    E = control_context(rng, size)
    return render(E=E, p=p), check_compactness(spec, E, p, fuel)


def control_context(rng: Rng, size: int) -> EvalContext:
    """A nonempty @-free context at the answer type, rich in letcc and throw."""
    budget = max(size // 2, 4)
    for _ in range(8):
        cfg = GenConfig(seed=rng.u64(), max_size=budget, letcc_weight=0.15,
                        throw_weight=0.15)
        E = Generator(cfg).ctx(UNIT, budget)
        if not E.is_empty:
            return E
    return EvalContext(LetIn(HOLE, TRIV))


_BUILDERS = {
    "bottom": _bottom_case,
    "bisim": _bisim_case,
    "compactness": _compactness_case,
    "generalized": _generalized_case,
}


def run_case(mode: str, seed: int, index: int, fuel: int, size: int,
             spec: tuple[str, FunctionSpec] | None = None) -> CaseRecord:
    name, fs = _spec_for(index, spec)
    cs = case_seed(seed, index)
    try:
        if mode in ("determinism", "safety"):
            inputs, rep = _audit_case(mode, fs, cs, fuel, size)
        else:
            inputs, rep = _BUILDERS[mode](fs, cs, fuel, size)
    except GiveUp:
        return CaseRecord(index, cs, name, "", "skipped", LemmaReport(LEMMA_IDS[mode]))
    return CaseRecord(index, cs, name, inputs, _verdict(rep), rep)


def campaign(mode: str, seed: int, count: int, fuel: int, size: int,
             spec: tuple[str, FunctionSpec] | None = None,
             workers: int = 1) -> list[CaseRecord]:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    job = lambda i: run_case(mode, seed, i, fuel, size, spec)
    if workers <= 1:
        return [job(i) for i in range(count)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(job, range(count)))


def summarize(mode: str, records: list[CaseRecord]) -> LemmaReport:
    total = LemmaReport(LEMMA_IDS[mode])
    for r in records:
        total = total.merge(r.report)
    return total
