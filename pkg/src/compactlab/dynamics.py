"""Call-by-value small-step dynamics as a three-part relation ``E; e |-> e'``.

:func:`step` searches for the redex by moving frames from the term onto the
context, then contracts.  One call is one contraction.  The same code serves
pattern stepping when ``pattern=True``: the pattern hole becomes a value and
applying it unfolds the function under study with ``@`` in place of ``f``.

:func:`derivations` is a second, rule-by-rule reading of the same relation
used by the determinism audit.  It tries every rule independently and
reports every derivation it finds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .syntax import (
    Abort, App, ContVal, CtxHole, EMPTY, EvalContext, Exp, Fun, FunctionSpec,
    LetCC, LetIn, Open, Pack, Pair, PatHole, ProjL, ProjR, TApp, TLam, Throw,
    Triv, HOLE, PAT, plug, plug_shape, subst, subst2,
)


# --- values ----------------------------------------------------------------

def is_value(e: Exp) -> bool:
    match e:
        case Fun() | Triv() | TLam() | ContVal():
            return True
        case Pair(l, r):
            return is_value(l) and is_value(r)
        case Pack(_, payload, _):
            return is_value(payload)
    return False


def is_pattern_value(p: Exp) -> bool:
    """``val`` extended with the pattern hole."""
    match p:
        case PatHole() | Fun() | Triv() | TLam() | ContVal():
            return True
        case Pair(l, r):
            return is_pattern_value(l) and is_pattern_value(r)
        case Pack(_, payload, _):
            return is_pattern_value(payload)
    return False


def is_eval_shape(shape: Exp, pattern: bool = False) -> bool:
    """The context hole of ``shape`` sits in an evaluation position."""
    val = is_pattern_value if pattern else is_value
    match shape:
        case CtxHole():
            return True
        case App(f, a) | Pair(f, a) | Throw(f, a):
            if f.nholes:
                return is_eval_shape(f, pattern)
            return val(f) and is_eval_shape(a, pattern)
        case LetIn(b, _) | Open(b, _) | ProjL(b) | ProjR(b) | TApp(b, _):
            return bool(b.nholes) and is_eval_shape(b, pattern)
        case Abort(_, b) | Pack(_, b, _):
            return bool(b.nholes) and is_eval_shape(b, pattern)
    return False


# --- outcomes --------------------------------------------------------------

@dataclass(frozen=True)
class Stepped:
    next: Exp


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepOutcome = Stepped | IsValue | Stuck
IS_VALUE = IsValue()


@dataclass(frozen=True)
class Terminated:
    value: Exp
    steps: int


@dataclass(frozen=True)
class SelfLoop:
    at_step: int


@dataclass(frozen=True)
class FuelExhausted:
    last: Exp
    fuel: int


RunResult = Terminated | SelfLoop | FuelExhausted


class StuckError(RuntimeError):
    """A non-value program with no applicable rule (a progress failure)."""

    def __init__(self, program: Exp, reason: str, at_step: int):
        super().__init__(f"stuck at step {at_step}: {reason}")
        self.program = program
        self.reason = reason
        self.at_step = at_step


# --- one step --------------------------------------------------------------

def step(spec: FunctionSpec | None, E: EvalContext, e: Exp,
         pattern: bool = False) -> StepOutcome:
    """Take one step of ``E; e``; the result is the whole next program."""
    val = is_pattern_value if pattern else is_value
    if val(e):
        return IS_VALUE
    frames: list[Exp] = []

    def rebuild(contractum: Exp) -> Exp:
        for fr in reversed(frames):
            contractum = plug_shape(fr, contractum)
        return plug(E, contractum)

    def current_ctx() -> Exp:
        shape: Exp = HOLE
        for fr in reversed(frames):
            shape = plug_shape(fr, shape)
        return plug(E, shape)

    while True:
        match e:
            case App(f, a):
                if not val(f):
                    frames.append(App(HOLE, a))
                    e = f
                    continue
                if not val(a):
                    frames.append(App(f, HOLE))
                    e = a
                    continue
                if isinstance(f, Fun):
                    return Stepped(rebuild(subst2(f.body, f, a)))
                if pattern and isinstance(f, PatHole):
                    if spec is None:
                        return Stuck("@ applied without a function spec")
                    return Stepped(rebuild(subst2(spec.body, PAT, a)))
                return Stuck("applying a non-function value")
            case LetIn(b, body):
                if not val(b):
                    frames.append(LetIn(HOLE, body))
                    e = b
                    continue
                return Stepped(rebuild(subst(body, 0, b)))
            case Abort(ty, arg):
                if not val(arg):
                    frames.append(Abort(ty, HOLE))
                    e = arg
                    continue
                return Stuck("abort of a value")
            case Pair(l, r):
                if not val(l):
                    frames.append(Pair(HOLE, r))
                    e = l
                else:
                    frames.append(Pair(l, HOLE))
                    e = r
                continue
            case ProjL(arg) | ProjR(arg):
                if not val(arg):
                    frames.append(type(e)(HOLE))
                    e = arg
                    continue
                if isinstance(arg, Pair):
                    return Stepped(rebuild(arg.l if isinstance(e, ProjL) else arg.r))
                return Stuck("projection from a non-pair")
            case TApp(f, ty):
                if not val(f):
                    frames.append(TApp(HOLE, ty))
                    e = f
                    continue
                if isinstance(f, TLam):
                    return Stepped(rebuild(subst(f.body, 0, ty)))
                return Stuck("type application of a non-type-abstraction")
            case Pack(w, payload, as_ty):
                frames.append(Pack(w, HOLE, as_ty))
                e = payload
                continue
            case Open(scrut, body):
                if not val(scrut):
                    frames.append(Open(HOLE, body))
                    e = scrut
                    continue
                if isinstance(scrut, Pack):
                    return Stepped(rebuild(subst2(body, scrut.witness, scrut.payload)))
                return Stuck("opening a non-package")
            case LetCC(ty, body):
                k = ContVal(ty, current_ctx())
                return Stepped(rebuild(subst(body, 0, k)))
            case Throw(v, k):
                if not val(v):
                    frames.append(Throw(HOLE, k))
                    e = v
                    continue
                if not val(k):
                    frames.append(Throw(v, HOLE))
                    e = k
                    continue
                if isinstance(k, ContVal):
                    return Stepped(plug_shape(k.ctx, v))
                return Stuck("throw to a non-continuation")
        return Stuck(f"no rule for {type(e).__name__}")


def pattern_step(spec: FunctionSpec, P: EvalContext, p: Exp) -> StepOutcome:
    return step(spec, P, p, pattern=True)


# --- exhaustive rule scan --------------------------------------------------

def derivations(spec: FunctionSpec | None, E: EvalContext, e: Exp,
                pattern: bool = False) -> Iterator[tuple[str, Exp]]:
    """Yield ``(rule, result)`` for every derivation of ``E; e |-> result``.

    Each rule is tried on its own premises; nothing here assumes that at most
    one rule applies.
    """
    return _derive(spec, E, (), e, pattern)


def _derive(spec, E: EvalContext, frames: tuple, e: Exp, pattern: bool):
    # frames run outermost first; they are only plugged when a rule fires
    val = is_pattern_value if pattern else is_value

    def here(x: Exp) -> Exp:
        for fr in reversed(frames):
            x = plug_shape(fr, x)
        return plug(E, x)

    def sub(frame: Exp, inner: Exp, name: str):
        for rule, res in _derive(spec, E, frames + (frame,), inner, pattern):
            yield f"{name}/{rule}", res

    if isinstance(e, App):
        f, a = e.fn, e.arg
        yield from sub(App(HOLE, a), f, "app-left")
        if val(f):
            yield from sub(App(f, HOLE), a, "app-right")
        if isinstance(f, Fun) and val(a):
            yield "app-fun", here(subst2(f.body, f, a))
        if pattern and isinstance(f, PatHole) and val(a) and spec is not None:
            yield "app-pat", here(subst2(spec.body, PAT, a))
    if isinstance(e, LetIn):
        yield from sub(LetIn(HOLE, e.body), e.bound, "let-step")
        if val(e.bound):
            yield "let-val", here(subst(e.body, 0, e.bound))
    if isinstance(e, Abort):
        yield from sub(Abort(e.ty, HOLE), e.arg, "abort-step")
    if isinstance(e, Pair):
        yield from sub(Pair(HOLE, e.r), e.l, "pair-left")
        if val(e.l):
            yield from sub(Pair(e.l, HOLE), e.r, "pair-right")
    if isinstance(e, (ProjL, ProjR)):
        name = "fst" if isinstance(e, ProjL) else "snd"
        yield from sub(type(e)(HOLE), e.arg, f"{name}-step")
        if isinstance(e.arg, Pair) and val(e.arg):
            yield f"{name}-pair", here(e.arg.l if name == "fst" else e.arg.r)
    if isinstance(e, TApp):
        yield from sub(TApp(HOLE, e.ty), e.fn, "tapp-step")
        if isinstance(e.fn, TLam):
            yield "tapp-tlam", here(subst(e.fn.body, 0, e.ty))
    if isinstance(e, Pack):
        yield from sub(Pack(e.witness, HOLE, e.as_ty), e.payload, "pack-step")
    if isinstance(e, Open):
        yield from sub(Open(HOLE, e.body), e.scrut, "open-step")
        if isinstance(e.scrut, Pack) and val(e.scrut):
            yield "open-pack", here(subst2(e.body, e.scrut.witness, e.scrut.payload))
    if isinstance(e, LetCC):
        yield "letcc", here(subst(e.body, 0, ContVal(e.ty, here(HOLE))))
    if isinstance(e, Throw):
        yield from sub(Throw(HOLE, e.cont), e.val, "throw-left")
        if val(e.val):
            yield from sub(Throw(e.val, HOLE), e.cont, "throw-right")
        if val(e.val) and isinstance(e.cont, ContVal):
            yield "throw-cont", plug(EvalContext(e.cont.ctx), e.val)


# --- multi-step ------------------------------------------------------------

def run(spec: FunctionSpec | None, e: Exp, fuel: int,
        pattern: bool = False) -> RunResult:
    """Iterate :func:`step` from the empty context for at most ``fuel`` steps.

    Raises :class:`StuckError` if a non-value program cannot step.
    """
    for n in range(fuel + 1):
        out = step(spec, EMPTY, e, pattern)
        if isinstance(out, IsValue):
            return Terminated(e, n)
        if isinstance(out, Stuck):
            raise StuckError(e, out.reason, n)
        if out.next == e:
            return SelfLoop(n)
        if n == fuel:
            break
        e = out.next
    return FuelExhausted(e, fuel)


def trace(spec: FunctionSpec | None, e: Exp, fuel: int,
          pattern: bool = False) -> list[Exp]:
    """The programs visited by :func:`run`, starting with ``e``."""
    out = [e]
    for _ in range(fuel):
        res = step(spec, EMPTY, e, pattern)
        if not isinstance(res, Stepped):
            break
        e = res.next
        out.append(e)
    return out
