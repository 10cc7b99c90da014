"""Type formation, term typing and evaluation-context typing.

A typing context is a tuple whose entry ``i`` classifies De Bruijn index
``i``.  A :class:`TermVar` entry stores its type relative to the entries
after it, so looking up index ``i`` shifts the stored type by ``i + 1``.

The rules for unit, abort, pairs, let, and the quantifiers are the standard
ones; functions, application, the pattern hole and the continuation forms
follow the language definition directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .surface import show
from .syntax import (
    Abort, App, Arrow, ContTy, ContVal, CtxHole, EvalContext, Exists, Exp,
    Forall, Fun, FunctionSpec, LetCC, LetIn, Open, Pack, Pair, PatHole, Prod,
    ProjL, ProjR, TApp, TLam, Throw, Triv, Unit1, Var, Void0, UNIT, VOID,
    is_closed, occurs_free, shift, subst,
)


@dataclass(frozen=True)
class TermVar:
    ty: Exp


@dataclass(frozen=True)
class TypeVar:
    pass


TYPE_VAR = TypeVar()
Context = tuple  # tuple[TermVar | TypeVar, ...], innermost first


class IllTyped(Exception):
    """Rejection by the typing judgment; records the rule and the subterm."""

    def __init__(self, rule: str, subterm: Exp, message: str):
        super().__init__(f"[{rule}] {message}")
        self.rule = rule
        self.subterm = subterm
        self.message = message


def extend(ctx: Context, *entries) -> Context:
    """Push entries; the last argument becomes index 0."""
    return tuple(reversed(entries)) + tuple(ctx)


def wf_type(ctx: Context, ty: Exp) -> bool:
    match ty:
        case Void0() | Unit1():
            return True
        case Var(i):
            return i < len(ctx) and isinstance(ctx[i], TypeVar)
        case Arrow(a, b) | Prod(a, b):
            return wf_type(ctx, a) and wf_type(ctx, b)
        case Forall(b) | Exists(b):
            return wf_type(extend(ctx, TYPE_VAR), b)
        case ContTy(a):
            return wf_type(ctx, a)
    return False


def _need_type(ctx: Context, ty: Exp, rule: str) -> None:
    if not wf_type(ctx, ty):
        raise IllTyped(rule, ty, "ill-formed type annotation")


def _expect(got: Exp, want: Exp, rule: str, where: Exp) -> None:
    if got != want:
        raise IllTyped(rule, where, f"expected {show(want)}, got {show(got)}")


def typeof(spec: FunctionSpec | None, ctx: Context, e: Exp,
           hole_ty: Exp | None = None) -> Exp:
    """Return the unique type of ``e`` or raise :class:`IllTyped`.

    ``spec`` fixes the type of the pattern hole; ``hole_ty`` types a context
    hole (used by :func:`typeof_ctx`).
    """
    match e:
        case Var(i):
            if i >= len(ctx) or not isinstance(ctx[i], TermVar):
                raise IllTyped("var", e, f"index {i} is not a term variable")
            return shift(ctx[i].ty, 0, i + 1)
        case Triv():
            return UNIT
        case PatHole():
            if spec is None:
                raise IllTyped("pat", e, "@ needs a function spec")
            return spec.hole_type
        case CtxHole():
            if hole_ty is None:
                raise IllTyped("hole", e, "context hole outside a context")
            return hole_ty
        case Fun(a, b, body):
            _need_type(ctx, a, "fun")
            _need_type(ctx, b, "fun")
            inner = extend(ctx, TermVar(Arrow(a, b)), TermVar(shift(a, 0, 1)))
            got = typeof(spec, inner, body, hole_ty)
            _expect(got, shift(b, 0, 2), "fun", e)
            return Arrow(a, b)
        case App(f, a):
            tf = typeof(spec, ctx, f, hole_ty)
            if not isinstance(tf, Arrow):
                raise IllTyped("app", e, "applying a non-function")
            _expect(typeof(spec, ctx, a, hole_ty), tf.dom, "app", e)
            return tf.cod
        case LetIn(bound, body):
            t1 = typeof(spec, ctx, bound, hole_ty)
            t2 = typeof(spec, extend(ctx, TermVar(t1)), body, hole_ty)
            return shift(t2, 0, -1)
        case Abort(ty, arg):
            _need_type(ctx, ty, "abort")
            _expect(typeof(spec, ctx, arg, hole_ty), VOID, "abort", e)
            return ty
        case Pair(l, r):
            return Prod(typeof(spec, ctx, l, hole_ty), typeof(spec, ctx, r, hole_ty))
        case ProjL(arg) | ProjR(arg):
            t = typeof(spec, ctx, arg, hole_ty)
            if not isinstance(t, Prod):
                raise IllTyped("proj", e, "projecting from a non-pair")
            return t.l if isinstance(e, ProjL) else t.r
        case TLam(body):
            return Forall(typeof(spec, extend(ctx, TYPE_VAR), body, hole_ty))
        case TApp(f, ty):
            _need_type(ctx, ty, "tapp")
            tf = typeof(spec, ctx, f, hole_ty)
            if not isinstance(tf, Forall):
                raise IllTyped("tapp", e, "instantiating a non-polymorphic term")
            return subst(tf.body, 0, ty)
        case Pack(w, payload, as_ty):
            _need_type(ctx, w, "pack")
            _need_type(ctx, as_ty, "pack")
            if not isinstance(as_ty, Exists):
                raise IllTyped("pack", e, "pack annotation must be existential")
            _expect(typeof(spec, ctx, payload, hole_ty),
                    subst(as_ty.body, 0, w), "pack", e)
            return as_ty
        case Open(scrut, body):
            ts = typeof(spec, ctx, scrut, hole_ty)
            if not isinstance(ts, Exists):
                raise IllTyped("open", e, "opening a non-package")
            inner = extend(ctx, TYPE_VAR, TermVar(ts.body))
            t = typeof(spec, inner, body, hole_ty)
            if occurs_free(t, 0) or occurs_free(t, 1):
                raise IllTyped("open", e, "abstract type escapes its scope")
            return shift(t, 0, -2)
        case LetCC(ty, body):
            _need_type(ctx, ty, "letcc")
            got = typeof(spec, extend(ctx, TermVar(ContTy(ty))), body, hole_ty)
            _expect(got, shift(ty, 0, 1), "letcc", e)
            return ty
        case Throw(v, k):
            tv = typeof(spec, ctx, v, hole_ty)
            _expect(typeof(spec, ctx, k, hole_ty), ContTy(tv), "throw", e)
            return VOID
        case ContVal(ty, shape):
            if not (is_closed(ty) and is_closed(shape)):
                raise IllTyped("cont", e, "captured continuation must be closed")
            if not wf_type((), ty):
                raise IllTyped("cont", e, "ill-formed continuation type")
            try:
                ok = typeof_ctx(spec, EvalContext(shape), ty)
            except ValueError as exc:
                raise IllTyped("cont", e, str(exc)) from exc
            if not ok:
                raise IllTyped("cont", e, "context does not return the answer type")
            return ContTy(ty)
    raise IllTyped("form", e, f"{type(e).__name__} is not a term")


def typeof_ctx(spec: FunctionSpec | None, E: EvalContext, hole_ty: Exp) -> bool:
    """``E`` takes a closed term of ``hole_ty`` to a closed term of unit type."""
    from .dynamics import is_eval_shape

    if not is_closed(hole_ty) or not is_closed(E.shape):
        return False
    if not is_eval_shape(E.shape, pattern=E.shape.has_pat):
        return False
    try:
        return typeof(spec, (), E.shape, hole_ty) == UNIT
    except IllTyped:
        return False


def check(spec: FunctionSpec | None, e: Exp, ty: Exp = UNIT) -> bool:
    try:
        return typeof(spec, (), e) == ty
    except IllTyped:
        return False
