"""Seeded, type-directed generation of types, terms, patterns and contexts.

Generation runs backwards from a goal type: pick a rule whose conclusion
matches the goal, generate its premises, and backtrack to the next rule when
a premise cannot be met within the size budget.  Every returned term has
been built to typecheck at its goal, and ``size(result) <= max_size``.

The void type is only ever produced by ``throw`` to a continuation variable
already in scope, so asking for ``void`` in an empty context gives up.
Captured continuations are never written into generated terms; they only
arise from ``letcc`` at run time.  (:func:`gen_value` does build them, as the
only closed values of continuation type.)
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import Rng
from .statics import TYPE_VAR, Context, TermVar, TypeVar, extend
from .syntax import (
    Abort, App, Arrow, ContTy, ContVal, EvalContext, Exists, Exp, Forall,
    Fun, FunctionSpec, LetCC, LetIn, Open, Pack, Pair, PatHole, Prod, ProjL,
    ProjR, TApp, TLam, Throw, Unit1, Var, Void0, HOLE, PAT, TRIV, UNIT, VOID,
    shift, subst,
)


class GiveUp(Exception):
    """No term of the goal type fits the budget; not an error."""


class _OutOfWork(GiveUp):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_size: int = 20
    letcc_weight: float = 0.05
    throw_weight: float = 0.05
    hole_weight: float = 0.0
    goal: Exp = UNIT
    # share of the core weight given to calls of the enclosing function itself
    recursion_weight: float = 0.02

    def __post_init__(self) -> None:
        ws = (self.letcc_weight, self.throw_weight, self.hole_weight)
        if any(not 0.0 <= w <= 1.0 for w in ws) or sum(ws) > 1.0:
            raise ValueError("weights must lie in [0, 1] and sum to at most 1")
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")

    def with_seed(self, seed: int) -> GenConfig:
        return GenConfig(seed, self.max_size, self.letcc_weight, self.throw_weight,
                         self.hole_weight, self.goal, self.recursion_weight)


@dataclass(frozen=True)
class _Rec(TermVar):
    """A term variable bound as the self-reference of a ``fun``."""


class Generator:
    def __init__(self, cfg: GenConfig, spec: FunctionSpec | None = None,
                 rng: Rng | None = None):
        self.cfg = cfg
        self.spec = spec
        self.rng = rng or Rng(cfg.seed)
        self.patterns = spec is not None and cfg.hole_weight > 0
        self.work = 0
        # continuations normally arise only from letcc at run time
        self.allow_contval = False

    # --- types -------------------------------------------------------------

    def type_(self, ctx: Context, size: int) -> Exp:
        rng = self.rng
        tvars = [i for i, ent in enumerate(ctx) if isinstance(ent, TypeVar)]
        if size <= 1 or (size <= 2 and rng.chance(0.5)):
            if tvars and rng.chance(0.3):
                return Var(rng.choice(tvars))
            return UNIT
        pick = rng.below(8)
        if pick <= 1 or size < 3:
            return UNIT if not tvars or rng.chance(0.6) else Var(rng.choice(tvars))
        if pick == 7 and size >= 2:
            return ContTy(self.type_(ctx, size - 1))
        if pick in (5, 6):
            inner = extend(ctx, TYPE_VAR)
            body = self.type_(inner, size - 1)
            return Forall(body) if pick == 5 else Exists(body)
        left = rng.between(1, size - 2)
        a = VOID if rng.chance(0.1) else self.type_(ctx, left)
        b = self.type_(ctx, size - 1 - a.size)
        return Arrow(a, b) if pick in (2, 3) else Prod(a, b)

    def aux_type(self, ctx: Context) -> Exp:
        """A small auxiliary type for intermediate results."""
        rng = self.rng
        if self.spec is not None and rng.chance(0.25):
            return rng.choice((self.spec.arg_ty, self.spec.ret_ty))
        if rng.chance(0.5):
            return UNIT
        return self.type_(ctx, rng.between(1, 4))

    # --- terms -------------------------------------------------------------

    def term(self, ctx: Context, goal: Exp, size: int) -> Exp:
        self.work += 1
        if size < 1:
            raise GiveUp()
        rules = self._rules(ctx, goal, size)
        if self.work > 60 * self.cfg.max_size + 200:
            # Out of search effort: only rules that shrink the goal remain.
            rules = [r for r in rules if r[2]]
            if self.work > 400 * self.cfg.max_size + 2000:
                raise _OutOfWork()
        for i in self.rng.weighted_order([r[0] for r in rules]):
            try:
                return rules[i][1]()
            except _OutOfWork:
                raise
            except GiveUp:
                continue
        raise GiveUp()

    def _rules(self, ctx: Context, goal: Exp, size: int) -> list:
        """Candidate rules as ``(weight, build, cheap)``.

        Leaves lose weight and eliminations gain it as the budget grows, so
        terms use most of their budget.  ``cheap`` rules shrink the goal type
        and are all that remain once the search effort runs out.
        """
        cfg = self.cfg
        special: list = []
        core: list = []
        leaf = 1.0 if size <= 3 else 3.0 / size
        elim = min(1.0, size / 6)

        conts = [(i, shift(ent.ty, 0, i + 1)) for i, ent in enumerate(ctx)
                 if isinstance(ent, TermVar) and isinstance(ent.ty, ContTy)]
        conts = [(i, t.arg) for i, t in conts]
        if conts and size >= 3:
            special.append((cfg.throw_weight or 0.01,
                            lambda: self._throw(ctx, goal, size, conts), True))
        if isinstance(goal, Void0):
            return special

        for i, ent in enumerate(ctx):
            if isinstance(ent, TermVar) and shift(ent.ty, 0, i + 1) == goal:
                w = cfg.recursion_weight if isinstance(ent, _Rec) else 3.0 * leaf
                core.append((w, lambda i=i: Var(i), True))
        for i, ent in enumerate(ctx):
            if not isinstance(ent, TermVar):
                continue
            t = shift(ent.ty, 0, i + 1)
            if isinstance(t, Arrow) and t.cod == goal and size >= 3:
                w = cfg.recursion_weight if isinstance(ent, _Rec) else 1.0
                core.append((w, lambda i=i, t=t: self._call(ctx, Var(i), t.dom, size), False))

        if isinstance(goal, Unit1):
            core.append((3.0 * leaf, lambda: TRIV, True))
        if isinstance(goal, Arrow) and size >= 2 + goal.size:
            core.append((3.0, lambda: self._fun(ctx, goal, size), True))
        if isinstance(goal, Prod) and size >= 3:
            core.append((3.0, lambda: self._pair(ctx, goal, size), True))
        if isinstance(goal, Forall) and size >= 2:
            core.append((2.0, lambda: TLam(self.term(extend(ctx, TYPE_VAR), goal.body, size - 1)), True))
        if isinstance(goal, Exists) and size >= 3 + goal.size:
            core.append((2.0, lambda: self._pack(ctx, goal, size), True))

        if size >= 4:
            core.append((1.0 * elim, lambda: self._app(ctx, goal, size), False))
            core.append((1.2 * elim, lambda: self._let(ctx, goal, size), False))
            core.append((0.6 * elim, lambda: self._proj(ctx, goal, size), False))
            core.append((0.4 * elim, lambda: self._tapp(ctx, goal, size), False))
            core.append((0.5 * elim, lambda: self._open(ctx, goal, size), False))
        if size >= 2 + goal.size:
            special.append((cfg.letcc_weight, lambda: self._letcc(ctx, goal, size), False))

        if self.patterns:
            spec = self.spec
            if goal == spec.hole_type:
                special.append((cfg.hole_weight, lambda: PAT, True))
            if size >= 3 + spec.arg_ty.size:
                special.append((cfg.hole_weight, lambda: self._hole_call(ctx, goal, size), False))

        remainder = max(1.0 - sum(w for w, _, _ in special), 0.0)
        total = sum(w for w, _, _ in core)
        scale = remainder / total if total > 0 and remainder > 0 else 1e-6
        return special + [(scale * w, f, c) for w, f, c in core]

    def _split(self, size: int) -> int:
        """Budget for the first of two children sharing ``size``."""
        return self.rng.between(1, max(1, size - 1))

    def _fun(self, ctx, goal: Arrow, size):
        inner = extend(ctx, _Rec(goal), TermVar(shift(goal.dom, 0, 1)))
        body = self.term(inner, shift(goal.cod, 0, 2), size - 1 - goal.size)
        return Fun(goal.dom, goal.cod, body)

    def _pair(self, ctx, goal: Prod, size):
        l = self.term(ctx, goal.l, self._split(size - 1))
        r = self.term(ctx, goal.r, size - 1 - l.size)
        return Pair(l, r)

    def _pack(self, ctx, goal: Exists, size):
        w = self.type_(ctx, self.rng.between(1, 2))
        budget = size - 1 - w.size - goal.size
        payload = self.term(ctx, subst(goal.body, 0, w), budget)
        return Pack(w, payload, goal)

    def _call(self, ctx, fn: Exp, dom: Exp, size):
        return App(fn, self.term(ctx, dom, size - 2))

    def _app(self, ctx, goal, size):
        a = self.aux_type(ctx)
        fty = Arrow(a, goal)
        fn = self.term(ctx, fty, self._split(size - 1))
        arg = self.term(ctx, a, size - 1 - fn.size)
        return App(fn, arg)

    def _let(self, ctx, goal, size):
        a = self.aux_type(ctx)
        bound = self.term(ctx, a, self._split(size - 1))
        body = self.term(extend(ctx, TermVar(a)), shift(goal, 0, 1), size - 1 - bound.size)
        return LetIn(bound, body)

    def _proj(self, ctx, goal, size):
        other = self.aux_type(ctx)
        if self.rng.chance(0.5):
            return ProjL(self.term(ctx, Prod(goal, other), size - 1))
        return ProjR(self.term(ctx, Prod(other, goal), size - 1))

    def _tapp(self, ctx, goal, size):
        ty = self.aux_type(ctx)
        fn = self.term(ctx, Forall(shift(goal, 0, 1)), size - 1 - ty.size)
        return TApp(fn, ty)

    def _open(self, ctx, goal, size):
        inner_ctx = extend(ctx, TYPE_VAR)
        hidden = self.rng.choice((Var(0), Prod(Var(0), UNIT),
                                  Prod(Var(0), Arrow(Var(0), UNIT))))
        scrut = self.term(ctx, Exists(hidden), self._split(size - 1))
        body_ctx = extend(inner_ctx, TermVar(hidden))
        body = self.term(body_ctx, shift(goal, 0, 2), size - 1 - scrut.size)
        return Open(scrut, body)

    def _letcc(self, ctx, goal, size):
        inner = extend(ctx, TermVar(ContTy(goal)))
        return LetCC(goal, self.term(inner, shift(goal, 0, 1), size - 1 - goal.size))

    def _throw(self, ctx, goal, size, conts):
        i, ty = self.rng.choice(conts)
        if isinstance(goal, Void0):
            return Throw(self.term(ctx, ty, size - 2), Var(i))
        budget = size - 3 - goal.size
        return Abort(goal, Throw(self.term(ctx, ty, budget), Var(i)))

    def _hole_call(self, ctx, goal, size):
        spec = self.spec
        if goal == spec.ret_ty:
            return App(PAT, self.term(ctx, spec.arg_ty, size - 2))
        arg = self.term(ctx, spec.arg_ty, self._split(size - 3))
        body = self.term(extend(ctx, TermVar(spec.ret_ty)), shift(goal, 0, 1),
                         size - 3 - arg.size)
        return LetIn(App(PAT, arg), body)

    # --- values and contexts -----------------------------------------------

    def value(self, ty: Exp, size: int) -> Exp:
        """A closed value of a closed type."""
        match ty:
            case Unit1():
                return TRIV
            case Arrow():
                return self._fun((), ty, max(size, ty.size + 2))
            case Prod(a, b):
                l = self.value(a, size // 2)
                return Pair(l, self.value(b, size - l.size))
            case Forall(body):
                return TLam(self.term(((TYPE_VAR,)), body, max(size - 1, 1)))
            case Exists(body):
                w = self.type_((), 2)
                return Pack(w, self.value(subst(body, 0, w), size - 1), ty)
            case ContTy(arg) if self.allow_contval:
                return ContVal(arg, self.ctx(arg, max(size, 2)).shape)
        raise GiveUp()

    def ctx(self, hole_ty: Exp, size: int) -> EvalContext:
        """An evaluation context taking ``hole_ty`` to unit, built inside-out."""
        rng = self.rng
        shape: Exp = HOLE
        t = hole_ty
        budget = size - 1
        for _ in range(64):
            if isinstance(t, Unit1) and (budget <= 1 or rng.chance(0.3)):
                return EvalContext(shape)
            if budget <= 2:
                break
            self.work = 0
            try:
                new_shape, new_t = rng.choice(self._frames(t, budget))(shape)
            except GiveUp:
                continue
            if new_shape.size - shape.size > budget:
                continue
            budget -= new_shape.size - shape.size
            shape, t = new_shape, new_t
        if not isinstance(t, Unit1):
            shape = LetIn(shape, TRIV)
        return EvalContext(shape)

    def _frames(self, t: Exp, budget: int) -> list:
        """Frame builders applicable to a hole of type ``t``.

        Each maps the current shape to ``(shape wrapped in one frame, new type)``.
        """
        small = max(1, min(budget // 2, 8))
        opts = []
        if isinstance(t, Arrow):
            opts.append(lambda s: (App(s, self.term((), t.dom, small)), t.cod))
        if isinstance(t, Prod):
            opts.append(lambda s: (ProjL(s), t.l))
            opts.append(lambda s: (ProjR(s), t.r))
        if isinstance(t, Forall):
            def inst(s):
                ty = self.aux_type(())
                return TApp(s, ty), subst(t.body, 0, ty)
            opts.append(inst)
        if isinstance(t, Exists):
            def opn(s):
                goal = self.aux_type(())
                body = self.term(extend((TYPE_VAR,), TermVar(t.body)), shift(goal, 0, 2), small)
                return Open(s, body), goal
            opts.append(opn)
        if isinstance(t, Void0):
            def abort(s):
                goal = self.aux_type(())
                return Abort(goal, s), goal
            opts.append(abort)
        if isinstance(t, ContTy):
            opts.append(lambda s: (Throw(self.value(t.arg, small), s), VOID))

        def call(s):
            b = self.aux_type(())
            return App(self.value(Arrow(t, b), small + t.size + 2), s), b

        def let(s):
            goal = self.aux_type(())
            return LetIn(s, self.term((TermVar(t),), shift(goal, 0, 1), small)), goal

        def left(s):
            b = self.aux_type(())
            return Pair(s, self.term((), b, small)), Prod(t, b)

        def right(s):
            a = self.aux_type(())
            return Pair(self.value(a, small), s), Prod(a, t)

        def pack(s):
            ex = Exists(shift(t, 0, 1))
            return Pack(self.type_((), 2), s, ex), ex

        return opts + [call, let, let, left, right, pack]


# --- public entry points ---------------------------------------------------

def gen_type(cfg: GenConfig, ctx: Context = ()) -> Exp:
    return Generator(cfg).type_(ctx, cfg.max_size)


def gen_term(cfg: GenConfig, ctx: Context = (), goal: Exp | None = None,
             spec: FunctionSpec | None = None) -> Exp:
    """A term of type ``goal`` (default ``cfg.goal``); raises :class:`GiveUp`."""
    g = Generator(cfg, spec)
    return g.term(ctx, cfg.goal if goal is None else goal, cfg.max_size)


def gen_pattern(cfg: GenConfig, spec: FunctionSpec) -> tuple[Exp, int]:
    g = Generator(cfg, spec)
    p = g.term((), cfg.goal, cfg.max_size)
    return p, count_holes(p)


def gen_ctx(cfg: GenConfig, hole_ty: Exp, spec: FunctionSpec | None = None) -> EvalContext:
    return Generator(cfg, spec).ctx(hole_ty, cfg.max_size)


def gen_value(cfg: GenConfig, ty: Exp, spec: FunctionSpec | None = None) -> Exp:
    """A closed value of ``ty``; the only closed values of a continuation type are contvals."""
    g = Generator(cfg, spec)
    g.allow_contval = True
    return g.value(ty, cfg.max_size)


def count_holes(p: Exp) -> int:
    if not p.has_pat:
        return 0
    if isinstance(p, PatHole):
        return 1
    return sum(count_holes(c) for c in p.children() if isinstance(c, Exp))
