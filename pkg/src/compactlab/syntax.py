"""Unified abstract syntax for types, terms, evaluation contexts and patterns.

Every node is an immutable :class:`Exp`.  Variables are De Bruijn indices in a
single index space shared by term and type variables.  Two constants are
special: :class:`CtxHole` (``[.]``, the evaluation-context hole) and
:class:`PatHole` (the global pattern variable, written ``@`` in source).

Nodes cache their hash, size, free-variable bound and hole counts at
construction time.  Unrollings of recursive functions are shared DAGs whose
tree size grows quickly, so shift/subst short-circuit on closed subtrees and
equality first tries identity and the cached hash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Iterator


class MalformedTerm(ValueError):
    """A term violates a syntactic precondition (index underflow, bad context)."""


class MalformedContext(MalformedTerm):
    pass


class Exp:
    """Base class of the unified syntax sort."""

    # Number of variables each field binds, in field order.
    _binders: ClassVar[tuple[int, ...]] = ()

    __slots__ = ()

    def __post_init__(self) -> None:
        kids = self.children()
        h = hash((type(self).__name__,) + tuple(
            c._hash if isinstance(c, Exp) else c for c in kids))
        size = 1
        fb = 0
        nholes = 0
        has_pat = False
        for c, b in zip(kids, self._binders):
            if not isinstance(c, Exp):
                continue
            size += c.size
            fb = max(fb, c.fb - b)
            nholes += c.nholes
            has_pat = has_pat or c.has_pat
        object.__setattr__(self, "_hash", h)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "fb", fb)
        object.__setattr__(self, "nholes", nholes)
        object.__setattr__(self, "has_pat", has_pat)

    def children(self) -> tuple:
        return tuple(getattr(self, f) for f in self.__match_args__)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self.children() == other.children()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __repr__(self) -> str:
        kids = ", ".join(repr(c) for c in self.children())
        return f"{type(self).__name__}({kids})"


def _node(*binders: int):
    def wrap(cls):
        cls = dataclass(frozen=True, eq=False, repr=False)(cls)
        cls._binders = binders
        return cls
    return wrap


# --- types -----------------------------------------------------------------

@_node()
class Void0(Exp):
    pass


@_node()
class Unit1(Exp):
    pass


@_node(0, 0)
class Arrow(Exp):
    dom: Exp
    cod: Exp


@_node(0, 0)
class Prod(Exp):
    l: Exp
    r: Exp


@_node(1)
class Forall(Exp):
    body: Exp


@_node(1)
class Exists(Exp):
    body: Exp


@_node(0)
class ContTy(Exp):
    arg: Exp


# --- terms -----------------------------------------------------------------

@_node(0)
class Var(Exp):
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise MalformedTerm(f"negative De Bruijn index {self.index}")
        Exp.__post_init__(self)
        object.__setattr__(self, "fb", self.index + 1)


@_node(0, 1)
class LetIn(Exp):
    bound: Exp
    body: Exp


@_node(0, 0)
class Abort(Exp):
    ty: Exp
    arg: Exp


@_node()
class Triv(Exp):
    pass


@_node(0, 0, 2)
class Fun(Exp):
    """``fun f (x : arg_ty) : ret_ty. body``; index 1 is f, index 0 is x."""

    arg_ty: Exp
    ret_ty: Exp
    body: Exp


@_node(0, 0)
class App(Exp):
    fn: Exp
    arg: Exp


@_node(0, 0)
class Pair(Exp):
    l: Exp
    r: Exp


@_node(0)
class ProjL(Exp):
    arg: Exp


@_node(0)
class ProjR(Exp):
    arg: Exp


@_node(1)
class TLam(Exp):
    body: Exp


@_node(0, 0)
class TApp(Exp):
    fn: Exp
    ty: Exp


@_node(0, 0, 0)
class Pack(Exp):
    witness: Exp
    payload: Exp
    as_ty: Exp


@_node(0, 2)
class Open(Exp):
    """``open scrut as (a, x) in body``; index 1 is the type a, index 0 is x."""

    scrut: Exp
    body: Exp


@_node(0, 1)
class LetCC(Exp):
    ty: Exp
    body: Exp


@_node(0, 0)
class Throw(Exp):
    val: Exp
    cont: Exp


@_node(0, 0)
class ContVal(Exp):
    """A captured continuation.

    ``ty`` is the type of the hole of ``ctx``.  The context is closed and owns
    its own hole, so hole counting and plugging never descend into it.
    """

    ty: Exp
    ctx: Exp

    def __post_init__(self) -> None:
        Exp.__post_init__(self)
        object.__setattr__(self, "nholes", 0)


# --- special constants -----------------------------------------------------

@_node()
class CtxHole(Exp):
    def __post_init__(self) -> None:
        Exp.__post_init__(self)
        object.__setattr__(self, "nholes", 1)


@_node()
class PatHole(Exp):
    def __post_init__(self) -> None:
        Exp.__post_init__(self)
        object.__setattr__(self, "has_pat", True)


VOID = Void0()
UNIT = Unit1()
TRIV = Triv()
HOLE = CtxHole()
PAT = PatHole()

TYPE_FORMS = (Void0, Unit1, Arrow, Prod, Forall, Exists, ContTy)


def rebuild(e: Exp, kids: list) -> Exp:
    if all(a is b for a, b in zip(kids, e.children())):
        return e
    return type(e)(*kids)


# --- index manipulation ----------------------------------------------------

def shift(e: Exp, cutoff: int, amount: int) -> Exp:
    """Add ``amount`` to every free index ``>= cutoff``."""
    if amount == 0 or e.fb <= cutoff:
        return e
    if isinstance(e, Var):
        k = e.index + amount
        if k < cutoff:
            raise MalformedTerm(
                f"shift by {amount} at cutoff {cutoff} underflows index {e.index}")
        return Var(k)
    return rebuild(e, [
        shift(c, cutoff + b, amount) if isinstance(c, Exp) else c
        for c, b in zip(e.children(), e._binders)
    ])


def subst(e: Exp, index: int, replacement: Exp) -> Exp:
    """Replace ``Var(index)`` by ``replacement``; indices above it drop by one.

    ``replacement`` lives in the context with ``index`` removed and is lifted
    when descending under binders.
    """
    if e.fb <= index:
        return e
    if isinstance(e, Var):
        if e.index == index:
            return shift(replacement, 0, index)
        return Var(e.index - 1) if e.index > index else e
    return rebuild(e, [
        subst(c, index + b, replacement) if isinstance(c, Exp) else c
        for c, b in zip(e.children(), e._binders)
    ])


def subst2(e: Exp, repl_for_1: Exp, repl_for_0: Exp) -> Exp:
    """Simultaneously substitute for indices 1 and 0, renumbering the rest."""
    return _subst2(e, 0, repl_for_1, repl_for_0)


def _subst2(e: Exp, depth: int, r1: Exp, r0: Exp) -> Exp:
    if e.fb <= depth:
        return e
    if isinstance(e, Var):
        k = e.index
        if k == depth:
            return shift(r0, 0, depth)
        if k == depth + 1:
            return shift(r1, 0, depth)
        return Var(k - 2) if k > depth + 1 else e
    return rebuild(e, [
        _subst2(c, depth + b, r1, r0) if isinstance(c, Exp) else c
        for c, b in zip(e.children(), e._binders)
    ])


def replace_pat(e: Exp, replacement: Exp) -> Exp:
    """Replace every pattern hole by a closed ``replacement``."""
    if not e.has_pat:
        return e
    if isinstance(e, PatHole):
        return replacement
    return rebuild(e, [
        replace_pat(c, replacement) if isinstance(c, Exp) else c
        for c in e.children()
    ])


# --- evaluation contexts ---------------------------------------------------

@dataclass(frozen=True)
class EvalContext:
    """An expression with exactly one context hole."""

    shape: Exp

    def __post_init__(self) -> None:
        if self.shape.nholes != 1:
            raise MalformedContext(
                f"context must contain exactly one hole, found {self.shape.nholes}")

    @property
    def is_empty(self) -> bool:
        return isinstance(self.shape, CtxHole)


EMPTY = EvalContext(HOLE)


def plug_shape(shape: Exp, e: Exp) -> Exp:
    if isinstance(shape, CtxHole):
        return e
    kids = list(shape.children())
    for i, (c, b) in enumerate(zip(kids, shape._binders)):
        if isinstance(c, Exp) and c.nholes:
            if b:
                raise MalformedContext("context hole occurs under a binder")
            kids[i] = plug_shape(c, e)
            return type(shape)(*kids)
    raise MalformedContext("no context hole to plug")


def plug(E: EvalContext, e: Exp) -> Exp:
    """``E[e]``: literal hole replacement, no index adjustment."""
    return plug_shape(E.shape, e)


def compose_ctx(E: EvalContext, frame: EvalContext) -> EvalContext:
    return EvalContext(plug(E, frame.shape))


# --- misc ------------------------------------------------------------------

def equal(a: Exp, b: Exp) -> bool:
    """Alpha-equivalence, which is structural equality under De Bruijn."""
    return a == b


def size(e: Exp) -> int:
    return e.size


def is_closed(e: Exp, depth: int = 0) -> bool:
    return e.fb <= depth


def subterms(e: Exp) -> Iterator[Exp]:
    """Pre-order walk over distinct-by-position subterms (tree order)."""
    stack = [e]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed([c for c in t.children() if isinstance(c, Exp)]))


@dataclass(frozen=True)
class Finite:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("unroll depth must be non-negative")

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class Omega:
    def __str__(self) -> str:
        return "omega"


OMEGA = Omega()
UnrollDepth = Finite | Omega


@dataclass(frozen=True)
class FunctionSpec:
    """The fixed recursive function ``fun f (x : arg_ty) : ret_ty. body``."""

    arg_ty: Exp
    ret_ty: Exp
    body: Exp

    def __post_init__(self) -> None:
        if not (is_closed(self.arg_ty) and is_closed(self.ret_ty)):
            raise MalformedTerm("function spec types must be closed")
        if not is_closed(self.body, 2):
            raise MalformedTerm("function spec body may only mention f and x")
        if self.body.has_pat:
            raise MalformedTerm("function spec body may not contain @")

    @classmethod
    def from_fun(cls, e: Exp) -> FunctionSpec:
        if not isinstance(e, Fun):
            raise MalformedTerm("a function spec must be a fun expression")
        return cls(e.arg_ty, e.ret_ty, e.body)

    @property
    def hole_type(self) -> Exp:
        return Arrow(self.arg_ty, self.ret_ty)

    def as_fun(self) -> Exp:
        return Fun(self.arg_ty, self.ret_ty, self.body)


def occurs_free(e: Exp, index: int) -> bool:
    """True if free index ``index`` occurs in ``e``."""
    if e.fb <= index:
        return False
    if isinstance(e, Var):
        return e.index == index
    return any(occurs_free(c, index + b)
               for c, b in zip(e.children(), e._binders) if isinstance(c, Exp))
