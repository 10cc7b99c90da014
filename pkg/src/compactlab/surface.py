"""S-expression surface syntax with named binders.

Grammar, one form per production::

    T ::= unit | void | a | (-> T T) | (* T T) | (forall a T) | (exists a T)
        | (cont T)
    e ::= () | x | @ | _ | (fun f (x : T) : T e) | (e e) | (pair e e)
        | (fst e) | (snd e) | (tlam a e) | (tapp e T) | (pack T e (a T))
        | (open e (a x) e) | (let (x e) e) | (letcc (x : T) e)
        | (throw e e) | (abort T e) | (contval T E)

``@`` is the pattern hole and ``_`` the context hole.  ``contval`` is an
internal form that only appears in traces; user source rejects it unless the
caller opts in.  ``%k`` names free index ``k`` of an open term.

Printing names binders after their depth (``x3``, ``f2``, ``a0``, ``k5``), so
printed names never shadow each other.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    Abort, App, Arrow, ContTy, ContVal, CtxHole, Exists, Exp, Forall, Fun,
    LetCC, LetIn, Open, Pack, Pair, PatHole, Prod, ProjL, ProjR, TApp, TLam,
    Throw, Triv, Unit1, Var, Void0, HOLE, PAT, TRIV, UNIT, VOID,
)


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class UnboundName(ParseError):
    pass


KEYWORDS = frozenset({
    "unit", "void", "->", "*", "forall", "exists", "cont", "fun", "pair",
    "fst", "snd", "tlam", "tapp", "pack", "open", "let", "letcc", "throw",
    "abort", "contval", ":", "@", "_",
})

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_']*$")


# --- reader ----------------------------------------------------------------

@dataclass
class Atom:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


def read(text: str) -> Atom | SList:
    """Read exactly one s-expression from ``text``."""
    stack: list[SList] = []
    result = None
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        tline, tcol = line, col
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
        if tok[0].isspace() or tok[0] == ";":
            continue
        if result is not None and not stack:
            raise ParseError(tline, tcol, "trailing input after expression")
        if tok == "(":
            stack.append(SList([], tline, tcol))
            continue
        if tok == ")":
            if not stack:
                raise ParseError(tline, tcol, "unbalanced ')'")
            node = stack.pop()
        else:
            node = Atom(tok, tline, tcol)
        if stack:
            stack[-1].items.append(node)
        else:
            result = node
    if stack:
        raise ParseError(stack[-1].line, stack[-1].col, "unclosed '('")
    if result is None:
        raise ParseError(line, col, "empty input")
    return result


# --- s-expression to Exp ---------------------------------------------------

class _Parser:
    def __init__(self, allow_internal: bool):
        self.allow_internal = allow_internal

    def fail(self, sx, msg: str):
        raise ParseError(sx.line, sx.col, msg)

    def name(self, sx) -> str:
        if not isinstance(sx, Atom) or (sx.text in KEYWORDS and sx.text != "_") \
                or not (_NAME.match(sx.text) or sx.text == "_"):
            self.fail(sx, "expected a binder name")
        return sx.text

    def lookup(self, sx: Atom, scope: list, kind: str) -> Exp:
        text = sx.text
        if text.startswith("%") and text[1:].isdigit():
            return Var(int(text[1:]) + len(scope))
        for depth, (nm, k) in enumerate(reversed(scope)):
            if nm == text:
                if k != kind:
                    self.fail(sx, f"'{text}' is a {k} variable, expected a {kind} variable")
                return Var(depth)
        raise UnboundName(sx.line, sx.col, f"unbound name '{text}'")

    def arity(self, sx: SList, n: int) -> None:
        if len(sx.items) != n:
            head = sx.items[0].text if sx.items and isinstance(sx.items[0], Atom) else "form"
            self.fail(sx, f"'{head}' expects {n - 1} arguments")

    def type_(self, sx, scope: list) -> Exp:
        if isinstance(sx, Atom):
            if sx.text == "unit":
                return UNIT
            if sx.text == "void":
                return VOID
            if sx.text in KEYWORDS:
                self.fail(sx, f"'{sx.text}' is not a type")
            return self.lookup(sx, scope, "type")
        if not sx.items or not isinstance(sx.items[0], Atom):
            self.fail(sx, "expected a type")
        head = sx.items[0].text
        args = sx.items[1:]
        if head in ("->", "*"):
            self.arity(sx, 3)
            ctor = Arrow if head == "->" else Prod
            return ctor(self.type_(args[0], scope), self.type_(args[1], scope))
        if head in ("forall", "exists"):
            self.arity(sx, 3)
            a = self.name(args[0])
            body = self.type_(args[1], scope + [(a, "type")])
            return Forall(body) if head == "forall" else Exists(body)
        if head == "cont":
            self.arity(sx, 2)
            return ContTy(self.type_(args[0], scope))
        self.fail(sx, f"unknown type form '{head}'")

    def typed_binder(self, sx, scope: list) -> tuple[str, Exp]:
        if not isinstance(sx, SList) or len(sx.items) != 3 \
                or not isinstance(sx.items[1], Atom) or sx.items[1].text != ":":
            self.fail(sx, "expected (name : type)")
        return self.name(sx.items[0]), self.type_(sx.items[2], scope)

    def term(self, sx, scope: list) -> Exp:
        if isinstance(sx, Atom):
            if sx.text == "@":
                return PAT
            if sx.text == "_":
                return HOLE
            if sx.text in KEYWORDS:
                self.fail(sx, f"'{sx.text}' is not a term")
            return self.lookup(sx, scope, "term")
        items = sx.items
        if not items:
            return TRIV
        head = items[0].text if isinstance(items[0], Atom) else None
        args = items[1:]
        if head == "fun":
            # (fun f (x : T) : U e)
            self.arity(sx, 6)
            f = self.name(args[0])
            x, a = self.typed_binder(args[1], scope)
            if not isinstance(args[2], Atom) or args[2].text != ":":
                self.fail(args[2], "expected ':' before the result type")
            b = self.type_(args[3], scope)
            body = self.term(args[4], scope + [(f, "term"), (x, "term")])
            return Fun(a, b, body)
        if head == "pair":
            self.arity(sx, 3)
            return Pair(self.term(args[0], scope), self.term(args[1], scope))
        if head in ("fst", "snd"):
            self.arity(sx, 2)
            ctor = ProjL if head == "fst" else ProjR
            return ctor(self.term(args[0], scope))
        if head == "tlam":
            self.arity(sx, 3)
            a = self.name(args[0])
            return TLam(self.term(args[1], scope + [(a, "type")]))
        if head == "tapp":
            self.arity(sx, 3)
            return TApp(self.term(args[0], scope), self.type_(args[1], scope))
        if head == "pack":
            self.arity(sx, 4)
            w = self.type_(args[0], scope)
            payload = self.term(args[1], scope)
            return Pack(w, payload, self.pack_type(args[2], scope))
        if head == "open":
            self.arity(sx, 4)
            binder = args[1]
            if not isinstance(binder, SList) or len(binder.items) != 2:
                self.fail(binder, "expected (a x)")
            a, x = self.name(binder.items[0]), self.name(binder.items[1])
            scrut = self.term(args[0], scope)
            return Open(scrut, self.term(args[2], scope + [(a, "type"), (x, "term")]))
        if head == "let":
            self.arity(sx, 3)
            binder = args[0]
            if not isinstance(binder, SList) or len(binder.items) != 2:
                self.fail(binder, "expected (x e)")
            x = self.name(binder.items[0])
            bound = self.term(binder.items[1], scope)
            return LetIn(bound, self.term(args[1], scope + [(x, "term")]))
        if head == "letcc":
            self.arity(sx, 3)
            k, ty = self.typed_binder(args[0], scope)
            return LetCC(ty, self.term(args[1], scope + [(k, "term")]))
        if head == "throw":
            self.arity(sx, 3)
            return Throw(self.term(args[0], scope), self.term(args[1], scope))
        if head == "abort":
            self.arity(sx, 3)
            return Abort(self.type_(args[0], scope), self.term(args[1], scope))
        if head == "contval":
            if not self.allow_internal:
                self.fail(sx, "contval is an internal form and cannot appear in source")
            self.arity(sx, 3)
            # captured contexts are closed
            return ContVal(self.type_(args[0], []), self.term(args[1], []))
        if head in KEYWORDS and head not in ("@", "_"):
            self.fail(items[0], f"'{head}' cannot start a term")
        if len(items) < 2:
            self.fail(sx, "application needs a function and an argument")
        out = self.term(items[0], scope)
        for arg in items[1:]:
            out = App(out, self.term(arg, scope))
        return out

    def pack_type(self, sx, scope: list) -> Exp:
        if (isinstance(sx, SList) and len(sx.items) == 2
                and isinstance(sx.items[0], Atom) and sx.items[0].text not in KEYWORDS):
            a = self.name(sx.items[0])
            return Exists(self.type_(sx.items[1], scope + [(a, "type")]))
        return self.type_(sx, scope)


def parse(text: str, allow_internal: bool = False) -> Exp:
    """Parse a closed term (or pattern, or context) from source text."""
    return _Parser(allow_internal).term(read(text), [])


def parse_type(text: str) -> Exp:
    return _Parser(False).type_(read(text), [])


# --- printing --------------------------------------------------------------

def show(e: Exp, names: tuple[str, ...] = ()) -> str:
    """Render ``e`` in surface syntax; ``names`` lists enclosing binders, innermost last."""
    d = len(names)

    def go(x: Exp) -> str:
        return show(x, names)

    match e:
        case Var(i):
            return names[d - 1 - i] if i < d else f"%{i - d}"
        case Triv():
            return "()"
        case Unit1():
            return "unit"
        case Void0():
            return "void"
        case PatHole():
            return "@"
        case CtxHole():
            return "_"
        case Arrow(a, b):
            return f"(-> {go(a)} {go(b)})"
        case Prod(a, b):
            return f"(* {go(a)} {go(b)})"
        case Forall(b) | Exists(b):
            a = f"a{d}"
            kw = "forall" if isinstance(e, Forall) else "exists"
            return f"({kw} {a} {show(b, names + (a,))})"
        case ContTy(a):
            return f"(cont {go(a)})"
        case Fun(a, b, body):
            f, x = f"f{d}", f"x{d + 1}"
            return f"(fun {f} ({x} : {go(a)}) : {go(b)} {show(body, names + (f, x))})"
        case App(f, a):
            return f"({go(f)} {go(a)})"
        case Pair(a, b):
            return f"(pair {go(a)} {go(b)})"
        case ProjL(a):
            return f"(fst {go(a)})"
        case ProjR(a):
            return f"(snd {go(a)})"
        case TLam(body):
            a = f"a{d}"
            return f"(tlam {a} {show(body, names + (a,))})"
        case TApp(f, ty):
            return f"(tapp {go(f)} {go(ty)})"
        case Pack(w, payload, Exists(b)):
            a = f"a{d}"
            return f"(pack {go(w)} {go(payload)} ({a} {show(b, names + (a,))}))"
        case Pack(w, payload, ty):
            return f"(pack {go(w)} {go(payload)} {go(ty)})"
        case Open(scrut, body):
            a, x = f"a{d}", f"x{d + 1}"
            return f"(open {go(scrut)} ({a} {x}) {show(body, names + (a, x))})"
        case LetIn(bound, body):
            x = f"x{d}"
            return f"(let ({x} {go(bound)}) {show(body, names + (x,))})"
        case LetCC(ty, body):
            k = f"k{d}"
            return f"(letcc ({k} : {go(ty)}) {show(body, names + (k,))})"
        case Throw(v, k):
            return f"(throw {go(v)} {go(k)})"
        case Abort(ty, a):
            return f"(abort {go(ty)} {go(a)})"
        case ContVal(ty, ctx):
            return f"(contval {show(ty)} {show(ctx)})"
    raise TypeError(f"cannot print {e!r}")
