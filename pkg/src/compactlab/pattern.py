"""Unrollings of the function under study, hole filling, and the ``of^n`` check.

``of_check(spec, n, e, p)`` holds when ``e`` is ``p`` with every ``@``
replaced by either the recursive function itself or an unrolling of depth at
least ``n``.  Everywhere else the relation is plain congruence, which on
``@``-free subpatterns is just equality.
"""

from __future__ import annotations

import threading

from .dynamics import is_pattern_value, pattern_step
from .syntax import (
    App, Exp, Finite, Fun, FunctionSpec, Omega, PatHole, UnrollDepth, Var,
    replace_pat, subst,
)

__all__ = [
    "unroll", "fill", "of_check", "matches_unrolling", "is_pattern_value",
    "pattern_step",
]

# Unrollings are memoised per spec so that every F_i is a single shared
# object; equality checks between them then stop at the identity test.
_unrollings: dict[FunctionSpec, list[Exp]] = {}
_lock = threading.Lock()


def unroll(spec: FunctionSpec, depth: UnrollDepth) -> Exp:
    """``F_omega`` or the depth-``n`` unrolling ``F_n`` of the spec."""
    if isinstance(depth, Omega):
        return spec.as_fun()
    if isinstance(depth, int):
        depth = Finite(depth)
    n = depth.n
    with _lock:
        chain = _unrollings.setdefault(
            spec, [Fun(spec.arg_ty, spec.ret_ty, App(Var(1), Var(0)))])
        while len(chain) <= n:
            # body[F_i / f]; the argument index 0 stays bound
            chain.append(Fun(spec.arg_ty, spec.ret_ty, subst(spec.body, 1, chain[-1])))
        return chain[n]


def fill(p: Exp, spec: FunctionSpec, depth: UnrollDepth) -> Exp:
    return replace_pat(p, unroll(spec, depth))


def matches_unrolling(spec: FunctionSpec, n: int, e: Exp) -> bool:
    """Is ``e`` either ``F_omega`` or some ``F_i`` with ``i >= n``?

    Searches upward from ``n``.  From depth 1 on the unrolling sizes never
    decrease, and once two consecutive unrollings coincide they are constant,
    so the search stops at the first unrolling larger than ``e`` or at a
    fixpoint.
    """
    if not isinstance(e, Fun):
        return False
    if e == unroll(spec, Omega()):
        return True
    i = n
    while True:
        u = unroll(spec, i)
        if u == e:
            return True
        if i >= 1 and u.size > e.size:
            return False
        if i >= 1 and unroll(spec, i + 1) == u:
            return False
        i += 1


def of_check(spec: FunctionSpec, n: int, e: Exp, p: Exp) -> bool:
    if not p.has_pat:
        return e == p
    if isinstance(p, PatHole):
        return matches_unrolling(spec, n, e)
    if type(e) is not type(p):
        return False
    return all(
        of_check(spec, n, a, b) if isinstance(b, Exp) else a == b
        for a, b in zip(e.children(), p.children())
    )
