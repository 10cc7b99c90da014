"""A small library of functions under study, written in surface syntax.

Without branching in the language, a recursive call that is always reached
loops forever, so the interesting specs recurse only behind a closure or
after an escape.  ``loop`` is the degenerate one that always diverges.
"""

from __future__ import annotations

from .surface import parse
from .syntax import FunctionSpec

SOURCES = {
    # f unused: every unrolling past F_0 coincides with F_omega
    "identity": "(fun f (x : unit) : unit x)",
    # returns a closure that calls f once when invoked
    "thunk-pair": """
        (fun f (x : unit) : (* unit (-> unit unit))
          (pair () (fun g (y : unit) : unit (fst (f y)))))""",
    # the recursive call is dead code behind a throw
    "escape": """
        (fun f (k : (cont unit)) : unit
          (let (z (abort unit (throw () k))) (f k)))""",
    # the recursive call hides inside an abstract package
    "package": """
        (fun f (x : unit) : (exists a (* a (-> a unit)))
          (pack unit
                (pair () (fun g (y : unit) : unit (let (z (f y)) ())))
                (b (* b (-> b unit)))))""",
    # uses its polymorphic argument, never itself
    "poly-arg": """
        (fun f (id : (forall a (-> a a))) : unit
          ((tapp id unit) ()))""",
    "loop": "(fun f (x : unit) : unit (f x))",
}

#: the specs used by the compactness corpora (all have terminating calls)
CORPUS = ("identity", "thunk-pair", "escape", "package", "poly-arg")


def load(name: str) -> FunctionSpec:
    return FunctionSpec.from_fun(parse(SOURCES[name]))


def corpus() -> list[tuple[str, FunctionSpec]]:
    return [(name, load(name)) for name in CORPUS]
