"""Command-line front end.

Exit status is 0 on success, 1 when a property is violated (or a program is
ill-typed or stuck), and 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import sys
import threading
from collections import Counter
from pathlib import Path

from . import fuzz, report, specs
from .dynamics import SelfLoop, StuckError, Terminated, run, trace
from .harness import PreconditionError, check_compactness
from .pattern import of_check, unroll
from .statics import IllTyped, typeof
from .surface import ParseError, parse, show
from .syntax import EvalContext, Finite, FunctionSpec, MalformedTerm, OMEGA

OK, VIOLATION, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc


def _parse_file(path: str):
    try:
        return parse(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from exc


def _load_spec(arg: str | None, required: bool = False) -> FunctionSpec | None:
    if arg is None:
        if required:
            raise UsageError("--spec is required")
        return None
    if arg in specs.SOURCES and not Path(arg).exists():
        return specs.load(arg)
    try:
        return FunctionSpec.from_fun(_parse_file(arg))
    except (MalformedTerm, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{arg}: not a closed function spec: {exc}") from exc


def _needs_spec(e, spec):
    if e.has_pat and spec is None:
        raise UsageError("the program mentions @, so --spec is required")


def _depth(text: str):
    if text == "omega":
        return OMEGA
    if text.isdigit():
        return Finite(int(text))
    raise UsageError(f"depth must be a natural number or omega, not {text!r}")


def describe(res) -> str:
    match res:
        case Terminated(v, n):
            return f"value {show(v)} in {n} steps"
        case SelfLoop(k):
            return f"selfloop@{k}"
    return "fuel-exhausted"


# --- subcommands -----------------------------------------------------------

def cmd_check(args) -> int:
    spec = _load_spec(args.spec)
    e = _parse_file(args.file)
    _needs_spec(e, spec)
    try:
        print(show(typeof(spec, (), e)))
    except IllTyped as exc:
        print(f"ill-typed: {exc}")
        return VIOLATION
    return OK


def cmd_run(args) -> int:
    spec = _load_spec(args.spec)
    e = _parse_file(args.file)
    _needs_spec(e, spec)
    try:
        print(describe(run(spec, e, args.fuel, pattern=e.has_pat)))
    except StuckError as exc:
        print(f"stuck@{exc.at_step}: {exc.reason}")
        return VIOLATION
    return OK


def cmd_trace(args) -> int:
    spec = _load_spec(args.spec)
    e = _parse_file(args.file)
    _needs_spec(e, spec)
    try:
        for state in trace(spec, e, args.fuel, pattern=e.has_pat):
            print(show(state))
    except StuckError as exc:
        print(f"stuck@{exc.at_step}: {exc.reason}")
        return VIOLATION
    return OK


def cmd_unroll(args) -> int:
    spec = _load_spec(args.spec, required=True)
    print(show(unroll(spec, _depth(args.depth))))
    return OK


def cmd_of(args) -> int:
    spec = _load_spec(args.spec, required=True)
    e, p = _parse_file(args.term), _parse_file(args.pattern)
    print("true" if of_check(spec, args.n, e, p) else "false")
    return OK


def cmd_compactness(args) -> int:
    spec = _load_spec(args.spec, required=True)
    p = _parse_file(args.pattern)
    E = EvalContext(_parse_file(args.ctx)) if args.ctx else EvalContext(parse("_"))
    try:
        rep = check_compactness(spec, E, p, args.fuel)
    except PreconditionError as exc:
        raise UsageError(f"precondition: {exc}") from exc
    rec = rep.data[0]
    fwd = "inconclusive" if rec["omega"] is None else \
        f"omega={rec['omega']} finite={rec.get('finite')}"
    print(f"forward: {fwd}")
    back = " ".join(f"k={k}:{m}" for k, m in rec["backward"].items()) or "none terminate"
    print(f"backward: {back}")
    for v in rep.violations:
        print(f"violation: expected {v.expected}; got {v.got}; {v.inputs}")
    print(f"verdict: {'pass' if rep.passed else 'fail'}")
    return OK if rep.passed else VIOLATION


def cmd_fuzz(args) -> int:
    spec = None
    if args.spec is not None:
        spec = (args.spec, _load_spec(args.spec))
    records = fuzz.campaign(args.mode, args.seed, args.count, args.fuel, args.size,
                            spec=spec, workers=args.workers)
    counts = Counter(r.verdict for r in records)
    ran = args.count - counts["skipped"]
    print(f"{args.mode}: {counts['pass']}/{ran} pass, {counts['fail']} fail, "
          f"{counts['inconclusive']} inconclusive, {counts['skipped']} skipped")
    for r in records:
        for v in r.report.violations:
            print(f"case {r.index} [{r.spec_name}]: expected {v.expected}; got {v.got}")
    if args.report:
        params = {"seed": args.seed, "count": args.count, "fuel": args.fuel,
                  "size": args.size, "spec": args.spec or "corpus"}
        try:
            fig = report.write(args.mode, params, records, args.report)
        except OSError as exc:
            raise UsageError(f"{args.report}: {exc.strerror}") from exc
        print(f"report: {args.report}")
        print(f"figure: {fig}")
    return VIOLATION if counts["fail"] else OK


# --- argument parsing ------------------------------------------------------

def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compactlab",
                                 description="Unrolling and compactness laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="print the type of a closed program")
    p.add_argument("file")
    p.add_argument("--spec")
    p.set_defaults(func=cmd_check)

    for name, func, helptext in (("run", cmd_run, "run a program"),
                                 ("trace", cmd_trace, "print every state of a run")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("--fuel", type=_natural, required=True)
        p.add_argument("--spec")
        p.set_defaults(func=func)

    p = sub.add_parser("unroll", help="print an unrolling of the function")
    p.add_argument("--spec", required=True)
    p.add_argument("--depth", required=True)
    p.set_defaults(func=cmd_unroll)

    p = sub.add_parser("of", help="decide of^n between a term and a pattern")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("term")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_of)

    p = sub.add_parser("compactness", help="compare omega and finite fillings")
    p.add_argument("--spec", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--ctx")
    p.add_argument("--fuel", type=_natural, required=True)
    p.set_defaults(func=cmd_compactness)

    p = sub.add_parser("fuzz", help="run a seeded campaign")
    p.add_argument("--mode", choices=fuzz.MODES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_natural, default=100)
    p.add_argument("--fuel", type=_natural, default=200)
    p.add_argument("--size", type=_natural, default=20)
    p.add_argument("--report")
    p.add_argument("--spec", help="spec file or curated spec name (default: all)")
    p.add_argument("--workers", type=_natural, default=1)
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def entry() -> None:
    # deep unrollings recurse deeply; give them a big stack
    sys.setrecursionlimit(100_000)
    threading.stack_size(512 * 1024 * 1024)
    result = [USAGE]

    def target():
        try:
            result[0] = main()
        except SystemExit as exc:
            result[0] = exc.code if isinstance(exc.code, int) else USAGE

    t = threading.Thread(target=target)
    t.start()
    t.join()
    sys.exit(result[0])
