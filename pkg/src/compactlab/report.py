"""Plain-text campaign reports and their companion figure."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

from .fuzz import CaseRecord

FORMAT = "compactlab-report 1"
VERDICTS = ("pass", "fail", "inconclusive", "skipped")


def _one_line(text: str) -> str:
    return " ".join(text.split())


def render_report(mode: str, params: dict, records: list[CaseRecord]) -> str:
    out = [FORMAT, f"mode: {mode}"]
    out += [f"{k}: {v}" for k, v in params.items()]
    for r in records:
        out += ["", f"[case {r.index}]", f"mode: {mode}", f"seed: {r.seed}",
                f"spec: {r.spec_name}", f"inputs: {_one_line(r.inputs)}",
                f"verdict: {r.verdict}"]
        for v in r.report.violations:
            out.append(f"violation: inputs={_one_line(v.inputs)} | "
                       f"expected={_one_line(v.expected)} | got={_one_line(v.got)}")
        for note in r.report.inconclusive:
            out.append(f"inconclusive: {_one_line(note)}")
    counts = Counter(r.verdict for r in records)
    out += ["", "[summary]"] + [f"{v}: {counts.get(v, 0)}" for v in VERDICTS]
    return "\n".join(out) + "\n"


def parse_report(text: str) -> dict:
    """Read back a report: header fields plus a list of case dicts."""
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT:
        raise ValueError("not a compactlab report")
    header: dict = {}
    cases: list[dict] = []
    summary: dict = {}
    cur = header
    for line in lines[1:]:
        if not line:
            continue
        if line.startswith("[case "):
            cur = {"index": int(line[6:-1])}
            cases.append(cur)
        elif line == "[summary]":
            cur = summary
        else:
            key, _, val = line.partition(": ")
            if key in ("violation", "inconclusive"):
                cur.setdefault(key, []).append(val)
            else:
                cur[key] = val
    return {"header": header, "cases": cases, "summary": summary}


def figure_path(report_path: str | Path) -> Path:
    return Path(report_path).with_suffix(".png")


def write_figure(mode: str, records: list[CaseRecord], path: str | Path) -> Path:
    """Step counts where the mode measures them, verdict counts otherwise."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    counts = Counter(r.verdict for r in records)
    ax0.bar(VERDICTS, [counts.get(v, 0) for v in VERDICTS],
            color=["tab:green", "tab:red", "tab:gray", "tab:olive"])
    ax0.set_title(f"{mode}: verdicts ({len(records)} cases)")
    ax0.set_ylabel("cases")

    data = [d for r in records for d in r.report.data]
    if mode == "compactness":
        pts = [(d["omega"], d["finite"]) for d in data
               if d.get("omega") is not None and d.get("finite") is not None]
        back = [(d["omega"], m) for d in data if d.get("omega") is not None
                for m in d.get("backward", {}).values()]
        if pts:
            ax1.scatter(*zip(*pts), s=14, label="F_n filling (forward)")
        if back:
            ax1.scatter(*zip(*back), s=6, marker="x", label="F_k filling (backward)")
        top = max([max(p) for p in pts + back], default=1)
        ax1.plot([0, top], [0, top], lw=0.8, color="black")
        ax1.set_xlabel("steps, F_omega filling")
        ax1.set_ylabel("steps, finite filling")
        ax1.legend(loc="upper left")
    else:
        key = "states" if mode in ("determinism", "safety") else "steps"
        vals = [d[key] for d in data if key in d]
        ax1.hist(vals or [0], bins=20, color="tab:blue")
        ax1.set_xlabel(key)
        ax1.set_ylabel("cases")
    ax1.set_title("trace lengths")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def write(mode: str, params: dict, records: list[CaseRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(mode, params, records), encoding="utf-8")
    return write_figure(mode, records, figure_path(path))
