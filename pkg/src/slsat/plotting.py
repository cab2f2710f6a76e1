"""Figures for fuzz reports."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .fuzz import FuzzReport  # noqa: E402

_COLORS = {"SAT": "tab:green", "UNSAT": "tab:red", "UNKNOWN": "tab:gray", "ERROR": "black"}
# fixed metadata keeps the PNG bytes stable across runs
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def verdict_chart(report: FuzzReport, path: Path) -> Path:
    solver = report.verdicts()
    oracle = {k: 0 for k in solver}
    for c in report.cases:
        oracle[c.oracle] += 1
    keys = [k for k in ("SAT", "UNSAT", "UNKNOWN", "ERROR") if solver[k] or oracle[k]]
    xs = range(len(keys))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([x - 0.2 for x in xs], [solver[k] for k in keys], 0.4, label="checker")
    ax.bar([x + 0.2 for x in xs], [oracle[k] for k in keys], 0.4, label="oracle")
    ax.set_xticks(list(xs), keys)
    ax.set_ylabel("sentences")
    ax.set_title(f"verdicts, seed {report.seed}")
    ax.legend()
    return _save(fig, path)


def work_chart(report: FuzzReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for verdict, color in _COLORS.items():
        pts = [(c.bound, max(c.solver_work, 1)) for c in report.cases if c.verdict == verdict]
        if pts:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=12, c=color, label=verdict)
    ax.set_yscale("log")
    ax.set_xlabel("universe bound")
    ax.set_ylabel("checker work (steps)")
    ax.legend()
    return _save(fig, path)


def size_chart(report: FuzzReport, path: Path) -> Path:
    pts = [(c.bound, c.size) for c in report.cases if c.size is not None]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if pts:
        ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=12, c=_COLORS["SAT"])
        top = max(p[0] for p in pts)
        ax.plot([0, top], [0, top], lw=0.8, c="gray")
    ax.set_xlabel("universe bound")
    ax.set_ylabel("least model size")
    return _save(fig, path)


def render_fuzz_figures(report: FuzzReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        verdict_chart(report, out / "verdicts.png"),
        work_chart(report, out / "work.png"),
        size_chart(report, out / "model_sizes.png"),
    ]
