"""Markdown and CSV reports shaped like the study tables: moves as columns,
ordered by Q, with Q-value and win-probability rows."""

from __future__ import annotations

import csv
import io
from typing import Sequence

from ..evalcore.score import Score
from .ratio import interpret_ratio, leela_factor, leela_ratio
from .trial import RecordLine, SuiteRecord

CSV_COLUMNS = ["study", "engine", "move", "q_pawns", "winprob", "nodes", "ms", "depth", "solved"]


def format_q(score: Score) -> str:
    return score.display()


def format_winprob(p: float) -> str:
    """Percent with three significant figures (16.3%, 8.23%, 100%)."""
    return f"{p * 100:.3g}%"


def _ordered(lines: Sequence[RecordLine]) -> list[RecordLine]:
    return sorted(lines, key=lambda ln: ln.score.sort_key(), reverse=True)


def _table(record: SuiteRecord) -> list[str]:
    lines = _ordered(record.lines)
    if not lines:
        return ["(no lines)"]
    header = "| | " + " | ".join(f"**{ln.san}**" for ln in lines) + " |"
    rule = "|---|" + "---|" * len(lines)
    q = "| **Q-value** | " + " | ".join(format_q(ln.score) for ln in lines) + " |"
    wp = "| **Win Probability** | " + " | ".join(format_winprob(ln.winprob) for ln in lines) + " |"
    return [header, rule, q, wp]


def _compute_ratio(records: Sequence[SuiteRecord]):
    ok = [r for r in records if not r.failed and r.elapsed_ms > 0]
    ab = [r for r in ok if r.family == "ab"]
    mc = [r for r in ok if r.family == "mcts"]
    if not ab or not mc:
        return None
    ab_nodes, mc_nodes = sum(r.nodes for r in ab), sum(r.nodes for r in mc)
    ab_ms, mc_ms = sum(r.elapsed_ms for r in ab), sum(r.elapsed_ms for r in mc)
    if not (ab_nodes and mc_nodes):
        return None
    f = leela_factor(ab_nodes / ab_ms, mc_nodes / mc_ms)
    r = leela_ratio(f, mc_nodes, ab_nodes)
    mixed = len({rec.source for rec in ab + mc}) > 1
    return f, r, mixed


def render_markdown(records: Sequence[SuiteRecord]) -> str:
    out = ["# Benchmark report", ""]
    if not records:
        out += ["no trials", ""]
        return "\n".join(out)
    for rec in records:
        out.append(f"## {rec.study} / {rec.engine}")
        out.append("")
        if rec.failed:
            out += [f"failed: {rec.error}", ""]
            continue
        out += _table(rec)
        solved = "solved" if rec.solved else "not solved"
        move = rec.lines[0].san if rec.lines else "-"
        out.append("")
        out.append(f"{solved}; best {move}; depth {rec.depth}; nodes {rec.nodes}; time {rec.elapsed_ms:.0f} ms; limits {rec.limits}")
        out.append("")
    out.append("## Summary")
    out.append("")
    out.append("| Engine | Solved | Trials | Nodes | Time (ms) |")
    out.append("|---|---|---|---|---|")
    for engine in dict.fromkeys(r.engine for r in records):
        mine = [r for r in records if r.engine == engine]
        solved = sum(r.solved for r in mine)
        nodes = sum(r.nodes for r in mine)
        ms = sum(r.elapsed_ms for r in mine)
        out.append(f"| {engine} | {solved} | {len(mine)} | {nodes} | {ms:.0f} |")
    ratio = _compute_ratio(records)
    if ratio is not None:
        f, r, mixed = ratio
        out.append("")
        out.append(f"Leela Ratio: F = {f:.2f}, R = {r:.2f} ({interpret_ratio(r, gpu='the mcts family', cpu='the ab family')})")
        if mixed:
            out.append("warning: mixed sources (internal counters and engine info lines) in one ratio")
    out.append("")
    return "\n".join(out)


def render_csv(records: Sequence[SuiteRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        rows = _ordered(rec.lines) or [None]
        for ln in rows:
            w.writerow(
                [
                    rec.study,
                    rec.engine,
                    ln.san if ln else "",
                    format_q(ln.score) if ln else "",
                    f"{ln.winprob:.4f}" if ln else "",
                    rec.nodes,
                    f"{rec.elapsed_ms:.0f}",
                    rec.depth,
                    str(rec.solved).lower(),
                ]
            )
    return buf.getvalue()


def render_report(records: Sequence[SuiteRecord], fmt: str = "markdown") -> str:
    if fmt == "markdown":
        return render_markdown(records)
    if fmt == "csv":
        return render_csv(records)
    raise ValueError(f"unknown report format {fmt!r}")
