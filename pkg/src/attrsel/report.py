"""Report emission: CSV, JSON and markdown files written atomically."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .consensus import SelectionRun, VoteTally, sorted_entries
from .evaluation import ComparisonTable
from .filters import RankedList


class ReportError(RuntimeError):
    pass


def fmt(x) -> str:
    """Six significant digits, the format used in every emitted table."""
    return f"{x:.6g}"


def round6(x: float) -> float:
    return float(fmt(x))


@dataclass
class PipelineResults:
    """Everything a report needs; any part may be absent for partial runs."""

    seed: int
    config: dict | None = None
    dataset: dict | None = None
    method: str | None = None
    run: SelectionRun | None = None
    tally: VoteTally | None = None
    subset: tuple[str, ...] | None = None
    comparison: ComparisonTable | None = None
    rankings: tuple[RankedList, ...] = ()
    extra: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return self.tally is None and self.comparison is None and not self.rankings


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def selection_rows(res: PipelineResults):
    chosen = set(res.subset or ())
    if res.tally.kind == "filters":
        header = ["attribute", "votes", "average_rank", "selected"]
        rows = [[e.attribute, e.count, "" if e.average_rank is None else fmt(e.average_rank),
                 int(e.attribute in chosen)] for e in sorted_entries(res.tally)]
    else:
        header = ["attribute", "vote_percent", "selected"]
        rows = [[e.attribute, fmt(100 * e.votes), int(e.attribute in chosen)] for e in sorted_entries(res.tally)]
    return header, rows


def comparison_rows(table: ComparisonTable):
    header = ["subset", "n", "algorithm", "accuracy", "precision", "recall", "f_measure"]
    rows = [[d["subset"], d["n"], d["algorithm"]] + [fmt(d[k]) for k in header[3:]]
            for d in (r.as_dict() for r in table.rows)]
    return header, rows


def trace_rows(run: SelectionRun):
    label = "generation" if run.kind == "ga" else "step"
    header = ["round", label, "best_fitness", "mean_fitness", "n_selected"]
    rows = []
    for i, r in enumerate(run.rounds):
        if r.trace is None:
            continue
        for t in r.trace.records:
            rows.append([i, t.step, fmt(t.best_fitness), fmt(t.mean_fitness), len(t.best_subset)])
    return header, rows


def ranking_rows(rankings):
    header = ["method", "attribute", "merit", "rank"]
    rows = [[r.method.value, e.attribute, fmt(e.merit), e.rank] for r in rankings for e in r.entries]
    return header, rows


def _json_value(x):
    if isinstance(x, float):
        return round6(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def report_dict(res: PipelineResults) -> dict:
    out = {"seed": res.seed}
    if res.config is not None:
        out["config"] = res.config
    if res.dataset is not None:
        out["dataset"] = res.dataset
    if res.tally is not None:
        sel = {"method": res.method, "subset": list(res.subset or ())}
        sel["votes"] = {e.attribute: (e.count if res.tally.kind == "filters" else e.votes)
                        for e in res.tally.entries}
        if res.tally.kind == "filters":
            sel["average_rank"] = {e.attribute: e.average_rank for e in res.tally.entries}
        if res.run is not None:
            sel["rounds"] = [sorted(s) for s in res.run.selected]
        out["selection"] = sel
    if res.rankings:
        out["rankings"] = {r.method.value: [[e.attribute, e.merit, e.rank] for e in r.entries]
                           for r in res.rankings}
    if res.comparison is not None:
        rows = []
        for r in res.comparison.rows:
            d = r.as_dict()
            d["per_class"] = {k: v for k, v in r.metrics.as_dict().items()
                              if k in ("precision", "recall", "f1", "support")}
            rows.append(d)
        out["comparison"] = rows
        out["best"] = res.comparison.ranking()[0].as_dict()
    out.update(res.extra)
    return _json_value(out)


def _md_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def markdown_report(res: PipelineResults) -> str:
    parts = ["# Attribute selection report\n", f"Seed: {res.seed}\n"]
    if res.tally is not None:
        chosen = set(res.subset or ())
        entries = [e for e in sorted_entries(res.tally) if e.attribute in chosen]
        parts.append(f"## Selected attributes ({res.method}, {len(entries)})\n")
        if res.tally.kind == "filters":
            parts.append(_md_table(["Attribute", "Votes", "Average Rank"],
                                   [[e.attribute, e.count, fmt(e.average_rank)] for e in entries]))
        else:
            parts.append(_md_table(["Attribute", "Votes"],
                                   [[e.attribute, f"{fmt(100 * e.votes)}%"] for e in entries]))
    if res.rankings:
        for r in res.rankings:
            parts.append(f"## Ranking: {r.method.value}\n")
            parts.append(_md_table(["Rank", "Attribute", "Merit"],
                                   [[e.rank, e.attribute, fmt(e.merit)] for e in r.entries]))
    if res.comparison is not None:
        parts.append("## Classification comparison\n")
        rows = [[r.subset, r.n_attributes, r.algorithm, fmt(r.metrics.accuracy), fmt(r.metrics.weighted_precision),
                 fmt(r.metrics.weighted_recall), fmt(r.metrics.weighted_f1)] for r in res.comparison.rows]
        parts.append(_md_table(["Subset", "N", "Algorithm", "Accuracy", "Precision", "Recall", "F-measure"], rows))
    return "\n".join(parts)


def render(res: PipelineResults, fmt_name: str) -> dict[str, str]:
    """File name to content for one output format."""
    if res.is_empty():
        raise ReportError("no results to report")
    if fmt_name == "json":
        return {"report.json": json.dumps(report_dict(res), indent=2, ensure_ascii=False) + "\n"}
    if fmt_name == "markdown":
        return {"report.md": markdown_report(res)}
    if fmt_name == "csv":
        files = {}
        if res.tally is not None:
            files["selection.csv"] = _csv_text(*selection_rows(res))
        if res.run is not None and any(r.trace is not None for r in res.run.rounds):
            files["trace.csv"] = _csv_text(*trace_rows(res.run))
        if res.rankings:
            files["rankings.csv"] = _csv_text(*ranking_rows(res.rankings))
        if res.comparison is not None:
            files["comparison.csv"] = _csv_text(*comparison_rows(res.comparison))
            files["chart.csv"] = _csv_text(["label", "accuracy", "weighted_f1"],
                                           [[lbl, fmt(a), fmt(f)] for lbl, a, f in res.comparison.chart_data()])
        return files
    raise ReportError(f"unknown report format {fmt_name!r}")


def write_atomic(files: dict[str, str], out_dir: str | Path) -> list[Path]:
    """Write every file to a temporary name first, then rename them all into place."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create output directory {out_dir}: {exc}") from exc
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.chmod(tmp, 0o644)
            staged.append((tmp, out_dir / name))
    except OSError as exc:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise ReportError(f"cannot write to {out_dir}: {exc}") from exc
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


def emit_report(res: PipelineResults, formats=("json", "csv", "markdown"), out_dir: str | Path = ".") -> list[Path]:
    """Render all requested formats, then write them; nothing is written if rendering fails."""
    if isinstance(formats, str):
        formats = (formats,)
    files = {}
    for f in formats:
        files.update(render(res, f))
    return write_atomic(files, out_dir)
