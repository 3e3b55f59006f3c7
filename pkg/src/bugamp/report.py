"""Render experiment records into CSV tables, JSON summaries, and small
SVG charts.  Output is byte-stable: fixed float formatting, sorted keys,
no timestamps, so re-running over the same records reproduces every file
exactly.
"""

from __future__ import annotations

import json
import math
import os
from collections import defaultdict

from .errors import TooFewPairs
from .stats import aggregate, significance_table, wilcoxon_one_sided, verdict_for

METHOD_ORDER = ("bf", "sa", "ga", "ens")
_COLORS = {"bf": "#c0392b", "sa": "#27ae60", "ga": "#e67e22", "ens": "#2980b9"}


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.6g}"


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def records_csv(records) -> str:
    lines = ["method,problem,trial,checkpoint,spent,best_score,fifth_score,"
             "tenth_score,best_params_json"]
    for r in records:
        params = json.dumps(list(r.best_params)) if r.best_params else "[]"
        lines.append(",".join([
            r.method, r.problem, str(r.trial), str(r.checkpoint),
            str(r.spent), _fmt(r.best_score), _fmt(r.fifth_score),
            _fmt(r.tenth_score), f'"{params}"']))
    return "\n".join(lines) + "\n"


def validations_csv(validations) -> str:
    lines = ["method,problem,trial,rank,score,runs,params_json"]
    for v in validations:
        params = json.dumps(list(v.params))
        lines.append(",".join([
            v.method, v.problem, str(v.trial), str(v.rank), _fmt(v.score),
            str(v.runs), f'"{params}"']))
    return "\n".join(lines) + "\n"


def _group_by_checkpoint(records):
    """(problem, method) -> checkpoint -> [best scores]."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[(r.problem, r.method)][r.checkpoint].append(r.best_score)
    return groups


def summary_rows(records):
    groups = _group_by_checkpoint(records)
    rows = []
    for (problem, method) in sorted(groups):
        for checkpoint in sorted(groups[(problem, method)]):
            agg = aggregate(groups[(problem, method)][checkpoint])
            rows.append((problem, method, checkpoint, agg))
    return rows


def summary_csv(records) -> str:
    lines = ["problem,method,checkpoint,n,mean,sd,ci_lo,ci_hi,degenerate"]
    for problem, method, checkpoint, agg in summary_rows(records):
        lines.append(",".join([
            problem, method, str(checkpoint), str(agg.n), _fmt(agg.mean),
            _fmt(agg.sd), _fmt(agg.ci_lo), _fmt(agg.ci_hi),
            "1" if agg.degenerate else "0"]))
    return "\n".join(lines) + "\n"


def aggregate_curves_csv(records) -> str:
    """Mean over problems of the per-problem mean best score, per method
    and checkpoint."""
    groups = _group_by_checkpoint(records)
    per_method = defaultdict(lambda: defaultdict(list))
    for (problem, method), by_cp in groups.items():
        for checkpoint, scores in by_cp.items():
            per_method[method][checkpoint].append(aggregate(scores).mean)
    lines = ["checkpoint,method,mean_best,n_problems"]
    checkpoints = sorted({c for by_cp in per_method.values() for c in by_cp})
    for checkpoint in checkpoints:
        for method in METHOD_ORDER:
            if method in per_method and checkpoint in per_method[method]:
                means = per_method[method][checkpoint]
                lines.append(f"{checkpoint},{method},"
                             f"{_fmt(sum(means) / len(means))},{len(means)}")
    return "\n".join(lines) + "\n"


def significance_csv(validations, problems=None) -> str:
    lines = ["problem,left,right,p_value,verdict"]
    methods_present = {v.method for v in validations}
    names = problems or sorted({v.problem for v in validations})
    if len(methods_present) >= 2:
        try:
            cells = significance_table(validations, names)
        except TooFewPairs:
            cells = _significance_cells_lenient(validations, names)
        for c in cells:
            lines.append(f"{c.problem},{c.left},{c.right},{_fmt(c.p)},"
                         f"{c.verdict.value}")
    return "\n".join(lines) + "\n"


def _significance_cells_lenient(validations, names):
    """Per-cell computation that renders untestable pairs (identical or
    missing samples) as NaN instead of failing the whole grid."""
    from .stats import COMPARISONS, SignificanceCell, Verdict
    best = defaultdict(dict)
    for v in validations:
        if v.rank == 1:
            best[(v.problem, v.method)][v.trial] = v.score
    cells = []
    for problem in names:
        for left, right in COMPARISONS:
            lx = best.get((problem, left), {})
            rx = best.get((problem, right), {})
            trials = sorted(set(lx) & set(rx))
            try:
                p = wilcoxon_one_sided([lx[t] for t in trials],
                                       [rx[t] for t in trials])
                cells.append(SignificanceCell(problem, left, right, p,
                                              verdict_for(p)))
            except TooFewPairs:
                cells.append(SignificanceCell(problem, left, right,
                                              math.nan, Verdict.GRAY))
    return cells


def _svg_line_chart(series: dict[str, list[tuple[float, float]]],
                    title: str, width=640, height=400) -> str:
    """Minimal multi-series line chart; series values in [0, 1]."""
    pad = 50
    xs = sorted({x for pts in series.values() for x, _ in pts})
    if not xs:
        xs = [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    span = (x_hi - x_lo) or 1.0

    def px(x):
        return pad + (x - x_lo) / span * (width - 2 * pad)

    def py(y):
        return height - pad - y * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        f'stroke="black"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        parts.append(f'<text x="{pad - 8}" y="{py(frac) + 4:.1f}" '
                     f'text-anchor="end" font-size="10">{frac:.1f}</text>')
    for x in (x_lo, x_hi):
        parts.append(f'<text x="{px(x):.1f}" y="{height - pad + 16}" '
                     f'text-anchor="middle" font-size="10">{x:.0f}</text>')
    legend_y = 34
    for name in METHOD_ORDER:
        if name not in series:
            continue
        pts = sorted(series[name])
        path = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
        color = _COLORS.get(name, "#555")
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{path}"/>')
        parts.append(f'<text x="{width - pad}" y="{legend_y}" fill="{color}" '
                     f'text-anchor="end" font-size="11">{name}</text>')
        legend_y += 14
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_reports(records, validations, out_dir: str,
                 problems=None) -> list[str]:
    """Write the full report bundle; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    plots_dir = os.path.join(out_dir, "plots")
    summaries_dir = os.path.join(out_dir, "summaries")
    curves_dir = os.path.join(out_dir, "curves")
    for d in (plots_dir, summaries_dir, curves_dir):
        os.makedirs(d, exist_ok=True)
    written = []

    def emit(path, text):
        _write(path, text)
        written.append(path)

    emit(os.path.join(out_dir, "records.csv"), records_csv(records))
    emit(os.path.join(out_dir, "validation.csv"), validations_csv(validations))
    emit(os.path.join(out_dir, "summary.csv"), summary_csv(records))
    emit(os.path.join(out_dir, "aggregate_curves.csv"),
         aggregate_curves_csv(records))
    emit(os.path.join(out_dir, "significance.csv"),
         significance_csv(validations, problems))

    rows = summary_rows(records)
    names = sorted({problem for problem, _, _, _ in rows})

    by_pair = defaultdict(list)
    for problem, method, checkpoint, agg in rows:
        by_pair[(problem, method)].append((checkpoint, agg))
    for (problem, method), entries in sorted(by_pair.items()):
        payload = {
            "problem": problem,
            "method": method,
            "checkpoints": [
                {"checkpoint": cp, "n": a.n, "mean": a.mean, "sd": a.sd,
                 "ci": [a.ci_lo, a.ci_hi], "degenerate": a.degenerate}
                for cp, a in sorted(entries)],
        }
        emit(os.path.join(summaries_dir, f"{problem}_{method}.json"),
             json.dumps(payload, indent=2, sort_keys=True) + "\n")

    for problem in names:
        series = {}
        lines = ["checkpoint,method,mean,sd"]
        for (p, method), entries in sorted(by_pair.items()):
            if p != problem:
                continue
            series[method] = [(cp, a.mean) for cp, a in sorted(entries)]
            for cp, a in sorted(entries):
                lines.append(f"{cp},{method},{_fmt(a.mean)},{_fmt(a.sd)}")
        emit(os.path.join(curves_dir, f"{problem}.csv"),
             "\n".join(lines) + "\n")
        emit(os.path.join(plots_dir, f"{problem}.svg"),
             _svg_line_chart(series, f"{problem}: best score vs executions"))

    agg_series = defaultdict(list)
    for line in aggregate_curves_csv(records).splitlines()[1:]:
        checkpoint, method, mean, _ = line.split(",")
        agg_series[method].append((float(checkpoint), float(mean)))
    emit(os.path.join(plots_dir, "aggregate.svg"),
         _svg_line_chart(dict(agg_series), "Mean best score across problems"))
    return written
