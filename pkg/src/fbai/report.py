"""Markdown summaries and self-contained SVG plots of a run directory."""

from __future__ import annotations

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .harness import AggregateRow, SchemaError, read_aggregate

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")
ALGO_TITLES = {
    "ours": "Ours",
    "f-first": "F-first",
    "p-first": "P-first",
    "tf-lucb-c": "TF-LUCB-C",
    "naive": "Naive",
}


def _title(algo: str) -> str:
    return ALGO_TITLES.get(algo, algo)


def _num(v: float, digits: int = 2) -> str:
    return "n/a" if v is None or math.isnan(v) else f"{v:.{digits}f}"


def _groups(rows: list[AggregateRow]) -> tuple[list[tuple[str, float]], list[str]]:
    keys, algos = [], []
    for r in rows:
        if (r.instance, r.delta) not in keys:
            keys.append((r.instance, r.delta))
        if r.algo not in algos:
            algos.append(r.algo)
    return keys, algos


def relative_table(rows: list[AggregateRow]) -> str:
    """Instances as rows, algorithms as columns, mean samples relative to ours."""
    keys, algos = _groups(rows)
    cell = {(r.instance, r.delta, r.algo): r for r in rows}
    show_delta = len({d for _, d in keys}) > 1
    head = ["Instance"] + (["delta"] if show_delta else []) + [_title(a) for a in algos]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for inst, d in keys:
        vals = []
        for a in algos:
            r = cell.get((inst, d, a))
            vals.append(_num(r.relative_to_ours) if r else "")
        lines.append("| " + " | ".join([inst] + ([f"{d:.0e}"] if show_delta else []) + vals) + " |")
    return "\n".join(lines)


def samples_table(rows: list[AggregateRow]) -> str:
    head = ["Instance", "delta", "Algorithm", "reps", "mean samples", "std", "mean epochs", "correct", "capped"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for r in rows:
        lines.append("| " + " | ".join([
            r.instance, f"{r.delta:g}", _title(r.algo), str(r.reps),
            _num(r.mean_samples, 1), _num(r.std_samples, 1), _num(r.mean_epochs, 1),
            str(r.correct_count), str(r.capped_count),
        ]) + " |")
    return "\n".join(lines)


# -- SVG -------------------------------------------------------------------

def _decade_label(x: float) -> str:
    e = round(math.log10(x))
    if math.isclose(x, 10.0 ** e, rel_tol=1e-9):
        return f"1e{e}"
    return f"{x:g}"


def line_plot_svg(
    series: dict[str, list[tuple[float, float, float]]],
    *,
    xlabel: str,
    ylabel: str = "mean samples",
    title: str = "",
    log_x: bool = False,
    width: int = 640,
    height: int = 420,
) -> str:
    """Line plot with symmetric error bars.

    ``series`` maps a name to ``(x, mean, std)`` points; each error bar
    spans ``mean - std`` to ``mean + std``.  Tick marks sit at the x values
    of the data.
    """
    ml, mr, mt, mb = 95, 130, 40, 55
    pw, ph = width - ml - mr, height - mt - mb
    xs = sorted({p[0] for pts in series.values() for p in pts})
    if not xs:
        raise ValueError("nothing to plot")
    tx = (lambda v: math.log10(v)) if log_x else (lambda v: v)
    lo_x, hi_x = tx(min(xs)), tx(max(xs))
    if hi_x == lo_x:
        lo_x, hi_x = lo_x - 1, hi_x + 1
    tops = [m + s for pts in series.values() for _, m, s in pts if not math.isnan(m)]
    bots = [m - s for pts in series.values() for _, m, s in pts if not math.isnan(m)]
    lo_y, hi_y = min(0.0, min(bots, default=0.0)), max(tops, default=1.0)
    if hi_y <= lo_y:
        hi_y = lo_y + 1.0
    hi_y *= 1.05

    def px(v):
        return ml + (tx(v) - lo_x) / (hi_x - lo_x) * pw

    def py(v):
        return mt + ph - (v - lo_y) / (hi_y - lo_y) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{ml + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for x in xs:
        X = px(x)
        lab = _decade_label(x) if log_x else f"{x:g}"
        out.append(f'<line class="xtick" x1="{X:.1f}" y1="{mt + ph}" x2="{X:.1f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text class="xtick-label" x="{X:.1f}" y="{mt + ph + 18}" text-anchor="middle">{escape(lab)}</text>')
    for j in range(6):
        v = lo_y + (hi_y - lo_y) * j / 5
        Y = py(v)
        out.append(f'<line x1="{ml - 5}" y1="{Y:.1f}" x2="{ml}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{Y + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {mt + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for idx, (name, pts) in enumerate(series.items()):
        color = PALETTE[idx % len(PALETTE)]
        pts = sorted(p for p in pts if not math.isnan(p[1]))
        out.append(f'<g class="series" data-name="{escape(name)}">')
        if len(pts) > 1:
            path = " ".join(f"{px(x):.1f},{py(m):.1f}" for x, m, _ in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, m, s in pts:
            X = px(x)
            out.append(
                f'<line class="errorbar" x1="{X:.1f}" y1="{py(m - s):.1f}" x2="{X:.1f}" y2="{py(m + s):.1f}" '
                f'stroke="{color}" data-mean="{m!r}" data-std="{s!r}"/>'
            )
            for yy in (m - s, m + s):
                out.append(f'<line x1="{X - 4:.1f}" y1="{py(yy):.1f}" x2="{X + 4:.1f}" y2="{py(yy):.1f}" stroke="{color}"/>')
            out.append(f'<circle cx="{X:.1f}" cy="{py(m):.1f}" r="3" fill="{color}"/>')
        out.append("</g>")
        ly = mt + 14 + 18 * idx
        out.append(f'<line x1="{ml + pw + 12}" y1="{ly - 4}" x2="{ml + pw + 32}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 38}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- run directory ---------------------------------------------------------

SWEEP_LABELS = {"delta": "delta", "n": "number of constraints N", "k": "number of arms K"}


def _sweep_series(rows: list[AggregateRow], meta: dict) -> dict[str, list[tuple[float, float, float]]]:
    xmap = {(p["instance"], p["delta"]): p["x"] for p in meta.get("points", [])}
    series: dict[str, list] = {}
    for r in rows:
        x = xmap.get((r.instance, r.delta))
        if x is None:
            continue
        series.setdefault(_title(r.algo), []).append((float(x), r.mean_samples, r.std_samples))
    return series


def report(run_dir) -> dict[str, Path]:
    """Write ``report.md`` and, for sweeps, ``plot_<param>.svg`` into ``run_dir``."""
    run_dir = Path(run_dir)
    rows = read_aggregate(run_dir / "aggregate.csv")
    if not rows:
        raise SchemaError(f"{run_dir / 'aggregate.csv'} has no data rows")
    meta_path = run_dir / "experiment.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    files: dict[str, Path] = {}

    md = ["# Experiment summary", "", "Mean total samples relative to ours:", "", relative_table(rows), "",
          "Per-cell statistics (capped runs excluded from the means):", "", samples_table(rows), ""]
    sweep = meta.get("sweep")
    if sweep:
        series = _sweep_series(rows, meta)
        if series:
            svg = line_plot_svg(
                series,
                xlabel=SWEEP_LABELS.get(sweep, sweep),
                title=f"mean samples vs {sweep}",
                # sweep grids are geometric
                log_x=True,
            )
            path = run_dir / f"plot_{sweep}.svg"
            path.write_text(svg)
            files["plot"] = path
            md += [f"![mean samples vs {sweep}]({path.name})", ""]
    path = run_dir / "report.md"
    path.write_text("\n".join(md))
    files["markdown"] = path
    return files
