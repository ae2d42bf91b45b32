"""Serialization of study reports to CSV, JSON and self-contained SVG figures."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .. import __version__
from .config import ConfigError

FORMATS = ("csv", "json", "svg")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else "%.17g" % value
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.header)
    for record in report.records():
        writer.writerow([_cell(v) for v in record])
    return buf.getvalue()


def read_csv(text: str):
    """Parse emitted CSV back into header and rows (numbers as int/float, empty cells as None)."""
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    rows = []
    for raw in reader:
        row = []
        for cell in raw:
            if cell == "":
                row.append(None)
                continue
            try:
                row.append(int(cell))
            except ValueError:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(tuple(row))
    return header, rows


def to_json(report) -> str:
    doc = {
        "tool": "mixediga",
        "version": __version__,
        "kind": report.kind,
        "config": report.config.as_dict(),
        "header": list(report.header),
        "rows": [{k: _json_value(v) for k, v in zip(report.header, rec)} for rec in report.records()],
    }
    return json.dumps(doc, indent=2) + "\n"


# -- SVG ------------------------------------------------------------------------------


def _ticks(lo, hi, log):
    if log:
        return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1)]
    step = 10 ** math.floor(math.log10(max(hi - lo, 1e-300)))
    if (hi - lo) / step < 3:
        step /= 5
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def svg_figure(series, title="", xlabel="", ylabel="", xlog=True, ylog=True,
               width=640, height=480) -> str:
    """Line plot with one ``<polyline>`` per ``(label, xs, ys)`` series.

    Nonpositive values are dropped on logarithmic axes.
    """
    margin = (70, 30, 40, 55)  # left, right, top, bottom

    def tx(v):
        return math.log10(v) if xlog else v

    def ty(v):
        return math.log10(v) if ylog else v

    cleaned = []
    for label, xs, ys in series:
        pts = [(tx(float(x)), ty(float(y))) for x, y in zip(xs, ys)
               if (not xlog or x > 0) and (not ylog or y > 0) and math.isfinite(float(y))]
        cleaned.append((label, pts))
    allpts = [pt for _, pts in cleaned for pt in pts] or [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allpts), max(p[0] for p in allpts)
    y0, y1 = min(p[1] for p in allpts), max(p[1] for p in allpts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = width - margin[0] - margin[1]
    ph = height - margin[2] - margin[3]

    def sx(v):
        return margin[0] + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return margin[2] + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin[0]}" y="{margin[2]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1, xlog):
        v = math.log10(t) if xlog else t
        if x0 - 1e-9 <= v <= x1 + 1e-9:
            out.append(f'<line x1="{sx(v):.2f}" y1="{margin[2] + ph}" x2="{sx(v):.2f}" y2="{margin[2] + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(v):.2f}" y="{margin[2] + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1, ylog):
        v = math.log10(t) if ylog else t
        if y0 - 1e-9 <= v <= y1 + 1e-9:
            out.append(f'<line x1="{margin[0] - 5}" y1="{sy(v):.2f}" x2="{margin[0]}" y2="{sy(v):.2f}" stroke="black"/>')
            out.append(f'<text x="{margin[0] - 8}" y="{sy(v) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{width / 2}" y="{margin[2] - 12}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{margin[0] + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{margin[2] + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {margin[2] + ph / 2})">{escape(ylabel)}</text>')
    for k, (label, pts) in enumerate(cleaned):
        color = PALETTE[k % len(PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
                   f'<title>{escape(label)}</title></polyline>')
        ly = margin[2] + 16 + 16 * k
        out.append(f'<line x1="{margin[0] + pw - 120}" y1="{ly}" x2="{margin[0] + pw - 100}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{margin[0] + pw - 95}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def convergence_figures(report):
    """``{j: svg}``: error against ``h`` with one series per ``(p, rule)``."""
    figures = {}
    for j in report.config.eigen_indices:
        series = []
        for p in report.config.p_list:
            for rule in report.config.rules:
                rows = [r for r in report.data_rows() if (r.p, r.rule, r.j) == (p, rule, j)]
                series.append((f"p={p} {rule}", [1.0 / r.N for r in rows], [r.rel_error for r in rows]))
        figures[j] = svg_figure(series, f"{report.config.op.label()}: relative error of eigenvalue {j}",
                                "h", "relative error")
    return figures


def spectrum_figure(report) -> str:
    series = [(f"p={c.p} {c.rule}", c.x, c.errors) for c in report.curves]
    return svg_figure(series, f"{report.config.op.label()}: relative error over the spectrum",
                      "j / count", "relative error", xlog=False)


def emit(report, fmt: str, path) -> list[Path]:
    """Write ``report`` as ``fmt`` to ``path``; returns the files written.

    Convergence reports with several eigenvalue indices produce one SVG per
    index, named ``<stem>_j<index>.svg``.
    """
    if fmt not in FORMATS:
        raise ConfigError("outputs", f"format must be one of {FORMATS}, got {fmt!r}")
    if not report.records():
        raise ValueError("nothing to emit: the report is empty")
    path = Path(path)
    if fmt == "csv":
        files = {path: to_csv(report)}
    elif fmt == "json":
        files = {path: to_json(report)}
    elif report.kind == "spectrum":
        files = {path: spectrum_figure(report)}
    elif report.kind == "convergence":
        figs = convergence_figures(report)
        if len(figs) == 1:
            files = {path: next(iter(figs.values()))}
        else:
            files = {path.with_name(f"{path.stem}_j{j}{path.suffix}"): svg for j, svg in figs.items()}
    else:
        raise ConfigError("outputs", f"svg output is not available for {report.kind} reports")
    written = []
    for target, text in files.items():
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
        written.append(target)
    return written
