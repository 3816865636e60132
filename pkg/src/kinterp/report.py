"""Report artifacts: JSONL streams, CSV summaries and ratio-band SVG plots.

The SVG emitter is deliberately minimal (log-x axis, one polyline per
report plus threshold guides) so artifact generation stays dependency-free
and byte-reproducible.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterable

from .verify import EquivalenceReport


def read_jsonl(path: str) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_reiteration_csv(report: EquivalenceReport, path: str, u_count: int):
    """Per-member certification table plus a machine-readable verdict line."""
    with open(path, "w") as fh:
        fh.write("member_id,u_count,lhs,rhs,ratio_min,ratio_max,spread,stable\n")
        stable = ""
        if report.refinement is not None:
            stable = str(report.refinement[1] <= 1.5 * report.refinement[0]).lower()
        for mid, lhs, rhs, ratio in report.samples:
            fh.write(f"{mid},{u_count},{lhs!r},{rhs!r},{report.ratio_min!r},"
                     f"{report.ratio_max!r},{report.spread!r},{stable}\n")
        fh.write(f"#verdict,{report.verdict},spread,{report.spread!r},"
                 f"threshold,{report.threshold!r}\n")


def _svg_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def ratio_band_svg(report: EquivalenceReport, path: str,
                   width: int = 640, height: int = 360):
    """Ratio samples against their index (log-ratio y axis) with the
    threshold band; purely textual SVG output."""
    pts = [(i, s[3]) for i, s in enumerate(report.samples)
           if math.isfinite(s[3]) and s[3] > 0.0]
    margin = 40
    w, h = width - 2 * margin, height - 2 * margin
    if pts:
        ys = [math.log10(r) for _, r in pts]
        ymin, ymax = min(ys), max(ys)
        if report.threshold > 1.0 and math.isfinite(report.threshold):
            ymax = max(ymax, math.log10(report.threshold) / 2)
            ymin = min(ymin, -math.log10(report.threshold) / 2)
        if ymax - ymin < 1e-9:
            ymin, ymax = ymin - 0.5, ymax + 0.5
        xs = [p[0] for p in pts]
        xmin, xmax = min(xs), max(xs)
        span = max(xmax - xmin, 1)

        def sx(x):
            return margin + w * (x - xmin) / span

        def sy(y):
            return margin + h * (ymax - y) / (ymax - ymin)

        line = " ".join(f"{sx(x):.2f},{sy(math.log10(r)):.2f}" for x, r in pts)
    else:
        line = ""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{margin}" y="20" font-size="12" font-family="monospace">'
        f'{_svg_escape(report.label)} [{report.verdict}] spread={report.spread:.3g}</text>',
    ]
    if pts:
        y1 = sy(0.0)
        parts.append(f'<line x1="{margin}" y1="{y1:.2f}" x2="{width - margin}" y2="{y1:.2f}" '
                     'stroke="#999" stroke-dasharray="4 3"/>')
        parts.append(f'<polyline points="{line}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def emit_artifacts(reports: Iterable[EquivalenceReport], out_dir: str,
                   prefix: str = "report") -> list:
    """JSONL + CSV summary + one SVG per report; returns written paths."""
    from .verify import write_csv_summary, write_jsonl
    os.makedirs(out_dir, exist_ok=True)
    reports = list(reports)
    paths = []
    jl = os.path.join(out_dir, f"{prefix}.jsonl")
    write_jsonl(reports, jl)
    paths.append(jl)
    cs = os.path.join(out_dir, f"{prefix}.csv")
    write_csv_summary(reports, cs)
    paths.append(cs)
    for i, rep in enumerate(reports):
        safe = "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in rep.label)[:80]
        sp = os.path.join(out_dir, f"{prefix}_{i:03d}_{safe}.svg")
        ratio_band_svg(rep, sp)
        paths.append(sp)
    return paths
