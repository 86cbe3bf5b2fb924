"""Curve export: CSV vertex tables and SVG drawings."""

from __future__ import annotations

import csv
import io

from .trace import CurveSet

CSV_COLUMNS = ("curve_id", "vertex_index", "x", "y", "residual")
SVG_SIZE = 800


def curves_to_csv(cs: CurveSet, out=None) -> str:
    """Write one row per vertex; returns the text (and writes to ``out`` if given)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for cid, (pts, res) in enumerate(zip(cs.curves, cs.residuals)):
        for k, ((x, y), r) in enumerate(zip(pts, res)):
            w.writerow((cid, k, f"{x:.12g}", f"{y:.12g}", f"{r:.3e}"))
    text = buf.getvalue()
    if out is not None:
        _write(out, text)
    return text


def curves_to_svg(cs: CurveSet, out=None, *, size: int = SVG_SIZE, stroke: str = "#1f4e9c",
                  title: str | None = None) -> str:
    """One path per polyline; the window is mapped onto a size x size viewport (y upwards)."""
    x0, x1, y0, y1 = (float(v) for v in cs.window)
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def pt(x, y):
        return f"{(x - x0) * sx:.2f},{(y1 - y) * sy:.2f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        lines.append(f"  <title>{_escape(title)}</title>")
    lines.append(f'  <rect width="{size}" height="{size}" fill="white"/>')
    for pts, closed in zip(cs.curves, cs.closed):
        d = "M " + " L ".join(pt(x, y) for x, y in pts) + (" Z" if closed else "")
        lines.append(f'  <path d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5"/>')
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if out is not None:
        _write(out, text)
    return text


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _write(out, text):
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
