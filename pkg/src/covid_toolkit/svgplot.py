"""Minimal deterministic SVG emitters for the report CLI.

Hand-rolled on purpose: identical inputs must yield byte-identical files, so
no plotting library (with its embedded version strings and timestamps) is
involved.  Three chart types cover the report surface: a trend panel (bars +
moving-average line + forecast ribbon), a horizontal bar chart, and an ROC
panel.
"""

from __future__ import annotations

import json

WIDTH = 860
HEIGHT = 420
MARGIN = 55


def _fmt(x: float) -> str:
    return format(float(x), ".2f")


def _header(title: str, provenance: dict | None) -> list[str]:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
    ]
    if provenance is not None:
        desc = json.dumps(provenance, sort_keys=True)
        lines.append(f"<desc>{_escape(desc)}</desc>")
    lines.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    lines.append(
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{_escape(title)}</text>'
    )
    return lines


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


class _Scale:
    """Affine map from data space onto the plot rectangle."""

    def __init__(self, lo: float, hi: float, out_lo: float, out_hi: float):
        if hi == lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.out_lo, self.out_hi = out_lo, out_hi

    def __call__(self, value: float) -> float:
        frac = (value - self.lo) / (self.hi - self.lo)
        return self.out_lo + frac * (self.out_hi - self.out_lo)


def _axes(x_label: str, y_label: str, y_lo: float, y_hi: float) -> list[str]:
    bottom = HEIGHT - MARGIN
    parts = [
        f'<line x1="{MARGIN}" y1="{bottom}" x2="{WIDTH - MARGIN}" '
        f'y2="{bottom}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{bottom}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>',
        f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {HEIGHT // 2})">{_escape(y_label)}</text>',
        f'<text x="{MARGIN - 6}" y="{bottom}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_lo)}</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{_fmt(y_hi)}</text>',
    ]
    return parts


def trend_svg(increments, sma_offset: int, sma_values,
              point, lower, upper, title: str,
              provenance: dict | None = None) -> str:
    """Daily-increment bars, moving-average line, and forecast ribbon.

    `sma_offset` is the index of the first increment the moving average
    covers; the forecast segment starts right after the last increment.
    """
    n_hist = len(increments)
    n_total = n_hist + len(point)
    values = list(increments) + list(lower) + list(upper) + list(sma_values)
    y_lo = min(0.0, min(values))
    y_hi = max(values)
    x_scale = _Scale(0, max(n_total - 1, 1), MARGIN, WIDTH - MARGIN)
    y_scale = _Scale(y_lo, y_hi, HEIGHT - MARGIN, MARGIN)

    parts = _header(title, provenance)
    parts += _axes("day index", "daily new count", y_lo, y_hi)

    bar_width = max(1.0, (WIDTH - 2 * MARGIN) / max(n_total, 1) * 0.8)
    zero_y = y_scale(0.0)
    for i, value in enumerate(increments):
        x = x_scale(i) - bar_width / 2.0
        top = y_scale(max(value, 0.0))
        height = abs(zero_y - y_scale(value))
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(min(top, zero_y))}" '
            f'width="{_fmt(bar_width)}" height="{_fmt(height)}" '
            f'fill="orange" fill-opacity="0.6"/>'
        )

    if len(sma_values):
        pts = " ".join(
            f"{_fmt(x_scale(sma_offset + i))},{_fmt(y_scale(v))}"
            for i, v in enumerate(sma_values)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="black" '
                     f'stroke-width="1.5"/>')

    if len(point):
        ribbon = [(x_scale(n_hist + i), y_scale(v)) for i, v in enumerate(upper)]
        ribbon += [(x_scale(n_hist + i), y_scale(v))
                   for i, v in reversed(list(enumerate(lower)))]
        poly = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in ribbon)
        parts.append(f'<polygon points="{poly}" fill="orange" '
                     f'fill-opacity="0.25" stroke="none"/>')
        pts = " ".join(
            f"{_fmt(x_scale(n_hist + i))},{_fmt(y_scale(v))}"
            for i, v in enumerate(point)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="grey" '
                     f'stroke-width="1.5" stroke-dasharray="4 3"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def horizontal_bar_svg(labels, values, title: str, x_label: str,
                       provenance: dict | None = None) -> str:
    """Horizontal bar chart, one bar per label, values ascending downward."""
    parts = _header(title, provenance)
    n = len(labels)
    v_hi = max(values) if n else 1.0
    x_scale = _Scale(0.0, v_hi, MARGIN + 150, WIDTH - MARGIN)
    row_height = (HEIGHT - 2 * MARGIN) / max(n, 1)
    bar_height = row_height * 0.7
    for i, (label, value) in enumerate(zip(labels, values)):
        y = MARGIN + i * row_height
        parts.append(
            f'<text x="{MARGIN + 144}" y="{_fmt(y + bar_height / 2 + 4)}" '
            f'text-anchor="end" font-family="sans-serif" font-size="11">'
            f"{_escape(str(label))}</text>"
        )
        parts.append(
            f'<rect x="{MARGIN + 150}" y="{_fmt(y)}" '
            f'width="{_fmt(max(0.0, x_scale(value) - (MARGIN + 150)))}" '
            f'height="{_fmt(bar_height)}" fill="steelblue"/>'
        )
        parts.append(
            f'<text x="{_fmt(x_scale(value) + 4)}" '
            f'y="{_fmt(y + bar_height / 2 + 4)}" font-family="sans-serif" '
            f'font-size="10">{_fmt(value)}</text>'
        )
    parts.append(
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_escape(x_label)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def roc_svg(points, auroc: float, title: str,
            provenance: dict | None = None) -> str:
    """ROC curve with the chance diagonal and the AUROC printed."""
    parts = _header(title, provenance)
    x_scale = _Scale(0.0, 1.0, MARGIN, WIDTH - MARGIN)
    y_scale = _Scale(0.0, 1.0, HEIGHT - MARGIN, MARGIN)
    parts += _axes("false positive rate", "true positive rate", 0.0, 1.0)
    parts.append(
        f'<line x1="{_fmt(x_scale(0))}" y1="{_fmt(y_scale(0))}" '
        f'x2="{_fmt(x_scale(1))}" y2="{_fmt(y_scale(1))}" stroke="lightgrey" '
        f'stroke-dasharray="5 4"/>'
    )
    pts = " ".join(f"{_fmt(x_scale(fpr))},{_fmt(y_scale(tpr))}"
                   for fpr, tpr in points)
    parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" '
                 f'stroke-width="2"/>')
    parts.append(
        f'<text x="{WIDTH - MARGIN - 8}" y="{HEIGHT - MARGIN - 12}" '
        f'text-anchor="end" font-family="sans-serif" font-size="13">'
        f"AUROC = {format(auroc, '.4f')}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
