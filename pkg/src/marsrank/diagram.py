"""Non-significance cliques and Critical Difference diagrams rendered as SVG."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import ValidationError

__all__ = [
    "CliqueSet",
    "DiagramOptions",
    "cliques_from_threshold",
    "cliques_from_pairs",
    "render_cd_diagram",
]


@dataclass(frozen=True)
class CliqueSet:
    """Maximal groups of methods that are not significantly different.

    Each clique is a sorted tuple of method indices with at least two members;
    the list is sorted lexicographically so equal sets compare equal.
    """

    cliques: tuple[tuple[int, ...], ...] = ()
    axis_min: float | None = None
    axis_max: float | None = None

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(int(m) for m in c)) for c in self.cliques))
        object.__setattr__(self, "cliques", canon)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.cliques}

    def to_dict(self) -> dict:
        out = {"cliques": [list(c) for c in self.cliques]}
        if self.axis_min is not None:
            out["axis_min"] = self.axis_min
            out["axis_max"] = self.axis_max
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "CliqueSet":
        return cls(
            tuple(tuple(c) for c in doc.get("cliques", [])),
            doc.get("axis_min"),
            doc.get("axis_max"),
        )


def _axis_bounds(scores: Sequence[float]) -> tuple[float, float]:
    return float(math.floor(min(scores))), float(math.ceil(max(scores)))


def cliques_from_threshold(scores: Sequence[float], cd: float) -> CliqueSet:
    """Cliques of the graph joining methods whose scores differ by less than ``cd``.

    The graph is an interval graph, so its maximal cliques are the maximal
    windows of score-sorted methods whose extremes differ by less than ``cd``.
    """
    s = [float(v) for v in scores]
    order = sorted(range(len(s)), key=lambda i: (s[i], i))
    cliques = []
    last_end = 0
    for start in range(len(order)):
        end = start
        while end + 1 < len(order) and s[order[end + 1]] - s[order[start]] < cd:
            end += 1
        # a window ending where the previous one ended is contained in it
        if end > start and end > last_end:
            cliques.append(tuple(order[start : end + 1]))
            last_end = end
    return CliqueSet(tuple(cliques), *_axis_bounds(s)) if s else CliqueSet()


def _bron_kerbosch(adj: list[set[int]], r: set[int], p: set[int], x: set[int], out: list):
    if not p and not x:
        out.append(tuple(sorted(r)))
        return
    pivot = max(p | x, key=lambda u: len(adj[u] & p))
    for v in sorted(p - adj[pivot]):
        _bron_kerbosch(adj, r | {v}, p & adj[v], x & adj[v], out)
        p = p - {v}
        x = x | {v}


def cliques_from_pairs(rejected, scores: Sequence[float] | None = None) -> CliqueSet:
    """Maximal cliques of the graph of *non-rejected* method pairs.

    ``rejected`` is a symmetric k x k boolean matrix; the diagonal is ignored.
    """
    rej = np.asarray(rejected, dtype=bool)
    if rej.ndim != 2 or rej.shape[0] != rej.shape[1]:
        raise ValidationError(f"rejection matrix must be square, got shape {rej.shape}")
    if not np.array_equal(rej, rej.T):
        raise ValidationError("rejection matrix must be symmetric")
    k = rej.shape[0]
    adj = [{j for j in range(k) if j != i and not rej[i, j]} for i in range(k)]
    found: list[tuple[int, ...]] = []
    _bron_kerbosch(adj, set(), set(range(k)), set(), found)
    cliques = tuple(c for c in found if len(c) >= 2)
    if scores is None:
        return CliqueSet(cliques)
    return CliqueSet(cliques, *_axis_bounds(scores))


@dataclass(frozen=True)
class DiagramOptions:
    width_px: int = 720
    height_px: int = 200
    title: str = ""
    show_cd_ruler: bool = True
    score_label: str = "average rank"
    font_family: str = field(default="sans-serif")

    def __post_init__(self):
        if self.width_px < 100 or self.height_px < 100:
            raise ValidationError("diagram dimensions must be at least 100 px")


def _num(x: float) -> str:
    return f"{x:.2f}"


def _tick_step(span: int) -> int:
    step = 1
    for candidate in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000):
        step = candidate
        if span / candidate <= 20:
            break
    return step


def render_cd_diagram(
    scores: Sequence[float],
    names: Sequence[str],
    cliques: CliqueSet,
    cd: float,
    options: DiagramOptions | None = None,
) -> str:
    """Render a Critical Difference diagram as a standalone SVG 1.1 document.

    Better (smaller) scores sit on the left.  The better half of the methods
    is labelled on the left, the rest on the right; clique bars are stacked
    under the axis.  When every score is equal the axis collapses to one tick
    and no bars are drawn.  ``options.height_px`` is a minimum; the canvas
    grows to fit the label rows.
    """
    opts = options or DiagramOptions()
    s = [float(v) for v in scores]
    k = len(s)
    if k != len(names):
        raise ValidationError(f"{k} scores but {len(names)} names")
    if k < 2:
        raise ValidationError("a diagram needs at least two methods")
    if not all(math.isfinite(v) for v in s):
        raise ValidationError("scores must be finite")

    degenerate = max(s) == min(s)
    if degenerate:
        lo = hi = s[0]
    else:
        lo, hi = _axis_bounds(s)

    W = opts.width_px
    margin = max(40.0, 0.22 * W)
    x0, x1 = margin, W - margin

    def xpos(v: float) -> float:
        if hi == lo:
            return 0.5 * (x0 + x1)
        return x0 + (v - lo) / (hi - lo) * (x1 - x0)

    bars = [] if degenerate else list(cliques.cliques)
    show_ruler = opts.show_cd_ruler and cd > 0 and not degenerate
    y = 14.0
    y_title = y + 4 if opts.title else None
    if opts.title:
        y += 22
    y_ruler = y + 12 if show_ruler else None
    if show_ruler:
        y += 26
    y_axis = y + 22
    y_bar0 = y_axis + 14
    bar_gap = 8
    y_row0 = y_bar0 + len(bars) * bar_gap + 12
    row_gap = 20
    order = sorted(range(k), key=lambda i: (s[i], i))
    n_left = (k + 1) // 2
    left, right = order[:n_left], order[n_left:]
    rows = max(len(left), len(right))
    H = max(opts.height_px, int(math.ceil(y_row0 + (rows - 1) * row_gap + 30)))

    font = quoteattr(opts.font_family)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family={font} font-size="12">',
        f'<rect class="background" x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]
    if opts.title:
        out.append(
            f'<text class="title" x="{_num(W / 2)}" y="{_num(y_title)}" text-anchor="middle" '
            f'font-size="14">{escape(opts.title)}</text>'
        )

    if show_ruler:
        rx0, rx1 = x0, x0 + cd * (x1 - x0) / (hi - lo)
        out.append('<g class="cd-ruler">')
        out.append(f'<line x1="{_num(rx0)}" y1="{_num(y_ruler)}" x2="{_num(rx1)}" y2="{_num(y_ruler)}" stroke="black" stroke-width="1.5"/>')
        for rx in (rx0, rx1):
            out.append(f'<line x1="{_num(rx)}" y1="{_num(y_ruler - 4)}" x2="{_num(rx)}" y2="{_num(y_ruler + 4)}" stroke="black"/>')
        out.append(
            f'<text x="{_num(0.5 * (rx0 + rx1))}" y="{_num(y_ruler - 7)}" text-anchor="middle">CD = {cd:.3f}</text>'
        )
        out.append("</g>")

    out.append(f'<line class="axis" x1="{_num(x0)}" y1="{_num(y_axis)}" x2="{_num(x1)}" y2="{_num(y_axis)}" stroke="black"/>')
    if degenerate:
        ticks = [lo]
        labelled = {lo}
    else:
        ticks = [float(t) for t in range(int(lo), int(hi) + 1)]
        step = _tick_step(int(hi - lo))
        labelled = {t for t in ticks if (t - lo) % step == 0 or t == hi}
    for t in ticks:
        tx = xpos(t)
        out.append(f'<line class="tick" x1="{_num(tx)}" y1="{_num(y_axis - 5)}" x2="{_num(tx)}" y2="{_num(y_axis)}" stroke="black"/>')
        if t in labelled:
            label = f"{t:g}" if float(t).is_integer() else _num(t)
            out.append(f'<text class="tick-label" x="{_num(tx)}" y="{_num(y_axis - 8)}" text-anchor="middle">{label}</text>')
    if opts.score_label:
        out.append(
            f'<text class="axis-label" x="{_num(x1 + 6)}" y="{_num(y_axis + 4)}" font-size="10" '
            f'fill="#555">{escape(opts.score_label)}</text>'
        )

    for b, members in enumerate(sorted(bars, key=lambda c: (min(s[m] for m in c), c))):
        bx0 = xpos(min(s[m] for m in members)) - 3
        bx1 = xpos(max(s[m] for m in members)) + 3
        by = y_bar0 + b * bar_gap
        out.append(
            f'<line class="clique-bar" x1="{_num(bx0)}" y1="{_num(by)}" x2="{_num(bx1)}" y2="{_num(by)}" '
            f'stroke="black" stroke-width="4" stroke-linecap="round"/>'
        )

    def method_group(idx: int, row: int, side: str) -> None:
        mx = xpos(s[idx])
        my = y_row0 + row * row_gap
        if side == "left":
            lx, anchor, sx, label_x = x0 - 10, "end", x0 - 4, x0 - 14
        else:
            lx, anchor, sx, label_x = x1 + 10, "start", x1 + 4, x1 + 14
        out.append(f'<g class="method" data-index="{idx}" data-x="{_num(mx)}">')
        out.append(
            f'<polyline class="connector" points="{_num(mx)},{_num(y_axis)} {_num(mx)},{_num(my)} {_num(lx)},{_num(my)}" '
            f'fill="none" stroke="black"/>'
        )
        out.append(f'<text class="method-score" x="{_num(sx)}" y="{_num(my - 3)}" text-anchor="{anchor}" font-size="9">{_num(s[idx])}</text>')
        out.append(f'<text class="method-label" x="{_num(label_x)}" y="{_num(my + 4)}" text-anchor="{anchor}">{escape(str(names[idx]))}</text>')
        out.append("</g>")

    for row, idx in enumerate(left):
        method_group(idx, row, "left")
    # right side mirrors the left: the worst method takes the top row
    for row, idx in enumerate(reversed(right)):
        method_group(idx, row, "right")

    out.append("</svg>")
    return "\n".join(out) + "\n"
