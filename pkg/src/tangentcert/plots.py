"""Deterministic SVG renderings of stage data and descent traces.

Coordinates pass through float() exactly once and are printed with fixed
precision, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .construct import StageState
from .refute import DescentTrace

_W, _H = 900, 420
_PAD = 40.0


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _scale_x(x: float) -> float:
    return _PAD + x * (_W - 2 * _PAD)


def _polyline(points: list[tuple[float, float]], color: str, width: str = "1") -> str:
    coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{coords}"/>')


def _svg(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{_H}" viewBox="0 0 {_W} {_H}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def plot_function(state: StageState) -> str:
    """Graph of the stage function over [0,1]."""
    f = state.f
    xs = list(f.derivative.breakpoints)
    ys = [float(v) for v in f.breakpoint_values]
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0
    pts = [(_scale_x(float(x)), _H - _PAD - (y - lo) / span * (_H - 2 * _PAD))
           for x, y in zip(xs, ys)]
    body = [f'<rect width="{_W}" height="{_H}" fill="white"/>',
            _polyline(pts, "#1f3b73")]
    return _svg(body)


def plot_stages(states: Sequence[StageState]) -> str:
    """Nested bars: one row per stage, one bar per component."""
    body = [f'<rect width="{_W}" height="{_H}" fill="white"/>']
    rows = len(states)
    for i, st in enumerate(states):
        y = _PAD + i * (_H - 2 * _PAD) / max(1, rows)
        h = 0.6 * (_H - 2 * _PAD) / max(1, rows)
        for (l, r) in st.P.components:
            x0, x1 = _scale_x(float(l)), _scale_x(float(r))
            body.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" '
                        f'width="{_fmt(max(x1 - x0, 0.8))}" height="{_fmt(h)}" '
                        f'fill="#2d7d46"/>')
        body.append(f'<text x="4" y="{_fmt(y + h)}" font-size="12">'
                    f'stage {st.k}</text>')
    return _svg(body)


def plot_envelopes(state: StageState) -> str:
    """Tangent bracket lines around every covered right endpoint."""
    f = state.f
    body = [f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if not state.covers:
        return _svg(body)
    ys: list[float] = []
    segs = []
    for d, bracket in state.covers:
        target = state.target_for(d)
        x_c = float(target.center[0])
        for anchor, color in ((bracket.low_anchor, "#b03a2e"),
                              (bracket.high_anchor, "#1a5276")):
            val, slope = f.eval_pair(anchor)
            for dx in (-0.02, 0.02):
                ys.append(float(val) + float(slope) * (x_c + dx - float(anchor)))
            segs.append((float(anchor), float(val), float(slope), x_c, color))
        ys.append(float(target.center[1]))
    lo, hi = min(ys), max(ys)
    span = (hi - lo) or 1.0

    def sy(y: float) -> float:
        return _H - _PAD - (y - lo) / span * (_H - 2 * _PAD)

    for anchor, val, slope, x_c, color in segs:
        pts = [(_scale_x(x_c + dx), sy(val + slope * (x_c + dx - anchor)))
               for dx in (-0.02, 0.02)]
        body.append(_polyline(pts, color))
    return _svg(body)


def plot_descent(trace: DescentTrace) -> str:
    """Interval nesting of the descent with the witness point."""
    body = [f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if not trace.steps:
        return _svg(body)
    a0, b0 = float(trace.steps[0].a_n), float(trace.steps[0].b_n)
    span = (b0 - a0) or 1.0
    rows = len(trace.steps)
    for i, s in enumerate(trace.steps):
        y = _PAD + i * (_H - 2 * _PAD) / rows
        x0 = _PAD + (float(s.a_n) - a0) / span * (_W - 2 * _PAD)
        x1 = _PAD + (float(s.b_n) - a0) / span * (_W - 2 * _PAD)
        body.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" '
                    f'width="{_fmt(max(x1 - x0, 0.8))}" height="6" '
                    f'fill="#7d3c98"/>')
        body.append(f'<text x="4" y="{_fmt(y + 8)}" font-size="11">'
                    f'n={s.n}</text>')
    px = _PAD + (float(trace.p) - a0) / span * (_W - 2 * _PAD)
    body.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(_H - _PAD)}" r="3" '
                f'fill="#b03a2e"/>')
    return _svg(body)
