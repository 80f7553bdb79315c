"""Gap certificates for linear and central projections of graph pieces.

Nowhere-density has no finite truth value, so these operations never
return a bare boolean: they compute the exact (or rigorously enclosed)
image of the set on the target axis and certify, for every window of the
requested length touching the image hull, a subinterval free of the
image.  The minimal relative gap gamma is 0 exactly when some window is
fully covered, which is reported rather than raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .enclosure import ratio_over_sqrt
from .intervals import IntervalUnion
from .piecewise import C1Fn
from .quadratics import quad_range

_ZERO = Fraction(0)
_ONE = Fraction(1)

Ival = tuple[Fraction, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class CenterOnSetError(ValueError):
    """The projection center lies on the graph piece."""


@dataclass(frozen=True)
class GapCertificate:
    """Certified gaps of an image set at window resolution ``window``.

    ``gaps`` lists, for each critical window position, a subinterval of
    that window exactly disjoint from the image; ``gamma`` is the minimal
    gap length relative to the window length (0 when some window of this
    length is fully covered).  ``enclosure_ok`` records whether the image
    enclosure met its refinement target (always True on exact images).
    """

    window: Fraction
    image: tuple[Ival, ...]
    gaps: tuple[Ival, ...]
    gamma: Fraction
    enclosure_ok: bool = True

    def point_in_gap(self, t: Fraction) -> bool:
        return any(lo < t < hi for lo, hi in self.gaps)

    def interval_hits_gap(self, lo: Fraction, hi: Fraction) -> bool:
        return any(lo < g_hi and hi > g_lo for g_lo, g_hi in self.gaps)


def _merge(intervals: Sequence[Ival]) -> list[Ival]:
    """Union of closed intervals as disjoint sorted closed intervals."""
    ivs = sorted((_frac(a), _frac(b)) for a, b in intervals if a <= b)
    out: list[Ival] = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _largest_gap_in_window(runs: list[Ival], t: Fraction, w: Fraction) -> Ival:
    """Largest subinterval of [t, t+w] disjoint from the merged runs."""
    lo, hi = t, t + w
    best = (lo, lo)
    cur = lo
    for a, b in runs:
        if b <= cur:
            continue
        if a >= hi:
            break
        if a > cur and a - cur > best[1] - best[0]:
            best = (cur, a)
        cur = max(cur, b)
        if cur >= hi:
            break
    if hi > cur and hi - cur > best[1] - best[0]:
        best = (cur, hi)
    return best


def gap_certificate(image: Sequence[Ival], window) -> GapCertificate:
    """Certify gaps of the (enclosed) image in every window of the given
    length that intersects the image hull; exact interval arithmetic."""
    w = _frac(window)
    if w <= 0:
        raise ValueError("window length must be positive")
    runs = _merge(image)
    if not runs:
        return GapCertificate(w, (), ((_ZERO, w),), _ONE)
    hull_lo, hull_hi = runs[0][0], runs[-1][1]
    # candidate window positions: kinks of the max-gap function
    cands = {hull_lo - w, hull_hi}
    for a, b in runs:
        cands.update((a, b, a - w, b - w))
    cands = sorted(t for t in cands if hull_lo - w <= t <= hull_hi)
    gaps = []
    gamma = None
    for t in cands:
        g = _largest_gap_in_window(runs, t, w)
        size = g[1] - g[0]
        if gamma is None or size / w < gamma:
            gamma = size / w
        if size > 0:
            gaps.append(g)
    # dedupe, keep deterministic order
    seen = set()
    uniq = []
    for g in gaps:
        if g not in seen:
            seen.add(g)
            uniq.append(g)
    return GapCertificate(w, tuple(runs), tuple(uniq), gamma if gamma is not None else _ONE)


def _value_quad(f: C1Fn, piece: int):
    g = f.derivative
    p = g.breakpoints[piece]
    return g.slope(piece) / 2, g.values[piece], f.breakpoint_values[piece], p


def linear_image(f: C1Fn, P: IntervalUnion, a, b) -> list[Ival]:
    """Exact image intervals of x -> a x + b f(x) over P (per-piece
    quadratic ranges, merged)."""
    a, b = _frac(a), _frac(b)
    g = f.derivative
    out = []
    for (l, r) in P.components:
        for i in range(g.piece_index(l), g.piece_index(r) + 1):
            p, q = g.breakpoints[i], g.breakpoints[i + 1]
            lo, hi = max(p, l), min(q, r)
            if lo > hi:
                continue
            c2, c1, c0, base = _value_quad(f, i)
            # a x + b f(x) in the local variable t = x - base
            q2 = b * c2
            q1 = a + b * c1
            q0 = a * base + b * c0
            out.append(quad_range(q2, q1, q0, lo - base, hi - base))
    return _merge(out)


def linear_projection_gaps(f: C1Fn, P: IntervalUnion, a, b, w) -> GapCertificate:
    """Gap certificate for the projection x -> a x + b f(x) of the graph
    over P onto the line; the image is exact."""
    a, b = _frac(a), _frac(b)
    if a == 0 and b == 0:
        raise ValueError("(a, b) must be nonzero")
    return gap_certificate(linear_image(f, P, a, b), w)


def _h_enclosure(f: C1Fn, lo: Fraction, hi: Fraction, c: tuple[Fraction, Fraction],
                 bits: int) -> Ival:
    """Outward enclosure of (x - c1)/sqrt((x-c1)^2 + (f(x)-c2)^2) over
    [lo, hi]; the square root is the only rounded operation."""
    c1, c2 = c
    u_lo, u_hi = lo - c1, hi - c1
    g_lo, g_hi = f.value_range(lo, hi)
    return ratio_over_sqrt(u_lo, u_hi, g_lo - c2, g_hi - c2, bits)


def central_image_enclosure(f: C1Fn, P: IntervalUnion, c, width_target,
                            bits: int = 64, cap: int = 4000
                            ) -> tuple[list[Ival], bool]:
    """Enclosure of the first-coordinate central projection image over P,
    refined by bisection until every piece enclosure is narrower than the
    target (or the piece budget runs out, reported via the flag)."""
    c1, c2 = _frac(c[0]), _frac(c[1])
    width_target = _frac(width_target)
    pieces: list[Ival] = []
    for comp in P.components:
        pieces.append(comp)
    out = []
    ok = True
    budget = cap
    stack = pieces
    while stack:
        lo, hi = stack.pop()
        enc = _h_enclosure(f, lo, hi, (c1, c2), bits)
        if enc[1] - enc[0] <= width_target or budget <= 0:
            if enc[1] - enc[0] > width_target:
                ok = False
            out.append(enc)
            continue
        budget -= 1
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return _merge(out), ok


def central_projection_gaps(f: C1Fn, P: IntervalUnion, c, w,
                            bits: int = 64) -> GapCertificate:
    """Gap certificate for the radial first-coordinate projection from a
    center off the graph.

    When the center abscissa falls in a gap of P the domain splits on
    both sides exactly as the image decomposes; on each part the map is
    smooth and its image is enclosed with outward square roots on a
    subdivision refined to w/8.
    """
    c1, c2 = _frac(c[0]), _frac(c[1])
    w = _frac(w)
    if P.contains_point(c1) and f(c1) == c2:
        raise CenterOnSetError("center lies on the graph piece")

    parts: list[IntervalUnion] = []
    if 0 <= c1 <= 1 and not P.contains_point(c1):
        left = [iv for iv in P.components if iv[1] < c1]
        right = [iv for iv in P.components if iv[0] > c1]
        if left:
            parts.append(IntervalUnion(tuple(left)))
        if right:
            parts.append(IntervalUnion(tuple(right)))
    else:
        parts.append(P)

    image: list[Ival] = []
    ok = True
    for part in parts:
        enc, part_ok = central_image_enclosure(f, part, (c1, c2), w / 8, bits)
        image.extend(enc)
        ok = ok and part_ok
    cert = gap_certificate(image, w)
    return GapCertificate(cert.window, cert.image, cert.gaps, cert.gamma, ok)


@dataclass(frozen=True)
class LipschitzExtension:
    """Constant extension of f beyond [0,1]: a Lipschitz graph over the
    horizontal axis containing graph(f)."""

    f: C1Fn
    lipschitz_bound: Fraction

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        return self.f(min(max(x, _ZERO), _ONE))


def lipschitz_extend(f: C1Fn) -> LipschitzExtension:
    return LipschitzExtension(f, f.derivative.sup_norm())
