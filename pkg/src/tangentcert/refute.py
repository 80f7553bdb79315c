"""Refutation descent and projection decompositions against box-complements.

``descend`` runs the nested-interval argument at finite depth: it picks a
windowed right endpoint, finds an open box of H inside that endpoint's
certified coverage square, and shrinks intervals around a tangent anchor
so that every point of every interval owns a tangent witness inside H at
the required distance.  All step conditions are checked exactly and the
trace records them; once the finitely many windowed endpoints inside the
current interval are exhausted the deepest one is reused (recorded per
step), which is the honest finite rendering of the infinite selection.

``linear_decompose`` and ``central_decompose`` split a planar set into the
pieces whose fiber segments stay inside L, band by band, and certify the
fiber condition on every computed piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .construct import StageState
from .enclosure import ratio_over_sqrt, sqrt_interval
from .intervals import IntervalUnion
from .lspec import Box, LSpec, Point
from .piecewise import C1Fn
from .projections import GapCertificate, gap_certificate
from .tangent import envelope_member, tangent_value_range

_ZERO = Fraction(0)
_ONE = Fraction(1)


class PreconditionError(RuntimeError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def graph_range(f: C1Fn, lo, hi) -> tuple[Fraction, Fraction]:
    """Exact range of f over [lo, hi]."""
    return f.value_range(lo, hi)


# -- descent -------------------------------------------------------------


@dataclass(frozen=True)
class DescentStep:
    n: int
    d: Fraction
    reused: bool
    box: Box
    xi: Fraction
    x_n: Fraction
    a_n: Fraction
    b_n: Fraction
    witness: Point
    norm_sq: Fraction
    bound_sq: Fraction
    interval_ok: bool      # n (b_n - a_n) < 1 and the interval meets P
    nested_ok: bool
    witness_ok: bool       # every x in [a_n, b_n] has its witness in the box
    ball_ok: bool          # the box sits inside B((d, f(d)), 1/n)


@dataclass(frozen=True)
class DescentTrace:
    steps: tuple[DescentStep, ...]
    p: Fraction
    f_at_p: Fraction
    lip_bound: Fraction
    a0: Fraction
    b0: Fraction
    no_w_at: Optional[int]

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def passed(self) -> bool:
        return (self.no_w_at is None
                and all(s.interval_ok and s.nested_ok and s.witness_ok
                        and s.ball_ok and s.norm_sq < s.bound_sq
                        for s in self.steps))

    def witness_directions(self) -> tuple[Point, ...]:
        gp = (self.p, self.f_at_p)
        return tuple((s.witness[0] - gp[0], s.witness[1] - gp[1])
                     for s in self.steps)


def _box_in_square(box: Box, center: Point, eta: Fraction) -> bool:
    x0, y0, x1, y1 = box
    cx, cy = center
    return (cx - eta <= x0 and x1 <= cx + eta
            and cy - eta <= y0 and y1 <= cy + eta)


def _box_in_ball(box: Box, center: Point, r: Fraction) -> bool:
    x0, y0, x1, y1 = box
    cx, cy = center
    rr = r * r
    for px in (x0, x1):
        for py in (y0, y1):
            if (px - cx) ** 2 + (py - cy) ** 2 >= rr:
                return False
    return True


def descend(states: Sequence[StageState], L: LSpec, a, b, N: int) -> DescentTrace:
    """Run the nested-interval refutation to depth min(N, feasible).

    Raises PreconditionError when H is empty or the stage set misses
    (a, b); produces a trace whose ``no_w_at`` marks the first step at
    which no admissible open box could be found (reported, not fatal).
    """
    a, b = _frac(a), _frac(b)
    if not states:
        raise ValueError("need stage data")
    last = states[-1]
    f = last.f
    if L.h_empty:
        raise PreconditionError("H is empty: the graph cannot meet its closure")
    if not any(l < b and r > a for l, r in last.P.components):
        raise PreconditionError("stage set misses (a, b)")

    lip = f.derivative.sup_norm()

    # deepest windowed endpoint whose whole window sits inside (a, b)
    candidates = sorted(
        (w for w in last.windows if a < w.u and w.d < b),
        key=lambda w: (-w.birth, w.d - w.u, w.d))
    if not candidates:
        return DescentTrace((), (a + b) / 2, f((a + b) / 2), lip, a, b, 1)

    chosen = None
    for wininfo in candidates:
        target = last.target_for(wininfo.d)
        bracket = last.cover_for(wininfo.d)
        graph_pt = (wininfo.d, f(wininfo.d))
        boxes = [bx for bx in L.complement_boxes
                 if _box_in_square(bx, target.center, target.radius)]
        if not boxes:
            continue
        def dist2(bx):
            mx, my = (bx[0] + bx[2]) / 2, (bx[1] + bx[3]) / 2
            return (mx - graph_pt[0]) ** 2 + (my - graph_pt[1]) ** 2
        box = min(boxes, key=lambda bx: (dist2(bx), bx))
        chosen = (wininfo, target, bracket, box)
        break
    if chosen is None:
        return DescentTrace((), (a + b) / 2, f((a + b) / 2), lip, a, b, 1)

    wininfo, target, bracket, box = chosen
    d = wininfo.d
    x0b, y0b, x1b, y1b = box
    xi = (x0b + x1b) / 2
    center_box = (xi, (y0b + y1b) / 2)
    host = (min(bracket.s1, bracket.s2), max(bracket.s1, bracket.s2))
    wit = envelope_member(center_box, f, [host], _ZERO, stop_at_certified=True)
    if wit is None:
        return DescentTrace((), (a + b) / 2, f((a + b) / 2), lip, a, b, 1)
    x_star = wit.anchor

    a0 = (a + wininfo.u) / 2
    b0 = (d + b) / 2

    # shrink the first interval until every anchor's tangent value at xi
    # stays strictly inside the box ordinates
    rho = min(x_star - a0, b0 - x_star, Fraction(1, 8)) / 2
    for _ in range(4000):
        lo_v, hi_v = tangent_value_range(f, x_star - rho, x_star + rho, xi)
        if y0b < lo_v and hi_v < y1b:
            break
        rho /= 2
    else:
        return DescentTrace((), (a + b) / 2, f((a + b) / 2), lip, a, b, 1)

    graph_pt = (d, f(d))
    steps = []
    prev_lo, prev_hi = a0, b0
    no_w_at = None
    for n in range(1, N + 1):
        a_n, b_n = x_star - rho, x_star + rho
        ball_ok = _box_in_ball(box, graph_pt, Fraction(1, n))
        if not ball_ok:
            no_w_at = n
            break
        lo_v, hi_v = tangent_value_range(f, a_n, b_n, xi)
        witness_ok = y0b < lo_v and hi_v < y1b and x0b < xi < x1b
        # worst-case distance from (x, f(x)) to its witness (xi, A_{f,x}(xi))
        g_lo, g_hi = graph_range(f, a_n, b_n)
        dx = max(abs(xi - a_n), abs(xi - b_n))
        dy = max(hi_v - g_lo, g_hi - lo_v)
        norm_sq = dx * dx + dy * dy
        bound = 3 * (lip + 1) / n
        interval_ok = n * (b_n - a_n) < 1
        nested_ok = prev_lo < a_n and b_n < prev_hi
        witness = (xi, f(x_star) + f.derivative(x_star) * (xi - x_star))
        steps.append(DescentStep(
            n=n, d=d, reused=n > 1, box=box, xi=xi, x_n=x_star,
            a_n=a_n, b_n=b_n, witness=witness, norm_sq=norm_sq,
            bound_sq=bound * bound, interval_ok=interval_ok,
            nested_ok=nested_ok, witness_ok=witness_ok, ball_ok=ball_ok))
        prev_lo, prev_hi = a_n, b_n
        rho /= 4

    return DescentTrace(tuple(steps), x_star, f(x_star), lip, a0, b0, no_w_at)


def graph_sample_lspec(state: StageState, radius, count: int,
                       focus: Sequence[Fraction] = ()) -> LSpec:
    """Open boxes of half-width ``radius`` around ``count`` graph samples.

    Samples cluster geometrically toward each focused right endpoint
    (inside its certified coverage square, so the descent can use them)
    and fill the rest of [0,1] uniformly.
    """
    radius = _frac(radius)
    f = state.f
    xs: list[Fraction] = []
    focus = list(focus) if focus else [w.d for w in state.windows]
    per_focus = max(8, count // (4 * max(1, len(focus))))
    for d in focus:
        target = state.target_for(d)
        room = target.radius - abs(f(d) - target.center[1])
        if room <= 0:
            continue
        step = room / 4
        for j in range(1, per_focus + 1):
            xs.append(d - step / 2 ** j)
    remaining = count - len(xs)
    for j in range(max(0, remaining)):
        xs.append(Fraction(2 * j + 1, 2 * max(1, remaining)))
    boxes = []
    for x in xs[:count]:
        y = f(x)
        boxes.append((x - radius, y - radius, x + radius, y + radius))
    return LSpec(tuple(boxes))


# -- projection decompositions -------------------------------------------


@dataclass(frozen=True)
class GraphSet:
    """The graph of f over a finite interval union."""

    f: C1Fn
    domain: IntervalUnion


PlanarSet = Union[Sequence[Point], GraphSet]


@dataclass(frozen=True)
class DecompositionCell:
    n: int
    k: int
    band: tuple[Fraction, Fraction]
    points: tuple[Point, ...]
    pieces: tuple[tuple[Fraction, Fraction], ...]
    fiber_ok: bool


@dataclass(frozen=True)
class ProjDecomposition:
    direction: Optional[Point]
    center: Optional[Point]
    cells: tuple[DecompositionCell, ...]
    gap_reports: tuple[tuple[int, int, GapCertificate], ...]

    def cell(self, n: int, k: int) -> Optional[DecompositionCell]:
        for c in self.cells:
            if c.n == n and c.k == k:
                return c
        return None

    @property
    def all_fibers_ok(self) -> bool:
        return all(c.fiber_ok for c in self.cells)


class _BoxIndex:
    """Sorted views of the complement boxes for fast window queries."""

    def __init__(self, boxes: Sequence[Box]):
        import bisect as _bisect
        self._bisect = _bisect
        self.by_x = sorted(boxes, key=lambda b: (b[0], b))
        self.by_y = sorted(boxes, key=lambda b: (b[1], b))
        self.x0 = [b[0] for b in self.by_x]
        self.y0 = [b[1] for b in self.by_y]
        self.max_w = max((b[2] - b[0] for b in boxes), default=_ZERO)
        self.max_h = max((b[3] - b[1] for b in boxes), default=_ZERO)

    def overlapping_x(self, lo: Fraction, hi: Fraction) -> list[Box]:
        i = self._bisect.bisect_left(self.x0, lo - self.max_w)
        out = []
        while i < len(self.by_x) and self.by_x[i][0] < hi:
            b = self.by_x[i]
            if b[2] > lo:
                out.append(b)
            i += 1
        return out

    def overlapping_y(self, lo: Fraction, hi: Fraction) -> list[Box]:
        i = self._bisect.bisect_left(self.y0, lo - self.max_h)
        out = []
        while i < len(self.by_y) and self.by_y[i][1] < hi:
            b = self.by_y[i]
            if b[3] > lo:
                out.append(b)
            i += 1
        return out

    def candidates(self, x_lo, x_hi, y_lo, y_hi) -> list[Box]:
        """Boxes possibly meeting the rectangle; queries the narrower axis
        and filters exactly on the other."""
        if x_hi - x_lo <= y_hi - y_lo:
            rough = self.overlapping_x(x_lo, x_hi)
        else:
            rough = self.overlapping_y(y_lo, y_hi)
        return [b for b in rough
                if b[2] > x_lo and b[0] < x_hi and b[3] > y_lo and b[1] < y_hi]


def _clear_graph_pieces(f: C1Fn, lo: Fraction, hi: Fraction, index: _BoxIndex,
                        v: Point, reach: Fraction,
                        depth: int = 14) -> list[tuple[Fraction, Fraction]]:
    """Sub-intervals of [lo, hi] whose graph points certainly keep the
    segment x +/- reach * v inside L.

    A graph point can only lose when some box, widened by the segment
    sweep, meets both its abscissa and its ordinate; sub-pieces where no
    widened box does are exactly clear (for axis directions the widened
    test is an equivalence).  Interacting sub-pieces are bisected and, at
    the depth cap, dropped, which under-approximates soundly."""
    vx, vy = v
    wx = abs(vx) * reach
    wy = abs(vy) * reach
    g = f.derivative
    out: list[tuple[Fraction, Fraction]] = []
    stack: list[tuple[Fraction, Fraction, int]] = []
    for i in range(g.piece_index(lo), g.piece_index(hi) + 1):
        a = max(g.breakpoints[i], lo)
        b = min(g.breakpoints[i + 1], hi)
        if a < b:
            stack.append((a, b, depth))
    while stack:
        a, b, d = stack.pop()
        f_lo, f_hi = f.value_range(a, b)
        if not index.candidates(a - wx, b + wx, f_lo - wy, f_hi + wy):
            out.append((a, b))
            continue
        if d == 0:
            continue  # conservatively dropped near a box
        m = (a + b) / 2
        stack.append((a, m, d - 1))
        stack.append((m, b, d - 1))
    return out


def _merge_pieces(pieces: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    pieces = sorted(pieces)
    out: list[tuple[Fraction, Fraction]] = []
    for (a, b) in pieces:
        if out and out[-1][1] == a:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def _bands(base: Fraction, n: int, k_max: int) -> list[tuple[Fraction, Fraction]]:
    """Overlapping open bands of diameter < 1/n covering [base, ...) from
    half a step below the base (so boundary members land strictly inside)."""
    h = Fraction(1, 2 * n + 1)
    start = base - h / 2
    return [(start + (k - 1) * h, start + (k + 1) * h) for k in range(1, k_max + 1)]


def linear_decompose(A: PlanarSet, v: Point, L: LSpec, n_max: int, k_max: int,
                     gap_window=None) -> ProjDecomposition:
    """Split A into A_{n,k}: points whose fiber segment of half-length 1/n
    in direction v stays in L, restricted to direction-coordinate bands of
    diameter < 1/n; the fiber condition is certified per cell."""
    vx, vy = _frac(v[0]), _frac(v[1])
    if vx == 0 and vy == 0:
        raise ValueError("direction must be nonzero")
    vv = vx * vx + vy * vy

    def coord_v(pt: Point) -> Fraction:
        return (pt[0] * vx + pt[1] * vy) / vv

    def coord_y(pt: Point) -> Fraction:
        # complement coordinate: the orthogonal direction
        return (-pt[0] * vy + pt[1] * vx) / vv

    index = _BoxIndex(L.complement_boxes) if L.complement_boxes else None
    cells = []
    gaps = []
    for n in range(1, n_max + 1):
        reach = Fraction(1, n)
        if isinstance(A, GraphSet):
            clear: list[tuple[Fraction, Fraction]] = []
            for (l, r) in A.domain.components:
                if index is None:
                    clear.append((l, r))
                else:
                    clear.extend(_clear_graph_pieces(A.f, l, r, index,
                                                     (vx, vy), reach))
            clear = _merge_pieces(clear)
            if clear:
                coords = []
                for (aa, bb) in clear:
                    g_lo, g_hi = graph_range(A.f, aa, bb)
                    coords.append(coord_v((aa, g_lo)))
                    coords.append(coord_v((aa, g_hi)))
                    coords.append(coord_v((bb, g_lo)))
                    coords.append(coord_v((bb, g_hi)))
                base = min(coords)
            else:
                base = _ZERO
        else:
            members = [p for p in A
                       if L.segment_in_l((p[0] - vx * reach, p[1] - vy * reach),
                                         (p[0] + vx * reach, p[1] + vy * reach))]
            base = min((coord_v(p) for p in members), default=_ZERO)

        for k, band in enumerate(_bands(base, n, k_max), start=1):
            if isinstance(A, GraphSet):
                pieces = _assign_graph_band(A.f, clear, band, coord_v)
                fiber_ok = all(_fiber_ok_graph(A.f, pc, band, (vx, vy), vv, index)
                               for pc in pieces)
                pts: tuple[Point, ...] = ()
                if gap_window is not None and pieces:
                    image = [graph_range_coord(A.f, pc, coord_y) for pc in pieces]
                    gaps.append((n, k, gap_certificate(image, gap_window)))
            else:
                pts = tuple(p for p in members if band[0] < coord_v(p) < band[1])
                pieces = ()
                fiber_ok = all(_fiber_ok_point(p, band, (vx, vy), coord_v, L)
                               for p in pts)
                if gap_window is not None and pts:
                    image = [(coord_y(p), coord_y(p)) for p in pts]
                    gaps.append((n, k, gap_certificate(image, gap_window)))
            if pts or pieces:
                cells.append(DecompositionCell(n, k, band, pts, tuple(pieces),
                                               fiber_ok))
    return ProjDecomposition((vx, vy), None, tuple(cells), tuple(gaps))


def graph_range_coord(f: C1Fn, piece: tuple[Fraction, Fraction], coord) -> tuple[Fraction, Fraction]:
    g_lo, g_hi = graph_range(f, piece[0], piece[1])
    vals = [coord((piece[0], g_lo)), coord((piece[0], g_hi)),
            coord((piece[1], g_lo)), coord((piece[1], g_hi))]
    return min(vals), max(vals)


def _assign_graph_band(f, clear, band, coord_v, depth: int = 20):
    """Sub-pieces whose direction-coordinate range fits inside the band."""
    out = []

    def walk(a, b, d):
        lo, hi = graph_range_coord(f, (a, b), coord_v)
        if band[0] < lo and hi < band[1]:
            out.append((a, b))
            return
        if hi <= band[0] or lo >= band[1] or d == 0:
            return
        m = (a + b) / 2
        walk(a, m, d - 1)
        walk(m, b, d - 1)

    for (a, b) in clear:
        walk(a, b, depth)
    return _merge_pieces(out)


def _fiber_ok_point(p: Point, band, v: Point, coord_v, L: LSpec) -> bool:
    """Fiber of p in direction v clipped to the band stays inside L."""
    s_lo = band[0] - coord_v(p)
    s_hi = band[1] - coord_v(p)
    a = (p[0] + s_lo * v[0], p[1] + s_lo * v[1])
    b = (p[0] + s_hi * v[0], p[1] + s_hi * v[1])
    return L.segment_in_l(a, b)


def _fiber_ok_graph(f: C1Fn, piece, band, v: Point, vv,
                    index: Optional[_BoxIndex], depth: int = 40) -> bool:
    """Certify the band-clipped fiber for every graph point of the piece:
    the swept region's exact bounding box must avoid every open box,
    subdividing until it does."""
    if index is None:
        return True
    vx, vy = v

    def ok(a, b, d) -> bool:
        g_lo, g_hi = graph_range(f, a, b)
        c_vals = [(a * vx + g_lo * vy) / vv, (a * vx + g_hi * vy) / vv,
                  (b * vx + g_lo * vy) / vv, (b * vx + g_hi * vy) / vv]
        s_lo = band[0] - max(c_vals)
        s_hi = band[1] - min(c_vals)
        hull_x_lo = min(a + s_lo * vx, a, a + s_hi * vx)
        hull_x_hi = max(b + s_hi * vx, b, b + s_lo * vx)
        hull_y_lo = min(g_lo + s_lo * vy, g_lo, g_lo + s_hi * vy)
        hull_y_hi = max(g_hi + s_hi * vy, g_hi, g_hi + s_lo * vy)
        if not index.candidates(hull_x_lo, hull_x_hi, hull_y_lo, hull_y_hi):
            return True
        if d == 0:
            return False
        m = (a + b) / 2
        return ok(a, m, d - 1) and ok(m, b, d - 1)

    return ok(piece[0], piece[1], depth)


def central_decompose(A: PlanarSet, c: Point, L: LSpec, n_max: int, k_max: int,
                      gap_window=None, bits: int = 64) -> ProjDecomposition:
    """Radial analogue of linear_decompose: fibers are ray segments from
    the center, bands are radius bands; radii enter only through exact
    squared comparisons and outward square-root enclosures."""
    cx, cy = _frac(c[0]), _frac(c[1])
    if isinstance(A, GraphSet):
        pts = _graph_sample_points(A)
    else:
        pts = [(_frac(p[0]), _frac(p[1])) for p in A]
    if any(p == (cx, cy) for p in pts):
        raise ValueError("center lies on the set")

    def r_bounds(p: Point) -> tuple[Fraction, Fraction]:
        rr = (p[0] - cx) ** 2 + (p[1] - cy) ** 2
        return sqrt_interval(rr, bits)

    cells = []
    gaps = []
    for n in range(1, n_max + 1):
        members = []
        for p in pts:
            r_lo, r_hi = r_bounds(p)
            if r_lo == 0:
                continue
            s = Fraction(1, n) / r_lo  # outward: test a longer segment
            a = (p[0] - s * (p[0] - cx), p[1] - s * (p[1] - cy))
            b = (p[0] + s * (p[0] - cx), p[1] + s * (p[1] - cy))
            if L.segment_in_l(a, b):
                members.append(p)
        if members:
            base = min(r_bounds(p)[0] for p in members)
        else:
            base = _ZERO
        for k, band in enumerate(_bands(base, n, k_max), start=1):
            pts_k = []
            for p in members:
                r_lo, r_hi = r_bounds(p)
                if band[0] < r_lo and r_hi < band[1]:
                    pts_k.append(p)
            fiber_ok = True
            for p in pts_k:
                r_lo, r_hi = r_bounds(p)
                s_lo = band[0] / r_hi
                s_hi = band[1] / r_lo
                a = (cx + s_lo * (p[0] - cx), cy + s_lo * (p[1] - cy))
                b = (cx + s_hi * (p[0] - cx), cy + s_hi * (p[1] - cy))
                if not L.segment_in_l(a, b):
                    fiber_ok = False
            if pts_k:
                if gap_window is not None:
                    image = []
                    for p in pts_k:
                        u = p[0] - cx
                        vq = p[1] - cy
                        lo, hi = ratio_over_sqrt(u, u, min(vq, vq), max(vq, vq), bits)
                        image.append((lo, hi))
                    gaps.append((n, k, gap_certificate(image, gap_window)))
                cells.append(DecompositionCell(n, k, band, tuple(pts_k), (),
                                               fiber_ok))
    return ProjDecomposition(None, (cx, cy), tuple(cells), tuple(gaps))


def _graph_sample_points(A: GraphSet, per_component: int = 32) -> list[Point]:
    """Deterministic rational graph samples, enough for the radial
    decomposition reports."""
    pts = []
    for (l, r) in A.domain.components:
        for j in range(per_component):
            x = l + (r - l) * Fraction(2 * j + 1, 2 * per_component)
            pts.append((x, A.f(x)))
    return pts
