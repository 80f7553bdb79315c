"""Tangent lines, envelope membership and certified ball coverage.

The central objects are tangent maps of a piecewise-quadratic C^1 function
and the union of tangent lines anchored over a set of abscissae (the
envelope).  Everything is exact: membership queries reduce to root
isolation of per-piece rational quadratics, and ball coverage is certified
by a two-anchor bracket whose four affine evaluations dominate the ball.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .intervals import IntervalUnion
from .piecewise import (C1Fn, DomainError, MonotoneError, PiecewiseLinearFn,
                        level_set_last, nonmonotone_witness)
from .quadratics import (RootEnclosure, quad_eval, quad_range,
                         quad_roots_in_interval, refine_enclosure)

_ZERO = Fraction(0)
_ONE = Fraction(1)

Point = tuple[Fraction, Fraction]
Hosts = Union[IntervalUnion, Sequence[tuple[Fraction, Fraction]]]


class NoBracketError(RuntimeError):
    """Exhaustive anchor scan found no covering bracket."""


class BisectionStallError(RuntimeError):
    """The homotopy bisection lost its sign change (internal invariant)."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class AffineMap:
    """Tangent map x -> anchor_value + slope * (x - anchor)."""

    slope: Fraction
    anchor: Fraction
    anchor_value: Fraction

    def __call__(self, x) -> Fraction:
        return self.anchor_value + self.slope * (_frac(x) - self.anchor)


def affine_at(f: C1Fn, z) -> AffineMap:
    z = _frac(z)
    if z < 0 or z > 1:
        raise DomainError(f"{z} outside [0,1]")
    value, slope = f.eval_pair(z)
    return AffineMap(slope, z, value)


def tangency_defect(point: Point, f: C1Fn, z) -> Fraction:
    """|A_{f,z}(x) - y| for point = (x, y)."""
    x, y = point
    return abs(affine_at(f, z)(x) - y)


@dataclass(frozen=True)
class TangencyDefect:
    """Approximate tangency pair: |f(w) - A_{f,e}(w)| = defect."""

    e: Fraction
    w: Fraction
    defect: Fraction


@dataclass(frozen=True)
class EnvelopeBracket:
    """Certificate that tangents anchored between s1 and s2 sweep a box.

    For the target rectangle [x_lo,x_hi] x [y_lo,y_hi] the tangent at s1
    stays at or below y_lo and the tangent at s2 at or above y_hi, both at
    the two extreme abscissae (affine maps, so everywhere in between).  By
    continuity of the anchor-to-value map on one component, every point of
    the open rectangle lies on some tangent anchored in (s1, s2).
    ``inverted`` marks the low anchor sitting right of the high anchor.
    """

    s1: Fraction
    s2: Fraction
    margin: Fraction
    host: tuple[Fraction, Fraction]
    inverted: bool = False

    @property
    def low_anchor(self) -> Fraction:
        return self.s2 if self.inverted else self.s1

    @property
    def high_anchor(self) -> Fraction:
        return self.s1 if self.inverted else self.s2


def _hosts(Z: Hosts) -> list[tuple[Fraction, Fraction]]:
    if isinstance(Z, IntervalUnion):
        return list(Z.components)
    return [( _frac(a), _frac(b)) for a, b in Z]


def _phi_coefficients(f: C1Fn, piece: int, x: Fraction, y: Fraction):
    """Coefficients of s -> A_{f,s}(x) - y on one derivative piece,
    written in the local variable t = s - p for piece start p:
        phi(t) = -(sigma/2) t^2 + sigma (x - p) t + (A_{f,p}(x) - y)."""
    g = f.derivative
    p = g.breakpoints[piece]
    sigma = g.slope(piece)
    a2 = -sigma / 2
    a1 = sigma * (x - p)
    a0 = f.breakpoint_values[piece] + g.values[piece] * (x - p) - y
    return a2, a1, a0, p


@dataclass(frozen=True)
class EnvelopeWitness:
    """Root of the anchor equation: a tangent through the query point.

    ``certified`` means the root's existence is exact (rational root or a
    sign change across the enclosure); ``defect`` is the residual at the
    reported rational anchor.
    """

    anchor: Fraction
    defect: Fraction
    certified: bool
    enclosure: tuple[Fraction, Fraction]


def envelope_member(point: Point, f: C1Fn, Z: Hosts, tau,
                    stop_at_certified: bool = False) -> Optional[EnvelopeWitness]:
    """Minimal-defect anchor z in Z whose tangent passes through ``point``.

    Roots of the piecewise-quadratic anchor equation are isolated exactly
    per piece; returns None when no piece admits a root (a valid outcome).
    With ``stop_at_certified`` the scan returns the first certified root,
    skipping the global defect minimization (membership queries).
    """
    x, y = _frac(point[0]), _frac(point[1])
    tau = _frac(tau)
    g = f.derivative
    best: Optional[EnvelopeWitness] = None
    for (u, v) in _hosts(Z):
        if not u < v:
            continue
        i0 = g.piece_index(u)
        i1 = g.piece_index(v)
        for i in range(i0, i1 + 1):
            p, q = g.breakpoints[i], g.breakpoints[i + 1]
            lo, hi = max(p, u), min(q, v)
            if lo > hi:
                continue
            a2, a1, a0, base = _phi_coefficients(f, i, x, y)
            width = tau / 4 if tau > 0 else (hi - lo) / 2 ** 16 or Fraction(1, 2 ** 40)
            for root in quad_roots_in_interval(a2, a1, a0, lo - base, hi - base,
                                               width=width):
                root = refine_enclosure(a2, a1, a0, root, width)
                defect = abs(quad_eval(a2, a1, a0, root.mid))
                if tau > 0:
                    # narrow further until the midpoint residual fits the
                    # budget (the residual shrinks with the enclosure)
                    for _ in range(300):
                        if defect <= tau or root.exact:
                            break
                        root = refine_enclosure(a2, a1, a0, root, root.width / 2)
                        defect = abs(quad_eval(a2, a1, a0, root.mid))
                anchor = base + root.mid
                wit = EnvelopeWitness(anchor, defect, True,
                                      (base + root.lo, base + root.hi))
                if stop_at_certified:
                    return wit
                if best is None or defect < best.defect:
                    best = wit
    return best


def _bracket_candidates(f: C1Fn, lo: Fraction, hi: Fraction,
                        xs: tuple[Fraction, Fraction]) -> list[Fraction]:
    """Anchor candidates that exhaust the extrema of s -> A_{f,s}(x_edge)
    over (lo, hi): piece endpoints, the points s = x_edge (vertices of the
    per-piece quadratics) and zeros of f' (where the two edge curves
    cross).  The anchor set is open, so endpoint extremes are replaced by
    interior points a 2^-16 fraction inside.
    """
    g = f.derivative
    cands = {lo, hi}
    i0, i1 = g.piece_index(lo), g.piece_index(hi)
    for i in range(i0, i1 + 1):
        p, q = g.breakpoints[i], g.breakpoints[i + 1]
        if lo <= p <= hi:
            cands.add(p)
        if lo <= q <= hi:
            cands.add(q)
        v0, v1 = g.values[i], g.values[i + 1]
        if v0 * v1 < 0:  # zero of f' inside the piece
            r = p + v0 * (q - p) / (v0 - v1)
            if lo <= r <= hi:
                cands.add(r)
        elif v0 == 0 and p >= lo:
            cands.add(p)
    for xe in xs:
        if lo <= xe <= hi:
            cands.add(xe)
    nudge = (hi - lo) / 2 ** 16
    out = set()
    for c in cands:
        if c <= lo:
            c = lo + nudge
        elif c >= hi:
            c = hi - nudge
        if lo < c < hi:
            out.add(c)
    return sorted(out)


def rect_bracket(f: C1Fn, Z: Hosts, x_lo, x_hi, y_lo, y_hi) -> Optional[EnvelopeBracket]:
    """Bracket certifying the closed rectangle is swept by tangents from one
    component of Z.  Scans an exhaustive candidate set per component."""
    x_lo, x_hi = _frac(x_lo), _frac(x_hi)
    y_lo, y_hi = _frac(y_lo), _frac(y_hi)
    xs = (x_lo, x_hi)
    for (u, v) in _hosts(Z):
        if not u < v:
            continue
        cands = _bracket_candidates(f, u, v, xs)
        s_low = s_high = None
        best_low = best_high = None
        for s in cands:
            a = affine_at(f, s)
            va, vb = a(x_lo), a(x_hi)
            top, bot = max(va, vb), min(va, vb)
            if top <= y_lo and (best_low is None or top < best_low):
                best_low, s_low = top, s
            if bot >= y_hi and (best_high is None or bot > best_high):
                best_high, s_high = bot, s
        if s_low is not None and s_high is not None and s_low != s_high:
            margin = min(y_lo - best_low, best_high - y_hi)
            s1, s2 = min(s_low, s_high), max(s_low, s_high)
            return EnvelopeBracket(s1, s2, margin, (u, v),
                                   inverted=s_low > s_high)
    return None


def ball_in_envelope(center: Point, eta, f: C1Fn, Z: Hosts, tau=_ZERO
                     ) -> Optional[EnvelopeBracket]:
    """Bracket covering the closed square around ``center`` of radius
    ``eta`` (hence the open ball).  With eta = 0 this degenerates to a sign
    bracket through the point itself."""
    x, y = _frac(center[0]), _frac(center[1])
    eta = _frac(eta)
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return rect_bracket(f, Z, x - eta, x + eta, y - eta, y + eta)


def tangent_value_range(f: C1Fn, lo, hi, xi) -> tuple[Fraction, Fraction]:
    """Exact range of the anchor map x -> A_{f,x}(xi) over x in [lo, hi]
    (per-piece quadratic extremes)."""
    lo, hi, xi = _frac(lo), _frac(hi), _frac(xi)
    g = f.derivative
    mn = mx = None
    for i in range(g.piece_index(lo), g.piece_index(hi) + 1):
        p, q = g.breakpoints[i], g.breakpoints[i + 1]
        a, b = max(p, lo), min(q, hi)
        if a > b:
            continue
        sigma = g.slope(i)
        a2 = -sigma / 2
        a1 = sigma * (xi - p)
        a0 = f.breakpoint_values[i] + g.values[i] * (xi - p)
        lo_v, hi_v = quad_range(a2, a1, a0, a - p, b - p)
        mn = lo_v if mn is None else min(mn, lo_v)
        mx = hi_v if mx is None else max(mx, hi_v)
    return mn, mx


def bracket_covers(bracket: EnvelopeBracket, center: Point, eta, f: C1Fn) -> bool:
    """Re-verify a bracket against a center/radius with four exact
    evaluations (used after deserialization and in stage verification)."""
    x, y = _frac(center[0]), _frac(center[1])
    eta = _frac(eta)
    lo = affine_at(f, bracket.low_anchor)
    hi = affine_at(f, bracket.high_anchor)
    return (max(lo(x - eta), lo(x + eta)) <= y - eta
            and min(hi(x - eta), hi(x + eta)) >= y + eta)


def sample_ball(center: Point, radius, n: int, seed: int = 0) -> list[Point]:
    """Deterministic rational points of the open ball.

    Concentric rational circles with anchors from the tangent-half-angle
    parametrization, so each point is exactly on a rational circle of
    radius < ``radius``.
    """
    x, y = _frac(center[0]), _frac(center[1])
    radius = _frac(radius)
    if n < 1:
        return []
    rings = max(1, int(n ** 0.5 // 2))
    per_ring = -(-n // rings)
    pts: list[Point] = []
    for i in range(1, rings + 1):
        rho = radius * Fraction(i, rings + 1)
        for j in range(per_ring):
            if len(pts) >= n:
                break
            t = Fraction(2 * ((j + seed) % per_ring) + 1, 2 * per_ring) - Fraction(1, 2)
            t = 2 * t  # t in (-1, 1)
            den = 1 + t * t
            cx, sx = (1 - t * t) / den, 2 * t / den
            if j % 2 == 0:
                pts.append((x + rho * cx, y + rho * sx))
            else:
                pts.append((x - rho * cx, y - rho * sx))
    return pts[:n]


def sample_ball_coverage(center: Point, eta, f: C1Fn, Z: Hosts, n: int,
                         tau, seed: int = 0) -> Fraction:
    """Fraction of ``n`` deterministic ball points that envelope_member
    matches (certified root, or defect within tau)."""
    pts = sample_ball(center, eta, n, seed)
    if not pts:
        return Fraction(1)
    hit = 0
    for p in pts:
        w = envelope_member(p, f, Z, _ZERO, stop_at_certified=True)
        if w is not None and (w.certified or w.defect <= tau):
            hit += 1
    return Fraction(hit, len(pts))


# -- tangency solver ---------------------------------------------------


@dataclass(frozen=True)
class SlopeWitnessPairs:
    """Exact one-sided tangency violations on (alpha, beta):

    f(w0) < A_{f,e0}(w0) and f(w1) > A_{f,e1}(w1), both pairs strictly
    interior.  These bracket the tangency homotopy.
    """

    e0: Fraction
    w0: Fraction
    e1: Fraction
    w1: Fraction

    @property
    def min_gap(self) -> Fraction:
        return min(self.w0 - self.e0, self.w1 - self.e1)


def slope_witness_pairs(f: C1Fn, alpha, beta) -> SlopeWitnessPairs:
    """Build the two bracket pairs from a non-monotonicity witness.

    The left anchor of each pair is pushed to the last point of its
    derivative level set, which turns the witness into a strict one-sided
    tangency violation.
    """
    alpha, beta = _frac(alpha), _frac(beta)
    wit = nonmonotone_witness(f.derivative, alpha, beta)
    g = f.derivative

    e0 = level_set_last(g, wit.e_star, wit.w0, g(wit.e_star))
    if not f(wit.w0) < affine_at(f, e0)(wit.w0):
        raise BisectionStallError("decrease pair failed to strictify")
    e1 = level_set_last(g, wit.e1_star, wit.w1, g(wit.e1_star))
    if not f(wit.w1) > affine_at(f, e1)(wit.w1):
        raise BisectionStallError("increase pair failed to strictify")
    return SlopeWitnessPairs(e0, wit.w0, e1, wit.w1)


def homotopy_residual(f: C1Fn, pairs: SlopeWitnessPairs, t) -> Fraction:
    """Residual f(w(t)) - A_{f,e(t)}(w(t)) along the straight-line homotopy
    between the two witness pairs."""
    t = _frac(t)
    e = pairs.e0 + t * (pairs.e1 - pairs.e0)
    w = pairs.w0 + t * (pairs.w1 - pairs.w0)
    return f(w) - affine_at(f, e)(w)


@dataclass(frozen=True)
class TangencyResult:
    pair: TangencyDefect
    pairs: SlopeWitnessPairs
    t_star: Fraction
    t_lo: Fraction
    t_hi: Fraction


def tangency_from_pairs(f: C1Fn, pairs: SlopeWitnessPairs, tau,
                        max_steps: int = 5000) -> TangencyResult:
    """Bisection along the homotopy until the tangency defect is <= tau."""
    tau = _frac(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    t_lo, t_hi = _ZERO, _ONE
    r_lo = homotopy_residual(f, pairs, t_lo)
    r_hi = homotopy_residual(f, pairs, t_hi)
    if not (r_lo < 0 < r_hi):
        raise BisectionStallError("homotopy residual does not change sign")
    t = t_lo
    for _ in range(max_steps):
        t = (t_lo + t_hi) / 2
        r = homotopy_residual(f, pairs, t)
        if abs(r) <= tau:
            e = pairs.e0 + t * (pairs.e1 - pairs.e0)
            w = pairs.w0 + t * (pairs.w1 - pairs.w0)
            return TangencyResult(TangencyDefect(e, w, abs(r)), pairs, t, t_lo, t_hi)
        if r < 0:
            t_lo = t
        else:
            t_hi = t
    raise BisectionStallError("tangency bisection exceeded its step budget")


def tangency_solve(f: C1Fn, alpha, beta, tau) -> TangencyResult:
    """Find alpha < e < w < beta with f(w) on the tangent at e, up to
    defect tau.  Raises MonotoneError when the derivative is monotone on
    the interval (convex or concave there: no interior tangency exists).
    """
    pairs = slope_witness_pairs(f, alpha, beta)
    return tangency_from_pairs(f, pairs, tau)


# -- finite-stage limit consistency ------------------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    defects: tuple[Fraction, ...]
    defects_ok: bool
    slope_tail_ok: bool
    slope_tails: tuple[tuple[int, int, Fraction, Fraction], ...]
    value_deltas: tuple[Fraction, ...]
    slope_deltas: tuple[Fraction, ...]


def limit_consistency(fs: Sequence[C1Fn], zs: Sequence[Fraction], point: Point,
                      taus: Sequence[Fraction]) -> ConsistencyReport:
    """Finite-stage consistency of tangency along a stage sequence.

    Positions are read as stages 1..n: the slope tails must satisfy
    sup|f_m' - f_l'| <= 2^-l for l < m, and per-stage tangency defects are
    compared elementwise against the supplied budgets.
    """
    if not (len(fs) == len(zs) == len(taus) >= 2):
        raise ValueError("need equal-length inputs of length >= 2")
    x, y = point
    defects = tuple(abs(affine_at(f, z)(x) - y) for f, z in zip(fs, zs))
    defects_ok = all(d <= t for d, t in zip(defects, taus))
    tails = []
    tails_ok = True
    for li in range(len(fs)):
        for mi in range(li + 1, len(fs)):
            sup = fs[mi].derivative.sub(fs[li].derivative).sup_norm()
            bound = Fraction(1, 2 ** (li + 1))
            tails.append((li + 1, mi + 1, sup, bound))
            if sup > bound:
                tails_ok = False
    value_deltas = tuple(abs(fs[i + 1](zs[i + 1]) - fs[i](zs[i]))
                         for i in range(len(fs) - 1))
    slope_deltas = tuple(abs(fs[i + 1].derivative(zs[i + 1]) - fs[i].derivative(zs[i]))
                         for i in range(len(fs) - 1))
    return ConsistencyReport(defects, defects_ok, tails_ok, tuple(tails),
                             value_deltas, slope_deltas)
