"""Exact piecewise-linear functions on [0,1] and their integrals.

Everything on the certified path is computed over ``fractions.Fraction``:
breakpoints and values are rationals, evaluation, norms and oscillations
are exact, and all generators emit rational node data.  A :class:`C1Fn`
is stored through its piecewise-linear derivative; its values are the
exact trapezoid integrals from 0, which makes the function itself
piecewise quadratic with the same breakpoints.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

Rat = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


class DomainError(ValueError):
    """Argument outside [0,1], or an empty/backwards subinterval."""


class MonotoneError(ValueError):
    """No non-monotonicity witness exists on the requested interval."""


class WindowError(ValueError):
    """Support windows overlap each other or touch the boundary of (0,1)."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function on [0,1].

    ``breakpoints`` is a strictly increasing tuple of rationals starting at
    0 and ending at 1; ``values`` holds one rational value per breakpoint
    and the function interpolates linearly in between.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(_frac(b) for b in self.breakpoints)
        vals = tuple(_frac(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(bps) < 2 or len(bps) != len(vals):
            raise ValueError("need matching breakpoint/value lists of length >= 2")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must span [0,1]")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")

    # -- evaluation ---------------------------------------------------

    def piece_index(self, x: Fraction) -> int:
        """Index i with breakpoints[i] <= x <= breakpoints[i+1]."""
        if x < 0 or x > 1:
            raise DomainError(f"{x} outside [0,1]")
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return min(max(i, 0), len(self.breakpoints) - 2)

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        i = self.piece_index(x)
        x0, x1 = self.breakpoints[i], self.breakpoints[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        if x == x0:
            return v0
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def segments(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Yield (x0, x1, v0, v1) per linear piece."""
        for i in range(len(self.breakpoints) - 1):
            yield (self.breakpoints[i], self.breakpoints[i + 1],
                   self.values[i], self.values[i + 1])

    def slope(self, i: int) -> Fraction:
        x0, x1 = self.breakpoints[i], self.breakpoints[i + 1]
        return (self.values[i + 1] - self.values[i]) / (x1 - x0)

    # -- exact norms ---------------------------------------------------

    def sup_norm(self) -> Fraction:
        """Supremum norm; exact since extremes sit at breakpoints."""
        return max(abs(v) for v in self.values)

    def nodes_in(self, a: Fraction, b: Fraction,
                 include_ends: bool = True) -> list[tuple[Fraction, Fraction]]:
        """(x, value) pairs at a, at b and at breakpoints strictly inside."""
        if not a < b:
            raise DomainError("empty interval")
        lo = bisect.bisect_right(self.breakpoints, a)
        hi = bisect.bisect_left(self.breakpoints, b)
        out = []
        if include_ends:
            out.append((a, self(a)))
        out.extend((self.breakpoints[i], self.values[i]) for i in range(lo, hi))
        if include_ends:
            out.append((b, self(b)))
        return out

    def oscillation(self, a, b) -> Fraction:
        """max - min over [a,b] subset of [0,1], exact."""
        a, b = _frac(a), _frac(b)
        if not (0 <= a < b <= 1):
            raise DomainError(f"bad interval [{a},{b}]")
        vals = [v for _, v in self.nodes_in(a, b)]
        return max(vals) - min(vals)

    def range_on(self, a, b) -> tuple[Fraction, Fraction]:
        a, b = _frac(a), _frac(b)
        vals = [v for _, v in self.nodes_in(a, b)]
        return min(vals), max(vals)

    # -- algebra ---------------------------------------------------------

    def add(self, other: "PiecewiseLinearFn") -> "PiecewiseLinearFn":
        xs = sorted(set(self.breakpoints) | set(other.breakpoints))
        return PiecewiseLinearFn(tuple(xs), tuple(self(x) + other(x) for x in xs))

    def sub(self, other: "PiecewiseLinearFn") -> "PiecewiseLinearFn":
        return self.add(other.scale(Fraction(-1)))

    def scale(self, c) -> "PiecewiseLinearFn":
        c = _frac(c)
        return PiecewiseLinearFn(self.breakpoints, tuple(c * v for v in self.values))


def pl_constant(c) -> PiecewiseLinearFn:
    c = _frac(c)
    return PiecewiseLinearFn((_ZERO, _ONE), (c, c))


def pl_from_points(points: Iterable[tuple[Fraction, Fraction]]) -> PiecewiseLinearFn:
    pts = sorted((_frac(x), _frac(v)) for x, v in points)
    return PiecewiseLinearFn(tuple(x for x, _ in pts), tuple(v for _, v in pts))


@dataclass(frozen=True)
class SupportWindows:
    """Disjoint closed windows [z - hw, z + hw] inside (0,1).

    Stored as (center, half_width) pairs, sorted by center.
    """

    windows: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ws = tuple(sorted((_frac(z), _frac(d)) for z, d in self.windows))
        object.__setattr__(self, "windows", ws)
        for z, d in ws:
            if d <= 0:
                raise WindowError("window half-width must be positive")
            if z - d <= 0 or z + d >= 1:
                raise WindowError("window touches the boundary of (0,1)")
        for (z0, d0), (z1, d1) in zip(ws, ws[1:]):
            if not z0 + d0 < z1 - d1:
                raise WindowError("windows overlap or touch")

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [(z - d, z + d) for z, d in self.windows]

    def measure(self) -> Fraction:
        """Lebesgue measure of the union (windows are disjoint)."""
        return sum((2 * d for _, d in self.windows), _ZERO)


@dataclass(frozen=True)
class C1Fn:
    """C^1 function F(x) = integral of a piecewise-linear derivative from 0.

    F(0) = 0 by construction; F is piecewise quadratic with the derivative's
    breakpoints and F' equals the stored derivative everywhere.
    """

    derivative: PiecewiseLinearFn

    def __post_init__(self):
        bps = self.derivative.breakpoints
        vals = self.derivative.values
        cum = [_ZERO]
        for i in range(len(bps) - 1):
            cum.append(cum[-1] + (vals[i] + vals[i + 1]) * (bps[i + 1] - bps[i]) / 2)
        object.__setattr__(self, "_cum", tuple(cum))

    @property
    def breakpoint_values(self) -> tuple[Fraction, ...]:
        return self._cum  # type: ignore[attr-defined]

    def value(self, x) -> Fraction:
        x = _frac(x)
        g = self.derivative
        i = g.piece_index(x)
        x0 = g.breakpoints[i]
        base = self._cum[i]  # type: ignore[attr-defined]
        if x == x0:
            return base
        return base + (g.values[i] + g(x)) * (x - x0) / 2

    def __call__(self, x) -> Fraction:
        return self.value(x)

    def eval_pair(self, x) -> tuple[Fraction, Fraction]:
        """(F(x), F'(x)), both exact."""
        x = _frac(x)
        if x < 0 or x > 1:
            raise DomainError(f"{x} outside [0,1]")
        return self.value(x), self.derivative(x)

    def sup_norm(self) -> Fraction:
        """Exact sup of |F|: per-piece extremes are at ends or where F' = 0."""
        g = self.derivative
        best = _ZERO
        for i, (x0, x1, v0, v1) in enumerate(g.segments()):
            cands = [self._cum[i], self._cum[i + 1]]  # type: ignore[attr-defined]
            if v0 * v1 < 0:
                root = x0 + v0 * (x1 - x0) / (v0 - v1)
                cands.append(self.value(root))
            m = max(abs(c) for c in cands)
            if m > best:
                best = m
        return best

    def diff(self, other: "C1Fn") -> "C1Fn":
        """Exact difference: both vanish at 0, so (F-G)' = F' - G'."""
        return C1Fn(self.derivative.sub(other.derivative))

    def value_range(self, a, b) -> tuple[Fraction, Fraction]:
        """Exact range of F over [a,b]: per-piece ends plus zeros of F'."""
        a, b = _frac(a), _frac(b)
        if not a <= b:
            raise DomainError("empty interval")
        g = self.derivative
        cands = [self.value(a), self.value(b)]
        i0, i1 = g.piece_index(a), g.piece_index(b)
        for i in range(i0, i1 + 1):
            p, q = g.breakpoints[i], g.breakpoints[i + 1]
            lo, hi = max(p, a), min(q, b)
            if lo > hi:
                continue
            if a <= p <= b:
                cands.append(self._cum[i])  # type: ignore[attr-defined]
            v0, v1 = g.values[i], g.values[i + 1]
            if v0 * v1 < 0:
                root = p + v0 * (q - p) / (v0 - v1)
                if lo <= root <= hi:
                    cands.append(self.value(root))
        return min(cands), max(cands)


def eval_pair(f: C1Fn, x) -> tuple[Fraction, Fraction]:
    return f.eval_pair(x)


def add_integral(f: C1Fn, h: PiecewiseLinearFn) -> C1Fn:
    """f plus the antiderivative of h; the new derivative is f' + h."""
    return C1Fn(f.derivative.add(h))


@dataclass(frozen=True)
class NonmonotoneWitness:
    """Strictly interior witnesses of failing monotonicity in both directions:

    g(e_star) > g(w0) with e_star < w0, and g(e1_star) < g(w1) with
    e1_star < w1.
    """

    e_star: Fraction
    w0: Fraction
    e1_star: Fraction
    w1: Fraction


def nonmonotone_witness(g: PiecewiseLinearFn, a, b) -> NonmonotoneWitness:
    """Find interior points showing g is neither nondecreasing nor
    nonincreasing on [a,b].  Raises MonotoneError when g is monotone there.

    The scan works on node values (exact: g is linear between nodes);
    endpoint hits are nudged inward along their strictly monotone segment.
    """
    a, b = _frac(a), _frac(b)
    if not a < b:
        raise DomainError("empty interval")
    nodes = g.nodes_in(a, b)

    def steepest(direction: int):
        best = None
        best_gap = _ZERO
        for (x0, v0), (x1, v1) in zip(nodes, nodes[1:]):
            gap = (v0 - v1) * direction
            if gap > best_gap:
                best_gap = gap
                best = (x0, x1, v0, v1)
        return best

    drop = steepest(+1)
    rise = steepest(-1)
    if drop is None or rise is None:
        raise MonotoneError(f"derivative is monotone on [{a},{b}]")

    def interiorize(seg):
        x0, x1, v0, v1 = seg
        lo, hi = x0, x1
        if lo == a:
            lo = x0 + (x1 - x0) / 4
        if hi == b:
            hi = x1 - (x1 - x0) / 4
        return lo, hi

    e_star, w0 = interiorize(drop)
    e1_star, w1 = interiorize(rise)
    return NonmonotoneWitness(e_star, w0, e1_star, w1)


def level_set_last(g: PiecewiseLinearFn, lo, hi, level) -> Fraction:
    """max{x in [lo,hi] : g(x) = level}; exact on piecewise-linear g.

    Requires g(lo) = level so the set is nonempty.
    """
    lo, hi, level = _frac(lo), _frac(hi), _frac(level)
    nodes = g.nodes_in(lo, hi)
    last = None
    for (x0, v0), (x1, v1) in zip(nodes, nodes[1:]):
        if v0 == v1:
            if v0 == level:
                last = x1
            continue
        t = (level - v0) / (v1 - v0)
        if 0 <= t <= 1:
            last = x0 + t * (x1 - x0)
    if last is None:
        if nodes and nodes[0][1] == level:
            return nodes[0][0]
        raise ValueError("level not attained on the interval")
    return last


def _triangle_wave(t: Fraction) -> Fraction:
    """Distance from t to the nearest integer."""
    m = t - (t.numerator // t.denominator)
    return min(m, 1 - m)


def build_base_derivative(depth: int) -> PiecewiseLinearFn:
    """Truncated sawtooth sum with a dominant top term.

    The result is piecewise linear on the dyadic grid of scale 2**-depth,
    has sup-norm at most 1/2, and fails monotonicity in both directions on
    every dyadic interval of length >= 2**(2-depth): the top term makes
    adjacent grid values alternate strictly (its per-node swing is four
    times the largest swing the lower-frequency terms can produce).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth == 1:
        return pl_from_points([(_ZERO, _ZERO), (_HALF, _HALF), (_ONE, _ZERO)])
    n = 1 << depth
    weights = [(j, Fraction(1, 4 ** j)) for j in range(1, depth - 1)]
    top_weight = Fraction(8, 2 ** depth)
    xs = [Fraction(k, n) for k in range(n + 1)]
    vals = []
    for k, x in enumerate(xs):
        v = _ZERO
        for j, w in weights:
            v += w * _triangle_wave((1 << j) * x)
        # top term at frequency 2**(depth-1): vanishes at even grid nodes
        if k % 2 == 1:
            v += top_weight * _HALF
        vals.append(v)
    g = PiecewiseLinearFn(tuple(xs), tuple(vals))
    s = g.sup_norm()
    if s > _HALF:
        g = g.scale(_HALF / s)
    return g


# Node offsets of one perturbation window, as fractions of the half-width.
# Left half: the mandated double spike (down at z - 3d/4, up at z - d/4).
# Right half: a zero-mean zigzag that keeps the perturbed derivative
# non-monotone on (z, z + d), which is where the tangency solver works.
_WINDOW_PROFILE: tuple[tuple[Fraction, int], ...] = (
    (Fraction(-1), 0),
    (Fraction(-3, 4), -1),
    (Fraction(-1, 4), +1),
    (Fraction(0), 0),
    (Fraction(1, 8), +1),
    (Fraction(3, 8), -1),
    (Fraction(5, 8), +1),
    (Fraction(7, 8), -1),
    (Fraction(1), 0),
)


def spike_points(window: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    """The two mandated spike abscissae s1 < s2 < z of a window."""
    z, d = window
    return z - 3 * d / 4, z - d / 4


def build_perturbation(windows: SupportWindows, amplitude) -> PiecewiseLinearFn:
    """Piecewise-linear perturbation supported on the given windows.

    Per window [z-d, z+d] the profile dips to -amplitude at z - 3d/4, rises
    to +amplitude at z - d/4, and zigzags with the same amplitude on
    (z, z+d); it vanishes at window edges and integrates to zero over each
    window.  The sup-norm is exactly ``amplitude``.
    """
    amp = _frac(amplitude)
    if amp <= 0:
        raise ValueError("amplitude must be positive")
    if not windows.windows:
        return pl_constant(0)
    pts: list[tuple[Fraction, Fraction]] = []
    for z, d in windows.windows:
        for off, sign in _WINDOW_PROFILE:
            pts.append((z + off * d, sign * amp))
    if pts[0][0] > 0:
        pts.insert(0, (_ZERO, _ZERO))
    if pts[-1][0] < 1:
        pts.append((_ONE, _ZERO))
    xs = tuple(x for x, _ in pts)
    for p, q in zip(xs, xs[1:]):
        if not p < q:
            raise WindowError("window profiles collide")
    return PiecewiseLinearFn(xs, tuple(v for _, v in pts))
