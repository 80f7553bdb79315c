"""Exact root isolation and range computation for rational quadratics."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

_ZERO = Fraction(0)


@dataclass(frozen=True)
class RootEnclosure:
    """Rational enclosure [lo, hi] of one real root.

    ``exact`` means lo == hi is the root; otherwise the polynomial changes
    sign between lo and hi, which certifies existence.
    """

    lo: Fraction
    hi: Fraction
    exact: bool

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def quad_eval(a2: Fraction, a1: Fraction, a0: Fraction, x: Fraction) -> Fraction:
    return (a2 * x + a1) * x + a0


def _bisect_enclosure(a2, a1, a0, lo, hi, slo, width: Fraction) -> RootEnclosure:
    # slo is the sign of the polynomial at lo (+1/-1), opposite at hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = quad_eval(a2, a1, a0, mid)
        if v == 0:
            return RootEnclosure(mid, mid, True)
        if (1 if v > 0 else -1) == slo:
            lo = mid
        else:
            hi = mid
    return RootEnclosure(lo, hi, False)


def quad_roots_in_interval(a2, a1, a0, lo, hi,
                           width: Fraction = Fraction(1, 2 ** 24)) -> list[RootEnclosure]:
    """All real roots of a2 x^2 + a1 x + a0 inside [lo, hi].

    Degenerate cases: a constant zero polynomial reports the midpoint (any
    point is a root); otherwise roots are returned as exact rationals when
    possible, else as sign-change enclosures of at most ``width``.
    """
    if lo > hi:
        return []
    if a2 == 0:
        if a1 == 0:
            if a0 == 0:
                mid = (lo + hi) / 2
                return [RootEnclosure(mid, mid, True)]
            return []
        r = -a0 / a1
        return [RootEnclosure(r, r, True)] if lo <= r <= hi else []

    disc = a1 * a1 - 4 * a2 * a0
    if disc < 0:
        return []
    vertex = -a1 / (2 * a2)
    if disc == 0:
        return [RootEnclosure(vertex, vertex, True)] if lo <= vertex <= hi else []

    out: list[RootEnclosure] = []
    # one root strictly left of the vertex, one strictly right;
    # each is isolated on a half where the quadratic is monotone
    halves = []
    if lo < vertex:
        halves.append((lo, min(hi, vertex)))
    if hi > vertex:
        halves.append((max(lo, vertex), hi))
    for (a, b) in halves:
        va = quad_eval(a2, a1, a0, a)
        vb = quad_eval(a2, a1, a0, b)
        if va == 0:
            out.append(RootEnclosure(a, a, True))
            continue
        if vb == 0:
            if b != hi or (a, b) is halves[-1]:
                out.append(RootEnclosure(b, b, True))
            continue
        if (va > 0) != (vb > 0):
            out.append(_bisect_enclosure(a2, a1, a0, a, b,
                                         1 if va > 0 else -1, width))
    # dedupe an exact root reported by both halves (root at the vertex edge)
    seen = set()
    uniq = []
    for r in out:
        key = (r.lo, r.hi)
        if key not in seen:
            seen.add(key)
            uniq.append(r)
    return uniq


def refine_enclosure(a2, a1, a0, enc: RootEnclosure, width: Fraction) -> RootEnclosure:
    """Narrow a sign-change enclosure to the requested width."""
    if enc.exact or enc.width <= width:
        return enc
    slo = 1 if quad_eval(a2, a1, a0, enc.lo) > 0 else -1
    return _bisect_enclosure(a2, a1, a0, enc.lo, enc.hi, slo, width)


def quad_range(a2, a1, a0, lo, hi) -> tuple[Fraction, Fraction]:
    """Exact (min, max) of the quadratic over [lo, hi]."""
    cands = [quad_eval(a2, a1, a0, lo), quad_eval(a2, a1, a0, hi)]
    if a2 != 0:
        vertex = -a1 / (2 * a2)
        if lo < vertex < hi:
            cands.append(quad_eval(a2, a1, a0, vertex))
    return min(cands), max(cands)
