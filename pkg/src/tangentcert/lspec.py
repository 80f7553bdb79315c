"""Closed planar sets given as complements of open axis-aligned boxes.

A box-complement L is the candidate closed l-neighborhood of the
refutation machinery: from every point of the protected set, every
direction is supposed to admit a small initial segment inside L.  With
rational boxes every segment test is exact, and the largest admissible
segment length along a ray is a closed-form minimum over box entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

_ZERO = Fraction(0)
_ONE = Fraction(1)

Point = tuple[Fraction, Fraction]
Box = tuple[Fraction, Fraction, Fraction, Fraction]  # x0, y0, x1, y1 (open)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LSpec:
    """L = plane minus a finite union of open boxes; H is that union."""

    complement_boxes: tuple[Box, ...]

    def __post_init__(self):
        boxes = []
        for b in self.complement_boxes:
            x0, y0, x1, y1 = (_frac(c) for c in b)
            if not (x0 < x1 and y0 < y1):
                raise ValueError("boxes must have positive area")
            boxes.append((x0, y0, x1, y1))
        object.__setattr__(self, "complement_boxes", tuple(sorted(boxes)))

    @property
    def h_empty(self) -> bool:
        return not self.complement_boxes

    def in_h(self, p: Point) -> bool:
        """Strict interior of some box."""
        x, y = p
        return any(x0 < x < x1 and y0 < y < y1
                   for x0, y0, x1, y1 in self.complement_boxes)

    def in_l(self, p: Point) -> bool:
        return not self.in_h(p)

    def _ray_box_entry(self, a: Point, v: Point, box: Box) -> Optional[Fraction]:
        """Smallest t >= 0 with a + t v strictly inside the open box, if the
        ray meets it; exact parameter clipping per axis."""
        ax, ay = a
        vx, vy = v
        x0, y0, x1, y1 = box
        lo, hi = _ZERO, None  # open parameter interval (lo, hi), t >= 0

        def clip(pos, vel, w0, w1, lo, hi):
            if vel == 0:
                if not (w0 < pos < w1):
                    return None
                return lo, hi
            t0, t1 = (w0 - pos) / vel, (w1 - pos) / vel
            if t0 > t1:
                t0, t1 = t1, t0
            lo = max(lo, t0)
            hi = t1 if hi is None else min(hi, t1)
            return lo, hi

        r = clip(ax, vx, x0, x1, lo, hi)
        if r is None:
            return None
        lo, hi = r
        r = clip(ay, vy, y0, y1, lo, hi)
        if r is None:
            return None
        lo, hi = r
        if hi is not None and lo >= hi:
            return None
        if hi is not None and hi <= 0:
            return None
        return max(lo, _ZERO)

    def segment_clearance(self, a: Point, v: Point, limit: Fraction = _ONE) -> Fraction:
        """Largest eps <= limit with the half-open segment a + [0, eps) v
        inside L; exact (0 when a itself sits in H)."""
        if self.in_h(a):
            return _ZERO
        eps = limit
        for box in self.complement_boxes:
            t = self._ray_box_entry(a, v, box)
            if t is not None and t < eps:
                # entering strictly inside at parameter t kills eps > t
                eps = t
        return eps

    def segment_in_l(self, a: Point, b: Point) -> bool:
        """Whether the closed segment [a, b] avoids every open box."""
        ax, ay = a
        v = (b[0] - ax, b[1] - ay)
        if v == (_ZERO, _ZERO):
            return self.in_l(a)
        clear = self.segment_clearance(a, v, _ONE)
        if clear < 1:
            return False
        return self.in_l(b)


def unit_directions(n: int) -> list[Point]:
    """n exactly-unit rational direction vectors spread over the circle.

    Tangent-half-angle points t = j/m parametrize a quarter turn; the
    eight sign/swap symmetries spread them around the circle.  The angular
    spacing is approximately uniform, which the scan report documents.
    """
    if n < 4:
        raise ValueError("need at least 4 directions")
    per_octant = -(-n // 8)
    while True:
        seen: list[Point] = []
        for j in range(per_octant):
            t = Fraction(j, 2 * per_octant)  # tan(theta/2), theta in [0, pi/4)
            den = 1 + t * t
            c, s = (1 - t * t) / den, 2 * t / den
            for d in ((c, s), (s, c), (-s, c), (-c, s),
                      (-c, -s), (-s, -c), (s, -c), (c, -s)):
                if d not in seen:
                    seen.append(d)
        if len(seen) >= n:
            return seen
        per_octant += 1


@dataclass(frozen=True)
class ScanEntry:
    point: Point
    direction: Point
    clearance: Fraction


@dataclass(frozen=True)
class ScanReport:
    """Directional clearance report; the direction quantifier is sampled
    on the recorded net, never claimed in full."""

    entries: tuple[ScanEntry, ...]
    min_clearance: Fraction
    failures: tuple[ScanEntry, ...]
    directions: int
    eps_min: Fraction

    @property
    def passed(self) -> bool:
        return not self.failures


def scan_l_neighborhood(L: LSpec, points: Iterable[Point], directions: int,
                        eps_min) -> ScanReport:
    """For each point and each net direction, the exact largest segment
    clearance (capped at 1); clearances below eps_min are failures."""
    eps_min = _frac(eps_min)
    dirs = unit_directions(directions)
    entries = []
    failures = []
    min_clear = None
    for p in points:
        p = (_frac(p[0]), _frac(p[1]))
        for v in dirs:
            c = L.segment_clearance(p, v)
            e = ScanEntry(p, v, c)
            entries.append(e)
            if min_clear is None or c < min_clear:
                min_clear = c
            if c < eps_min:
                failures.append(e)
    if min_clear is None:
        min_clear = _ONE
    return ScanReport(tuple(entries), min_clear, tuple(failures),
                      len(dirs), eps_min)
