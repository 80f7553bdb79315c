"""Finite unions of separated compact subintervals of (0,1).

These carry the nested stage sets of the construction.  Components are
kept separated (positive gaps), which makes component identity
unambiguous across all operations.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

_ZERO = Fraction(0)
_ONE = Fraction(1)


class EmptyUnionError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted tuple of disjoint, separated closed intervals in (0,1)."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ivs = tuple(sorted((_frac(l), _frac(r)) for l, r in self.intervals))
        object.__setattr__(self, "intervals", ivs)
        if not ivs:
            raise EmptyUnionError("interval union must be nonempty")
        for l, r in ivs:
            if not (0 < l < r < 1):
                raise ValueError(f"component [{l},{r}] not a nondegenerate "
                                 "compact subinterval of (0,1)")
        for (_, r0), (l1, _) in zip(ivs, ivs[1:]):
            if not r0 < l1:
                raise ValueError("components must be separated")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Fraction, Fraction]]) -> "IntervalUnion":
        return cls(tuple(pairs))

    # -- decomposition ------------------------------------------------

    @property
    def components(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self.intervals

    def right_endpoints(self) -> tuple[Fraction, ...]:
        return tuple(r for _, r in self.intervals)

    def mesh(self) -> Fraction:
        """Largest component length."""
        return max(r - l for l, r in self.intervals)

    def decompose(self):
        return self.components, frozenset(self.right_endpoints()), self.mesh()

    def measure(self) -> Fraction:
        return sum((r - l for l, r in self.intervals), _ZERO)

    # -- membership ---------------------------------------------------

    def component_containing(self, x) -> Optional[tuple[Fraction, Fraction]]:
        x = _frac(x)
        i = bisect.bisect_right([l for l, _ in self.intervals], x) - 1
        if i >= 0:
            l, r = self.intervals[i]
            if l <= x <= r:
                return (l, r)
        return None

    def contains_point(self, x) -> bool:
        return self.component_containing(x) is not None

    def interior_contains(self, x) -> bool:
        """True iff x lies strictly inside some component."""
        c = self.component_containing(x)
        return c is not None and c[0] < _frac(x) < c[1]

    def contains_interval(self, a, b) -> bool:
        """True iff the whole closed [a,b] lies in one component."""
        a, b = _frac(a), _frac(b)
        c = self.component_containing(a)
        return c is not None and c[0] <= a <= b <= c[1]

    def subset_of(self, other: "IntervalUnion") -> bool:
        return all(other.contains_interval(l, r) for l, r in self.intervals)

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        """Open gaps between consecutive components (excluding outside)."""
        return [(r0, l1) for (_, r0), (l1, _) in zip(self.intervals, self.intervals[1:])]

    def clip_to_open(self, u, v) -> list[tuple[Fraction, Fraction]]:
        """Closures of the components of this union intersected with (u,v).

        Degenerate intersections are dropped; callers enforce strictness at
        u and v themselves when anchoring points.
        """
        u, v = _frac(u), _frac(v)
        out = []
        for l, r in self.intervals:
            lo, hi = max(l, u), min(r, v)
            if lo < hi:
                out.append((lo, hi))
        return out


@dataclass(frozen=True)
class NestReport:
    """Relation of a refined union to its predecessor."""

    subset: bool
    right_monotone: bool
    refinement: bool
    notes: tuple[str, ...] = ()

    @property
    def nested(self) -> bool:
        return self.subset and self.right_monotone


def nest_check(new: IntervalUnion, old: IntervalUnion) -> NestReport:
    """Check new within old, right endpoints preserved, and that every old
    component holds at least two new components."""
    notes = []
    subset = new.subset_of(old)
    if not subset:
        bad = next((c for c in new.intervals if not old.contains_interval(*c)), None)
        notes.append(f"component {bad} escapes the old union")
    r_new = set(new.right_endpoints())
    right_monotone = all(r in r_new for r in old.right_endpoints())
    if not right_monotone:
        notes.append("an old right endpoint was dropped")
    refinement = True
    for l, r in old.intervals:
        inside = sum(1 for (a, b) in new.intervals if l <= a and b <= r)
        if inside < 2:
            refinement = False
            notes.append(f"old component [{l},{r}] holds {inside} new components")
    return NestReport(subset, right_monotone, refinement, tuple(notes))


def new_right_endpoints(current: IntervalUnion,
                        previous: Optional[IntervalUnion] = None) -> tuple[Fraction, ...]:
    """Right endpoints introduced by the current union.

    With no predecessor this is every right endpoint (the first stage);
    otherwise it is the set difference against the predecessor's.
    """
    if previous is None:
        return current.right_endpoints()
    old = set(previous.right_endpoints())
    return tuple(r for r in current.right_endpoints() if r not in old)
