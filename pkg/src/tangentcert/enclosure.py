"""Outward-rounded rational enclosures for the one non-polynomial map.

Square roots are enclosed by integer-square-root bounds at a requested
bit precision; everything else stays exact rational, so enclosures here
are rigorous without floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

_ZERO = Fraction(0)


def sqrt_interval(r: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure [lo, hi] of sqrt(r) with lo^2 <= r <= hi^2, r >= 0."""
    if r < 0:
        raise ValueError("negative radicand")
    if r == 0:
        return _ZERO, _ZERO
    num, den = r.numerator, r.denominator
    scale = 1 << bits
    s = isqrt(num * den * scale * scale)
    lo = Fraction(s, den * scale)
    if lo * lo == r:
        return lo, lo
    return lo, Fraction(s + 1, den * scale)


def ratio_over_sqrt(u_lo: Fraction, u_hi: Fraction,
                    v_lo: Fraction, v_hi: Fraction,
                    bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure of h(u, v) = u / sqrt(u^2 + v^2) over a box of (u, v).

    h is increasing in u, and for fixed u it moves toward 0 as |v| grows,
    so the extremes sit at (u_lo, v of extreme |v|) and (u_hi, ...); the
    only outward rounding is the square root.
    """
    if u_lo > u_hi or v_lo > v_hi:
        raise ValueError("empty box")
    if v_lo <= 0 <= v_hi:
        vmin = _ZERO
    else:
        vmin = min(abs(v_lo), abs(v_hi))
    vmax = max(abs(v_lo), abs(v_hi))

    def h_bound(u: Fraction, vabs: Fraction, want_lower: bool) -> Fraction:
        if u == 0 and vabs == 0:
            raise ValueError("h undefined at the origin")
        if u == 0:
            return _ZERO
        s_lo, s_hi = sqrt_interval(u * u + vabs * vabs, bits)
        if u > 0:
            return u / s_hi if want_lower else u / s_lo
        # u < 0: dividing by the smaller root makes the value more negative
        if s_lo == 0:
            raise ValueError("precision too low for sqrt lower bound")
        return u / s_lo if want_lower else u / s_hi

    lo = h_bound(u_lo, vmax if u_lo >= 0 else vmin, True)
    hi = h_bound(u_hi, vmin if u_hi >= 0 else vmax, False)
    return lo, hi
