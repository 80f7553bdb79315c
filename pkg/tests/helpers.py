"""Shared builders for randomized covering instances and stage fixtures."""

import random
from fractions import Fraction as F

from tangentcert.covering import CoverInstance
from tangentcert.piecewise import (C1Fn, SupportWindows, add_integral,
                                   build_perturbation, pl_from_points,
                                   spike_points)


def _rand_frac(rng, lo, hi, den=2 ** 12):
    lo, hi = F(lo), F(hi)
    return lo + (hi - lo) * F(rng.randint(0, den), den)


def make_passing_instance(rng: random.Random, tau=F(0)) -> CoverInstance:
    """Exact instance satisfying every hypothesis of the covering check.

    The base derivative is flat between u and v (so its oscillation there
    is zero), the perturbation is a spike window whose marked points land
    in (u, v), and the target point sits exactly on the base tangent.
    """
    u = _rand_frac(rng, F(1, 10), F(3, 10))
    eta = _rand_frac(rng, F(1, 64), F(1, 24))
    v = u + eta * _rand_frac(rng, F(1, 3), F(2, 3))
    x = _rand_frac(rng, F(7, 10), F(9, 10))
    delta = (x - v - eta) * _rand_frac(rng, F(1, 3), F(2, 3))
    eps = F(1, 2 ** rng.randint(1, 3))
    if not 6 * eta < eps * delta:
        eta = eps * delta / 8

    v = u + eta * _rand_frac(rng, F(1, 3), F(2, 3))
    slope = _rand_frac(rng, F(-1, 2), F(1, 2))
    g = pl_from_points([(0, slope), (1, slope)])
    base = C1Fn(g)

    # spike window centered right of the midpoint so both marked points
    # stay inside (u, v); half-width small enough for the closeness bound
    z_w = u + (v - u) * F(7, 8)
    d_w = min((v - u) * F(3, 4), eta / (4 * eps), z_w / 2, (1 - z_w) / 2)
    window = (z_w, d_w)
    h = build_perturbation(SupportWindows((window,)), eps)
    perturbed = add_integral(base, h)
    s1, s2 = spike_points(window)
    z = _rand_frac(rng, F(1, 4), F(3, 4))
    z = u + (v - u) * z
    y = base(z) + g(z) * (x - z)
    return CoverInstance(base=base, perturbed=perturbed, u=u, z=z, v=v, x=x,
                         y=y, eps=eps, delta=delta, eta=eta, s1=s1, s2=s2,
                         tau=tau)


def violate_numbers(inst: CoverInstance) -> CoverInstance:
    """Shrink x to break v + delta + eta < x, keeping the tangent exact."""
    x_new = inst.v + inst.delta / 2
    y_new = inst.base(inst.z) + inst.base.derivative(inst.z) * (x_new - inst.z)
    return CoverInstance(inst.base, inst.perturbed, inst.u, inst.z, inst.v,
                         x_new, y_new, inst.eps, inst.delta, inst.eta,
                         inst.s1, inst.s2, inst.tau)


def violate_tangent(inst: CoverInstance) -> CoverInstance:
    y_new = inst.y + inst.eta / 7 + 2 * inst.tau
    return CoverInstance(inst.base, inst.perturbed, inst.u, inst.z, inst.v,
                         inst.x, y_new, inst.eps, inst.delta, inst.eta,
                         inst.s1, inst.s2, inst.tau)


def violate_closeness(inst: CoverInstance) -> CoverInstance:
    """Add a far-away bump to the perturbed function only: the uniform
    distance blows past eta while the marked derivative offsets, the base
    slope data and the numbers stay intact."""
    lo = inst.x + (1 - inst.x) / 4
    hi = inst.x + 3 * (1 - inst.x) / 4
    center = (lo + hi) / 2
    half = (hi - lo) / 2
    bump = build_perturbation(SupportWindows(((center, half),)), F(1, 2))
    # a zero-mean bump integrates away; stack its positive half instead
    ramp = pl_from_points([(0, 0), (lo, 0), (center, 1), (hi, 0), (1, 0)])
    amp = 3 * inst.eta / half
    perturbed = add_integral(inst.perturbed, ramp.scale(amp))
    del bump
    return CoverInstance(inst.base, perturbed, inst.u, inst.z, inst.v,
                         inst.x, inst.y, inst.eps, inst.delta, inst.eta,
                         inst.s1, inst.s2, inst.tau)


def violate_slope(inst: CoverInstance) -> CoverInstance:
    """Tilt the base derivative inside (u, v) so its oscillation there
    exceeds eta; the tangent target is re-anchored so only the slope
    hypothesis breaks.  The perturbed function gets the same tilt, which
    keeps both the closeness and the spike offsets intact."""
    mid = (inst.u + inst.v) / 2
    half = (inst.v - inst.u) / 4
    tilt = pl_from_points([(0, 0), (mid - half, 0), (mid, 1),
                           (mid + half, 0), (1, 0)])
    amp = 3 * inst.eta
    base = add_integral(inst.base, tilt.scale(amp))
    perturbed = add_integral(inst.perturbed, tilt.scale(amp))
    y_new = base(inst.z) + base.derivative(inst.z) * (inst.x - inst.z)
    return CoverInstance(base, perturbed, inst.u, inst.z, inst.v,
                         inst.x, y_new, inst.eps, inst.delta, inst.eta,
                         inst.s1, inst.s2, inst.tau)


def violate_spikes(inst: CoverInstance) -> CoverInstance:
    """Report marked points where the derivative offset is not +-eps."""
    s1_bad = inst.s1 + (inst.s2 - inst.s1) / 3
    return CoverInstance(inst.base, inst.perturbed, inst.u, inst.z, inst.v,
                         inst.x, inst.y, inst.eps, inst.delta, inst.eta,
                         s1_bad, inst.s2, inst.tau)


VIOLATIONS = {
    "numbers": violate_numbers,
    "tangent": violate_tangent,
    "closeness": violate_closeness,
    "slope": violate_slope,
    "spikes": violate_spikes,
}
