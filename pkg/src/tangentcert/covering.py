"""Checker for the ball-covering inference used by the stage engine.

Given a base function, a perturbed function whose derivative has been
offset by -eps and +eps at two marked points of a small interval, and a
handful of size conditions, tangents of the perturbed function anchored in
that interval sweep a whole ball around a point on a tangent of the base
function.  ``check_cover`` validates the hypotheses exactly and certifies
the conclusion through the two extreme affine evaluations; ``sample_cover``
is an independent sampling oracle for the same conclusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .piecewise import C1Fn
from .tangent import affine_at, envelope_member, sample_ball

_ZERO = Fraction(0)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CoverInstance:
    """One concrete instance of the covering inference.

    Geometry: 0 < u < z < v < x < 1 with u < s1 < s2 < v; ``y`` is the
    target ordinate, ``eps``/``delta``/``eta`` the size parameters and
    ``tau`` the tangency-defect budget for the two relaxed equalities.
    """

    base: C1Fn
    perturbed: C1Fn
    u: Fraction
    z: Fraction
    v: Fraction
    x: Fraction
    y: Fraction
    eps: Fraction
    delta: Fraction
    eta: Fraction
    s1: Fraction
    s2: Fraction
    tau: Fraction = _ZERO

    def __post_init__(self):
        for name in ("u", "z", "v", "x", "y", "eps", "delta", "eta",
                     "s1", "s2", "tau"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if not (0 < self.u < self.z < self.v < self.x < 1):
            raise ValueError("need 0 < u < z < v < x < 1")
        if not (self.u < self.s1 < self.s2 < self.v):
            raise ValueError("need u < s1 < s2 < v")
        if self.eps <= 0 or self.delta <= 0 or self.eta <= 0 or self.tau < 0:
            raise ValueError("eps, delta, eta must be positive; tau >= 0")


@dataclass(frozen=True)
class CoverReport:
    """Per-hypothesis verdicts plus the certified conclusion margins.

    ``margin_low`` is the worst-case y - h(s1) and ``margin_high`` the
    worst-case h(s2) - y over the two extreme abscissae; ``passed`` holds
    when every hypothesis is true and both margins reach eta minus the
    tau-slack.
    """

    numbers_ok: bool          # v + delta + eta < x, v - u < eta, 6 eta < eps delta
    tangent_ok: bool          # (x,y) on the base tangent at z, up to tau
    closeness_ok: bool        # sup |base - perturbed| <= eta
    slope_ok: bool            # sup |base'| <= 1 and osc(base', [u,v]) <= eta
    spike_ok: bool            # perturbed' offset by -eps / +eps at s1 / s2, up to tau
    margin_low: Fraction
    margin_high: Fraction
    slack: Fraction
    tangent_defect: Fraction
    spike_defects: tuple[Fraction, Fraction]
    passed: bool

    @property
    def hypotheses_ok(self) -> bool:
        return (self.numbers_ok and self.tangent_ok and self.closeness_ok
                and self.slope_ok and self.spike_ok)

    def failing(self) -> tuple[str, ...]:
        names = (("numbers", self.numbers_ok), ("tangent", self.tangent_ok),
                 ("closeness", self.closeness_ok), ("slope", self.slope_ok),
                 ("spikes", self.spike_ok))
        return tuple(n for n, ok in names if not ok)


def margin_slack(inst: CoverInstance) -> Fraction:
    """Margin debit charged for the two tau-relaxed equalities; linear in
    tau with the lever |x - u| of the affine evaluations."""
    return 6 * inst.tau * (1 + abs(inst.x - inst.u))


def margin_terms(inst: CoverInstance, s: Fraction, x_bar: Fraction
                 ) -> tuple[Fraction, ...]:
    """Telescoping decomposition of y - h(s) at abscissa x_bar.

    Terms: base-value drift z->s, base-vs-perturbed value at s, derivative
    offset times lever, slope times x - x_bar, slope times s - z, and the
    slope-oscillation cross term; the leading residual y - A_{base,z}(x)
    makes the identity exact for relaxed instances.
    """
    G, Gt = inst.base, inst.perturbed
    g, gt = G.derivative, Gt.derivative
    z, x, y = inst.z, inst.x, inst.y
    t0 = y - affine_at(G, z)(x)
    t1 = G(z) - G(s)
    t2 = G(s) - Gt(s)
    t3 = (g(s) - gt(s)) * (x_bar - s)
    t4 = g(s) * (x - x_bar)
    t5 = g(s) * (s - z)
    t6 = (g(z) - g(s)) * (x - z)
    return (t0, t1, t2, t3, t4, t5, t6)


def check_cover(inst: CoverInstance) -> CoverReport:
    """Evaluate the five hypothesis groups exactly and certify the
    conclusion by the bracket evaluations at both extreme abscissae."""
    G, Gt = inst.base, inst.perturbed
    g, gt = G.derivative, Gt.derivative

    numbers_ok = (inst.v + inst.delta + inst.eta < inst.x
                  and inst.v - inst.u < inst.eta
                  and 6 * inst.eta < inst.eps * inst.delta)

    tangent_defect = abs(affine_at(G, inst.z)(inst.x) - inst.y)
    tangent_ok = tangent_defect <= inst.tau

    closeness_ok = G.diff(Gt).sup_norm() <= inst.eta

    slope_ok = (g.sup_norm() <= 1
                and g.oscillation(inst.u, inst.v) <= inst.eta)

    d1 = abs(gt(inst.s1) - (g(inst.s1) - inst.eps))
    d2 = abs(gt(inst.s2) - (g(inst.s2) + inst.eps))
    spike_ok = d1 <= inst.tau and d2 <= inst.tau

    lows = []
    highs = []
    for x_bar in (inst.x - inst.eta, inst.x + inst.eta):
        h1 = affine_at(Gt, inst.s1)(x_bar)
        h2 = affine_at(Gt, inst.s2)(x_bar)
        lows.append(inst.y - h1)
        highs.append(h2 - inst.y)
    margin_low, margin_high = min(lows), min(highs)

    slack = margin_slack(inst)
    passed = (numbers_ok and tangent_ok and closeness_ok and slope_ok
              and spike_ok and margin_low >= inst.eta - slack
              and margin_high >= inst.eta - slack)
    return CoverReport(numbers_ok, tangent_ok, closeness_ok, slope_ok,
                       spike_ok, margin_low, margin_high, slack,
                       tangent_defect, (d1, d2), passed)


def covers_point(inst: CoverInstance, point: tuple[Fraction, Fraction]) -> bool:
    """Exact membership of one point in the perturbed tangent envelope over
    (u, v): first the cheap s1/s2 sign bracket, then full root isolation."""
    x_bar, y_bar = point
    h1 = affine_at(inst.perturbed, inst.s1)(x_bar) - y_bar
    h2 = affine_at(inst.perturbed, inst.s2)(x_bar) - y_bar
    if h1 == 0 or h2 == 0 or (h1 < 0) != (h2 < 0):
        return True
    w = envelope_member(point, inst.perturbed, [(inst.u, inst.v)], inst.tau)
    return w is not None and (w.certified or w.defect <= inst.tau)


def sample_cover(inst: CoverInstance, n: int, seed: int = 0) -> Fraction:
    """Covered fraction of n deterministic rational points of the open ball
    B((x, y), eta) under the perturbed envelope over (u, v)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = sample_ball((inst.x, inst.y), inst.eta, n, seed)
    hit = sum(1 for p in pts if covers_point(inst, p))
    return Fraction(hit, len(pts))
