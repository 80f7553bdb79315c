"""Finite-depth inductive construction engine with exact stage certificates.

Each stage adds a perturbation of the derivative supported on tiny windows
around chosen anchor points, solves a tangency problem inside every
window, and refines the stage set so that every retained right endpoint
keeps a certified tangent-envelope coverage of a ball around its graph
point.  All picks are canonical interior points of the feasible regions
(slack one half), so identical inputs reproduce bit-identical stages.

Pick-order note: the next stage's window scale and ball radius (and hence
this stage's tangency-defect budget) are pinned at the end of each stage
from monotone-safe lower bounds; this breaks the circular dependence of
the defect budget on quantities the next stage would otherwise choose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .intervals import IntervalUnion, nest_check, new_right_endpoints
from .piecewise import (C1Fn, MonotoneError, PiecewiseLinearFn, SupportWindows,
                        add_integral, build_base_derivative, build_perturbation,
                        nonmonotone_witness)
from .tangent import (EnvelopeBracket, TangencyDefect, affine_at,
                      ball_in_envelope, bracket_covers, envelope_member,
                      slope_witness_pairs, tangency_from_pairs)

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)

DEFAULT_DEPTH = 12


class PickFailureError(RuntimeError):
    """A constraint set for one of the stage picks became infeasible."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"{condition}: {detail}")
        self.condition = condition
        self.detail = detail


@dataclass(frozen=True)
class TangencyRecord:
    """Tangency pair solved inside one window (center None on stage one)."""

    center: Optional[Fraction]
    e: Fraction
    w: Fraction
    defect: Fraction


@dataclass(frozen=True)
class WindowInfo:
    """Window (u_d, v_d) attached to the right endpoint d born at ``birth``."""

    d: Fraction
    birth: int
    u: Fraction
    v: Fraction
    anchor: Fraction


@dataclass(frozen=True)
class BallTarget:
    """Coverage obligation: the ball around d's birth-stage graph point."""

    d: Fraction
    birth: int
    center: tuple[Fraction, Fraction]
    radius: Fraction


@dataclass(frozen=True)
class StageState:
    """Complete record of one construction stage."""

    k: int
    eta: Fraction
    tau: Fraction
    f: C1Fn
    P: IntervalUnion
    rstar: tuple[Fraction, ...]
    pairs: tuple[TangencyRecord, ...]
    z1: tuple[Fraction, ...]
    z2: tuple[Fraction, ...]
    z3: tuple[Fraction, ...]
    delta: Optional[Fraction]
    delta_star: Optional[Fraction]
    perturbation: Optional[PiecewiseLinearFn]
    windows: tuple[WindowInfo, ...]
    targets: tuple[BallTarget, ...]
    covers: tuple[tuple[Fraction, EnvelopeBracket], ...]
    anchors2: tuple[tuple[Fraction, Fraction, Fraction], ...]
    cds: tuple[tuple[Fraction, Fraction], ...]
    eta_next: Fraction
    delta_next: Fraction
    ledger: tuple[tuple[str, Fraction], ...]

    def window_for(self, d: Fraction) -> WindowInfo:
        for w in self.windows:
            if w.d == d:
                return w
        raise KeyError(f"no window for {d}")

    def target_for(self, d: Fraction) -> BallTarget:
        for t in self.targets:
            if t.d == d:
                return t
        raise KeyError(f"no target for {d}")

    def cover_for(self, d: Fraction) -> EnvelopeBracket:
        for dd, b in self.covers:
            if dd == d:
                return b
        raise KeyError(f"no cover for {d}")

    def pair_for_endpoint(self, d: Fraction) -> TangencyRecord:
        for rec in self.pairs:
            if rec.w == d:
                return rec
        raise KeyError(f"no tangency record for {d}")


def _min_positive(*vals: Fraction) -> Fraction:
    out = None
    for v in vals:
        if v is None:
            continue
        if out is None or v < out:
            out = v
    if out is None or out <= 0:
        raise PickFailureError("pick", "empty feasible region")
    return out


def first_stage(depth: int = DEFAULT_DEPTH) -> StageState:
    """Stage one: base function, global tangency pair, initial stage set."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    eta1 = _ONE
    f1 = C1Fn(build_base_derivative(depth))
    if f1.derivative.sup_norm() > _HALF:
        raise PickFailureError("bis", "base derivative exceeds 1/2")

    try:
        pairs = slope_witness_pairs(f1, _ZERO, _ONE)
    except MonotoneError as exc:  # impossible for the generator
        raise PickFailureError("nonmono", str(exc))
    gamma = pairs.min_gap
    delta2 = _HALF * _min_positive(gamma / 3, Fraction(1, 4), eta1)
    eta2 = _HALF * _min_positive(eta1 / 2, Fraction(1, 4) * delta2 / 6)
    tau1 = eta2 / 100

    res = tangency_from_pairs(f1, pairs, tau1 / 8)
    e, w = res.pair.e, res.pair.w
    P1 = IntervalUnion(((e / 2, w),))
    rec = TangencyRecord(None, e, w, res.pair.defect)
    return StageState(
        k=1, eta=eta1, tau=tau1, f=f1, P=P1, rstar=(w,), pairs=(rec,),
        z1=(), z2=(), z3=(), delta=None, delta_star=None, perturbation=None,
        windows=(), targets=(), covers=(), anchors2=(), cds=(),
        eta_next=eta2, delta_next=delta2,
        ledger=(("anchor", _ZERO), ("tangency", res.pair.defect)),
    )


def _component_right_end(P: IntervalUnion, z: Fraction) -> tuple[Fraction, Fraction]:
    comp = P.component_containing(z)
    if comp is None:
        raise PickFailureError("list", f"anchor {z} escaped the stage set")
    return comp


def inductive_step(prev: StageState) -> StageState:
    """Build stage m = prev.k + 1 from a verified predecessor."""
    m = prev.k + 1
    eta_m = prev.eta_next
    delta_m = prev.delta_next
    P_prev = prev.P
    f_prev = prev.f

    # anchors from the previous stage's tangency certificates
    z1 = []
    z_of_d: dict[Fraction, Fraction] = {}
    for d in prev.rstar:
        rec = prev.pair_for_endpoint(d)
        z1.append(rec.e)
        z_of_d[d] = rec.e
        if not (delta_m < (d - rec.e) / 3):
            raise PickFailureError("delta", f"window scale too large for d={d}")
    if not (delta_m < min(Fraction(1, 2 * m), prev.eta)):
        raise PickFailureError("delta", "global bound violated")
    if not (eta_m < prev.eta / 2 and 6 * eta_m < Fraction(1, 2 ** m) * delta_m):
        raise PickFailureError("eta2", "ball radius out of range")
    for wininfo in prev.windows:
        if wininfo.birth <= m - 2:
            if not (6 * eta_m < Fraction(1, 2 ** m) * (wininfo.d - wininfo.v) / 3):
                raise PickFailureError("eta3", f"radius too large near d={wininfo.d}")

    # re-anchor each older windowed endpoint through the previous bracket
    old_count = sum(1 for w in prev.windows)
    anchor_tau = eta_m / (200 * max(1, old_count))
    z2 = []
    anchors2 = []
    for wininfo in sorted(prev.windows, key=lambda w: w.d):
        bracket = prev.cover_for(wininfo.d)
        target = prev.target_for(wininfo.d)
        host = (min(bracket.s1, bracket.s2), max(bracket.s1, bracket.s2))
        wit = envelope_member(target.center, f_prev, [host], anchor_tau)
        if wit is None or not (wit.certified or wit.defect <= anchor_tau):
            raise PickFailureError("anchor", f"no tangent anchor for d={wininfo.d}")
        z2.append(wit.anchor)
        anchors2.append((wininfo.d, wit.anchor, wit.defect))

    taken = set(z1) | set(z2)
    z3 = []
    for (l, r) in P_prev.components:
        if not any(l <= z <= r for z in taken):
            z3.append((l + r) / 2)

    zs = sorted(set(z1) | set(z2) | set(z3))
    if len(zs) != len(z1) + len(z2) + len(z3):
        raise PickFailureError("list", "anchor collision across window roles")
    for z in zs:
        if not P_prev.interior_contains(z):
            raise PickFailureError("list", f"anchor {z} not interior")

    # window half-width: canonical interior point of all closed-form
    # constraints, then halved until the derivative oscillation fits
    bounds = [delta_m / 2, eta_m / (8 * len(zs))]
    for z in zs:
        l, r = _component_right_end(P_prev, z)
        bounds.append((z - l) / 2)
        bounds.append((r - z) / 4)
    for (z0, z1b) in zip(zs, zs[1:]):
        bounds.append((z1b - z0) / 4)
    for (d, z, _) in anchors2:
        wininfo = prev.window_for(d)
        bounds.append((z - wininfo.u) / 2)
        bounds.append((wininfo.v - z) / 2)
    delta_star = _HALF * _min_positive(*bounds)
    for _ in range(400):
        if all(f_prev.derivative.oscillation(z - delta_star, z + delta_star) <= eta_m
               for z in zs):
            break
        delta_star /= 2
    else:
        raise PickFailureError("osc", "oscillation bound not reached")

    windows = SupportWindows(tuple((z, delta_star) for z in zs))
    amplitude = Fraction(1, 2 ** m)
    h = build_perturbation(windows, amplitude)
    if h.sup_norm() != amplitude:
        raise PickFailureError("hm", "perturbation norm drifted")
    if not windows.measure() < eta_m / 2:
        raise PickFailureError("sjmale", "window union too large")
    f_m = add_integral(f_prev, h)

    # tangency pairs inside every window; the pinned quantities below use
    # only pre-bisection gap lower bounds, so later refinement cannot
    # invalidate them
    pair_brackets = {}
    gamma = None
    for z in zs:
        try:
            pb = slope_witness_pairs(f_m, z, z + delta_star)
        except MonotoneError as exc:
            raise PickFailureError("nonmono", f"window at {z}: {exc}")
        pair_brackets[z] = pb
        gamma = pb.min_gap if gamma is None else min(gamma, pb.min_gap)

    delta_next = _HALF * _min_positive(gamma / 3, Fraction(1, 2 * (m + 1)), eta_m)
    eta_bounds = [eta_m / 2, Fraction(1, 2 ** (m + 1)) * delta_next / 6]
    for d in prev.rstar:
        lb = d - (z_of_d[d] + delta_star)
        if lb <= 0:
            raise PickFailureError("uvpr", f"no headroom right of d={d}")
        eta_bounds.append(Fraction(1, 2 ** (m + 1)) * lb / 18)
    for wininfo in prev.windows:
        eta_bounds.append(Fraction(1, 2 ** (m + 1)) * (wininfo.d - wininfo.v) / 18)
    eta_next = _HALF * _min_positive(*eta_bounds)
    tau_m = eta_next / 100

    pair_tau = tau_m / (8 * len(zs))
    recs = []
    w_of_z = {}
    tang_sum = _ZERO
    for z in zs:
        res = tangency_from_pairs(f_m, pair_brackets[z], pair_tau)
        recs.append(TangencyRecord(z, res.pair.e, res.pair.w, res.pair.defect))
        w_of_z[z] = res.pair.w
        tang_sum += res.pair.defect
        if not (z < res.pair.e < res.pair.w < z + delta_star):
            raise PickFailureError("vw", f"tangency pair escaped window at {z}")

    # windows and coverage targets for the endpoints born last stage
    new_windows = []
    new_targets = []
    for d in prev.rstar:
        zd = z_of_d[d]
        u_d, v_d = zd - delta_star, w_of_z[zd]
        if not (0 < u_d < v_d < d):
            raise PickFailureError("uvpr", f"window ordering broken at d={d}")
        if not P_prev.contains_interval(u_d, d):
            raise PickFailureError("uvpr", f"[u,d] escapes the stage set at d={d}")
        if not 3 * eta_m < d - v_d:
            raise PickFailureError("uvpr", f"gap to d too small at d={d}")
        new_windows.append(WindowInfo(d, prev.k, u_d, v_d, zd))
        new_targets.append(BallTarget(d, prev.k, (d, f_prev(d)), eta_m))

    all_windows = tuple(sorted(prev.windows + tuple(new_windows), key=lambda w: w.d))
    all_targets = tuple(sorted(prev.targets + tuple(new_targets), key=lambda t: t.d))

    # retained right endpoints: trimmed pieces avoiding every window
    cds = []
    pieces = []
    for d in P_prev.right_endpoints():
        l, r = P_prev.component_containing(d)
        in_comp = [z for z in zs if l <= z <= r]
        if not in_comp:
            raise PickFailureError("z3", f"component of {d} has no window")
        w_right = max(z + delta_star for z in in_comp)
        c_d = max(d - Fraction(1, 2 * m), (w_right + d) / 2)
        if not (w_right + delta_star / 2 <= c_d < d and l < c_d):
            raise PickFailureError("cd", f"no admissible trim point before d={d}")
        cds.append((d, c_d))
        pieces.append((c_d, d))
    for z in zs:
        pieces.append((z - delta_star, w_of_z[z]))
    P_m = IntervalUnion(tuple(pieces))

    report = nest_check(P_m, P_prev)
    if not (report.nested and report.refinement):
        raise PickFailureError("pkvl", "; ".join(report.notes))
    if not P_m.mesh() <= Fraction(1, m):
        raise PickFailureError("pkvl", "mesh too coarse")
    rstar = new_right_endpoints(P_m, P_prev)
    if sorted(rstar) != sorted(w_of_z.values()):
        raise PickFailureError("defrh", "unexpected new right endpoints")

    # coverage certificates at this stage for every windowed endpoint
    covers = []
    for wininfo in all_windows:
        target = next(t for t in all_targets if t.d == wininfo.d)
        hosts = P_m.clip_to_open(wininfo.u, wininfo.v)
        bracket = ball_in_envelope(target.center, target.radius, f_m, hosts)
        if bracket is None:
            raise PickFailureError(
                "uvdr", f"no covering bracket for d={wininfo.d} at stage {m}")
        covers.append((wininfo.d, bracket))

    anchor_sum = sum((a[2] for a in anchors2), _ZERO)
    if tang_sum > tau_m or anchor_sum > eta_m / 100:
        raise PickFailureError("tau", "defect ledger exceeded its budget")

    return StageState(
        k=m, eta=eta_m, tau=tau_m, f=f_m, P=P_m, rstar=tuple(sorted(rstar)),
        pairs=tuple(recs), z1=tuple(sorted(z1)), z2=tuple(sorted(z2)),
        z3=tuple(sorted(z3)), delta=delta_m, delta_star=delta_star,
        perturbation=h, windows=all_windows, targets=all_targets,
        covers=tuple(covers), anchors2=tuple(anchors2), cds=tuple(cds),
        eta_next=eta_next, delta_next=delta_next,
        ledger=(("anchor", anchor_sum), ("tangency", tang_sum)),
    )


def run_stages(stages: int, depth: int = DEFAULT_DEPTH) -> list[StageState]:
    """Run the construction through the requested number of stages."""
    if stages < 1:
        raise ValueError("stages must be >= 1")
    states = [first_stage(depth)]
    for _ in range(stages - 1):
        states.append(inductive_step(states[-1]))
    return states


# -- verification -------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    condition: str
    stage: int
    subject: str
    ok: bool
    note: str = ""


@dataclass(frozen=True)
class StageCertificate:
    verdicts: tuple[Verdict, ...]
    passed: bool

    def failing(self) -> tuple[Verdict, ...]:
        return tuple(v for v in self.verdicts if not v.ok)

    def first_failing(self) -> Optional[Verdict]:
        bad = self.failing()
        return bad[0] if bad else None


def _check(verdicts: list, condition: str, stage: int, subject: str,
           ok: bool, note: str = "") -> None:
    verdicts.append(Verdict(condition, stage, subject, bool(ok), note))


def verify_stage(states: Sequence[StageState]) -> StageCertificate:
    """Exhaustively re-check every stage condition instance on the exact
    rational path; failures are recorded, never raised."""
    if not states:
        raise ValueError("need at least one stage")
    v: list[Verdict] = []
    for idx, st in enumerate(states):
        k = st.k
        prev = states[idx - 1] if idx > 0 else None
        if prev is not None and prev.k + 1 != k:
            raise ValueError("stages must be contiguous")

        if k == 1:
            _check(v, "eta", k, "", st.eta == 1)
        else:
            _check(v, "eta", k, "", _ZERO < st.eta < prev.eta / 2,
                   f"eta={st.eta}")

        ok_ival = all(0 < l < r < 1 for l, r in st.P.components)
        _check(v, "pktvar", k, "", ok_ival and len(st.P.components) >= 1)

        if k >= 2:
            rep = nest_check(st.P, prev.P)
            _check(v, "pkvl", k, "mesh", st.P.mesh() <= Fraction(1, k),
                   f"mesh={st.P.mesh()}")
            _check(v, "pkvl", k, "subset", rep.subset)
            _check(v, "pkvl", k, "right-endpoints", rep.right_monotone)
            _check(v, "pkvl2", k, "", rep.refinement)

        if k == 1:
            try:
                nonmonotone_witness(st.f.derivative, _ZERO, _ONE)
                _check(v, "nonmono", k, "(0,1)", True)
            except MonotoneError:
                _check(v, "nonmono", k, "(0,1)", False)
        else:
            for z in st.z1 + st.z2 + st.z3:
                try:
                    nonmonotone_witness(st.f.derivative, z, z + st.delta_star)
                    _check(v, "nonmono", k, str(z), True)
                except MonotoneError:
                    _check(v, "nonmono", k, str(z), False)

        _check(v, "bis", k, "f(0)", st.f(0) == 0)
        if k == 1:
            _check(v, "bis", k, "slope", st.f.derivative.sup_norm() <= _HALF,
                   f"|f1'|={st.f.derivative.sup_norm()}")

        if k >= 2:
            val_gap = st.f.diff(prev.f).sup_norm()
            slope_gap = st.f.derivative.sub(prev.f.derivative).sup_norm()
            _check(v, "fkvl", k, "values", val_gap < st.eta / 2,
                   f"|f_k-f_(k-1)|={val_gap}")
            _check(v, "fkvl", k, "slopes", slope_gap == Fraction(1, 2 ** k),
                   f"|f_k'-f_(k-1)'|={slope_gap}")
            _check(v, "delta", k, "",
                   st.delta < min(Fraction(1, 2 * k), prev.eta))
            _check(v, "eta2", k, "",
                   6 * st.eta < Fraction(1, 2 ** k) * st.delta)
            for wininfo in st.windows:
                if wininfo.birth <= k - 2:
                    _check(v, "eta3", k, str(wininfo.d),
                           6 * st.eta < Fraction(1, 2 ** k) * (wininfo.d - wininfo.v) / 3)

        # windows created for endpoints born at stage k-1 and earlier
        for wininfo in st.windows:
            birth_state = states[wininfo.birth - 1]
            target = st.target_for(wininfo.d)
            _check(v, "uvpr", k, str(wininfo.d),
                   _ZERO < wininfo.u < wininfo.v < wininfo.d
                   and birth_state.P.contains_interval(wininfo.u, wininfo.d)
                   and 3 * target.radius < wininfo.d - wininfo.v)
            bracket = st.cover_for(wininfo.d)
            inside = (wininfo.u < bracket.s1 < bracket.s2 < wininfo.v
                      and st.P.contains_interval(bracket.s1, bracket.s2)
                      and st.P.interior_contains(bracket.s1)
                      and st.P.interior_contains(bracket.s2))
            covered = bracket_covers(bracket, target.center, target.radius, st.f)
            _check(v, "uvdr", k, f"d={wininfo.d},l={k}", inside and covered,
                   f"margin={bracket.margin}")

        for rec in st.pairs:
            d = rec.w
            ok = (st.P.contains_interval(rec.e, d)
                  and st.P.interior_contains(rec.e)
                  and rec.defect <= st.tau)
            _check(v, "dz", k, str(d), ok, f"defect={rec.defect}")

    passed = all(x.ok for x in v)
    return StageCertificate(tuple(v), passed)


# -- finite-depth limit premises ----------------------------------------


@dataclass(frozen=True)
class PremisesReport:
    """Finite-depth evidence for the refutation lemma's premises."""

    tails: tuple[tuple[int, Fraction, Fraction, bool], ...]
    coverage: tuple[tuple[Fraction, bool], ...]
    dep: tuple[tuple[Fraction, Fraction, Fraction, bool], ...]
    passed: bool


def descent_premises(states: Sequence[StageState]) -> PremisesReport:
    """Check (a) exact uniform tail bounds |f_K - f_k| < eta_{k+1},
    (b) final-stage ball coverage per windowed endpoint, and
    (c) the window-width decay d - u_d < 1/birth that keeps the set of
    wide windows finite at every scale coarser than 1/K."""
    if len(states) < 1:
        raise ValueError("need stages")
    last = states[-1]
    tails = []
    for st in states[:-1]:
        sup = last.f.diff(st.f).sup_norm()
        bound = st.eta_next
        tails.append((st.k, sup, bound, sup < bound))
    coverage = []
    for wininfo in last.windows:
        target = last.target_for(wininfo.d)
        bracket = last.cover_for(wininfo.d)
        coverage.append((wininfo.d,
                         bracket_covers(bracket, target.center, target.radius, last.f)))
    dep = []
    for wininfo in last.windows:
        width = wininfo.d - wininfo.u
        bound = Fraction(1, wininfo.birth)
        dep.append((wininfo.d, width, bound, width < bound))
    passed = (all(t[3] for t in tails) and all(c[1] for c in coverage)
              and all(d[3] for d in dep))
    return PremisesReport(tuple(tails), tuple(coverage), tuple(dep), passed)
