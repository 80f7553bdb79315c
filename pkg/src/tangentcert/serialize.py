"""JSON encoding of every certified object, rationals as "p/q" strings.

No floating values appear in certified artifacts; dumps round-trip to
bit-identical in-memory objects, which the verify command re-checks.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .construct import (BallTarget, StageState, TangencyRecord, WindowInfo)
from .intervals import IntervalUnion
from .lspec import LSpec
from .piecewise import C1Fn, PiecewiseLinearFn
from .refute import DescentStep, DescentTrace
from .tangent import EnvelopeBracket


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise ValueError(f"expected a rational string, got {s!r}")


def pl_to_json(g: PiecewiseLinearFn) -> list[list[str]]:
    return [[frac_str(x), frac_str(v)] for x, v in zip(g.breakpoints, g.values)]


def pl_from_json(data) -> PiecewiseLinearFn:
    xs = tuple(parse_frac(x) for x, _ in data)
    vs = tuple(parse_frac(v) for _, v in data)
    return PiecewiseLinearFn(xs, vs)


def union_to_json(P: IntervalUnion) -> list[list[str]]:
    return [[frac_str(l), frac_str(r)] for l, r in P.components]


def union_from_json(data) -> IntervalUnion:
    return IntervalUnion(tuple((parse_frac(l), parse_frac(r)) for l, r in data))


def bracket_to_json(b: EnvelopeBracket) -> dict:
    return {
        "s1": frac_str(b.s1), "s2": frac_str(b.s2),
        "margin": frac_str(b.margin),
        "host": [frac_str(b.host[0]), frac_str(b.host[1])],
        "inverted": b.inverted,
    }


def bracket_from_json(d) -> EnvelopeBracket:
    return EnvelopeBracket(parse_frac(d["s1"]), parse_frac(d["s2"]),
                           parse_frac(d["margin"]),
                           (parse_frac(d["host"][0]), parse_frac(d["host"][1])),
                           bool(d["inverted"]))


def stage_to_json(st: StageState) -> dict:
    out: dict[str, Any] = {
        "k": st.k,
        "eta": frac_str(st.eta),
        "P": union_to_json(st.P),
        "f_derivative": pl_to_json(st.f.derivative),
        "windows": {frac_str(w.d): [frac_str(w.u), frac_str(w.v)]
                    for w in st.windows},
        "defects": {label: frac_str(v) for label, v in st.ledger},
    }
    out["internals"] = {
        "tau": frac_str(st.tau),
        "eta_next": frac_str(st.eta_next),
        "delta_next": frac_str(st.delta_next),
        "delta": None if st.delta is None else frac_str(st.delta),
        "delta_star": None if st.delta_star is None else frac_str(st.delta_star),
        "rstar": [frac_str(d) for d in st.rstar],
        "pairs": [{"center": None if r.center is None else frac_str(r.center),
                   "e": frac_str(r.e), "w": frac_str(r.w),
                   "defect": frac_str(r.defect)} for r in st.pairs],
        "z1": [frac_str(z) for z in st.z1],
        "z2": [frac_str(z) for z in st.z2],
        "z3": [frac_str(z) for z in st.z3],
        "perturbation": None if st.perturbation is None else pl_to_json(st.perturbation),
        "window_info": [{"d": frac_str(w.d), "birth": w.birth,
                         "u": frac_str(w.u), "v": frac_str(w.v),
                         "anchor": frac_str(w.anchor)} for w in st.windows],
        "targets": [{"d": frac_str(t.d), "birth": t.birth,
                     "center": [frac_str(t.center[0]), frac_str(t.center[1])],
                     "radius": frac_str(t.radius)} for t in st.targets],
        "covers": [[frac_str(d), bracket_to_json(b)] for d, b in st.covers],
        "anchors2": [[frac_str(d), frac_str(z), frac_str(df)]
                     for d, z, df in st.anchors2],
        "cds": [[frac_str(d), frac_str(c)] for d, c in st.cds],
    }
    return out


def stage_from_json(data) -> StageState:
    inn = data["internals"]
    windows = tuple(WindowInfo(parse_frac(w["d"]), int(w["birth"]),
                               parse_frac(w["u"]), parse_frac(w["v"]),
                               parse_frac(w["anchor"]))
                    for w in inn["window_info"])
    targets = tuple(BallTarget(parse_frac(t["d"]), int(t["birth"]),
                               (parse_frac(t["center"][0]), parse_frac(t["center"][1])),
                               parse_frac(t["radius"]))
                    for t in inn["targets"])
    return StageState(
        k=int(data["k"]),
        eta=parse_frac(data["eta"]),
        tau=parse_frac(inn["tau"]),
        f=C1Fn(pl_from_json(data["f_derivative"])),
        P=union_from_json(data["P"]),
        rstar=tuple(parse_frac(d) for d in inn["rstar"]),
        pairs=tuple(TangencyRecord(
            None if r["center"] is None else parse_frac(r["center"]),
            parse_frac(r["e"]), parse_frac(r["w"]), parse_frac(r["defect"]))
            for r in inn["pairs"]),
        z1=tuple(parse_frac(z) for z in inn["z1"]),
        z2=tuple(parse_frac(z) for z in inn["z2"]),
        z3=tuple(parse_frac(z) for z in inn["z3"]),
        delta=None if inn["delta"] is None else parse_frac(inn["delta"]),
        delta_star=None if inn["delta_star"] is None else parse_frac(inn["delta_star"]),
        perturbation=None if inn["perturbation"] is None else pl_from_json(inn["perturbation"]),
        windows=windows,
        targets=targets,
        covers=tuple((parse_frac(d), bracket_from_json(b)) for d, b in inn["covers"]),
        anchors2=tuple((parse_frac(d), parse_frac(z), parse_frac(df))
                       for d, z, df in inn["anchors2"]),
        cds=tuple((parse_frac(d), parse_frac(c)) for d, c in inn["cds"]),
        eta_next=parse_frac(inn["eta_next"]),
        delta_next=parse_frac(inn["delta_next"]),
        ledger=tuple((label, parse_frac(v)) for label, v in data["defects"].items()),
    )


def lspec_to_json(L: LSpec) -> dict:
    return {"complement_boxes": [[frac_str(c) for c in box]
                                 for box in L.complement_boxes]}


def lspec_from_json(data) -> LSpec:
    return LSpec(tuple(tuple(parse_frac(c) for c in box)
                       for box in data["complement_boxes"]))


def trace_to_json(tr: DescentTrace) -> dict:
    return {
        "p": frac_str(tr.p),
        "f_at_p": frac_str(tr.f_at_p),
        "lip_bound": frac_str(tr.lip_bound),
        "a0": frac_str(tr.a0),
        "b0": frac_str(tr.b0),
        "no_w_at": tr.no_w_at,
        "steps": [{
            "n": s.n, "d": frac_str(s.d), "reused": s.reused,
            "box": [frac_str(c) for c in s.box],
            "xi": frac_str(s.xi), "x_n": frac_str(s.x_n),
            "a_n": frac_str(s.a_n), "b_n": frac_str(s.b_n),
            "witness": [frac_str(s.witness[0]), frac_str(s.witness[1])],
            "norm_sq": frac_str(s.norm_sq), "bound_sq": frac_str(s.bound_sq),
            "interval_ok": s.interval_ok, "nested_ok": s.nested_ok,
            "witness_ok": s.witness_ok, "ball_ok": s.ball_ok,
        } for s in tr.steps],
    }


def trace_from_json(data) -> DescentTrace:
    steps = tuple(DescentStep(
        n=int(s["n"]), d=parse_frac(s["d"]), reused=bool(s["reused"]),
        box=tuple(parse_frac(c) for c in s["box"]),
        xi=parse_frac(s["xi"]), x_n=parse_frac(s["x_n"]),
        a_n=parse_frac(s["a_n"]), b_n=parse_frac(s["b_n"]),
        witness=(parse_frac(s["witness"][0]), parse_frac(s["witness"][1])),
        norm_sq=parse_frac(s["norm_sq"]), bound_sq=parse_frac(s["bound_sq"]),
        interval_ok=bool(s["interval_ok"]), nested_ok=bool(s["nested_ok"]),
        witness_ok=bool(s["witness_ok"]), ball_ok=bool(s["ball_ok"]))
        for s in data["steps"])
    return DescentTrace(steps, parse_frac(data["p"]), parse_frac(data["f_at_p"]),
                        parse_frac(data["lip_bound"]), parse_frac(data["a0"]),
                        parse_frac(data["b0"]), data["no_w_at"])


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)
