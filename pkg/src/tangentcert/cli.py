"""Command-line driver: build stages, verify dumps, refute, project, plot.

Exit codes: 0 success, 2 verification failure, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import plots, serialize
from .construct import (DEFAULT_DEPTH, PickFailureError, descent_premises,
                        inductive_step, run_stages, verify_stage)
from .lspec import LSpec
from .projections import central_projection_gaps, linear_projection_gaps
from .refute import PreconditionError, descend
from .serialize import dumps, frac_str


@dataclass
class RunConfig:
    """Build parameters; ``depth`` None resolves to the feasible default
    (the sawtooth has 2**depth pieces, so depth stays small)."""

    stages: int = 4
    depth: Optional[int] = None
    out: Path = Path("out")
    samples: int = 1000
    seed: int = 0

    def resolved_depth(self) -> int:
        return DEFAULT_DEPTH if self.depth is None else self.depth


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_states(out: Path):
    stage_files = sorted(out.glob("stage_*.json"),
                         key=lambda p: int(p.stem.split("_")[1]))
    if not stage_files:
        raise FileNotFoundError(f"no stage dumps under {out}")
    return [serialize.stage_from_json(json.loads(p.read_text())) for p in stage_files]


def _certificate_json(cert) -> dict:
    return {
        "passed": cert.passed,
        "verdicts": [{
            "condition": v.condition, "stage": v.stage, "subject": v.subject,
            "ok": v.ok, "note": v.note,
        } for v in cert.verdicts],
    }


def _premises_json(rep) -> dict:
    return {
        "passed": rep.passed,
        "tails": [[k, frac_str(s), frac_str(b), ok] for k, s, b, ok in rep.tails],
        "coverage": [[frac_str(d), ok] for d, ok in rep.coverage],
        "dep": [[frac_str(d), frac_str(w), frac_str(b), ok]
                for d, w, b, ok in rep.dep],
    }


def cmd_build(args) -> int:
    cfg = RunConfig(stages=args.stages, depth=args.depth, out=Path(args.out),
                    samples=args.samples, seed=args.seed)
    try:
        states = run_stages(cfg.stages, cfg.resolved_depth())
    except PickFailureError as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return 2
    if args.tamper_eta is not None:
        # test hook: corrupt one stage's ball radius before verification
        import dataclasses
        k = args.tamper_eta
        states = [dataclasses.replace(st, eta=Fraction(3, 5)) if st.k == k else st
                  for st in states]
    cert = verify_stage(states)
    premises = descent_premises(states)
    for st in states:
        _write(cfg.out / f"stage_{st.k}.json", dumps(serialize.stage_to_json(st)))
    _write(cfg.out / "certificate.json", dumps(_certificate_json(cert)))
    _write(cfg.out / "premises.json", dumps(_premises_json(premises)))
    _write(cfg.out / "config.json", dumps({
        "stages": cfg.stages, "depth": cfg.resolved_depth(),
        "samples": cfg.samples, "seed": cfg.seed,
    }))
    _write(cfg.out / "function.svg", plots.plot_function(states[-1]))
    _write(cfg.out / "stages.svg", plots.plot_stages(states))
    _write(cfg.out / "envelopes.svg", plots.plot_envelopes(states[-1]))
    if not cert.passed:
        bad = cert.first_failing()
        print(f"verification failed: condition {bad.condition} at stage "
              f"{bad.stage} ({bad.subject})", file=sys.stderr)
        return 2
    if not premises.passed:
        print("limit premises failed", file=sys.stderr)
        return 2
    print(f"built {cfg.stages} stages (depth {cfg.resolved_depth()}): "
          f"all {len(cert.verdicts)} condition instances pass")
    return 0


def cmd_verify(args) -> int:
    out = Path(args.out)
    try:
        states = _load_states(out)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"cannot load stage dumps: {exc}", file=sys.stderr)
        return 3
    cert = verify_stage(states)
    premises = descent_premises(states)
    _write(out / "certificate.json", dumps(_certificate_json(cert)))
    _write(out / "premises.json", dumps(_premises_json(premises)))
    if not (cert.passed and premises.passed):
        bad = cert.first_failing()
        name = bad.condition if bad is not None else "premises"
        print(f"verification failed: {name}", file=sys.stderr)
        return 2
    print(f"reverified {len(states)} stages: "
          f"all {len(cert.verdicts)} condition instances pass")
    return 0


def cmd_refute(args) -> int:
    out = Path(args.out)
    try:
        states = _load_states(Path(args.stage_dir))
        lspec = serialize.lspec_from_json(json.loads(Path(args.lspec).read_text()))
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 3
    a = Fraction(args.a) if args.a else Fraction(0)
    b = Fraction(args.b) if args.b else Fraction(1)
    try:
        trace = descend(states, lspec, a, b, args.depth_n)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 2
    _write(out / "trace.json", dumps(serialize.trace_to_json(trace)))
    _write(out / "descent.svg", plots.plot_descent(trace))
    if trace.no_w_at is not None:
        print(f"no admissible open set at step {trace.no_w_at}", file=sys.stderr)
        return 2
    if not trace.passed:
        print("descent conditions failed", file=sys.stderr)
        return 2
    print(f"descent reached depth {trace.depth}; all step conditions hold")
    return 0


def cmd_slobodnik(args) -> int:
    out = Path(args.out)
    try:
        states = _load_states(Path(args.stage_dir))
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"cannot load stage dumps: {exc}", file=sys.stderr)
        return 3
    last = states[-1]
    w = Fraction(args.window) if args.window else 2 * last.P.mesh()
    rng = random.Random(args.seed)
    report = {"window": frac_str(w), "linear": [], "central": []}
    ok = True
    for _ in range(args.pairs):
        t = Fraction(rng.randint(-2 ** 16, 2 ** 16), 2 ** 16)
        den = 1 + t * t
        a, b = (1 - t * t) / den, 2 * t / den
        cert = linear_projection_gaps(last.f, last.P, a, b, w)
        ok = ok and cert.gamma > 0
        report["linear"].append({"a": frac_str(a), "b": frac_str(b),
                                 "gamma": frac_str(cert.gamma),
                                 "gaps": len(cert.gaps)})
    for _ in range(args.centers):
        cx = Fraction(rng.randint(0, 2 ** 12), 2 ** 12)
        cy = Fraction(rng.randint(3 * 2 ** 12, 6 * 2 ** 12), 2 ** 12)
        cert = central_projection_gaps(last.f, last.P, (cx, cy), w)
        ok = ok and cert.gamma > 0 and cert.enclosure_ok
        report["central"].append({"center": [frac_str(cx), frac_str(cy)],
                                  "gamma": frac_str(cert.gamma),
                                  "enclosure_ok": cert.enclosure_ok})
    _write(out / "projection_gaps.json", dumps(report))
    if not ok:
        print("some projection window lacked a certified gap", file=sys.stderr)
        return 2
    print(f"projection gaps certified for {args.pairs} directions and "
          f"{args.centers} centers at window {w}")
    return 0


def cmd_plot(args) -> int:
    out = Path(args.out)
    try:
        states = _load_states(out)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"cannot load stage dumps: {exc}", file=sys.stderr)
        return 3
    _write(out / "function.svg", plots.plot_function(states[-1]))
    _write(out / "stages.svg", plots.plot_stages(states))
    _write(out / "envelopes.svg", plots.plot_envelopes(states[-1]))
    trace_file = out / "trace.json"
    if trace_file.exists():
        trace = serialize.trace_from_json(json.loads(trace_file.read_text()))
        _write(out / "descent.svg", plots.plot_descent(trace))
    print("plots written")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tangentcert")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="run the construction and verify it")
    b.add_argument("--stages", type=int, default=4)
    b.add_argument("--depth", type=int, default=None)
    b.add_argument("--out", default="out")
    b.add_argument("--samples", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tamper-eta", type=int, default=None, help=argparse.SUPPRESS)
    b.set_defaults(fn=cmd_build)

    v = sub.add_parser("verify", help="reload stage dumps and re-verify")
    v.add_argument("--out", default="out")
    v.set_defaults(fn=cmd_verify)

    r = sub.add_parser("refute", help="run the descent against an LSpec")
    r.add_argument("stage_dir")
    r.add_argument("--lspec", required=True)
    r.add_argument("--out", default="out")
    r.add_argument("--depth-n", type=int, default=10)
    r.add_argument("--a", default=None)
    r.add_argument("--b", default=None)
    r.set_defaults(fn=cmd_refute)

    s = sub.add_parser("slobodnik", help="projection gap certificates")
    s.add_argument("stage_dir")
    s.add_argument("--out", default="out")
    s.add_argument("--window", default=None)
    s.add_argument("--pairs", type=int, default=20)
    s.add_argument("--centers", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_slobodnik)

    pl = sub.add_parser("plot", help="regenerate SVG artifacts from dumps")
    pl.add_argument("--out", default="out")
    pl.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
