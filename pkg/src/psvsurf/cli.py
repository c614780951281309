"""Command-line front end.

Exit codes: 0 success, 1 a validator failed, 2 bad input. Errors are
also written to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import io as pio
from .builder import assemble
from .checks import (
    census_table,
    check_separation,
    singularity_marker_check,
    validate_gluings,
    veech_constraint_check,
    veech_relabel_check,
)
from .cones import angle_at, cone_points_of_copy, safe_probe_radius
from .errors import InputError, PSVError
from .group import assert_no_contracting, classify, ends_estimate, ends_profile, enumerate_ball
from .marks import Kind, SheetId
from .render import parse_sheet, render
from .tracer import SurfacePoint, trace_geodesic


@dataclass
class RunConfig:
    group: str
    radius: int
    cut: int | None = None
    r_max: int | None = None
    max_len: float = 10.0
    event_budget: int = 10_000
    angle_steps: int = 720
    index_bound: int = 100
    out: str = "."
    seed: int = 0

    def __post_init__(self):
        if self.radius < 0:
            raise InputError("--radius must be >= 0")
        if self.cut is not None and not 0 <= self.cut < self.radius:
            raise InputError("--cut must satisfy 0 <= cut < radius")
        if self.max_len <= 0 or self.event_budget <= 0 or self.angle_steps <= 0 or self.index_bound <= 0:
            raise InputError("budgets and lengths must be positive")

    @classmethod
    def from_args(cls, a) -> "RunConfig":
        if not a.group:
            raise InputError("--group is required")
        if a.radius is None:
            raise InputError("--radius is required")
        return cls(a.group, a.radius, a.cut, None, a.max_len, a.event_budget, a.angle_steps,
                   a.index_bound, a.out, a.seed)


def num_threads() -> int:
    try:
        return max(1, int(os.environ.get("PSV_NUM_THREADS", "1")))
    except ValueError:
        raise InputError("PSV_NUM_THREADS must be an integer") from None


def _parse_pair(text: str, what: str):
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"{what} must look like 'x,y', got {text!r}") from None
    return x, y


def _parse_word(text: str):
    if text in ("", "e"):
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"copy word must look like '1,2,1', got {text!r}") from None


def _copy(surface, word_text):
    try:
        return surface.copy(_parse_word(word_text))
    except (KeyError, IndexError):
        raise InputError(f"copy {word_text!r} is not in the ball") from None


def _surface(cfg):
    H = pio.load_group(cfg.group)
    return assemble(enumerate_ball(H, cfg.radius), H)


def _emit(doc):
    sys.stdout.write(pio.dumps(doc))


def cmd_group_enumerate(cfg, a):
    H = pio.load_group(cfg.group)
    ball = enumerate_ball(H, cfg.radius)
    out = Path(cfg.out)
    pio.write(out / "ball.json", pio.dumps(pio.ball_to_json(ball)))
    pio.write(out / "ball.dot", pio.ball_to_dot(ball))
    rep = assert_no_contracting(ball)
    _emit({"vertices": len(ball), "edges": len(ball.edges), "stabilized": ball.stabilized(),
           "no_contracting": rep.to_dict()})
    return 0 if rep.passed else 1


def cmd_group_ends(cfg, a):
    H = pio.load_group(cfg.group)
    ball = enumerate_ball(H, cfg.radius)
    if cfg.radius < 1:
        raise InputError("--radius must be >= 1 for an ends table")
    profile = ends_profile(ball)
    rows = [{"r": r, "components": c} for r, c in enumerate(profile, start=1)]
    doc = {"radius": cfg.radius, "table": rows, "classification": classify(profile, ball.stabilized())}
    if cfg.cut is not None:
        doc["at_cut"] = {"r": cfg.cut, "components": ends_estimate(ball, cfg.cut).component_count}
    _emit(doc)
    return 0


def cmd_surface_build(cfg, a):
    S = _surface(cfg)
    p = pio.write(Path(cfg.out) / "manifest.json", pio.dumps(pio.manifest(S)))
    _emit({"manifest": str(p), "copies": len(S.copies()), "inter_gluings": len(S.registry.inter_pairs()),
           "frontier_unglued": len(S.frontier_unglued)})
    return 0


def _interior_copies(S):
    """Copies whose whole one-step neighbourhood is materialized."""
    R = S.ball.radius
    return [g for g in S.copies() if g.word_length < R] or S.copies()


def cmd_surface_check(cfg, a):
    S = _surface(cfg)
    rng = random.Random(cfg.seed)
    reports = [validate_gluings(S, cfg.index_bound).to_dict()]
    with ThreadPoolExecutor(max_workers=num_threads()) as pool:
        seps = list(pool.map(lambda g: check_separation(S, g), S.copies()))
    reports += [s.report().to_dict() for s in seps]
    inner = _interior_copies(S)
    probes = [inner[0]] + ([rng.choice(inner[1:])] if len(inner) > 1 else [])
    for g in probes:
        rho = safe_probe_radius(S, g)
        pts = cone_points_of_copy(S, g, 2)
        base = SheetId(g, Kind.BASE)
        pts.append(SurfacePoint(base, 0, -1.0 - rng.random(), 0.2 + 0.5 * rng.random()))
        for p in pts:
            r = angle_at(S, p, rho, cfg.angle_steps)
            reports.append({"check": "cone_angle", "status": "pass" if r.matches() else "fail",
                            "passed": r.matches(), "details": r.to_dict(), "offending": []})
        reports.append(singularity_marker_check(S, g).to_dict())
    failed = [r for r in reports if r["passed"] is False]
    doc = {"radius": cfg.radius, "checks": len(reports), "failed": len(failed),
           "passed": not failed, "reports": reports}
    pio.write(Path(cfg.out) / "report.json", pio.dumps(doc))
    _emit({"checks": len(reports), "failed": len(failed), "passed": not failed})
    return 1 if failed else 0


def cmd_surface_ends(cfg, a):
    S = _surface(cfg)
    if cfg.radius < 1:
        raise InputError("--radius must be >= 1 for a census")
    rows = [c.to_dict() for c in census_table(S)]
    if cfg.cut is not None:
        rows = [r for r in rows if r["R_cut"] == cfg.cut]
    _emit({"radius": cfg.radius, "table": rows})
    return 0


def cmd_surface_trace(cfg, a):
    S = _surface(cfg)
    copy = _copy(S, a.copy)
    sheet = parse_sheet(S, a.sheet, copy)
    x, y = _parse_pair(a.start, "--start")
    d = _parse_pair(a.direction, "--direction")
    if d == (0.0, 0.0):
        raise InputError("--direction must be nonzero")
    start = SurfacePoint(sheet, a.fold, x, y, a.side)
    path = trace_geodesic(S, start, d, cfg.max_len, cfg.event_budget)
    doc = path.to_dict()
    pio.write(Path(cfg.out) / "path.json", pio.dumps(doc))
    _emit({"termination": path.termination, "total_length": doc["total_length"],
           "segments": len(path.segments)})
    return 0


def cmd_veech_check(cfg, a):
    S = _surface(cfg)
    reports = [veech_relabel_check(S, g) for g in S.copies()]
    failed = sum(1 for r in reports if not r.passed)
    doc = {"relabel": {"elements": len(reports), "failed": failed,
                       "checked_pairs": sum(r.details["checked"] for r in reports),
                       "unverifiable_pairs": sum(r.details["unverifiable"] for r in reports)}}
    if a.matrix:
        d = pio.parse_matrix_arg(a.matrix)
        g = veech_constraint_check(S, d)
        doc["constraint"] = {"matrix": pio.matrix_to_json(d), "element": None if g is None else list(g.word)}
    pio.write(Path(cfg.out) / "veech.json", pio.dumps(doc))
    _emit(doc)
    return 1 if failed else 0


def cmd_render(cfg, a):
    S = _surface(cfg)
    target = a.target
    copy = _copy(S, a.copy)
    text = render(S, target, copy)
    suffix = "dot" if target == "graph" else "svg"
    name = "graph" if target == "graph" else f"{copy.label()}_{target.replace(':', '_')}"
    p = pio.write(Path(cfg.out) / f"{name}.{suffix}", text)
    _emit({"written": str(p)})
    return 0


COMMANDS = {
    ("group", "enumerate"): cmd_group_enumerate,
    ("group", "ends"): cmd_group_ends,
    ("surface", "build"): cmd_surface_build,
    ("surface", "check"): cmd_surface_check,
    ("surface", "ends"): cmd_surface_ends,
    ("surface", "trace"): cmd_surface_trace,
    ("veech", "check"): cmd_veech_check,
    ("render", None): cmd_render,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _common(p):
    p.add_argument("--group", help="generating set JSON")
    p.add_argument("--radius", type=int, help="Cayley ball radius R")
    p.add_argument("--cut", type=int, help="cut / core radius")
    p.add_argument("--max-len", type=float, default=10.0, help="trace length")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled spot checks")
    p.add_argument("--event-budget", type=int, default=10_000)
    p.add_argument("--angle-steps", type=int, default=720)
    p.add_argument("--index-bound", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="psv", description="Assembled translation surfaces over matrix groups")
    sub = top.add_subparsers(dest="area", required=True, parser_class=_Parser)
    for area, actions in (("group", ("enumerate", "ends")),
                          ("surface", ("build", "check", "ends", "trace")),
                          ("veech", ("check",))):
        ap = sub.add_parser(area)
        asub = ap.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for act in actions:
            p = asub.add_parser(act)
            _common(p)
            if (area, act) == ("surface", "trace"):
                p.add_argument("--start", required=True, help="x,y in the sheet's base chart")
                p.add_argument("--direction", required=True, help="dx,dy flat direction")
                p.add_argument("--sheet", default="base", help="base, cover, buffer1:j or buffer2:j")
                p.add_argument("--copy", default="", help="copy word, e.g. 1,2")
                p.add_argument("--fold", type=int, default=0)
                p.add_argument("--side", choices=("left", "right"))
            if area == "veech":
                p.add_argument("--matrix", help="candidate derivative 'a,b;c,d'")
    rp = sub.add_parser("render")
    _common(rp)
    rp.add_argument("--target", required=True, help="graph, base, cover, buffer1:j or buffer2:j")
    rp.add_argument("--copy", default="", help="copy word, e.g. 1,2")
    return top


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        cfg = RunConfig.from_args(a)
        return COMMANDS[(a.area, getattr(a, "action", None))](cfg, a)
    except (InputError, ValueError) as e:
        return _fail(2, e)
    except PSVError as e:
        return _fail(1, e)


if __name__ == "__main__":
    sys.exit(main())
