"""Acceptance criteria 1-10.

Each test prints one PASS/FAIL line with the measured values and the wall
time, whether or not pytest captures output. Surfaces are rebuilt inside
each test so the timings include construction.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from psvsurf import (
    Mat2,
    ROT90,
    SurfacePoint,
    angle_at,
    assemble,
    check_separation,
    ends_estimate,
    enumerate_ball,
    singularity_marker_check,
    surface_ends_census,
    trace_geodesic,
    validate_generating_set,
    validate_gluings,
    veech_relabel_check,
)
from psvsurf.checks import census_table
from psvsurf.cones import safe_probe_radius
from psvsurf.errors import FrontierUngluedError
from psvsurf.group import diameter
from psvsurf.marks import Family, Kind, MarkRef, SheetId, mark

from oracles import components_beyond

TWO_PI = 2 * math.pi
SANOV = [Mat2.of([[1, 2], [0, 1]]), Mat2.of([[1, 0], [2, 1]])]
GROUPS = {
    "rot90": [ROT90],
    "neg_id": [Mat2.diag(-1, -1)],
    "diag": [Mat2.diag(2, 1)],
    "sanov": SANOV,
}


def build(name, R):
    H = validate_generating_set(GROUPS[name])
    return assemble(enumerate_ball(H, R), H)


@pytest.fixture
def report(capsys):
    def emit(n, ok, text, elapsed):
        line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {text}  ({elapsed:.2f} s)"
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


def _glued_endpoints(S, g, i_max=3):
    """Endpoints of glued marks on copy g as surface points."""
    marks = [mark(g, Family.TT1), mark(g, Family.TT2)]
    for i in range(1, i_max + 1):
        marks += [mark(g, Family.M, i), mark(g, Family.MTILDE, i)]
        for j in range(1, S.J + 1):
            marks += [mark(g, Family.MJ, i, j), mark(g, Family.MCHECK, i, j),
                      MarkRef(SheetId(g, Kind.BUFFER1, j), Family.L, i),
                      MarkRef(SheetId(g, Kind.BUFFER2, j), Family.LPRIME, i)]
    for j in range(1, S.J + 1):
        marks += [mark(g, Family.HCHECK, 1, j), mark(g, Family.MNEG, 1, j)]
    pts = []
    for m in marks:
        for x, y in S.endpoints(m):
            pts.append((m, SurfacePoint(m.sheet, 0, float(x), float(y))))
    return pts


# ----------------------------------------------------------------------- 1

def test_criterion_01_finite_groups_have_card_g_ends(report):
    t = time.perf_counter()
    ok = True
    lines = []
    for name, order in (("rot90", 4), ("neg_id", 2)):
        H = validate_generating_set(GROUPS[name])
        d = diameter(enumerate_ball(H, order + 2))
        for R in range(d + 1, d + 4):
            S = assemble(enumerate_ball(H, R), H)
            totals = [c.total for c in census_table(S)]
            stable = totals[d:]
            ok &= all(x == order for x in stable) and all(x <= order for x in totals)
            lines.append(f"{name} R={R} totals over R_cut={totals}")
    elapsed = time.perf_counter() - t
    ok &= elapsed < 5
    assert report(1, ok, "census total = card(G) for every R_cut >= diameter; " + "; ".join(lines), elapsed)


# ----------------------------------------------------------------------- 2

def test_criterion_02_two_ended_group(report):
    t = time.perf_counter()
    S = build("diag", 8)
    ends = [ends_estimate(S.ball, r).component_count for r in range(1, 7)]
    totals = [surface_ends_census(S, r).total for r in range(1, 7)]
    expected = [(2 * r + 1) + 2 for r in range(1, 7)]
    elapsed = time.perf_counter() - t
    ok = ends == [2] * 6 and totals == expected and elapsed < 5
    assert report(2, ok, f"ends_estimate r=1..6 {ends}; census totals {totals} vs {expected}", elapsed)


# ----------------------------------------------------------------------- 3

def test_criterion_03_many_ended_group(report):
    t = time.perf_counter()
    H = validate_generating_set(SANOV)
    b = enumerate_ball(H, 5)
    e1, e2 = ends_estimate(b, 1), ends_estimate(b, 2)
    tree = [4 * 3 ** (r - 1) for r in range(1, 5)]
    oracle = [components_beyond([(g.a, g.b, g.c, g.d) for g in SANOV], 5, r) for r in range(1, 5)]
    elapsed = time.perf_counter() - t
    ok = (e1.component_count == 4 and e2.component_count == 12 and list(e1.profile) == tree == oracle
          and e2.classification == "many" and elapsed < 30)
    assert report(3, ok, f"r=1 -> {e1.component_count}, r=2 -> {e2.component_count}, "
                         f"profile {list(e1.profile)}, class {e2.classification!r}", elapsed)


# ----------------------------------------------------------------------- 4

def test_criterion_04_separation_bound(report):
    t = time.perf_counter()
    worst = {}
    for name in GROUPS:
        S = build(name, 3)
        worst[name] = min(check_separation(S, g).bound for g in S.copies())
    elapsed = time.perf_counter() - t
    lo = min(worst.values())
    ok = lo >= 0.707106 and elapsed < 60
    txt = ", ".join(f"{k} {v:.4f}" for k, v in worst.items())
    assert report(4, ok, f"min bound per group over R=3 copies: {txt}", elapsed)


# ----------------------------------------------------------------------- 5

def test_criterion_05_cone_angles(report):
    t = time.perf_counter()
    rng = random.Random(5)
    pool = []
    for name in GROUPS:
        S = build(name, 3)
        pool += [(S, g) for g in S.copies() if g.word_length <= 1]
    errs4, errs6, errs2 = [], [], []
    for _ in range(10):
        S, g = rng.choice(pool)
        m, p = rng.choice(_glued_endpoints(S, g))
        r = angle_at(S, p, safe_probe_radius(S, g))
        errs4.append(abs(r.measured_angle - 2 * TWO_PI))
    for S, g in rng.sample(pool, 3):
        r = angle_at(S, SurfacePoint(SheetId(g, Kind.COVER), 0, 0.0, 0.0), safe_probe_radius(S, g))
        errs6.append(abs(r.measured_angle - 3 * TWO_PI))
    for _ in range(10):
        S, g = rng.choice(pool)
        p = SurfacePoint(SheetId(g, Kind.BASE), 0, rng.uniform(-3, -1), rng.uniform(0.2, 0.8))
        r = angle_at(S, p, safe_probe_radius(S, g))
        errs2.append(abs(r.measured_angle - TWO_PI))
    elapsed = time.perf_counter() - t
    ok = max(errs4) <= 1e-4 and max(errs6) <= 1e-4 and max(errs2) <= 1e-6 and elapsed < 30
    assert report(5, ok, f"max |err| 4pi endpoints {max(errs4):.2e}, 6pi origins {max(errs6):.2e}, "
                         f"2pi generic {max(errs2):.2e}", elapsed)


# ----------------------------------------------------------------------- 6

def test_criterion_06_veech_marker(report):
    t = time.perf_counter()
    results = []
    for name in GROUPS:
        S = build(name, 3)
        for g in (S.identity(), S.copy((1,))):
            rep = singularity_marker_check(S, g)
            results.append((name, g.label(), rep.passed))
    elapsed = time.perf_counter() - t
    ok = all(r[2] is True for r in results) and elapsed < 60
    txt = ", ".join(f"{n}/{w} {'ok' if p else p}" for n, w, p in results)
    assert report(6, ok, txt, elapsed)


# ----------------------------------------------------------------------- 7

def test_criterion_07_relabel_equivariance(report):
    t = time.perf_counter()
    failures = checked = 0
    for name in GROUPS:
        S = build(name, 3)
        for g in S.copies():
            rep = veech_relabel_check(S, g)
            failures += not rep.passed
            checked += rep.details["checked"]
    elapsed = time.perf_counter() - t
    ok = failures == 0 and elapsed < 10
    assert report(7, ok, f"{failures} failures, {checked} gluings checked", elapsed)


# ----------------------------------------------------------------------- 8

def test_criterion_08_gluing_soundness(report):
    t = time.perf_counter()
    bad = {}
    for name in GROUPS:
        bad[name] = len(validate_gluings(build(name, 3), N=100).offending)
    S = build("diag", 2)
    m = mark(S.identity(), Family.M, 1)
    p, q = S.endpoints(m)
    faulty = S.perturbed(m, (p, (q[0] + Fraction(1, 1000), q[1])))
    injected = len(validate_gluings(faulty, N=100).offending)
    elapsed = time.perf_counter() - t
    ok = all(v == 0 for v in bad.values()) and injected == 1
    assert report(8, ok, f"violations {bad}; injected fault found {injected}", elapsed)


# ----------------------------------------------------------------------- 9

def test_criterion_09_geodesic_reversibility(report):
    t = time.perf_counter()
    rng = random.Random(9)
    S = build("sanov", 3)
    inner = [g for g in S.copies() if g.word_length <= 1]
    targets = {g: [m for m, _ in _glued_endpoints(S, g)[::2]] for g in inner}
    worst, done, skipped, crossings = 0.0, 0, 0, 0
    while done < 100:
        # aim through a random point of a random glued mark so every trace crosses a slit
        g = rng.choice(inner)
        m = rng.choice(targets[g])
        (px, py), (qx, qy) = [(float(x), float(y)) for x, y in S.endpoints(m)]
        s = rng.uniform(0.05, 0.95)
        tx, ty = px + s * (qx - px), py + s * (qy - py)
        theta = rng.uniform(0, TWO_PI)
        d = (math.cos(theta), math.sin(theta))
        _, (a, b, c, e) = S.fmat(g)
        ux, uy = a * d[0] + b * d[1], c * d[0] + e * d[1]
        if abs(ux * (qy - py) - uy * (qx - px)) < 0.1 * math.hypot(ux, uy) * math.hypot(qx - px, qy - py):
            continue
        back_off = rng.uniform(0.1, 1.0)
        start = SurfacePoint(m.sheet, 0, tx - back_off * ux, ty - back_off * uy)
        length = rng.uniform(2, 20)
        try:
            fwd = trace_geodesic(S, start, d, length)
            if fwd.termination != "max_length":
                skipped += 1
                continue
            back = trace_geodesic(S, fwd.end, (-d[0], -d[1]), length)
        except FrontierUngluedError:
            skipped += 1
            continue
        same = back.end.sheet == start.sheet and back.end.fold == start.fold
        err = math.hypot(back.end.x - start.x, back.end.y - start.y) / length if same else math.inf
        worst = max(worst, err)
        crossings += len(fwd.segments) - 1
        done += 1
    elapsed = time.perf_counter() - t
    ok = worst < 1e-9 and elapsed < 30
    assert report(9, ok, f"100 traces, {crossings} slit crossings, worst error per unit length {worst:.2e} "
                         f"({skipped} samples hit a cone point or the frontier and were redrawn)", elapsed)


# ---------------------------------------------------------------------- 10

def test_criterion_10_census_matches_group_ends(report):
    t = time.perf_counter()
    mismatches = []
    compared = 0
    for name in GROUPS:
        S = build(name, 5)
        for r in range(S.ball.radius):
            c = surface_ends_census(S, r)
            e = ends_estimate(S.ball, r)
            compared += 1
            if c.frontier_component_count != e.component_count:
                mismatches.append((name, r, c.frontier_component_count, e.component_count))
    elapsed = time.perf_counter() - t
    ok = not mismatches
    assert report(10, ok, f"{compared} (group, R_cut) pairs compared at R=5, mismatches {mismatches}", elapsed)
