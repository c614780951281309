import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psvsurf import SurfacePoint, angle_at, cross_slit, saddle_connections_from, trace_geodesic
from psvsurf.cones import find_saddle_connections, safe_probe_radius
from psvsurf.errors import (
    FrontierUngluedError,
    InadmissibleMarkError,
    InvalidStartError,
    ProbeRadiusError,
    TangentialCrossingError,
)
from psvsurf.marks import Kind, SheetId
from psvsurf.tracer import cone_kind, next_fold

from conftest import surface

TWO_PI = 2 * math.pi


def base(S, word=()):
    return SheetId(S.copy(word), Kind.BASE)


def cover(S, word=()):
    return SheetId(S.copy(word), Kind.COVER)


# ----------------------------------------------------------------- crossing

def test_cross_m1_from_below():
    S = surface("rot90", 3)
    p = SurfacePoint(base(S), 0, 3.5, 0.0)
    out, d = cross_slit(S, p, "right", (0, 1))
    assert out.sheet == cover(S) and out.fold == 0
    assert (out.x, out.y) == (3.5, 0.0)
    assert out.slit_side == "left"
    assert d == (0.0, 1.0)


def test_cross_and_back():
    S = surface("sanov", 2)
    p = SurfacePoint(base(S), 0, 1.3, 2.0)  # inside Mj(2, 1)
    out, d = cross_slit(S, p, None, (0.3, 1))
    back, d2 = cross_slit(S, out, None, (-d[0], -d[1]))
    assert back.sheet == p.sheet
    assert math.isclose(back.x, p.x) and math.isclose(back.y, p.y)
    assert back.slit_side == "right"


def test_cross_ttilde_reverses_parameter():
    S = surface("rot90", 3)
    p = SurfacePoint(cover(S), 0, 0.0, 1.25)
    out, _ = cross_slit(S, p, "left", (1, 0))
    assert out.sheet == cover(S) and out.fold == 0
    assert (out.x, out.y) == (0.0, -1.75)
    assert out.slit_side == "left"


def test_cross_tangential():
    S = surface("rot90", 3)
    with pytest.raises(TangentialCrossingError):
        cross_slit(S, SurfacePoint(base(S), 0, 3.5, 0.0), None, (1, 0))


def test_cross_not_on_slit():
    S = surface("rot90", 3)
    with pytest.raises(InadmissibleMarkError):
        cross_slit(S, SurfacePoint(base(S), 0, 2.5, 0.0), None, (0, 1))


def test_cross_wrong_side():
    S = surface("rot90", 3)
    with pytest.raises(InvalidStartError):
        cross_slit(S, SurfacePoint(base(S), 0, 3.5, 0.0), "left", (0, 1))


def test_cross_frontier_unglued():
    S = surface("diag", 2)
    p = SurfacePoint(SheetId(S.copy((1, 1)), Kind.BUFFER2, 1), 0, 0.5, 2.0)
    with pytest.raises(FrontierUngluedError):
        cross_slit(S, p, None, (0, 1))


# ------------------------------------------------------------------ tracing

def test_trace_through_m1():
    S = surface("rot90", 3)
    path = trace_geodesic(S, SurfacePoint(base(S), 0, 3.5, -1.0), (0, 1), 3)
    assert len(path.segments) == 2
    first, second = path.segments
    assert first.sheet == base(S) and first.end == (3.5, 0.0)
    assert second.sheet == cover(S) and second.start == (3.5, 0.0)
    assert second.end == pytest.approx((3.5, 2.0))
    assert path.termination == "max_length" and path.total_length == 3


def test_trace_straight_below_axis():
    S = surface("rot90", 3)
    path = trace_geodesic(S, SurfacePoint(base(S), 0, 0.0, -0.5), (1, 0), 10)
    assert len(path.segments) == 1
    assert path.end.xy == pytest.approx((10.0, -0.5))


def test_trace_hits_cover_origin():
    S = surface("rot90", 3)
    path = trace_geodesic(S, SurfacePoint(cover(S), 1, 0.0, -0.5), (0, 1), 3)
    assert path.termination == "cone_point"
    assert path.total_length == pytest.approx(0.5)
    assert cone_kind(S, path.cone) == "cover_origin"


def test_trace_crosses_branch_cut():
    S = surface("rot90", 3)
    path = trace_geodesic(S, SurfacePoint(cover(S), 0, -1.0, 1.0), (0, -1), 3)
    assert [s.fold for s in path.segments] == [0, 1]
    path = trace_geodesic(S, SurfacePoint(cover(S), 0, -1.0, -1.0), (0, 1), 3)
    assert [s.fold for s in path.segments] == [0, 2]


def test_trace_into_neighbour_copy():
    S = surface("rot90", 3)
    # Mneg(1) of copy Id is the vertical segment (1,-3)->(1,-4)
    path = trace_geodesic(S, SurfacePoint(base(S), 0, 0.5, -3.5), (1, 0), 1)
    assert path.segments[1].sheet.copy == S.ball.element(S.gens.h(1).inverse())
    assert path.segments[1].sheet.kind is Kind.BUFFER2


def test_trace_start_on_cone_point():
    S = surface("rot90", 3)
    with pytest.raises(InvalidStartError):
        trace_geodesic(S, SurfacePoint(base(S), 0, 3.0, 0.0), (0, 1), 1)
    with pytest.raises(InvalidStartError):
        trace_geodesic(S, SurfacePoint(cover(S), 2, 0.0, 0.0), (0, 1), 1)


def test_trace_start_on_slit_needs_side():
    S = surface("rot90", 3)
    with pytest.raises(InvalidStartError):
        trace_geodesic(S, SurfacePoint(base(S), 0, 3.5, 0.0), (0, 1), 1)
    up = trace_geodesic(S, SurfacePoint(base(S), 0, 3.5, 0.0, "right"), (0, 1), 1)
    assert up.segments[0].sheet == cover(S)
    stay = trace_geodesic(S, SurfacePoint(base(S), 0, 3.5, 0.0, "left"), (0, 1), 1)
    assert stay.segments[0].sheet == base(S)


def test_trace_budget():
    S = surface("rot90", 3)
    # crosses Mneg(1) into a neighbour copy, then meets Lprime(1) there
    path = trace_geodesic(S, SurfacePoint(base(S), 0, 0.5, -3.5), (1, 0), 5, event_budget=1)
    assert path.termination == "budget"
    assert path.events == 1


def test_trace_frontier_error_carries_path():
    S = surface("diag", 1)
    far = S.copy((1,))
    start = SurfacePoint(SheetId(far, Kind.BUFFER2, 1), 0, 0.5, 1.5)
    with pytest.raises(FrontierUngluedError) as exc:
        trace_geodesic(S, start, (0, 1), 5)
    assert exc.value.path is not None and len(exc.value.path.segments) == 1


def test_fold_consistency():
    for f in range(3):
        g = f
        for _ in range(3):
            g = next_fold(g, True)
        assert g == f
        assert next_fold(next_fold(f, True), False) == f


def test_path_json_shape():
    S = surface("rot90", 3)
    doc = trace_geodesic(S, SurfacePoint(base(S), 0, 3.5, -1.0), (0, 1), 3).to_dict()
    assert doc["termination"] == "max_length"
    assert [s["sheet"] for s in doc["segments"]] == ["base", "cover"]
    assert doc["segments"][0]["to"] == [3.5, 0.0]


def _random_start(S, rng, interior):
    g = rng.choice(interior)
    sheets = S.sheets(g)
    sheet = rng.choice(sheets)
    fold = rng.randrange(3) if sheet.kind is Kind.COVER else 0
    return SurfacePoint(sheet, fold, rng.uniform(-3, 12), rng.uniform(-8, 8))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, TWO_PI), st.floats(0.5, 25))
def test_reversibility_and_direction_invariance(seed, theta, length):
    S = surface("sanov", 3)
    interior = [g for g in S.copies() if g.word_length <= 1]
    rng = random.Random(seed)
    start = _random_start(S, rng, interior)
    d = (math.cos(theta), math.sin(theta))
    try:
        fwd = trace_geodesic(S, start, d, length)
        if fwd.termination != "max_length":
            return
        back = trace_geodesic(S, fwd.end, (-d[0], -d[1]), length)
    except FrontierUngluedError:
        return
    for seg in fwd.segments:
        a, b, c, dd = S.fmat(seg.sheet.copy)[0]
        vx, vy = seg.end[0] - seg.start[0], seg.end[1] - seg.start[1]
        fx, fy = a * vx + b * vy, c * vx + dd * vy
        n = math.hypot(fx, fy)
        if n > 1e-9:
            assert abs(fx * d[1] - fy * d[0]) <= 1e-9 * n and fx * d[0] + fy * d[1] > 0
    assert back.end.sheet == start.sheet and back.end.fold == start.fold
    assert math.hypot(back.end.x - start.x, back.end.y - start.y) < 1e-9 * length


# ------------------------------------------------------------------- angles

def test_angle_generic_point():
    S = surface("rot90", 3)
    r = angle_at(S, SurfacePoint(base(S), 0, -1.7, 0.4))
    assert abs(r.measured_angle - TWO_PI) <= 1e-6
    assert r.expected == TWO_PI


def test_angle_m1_endpoint():
    S = surface("rot90", 3)
    r = angle_at(S, SurfacePoint(base(S), 0, 4.0, 0.0))
    assert abs(r.measured_angle - 2 * TWO_PI) <= 1e-6


def test_angle_cover_origin():
    S = surface("rot90", 3)
    r = angle_at(S, SurfacePoint(cover(S), 0, 0.0, 0.0))
    assert abs(r.measured_angle - 3 * TWO_PI) <= 1e-6


def test_angle_probe_too_large():
    S = surface("rot90", 3)
    with pytest.raises(ProbeRadiusError):
        angle_at(S, SurfacePoint(base(S), 0, 3.0, 0.0), rho=1.5)


def test_angle_probe_hits_cone_on_circle():
    S = surface("rot90", 3)
    with pytest.raises(ProbeRadiusError):
        angle_at(S, SurfacePoint(base(S), 0, 3.5, -0.5), rho=math.hypot(0.5, 0.5))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["rot90", "diag", "sanov"]), st.integers(0, 10**6))
def test_angle_quantized(name, seed):
    S = surface(name, 2)
    rng = random.Random(seed)
    g = rng.choice([c for c in S.copies() if c.word_length <= 1])
    kinds = [
        SurfacePoint(SheetId(g, Kind.BASE), 0, float(rng.choice([3, 4, 7, 8])), 0.0),
        SurfacePoint(SheetId(g, Kind.COVER), 0, 0.0, 0.0),
        SurfacePoint(SheetId(g, Kind.BASE), 0, rng.uniform(-3, -1), rng.uniform(0.2, 0.8)),
    ]
    p = rng.choice(kinds)
    r = angle_at(S, p, safe_probe_radius(S, g))
    k = round(r.measured_angle / TWO_PI)
    assert k >= 1 and abs(r.measured_angle - k * TWO_PI) <= 1e-4
    assert r.matches()


# --------------------------------------------------------- saddle connections

def test_saddle_connections_origin_identity():
    S = surface("rot90", 3)
    hol = saddle_connections_from(S, SurfacePoint(cover(S), 0, 0.0, 0.0), 1.5)
    assert hol == [(0.0, -1.0), (0.0, 1.0)]


def test_saddle_connections_origin_longer():
    S = surface("rot90", 3)
    res = find_saddle_connections(S, SurfacePoint(cover(S), 0, 0.0, 0.0), 3.5)
    assert sorted(c.holonomy for c in res.connections) == [(0.0, -1.0), (0.0, 1.0), (3.0, 0.0)]
    assert res.stable


def test_saddle_connections_closed_under_negation():
    S = surface("rot90", 3)
    hol = saddle_connections_from(S, SurfacePoint(base(S), 0, 3.0, 0.0), 2.0)
    assert hol
    assert all((-x + 0.0, -y + 0.0) in hol for x, y in hol)


def test_saddle_connections_origin_other_copy():
    S = surface("sanov", 3)
    g = S.copy((1,))
    hol = saddle_connections_from(S, SurfacePoint(cover(S, (1,)), 0, 0.0, 0.0), 3.5)
    a, b, c, d = g.matrix.to_float()
    allowed = {(a, c), (-a, -c), (b, d), (-b, -d)}
    for v in hol:
        assert any(abs(v[0] * w[1] - v[1] * w[0]) < 1e-9 and v[0] * w[0] + v[1] * w[1] > 0 for w in allowed)
