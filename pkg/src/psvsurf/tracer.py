"""Straight-line flow on the assembled surface.

Positions are kept in the base chart of the current copy; the direction
is kept in flat (developed) coordinates and pulled back through the copy
matrix, so every gluing is a translation and the flat direction never
changes along a path.

The 3-fold cover uses the branch cut {y = 0, x < 0}. A point on the cut
belongs to the fold lying above it; crossing the cut downwards moves to
fold + 1, upwards to fold - 1 (mod 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    FrontierUngluedError,
    InadmissibleMarkError,
    InvalidStartError,
    TangentialCrossingError,
)
from .marks import (
    DRAWN_ONLY,
    Family,
    Kind,
    MarkRef,
    SheetId,
    locate_mark,
    lprime_index,
    row_index,
    sheet_rows,
    sheet_singletons,
)

TOL = 1e-9  # point identity, base-chart units
T_EPS = 1e-12  # events closer than this to the current point are the point itself
_TINY = 1e-300


@dataclass(frozen=True)
class SurfacePoint:
    sheet: SheetId
    fold: int = 0
    x: float = 0.0
    y: float = 0.0
    slit_side: str | None = None

    def __post_init__(self):
        if self.sheet.kind is not Kind.COVER and self.fold != 0:
            raise ValueError("fold is only meaningful on the cover")
        if not 0 <= self.fold <= 2:
            raise ValueError("fold must be 0, 1 or 2")

    @property
    def xy(self):
        return (self.x, self.y)

    def to_dict(self):
        return {
            "copy": list(self.sheet.copy.word),
            "sheet": self.sheet.name(),
            "fold": self.fold,
            "at": [_num(self.x), _num(self.y)],
            "slit_side": self.slit_side,
        }


def _num(v):
    return float("%.12g" % float(v))


@dataclass(frozen=True)
class Segment:
    sheet: SheetId
    fold: int
    start: tuple
    end: tuple


@dataclass
class GeodesicPath:
    direction: tuple  # flat unit vector
    segments: list = field(default_factory=list)
    total_length: float = 0.0
    termination: str = "max_length"  # max_length | cone_point | budget
    cone: SurfacePoint | None = None
    end: SurfacePoint | None = None
    events: int = 0

    @property
    def holonomy(self):
        return (self.total_length * self.direction[0], self.total_length * self.direction[1])

    def to_dict(self):
        return {
            "direction": [_num(c) for c in self.direction],
            "total_length": _num(self.total_length),
            "termination": self.termination,
            "cone_point": self.cone.to_dict() if self.cone else None,
            "segments": [
                {
                    "copy": list(s.sheet.copy.word),
                    "sheet": s.sheet.name(),
                    "fold": s.fold,
                    "from": [_num(c) for c in s.start],
                    "to": [_num(c) for c in s.end],
                }
                for s in self.segments
            ],
        }


@dataclass
class _Event:
    t: float
    kind: str  # slit | cone | cut
    mark: MarkRef | None = None
    s: float = 0.0  # fraction along the mark for slit events
    point: tuple | None = None


def next_fold(fold: int, downward: bool) -> int:
    """Fold reached by crossing the branch cut."""
    return (fold + (1 if downward else -1)) % 3


def _mv(m, v):
    a, b, c, d = m
    return (a * v[0] + b * v[1], c * v[0] + d * v[1])


def _row_event(sheet, row, P, u, tmax):
    px, py = P
    ux, uy = u
    y0 = row.y
    if abs(uy) > _TINY:
        t = (y0 - py) / uy
        if t <= T_EPS or t > tmax + T_EPS:
            return None
        x = px + t * ux
        i = row_index(row, x, TOL)
        if i is None:
            return None
        start = row.start(i)
        m = MarkRef(sheet, row.family, i, row.j)
        if abs(x - start) <= TOL:
            return _Event(t, "cone", m, 0.0, (float(start), float(y0)))
        if abs(x - start - 1) <= TOL:
            return _Event(t, "cone", m, 1.0, (float(start + 1), float(y0)))
        return _Event(t, "slit", m, x - start, (x, float(y0)))
    if abs(py - y0) > TOL or ux == 0:
        return None
    # running along the row: the next mark endpoint ahead is a cone point
    a, b = row.a, row.b
    if ux > 0:
        xt = px + TOL
        cands = [a * max(1, math.ceil((xt - b) / a)) + b,
                 a * max(1, math.ceil((xt - b - 1) / a)) + b + 1]
        xe = min(c for c in cands if c > xt)
    else:
        xt = px - TOL
        cands = []
        i_s = math.floor((xt - b) / a)
        if i_s >= 1:
            cands.append(a * i_s + b)
        i_e = math.floor((xt - b - 1) / a)
        if i_e >= 1:
            cands.append(a * i_e + b + 1)
        if not cands:
            return None
        xe = max(cands)
    t = (xe - px) / ux
    if t <= T_EPS or t > tmax + T_EPS:
        return None
    i = row_index(row, xe, TOL)
    m = MarkRef(sheet, row.family, i, row.j)
    return _Event(t, "cone", m, 0.0 if xe == row.start(i) else 1.0, (float(xe), float(y0)))


def _column_event(sheet, P, u, tmax):
    """First Lprime mark (rows y = 2i+1, 0 <= x <= 1) met by the ray."""
    px, py = P
    ux, uy = u
    if abs(ux) > _TINY:
        lo, hi = sorted(((-TOL - px) / ux, (1 + TOL - px) / ux))
    elif -TOL <= px <= 1 + TOL:
        lo, hi = -math.inf, math.inf
    else:
        return None
    lo, hi = max(lo, T_EPS), min(hi, tmax + T_EPS)
    if lo > hi:
        return None
    if abs(uy) > _TINY:
        ya, yb = py + lo * uy, py + hi * uy
        if uy > 0:
            k = max(1, math.ceil((ya - 1) / 2))
            if 2 * k + 1 > yb:
                return None
        else:
            k = math.floor((ya - 1) / 2)
            if k < 1 or 2 * k + 1 < yb:
                return None
        y = 2 * k + 1
        t = (y - py) / uy
        if t <= T_EPS:
            return None
        x = px + t * ux
        m = MarkRef(sheet, Family.LPRIME, k)
        if abs(x) <= TOL:
            return _Event(t, "cone", m, 0.0, (0.0, float(y)))
        if abs(x - 1) <= TOL:
            return _Event(t, "cone", m, 1.0, (1.0, float(y)))
        return _Event(t, "slit", m, x, (x, float(y)))
    k = lprime_index(px, py, TOL)
    if k is None or ux == 0:
        return None
    targets = [e for e in (0.0, 1.0) if (e - px) * ux > TOL * abs(ux)]
    if not targets:
        return None
    xe = min(targets, key=lambda e: (e - px) / ux)
    t = (xe - px) / ux
    if t > tmax + T_EPS:
        return None
    return _Event(t, "cone", MarkRef(sheet, Family.LPRIME, k), xe, (xe, float(2 * k + 1)))


def _segment_event(m, p, q, P, u, tmax):
    px, py = P
    ux, uy = u
    dx, dy = q[0] - p[0], q[1] - p[1]
    wx, wy = p[0] - px, p[1] - py
    L = math.hypot(dx, dy)
    nu = math.hypot(ux, uy)
    denom = ux * dy - uy * dx
    if abs(denom) > 1e-14 * L * nu:
        t = (wx * dy - wy * dx) / denom
        s = (wx * uy - wy * ux) / denom
        slack = TOL / L
        if t <= T_EPS or t > tmax + T_EPS or s < -slack or s > 1 + slack:
            return None
        if s * L <= TOL:
            return _Event(t, "cone", m, 0.0, (p[0], p[1]))
        if (1 - s) * L <= TOL:
            return _Event(t, "cone", m, 1.0, (q[0], q[1]))
        return _Event(t, "slit", m, s, (px + t * ux, py + t * uy))
    if abs(wx * uy - wy * ux) > TOL * nu:
        return None
    best = None
    for s, e in ((0.0, p), (1.0, q)):
        t = ((e[0] - px) * ux + (e[1] - py) * uy) / (nu * nu)
        if T_EPS < t <= tmax + T_EPS and (best is None or t < best.t):
            best = _Event(t, "cone", m, s, (e[0], e[1]))
    return best


def _float_endpoints(surface, m):
    p, q = surface.endpoints(m)
    return (float(p[0]), float(p[1])), (float(q[0]), float(q[1]))


def next_event(surface, sheet: SheetId, fold: int, P, u, tmax: float):
    """Earliest event within flat length ``tmax`` of P moving with local velocity u."""
    best = None

    def consider(ev):
        nonlocal best
        if ev is None:
            return
        if best is None or ev.t < best.t - T_EPS or (ev.t <= best.t + T_EPS and ev.kind == "cone"):
            best = ev

    J = surface.J
    if not (sheet.kind is Kind.COVER and fold != 0):
        for row in sheet_rows(sheet, J):
            consider(_row_event(sheet, row, P, u, tmax))
        if sheet.kind is Kind.BUFFER2:
            consider(_column_event(sheet, P, u, tmax))
        for m in sheet_singletons(sheet, J):
            p, q = _float_endpoints(surface, m)
            consider(_segment_event(m, p, q, P, u, tmax))
    if sheet.kind is Kind.COVER:
        px, py = P
        ux, uy = u
        nu2 = ux * ux + uy * uy
        t0 = -(px * ux + py * uy) / nu2
        if T_EPS < t0 <= tmax + T_EPS:
            cx, cy = px + t0 * ux, py + t0 * uy
            if cx * cx + cy * cy <= TOL * TOL:
                consider(_Event(t0, "cone", None, 0.0, (0.0, 0.0)))
        if abs(uy) > _TINY:
            t = -py / uy
            if T_EPS < t <= tmax + T_EPS and px + t * ux < -TOL:
                consider(_Event(t, "cut", None, 0.0, (px + t * ux, 0.0)))
    return best


def _orientation(surface, m, partner) -> int:
    """+1 when the translation gluing keeps the mark parameter, -1 when it flips it."""
    h1 = surface.holonomy(m)
    h2 = surface.holonomy(partner)
    return 1 if h1[0] * h2[0] + h1[1] * h2[1] > 0 else -1


def _transfer(surface, m: MarkRef, s: float):
    partner = surface.partner(m)
    if _orientation(surface, m, partner) < 0:
        s = 1.0 - s
    p, q = _float_endpoints(surface, partner)
    point = (p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1]))
    return partner, point


def _bank(surface, m: MarkRef, v) -> str:
    """Bank of m that flat direction v points into."""
    h = surface.holonomy(m)
    cross = float(h[0]) * v[1] - float(h[1]) * v[0]
    return "left" if cross > 0 else "right"


def cone_kind(surface, point: SurfacePoint, tol: float = TOL) -> str | None:
    """'cover_origin' (angle 6 pi), 'slit_endpoint' (4 pi) or None."""
    sheet = point.sheet
    if sheet.kind is Kind.COVER and abs(point.x) <= tol and abs(point.y) <= tol:
        return "cover_origin"
    hit = locate_mark(sheet, point.xy, surface.J, surface.placement, point.fold, tol=tol, drawn=False)
    if hit is None:
        return None
    m = hit[0]
    p, q = _float_endpoints(surface, m)
    for e in (p, q):
        if abs(point.x - e[0]) <= tol and abs(point.y - e[1]) <= tol:
            return "slit_endpoint"
    return None


def _slit_under(surface, point: SurfacePoint, tol=TOL):
    hit = locate_mark(point.sheet, point.xy, surface.J, surface.placement, point.fold, tol=tol, drawn=False)
    return None if hit is None else hit[0]


def _unit(direction):
    dx, dy = float(direction[0]), float(direction[1])
    n = math.hypot(dx, dy)
    if n == 0:
        raise ValueError("direction must be nonzero")
    return (dx / n, dy / n)


def cross_slit(surface, point: SurfacePoint, side: str | None, direction):
    """Carry a point on a slit interior across to the partner mark.

    ``side`` is the bank the point arrives from; the returned point sits on
    the partner's opposite bank. The flat direction is unchanged.
    """
    v = _unit(direction)
    m = _slit_under(surface, point)
    if m is None or m.family in DRAWN_ONLY:
        raise InadmissibleMarkError(f"no glued mark under {point}")
    p, q = _float_endpoints(surface, m)
    L = math.hypot(q[0] - p[0], q[1] - p[1])
    s = ((point.x - p[0]) * (q[0] - p[0]) + (point.y - p[1]) * (q[1] - p[1])) / (L * L)
    if s * L <= TOL or (1 - s) * L <= TOL:
        raise InadmissibleMarkError("point is a mark endpoint, not an interior point")
    h = surface.holonomy(m)
    cross = float(h[0]) * v[1] - float(h[1]) * v[0]
    if abs(cross) <= 1e-12 * math.hypot(float(h[0]), float(h[1])):
        raise TangentialCrossingError(f"direction {v} is parallel to {m}")
    arriving = "right" if cross > 0 else "left"
    if side is not None and side != arriving:
        raise InvalidStartError(f"direction {v} leaves {m} on the {side} bank without crossing")
    partner, xy = _transfer(surface, m, s)
    fold = 0
    out = SurfacePoint(partner.sheet, fold, xy[0], xy[1], _bank(surface, partner, v))
    return out, v


def _point_on_copy(surface, sheet):
    return surface.fmat(sheet.copy)


def trace_geodesic(surface, start: SurfacePoint, direction, max_len: float,
                   event_budget: int = 10_000) -> GeodesicPath:
    v = _unit(direction)
    if cone_kind(surface, start) is not None:
        raise InvalidStartError(f"start {start} is a cone point")
    sheet, fold, P = start.sheet, start.fold, (float(start.x), float(start.y))
    on = _slit_under(surface, start)
    if on is not None and on.family not in DRAWN_ONLY:
        if start.slit_side is None:
            raise InvalidStartError(f"start lies on {on}; give slit_side")
        h = surface.holonomy(on)
        cross = float(h[0]) * v[1] - float(h[1]) * v[0]
        if abs(cross) <= 1e-12:
            raise InvalidStartError(f"start direction runs along {on}")
        toward = "left" if cross > 0 else "right"
        if toward != start.slit_side:
            moved, _ = cross_slit(surface, start, None, v)
            sheet, fold, P = moved.sheet, moved.fold, moved.xy
    return _run(surface, sheet, fold, P, v, max_len, event_budget)


def _run(surface, sheet, fold, P, v, max_len, budget, path=None) -> GeodesicPath:
    path = path or GeodesicPath(v)
    travelled = 0.0
    _, inv = surface.fmat(sheet.copy)
    u = _mv(inv, v)
    crossed = None
    while True:
        remaining = max_len - travelled
        ev = next_event(surface, sheet, fold, P, u, remaining) if remaining > T_EPS else None
        if ev is None:
            if remaining > T_EPS:
                end = (P[0] + remaining * u[0], P[1] + remaining * u[1])
                path.segments.append(Segment(sheet, fold, P, end))
                P, crossed = end, None
            path.total_length = max_len
            path.termination = "max_length"
            side = _bank(surface, crossed, v) if crossed is not None else None
            path.end = SurfacePoint(sheet, fold, P[0], P[1], side)
            return path
        end = ev.point if ev.point is not None else (P[0] + ev.t * u[0], P[1] + ev.t * u[1])
        path.segments.append(Segment(sheet, fold, P, end))
        travelled += ev.t
        path.total_length = travelled
        if ev.kind == "cone":
            path.termination = "cone_point"
            path.cone = SurfacePoint(sheet, fold if sheet.kind is Kind.COVER else 0, end[0], end[1])
            path.end = path.cone
            return path
        if path.events >= budget:
            path.termination = "budget"
            path.end = SurfacePoint(sheet, fold, end[0], end[1])
            return path
        path.events += 1
        if ev.kind == "cut":
            fold = next_fold(fold, u[1] < 0)
            P, crossed = end, None
            continue
        try:
            partner, P = _transfer(surface, ev.mark, ev.s)
        except FrontierUngluedError as exc:
            path.end = SurfacePoint(sheet, fold, end[0], end[1])
            exc.path = path
            raise
        crossed = partner
        if partner.copy != sheet.copy:
            _, inv = surface.fmat(partner.copy)
            u = _mv(inv, v)
        sheet, fold = partner.sheet, 0


def trace_from(surface, sheet: SheetId, fold: int, P, direction, max_len: float,
               event_budget: int = 10_000) -> GeodesicPath:
    """Trace without start validation, e.g. out of a cone point.

    Events at the start point itself are ignored, so a ray leaving a cone
    point along a sheet is followed on that sheet.
    """
    return _run(surface, sheet, fold, (float(P[0]), float(P[1])), _unit(direction), max_len, event_budget)


def flat_offset(surface, copy, local_vec):
    m, _ = surface.fmat(copy)
    return _mv(m, local_vec)


def local_offset(surface, copy, flat_vec):
    _, inv = surface.fmat(copy)
    return _mv(inv, flat_vec)
