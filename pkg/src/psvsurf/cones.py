"""Cone angles and saddle connections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ProbeRadiusError, PSVError
from .marks import Family, Kind, SheetId, marks_in_box
from .tracer import (
    TOL,
    SurfacePoint,
    _float_endpoints,
    _mv,
    cone_kind,
    trace_from,
)

TWO_PI = 2 * math.pi
EXPECTED = {None: TWO_PI, "slit_endpoint": 2 * TWO_PI, "cover_origin": 3 * TWO_PI}


@dataclass
class ConeReport:
    location: SurfacePoint
    measured_angle: float
    expected: float
    steps: int = 0

    @property
    def multiple(self) -> int:
        return round(self.measured_angle / TWO_PI)

    def matches(self, tol: float = 1e-4) -> bool:
        return abs(self.measured_angle - self.expected) <= tol

    def to_dict(self):
        return {
            "location": self.location.to_dict(),
            "measured_angle": float("%.12g" % self.measured_angle),
            "expected": float("%.12g" % self.expected),
            "multiple_of_2pi": self.multiple,
        }


def sigma_min(copy) -> float:
    a, b, c, d = copy.matrix.to_float()
    # singular values from the 2x2 Gram matrix
    p = a * a + c * c
    r = b * b + d * d
    q = a * b + c * d
    tr, det = p + r, p * r - q * q
    disc = math.sqrt(max(tr * tr / 4 - det, 0.0))
    return math.sqrt(max(tr / 2 - disc, 0.0))


def _frob(m) -> float:
    return math.sqrt(sum(x * x for x in m))


def cone_points_near(surface, sheet: SheetId, fold: int, center, radius: float):
    """Cone points of a sheet within flat distance ``radius`` of a local point.

    Returns (local point, flat distance) pairs. Mark endpoints live on fold 0
    of the cover; the cover origin is a cone point on every fold.
    """
    M, inv = surface.fmat(sheet.copy)
    reach = _frob(inv) * radius + TOL
    cx, cy = center
    box = (cx - reach, cx + reach, cy - reach, cy + reach)
    pts = []
    for m in marks_in_box(sheet, box, surface.J, surface.placement, fold, drawn=False):
        pts.extend(_float_endpoints(surface, m))
    if sheet.kind is Kind.COVER:
        pts.append((0.0, 0.0))
    out = []
    for p in set(pts):
        fx, fy = _mv(M, (p[0] - cx, p[1] - cy))
        dist = math.hypot(fx, fy)
        if dist <= radius:
            out.append((p, dist))
    return sorted(out)


def safe_probe_radius(surface, copy) -> float:
    """A probe radius that keeps circles around cone points of ``copy`` clear
    of every other cone point, including on neighbouring copies."""
    H = surface.gens
    spacing = 1.0
    for n in H.numbers():
        vx, vy = surface.placement.vectors[n - 1]
        spacing = min(spacing, math.hypot(float(vx), float(vy)))
    sig = sigma_min(copy)
    for j in H.numbers():
        sig = min(sig, sigma_min(type(copy)(copy.matrix @ H.h(j))))
    return 0.25 * sig * spacing


def angle_at(surface, p: SurfacePoint, rho: float = 0.25, steps: int = 720,
             theta0: float = 0.1234, max_turns: int = 6, event_budget: int = 1000) -> ConeReport:
    """Total angle at p, measured by walking a chord polygon of radius rho.

    The walk advances one chord per 2 pi / steps of angle and stops once it
    is back at its starting position on the same sheet and fold; the angle
    is the number of chords times the step angle.
    """
    kind = cone_kind(surface, p)
    M, inv = surface.fmat(p.sheet.copy)
    for q, dist in cone_points_near(surface, p.sheet, p.fold, p.xy, rho * (1 + 1e-9)):
        if dist > TOL:
            raise ProbeRadiusError(f"cone point {q} lies within probe radius {rho} of {p.xy}")
    dtheta = TWO_PI / steps
    off = _mv(inv, (rho * math.cos(theta0), rho * math.sin(theta0)))
    start = (p.sheet, p.fold, (p.x + off[0], p.y + off[1]))
    sheet, fold, P = start
    theta = theta0
    for k in range(1, steps * max_turns + 1):
        nxt = theta + dtheta
        chord = (rho * (math.cos(nxt) - math.cos(theta)), rho * (math.sin(nxt) - math.sin(theta)))
        length = math.hypot(*chord)
        path = trace_from(surface, sheet, fold, P, chord, length, event_budget)
        if path.termination == "cone_point":
            raise ProbeRadiusError(f"probe of radius {rho} around {p.xy} hits a cone point")
        end = path.end
        sheet, fold, P = end.sheet, end.fold, end.xy
        theta = nxt
        if k % steps == 0 and sheet == start[0] and fold == start[1] \
                and abs(P[0] - start[2][0]) <= 1e-7 and abs(P[1] - start[2][1]) <= 1e-7:
            return ConeReport(p, k * dtheta, EXPECTED[kind], k)
    raise PSVError(f"probe around {p.xy} did not close within {max_turns} turns")


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: tuple
    length: float
    end: SurfacePoint


@dataclass
class SaddleSearch:
    origin: SurfacePoint
    L_max: float
    connections: list = field(default_factory=list)
    grid: int = 0
    stable: bool = False
    inconclusive: bool = False

    def holonomies(self) -> list:
        """Holonomies of the found connections, each listed with its negative."""
        out = set()
        for c in self.connections:
            v = c.holonomy
            out.add(_key(v))
            out.add(_key((-v[0], -v[1])))
        return sorted(out)


def _key(v, digits: int = 9):
    return (round(v[0], digits) + 0.0, round(v[1], digits) + 0.0)


def cone_charts(surface, c: SurfacePoint):
    """The (sheet, fold, local point) charts whose angular sectors make up
    the full angle at cone point c."""
    kind = cone_kind(surface, c)
    if kind is None:
        raise ValueError(f"{c} is not a cone point")
    if kind == "cover_origin":
        return [(c.sheet, f, (0.0, 0.0)) for f in range(3)]
    from .marks import locate_mark

    m, _ = locate_mark(c.sheet, c.xy, surface.J, surface.placement, c.fold, tol=TOL, drawn=False)
    charts = [(c.sheet, c.fold, c.xy)]
    if not surface.is_glued(m):
        return charts
    partner = surface.partner(m)
    p, q = _float_endpoints(surface, m)
    at_start = math.hypot(c.x - p[0], c.y - p[1]) <= TOL
    h1, h2 = surface.holonomy(m), surface.holonomy(partner)
    same = float(h1[0] * h2[0] + h1[1] * h2[1]) > 0
    p2, q2 = _float_endpoints(surface, partner)
    charts.append((partner.sheet, 0, p2 if at_start == same else q2))
    return charts


def _near_misses(surface, path, start_xy, radius):
    """Candidate holonomies of cone points passing within ``radius`` of a ray."""
    cands = []
    flat = (0.0, 0.0)
    for seg in path.segments:
        M, _ = surface.fmat(seg.sheet.copy)
        (sx, sy), (ex, ey) = seg.start, seg.end
        mid = ((sx + ex) / 2, (sy + ey) / 2)
        half = math.hypot(*_mv(M, (ex - sx, ey - sy))) / 2
        for q, _ in cone_points_near(surface, seg.sheet, seg.fold, mid, half + radius):
            d = _mv(M, (q[0] - sx, q[1] - sy))
            h = (flat[0] + d[0], flat[1] + d[1])
            if math.hypot(*h) > TOL:
                cands.append(h)
        fd = _mv(M, (ex - sx, ey - sy))
        flat = (flat[0] + fd[0], flat[1] + fd[1])
    return cands


def find_saddle_connections(surface, c: SurfacePoint, L_max: float, grid: int = 360,
                            max_refine: int = 4, event_budget: int = 10_000) -> SaddleSearch:
    """Saddle connections of length <= L_max leaving cone point c.

    Rays are shot on an angular grid in every chart at c; cone points that
    pass close to a ray yield candidate directions, each confirmed by a
    trace in its exact direction. The grid doubles until two successive
    grids find the same set. Results are what was found, not a proof of
    completeness.
    """
    charts = cone_charts(surface, c)
    search = SaddleSearch(c, L_max)
    previous = None
    K = grid
    found = {}
    for _ in range(max_refine + 1):
        current = {}
        for sheet, fold, P in charts:
            radius = L_max * TWO_PI / K + TOL
            dirs = [(math.cos(TWO_PI * k / K), math.sin(TWO_PI * k / K)) for k in range(K)]
            cands = []
            for d in dirs:
                path = trace_from(surface, sheet, fold, P, d, L_max, event_budget)
                if path.termination == "budget":
                    search.inconclusive = True
                if path.termination == "cone_point":
                    cands.append(path.holonomy)
                cands.extend(_near_misses(surface, path, P, radius))
            for h in cands:
                n = math.hypot(*h)
                if n > L_max + 1e-9:
                    continue
                key = _key(h)
                if key in current:
                    continue
                check = trace_from(surface, sheet, fold, P, h, n + 1e-7, event_budget)
                if check.termination == "cone_point" and abs(check.total_length - n) <= 1e-7:
                    current[_key(check.holonomy)] = SaddleConnection(check.holonomy, check.total_length, check.cone)
        found.update(current)
        search.grid = K
        if previous is not None and set(current) == previous:
            search.stable = True
            break
        previous = set(current)
        K *= 2
    search.connections = [found[k] for k in sorted(found)]
    return search


def saddle_connections_from(surface, c: SurfacePoint, L_max: float, **kw) -> list:
    """Holonomy vectors (with their negatives) of saddle connections from c."""
    return find_saddle_connections(surface, c, L_max, **kw).holonomies()


def cone_points_of_copy(surface, copy, limit: int = 3):
    """A few glued-mark endpoints and the cover origin of a copy, for spot checks."""
    from .marks import mark

    base = SheetId(copy, Kind.BASE)
    out = [SurfacePoint(SheetId(copy, Kind.COVER), 0, 0.0, 0.0)]
    for i in range(1, limit + 1):
        m = mark(copy, Family.M, i)
        p, q = _float_endpoints(surface, m)
        out.append(SurfacePoint(base, 0, p[0], p[1]))
    return out
