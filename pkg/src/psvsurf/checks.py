"""Validators, the surface ends census and the Veech-group checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .errors import InputError, InvalidCutError, RegionError
from .group import GroupElement, Mat2, frontier_components
from .marks import (
    DRAWN_ONLY,
    INTER_COPY,
    Family,
    Kind,
    MarkRef,
    SheetId,
    mark,
    marks_in_box,
)
from .tracer import SurfacePoint


@dataclass
class Report:
    check: str
    passed: bool | None  # None = inconclusive
    details: dict = field(default_factory=dict)
    offending: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return {True: "pass", False: "fail", None: "inconclusive"}[self.passed]

    def to_dict(self):
        return {"check": self.check, "status": self.status, "passed": self.passed,
                "details": self.details, "offending": self.offending}


# ---------------------------------------------------------------- gluings

def intra_pairs(copy: GroupElement, J: int, N: int):
    """Every intra-copy glued pair of one copy with index <= N, each once."""
    yield mark(copy, Family.TT1), mark(copy, Family.TT2)
    for i in range(1, N + 1):
        yield mark(copy, Family.M, i), mark(copy, Family.MTILDE, i)
        for j in range(1, J + 1):
            yield mark(copy, Family.MJ, i, j), mark(copy, Family.MCHECK, i, j)
            b1, b2 = SheetId(copy, Kind.BUFFER1, j), SheetId(copy, Kind.BUFFER2, j)
            yield MarkRef(b1, Family.L, i), MarkRef(b2, Family.LPRIME, i)


def pair_violation(surface, a: MarkRef, b: MarkRef) -> str | None:
    """Exact check that two glued marks are parallel with equal length."""
    if surface.partner(a) != b or surface.partner(b) != a:
        return "not a registered involutive pair"
    ha, hb = surface.holonomy(a), surface.holonomy(b)
    if ha[0] * hb[1] - ha[1] * hb[0] != 0:
        return "not parallel"
    if ha[0] ** 2 + ha[1] ** 2 != hb[0] ** 2 + hb[1] ** 2:
        return "lengths differ"
    return None


def validate_gluings(surface, N: int = 100) -> Report:
    checked = 0
    bad = []
    pairs = []
    for g in surface.copies():
        pairs.extend(intra_pairs(g, surface.J, N))
    pairs.extend(sorted(surface.registry.inter_pairs(), key=lambda p: (str(p[0]), str(p[1]))))
    for a, b in pairs:
        checked += 1
        why = pair_violation(surface, a, b)
        if why:
            bad.append({"from": str(a), "to": str(b), "reason": why})
    return Report("gluings", not bad, {"pairs_checked": checked, "index_bound": N}, bad)


# ------------------------------------------------------------- separation

def _seg_point_dist(p, a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def segment_distance(s1, s2) -> float:
    (a, b), (c, d) = s1, s2
    d1, d2 = _cross(a, b, c), _cross(a, b, d)
    d3, d4 = _cross(c, d, a), _cross(c, d, b)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return 0.0
    return min(_seg_point_dist(a, c, d), _seg_point_dist(b, c, d),
               _seg_point_dist(c, a, b), _seg_point_dist(d, a, b))


def _flat_segment(surface, m):
    M, _ = surface.fmat(m.copy)
    p, q = surface.endpoints(m)
    f = lambda v: (M[0] * float(v[0]) + M[1] * float(v[1]), M[2] * float(v[0]) + M[3] * float(v[1]))
    return f(p), f(q)


def _box_clearance(surface, copy, seg_local, B) -> float:
    """Flat distance from a segment to the complement of g([-B, B]^2)."""
    pts = [(float(x), float(y)) for x, y in seg_local]
    if any(abs(x) > B or abs(y) > B for x, y in pts):
        return 0.0
    M, _ = surface.fmat(copy)
    a, b, c, d = M
    corners = [(-B, -B), (B, -B), (B, B), (-B, B)]
    fc = [(a * x + b * y, c * x + d * y) for x, y in corners]
    best = math.inf
    for k in range(4):
        u, v = fc[k], fc[(k + 1) % 4]
        n = math.hypot(v[0] - u[0], v[1] - u[1])
        for x, y in pts:
            fp = (a * x + b * y, c * x + d * y)
            best = min(best, abs(_cross(u, v, fp)) / n)
    return best


def default_region(surface) -> int:
    pl = surface.placement
    return max(16, surface.J * pl.gap + pl.reach + 4)


@dataclass
class SeparationResult:
    copy: GroupElement
    bound: float
    region: int
    path: list

    @property
    def passed(self) -> bool:
        return self.bound >= 1 / math.sqrt(2) - 1e-9

    def report(self) -> Report:
        return Report("separation", self.passed,
                      {"copy": list(self.copy.word), "lower_bound": float("%.12g" % self.bound),
                       "threshold": float("%.12g" % (1 / math.sqrt(2))), "region": self.region,
                       "path": self.path},
                      [] if self.passed else [list(self.copy.word)])


def check_separation(surface, copy: GroupElement, region: int | None = None) -> SeparationResult:
    """Certified lower bound on the flat distance, inside one copy, between
    the HjCheck marks and the Mneg marks.

    Any path between the two families inside the copy is a chain of
    straight pieces, each on one sheet between two slits. The bound is a
    shortest path in the graph whose nodes are the glued slits (a mark and
    its partner form one node) and whose edge weights are same-sheet
    segment distances. Slits outside the box [-B, B]^2 are merged into one
    far node reached at the distance to the box boundary.
    """
    B = default_region(surface) if region is None else region
    J = surface.J
    box = (-B, B, -B, B)
    sources = [mark(copy, Family.HCHECK, 1, j) for j in range(1, J + 1)]
    targets = [mark(copy, Family.MNEG, 1, j) for j in range(1, J + 1)]
    for m in sources + targets:
        p, q = surface.endpoints(m)
        if max(abs(p[0]), abs(p[1]), abs(q[0]), abs(q[1])) > B:
            raise RegionError(f"region {B} does not contain {m}")

    def node(m):
        if m.family in INTER_COPY:
            return str(m)
        return min(str(m), str(surface.partner(m)))

    G = nx.Graph()
    far = "far"
    for sheet in surface.sheets(copy):
        members = [m for m in marks_in_box(sheet, box, J, surface.placement, 0)
                   if m.family not in DRAWN_ONLY]
        segs = {m: _flat_segment(surface, m) for m in members}
        for k, m in enumerate(members):
            w = _box_clearance(surface, copy, surface.endpoints(m), B)
            if m.family not in INTER_COPY:
                # a partner outside the box is reachable through the far node
                w = min(w, _box_clearance(surface, copy, surface.endpoints(surface.partner(m)), B))
            G.add_edge(node(m), far, weight=w)
            for m2 in members[k + 1:]:
                w = segment_distance(segs[m], segs[m2])
                n1, n2 = node(m), node(m2)
                if n1 == n2:
                    continue
                if G.has_edge(n1, n2):
                    w = min(w, G[n1][n2]["weight"])
                G.add_edge(n1, n2, weight=w)
    src = {str(m) for m in sources}
    dst = {str(m) for m in targets}
    dist, paths = nx.multi_source_dijkstra(G, src, weight="weight")
    best = min(dst, key=lambda n: dist.get(n, math.inf))
    return SeparationResult(copy, dist.get(best, math.inf), B, paths.get(best, []))


# ------------------------------------------------------------------ census

@dataclass
class SurfaceEndsCensus:
    R: int
    R_cut: int
    interior_copy_count: int
    frontier_component_count: int

    @property
    def total(self) -> int:
        return self.interior_copy_count + self.frontier_component_count

    def to_dict(self):
        return {"R": self.R, "R_cut": self.R_cut, "interior": self.interior_copy_count,
                "frontier": self.frontier_component_count, "total": self.total}


def copy_graph(surface) -> nx.Graph:
    """Copies as nodes, one edge per realized inter-copy gluing."""
    G = nx.Graph()
    for g in surface.copies():
        G.add_node(g.matrix)
    for a, b in surface.registry.inter_pairs():
        G.add_edge(a.copy.matrix, b.copy.matrix, j=a.j)
    return G


def surface_ends_census(surface, R_cut: int) -> SurfaceEndsCensus:
    """Complement components of the compact core built from copies with
    |g| <= R_cut.

    Each core copy leaves one complement component of its own. The core
    cuts every gluing between two core copies; the remaining copies, with
    the gluings that survive, form the components reaching the frontier.
    """
    ball = surface.ball
    R = ball.radius
    if not 0 <= R_cut < R:
        raise InvalidCutError(f"core radius {R_cut} must satisfy 0 <= R_cut < {R}")
    length = {m: v.word_length for m, v in ball.vertices.items()}
    G = copy_graph(surface)
    cut = [(u, v) for u, v in G.edges if length[u] <= R_cut and length[v] <= R_cut]
    G.remove_edges_from(cut)
    interior = sum(1 for m in length if length[m] <= R_cut)
    frontier = len(frontier_components(G, length, R_cut, R))
    return SurfaceEndsCensus(R, R_cut, interior, frontier)


def census_table(surface) -> list[SurfaceEndsCensus]:
    return [surface_ends_census(surface, r) for r in range(surface.ball.radius)]


def genus_witness(surface, copy: GroupElement, r) -> int:
    """Index i of a glued pair (L(i), Lprime(i)) starting beyond radius r."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    return max(1, math.floor((Fraction(r) - 2) / 4) + 1)


# ------------------------------------------------------------------ Veech

def veech_relabel_check(surface, gt: GroupElement) -> Report:
    """Check that g -> gt g maps realized inter-copy gluings to realized ones."""
    ball = surface.ball
    if gt.matrix not in ball:
        raise InputError(f"{gt.matrix} is not in the ball")
    checked = unverifiable = 0
    bad = []
    for a, b in surface.registry.inter_pairs():
        ga, gb = gt.matrix @ a.copy.matrix, gt.matrix @ b.copy.matrix
        if ga not in ball or gb not in ball:
            unverifiable += 1
            continue
        checked += 1
        ia = mark(ball.element(ga), Family.HCHECK, 1, a.j)
        ib = mark(ball.element(gb), Family.MNEG, 1, a.j)
        if surface.registry.inter.get(ia) != ib:
            bad.append({"from": str(a), "to": str(b), "image": [str(ia), str(ib)]})
    return Report("relabel", not bad,
                  {"element": list(gt.word), "checked": checked, "unverifiable": unverifiable}, bad)


def _frame(m: Mat2):
    e1, e2 = m.apply((1, 0)), m.apply((0, 1))
    return {e1, e2, (-e1[0], -e1[1]), (-e2[0], -e2[1])}


def veech_constraint_candidates(surface, d: Mat2) -> list[GroupElement]:
    """Ball elements whose marker frame {+-g e1, +-g e2} equals that of d."""
    target = _frame(d)
    return [g for g in surface.copies() if _frame(g.matrix) == target]


def veech_constraint_check(surface, d: Mat2) -> GroupElement | None:
    """The enumerated g that d must equal as the derivative of an affine map.

    Frame sets alone leave a rotation by a multiple of 90 degrees free; the
    marker point also fixes the sense of g e1 (only one horizontal saddle
    connection leaves it), which together with det > 0 pins down g.
    """
    if d.det <= 0:
        raise InputError("d must have positive determinant")
    de1, de2 = d.apply((1, 0)), d.apply((0, 1))
    hits = [g for g in veech_constraint_candidates(surface, d)
            if g.matrix.apply((1, 0)) == de1 and g.matrix.apply((0, 1)) in (de2, (-de2[0], -de2[1]))]
    return hits[0] if len(hits) == 1 else None


def frame_norm(copy: GroupElement) -> float:
    a, b, c, d = copy.matrix.to_float()
    return max(math.hypot(a, c), math.hypot(b, d))


def singularity_marker_check(surface, copy: GroupElement, L_max: float | None = None,
                             **search) -> Report:
    """Saddle connections at the 6 pi point of a copy point along its frame."""
    from .cones import find_saddle_connections

    L = 1.5 * frame_norm(copy) if L_max is None else L_max
    c = SurfacePoint(SheetId(copy, Kind.COVER), 0, 0.0, 0.0)
    res = find_saddle_connections(surface, c, L, **search)
    a, b, cc, d = copy.matrix.to_float()
    frame = [(a, cc), (-a, -cc), (b, d), (-b, -d)]

    def along(v, w):
        nv, nw = math.hypot(*v), math.hypot(*w)
        return abs(v[0] * w[1] - v[1] * w[0]) <= 1e-9 * nv * nw and v[0] * w[0] + v[1] * w[1] > 0

    hols = res.holonomies()
    stray = [list(v) for v in hols if not any(along(v, w) for w in frame)]
    has_e2 = all(any(along(v, w) for v in hols) for w in frame[2:])
    passed = None if res.inconclusive else (not stray and has_e2)
    return Report("singularity_marker", passed,
                  {"copy": list(copy.word), "L_max": float("%.12g" % L), "grid": res.grid,
                   "stable": res.stable, "holonomies": [[float("%.12g" % x) for x in v] for v in hols]},
                  stray)
