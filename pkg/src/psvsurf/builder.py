"""Decorated surface, puzzle of affine copies, and the assembled surface."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FrontierUngluedError, MalformedBallError, PlacementError
from .group import CayleyBall, GenSet, GroupElement, Mat2
from .marks import (
    Family,
    Kind,
    MarkRef,
    SheetId,
    mark,
    mark_endpoints,
    sheets_of,
)
from .registry import GluingRegistry, intra_partner


def ceil_sqrt(q: Fraction) -> int:
    """Smallest integer n >= 0 with n*n >= q."""
    q = Fraction(q)
    n = math.isqrt(q.numerator // q.denominator)
    while n * n < q:
        n += 1
    return n


@dataclass(frozen=True)
class PlacementParams:
    """Horizontal strips for the Mneg marks.

    ``reach`` bounds every |h_n^-1 e1|, so Mneg(n) stays inside
    y in [y_n - reach, y_n + reach]; strips ``gap = 2*reach + 1`` apart
    cannot touch.
    """

    reach: int
    gap: int
    offsets: tuple  # ((x_n, y_n), ...) for n = 1..J
    vectors: tuple  # h_n^-1 e1

    @classmethod
    def for_gens(cls, H: GenSet) -> "PlacementParams":
        vecs = tuple(H.h(n).inverse().apply((1, 0)) for n in H.numbers())
        reach = max(ceil_sqrt(x * x + y * y) for x, y in vecs)
        gap = 2 * reach + 1
        offsets = tuple((Fraction(1), Fraction(-n * gap)) for n in H.numbers())
        return cls(reach, gap, offsets, vecs)

    def mneg(self, n: int):
        x, y = self.offsets[n - 1]
        vx, vy = self.vectors[n - 1]
        return (x, y), (x + vx, y + vy)


def _orient(p, q, r):
    v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (v > 0) - (v < 0)


def _on(p, q, r):
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_meet(s1, s2) -> bool:
    """Exact closed-segment intersection test."""
    p1, q1 = s1
    p2, q2 = s2
    o1, o2 = _orient(p1, q1, p2), _orient(p1, q1, q2)
    o3, o4 = _orient(p2, q2, p1), _orient(p2, q2, q1)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and _on(p1, q1, p2)) or (o2 == 0 and _on(p1, q1, q2))
            or (o3 == 0 and _on(p2, q2, p1)) or (o4 == 0 and _on(p2, q2, q1)))


def place_negative_marks(H: GenSet, placement: PlacementParams | None = None):
    """Mneg(n) segments for n = 1..J, verified disjoint from each other, from
    the M and Mj rows (y >= 0) and from the drawn marks T1, T2."""
    placement = placement or PlacementParams.for_gens(H)
    segs = [placement.mneg(n) for n in H.numbers()]
    for n, (p, q) in enumerate(segs, start=1):
        if max(p[1], q[1]) >= 0:
            raise PlacementError(f"Mneg({n}) reaches y >= 0 where the M and Mj rows live")
        for t in (((0, 1), (0, 2)), ((0, -1), (0, -2))):
            if segments_meet((p, q), t):
                raise PlacementError(f"Mneg({n}) meets a T mark")
        for k in range(n + 1, len(segs) + 1):
            if segments_meet(segs[n - 1], segs[k - 1]):
                raise PlacementError(f"Mneg({n}) meets Mneg({k})")
    return segs


@dataclass(frozen=True)
class BufferSpec:
    """The two planes E(j,1), E(j,2) with L(i) glued to Lprime(i)."""

    j: int
    h: Mat2

    def sheets(self, copy: GroupElement) -> tuple[SheetId, SheetId]:
        return SheetId(copy, Kind.BUFFER1, self.j), SheetId(copy, Kind.BUFFER2, self.j)

    def families(self):
        return {Kind.BUFFER1: (Family.MCHECK, Family.L), Kind.BUFFER2: (Family.LPRIME, Family.HCHECK)}

    def partner(self, m: MarkRef) -> MarkRef | None:
        if m.family in (Family.L, Family.LPRIME):
            return intra_partner(m)
        return None


def build_buffer(j: int, h: Mat2) -> BufferSpec:
    return BufferSpec(j, h)


@dataclass(frozen=True)
class DecoratedSpec:
    """One copy's worth of sheets and intra-copy gluings.

    HjCheck(j) and Mneg(j) are left unglued here; assembly pairs them
    across copies.
    """

    gens: GenSet
    placement: PlacementParams
    buffers: tuple

    @property
    def J(self) -> int:
        return self.gens.J

    def sheets(self, copy: GroupElement) -> list[SheetId]:
        return sheets_of(copy, self.J)

    def is_glued(self, m: MarkRef) -> bool:
        return intra_partner(m) is not None

    def partner(self, m: MarkRef) -> MarkRef:
        p = intra_partner(m)
        if p is None:
            missing = m.copy.word + ((m.j,) if m.family is Family.HCHECK else (self.gens.inv(m.j),))
            raise FrontierUngluedError(m, missing)
        return p


def build_decorated(H: GenSet) -> DecoratedSpec:
    placement = PlacementParams.for_gens(H)
    place_negative_marks(H, placement)
    buffers = tuple(build_buffer(j, H.h(j)) for j in H.numbers())
    return DecoratedSpec(H, placement, buffers)


class AssembledSurface:
    """Copies S_g for every vertex of a Cayley ball, glued along Cayley edges.

    Copies are lazy: only the group element is stored and sheets/marks are
    produced on demand from the closed-form families.
    """

    def __init__(self, ball: CayleyBall, decorated: DecoratedSpec, registry: GluingRegistry,
                 frontier_unglued: list, endpoint_overrides: dict | None = None):
        self.ball = ball
        self.decorated = decorated
        self.registry = registry
        self.frontier_unglued = frontier_unglued
        self.endpoint_overrides = dict(endpoint_overrides or {})
        self._fmat = {}

    @property
    def gens(self) -> GenSet:
        return self.decorated.gens

    @property
    def J(self) -> int:
        return self.decorated.J

    @property
    def placement(self) -> PlacementParams:
        return self.decorated.placement

    def copies(self) -> list[GroupElement]:
        return self.ball.ordered()

    def copy(self, word) -> GroupElement:
        return self.ball.by_word(word)

    def identity(self) -> GroupElement:
        return self.ball.identity()

    def sheets(self, copy: GroupElement) -> list[SheetId]:
        return self.decorated.sheets(copy)

    def fmat(self, copy: GroupElement):
        """Float (matrix, inverse) of a copy, each as (a, b, c, d)."""
        key = copy.matrix
        if key not in self._fmat:
            self._fmat[key] = (key.to_float(), key.inverse().to_float())
        return self._fmat[key]

    def endpoints(self, m: MarkRef):
        if m in self.endpoint_overrides:
            return self.endpoint_overrides[m]
        return mark_endpoints(m, self.placement)

    def holonomy(self, m: MarkRef):
        """Exact holonomy g (q - p) of mark m on its copy g."""
        p, q = self.endpoints(m)
        return m.copy.matrix.apply((q[0] - p[0], q[1] - p[1]))

    def partner(self, m: MarkRef) -> MarkRef:
        return self.registry.partner(m)

    def is_glued(self, m: MarkRef) -> bool:
        return self.registry.is_glued(m)

    def perturbed(self, m: MarkRef, endpoints) -> "AssembledSurface":
        """Copy of this surface with one mark's endpoints replaced (fault injection)."""
        over = dict(self.endpoint_overrides)
        over[m] = endpoints
        return AssembledSurface(self.ball, self.decorated, self.registry, self.frontier_unglued, over)


def assemble(ball: CayleyBall, H: GenSet, decorated: DecoratedSpec | None = None) -> AssembledSurface:
    if ball.gens != H:
        raise MalformedBallError("ball was enumerated over a different generating set")
    decorated = decorated or build_decorated(H)
    registry = GluingRegistry(H)
    for m, j in sorted(ball.edges, key=lambda e: (ball.vertices[e[0]].word if e[0] in ball.vertices else (), e[1])):
        if m not in ball.vertices:
            raise MalformedBallError(f"edge ({m}, {j}) starts outside the ball")
        target = m @ H.h(j)
        if target not in ball.vertices:
            raise MalformedBallError(f"edge ({m}, {j}) ends outside the ball")
        if target == m:
            raise MalformedBallError(f"generator {j} gives a self-loop at {m}")
        g, gh = ball.vertices[m], ball.vertices[target]
        registry.add_inter(mark(g, Family.HCHECK, 1, j), mark(gh, Family.MNEG, 1, j))
    frontier = []
    for g in ball.ordered():
        for j in H.numbers():
            for m in (mark(g, Family.HCHECK, 1, j), mark(g, Family.MNEG, 1, j)):
                if m not in registry.inter:
                    frontier.append(m)
    return AssembledSurface(ball, decorated, registry, frontier)
