"""Sheets and mark families of one affine copy of the decorated surface.

All coordinates here are in the base chart of a copy: the copy matrix is
applied only when measuring lengths, holonomies and distances.

Families, with i >= 1 and generator numbers j = 1..J:

=========  ==========  ==========================================
family     sheet       segment
=========  ==========  ==========================================
McheckJ    Buffer1(j)  (4i, 0) -> (4i+1, 0)
L          Buffer1(j)  (4i+2, 0) -> (4i+3, 0)
Lprime     Buffer2(j)  (0, 2i+1) -> (1, 2i+1)
HjCheck    Buffer2(j)  (0, 2) -> (1, 2)                  singleton
M          Base        (4i-1, 0) -> (4i, 0)
Mj         Base        (2i-1, j) -> (2i, j)
Mneg       Base        placement dependent               singleton per j
T1, T2     Base        (0, 1) -> (0, 2), (0, -1) -> (0, -2)   drawn only
Mtilde     Cover       (4i-1, 0) -> (4i, 0), fold 0
Ttilde1    Cover       (0, 1) -> (0, 2), fold 0          singleton
Ttilde2    Cover       (0, -1) -> (0, -2), fold 0        singleton
=========  ==========  ==========================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .errors import InadmissibleMarkError
from .group import GroupElement


class Kind(Enum):
    BASE = "base"
    COVER = "cover"
    BUFFER1 = "buffer1"
    BUFFER2 = "buffer2"


@dataclass(frozen=True)
class SheetId:
    copy: GroupElement
    kind: Kind
    j: int = 0  # generator number for buffer sheets

    def __post_init__(self):
        buffered = self.kind in (Kind.BUFFER1, Kind.BUFFER2)
        if buffered and self.j < 1:
            raise InadmissibleMarkError(f"{self.kind.value} sheet needs a generator number >= 1")
        if not buffered and self.j != 0:
            raise InadmissibleMarkError(f"{self.kind.value} sheet carries no generator number")

    def name(self) -> str:
        return self.kind.value if self.j == 0 else f"{self.kind.value}({self.j})"


class Family(Enum):
    MCHECK = "McheckJ"
    L = "L"
    LPRIME = "Lprime"
    HCHECK = "HjCheck"
    M = "M"
    MJ = "Mj"
    MNEG = "Mneg"
    T1 = "T1"
    T2 = "T2"
    MTILDE = "Mtilde"
    TT1 = "Ttilde1"
    TT2 = "Ttilde2"


SINGLETONS = frozenset({Family.HCHECK, Family.MNEG, Family.T1, Family.T2, Family.TT1, Family.TT2})
PARAMETRIZED = frozenset({Family.MCHECK, Family.HCHECK, Family.MJ, Family.MNEG})
DRAWN_ONLY = frozenset({Family.T1, Family.T2})
INTER_COPY = frozenset({Family.HCHECK, Family.MNEG})

SHEET_FAMILIES = {
    Kind.BASE: (Family.M, Family.MJ, Family.MNEG, Family.T1, Family.T2),
    Kind.COVER: (Family.MTILDE, Family.TT1, Family.TT2),
    Kind.BUFFER1: (Family.MCHECK, Family.L),
    Kind.BUFFER2: (Family.LPRIME, Family.HCHECK),
}
FAMILY_SHEET = {f: k for k, fams in SHEET_FAMILIES.items() for f in fams}


@dataclass(frozen=True)
class MarkRef:
    sheet: SheetId
    family: Family
    index: int = 1
    j: int = 0  # family parameter (McheckJ, HjCheck, Mj, Mneg)

    def __post_init__(self):
        check_admissible(self)

    @property
    def copy(self) -> GroupElement:
        return self.sheet.copy

    def label(self) -> str:
        f = self.family.value
        if self.family in PARAMETRIZED:
            f = f"{f}({self.j})"
        if self.family in SINGLETONS:
            return f
        return f"{f}[{self.index}]"

    def __str__(self):
        return f"{self.copy.label()}:{self.sheet.name()}:{self.label()}"


def check_admissible(m: MarkRef) -> None:
    f = m.family
    if FAMILY_SHEET[f] is not m.sheet.kind:
        raise InadmissibleMarkError(f"{f.value} does not live on {m.sheet.kind.value}")
    if m.index < 1 or (f in SINGLETONS and m.index != 1):
        raise InadmissibleMarkError(f"bad index {m.index} for {f.value}")
    if f in PARAMETRIZED:
        if m.j < 1:
            raise InadmissibleMarkError(f"{f.value} needs a generator number")
        if m.sheet.j and m.sheet.j != m.j:
            raise InadmissibleMarkError(f"{f.value}({m.j}) not on {m.sheet.name()}")
    elif m.j != 0:
        raise InadmissibleMarkError(f"{f.value} takes no generator number")


def mark(copy: GroupElement, family: Family, index: int = 1, j: int = 0) -> MarkRef:
    """Shorthand that picks the right sheet for ``family``."""
    kind = FAMILY_SHEET[family]
    sheet_j = j if kind in (Kind.BUFFER1, Kind.BUFFER2) else 0
    return MarkRef(SheetId(copy, kind, sheet_j), family, index, j)


class Row(NamedTuple):
    """Horizontal family at height y whose i-th mark starts at x = a*i + b."""

    family: Family
    y: int
    a: int
    b: int
    j: int = 0

    def start(self, i):
        return self.a * i + self.b


ROW_M = Row(Family.M, 0, 4, -1)
ROW_MTILDE = Row(Family.MTILDE, 0, 4, -1)


def row_mj(j: int) -> Row:
    return Row(Family.MJ, j, 2, -1, j)


def row_mcheck(j: int) -> Row:
    return Row(Family.MCHECK, 0, 4, 0, j)


ROW_L = Row(Family.L, 0, 4, 2)

_FIXED = {
    Family.HCHECK: ((0, 2), (1, 2)),
    Family.T1: ((0, 1), (0, 2)),
    Family.T2: ((0, -1), (0, -2)),
    Family.TT1: ((0, 1), (0, 2)),
    Family.TT2: ((0, -1), (0, -2)),
}


def _frac_pt(p):
    return (Fraction(p[0]), Fraction(p[1]))


def mark_endpoints(m: MarkRef, placement=None):
    """Exact base-chart endpoints (p, q) of ``m``.

    ``placement`` supplies Mneg endpoints through ``placement.mneg(j)``.
    """
    f, i = m.family, m.index
    if f in _FIXED:
        p, q = _FIXED[f]
        return _frac_pt(p), _frac_pt(q)
    if f is Family.MNEG:
        if placement is None:
            raise InadmissibleMarkError("Mneg endpoints need a placement")
        return placement.mneg(m.j)
    if f is Family.LPRIME:
        return _frac_pt((0, 2 * i + 1)), _frac_pt((1, 2 * i + 1))
    row = row_of(m)
    x = Fraction(row.start(i))
    return (x, Fraction(row.y)), (x + 1, Fraction(row.y))


def row_of(m: MarkRef) -> Row:
    f = m.family
    if f is Family.M:
        return ROW_M
    if f is Family.MTILDE:
        return ROW_MTILDE
    if f is Family.MJ:
        return row_mj(m.j)
    if f is Family.MCHECK:
        return row_mcheck(m.j)
    if f is Family.L:
        return ROW_L
    raise InadmissibleMarkError(f"{f.value} is not a row family")


def sheet_rows(sheet: SheetId, J: int) -> list[Row]:
    k = sheet.kind
    if k is Kind.BASE:
        return [ROW_M] + [row_mj(j) for j in range(1, J + 1)]
    if k is Kind.COVER:
        return [ROW_MTILDE]
    if k is Kind.BUFFER1:
        return [row_mcheck(sheet.j), ROW_L]
    return []


def sheet_singletons(sheet: SheetId, J: int, drawn: bool = False) -> list[MarkRef]:
    k = sheet.kind
    if k is Kind.BASE:
        out = [MarkRef(sheet, Family.MNEG, 1, n) for n in range(1, J + 1)]
        if drawn:
            out += [MarkRef(sheet, Family.T1), MarkRef(sheet, Family.T2)]
        return out
    if k is Kind.COVER:
        return [MarkRef(sheet, Family.TT1), MarkRef(sheet, Family.TT2)]
    if k is Kind.BUFFER2:
        return [MarkRef(sheet, Family.HCHECK, 1, sheet.j)]
    return []


def row_index(row: Row, x, tol=0):
    """Index i >= 1 whose closed mark on ``row`` contains abscissa x, else None."""
    i = math.floor((x - row.b + tol) / row.a)
    if i < 1:
        return None
    if x <= row.start(i) + 1 + tol:
        return i
    return None


def lprime_index(x, y, tol=0):
    if not (-tol <= x <= 1 + tol):
        return None
    k = round((y - 1) / 2)
    if k >= 1 and abs(2 * k + 1 - y) <= tol:
        return k
    return None


def _on_segment(p, q, pt, tol):
    """Parameter s in [0, 1] of pt on segment pq, or None."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    rx, ry = pt[0] - p[0], pt[1] - p[1]
    ll = dx * dx + dy * dy
    cross = dx * ry - dy * rx
    if tol:
        if abs(cross) > tol * math.sqrt(ll):
            return None
        slack = tol / math.sqrt(ll)
    else:
        if cross != 0:
            return None
        slack = 0
    s = (rx * dx + ry * dy) / ll
    if -slack <= s <= 1 + slack:
        return s
    return None


def side_of(p, q, direction) -> str:
    """Bank of mark pq from which a point moving along ``direction`` arrives."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    cross = dx * direction[1] - dy * direction[0]
    if cross == 0:
        raise ValueError("direction parallel to mark")
    # moving toward the left bank means arriving from the right one
    return "right" if cross > 0 else "left"


def locate_mark(sheet: SheetId, point, J: int, placement=None, fold: int = 0,
                direction=None, tol=0, drawn: bool = True):
    """The mark whose closed segment contains ``point``, as (MarkRef, side).

    Row families are inverted arithmetically; side is resolved from
    ``direction`` (the approach direction) when the point is interior.
    Returns None when no mark contains the point.
    """
    x, y = point
    if sheet.kind is Kind.COVER and fold != 0:
        return None
    found = None
    for row in sheet_rows(sheet, J):
        if abs(y - row.y) <= tol:
            i = row_index(row, x, tol)
            if i is not None:
                found = MarkRef(sheet, row.family, i, row.j)
                break
    if found is None and sheet.kind is Kind.BUFFER2:
        i = lprime_index(x, y, tol)
        if i is not None:
            found = MarkRef(sheet, Family.LPRIME, i)
    if found is None:
        for m in sheet_singletons(sheet, J, drawn=drawn):
            p, q = mark_endpoints(m, placement)
            if _on_segment(p, q, point, tol) is not None:
                found = m
                break
    if found is None:
        return None
    side = None
    if direction is not None:
        p, q = mark_endpoints(found, placement)
        s = _on_segment(p, q, point, tol)
        length = math.hypot(float(q[0] - p[0]), float(q[1] - p[1]))
        if tol < s * length < length - tol:
            try:
                side = side_of(p, q, direction)
            except ValueError:
                side = None
    return found, side


def marks_in_box(sheet: SheetId, box, J: int, placement=None, fold: int = 0,
                 drawn: bool = False) -> list[MarkRef]:
    """Every mark meeting the closed box (xmin, xmax, ymin, ymax).

    May include a few singletons that only meet the bounding box of the
    segment; never omits a mark that meets the box.
    """
    xmin, xmax, ymin, ymax = box
    if sheet.kind is Kind.COVER and fold != 0:
        return []
    out = []
    for row in sheet_rows(sheet, J):
        if not ymin <= row.y <= ymax:
            continue
        lo = max(1, math.ceil((xmin - 1 - row.b) / row.a))
        hi = math.floor((xmax - row.b) / row.a)
        out += [MarkRef(sheet, row.family, i, row.j) for i in range(lo, hi + 1)]
    if sheet.kind is Kind.BUFFER2 and xmax >= 0 and xmin <= 1:
        lo = max(1, math.ceil((ymin - 1) / 2))
        hi = math.floor((ymax - 1) / 2)
        out += [MarkRef(sheet, Family.LPRIME, i) for i in range(lo, hi + 1)]
    for m in sheet_singletons(sheet, J, drawn=drawn):
        p, q = mark_endpoints(m, placement)
        if (min(p[0], q[0]) <= xmax and max(p[0], q[0]) >= xmin
                and min(p[1], q[1]) <= ymax and max(p[1], q[1]) >= ymin):
            out.append(m)
    return out


def sheets_of(copy: GroupElement, J: int) -> list[SheetId]:
    out = [SheetId(copy, Kind.BASE), SheetId(copy, Kind.COVER)]
    for j in range(1, J + 1):
        out += [SheetId(copy, Kind.BUFFER1, j), SheetId(copy, Kind.BUFFER2, j)]
    return out
