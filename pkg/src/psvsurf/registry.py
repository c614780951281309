"""The pairing of glued marks.

Intra-copy rules are closed form and hold in every copy:

* Mtilde(i) on the cover  <-> M(i) on the base
* Mj(j, i) on the base     <-> McheckJ(j, i) on Buffer1(j)
* L(i) on Buffer1(j)       <-> Lprime(i) on Buffer2(j)
* Ttilde1                  <-> Ttilde2 (both on the cover)

Inter-copy pairs come from Cayley edges: HjCheck(j) on copy g is glued to
Mneg(j) on copy g h_j. They are stored explicitly.
"""

from __future__ import annotations

from .errors import FrontierUngluedError, InadmissibleMarkError
from .marks import DRAWN_ONLY, Family, Kind, MarkRef, SheetId

_SWAP = {
    Family.M: (Family.MTILDE, Kind.COVER),
    Family.MTILDE: (Family.M, Kind.BASE),
    Family.MJ: (Family.MCHECK, Kind.BUFFER1),
    Family.MCHECK: (Family.MJ, Kind.BASE),
    Family.L: (Family.LPRIME, Kind.BUFFER2),
    Family.LPRIME: (Family.L, Kind.BUFFER1),
}


def intra_partner(m: MarkRef) -> MarkRef | None:
    f = m.family
    if f is Family.TT1:
        return MarkRef(m.sheet, Family.TT2)
    if f is Family.TT2:
        return MarkRef(m.sheet, Family.TT1)
    if f not in _SWAP:
        return None
    pf, kind = _SWAP[f]
    if f is Family.MJ:
        sheet_j, fam_j = m.j, m.j
    elif f is Family.MCHECK:
        sheet_j, fam_j = 0, m.j
    elif kind in (Kind.BUFFER1, Kind.BUFFER2):
        sheet_j, fam_j = m.sheet.j, 0
    else:
        sheet_j, fam_j = 0, 0
    return MarkRef(SheetId(m.copy, kind, sheet_j), pf, m.index, fam_j)


class GluingRegistry:
    """Perfect matching on glued marks; lookups are O(1)."""

    def __init__(self, gens):
        self.gens = gens
        self.inter: dict[MarkRef, MarkRef] = {}

    def add_inter(self, hcheck: MarkRef, mneg: MarkRef) -> None:
        for m in (hcheck, mneg):
            if m in self.inter:
                raise ValueError(f"{m} glued twice")
        self.inter[hcheck] = mneg
        self.inter[mneg] = hcheck

    def inter_pairs(self) -> list[tuple[MarkRef, MarkRef]]:
        return [(a, b) for a, b in self.inter.items() if a.family is Family.HCHECK]

    def missing_copy(self, m: MarkRef) -> tuple:
        """Word of the copy that would carry the partner of an inter-copy mark."""
        if m.family is Family.HCHECK:
            return m.copy.word + (m.j,)
        return m.copy.word + (self.gens.inv(m.j),)

    def is_glued(self, m: MarkRef) -> bool:
        if m.family in DRAWN_ONLY:
            return False
        if m.family in (Family.HCHECK, Family.MNEG):
            return m in self.inter
        return True

    def partner(self, m: MarkRef) -> MarkRef:
        p = intra_partner(m)
        if p is not None:
            return p
        if m.family in (Family.HCHECK, Family.MNEG):
            try:
                return self.inter[m]
            except KeyError:
                raise FrontierUngluedError(m, self.missing_copy(m)) from None
        raise InadmissibleMarkError(f"{m} is drawn only and never glued")


def glued_partner(m: MarkRef, registry: GluingRegistry) -> MarkRef:
    return registry.partner(m)
