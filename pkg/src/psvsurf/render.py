"""SVG drawings of single sheets and DOT graphs of the copy gluings."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import InputError
from .marks import DRAWN_ONLY, Kind, SheetId, marks_in_box

COLORS = {
    "M": "#1f77b4", "Mtilde": "#1f77b4", "Mj": "#2ca02c", "McheckJ": "#2ca02c",
    "L": "#9467bd", "Lprime": "#9467bd", "HjCheck": "#d62728", "Mneg": "#d62728",
    "T1": "#7f7f7f", "T2": "#7f7f7f", "Ttilde1": "#ff7f0e", "Ttilde2": "#ff7f0e",
}


def default_viewport(surface, sheet: SheetId):
    J, pl = surface.J, surface.placement
    if sheet.kind is Kind.BASE:
        return (-2, 16, -(J * pl.gap + pl.reach + 1), J + 1)
    if sheet.kind is Kind.COVER:
        return (-4, 16, -3, 3)
    if sheet.kind is Kind.BUFFER1:
        return (-1, 16, -2, 2)
    return (-1, 3, -1, 12)


def parse_sheet(surface, name: str, copy) -> SheetId:
    """'base', 'cover', 'buffer1:j' or 'buffer2:j' on the given copy."""
    kind, _, j = name.partition(":")
    try:
        k = Kind(kind)
    except ValueError:
        raise InputError(f"unknown sheet {name!r}") from None
    if k in (Kind.BUFFER1, Kind.BUFFER2):
        if not j.isdigit() or not 1 <= int(j) <= surface.J:
            raise InputError(f"sheet {name!r} needs a generator number 1..{surface.J}")
        return SheetId(copy, k, int(j))
    if j:
        raise InputError(f"unknown sheet {name!r}")
    return SheetId(copy, k)


def render_sheet_svg(surface, sheet: SheetId, viewport=None, scale: float = 40.0, fold: int = 0) -> str:
    xmin, xmax, ymin, ymax = viewport or default_viewport(surface, sheet)
    w, h = (xmax - xmin) * scale, (ymax - ymin) * scale
    X = lambda x: (float(x) - xmin) * scale
    Y = lambda y: (ymax - float(y)) * scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" '
        f'viewBox="0 0 {w:.1f} {h:.1f}">',
        f"<title>{escape(sheet.copy.label())} {escape(sheet.name())}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if xmin <= 0 <= xmax:
        out.append(f'<line x1="{X(0):.1f}" y1="0" x2="{X(0):.1f}" y2="{h:.1f}" stroke="#bbb" stroke-width="1"/>')
    if ymin <= 0 <= ymax:
        out.append(f'<line x1="0" y1="{Y(0):.1f}" x2="{w:.1f}" y2="{Y(0):.1f}" stroke="#bbb" stroke-width="1"/>')
    if xmin <= 0 <= xmax and ymin <= 0 <= ymax:
        origin = "0~" if sheet.kind is Kind.COVER else "0"
        out.append(f'<circle cx="{X(0):.1f}" cy="{Y(0):.1f}" r="3" fill="black"/>')
        out.append(f'<text x="{X(0) + 4:.1f}" y="{Y(0) + 14:.1f}" font-size="12">{origin}</text>')
    for m in marks_in_box(sheet, (xmin, xmax, ymin, ymax), surface.J, surface.placement, fold, drawn=True):
        p, q = surface.endpoints(m)
        color = COLORS[m.family.value]
        dash = ' stroke-dasharray="4,3"' if m.family in DRAWN_ONLY else ""
        out.append(
            f'<line x1="{X(p[0]):.1f}" y1="{Y(p[1]):.1f}" x2="{X(q[0]):.1f}" y2="{Y(q[1]):.1f}" '
            f'stroke="{color}" stroke-width="4"{dash}><title>{escape(str(m))}</title></line>'
        )
        mx, my = (X(p[0]) + X(q[0])) / 2, (Y(p[1]) + Y(q[1])) / 2
        out.append(f'<text x="{mx:.1f}" y="{my - 6:.1f}" font-size="10" text-anchor="middle" '
                   f'fill="{color}">{escape(m.label())}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_graph_dot(surface, name: str = "copies") -> str:
    """Copies as nodes, one edge g -> g h_j per inter-copy gluing, labelled j."""
    lines = [f"digraph {name} {{"]
    for g in surface.copies():
        lines.append(f'  "{g.label()}";')
    pairs = sorted(surface.registry.inter_pairs(), key=lambda p: (len(p[0].copy.word), p[0].copy.word, p[0].j))
    for a, b in pairs:
        lines.append(f'  "{a.copy.label()}" -> "{b.copy.label()}" [label="{a.j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(surface, target: str, copy=None, viewport=None) -> str:
    if target == "graph":
        return render_graph_dot(surface)
    copy = copy or surface.identity()
    return render_sheet_svg(surface, parse_sheet(surface, target, copy), viewport)
