"""JSON and DOT serialization.

Rationals are written as "p/q" strings. Documents are dumped with sorted
keys and a fixed indent so equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .builder import AssembledSurface, assemble, build_decorated
from .errors import InputError, MalformedBallError
from .group import CayleyBall, GenSet, Mat2, enumerate_ball, validate_generating_set, word_label
from .marks import Family, Kind, MarkRef, SheetId
from .registry import GluingRegistry


def parse_rational(v) -> Fraction:
    if isinstance(v, bool):
        raise InputError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational: {v!r}") from None
    raise InputError(f"rationals must be strings or integers, got {v!r}")


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def matrix_from_json(rows) -> Mat2:
    try:
        (a, b), (c, d) = rows
    except (TypeError, ValueError):
        raise InputError(f"expected a 2x2 matrix, got {rows!r}") from None
    return Mat2(*(parse_rational(x) for x in (a, b, c, d)))


def matrix_to_json(m: Mat2):
    return [[format_rational(m.a), format_rational(m.b)], [format_rational(m.c), format_rational(m.d)]]


def parse_matrix_arg(text: str) -> Mat2:
    """'a,b;c,d' with rational entries."""
    try:
        rows = [r.split(",") for r in text.split(";")]
    except AttributeError:
        raise InputError(f"bad matrix {text!r}") from None
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise InputError(f"matrix must look like 'a,b;c,d', got {text!r}")
    return matrix_from_json(rows)


def group_from_json(doc) -> list[Mat2]:
    if not isinstance(doc, dict) or "generators" not in doc:
        raise InputError('group document needs a "generators" list')
    gens = doc["generators"]
    if not isinstance(gens, list) or not gens:
        raise InputError("generators must be a nonempty list")
    return [matrix_from_json(g) for g in gens]


def load_group(path) -> GenSet:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such group file: {path}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"group file is not JSON: {e}") from None
    return validate_generating_set(group_from_json(doc))


def group_to_json(H: GenSet):
    return {"generators": [matrix_to_json(g) for g in H.generators]}


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


# ------------------------------------------------------------------ balls

def ball_to_json(ball: CayleyBall):
    verts = ball.ordered()
    edges = []
    for m, j in ball.edges:
        edges.append({"from": list(ball.vertices[m].word),
                      "to": list(ball.vertices[m @ ball.gens.h(j)].word), "generator": j})
    edges.sort(key=lambda e: (len(e["from"]), e["from"], e["generator"]))
    return {
        "group": group_to_json(ball.gens),
        "radius": ball.radius,
        "vertices": [{"word": list(v.word), "matrix": matrix_to_json(v.matrix)} for v in verts],
        "edges": edges,
    }


def ball_to_dot(ball: CayleyBall, name: str = "cayley") -> str:
    lines = [f"digraph {name} {{"]
    for v in ball.ordered():
        lines.append(f'  "{v.label()}";')
    for m, j in sorted(ball.edges, key=lambda e: (len(ball.vertices[e[0]].word), ball.vertices[e[0]].word, e[1])):
        a = ball.vertices[m].label()
        b = ball.vertices[m @ ball.gens.h(j)].label()
        lines.append(f'  "{a}" -> "{b}" [label="{j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- manifest

def markref_to_json(m: MarkRef):
    return {"copy": list(m.copy.word), "sheet": m.sheet.kind.value, "sheet_j": m.sheet.j,
            "family": m.family.value, "index": m.index, "j": m.j}


def markref_from_json(doc, ball: CayleyBall) -> MarkRef:
    try:
        copy = ball.by_word(tuple(doc["copy"]))
        sheet = SheetId(copy, Kind(doc["sheet"]), int(doc.get("sheet_j", 0)))
        return MarkRef(sheet, Family(doc["family"]), int(doc.get("index", 1)), int(doc.get("j", 0)))
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"bad mark reference {doc!r}: {e}") from None


def _mark_key(d):
    return (len(d["copy"]), d["copy"], d["sheet"], d["sheet_j"], d["family"], d["index"], d["j"])


def manifest(surface: AssembledSurface):
    gl = []
    for a, b in surface.registry.inter_pairs():
        gl.append({"from": markref_to_json(a), "to": markref_to_json(b)})
    gl.sort(key=lambda e: (_mark_key(e["from"]), _mark_key(e["to"])))
    fr = sorted((markref_to_json(m) for m in surface.frontier_unglued), key=_mark_key)
    return {
        "group": group_to_json(surface.gens),
        "radius": surface.ball.radius,
        "copies": [list(g.word) for g in surface.copies()],
        "gluings": gl,
        "frontier_unglued": fr,
    }


def load_manifest(doc) -> AssembledSurface:
    """Rebuild a surface from a manifest, trusting its gluing list."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        H = validate_generating_set(group_from_json(doc["group"]))
        R = int(doc["radius"])
        words = [tuple(w) for w in doc["copies"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad manifest: {e}") from None
    ball = enumerate_ball(H, R)
    if sorted(words, key=lambda w: (len(w), w)) != [g.word for g in ball.ordered()]:
        raise MalformedBallError("manifest copies do not match the Cayley ball")
    registry = GluingRegistry(H)
    for e in doc.get("gluings", []):
        registry.add_inter(markref_from_json(e["from"], ball), markref_from_json(e["to"], ball))
    frontier = [markref_from_json(m, ball) for m in doc.get("frontier_unglued", [])]
    return AssembledSurface(ball, build_decorated(H), registry, frontier)


def build_surface(H: GenSet, R: int) -> AssembledSurface:
    return assemble(enumerate_ball(H, R), H)


def path_to_json(path):
    return path.to_dict()


def copy_label(word) -> str:
    return word_label(word)
