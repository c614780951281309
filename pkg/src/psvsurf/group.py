"""Exact 2x2 matrix groups, Cayley balls and truncated ends of groups."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .errors import (
    BallTruncationError,
    ContractingElementError,
    IdentityGeneratorError,
    InvalidCutError,
    OrientationError,
    SingularMatrixError,
)

Word = tuple  # tuple[int, ...] of generator numbers, 1-based


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix with rational entries."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    @classmethod
    def of(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def diag(cls, x, y) -> "Mat2":
        return cls(Fraction(x), Fraction(0), Fraction(0), Fraction(y))

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __mul__(self, k) -> "Mat2":
        k = Fraction(k)
        return Mat2(self.a * k, self.b * k, self.c * k, self.d * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Mat2":
        return self * -1

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def inverse(self) -> "Mat2":
        det = self.det
        if det == 0:
            raise SingularMatrixError(f"singular matrix {self}")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def apply(self, v) -> tuple[Fraction, Fraction]:
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def to_float(self) -> tuple[float, float, float, float]:
        return (float(self.a), float(self.b), float(self.c), float(self.d))

    def is_identity(self) -> bool:
        return self == Mat2.identity()

    def __str__(self):
        return "[[%s, %s], [%s, %s]]" % (self.a, self.b, self.c, self.d)


ROT90 = Mat2.of([[0, -1], [1, 0]])


def is_contracting(A: Mat2) -> bool:
    """True iff ||Av|| < ||v|| for every nonzero v.

    Both eigenvalues of M = A^T A must lie strictly below 1, which for a
    positive definite M is tr(M) < 2 and (1 - l1)(1 - l2) > 0.
    """
    if A.det == 0:
        raise SingularMatrixError(f"singular matrix {A}")
    M = A.transpose() @ A
    tr = M.trace
    return tr < 2 and 1 - tr + M.det > 0


@dataclass(frozen=True)
class GroupElement:
    matrix: Mat2
    word: Word = ()

    @property
    def word_length(self) -> int:
        return len(self.word)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def label(self) -> str:
        return word_label(self.word)


def word_label(word: Sequence[int]) -> str:
    if not word:
        return "e"
    return ".".join(f"h{j}" for j in word)


@dataclass(frozen=True)
class GenSet:
    """Inverse-closed ordered generating set.

    Generators are numbered 1..J. ``inverse_index[j - 1]`` is the number of
    h_j^-1 (or -1 when absent, which only unvalidated sets allow).
    """

    generators: tuple
    inverse_index: tuple

    @property
    def J(self) -> int:
        return len(self.generators)

    def __len__(self):
        return len(self.generators)

    def h(self, j: int) -> Mat2:
        return self.generators[j - 1]

    def inv(self, j: int) -> int:
        return self.inverse_index[j - 1]

    def numbers(self) -> range:
        return range(1, len(self.generators) + 1)

    @classmethod
    def raw(cls, generators: Iterable[Mat2]) -> "GenSet":
        """Build without validation (inverses are still looked up when present)."""
        gens = tuple(generators)
        inv = []
        for g in gens:
            gi = g.inverse()
            inv.append(gens.index(gi) + 1 if gi in gens else -1)
        return cls(gens, tuple(inv))


def validate_generating_set(raw: Sequence[Mat2]) -> GenSet:
    if not raw:
        raise ValueError("empty generating set")
    gens: list[Mat2] = []
    for idx, g in enumerate(raw):
        if g.det <= 0:
            raise OrientationError(idx, g.det)
        if g.is_identity():
            raise IdentityGeneratorError(f"generator {idx} is the identity")
        if is_contracting(g):
            raise ContractingElementError(idx, g)
        if is_contracting(g.inverse()):
            # the inverse is also a group element
            raise ContractingElementError(idx, g.inverse())
        if g not in gens:
            gens.append(g)
    for g in list(gens):
        gi = g.inverse()
        if gi not in gens:
            gens.append(gi)
    return GenSet.raw(gens)


@dataclass
class CayleyBall:
    """Word-length ball of Cay(G, H).

    ``edges`` holds (g, j) for every ball vertex g and generator number j
    with g h_j also in the ball.
    """

    gens: GenSet
    radius: int
    vertices: dict = field(default_factory=dict)  # Mat2 -> GroupElement
    edges: set = field(default_factory=set)  # (Mat2, j)

    @property
    def frontier(self) -> list[GroupElement]:
        return [v for v in self.ordered() if v.word_length == self.radius]

    def ordered(self) -> list[GroupElement]:
        return sorted(self.vertices.values(), key=lambda v: (len(v.word), v.word))

    def __contains__(self, m) -> bool:
        if isinstance(m, GroupElement):
            m = m.matrix
        return m in self.vertices

    def __len__(self):
        return len(self.vertices)

    def element(self, m: Mat2) -> GroupElement:
        return self.vertices[m]

    def identity(self) -> GroupElement:
        return self.vertices[Mat2.identity()]

    def length(self, m: Mat2) -> int:
        return self.vertices[m].word_length

    def stabilized(self) -> bool:
        """No vertex at word length R: the ball is the whole group."""
        return not any(v.word_length == self.radius for v in self.vertices.values())

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for m, j in self.edges:
            g.add_edge(m, m @ self.gens.h(j))
        return g

    def by_word(self, word: Sequence[int]) -> GroupElement:
        m = Mat2.identity()
        for j in word:
            m = m @ self.gens.h(j)
        return self.vertices[m]


def enumerate_ball(H: GenSet, R: int, max_vertices: int = 200_000) -> CayleyBall:
    if R < 0:
        raise ValueError("radius must be >= 0")
    ball = CayleyBall(H, R)
    ident = Mat2.identity()
    ball.vertices[ident] = GroupElement(ident, ())
    queue = deque([ident])
    while queue:
        m = queue.popleft()
        w = ball.vertices[m].word
        if len(w) == R:
            continue
        for j in H.numbers():
            p = m @ H.h(j)
            if p not in ball.vertices:
                ball.vertices[p] = GroupElement(p, w + (j,))
                if len(ball.vertices) > max_vertices:
                    _record_edges(ball)
                    raise BallTruncationError(
                        f"ball of radius {R} exceeds {max_vertices} vertices", ball
                    )
                queue.append(p)
    _record_edges(ball)
    return ball


def _record_edges(ball: CayleyBall) -> None:
    for m in ball.vertices:
        for j in ball.gens.numbers():
            if m @ ball.gens.h(j) in ball.vertices:
                ball.edges.add((m, j))


@dataclass
class ContractingReport:
    radius: int
    checked: int
    offending: list  # words

    @property
    def passed(self) -> bool:
        return not self.offending

    def to_dict(self):
        return {
            "check": "no_contracting",
            "radius": self.radius,
            "checked": self.checked,
            "offending": [list(w) for w in self.offending],
            "passed": self.passed,
        }


def assert_no_contracting(ball: CayleyBall) -> ContractingReport:
    """Radius-R certificate only: elements beyond the ball are not examined."""
    bad = [v.word for v in ball.ordered() if is_contracting(v.matrix)]
    return ContractingReport(ball.radius, len(ball.vertices), bad)


CLASSIFICATIONS = ("zero", "one", "two", "many", "undetermined")


@dataclass
class EndsEstimate:
    cut_radius: int
    component_count: int
    classification: str
    profile: tuple = ()  # counts for r = 1..r_max


def frontier_components(graph: nx.Graph, length: dict, cut: int, R: int) -> list[set]:
    """Components of the subgraph on {|g| >= cut} that reach word length R."""
    keep = [m for m in graph if length[m] >= cut]
    sub = graph.subgraph(keep)
    return [c for c in nx.connected_components(sub) if any(length[m] == R for m in c)]


def _component_count(ball: CayleyBall, graph: nx.Graph, r: int) -> int:
    length = {m: v.word_length for m, v in ball.vertices.items()}
    return len(frontier_components(graph, length, r, ball.radius))


def classify(profile: Sequence[int], stabilized: bool, window: int = 3) -> str:
    if stabilized:
        return "zero"
    if len(profile) < window:
        return "undetermined"
    tail = list(profile[-window:])
    if all(c == tail[0] for c in tail):
        return {1: "one", 2: "two"}.get(tail[0], "undetermined")
    if all(x < y for x, y in zip(tail, tail[1:])):
        return "many"
    return "undetermined"


def ends_profile(ball: CayleyBall, r_max: int | None = None) -> list[int]:
    r_max = ball.radius - 1 if r_max is None else r_max
    graph = ball.graph()
    return [_component_count(ball, graph, r) for r in range(1, r_max + 1)]


def ends_estimate(
    ball: CayleyBall, r: int, r_max: int | None = None, window: int = 3
) -> EndsEstimate:
    """Count the frontier-reaching components left after deleting the open
    ball {|g| < r}, and classify the end count from the profile over
    r = 1..r_max."""
    if not 0 <= r < ball.radius:
        raise InvalidCutError(f"cut radius {r} must satisfy 0 <= r < {ball.radius}")
    graph = ball.graph()
    count = _component_count(ball, graph, r)
    profile = ends_profile(ball, r_max)
    return EndsEstimate(r, count, classify(profile, ball.stabilized(), window), tuple(profile))


def diameter(ball: CayleyBall) -> int | None:
    """Group diameter when the ball has stabilized, else None."""
    if not ball.stabilized():
        return None
    return max(v.word_length for v in ball.vertices.values())
