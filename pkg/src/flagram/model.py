"""Edge-colored blow-up graphs and Ramsey problem definitions.

A blow-up graph on n vertices assigns every unordered vertex pair a color
in {0, 1, ..., k}.  Color 0 marks two vertices of the same blow-up class
(a "non-edge"); colors 1..k are genuine edge colors.  Consistency of the
class structure is a local condition on vertex triples, which keeps all
checks cheap at the small orders this library works with.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction


class ProblemFormatError(ValueError):
    """Raised for malformed or semantically invalid problem files."""


def pair_index(u: int, v: int) -> int:
    """Index of the unordered pair {u, v} in the packed color tuple.

    Pairs are ordered by their larger endpoint, so extending a graph by a
    new vertex appends one contiguous block of entries.
    """
    if u == v:
        raise ValueError("pair requires distinct vertices")
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


@dataclass(frozen=True)
class ColoredGraph:
    """A complete graph whose pairs carry colors in {0..k}; 0 = non-edge."""

    n: int
    colors: tuple[int, ...]

    def __post_init__(self):
        want = self.n * (self.n - 1) // 2
        if len(self.colors) != want:
            raise ValueError(f"expected {want} pair colors, got {len(self.colors)}")

    def color(self, u: int, v: int) -> int:
        return self.colors[pair_index(u, v)]

    def with_vertex(self, new_colors: tuple[int, ...]) -> "ColoredGraph":
        """Extend by one vertex joined to vertex i with color new_colors[i]."""
        if len(new_colors) != self.n:
            raise ValueError("need one color per existing vertex")
        return ColoredGraph(self.n + 1, self.colors + tuple(new_colors))

    def permuted(self, perm: tuple[int, ...]) -> "ColoredGraph":
        """Relabel vertices: vertex i of the result is vertex perm[i] of self."""
        cols = [0] * len(self.colors)
        for v in range(self.n):
            for u in range(v):
                cols[pair_index(u, v)] = self.color(perm[u], perm[v])
        return ColoredGraph(self.n, tuple(cols))

    def induced(self, vertices: tuple[int, ...]) -> "ColoredGraph":
        """Induced subgraph on the given vertices, in the given order."""
        m = len(vertices)
        cols = [0] * (m * (m - 1) // 2)
        for v in range(m):
            for u in range(v):
                cols[pair_index(u, v)] = self.color(vertices[u], vertices[v])
        return ColoredGraph(m, tuple(cols))

    def recolored(self, cmap: tuple[int, ...]) -> "ColoredGraph":
        """Apply a color map (cmap[c] replaces color c; cmap[0] must be 0)."""
        return ColoredGraph(self.n, tuple(cmap[c] for c in self.colors))

    def degree(self, v: int, color: int) -> int:
        return sum(1 for u in range(self.n) if u != v and self.color(u, v) == color)

    def max_color(self) -> int:
        return max(self.colors, default=0)

    @staticmethod
    def single_vertex() -> "ColoredGraph":
        return ColoredGraph(1, ())

    @staticmethod
    def from_pairs(n: int, pairs: dict[tuple[int, int], int]) -> "ColoredGraph":
        """Build from an explicit pair->color map; absent pairs get color 0."""
        cols = [0] * (n * (n - 1) // 2)
        for (u, v), c in pairs.items():
            cols[pair_index(u, v)] = c
        return ColoredGraph(n, tuple(cols))


@dataclass(frozen=True)
class PlainGraph:
    """An uncolored pattern graph given by vertex count and edge set."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u},{v}) for order {self.n}")

    @staticmethod
    def from_edges(edges) -> "PlainGraph":
        es = frozenset(tuple(sorted(e)) for e in edges)
        n = 1 + max((v for e in es for v in e), default=-1)
        return PlainGraph(max(n, 0), es)

    @staticmethod
    def complete(n: int) -> "PlainGraph":
        return PlainGraph(n, frozenset((u, v) for v in range(n) for u in range(v)))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def canonical_edges(self) -> frozenset[tuple[int, int]]:
        """Lexicographically minimal edge set over all vertex relabelings."""
        best = None
        for perm in itertools.permutations(range(self.n)):
            es = frozenset(tuple(sorted((perm[u], perm[v]))) for u, v in self.edges)
            key = tuple(sorted(es))
            if best is None or key < best:
                best = key
        return frozenset(best or ())


@dataclass(frozen=True)
class RamseyProblem:
    """Forbidden-family specification for a multicolor Ramsey bound."""

    k: int
    forbidden: tuple[PlainGraph, ...]
    colorblind_classes: tuple[frozenset[int], ...]
    ell: int
    flag_order: int
    name: str = ""
    source_text: str = field(default="", compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ProblemFormatError("need at least one edge color")
        if len(self.forbidden) != self.k:
            raise ProblemFormatError("need one forbidden graph per color")
        for i, g in enumerate(self.forbidden):
            if not g.edges:
                raise ProblemFormatError(
                    f"forbidden graph for color {i + 1} has no edges"
                )
        cover = sorted(c for cls in self.colorblind_classes for c in cls)
        if cover != list(range(1, self.k + 1)):
            raise ProblemFormatError("color-blind classes must partition 1..k")
        for cls in self.colorblind_classes:
            keys = {self.forbidden[c - 1].canonical_edges() for c in cls}
            sizes = {self.forbidden[c - 1].n for c in cls}
            if len(keys) > 1 or len(sizes) > 1:
                raise ProblemFormatError(
                    "colors in one color-blind class must forbid the same graph"
                )
        if not (2 <= self.ell <= self.flag_order):
            raise ProblemFormatError("need 2 <= ell <= flag_order")

    def class_of(self, color: int) -> frozenset[int]:
        for cls in self.colorblind_classes:
            if color in cls:
                return cls
        raise ValueError(f"unknown color {color}")


def is_blowup_consistent(g: ColoredGraph) -> bool:
    """Check the triple conditions that make color 0 a valid class relation.

    For every triple, if some pair has color 0 the other two pairs must
    carry equal colors.  This simultaneously rules out triples with exactly
    one edge and triples with two differently colored edges, and it forces
    transitivity of the color-0 relation.
    """
    for w in range(g.n):
        for v in range(w):
            cvw = g.color(v, w)
            for u in range(v):
                a, b = g.color(u, v), g.color(u, w)
                if (a == 0 and b != cvw) or (b == 0 and a != cvw) or (cvw == 0 and a != b):
                    return False
    return True


def contains_mono_copy(g: ColoredGraph, pattern: PlainGraph, color: int) -> bool:
    """Is there an injection of `pattern` with every edge mapped to `color`?

    Non-edges of the pattern are unconstrained.  Backtracking over pattern
    vertices in decreasing-degree order, pruning candidates by color degree.
    """
    if pattern.n > g.n:
        return False
    pdeg = pattern.degrees()
    order = sorted(range(pattern.n), key=lambda v: -pdeg[v])
    gdeg = [g.degree(v, color) for v in range(g.n)]
    adj: list[list[int]] = [[] for _ in range(pattern.n)]
    for idx, pv in enumerate(order):
        for jdx in range(idx):
            pu = order[jdx]
            if tuple(sorted((pu, pv))) in pattern.edges:
                adj[idx].append(jdx)

    assigned: list[int] = []
    used = [False] * g.n

    def extend(idx: int) -> bool:
        if idx == len(order):
            return True
        need = pdeg[order[idx]]
        for cand in range(g.n):
            if used[cand] or gdeg[cand] < need:
                continue
            if all(g.color(cand, assigned[j]) == color for j in adj[idx]):
                used[cand] = True
                assigned.append(cand)
                if extend(idx + 1):
                    return True
                assigned.pop()
                used[cand] = False
        return False

    return extend(0)


def is_admissible(g: ColoredGraph, problem: RamseyProblem) -> bool:
    """Blow-up consistent and free of every forbidden monochromatic copy."""
    if not is_blowup_consistent(g):
        return False
    return not any(
        contains_mono_copy(g, problem.forbidden[c - 1], c)
        for c in range(1, problem.k + 1)
    )


def quotient_density_bound(g: ColoredGraph, ell: int) -> Fraction:
    """Independent ell-set density of the balanced blow-up of a quotient.

    `g` must be a genuine quotient coloring (no color-0 pairs).  The value
    (1/m)^(ell-1) upper-bounds any certified delta for the same problem.
    """
    if ell < 2:
        raise ValueError("ell must be at least 2")
    if any(c == 0 for c in g.colors):
        raise ValueError("quotient coloring may not contain non-edges")
    return Fraction(1, g.n ** (ell - 1))


_FORBID_RE = re.compile(r"forbid\s+(\d+)\s*:\s*(.*)$")


def _parse_edge_list(text: str) -> PlainGraph:
    edges = []
    for item in text.replace(",", " ").split():
        m = re.fullmatch(r"(\d+)-(\d+)", item)
        if not m:
            raise ProblemFormatError(f"bad edge token {item!r}")
        u, v = int(m.group(1)), int(m.group(2))
        if u == v or u < 1 or v < 1:
            raise ProblemFormatError(f"bad edge {item!r}")
        edges.append((u - 1, v - 1))
    if not edges:
        raise ProblemFormatError("empty edge list")
    return PlainGraph.from_edges(edges)


def parse_problem(text: str, name: str = "") -> RamseyProblem:
    """Parse the line-oriented problem format.

    Recognized lines (whitespace-insensitive, '#' starts a comment):
      colors k
      colorblind c1,c2,...      (one line per class; singletons may be omitted)
      forbid i: u-v,u-w,...     (1-indexed vertices; order = max index named)
      flag_order n
      ell l
    """
    k = None
    classes: list[frozenset[int]] = []
    forbid: dict[int, PlainGraph] = {}
    flag_order = None
    ell = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        low = re.sub(r"\s+", " ", line)
        if low.startswith("colors"):
            k = int(low.split()[1])
        elif low.startswith("colorblind"):
            members = frozenset(
                int(tok) for tok in low[len("colorblind"):].replace(",", " ").split()
            )
            if not members:
                raise ProblemFormatError("empty colorblind class")
            classes.append(members)
        elif low.startswith("forbid"):
            m = _FORBID_RE.match(low)
            if not m:
                raise ProblemFormatError(f"bad forbid line: {line!r}")
            forbid[int(m.group(1))] = _parse_edge_list(m.group(2))
        elif low.startswith("flag_order"):
            flag_order = int(low.split()[1])
        elif low.startswith("ell"):
            ell = int(low.split()[1])
        else:
            raise ProblemFormatError(f"unrecognized line: {line!r}")
    if k is None or flag_order is None or ell is None:
        raise ProblemFormatError("missing one of: colors, flag_order, ell")
    missing = [i for i in range(1, k + 1) if i not in forbid]
    if missing:
        raise ProblemFormatError(f"missing forbid lines for colors {missing}")
    covered = {c for cls in classes for c in cls}
    for c in range(1, k + 1):
        if c not in covered:
            classes.append(frozenset([c]))
    classes.sort(key=min)
    return RamseyProblem(
        k=k,
        forbidden=tuple(forbid[i] for i in range(1, k + 1)),
        colorblind_classes=tuple(classes),
        ell=ell,
        flag_order=flag_order,
        name=name,
        source_text=text,
    )


def parse_quotient_coloring(text: str, k: int) -> ColoredGraph:
    """Parse an explicit quotient coloring: `vertices m` then `edge u v c` lines."""
    m = None
    pairs: dict[tuple[int, int], int] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "vertices":
            m = int(toks[1])
        elif toks[0] == "edge":
            u, v, c = int(toks[1]) - 1, int(toks[2]) - 1, int(toks[3])
            if not (1 <= c <= k):
                raise ProblemFormatError(f"edge color {c} out of range 1..{k}")
            pairs[tuple(sorted((u, v)))] = c
        else:
            raise ProblemFormatError(f"unrecognized line: {line!r}")
    if m is None:
        raise ProblemFormatError("missing 'vertices m' line")
    for v in range(m):
        for u in range(v):
            if (u, v) not in pairs:
                raise ProblemFormatError(f"pair {u + 1}-{v + 1} has no color")
    return ColoredGraph.from_pairs(m, pairs)
