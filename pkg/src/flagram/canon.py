"""Canonical forms for colored graphs under vertex and color permutations.

The canonical form of a graph is the lexicographically smallest packed
color tuple reachable by relabeling vertices and applying any allowed
color permutation (one that permutes colors within each color-blind class
and fixes color 0).  Rooted variants pin a prefix of the vertices, which
is what flag deduplication needs.

The search is a branch-and-bound over vertex placements: placing a vertex
appends one column of colors to the serialization, so branches compare
against the incumbent column by column.  Iterated neighborhood-color
refinement supplies the candidate ordering.
"""

from __future__ import annotations

import itertools

from .model import ColoredGraph


def color_permutations(
    k: int, classes: tuple[frozenset[int], ...]
) -> tuple[tuple[int, ...], ...]:
    """All color maps fixing 0 and permuting each color-blind class."""
    groups = [sorted(cls) for cls in classes]
    maps = []
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        cmap = list(range(k + 1))
        for orig, perm in zip(groups, perms):
            for a, b in zip(orig, perm):
                cmap[a] = b
        maps.append(tuple(cmap))
    return tuple(sorted(maps))


def _refine(g: ColoredGraph, fixed: int) -> list[tuple]:
    """Iterated color refinement; returns a per-vertex invariant tuple."""
    inv: list[tuple] = [
        (0, v) if v < fixed else (1,) for v in range(g.n)
    ]
    for _ in range(g.n):
        nxt = [
            (inv[v], tuple(sorted((g.color(u, v), inv[u]) for u in range(g.n) if u != v)))
            for v in range(g.n)
        ]
        ranks = {t: i for i, t in enumerate(sorted(set(nxt)))}
        new = [(ranks[t],) if v >= fixed else (0, v) for v, t in enumerate(nxt)]
        if new == inv:
            break
        inv = new
    return inv


def _min_vertex_serialization(
    g: ColoredGraph, prefix: int, best: tuple[int, ...] | None
) -> tuple[int, ...] | None:
    """Lex-min packed color tuple over vertex orders fixing the first `prefix`.

    Returns a tuple strictly smaller than `best`, or None if no order beats
    it.  With best=None, returns the minimum outright.
    """
    n = g.n
    inv = _refine(g, prefix)
    placed = list(range(prefix))
    partial: list[int] = []
    for v in range(prefix):
        for u in range(v):
            partial.append(g.color(u, v))
    result = best
    found = [False]

    def dfs(remaining: list[int]):
        nonlocal result
        pos = len(placed)
        if pos == n:
            t = tuple(partial)
            if result is None or t < result:
                result = t
                found[0] = True
            return
        cols = []
        for x in remaining:
            col = tuple(g.color(x, placed[i]) for i in range(pos))
            cols.append((col, inv[x], x))
        cols.sort()
        base = len(partial)
        for col, _, x in cols:
            if result is not None and tuple(partial) + col > result[: base + pos]:
                continue
            placed.append(x)
            partial.extend(col)
            dfs([y for y in remaining if y != x])
            del partial[base:]
            placed.pop()

    dfs([v for v in range(n) if v >= prefix])
    return result if found[0] else None


class Canonicalizer:
    """Caches canonical keys for one problem's color-blind structure."""

    def __init__(self, k: int, classes: tuple[frozenset[int], ...]):
        self.k = k
        self.classes = classes
        self.cmaps = color_permutations(k, classes)
        self._key_cache: dict[tuple, bytes] = {}

    def _minimize(self, g: ColoredGraph, prefix: int) -> tuple[int, ...]:
        best: tuple[int, ...] | None = None
        for cmap in self.cmaps:
            gc = g.recolored(cmap) if cmap != tuple(range(self.k + 1)) else g
            cand = _min_vertex_serialization(gc, prefix, best)
            if cand is not None:
                best = cand
        assert best is not None
        return best

    def canonical_colors(self, g: ColoredGraph, prefix: int = 0) -> tuple[int, ...]:
        cache_key = (g.n, g.colors, prefix)
        hit = self._key_cache.get(cache_key)
        if hit is not None:
            return tuple(hit)
        best = self._minimize(g, prefix)
        self._key_cache[cache_key] = bytes(best)
        return best

    def key(self, g: ColoredGraph) -> bytes:
        """Canonical key under all vertex relabelings and allowed color maps."""
        return bytes([g.n]) + bytes(self.canonical_colors(g, 0))

    def rooted_key(self, g: ColoredGraph, root_size: int) -> bytes:
        """Canonical key with the first `root_size` vertices held pointwise.

        Color maps still act on the whole graph (root included), so two
        rooted graphs get equal keys exactly when some allowed color
        permutation plus a root-fixing relabeling carries one to the other.
        """
        return bytes([g.n, root_size]) + bytes(self.canonical_colors(g, root_size))

    def labeled_key(self, g: ColoredGraph) -> bytes:
        """Canonical key with every vertex fixed; only colors may permute."""
        best = min(g.recolored(cmap).colors for cmap in self.cmaps)
        return bytes([g.n, 255]) + bytes(best)

    def canonical_graph(self, g: ColoredGraph) -> ColoredGraph:
        return ColoredGraph(g.n, self.canonical_colors(g, 0))
