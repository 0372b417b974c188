"""Admissible graph, type, and flag enumeration by orderly generation.

Graphs are generated level by level: every admissible graph of order m
arises by attaching one vertex (in every possible color pattern) to an
admissible graph of order m-1, because admissibility is hereditary.
Duplicates are removed with canonical keys, so each level is a complete,
deterministic list of isomorphism-class representatives.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .canon import Canonicalizer
from .model import ColoredGraph, RamseyProblem, contains_mono_copy, is_blowup_consistent

DEFAULT_MAX_GRAPHS = int(os.environ.get("FLAGRAM_MAX_GRAPHS", "500000"))


class ResourceLimitError(RuntimeError):
    """Raised when a basis would exceed the configured graph cap."""

    def __init__(self, level: int, at_least: int, cap: int):
        super().__init__(
            f"basis at level {level} exceeds cap: more than {at_least} graphs "
            f"(cap {cap}); raise FLAGRAM_MAX_GRAPHS or lower the flag order"
        )
        self.level = level
        self.at_least = at_least
        self.cap = cap


@dataclass(frozen=True)
class Basis:
    """All admissible isomorphism classes of one order, in key order."""

    level: int
    graphs: tuple[ColoredGraph, ...]
    keys: tuple[bytes, ...]

    def __post_init__(self):
        object.__setattr__(self, "index", {k: i for i, k in enumerate(self.keys)})

    def __len__(self) -> int:
        return len(self.graphs)

    def position(self, key: bytes) -> int:
        return self.index[key]


@dataclass(frozen=True)
class TypeSigma:
    """A fully labeled admissible graph serving as a flag root."""

    graph: ColoredGraph
    index: int = 0

    @property
    def size(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class Flag:
    """An admissible graph with a distinguished labeled root prefix.

    The embedding is the identity on the first v(sigma) vertices, so the
    induced subgraph on the embedding equals the type's graph verbatim.
    """

    graph: ColoredGraph
    sigma: TypeSigma
    index: int = 0

    @property
    def embedding(self) -> tuple[int, ...]:
        return tuple(range(self.sigma.size))


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _new_vertex_ok(g: ColoredGraph, problem: RamseyProblem) -> bool:
    """Admissibility check for a graph whose parent (minus last vertex) passed.

    Blow-up consistency only needs triples through the new vertex; the
    monochromatic-copy check still scans whole patterns since a new copy
    may use the new vertex anywhere.
    """
    w = g.n - 1
    for v in range(w):
        cvw = g.color(v, w)
        for u in range(v):
            a, b = g.color(u, v), g.color(u, w)
            if (a == 0 and b != cvw) or (b == 0 and a != cvw) or (cvw == 0 and a != b):
                return False
    return not any(
        contains_mono_copy(g, problem.forbidden[c - 1], c)
        for c in range(1, problem.k + 1)
    )


def enumerate_graphs(
    problem: RamseyProblem,
    n: int,
    canon: Canonicalizer | None = None,
    max_graphs: int = DEFAULT_MAX_GRAPHS,
    threads: int = 1,
) -> Basis:
    """The complete admissible basis at order n, deduplicated and sorted."""
    if n < 1:
        raise ValueError("order must be at least 1")
    if canon is None:
        canon = Canonicalizer(problem.k, problem.colorblind_classes)
    level: dict[bytes, ColoredGraph] = {
        canon.key(ColoredGraph.single_vertex()): ColoredGraph.single_vertex()
    }
    palette = tuple(range(problem.k + 1))
    for m in range(2, n + 1):
        parents = [level[k] for k in sorted(level)]

        def extensions(parent: ColoredGraph) -> list[tuple[bytes, ColoredGraph]]:
            out = []
            for pattern in itertools.product(palette, repeat=parent.n):
                cand = parent.with_vertex(pattern)
                if _new_vertex_ok(cand, problem):
                    out.append((canon.key(cand), cand))
            return out

        level = {}
        for chunk in _pmap(extensions, parents, threads):
            for key, cand in chunk:
                if key not in level:
                    level[key] = canon.canonical_graph(cand)
                    if len(level) > max_graphs:
                        raise ResourceLimitError(m, len(level), max_graphs)
    keys = tuple(sorted(level))
    return Basis(level=n, graphs=tuple(level[k] for k in keys), keys=keys)


def _induced_subgraph_keys(
    basis: Basis, size: int, canon: Canonicalizer
) -> set[bytes]:
    seen: set[bytes] = set()
    for g in basis.graphs:
        for sub in itertools.combinations(range(g.n), size):
            seen.add(canon.key(g.induced(sub)))
    return seen


def valid_type_sizes(flag_order: int) -> tuple[int, ...]:
    """Type sizes pairing into order-n products: s = n-2, n-4, ..., parity of n."""
    return tuple(s for s in range(flag_order % 2, flag_order - 1, 2))


def enumerate_types(
    problem: RamseyProblem,
    s: int,
    basis: Basis,
    canon: Canonicalizer | None = None,
) -> list[TypeSigma]:
    """Labeled admissible graphs of order s that occur inside the basis.

    Deduplication is label-preserving: vertex labels stay fixed and only
    allowed color permutations identify two colorings.
    """
    n = basis.level
    if s < 0 or s > n - 2 or (s - n) % 2 != 0:
        raise ValueError(f"type size {s} invalid for flag order {n}")
    if canon is None:
        canon = Canonicalizer(problem.k, problem.colorblind_classes)
    if s == 0:
        return [TypeSigma(ColoredGraph(0, ()), index=0)]
    occurring = _induced_subgraph_keys(basis, s, canon)
    palette = tuple(range(problem.k + 1))
    reps: dict[bytes, ColoredGraph] = {}
    for colors in itertools.product(palette, repeat=s * (s - 1) // 2):
        g = ColoredGraph(s, colors)
        if not is_blowup_consistent(g):
            continue
        if any(
            contains_mono_copy(g, problem.forbidden[c - 1], c)
            for c in range(1, problem.k + 1)
        ):
            continue
        if canon.key(g) not in occurring:
            continue
        lkey = canon.labeled_key(g)
        if lkey not in reps or g.colors < reps[lkey].colors:
            reps[lkey] = g
    ordered = [reps[k] for k in sorted(reps)]
    return [TypeSigma(g, index=i) for i, g in enumerate(ordered)]


def enumerate_flags(
    sigma: TypeSigma,
    f: int,
    problem: RamseyProblem,
    canon: Canonicalizer | None = None,
) -> list[Flag]:
    """All order-f flags over sigma, up to embedding-preserving isomorphism.

    Isomorphism fixes the root vertices pointwise and may apply any allowed
    color permutation to the whole flag, so each flag represents one orbit
    of rooted graphs.
    """
    s = sigma.size
    if f < s:
        raise ValueError("flag order below type size")
    if canon is None:
        canon = Canonicalizer(problem.k, problem.colorblind_classes)
    palette = tuple(range(problem.k + 1))
    level: dict[bytes, ColoredGraph] = {canon.rooted_key(sigma.graph, s): sigma.graph}
    for _ in range(f - s):
        nxt: dict[bytes, ColoredGraph] = {}
        for g in level.values():
            for pattern in itertools.product(palette, repeat=g.n):
                cand = g.with_vertex(pattern)
                if not _new_vertex_ok(cand, problem):
                    continue
                key = canon.rooted_key(cand, s)
                if key not in nxt or cand.colors < nxt[key].colors:
                    nxt[key] = cand
        level = nxt
    ordered = [level[k] for k in sorted(level)]
    return [Flag(g, sigma, index=i) for i, g in enumerate(ordered)]
