"""Exact rational flag algebra coefficients.

Everything here works over isomorphism classes that include the allowed
color permutations, so a flag stands for the whole orbit of its rooted
graph.  Product coefficients are computed by outcome counting on a basis
representative H: enumerate ordered injective root maps and splits of the
leftover vertices, classify both sides by rooted orbit key, and divide by
the total outcome count.  The resulting matrix C(H), contracted against a
PSD matrix per type, yields the valid inequalities of the plain method.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, perm

from .canon import Canonicalizer
from .enumeration import (
    Basis,
    Flag,
    TypeSigma,
    enumerate_flags,
    enumerate_graphs,
    enumerate_types,
    valid_type_sizes,
)
from .model import ColoredGraph, RamseyProblem


class TypeMismatchError(ValueError):
    """Raised when two flags with different types are multiplied."""


@dataclass(frozen=True)
class ProductTable:
    """Sparse product coefficients for one type at one flag order.

    entries[(i, j)][g] with i <= j is the probability that a uniformly
    random root map plus split of basis graph g produces flags i and j on
    the two sides, in that order; it is symmetric in (i, j).
    """

    sigma: TypeSigma
    flag_order: int
    dim: int
    entries: dict[tuple[int, int], dict[int, Fraction]]

    def coefficient(self, i: int, j: int, g: int) -> Fraction:
        if i > j:
            i, j = j, i
        return self.entries.get((i, j), {}).get(g, Fraction(0))


class FlagContext:
    """Caches bases, types, flags, and tables for one problem instance."""

    def __init__(self, problem: RamseyProblem, threads: int = 1, max_graphs=None):
        self.problem = problem
        self.threads = threads
        self.max_graphs = max_graphs
        self.canon = Canonicalizer(problem.k, problem.colorblind_classes)
        self._bases: dict[int, Basis] = {}
        self._types: dict[int, list[TypeSigma]] = {}
        self._flags: dict[tuple[int, int], list[Flag]] = {}
        self._tables: dict[tuple[int, int], ProductTable] = {}
        self._labeled_keys: dict[tuple, bytes] = {}

    def basis(self, n: int) -> Basis:
        if n not in self._bases:
            kwargs = {}
            if self.max_graphs is not None:
                kwargs["max_graphs"] = self.max_graphs
            self._bases[n] = enumerate_graphs(
                self.problem, n, canon=self.canon, threads=self.threads, **kwargs
            )
        return self._bases[n]

    def types(self, s: int) -> list[TypeSigma]:
        if s not in self._types:
            self._types[s] = enumerate_types(
                self.problem, s, self.basis(self.problem.flag_order), self.canon
            )
        return self._types[s]

    def flags(self, sigma: TypeSigma, f: int) -> list[Flag]:
        cache_key = (sigma.size, sigma.graph.colors, f)
        if cache_key not in self._flags:
            self._flags[cache_key] = enumerate_flags(sigma, f, self.problem, self.canon)
        return self._flags[cache_key]

    def _labeled_key(self, g: ColoredGraph) -> bytes:
        k = (g.n, g.colors)
        hit = self._labeled_keys.get(k)
        if hit is None:
            hit = self.canon.labeled_key(g)
            self._labeled_keys[k] = hit
        return hit

    def root_matches(self, root: ColoredGraph, sigma: TypeSigma) -> bool:
        """Does an ordered vertex tuple induce a member of sigma's color orbit?"""
        return self._labeled_key(root) == self._labeled_key(sigma.graph)

    def product_table(self, sigma: TypeSigma, n: int | None = None) -> ProductTable:
        n = self.problem.flag_order if n is None else n
        cache_key = (sigma.size, sigma.graph.colors, n)
        if cache_key not in self._tables:
            self._tables[cache_key] = self._build_product_table(sigma, n)
        return self._tables[cache_key]

    def _build_product_table(self, sigma: TypeSigma, n: int) -> ProductTable:
        s = sigma.size
        if (n - s) % 2 != 0:
            raise ValueError(f"type size {s} has wrong parity for order {n}")
        f = (n + s) // 2
        flags = self.flags(sigma, f)
        index = {self.canon.rooted_key(fl.graph, s): fl.index for fl in flags}
        basis = self.basis(n)
        denom = perm(n, s) * comb(n - s, f - s)
        entries: dict[tuple[int, int], dict[int, Fraction]] = {}
        for gpos, g in enumerate(basis.graphs):
            counts: dict[tuple[int, int], int] = {}
            for theta in itertools.permutations(range(n), s):
                if s and not self.root_matches(g.induced(theta), sigma):
                    continue
                rest = [v for v in range(n) if v not in theta]
                for left in itertools.combinations(rest, f - s):
                    right = tuple(v for v in rest if v not in left)
                    ki = self.canon.rooted_key(g.induced(theta + left), s)
                    kj = self.canon.rooted_key(g.induced(theta + right), s)
                    i, j = index[ki], index[kj]
                    if i > j:
                        i, j = j, i
                    counts[(i, j)] = counts.get((i, j), 0) + 1
            for (i, j), cnt in counts.items():
                cell = entries.setdefault((i, j), {})
                # both ordered assignments were counted; store the ordered value
                cell[gpos] = Fraction(cnt, denom) if i == j else Fraction(cnt, 2 * denom)
        return ProductTable(sigma=sigma, flag_order=f, dim=len(flags), entries=entries)

    def density_table(self, m: int, n: int) -> list[list[Fraction]]:
        bm, bn = self.basis(m), self.basis(n)
        table = [[Fraction(0)] * len(bn) for _ in range(len(bm))]
        total = comb(n, m)
        for j, g in enumerate(bn.graphs):
            for sub in itertools.combinations(range(n), m):
                key = self.canon.key(g.induced(sub))
                table[bm.position(key)][j] += Fraction(1, total)
        return table

    def objective_vector(self, n: int | None = None) -> tuple[Fraction, ...]:
        n = self.problem.flag_order if n is None else n
        ell = self.problem.ell
        table = self.density_table(ell, n)
        empty = ColoredGraph(ell, (0,) * (ell * (ell - 1) // 2))
        row = self.basis(ell).position(self.canon.key(empty))
        return tuple(table[row])


def density(
    h: ColoredGraph, hp: ColoredGraph, canon: Canonicalizer
) -> Fraction:
    """Probability a random v(h)-subset of hp induces a graph in h's orbit."""
    if h.n > hp.n:
        return Fraction(0)
    key = canon.key(h)
    hits = sum(
        1
        for sub in itertools.combinations(range(hp.n), h.n)
        if canon.key(hp.induced(sub)) == key
    )
    return Fraction(hits, comb(hp.n, h.n))


def product_expand(
    f1: Flag, f2: Flag, ctx: FlagContext
) -> dict[bytes, tuple[ColoredGraph, Fraction]]:
    """Expansion of a flag product over rooted graphs at the combined order.

    Returns rooted orbit key -> (representative rooted graph, coefficient),
    where the coefficient is the probability that a random split of the
    non-root vertices of the rooted graph induces f1 and f2 in order.
    """
    s1, s2 = f1.sigma.size, f2.sigma.size
    canon = ctx.canon
    if s1 != s2 or canon.labeled_key(f1.sigma.graph) != canon.labeled_key(f2.sigma.graph):
        raise TypeMismatchError("flags must share one type")
    s = s1
    order = f1.graph.n + f2.graph.n - s
    k1 = canon.rooted_key(f1.graph, s)
    k2 = canon.rooted_key(f2.graph, s)
    out: dict[bytes, tuple[ColoredGraph, Fraction]] = {}
    for host in enumerate_flags(f1.sigma, order, ctx.problem, canon):
        g = host.graph
        rest = range(s, order)
        hits = 0
        total = comb(order - s, f1.graph.n - s)
        for left in itertools.combinations(rest, f1.graph.n - s):
            right = tuple(v for v in rest if v not in left)
            root = tuple(range(s))
            if (
                canon.rooted_key(g.induced(root + left), s) == k1
                and canon.rooted_key(g.induced(root + right), s) == k2
            ):
                hits += 1
        if hits:
            out[canon.rooted_key(g, s)] = (g, Fraction(hits, total))
    return out


def average(
    expansion: dict[bytes, tuple[ColoredGraph, Fraction]],
    sigma: TypeSigma,
    ctx: FlagContext,
) -> dict[int, Fraction]:
    """Apply the downward operator to a rooted expansion.

    Each rooted orbit maps to its underlying basis class weighted by the
    probability that a random ordered injective root map into the class
    representative lands in that rooted orbit.
    """
    s = sigma.size
    canon = ctx.canon
    out: dict[int, Fraction] = {}
    for rooted_key, (g, coeff) in expansion.items():
        basis = ctx.basis(g.n)
        pos = basis.position(canon.key(g))
        rep = basis.graphs[pos]
        hits = 0
        for theta in itertools.permutations(range(rep.n), s):
            rest = tuple(v for v in range(rep.n) if v not in theta)
            if canon.rooted_key(rep.induced(theta + rest), s) == rooted_key:
                hits += 1
        q = Fraction(hits, perm(rep.n, s))
        if q:
            out[pos] = out.get(pos, Fraction(0)) + coeff * q
    return {k: v for k, v in out.items() if v}


def all_product_tables(
    ctx: FlagContext, type_sizes: tuple[int, ...] | None = None
) -> list[ProductTable]:
    """Product tables for every type of every requested matching-parity size."""
    n = ctx.problem.flag_order
    sizes = valid_type_sizes(n) if type_sizes is None else tuple(type_sizes)
    tables = []
    for s in sizes:
        for sigma in ctx.types(s):
            tables.append(ctx.product_table(sigma, n))
    return tables
