import itertools

import pytest

from flagram.canon import Canonicalizer
from flagram.enumeration import (
    ResourceLimitError,
    enumerate_flags,
    enumerate_graphs,
    enumerate_types,
    valid_type_sizes,
)
from flagram.model import ColoredGraph, is_admissible, parse_problem


def brute_force_keys(problem, n):
    """All admissible isomorphism classes by filtering every labeled coloring."""
    canon = Canonicalizer(problem.k, problem.colorblind_classes)
    keys = set()
    for colors in itertools.product(
        range(problem.k + 1), repeat=n * (n - 1) // 2
    ):
        g = ColoredGraph(n, colors)
        if is_admissible(g, problem):
            keys.add(canon.key(g))
    return keys


def test_r33_golden_counts(ctx33):
    assert [len(ctx33.basis(n)) for n in (1, 2, 3, 4)] == [1, 2, 3, 7]


def test_orderly_generation_matches_brute_force(r33, r34):
    for problem in (r33, r34):
        ctx_canon = Canonicalizer(problem.k, problem.colorblind_classes)
        for n in (2, 3, 4):
            basis = enumerate_graphs(problem, n, canon=ctx_canon)
            assert set(basis.keys) == brute_force_keys(problem, n)


def test_basis_sorted_and_indexed(ctx33):
    basis = ctx33.basis(4)
    assert list(basis.keys) == sorted(basis.keys)
    for i, key in enumerate(basis.keys):
        assert basis.position(key) == i


def test_level_down_closure(ctx34):
    # every induced subgraph of a level-n representative is in level n-1
    canon = ctx34.canon
    for n in (3, 4, 5):
        lower = set(ctx34.basis(n - 1).keys)
        for g in ctx34.basis(n).graphs:
            for sub in itertools.combinations(range(n), n - 1):
                assert canon.key(g.induced(sub)) in lower


def test_thread_invariance(r33):
    a = enumerate_graphs(r33, 4, threads=1)
    b = enumerate_graphs(r33, 4, threads=3)
    assert a.keys == b.keys


def test_resource_cap(r34):
    with pytest.raises(ResourceLimitError):
        enumerate_graphs(r34, 5, max_graphs=10)


def test_valid_type_sizes():
    assert valid_type_sizes(4) == (0, 2)
    assert valid_type_sizes(5) == (1, 3)
    assert valid_type_sizes(7) == (1, 3, 5)


def test_types_r33(r33, ctx33):
    types = enumerate_types(r33, 2, ctx33.basis(4), ctx33.canon)
    assert len(types) == 2
    assert [t.graph.colors for t in types] == [(0,), (1,)]
    empty = enumerate_types(r33, 0, ctx33.basis(4), ctx33.canon)
    assert len(empty) == 1 and empty[0].graph.n == 0


def test_types_non_colorblind_pair():
    # same forbidden family without color blindness: three labeled pair types
    text = (
        "colors 2\n"
        "forbid 1: 1-2,2-3,1-3\nforbid 2: 1-2,2-3,1-3\n"
        "flag_order 4\nell 2\n"
    )
    p = parse_problem(text)
    canon = Canonicalizer(p.k, p.colorblind_classes)
    basis = enumerate_graphs(p, 4, canon=canon)
    types = enumerate_types(p, 2, basis, canon)
    assert [t.graph.colors for t in types] == [(0,), (1,), (2,)]


def test_types_parity_validation(r33, ctx33):
    with pytest.raises(ValueError):
        enumerate_types(r33, 1, ctx33.basis(4), ctx33.canon)
    with pytest.raises(ValueError):
        enumerate_types(r33, 3, ctx33.basis(4), ctx33.canon)


def test_types_require_occurrence():
    # with only a K2 forbidden in each color, edges never occur at all, so
    # the edge type must be filtered out
    text = "colors 1\nforbid 1: 1-2\nflag_order 4\nell 2\n"
    p = parse_problem(text)
    canon = Canonicalizer(p.k, p.colorblind_classes)
    basis = enumerate_graphs(p, 4, canon=canon)
    assert len(basis) == 1  # only the empty graph survives
    types = enumerate_types(p, 2, basis, canon)
    assert [t.graph.colors for t in types] == [(0,)]


def test_flags_r33(r33, ctx33):
    sig0, sig1 = ctx33.types(2)
    fl0 = enumerate_flags(sig0, 3, r33, ctx33.canon)
    fl1 = enumerate_flags(sig1, 3, r33, ctx33.canon)
    assert len(fl0) == 2
    # the complete family over the edge type has five members; the four used
    # in the worked example are the subset without (1,2,2)
    assert len(fl1) == 5
    assert {f.graph.colors for f in fl1} == {
        (1, 0, 1), (1, 1, 0), (1, 1, 2), (1, 2, 1), (1, 2, 2)
    }
    for f in fl0 + fl1:
        assert f.graph.induced(f.embedding).colors == f.sigma.graph.colors
        assert is_admissible(f.graph, r33)


def test_flag_at_type_order_is_type_itself(r33, ctx33):
    for sigma in ctx33.types(2):
        flags = enumerate_flags(sigma, 2, r33, ctx33.canon)
        assert len(flags) == 1
        assert flags[0].graph == sigma.graph


def test_flag_counts_stable_across_reruns(r33):
    canon_a = Canonicalizer(r33.k, r33.colorblind_classes)
    canon_b = Canonicalizer(r33.k, r33.colorblind_classes)
    basis = enumerate_graphs(r33, 4, canon=canon_a)
    for s in (0, 2):
        for sigma in enumerate_types(r33, s, basis, canon_a):
            fa = enumerate_flags(sigma, (4 + s) // 2, r33, canon_a)
            fb = enumerate_flags(sigma, (4 + s) // 2, r33, canon_b)
            assert [f.graph for f in fa] == [f.graph for f in fb]
