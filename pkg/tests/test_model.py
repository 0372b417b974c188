from fractions import Fraction

import pytest

from flagram.model import (
    ColoredGraph,
    PlainGraph,
    ProblemFormatError,
    contains_mono_copy,
    is_admissible,
    is_blowup_consistent,
    parse_problem,
    parse_quotient_coloring,
    quotient_density_bound,
)

K3 = PlainGraph.complete(3)


def triangle(c12, c13, c23):
    return ColoredGraph(3, (c12, c13, c23))


def c5_coloring():
    pairs = {}
    for v in range(5):
        for u in range(v):
            d = min(v - u, 5 - (v - u))
            pairs[(u, v)] = 1 if d == 1 else 2
    return ColoredGraph.from_pairs(5, pairs)


def test_blowup_consistency_one_edge_triple():
    assert not is_blowup_consistent(triangle(1, 0, 0))


def test_blowup_consistency_no_nonedges_vacuous():
    assert is_blowup_consistent(triangle(1, 2, 2))
    assert is_blowup_consistent(triangle(2, 2, 2))


def test_blowup_consistency_two_colors_one_nonedge():
    assert not is_blowup_consistent(triangle(0, 1, 2))
    assert not is_blowup_consistent(triangle(1, 2, 0))


def test_blowup_consistency_valid_clone():
    # two vertices in one class both joined to the third in one color
    assert is_blowup_consistent(triangle(0, 1, 1))
    assert not is_blowup_consistent(triangle(0, 1, 0))


def test_mono_copy_identity():
    assert contains_mono_copy(triangle(1, 1, 1), K3, 1)
    assert not contains_mono_copy(triangle(1, 1, 1), K3, 2)


def test_mono_copy_c5_has_no_mono_triangle():
    g = c5_coloring()
    assert not contains_mono_copy(g, K3, 1)
    assert not contains_mono_copy(g, K3, 2)


def test_mono_copy_pattern_too_large():
    assert not contains_mono_copy(triangle(1, 1, 1), PlainGraph.complete(4), 1)


def test_mono_copy_pattern_with_isolated_vertex():
    # pattern: one edge plus an isolated vertex; needs three distinct images
    pat = PlainGraph(3, frozenset({(0, 1)}))
    two = ColoredGraph(2, (1,))
    three = triangle(1, 0, 0)
    assert not contains_mono_copy(two, pat, 1)
    assert contains_mono_copy(three, pat, 1)


def test_admissible(r33):
    assert is_admissible(ColoredGraph.single_vertex(), r33)
    assert not is_admissible(triangle(1, 1, 1), r33)
    assert is_admissible(c5_coloring(), r33)


def test_quotient_density_bound():
    assert quotient_density_bound(c5_coloring(), 2) == Fraction(1, 5)
    assert quotient_density_bound(ColoredGraph(1, ()), 7) == 1
    with pytest.raises(ValueError):
        quotient_density_bound(triangle(0, 1, 1), 2)


def test_quotient_density_bound_r34_witness(r34):
    pairs = {}
    for v in range(8):
        for u in range(v):
            d = min(v - u, 8 - (v - u))
            pairs[(u, v)] = 1 if d in (1, 4) else 2
    g = ColoredGraph.from_pairs(8, pairs)
    assert is_admissible(g, r34)
    assert quotient_density_bound(g, 2) == Fraction(1, 8)


def test_parse_problem_rejects_edgeless():
    text = "colors 1\nforbid 1: \nflag_order 4\nell 2\n"
    with pytest.raises(ProblemFormatError):
        parse_problem(text)


def test_parse_problem_rejects_mismatched_colorblind():
    text = (
        "colors 2\ncolorblind 1,2\n"
        "forbid 1: 1-2,2-3,1-3\n"
        "forbid 2: 1-2\n"
        "flag_order 4\nell 2\n"
    )
    with pytest.raises(ProblemFormatError):
        parse_problem(text)


def test_parse_problem_rejects_bad_ell():
    text = "colors 1\nforbid 1: 1-2\nflag_order 4\nell 1\n"
    with pytest.raises(ProblemFormatError):
        parse_problem(text)
    text = "colors 1\nforbid 1: 1-2\nflag_order 4\nell 5\n"
    with pytest.raises(ProblemFormatError):
        parse_problem(text)


def test_parse_problem_comments_and_whitespace(r33):
    text = """
    # a comment
    colors   2
    colorblind 1 , 2
    forbid 1: 1-2 , 2-3, 1-3   # triangle
    forbid 2: 1-2,2-3,1-3
    flag_order 4
    ell 2
    """
    p = parse_problem(text)
    assert p.k == r33.k and p.flag_order == 4 and p.ell == 2
    assert p.colorblind_classes == (frozenset({1, 2}),)


def test_parse_problem_singleton_classes_implied(r34):
    assert r34.colorblind_classes == (frozenset({1}), frozenset({2}))


def test_forbidden_vertex_count_from_max_index():
    p = parse_problem("colors 1\nforbid 1: 1-3\nflag_order 4\nell 2\n")
    assert p.forbidden[0].n == 3  # vertex 2 exists, isolated


def test_parse_quotient_coloring_roundtrip():
    text = "vertices 3\nedge 1 2 1\nedge 1 3 1\nedge 2 3 2\n"
    g = parse_quotient_coloring(text, 2)
    assert g.colors == (1, 1, 2)
    with pytest.raises(ProblemFormatError):
        parse_quotient_coloring("vertices 3\nedge 1 2 1\n", 2)
    with pytest.raises(ProblemFormatError):
        parse_quotient_coloring(text.replace("2 3 2", "2 3 9"), 2)


def test_hereditary_admissibility(r33, ctx33):
    # deleting any vertex of an admissible graph leaves an admissible graph
    for n in (2, 3, 4, 5):
        for g in ctx33.basis(n).graphs:
            for drop in range(g.n):
                sub = g.induced(tuple(v for v in range(g.n) if v != drop))
                assert is_admissible(sub, r33)


def test_blowup_closure_cloning(r33, ctx33):
    # duplicating a vertex (color 0 between clones) preserves admissibility
    for g in ctx33.basis(4).graphs:
        for v in range(g.n):
            pattern = tuple(0 if u == v else g.color(u, v) for u in range(g.n))
            clone = g.with_vertex(pattern)
            assert is_admissible(clone, r33)
