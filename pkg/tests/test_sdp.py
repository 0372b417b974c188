from fractions import Fraction

import numpy as np
import pytest

from flagram.algebra import ProductTable
from flagram.enumeration import TypeSigma
from flagram.model import ColoredGraph
from flagram.sdp import (
    AssemblyError,
    FloatSolution,
    SdpProblem,
    SolutionFormatError,
    assemble,
    export_sdpa,
    parse_sdpa,
    parse_solution,
    serialize_solution,
    weak_duality_check,
)
from flagram.solver import solve


def test_assemble_r33_structure(r33, ctx33):
    sdp = assemble(r33, ctx33, type_sizes=(2,))
    assert sdp.num_constraints == 7
    assert [blk.dim for blk in sdp.blocks] == [2, 5]
    sdp_full = assemble(r33, ctx33)
    assert [blk.dim for blk in sdp_full.blocks] == [2, 2, 5]


def test_assemble_rejects_bad_sizes(r33, ctx33, r34, ctx34):
    with pytest.raises(AssemblyError):
        assemble(r33, ctx33, type_sizes=(1,))
    with pytest.raises(AssemblyError):
        assemble(r34, ctx34, type_sizes=(0,))  # parity excludes the empty type


def test_zero_matrices_slack_is_objective(r33, ctx33):
    sdp = assemble(r33, ctx33, type_sizes=(2,))
    zeros = [
        [[Fraction(0)] * blk.dim for _ in range(blk.dim)] for blk in sdp.blocks
    ]
    values = sdp.functional(zeros)
    assert all(v == 0 for v in values)
    assert min(sdp.objective) == 0  # lambda* with M = 0 is min_H b_H = 0


def test_export_deterministic_and_integer(r33, ctx33):
    sdp = assemble(r33, ctx33)
    texts = {export_sdpa(sdp) for _ in range(5)}
    assert len(texts) == 1
    text = texts.pop()
    lines = text.splitlines()
    assert lines[0] == str(sdp.num_variables)
    assert lines[2].split()[-1] == f"-{sdp.num_constraints}"
    for ln in lines[4:]:
        for tok in ln.split():
            int(tok)  # every entry is an integer


def test_export_parse_roundtrip(r33, ctx33):
    sdp = assemble(r33, ctx33)
    data1 = parse_sdpa(export_sdpa(sdp))
    data2 = parse_sdpa(export_sdpa(sdp))
    assert data1 == data2
    assert data1.num_vars == sdp.num_variables
    assert data1.block_sizes == tuple(
        [blk.dim for blk in sdp.blocks] + [-sdp.num_constraints]
    )


def test_solution_roundtrip(r33, ctx33):
    sdp = assemble(r33, ctx33)
    sol = solve(sdp)
    text = serialize_solution(sol, sdp)
    back = parse_solution(text, sdp)
    assert back.lam == pytest.approx(sol.lam, abs=0)
    for a, b in zip(sol.matrices, back.matrices):
        assert np.array_equal(np.round(a, 15), np.round(b, 15))


def test_parse_solution_handwritten(r33, ctx33):
    sdp = assemble(r33, ctx33, type_sizes=(2,))
    nvars = sdp.num_variables
    y = [0.25] + [0.0] * (nvars - 1)
    y[1] = 0.5  # first entry of the first block: M0[0,0]
    text = " ".join(str(v) for v in y) + "\n"
    sol = parse_solution(text, sdp)
    assert sol.lam == 0.25
    assert sol.matrices[0][0, 0] == 0.5
    assert sol.matrices[0][0, 1] == 0.0


def test_parse_solution_truncated(r33, ctx33):
    sdp = assemble(r33, ctx33)
    with pytest.raises(SolutionFormatError) as err:
        parse_solution("", sdp)
    assert err.value.line == 1
    with pytest.raises(SolutionFormatError) as err:
        parse_solution("0.5 0.25\n", sdp)  # far fewer variables than needed
    assert err.value.line == 1


def test_parse_solution_bad_block_entry(r33, ctx33):
    sdp = assemble(r33, ctx33, type_sizes=(2,))
    y = " ".join(["0.0"] * sdp.num_variables)
    with pytest.raises(SolutionFormatError) as err:
        parse_solution(y + "\n1 1 3 3 1.0\n", sdp)  # block 1 has size 2
    assert "size" in str(err.value)
    with pytest.raises(SolutionFormatError):
        parse_solution(y + "\n1 9 1 1 1.0\n", sdp)  # no block 9


def test_weak_duality_of_solver_output(r33, ctx33):
    sdp = assemble(r33, ctx33)
    sol = solve(sdp)
    total_dim = sum(blk.dim for blk in sdp.blocks)
    min_eig = min(np.linalg.eigvalsh(m).min() for m in sol.matrices)
    tol = 1e-8
    assert min_eig >= -tol
    assert weak_duality_check(sol, sdp) >= sol.lam - total_dim * tol


def _toy_problem(objective, coeff):
    """One 1x1 block, constraints b_H - coeff_H * m >= lambda."""
    basis_graph = ColoredGraph.single_vertex()

    class FakeBasis:
        level = 1
        graphs = tuple([basis_graph] * len(objective))
        keys = tuple(bytes([i]) for i in range(len(objective)))

        def __len__(self):
            return len(objective)

        def position(self, key):
            return list(self.keys).index(key)

    sigma = TypeSigma(ColoredGraph(0, ()), 0)
    table = ProductTable(
        sigma=sigma,
        flag_order=1,
        dim=1,
        entries={(0, 0): {g: c for g, c in enumerate(coeff) if c}},
    )
    from flagram.enumeration import Flag
    from flagram.sdp import TypeBlock

    blk = TypeBlock(sigma=sigma, flags=(Flag(basis_graph, sigma, 0),), table=table)
    return SdpProblem(
        problem=None, basis=FakeBasis(), objective=tuple(objective), blocks=(blk,)
    )


def test_solver_toy_lp():
    # maximize lambda s.t. 1 - m >= lambda, m >= 0: optimum lambda = 1, m = 0
    sdp = _toy_problem([Fraction(1)], [Fraction(1)])
    sol = solve(sdp)
    assert sol.lam == pytest.approx(1.0, abs=1e-7)
    assert sol.matrices[0][0, 0] == pytest.approx(0.0, abs=1e-6)


def test_solver_all_zero_coefficients():
    # with C = 0 the program is an LP: lambda* = min_H b_H
    sdp = _toy_problem([Fraction(1), Fraction(1, 3), Fraction(2)], [Fraction(0)] * 3)
    sol = solve(sdp)
    assert sol.lam == pytest.approx(1 / 3, abs=1e-7)
