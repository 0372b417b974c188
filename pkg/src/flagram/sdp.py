"""Semidefinite program assembly and solver interchange files.

The program maximizes lambda subject to, for every basis graph H,

    b_H - sum_sigma <M_sigma, C_sigma(H)>  >=  lambda,      M_sigma PSD,

where b is the objective vector and C_sigma(H) collects product
coefficients.  In SDPA sparse form the variables are lambda followed by
the upper-triangular entries of every block, and the per-graph constraint
lives on a diagonal slack block.  Rows are cleared of denominators so the
file contains integers only, which also makes exports byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .algebra import FlagContext, ProductTable
from .enumeration import Basis, Flag, TypeSigma, valid_type_sizes
from .model import RamseyProblem


class AssemblyError(ValueError):
    """Raised when no usable types exist for the requested configuration."""


class SolutionFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class TypeBlock:
    sigma: TypeSigma
    flags: tuple[Flag, ...]
    table: ProductTable

    @property
    def dim(self) -> int:
        return len(self.flags)


@dataclass(frozen=True)
class SdpProblem:
    problem: RamseyProblem
    basis: Basis
    objective: tuple[Fraction, ...]
    blocks: tuple[TypeBlock, ...]

    @property
    def num_constraints(self) -> int:
        return len(self.basis)

    @property
    def num_variables(self) -> int:
        return 1 + sum(b.dim * (b.dim + 1) // 2 for b in self.blocks)

    def constraint_row(self, g: int) -> list[dict[tuple[int, int], Fraction]]:
        """Per block: folded coefficients of M[i,j] (i<=j) in constraint g.

        Folded means off-diagonal entries already carry the factor 2 from
        the two symmetric positions, so the constraint reads
        b_g - sum over blocks and i<=j of coeff * M[i,j] >= lambda.
        """
        rows = []
        for blk in self.blocks:
            row: dict[tuple[int, int], Fraction] = {}
            for (i, j), col in blk.table.entries.items():
                v = col.get(g)
                if v:
                    row[(i, j)] = v if i == j else 2 * v
            rows.append(row)
        return rows

    def functional(self, matrices) -> list[Fraction]:
        """Exact value of sum_sigma <M_sigma, C_sigma(H)> for every H."""
        out = []
        for g in range(len(self.basis)):
            total = Fraction(0)
            for blk, mat, row in zip(
                self.blocks, matrices, self.constraint_row(g)
            ):
                for (i, j), coeff in row.items():
                    total += coeff * mat[i][j]
            out.append(total)
        return out


def assemble(
    problem: RamseyProblem,
    ctx: FlagContext | None = None,
    type_sizes: tuple[int, ...] | None = None,
) -> SdpProblem:
    """Build the SDP for the problem's flag order.

    type_sizes defaults to every size of matching parity up to n-2; an
    explicit tuple restricts the blocks (sizes must keep the parity).
    """
    ctx = ctx or FlagContext(problem)
    n = problem.flag_order
    sizes = valid_type_sizes(n) if type_sizes is None else tuple(type_sizes)
    for s in sizes:
        if s < 0 or s > n - 2 or (n - s) % 2:
            raise AssemblyError(f"type size {s} unusable at flag order {n}")
    blocks = []
    for s in sizes:
        for sigma in ctx.types(s):
            table = ctx.product_table(sigma, n)
            flags = tuple(ctx.flags(sigma, table.flag_order))
            blocks.append(TypeBlock(sigma=sigma, flags=flags, table=table))
    if not blocks:
        raise AssemblyError("no types available; nothing to optimize")
    return SdpProblem(
        problem=problem,
        basis=ctx.basis(n),
        objective=ctx.objective_vector(n),
        blocks=tuple(blocks),
    )


@dataclass
class FloatSolution:
    lam: float
    matrices: list[np.ndarray]
    solver_status: str = "external"
    gap_history: list[float] = field(default_factory=list)
    iterations: int = 0

    def matrix_list(self) -> list[np.ndarray]:
        return self.matrices


def _variable_layout(sdp: SdpProblem):
    """var index -> (block index, i, j); variable 0 is lambda."""
    layout = []
    for b, blk in enumerate(sdp.blocks):
        for i in range(blk.dim):
            for j in range(i, blk.dim):
                layout.append((b, i, j))
    return layout


def export_sdpa(sdp: SdpProblem) -> str:
    """Serialize in SDPA sparse format with integer entries."""
    layout = _variable_layout(sdp)
    m = 1 + len(layout)
    nslack = len(sdp.basis)
    sizes = [blk.dim for blk in sdp.blocks] + [-nslack]
    lines = [str(m), str(len(sizes)), " ".join(str(s) for s in sizes)]
    cvec = ["-1"] + ["0"] * len(layout)
    lines.append(" ".join(cvec))
    slack_block = len(sdp.blocks) + 1

    rows = [sdp.constraint_row(g) for g in range(nslack)]
    scales = []
    for g in range(nslack):
        dens = [sdp.objective[g].denominator]
        for row in rows[g]:
            dens.extend(v.denominator for v in row.values())
        scales.append(lcm(*dens) if dens else 1)

    entries: list[tuple[int, int, int, int, int]] = []
    for g in range(nslack):
        val = -sdp.objective[g] * scales[g]
        if val:
            entries.append((0, slack_block, g + 1, g + 1, int(val)))
    for g in range(nslack):
        entries.append((1, slack_block, g + 1, g + 1, -scales[g]))
    for vidx, (b, i, j) in enumerate(layout, start=2):
        entries.append((vidx, b + 1, i + 1, j + 1, 1))
        for g in range(nslack):
            coeff = rows[g][b].get((i, j))
            if coeff:
                entries.append((vidx, slack_block, g + 1, g + 1, int(-coeff * scales[g])))
    for e in entries:
        lines.append(" ".join(str(x) for x in e))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SdpaData:
    num_vars: int
    block_sizes: tuple[int, ...]
    rhs: tuple[Fraction, ...]
    entries: tuple[tuple[int, int, int, int, Fraction], ...]


def parse_sdpa(text: str) -> SdpaData:
    """Parse SDPA sparse format back into a structural record."""
    lines = [
        ln for ln in text.splitlines() if ln.strip() and ln.lstrip()[0] not in "*\""
    ]
    if len(lines) < 4:
        raise SolutionFormatError("truncated SDPA file", line=len(lines) + 1)
    m = int(lines[0].split()[0])
    nblocks = int(lines[1].split()[0])
    sizes = tuple(int(tok.strip("{},()")) for tok in lines[2].split())[:nblocks]
    rhs = tuple(Fraction(tok) for tok in lines[3].replace(",", " ").split())
    if len(rhs) != m:
        raise SolutionFormatError(f"expected {m} objective entries", line=4)
    entries = []
    for lineno, ln in enumerate(lines[4:], start=5):
        toks = ln.split()
        if len(toks) != 5:
            raise SolutionFormatError("expected 'matno block i j value'", line=lineno)
        entries.append(
            (int(toks[0]), int(toks[1]), int(toks[2]), int(toks[3]), Fraction(toks[4]))
        )
    return SdpaData(m, sizes, rhs, tuple(entries))


def serialize_solution(sol: FloatSolution, sdp: SdpProblem) -> str:
    """Write a solution in the solver output format parse_solution reads.

    Line one carries the variable vector (lambda then block entries); the
    following lines give the PSD slack matrix entries, one per line.
    """
    layout = _variable_layout(sdp)
    y = [sol.lam]
    for b, i, j in layout:
        y.append(float(sol.matrices[b][i, j]))
    lines = [" ".join(f"{v:.18e}" for v in y)]
    for b, blk in enumerate(sdp.blocks):
        mat = sol.matrices[b]
        for i in range(blk.dim):
            for j in range(i, blk.dim):
                v = float(mat[i, j])
                if v != 0.0:
                    lines.append(f"1 {b + 1} {i + 1} {j + 1} {v:.18e}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str, sdp: SdpProblem) -> FloatSolution:
    """Read a CSDP-style solution file for the exported problem.

    The first line must hold the full variable vector; subsequent lines are
    'matno block i j value' matrix entries, validated against the block
    structure.  Matrices are reconstructed from the variable vector.
    """
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and (not lines[idx].strip() or lines[idx].lstrip()[0] in "*\""):
        idx += 1
    if idx >= len(lines):
        raise SolutionFormatError("missing variable vector line", line=idx + 1)
    try:
        y = [float(tok) for tok in lines[idx].split()]
    except ValueError as exc:
        raise SolutionFormatError(str(exc), line=idx + 1) from exc
    layout = _variable_layout(sdp)
    if len(y) != 1 + len(layout):
        raise SolutionFormatError(
            f"expected {1 + len(layout)} variables, found {len(y)}", line=idx + 1
        )
    dims = [blk.dim for blk in sdp.blocks] + [len(sdp.basis)]
    for lineno, ln in enumerate(lines[idx + 1 :], start=idx + 2):
        if not ln.strip():
            continue
        toks = ln.split()
        if len(toks) != 5:
            raise SolutionFormatError("expected 'matno block i j value'", line=lineno)
        try:
            matno, block, i, j = (int(t) for t in toks[:4])
            float(toks[4])
        except ValueError as exc:
            raise SolutionFormatError(str(exc), line=lineno) from exc
        if matno not in (1, 2):
            raise SolutionFormatError(f"bad matrix number {matno}", line=lineno)
        if not (1 <= block <= len(dims)):
            raise SolutionFormatError(f"block {block} out of range", line=lineno)
        if not (1 <= i <= dims[block - 1] and 1 <= j <= dims[block - 1]):
            raise SolutionFormatError(
                f"entry ({i},{j}) exceeds block {block} of size {dims[block - 1]}",
                line=lineno,
            )
    matrices = []
    pos = 1
    for blk in sdp.blocks:
        mat = np.zeros((blk.dim, blk.dim))
        for i in range(blk.dim):
            for j in range(i, blk.dim):
                mat[i, j] = mat[j, i] = y[pos]
                pos += 1
        matrices.append(mat)
    return FloatSolution(lam=y[0], matrices=matrices, solver_status="external")


def weak_duality_check(sol: FloatSolution, sdp: SdpProblem, tol: float = 1e-7) -> float:
    """Smallest slack of the float solution; sound if >= lam - dim*tol."""
    mats = [
        [[Fraction(float(m[i, j])).limit_denominator(10**12) for j in range(m.shape[0])]
         for i in range(m.shape[0])]
        for m in sol.matrices
    ]
    vals = sdp.functional(mats)
    return min(float(sdp.objective[g] - vals[g]) for g in range(len(sdp.basis)))
