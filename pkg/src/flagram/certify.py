"""Exact rational certification of solver output.

A floating solution becomes a proof in three steps: round each block
matrix to a fixed power-of-two denominator, verify positive
semidefiniteness in exact arithmetic, and recompute every constraint
slack exactly.  The minimum slack is the certified density bound delta,
and integrality turns delta into a Ramsey bound: R <= m+1 for the largest
integer m with m^(ell-1) * delta <= 1.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

from .model import RamseyProblem
from .sdp import FloatSolution, SdpProblem

DENOMINATOR_SCHEDULE = tuple(2**e for e in range(20, 65, 4))
DELTA_SLACK_BUDGET = Fraction(1, 10**4)

RationalMatrix = list[list[Fraction]]


class CertificationError(RuntimeError):
    def __init__(self, message: str, best_delta: Fraction | None = None,
                 failing_block: int | None = None):
        super().__init__(message)
        self.best_delta = best_delta
        self.failing_block = failing_block


class PsdVerificationError(ValueError):
    """Raised when a block that must be PSD is not, naming the block."""

    def __init__(self, block: int):
        super().__init__(f"matrix for type block {block} is not positive semidefinite")
        self.block = block


def round_to_rational(sol: FloatSolution, denom: int) -> list[RationalMatrix]:
    """Round every block entry to the nearest multiple of 1/denom."""
    if denom < 1:
        raise ValueError("denominator must be positive")
    out = []
    for mat in sol.matrices:
        d = mat.shape[0]
        rounded = [[Fraction(0)] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                v = Fraction(round(float(mat[i, j]) * denom), denom)
                rounded[i][j] = rounded[j][i] = v
        out.append(rounded)
    return out


def verify_psd_exact(matrix: RationalMatrix) -> bool:
    """Exact PSD test by fraction-free-style symmetric pivoting.

    Repeatedly pivots on a positive diagonal entry; indices whose diagonal
    is zero must have an all-zero row to remain PSD, and any negative
    diagonal refutes it.
    """
    d = len(matrix)
    for row in matrix:
        if len(row) != d:
            raise ValueError("matrix must be square")
    for i in range(d):
        for j in range(i + 1, d):
            if matrix[i][j] != matrix[j][i]:
                raise ValueError("matrix must be symmetric")
    work = [[Fraction(x) for x in row] for row in matrix]
    active = list(range(d))
    while active:
        if any(work[i][i] < 0 for i in active):
            return False
        zero = [i for i in active if work[i][i] == 0]
        for i in zero:
            if any(work[i][j] != 0 for j in active):
                return False
        active = [i for i in active if work[i][i] > 0]
        if not active:
            return True
        p = max(active, key=lambda i: work[i][i])
        pivot = work[p][p]
        rest = [i for i in active if i != p]
        for i in rest:
            ci = work[i][p]
            if ci:
                for j in rest:
                    work[i][j] -= ci * work[p][j] / pivot
        active = rest
    return True


def certified_delta(
    sdp: SdpProblem, matrices: list[RationalMatrix]
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact minimum slack of the constraint system under given matrices."""
    if len(matrices) != len(sdp.blocks):
        raise ValueError("one matrix per type block required")
    for b, (blk, mat) in enumerate(zip(sdp.blocks, matrices)):
        if len(mat) != blk.dim:
            raise ValueError(f"block {b} expects dimension {blk.dim}, got {len(mat)}")
        if not verify_psd_exact(mat):
            raise PsdVerificationError(b)
    values = sdp.functional(matrices)
    slack = tuple(sdp.objective[g] - values[g] for g in range(len(sdp.basis)))
    return min(slack), slack


def ramsey_bound(delta: Fraction, ell: int) -> int:
    """R <= m+1 for the largest m with (1/m)^(ell-1) >= delta."""
    if ell < 2:
        raise ValueError("ell must be at least 2")
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("no bound derivable from a nonpositive delta")
    if delta > 1:
        raise ValueError("delta cannot exceed 1")
    m = 1
    while (m + 1) ** (ell - 1) * delta <= 1:
        m += 1
    return m + 1


@dataclass(frozen=True)
class Certificate:
    fingerprint: str
    matrices: tuple[tuple[tuple[Fraction, ...], ...], ...]
    delta: Fraction
    slack: tuple[Fraction, ...]
    bound: int
    ell: int
    denominator: int

    def statement(self) -> str:
        return f"R <= {self.bound}"


def problem_fingerprint(problem: RamseyProblem, sdp: SdpProblem) -> str:
    h = hashlib.sha256()
    canonical = "\n".join(
        ln.split("#", 1)[0].strip()
        for ln in problem.source_text.splitlines()
        if ln.split("#", 1)[0].strip()
    )
    h.update(canonical.encode())
    for key in sdp.basis.keys:
        h.update(key)
    return h.hexdigest()


def certify(
    problem: RamseyProblem,
    sdp: SdpProblem,
    sol: FloatSolution,
    schedule: tuple[int, ...] = DENOMINATOR_SCHEDULE,
) -> Certificate:
    """Round, verify, and package a float solution into an exact certificate.

    Escalates through the denominator schedule until all blocks verify PSD
    and the exact delta loses at most the fixed budget against the float
    objective.
    """
    target = Fraction(sol.lam).limit_denominator(10**12) - DELTA_SLACK_BUDGET
    best: tuple[Fraction, int] | None = None
    failing = None
    for denom in schedule:
        matrices = round_to_rational(sol, denom)
        try:
            delta, slack = certified_delta(sdp, matrices)
        except PsdVerificationError as exc:
            failing = exc.block
            continue
        if best is None or delta > best[0]:
            best = (delta, denom)
        if delta >= target:
            return Certificate(
                fingerprint=problem_fingerprint(problem, sdp),
                matrices=tuple(tuple(tuple(row) for row in mat) for mat in matrices),
                delta=delta,
                slack=slack,
                bound=ramsey_bound(delta, problem.ell) if delta > 0 else 0,
                ell=problem.ell,
                denominator=denom,
            )
    if best is not None:
        raise CertificationError(
            f"no denominator reached delta >= {target}; best achieved {best[0]} "
            f"at denominator {best[1]}",
            best_delta=best[0],
        )
    raise CertificationError(
        "every rounding left some block indefinite"
        + (f" (last failing block {failing})" if failing is not None else ""),
        failing_block=failing,
    )


def certificate_to_text(cert: Certificate) -> str:
    lines = [f"fingerprint {cert.fingerprint}"]
    lines.append(f"ell {cert.ell}")
    lines.append(f"denominator {cert.denominator}")
    lines.append(f"blocks {len(cert.matrices)}")
    for mat in cert.matrices:
        lines.append(f"matrix {len(mat)}")
        for row in mat:
            lines.append(" ".join(f"{v.numerator}/{v.denominator}" for v in row))
    lines.append(f"delta {cert.delta.numerator}/{cert.delta.denominator}")
    lines.append(f"bound {cert.bound}")
    lines.append(
        "slack " + " ".join(f"{v.numerator}/{v.denominator}" for v in cert.slack)
    )
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> Certificate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    pos = 0

    def take(prefix: str) -> str:
        nonlocal pos
        if pos >= len(lines) or not lines[pos].startswith(prefix + " "):
            raise ValueError(f"expected '{prefix} ...' at line {pos + 1}")
        val = lines[pos][len(prefix) + 1 :]
        pos += 1
        return val

    fingerprint = take("fingerprint")
    ell = int(take("ell"))
    denominator = int(take("denominator"))
    nblocks = int(take("blocks"))
    matrices = []
    for _ in range(nblocks):
        d = int(take("matrix"))
        rows = []
        for _ in range(d):
            rows.append(tuple(Fraction(tok) for tok in lines[pos].split()))
            pos += 1
        matrices.append(tuple(rows))
    delta = Fraction(take("delta"))
    bound = int(take("bound"))
    slack = tuple(Fraction(tok) for tok in take("slack").split())
    return Certificate(
        fingerprint=fingerprint,
        matrices=tuple(matrices),
        delta=delta,
        slack=slack,
        bound=bound,
        ell=ell,
        denominator=denominator,
    )


def verify_certificate(
    cert: Certificate, problem: RamseyProblem, sdp: SdpProblem
) -> bool:
    """Re-verify a certificate against a freshly assembled problem."""
    if cert.fingerprint != problem_fingerprint(problem, sdp):
        return False
    matrices = [list(list(row) for row in mat) for mat in cert.matrices]
    try:
        delta, slack = certified_delta(sdp, matrices)
    except (PsdVerificationError, ValueError):
        return False
    return (
        delta == cert.delta
        and slack == cert.slack
        and cert.bound == ramsey_bound(delta, problem.ell)
    )
