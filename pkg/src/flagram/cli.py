"""Command line pipeline: enumerate, assemble, solve, certify, verify.

Exit codes: 0 success, 2 invalid input, 3 resource limit, 4 certification
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import FlagContext
from .certify import (
    Certificate,
    CertificationError,
    certificate_from_text,
    certificate_to_text,
    certify,
    verify_certificate,
)
from .enumeration import ResourceLimitError, valid_type_sizes
from .model import (
    ColoredGraph,
    ProblemFormatError,
    RamseyProblem,
    contains_mono_copy,
    is_blowup_consistent,
    parse_problem,
    parse_quotient_coloring,
    quotient_density_bound,
)
from .sdp import (
    SolutionFormatError,
    assemble,
    export_sdpa,
    parse_solution,
    serialize_solution,
    weak_duality_check,
)
from .solver import DimensionCapError, SolverConfig, solve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_CERTIFICATION = 4


class InadmissibleWitnessError(ValueError):
    def __init__(self, message: str, vertices: tuple[int, ...] = ()):
        super().__init__(message)
        self.vertices = vertices


@dataclass
class RunReport:
    problem_name: str
    basis_sizes: dict[int, int] = field(default_factory=dict)
    type_counts: dict[int, int] = field(default_factory=dict)
    flag_counts: dict[tuple[int, int], int] = field(default_factory=dict)
    solver_lambda: float | None = None
    solver_status: str = ""
    delta: Fraction | None = None
    bound: int | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def render(self) -> str:
        out = [f"problem: {self.problem_name}"]
        for n in sorted(self.basis_sizes):
            out.append(f"graphs at order {n}: {self.basis_sizes[n]}")
        for s in sorted(self.type_counts):
            out.append(f"types of size {s}: {self.type_counts[s]}")
        for (s, t), c in sorted(self.flag_counts.items()):
            out.append(f"flags for type (size {s}, #{t}): {c}")
        if self.solver_lambda is not None:
            out.append(f"solver lambda: {self.solver_lambda:.9f} ({self.solver_status})")
        if self.delta is not None:
            out.append(f"certified delta: {self.delta} = {float(self.delta):.9f}")
        if self.bound is not None:
            out.append(f"bound: R <= {self.bound}")
        out.append("--- machine readable ---")
        out.append(f"basis_sizes={dict(sorted(self.basis_sizes.items()))}")
        out.append(f"lambda={self.solver_lambda}")
        out.append(f"delta={self.delta}")
        out.append(f"bound={self.bound}")
        for stage, t in self.timings.items():
            out.append(f"time_{stage}={t:.3f}")
        return "\n".join(out)


def _load_problem(path: str) -> RamseyProblem:
    with open(path) as fh:
        return parse_problem(fh.read(), name=os.path.basename(path))


def _type_sizes(problem: RamseyProblem, arg: str | None) -> tuple[int, ...] | None:
    if arg is None:
        return None
    return tuple(int(tok) for tok in arg.replace(",", " ").split())


def check_witness(problem: RamseyProblem, coloring: ColoredGraph) -> Fraction:
    """Validate an explicit quotient coloring and return its density bound."""
    if not is_blowup_consistent(coloring):
        raise InadmissibleWitnessError("coloring is not blow-up consistent")
    for c in range(1, problem.k + 1):
        pattern = problem.forbidden[c - 1]
        if contains_mono_copy(coloring, pattern, c):
            verts = _find_mono_copy(coloring, pattern, c)
            raise InadmissibleWitnessError(
                f"monochromatic copy of forbidden graph in color {c} on vertices "
                + ",".join(str(v + 1) for v in verts),
                vertices=verts,
            )
    return quotient_density_bound(coloring, problem.ell)


def _find_mono_copy(g: ColoredGraph, pattern, color: int) -> tuple[int, ...]:
    import itertools

    for verts in itertools.permutations(range(g.n), pattern.n):
        if all(g.color(verts[u], verts[v]) == color for u, v in pattern.edges):
            return tuple(sorted(verts))
    return ()


def run_bound(
    problem: RamseyProblem,
    type_sizes: tuple[int, ...] | None = None,
    cfg: SolverConfig | None = None,
    threads: int = 1,
    external_solution: str | None = None,
) -> tuple[RunReport, Certificate]:
    report = RunReport(problem_name=problem.name or "<unnamed>")
    ctx = FlagContext(problem, threads=threads)
    t0 = time.perf_counter()
    for n in range(1, problem.flag_order + 1):
        report.basis_sizes[n] = len(ctx.basis(n))
    report.timings["enumerate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    sizes = valid_type_sizes(problem.flag_order) if type_sizes is None else type_sizes
    for s in sizes:
        types = ctx.types(s)
        report.type_counts[s] = len(types)
        for sigma in types:
            f = (problem.flag_order + s) // 2
            report.flag_counts[(s, sigma.index)] = len(ctx.flags(sigma, f))
    sdp = assemble(problem, ctx, type_sizes=type_sizes)
    report.timings["assemble"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if external_solution is not None:
        sol = parse_solution(external_solution, sdp)
    else:
        sol = solve(sdp, cfg)
    report.solver_lambda = sol.lam
    report.solver_status = sol.solver_status
    report.timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cert = certify(problem, sdp, sol)
    report.delta = cert.delta
    report.bound = cert.bound
    report.timings["certify"] = time.perf_counter() - t0
    return report, cert


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="flagram", description=__doc__)
    ap.add_argument("--threads", type=int, default=1, help="worker cap (output-invariant)")
    sub = ap.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="count admissible graphs/types/flags")
    p_enum.add_argument("problem")
    p_enum.add_argument("--level", type=int, default=None)
    p_enum.add_argument("--flags", action="store_true", help="print serialized bases")

    p_tables = sub.add_parser("tables", help="emit density and product tables")
    p_tables.add_argument("problem")
    p_tables.add_argument("--type-sizes", default=None)

    p_export = sub.add_parser("export", help="write SDPA sparse file")
    p_export.add_argument("problem")
    p_export.add_argument("-o", "--output", required=True)
    p_export.add_argument("--type-sizes", default=None)

    p_solve = sub.add_parser("solve", help="run the internal solver")
    p_solve.add_argument("problem")
    p_solve.add_argument("--tol", type=float, default=1e-9)
    p_solve.add_argument("--max-iter", type=int, default=200)
    p_solve.add_argument("--external", default=None, help="use a solver output file")
    p_solve.add_argument("--type-sizes", default=None)

    p_import = sub.add_parser("import", help="parse an external solution file")
    p_import.add_argument("problem")
    p_import.add_argument("--solution", required=True)
    p_import.add_argument("--type-sizes", default=None)

    p_cert = sub.add_parser("certify", help="round and certify a solution")
    p_cert.add_argument("problem")
    p_cert.add_argument("--solution", default=None)
    p_cert.add_argument("-o", "--output", default=None)
    p_cert.add_argument("--type-sizes", default=None)

    p_verify = sub.add_parser("verify", help="re-verify a certificate file")
    p_verify.add_argument("certificate")
    p_verify.add_argument("problem")
    p_verify.add_argument("--type-sizes", default=None)

    p_bound = sub.add_parser("bound", help="full pipeline to a certified bound")
    p_bound.add_argument("problem")
    p_bound.add_argument("--type-sizes", default=None)
    p_bound.add_argument("--tol", type=float, default=1e-9)
    p_bound.add_argument("--max-iter", type=int, default=200)
    p_bound.add_argument("-o", "--output", default=None, help="certificate output path")

    p_wit = sub.add_parser("witness", help="validate a quotient coloring")
    p_wit.add_argument("problem")
    p_wit.add_argument("coloring")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (ProblemFormatError, SolutionFormatError, InadmissibleWitnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ResourceLimitError, DimensionCapError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "enumerate":
        problem = _load_problem(args.problem)
        ctx = FlagContext(problem, threads=args.threads)
        level = args.level or problem.flag_order
        basis = ctx.basis(level)
        print(f"graphs at order {level}: {len(basis)}")
        if (level - problem.flag_order) % 2 == 0 and level == problem.flag_order:
            for s in valid_type_sizes(level):
                types = ctx.types(s)
                print(f"types of size {s}: {len(types)}")
                for sigma in types:
                    flags = ctx.flags(sigma, (level + s) // 2)
                    print(f"  type {sigma.index}: {len(flags)} flags")
        if args.flags:
            for key in basis.keys:
                print(key.hex())
        return EXIT_OK

    if cmd == "tables":
        problem = _load_problem(args.problem)
        ctx = FlagContext(problem, threads=args.threads)
        sdp = assemble(problem, ctx, type_sizes=_type_sizes(problem, args.type_sizes))
        for b, blk in enumerate(sdp.blocks):
            for (i, j), col in sorted(blk.table.entries.items()):
                for g in sorted(col):
                    v = col[g]
                    print(f"{b} {i} {j} {g} {v.numerator}/{v.denominator}")
        return EXIT_OK

    if cmd == "export":
        problem = _load_problem(args.problem)
        ctx = FlagContext(problem, threads=args.threads)
        sdp = assemble(problem, ctx, type_sizes=_type_sizes(problem, args.type_sizes))
        with open(args.output, "w") as fh:
            fh.write(export_sdpa(sdp))
        print(f"wrote {args.output}: {sdp.num_constraints} constraints, "
              f"{len(sdp.blocks)} matrix blocks")
        return EXIT_OK

    if cmd in ("solve", "import"):
        problem = _load_problem(args.problem)
        ctx = FlagContext(problem, threads=args.threads)
        sdp = assemble(problem, ctx, type_sizes=_type_sizes(problem, args.type_sizes))
        external = getattr(args, "external", None) or getattr(args, "solution", None)
        if cmd == "import" or external:
            with open(external) as fh:
                sol = parse_solution(fh.read(), sdp)
        else:
            cfg = SolverConfig(max_iterations=args.max_iter, duality_gap_tolerance=args.tol)
            sol = solve(sdp, cfg)
        print(f"lambda = {sol.lam:.9f} ({sol.solver_status})")
        print(f"min slack (float check) = {weak_duality_check(sol, sdp):.3e}")
        return EXIT_OK

    if cmd == "certify":
        problem = _load_problem(args.problem)
        ctx = FlagContext(problem, threads=args.threads)
        sdp = assemble(problem, ctx, type_sizes=_type_sizes(problem, args.type_sizes))
        if args.solution:
            with open(args.solution) as fh:
                sol = parse_solution(fh.read(), sdp)
        else:
            sol = solve(sdp)
        cert = certify(problem, sdp, sol)
        text = certificate_to_text(cert)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        print(f"delta = {cert.delta}, bound: {cert.statement()}", file=sys.stderr)
        return EXIT_OK

    if cmd == "verify":
        problem = _load_problem(args.problem)
        with open(args.certificate) as fh:
            cert = certificate_from_text(fh.read())
        ctx = FlagContext(problem, threads=args.threads)
        sdp = assemble(problem, ctx, type_sizes=_type_sizes(problem, args.type_sizes))
        if verify_certificate(cert, problem, sdp):
            print(f"certificate verifies: delta = {cert.delta}, {cert.statement()}")
            return EXIT_OK
        print("certificate FAILED re-verification", file=sys.stderr)
        return EXIT_CERTIFICATION

    if cmd == "bound":
        problem = _load_problem(args.problem)
        cfg = SolverConfig(max_iterations=args.max_iter, duality_gap_tolerance=args.tol)
        report, cert = run_bound(
            problem,
            type_sizes=_type_sizes(problem, args.type_sizes),
            cfg=cfg,
            threads=args.threads,
        )
        print(report.render())
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(certificate_to_text(cert))
        return EXIT_OK

    if cmd == "witness":
        problem = _load_problem(args.problem)
        with open(args.coloring) as fh:
            coloring = parse_quotient_coloring(fh.read(), problem.k)
        value = check_witness(problem, coloring)
        print(f"witness admissible: density bound {value} = {float(value):.9f}")
        return EXIT_OK

    raise ValueError(f"unknown command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
