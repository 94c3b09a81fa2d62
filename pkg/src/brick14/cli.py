"""``brick14`` command line: verify, solve, convergence.

Exit status: 0 success, 1 usage or input error, 2 inadmissible element,
3 solver failure, 4 verdict mismatch.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .element import DofKind, ElementType, InadmissibleError, build_basis
from .fem import SOLUTIONS, error_norms, solve_poisson
from .mesh import MeshError, build_mesh, read_grid_file
from .numerics import SolverError
from .study import StudyConfig, run_study
from .verify import ALL_TYPES, SK_TYPES, run_verification

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_SOLVER = 3
EXIT_MISMATCH = 4

log = logging.getLogger("brick14")


class _Parser(argparse.ArgumentParser):
    # status 2 is reserved for inadmissible elements
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(s: str) -> list[str]:
    return [p.strip() for p in s.split(",") if p.strip()]


def _types(s: str) -> list[ElementType]:
    if s == "all":
        return list(ALL_TYPES)
    try:
        return [ElementType.parse(p) for p in _csv_list(s)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _one_type(s: str) -> ElementType:
    try:
        return ElementType.parse(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _one_kind(s: str) -> DofKind:
    try:
        return DofKind.parse(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _kinds(s: str) -> list[DofKind]:
    if s == "both":
        return [DofKind.FACE_CENTROID_VALUE, DofKind.FACE_INTEGRAL_AVERAGE]
    return [_one_kind(s)]


def _ints(s: str) -> list[int]:
    try:
        return [int(p) for p in _csv_list(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _floats(s: str) -> list[float]:
    try:
        return [float(p) for p in _csv_list(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="brick14", description="14-node nonconforming brick elements for the Poisson problem.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="exact admissibility and face-identity certificates")
    v.add_argument("--types", type=_types, default=list(SK_TYPES),
                   help="comma-separated types or 'all' (default: sk1..sk6)")
    v.add_argument("--dofs", type=_kinds, default=_kinds("both"), help="centroid, integral or both")

    s = sub.add_parser("solve", help="one discrete solve with error report")
    s.add_argument("--type", required=True, type=_one_type)
    s.add_argument("--dofs", default="centroid", type=_one_kind)
    s.add_argument("--solution", default="trig", choices=sorted(SOLUTIONS))
    s.add_argument("--cells", type=_ints, default=[4, 4, 4], help="cells per axis, e.g. 4,4,4")
    s.add_argument("--box", type=_floats, default=None, help="x0,y0,z0,x1,y1,z1 (default unit cube)")
    s.add_argument("--grid-file", default=None, help="three lines of grid coordinates, one per axis")
    s.add_argument("--quad", type=int, default=5, help="Gauss points per axis for assembly")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--maxit", type=int, default=None)
    s.add_argument("--dump-matrix", default=None, help="write the reduced stiffness matrix as triplets")
    s.add_argument("--export", default=None, help="write the DOF coefficient table")

    c = sub.add_parser("convergence", help="mesh-refinement study with rate verdicts")
    c.add_argument("--types", type=_types, default=_types("sk1,sk2,sk5,sk6,new"))
    c.add_argument("--dofs", type=_kinds, default=_kinds("both"))
    c.add_argument("--solution", default="trig", choices=sorted(SOLUTIONS))
    c.add_argument("--meshes", type=_ints, default=[2, 4, 8, 16])
    c.add_argument("--quad", type=int, default=5)
    c.add_argument("--tol", type=float, default=1e-12)
    c.add_argument("--jobs", type=int, default=1, help="concurrent runs")
    c.add_argument("--csv", default=None)
    c.add_argument("--json", default=None)
    c.add_argument("--no-timing", action="store_true", help="leave the seconds column empty")
    return p


def cmd_verify(args) -> int:
    report = run_verification(args.types, args.dofs)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def _mesh(args):
    if args.grid_file:
        return read_grid_file(args.grid_file)
    if len(args.cells) != 3:
        raise MeshError("--cells needs three counts")
    if args.box is None:
        return build_mesh(cells=args.cells)
    if len(args.box) != 6:
        raise MeshError("--box needs six numbers x0,y0,z0,x1,y1,z1")
    return build_mesh(args.box[:3], args.box[3:], args.cells)


def cmd_solve(args) -> int:
    e = build_basis(args.type, args.dofs)
    m = _mesh(args)
    uh = solve_poisson(m, e, args.solution, rule=args.quad, tol=args.tol, maxit=args.maxit)
    err = error_norms(uh, args.solution)
    if args.dump_matrix:
        uh.system.matrix.dump(args.dump_matrix)
    if args.export:
        uh.export(args.export)
    log.info("cg iterations=%d residual=%.3e", uh.stats.iterations, uh.stats.residual)
    print(f"l2={err.l2!r} energy={err.energy!r}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    for t in args.types:
        for k in args.dofs:
            build_basis(t, k)
    cfg = StudyConfig(
        types=tuple(args.types),
        dof_kinds=tuple(args.dofs),
        solution=args.solution,
        meshes=tuple(args.meshes),
        quad=args.quad,
        tol=args.tol,
        jobs=args.jobs,
        record_timing=not args.no_timing,
    )
    report = run_study(cfg)
    if args.csv:
        report.write_csv(args.csv)
    if args.json:
        report.write_json(args.json)
    print(report.table())
    return EXIT_OK if report.passed else EXIT_MISMATCH


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "convergence": cmd_convergence}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InadmissibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MeshError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
