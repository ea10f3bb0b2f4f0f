"""Command line interface: analyze, mesh, verify, catalog.

Exit codes: 0 success, 1 analysis error, 2 verification failure, 3 usage or
parse error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalog import catalog, catalog_names
from .config import DEFAULT
from .parser import ParseError
from .report import MESH_TARGETS, MeshError, StageError, analyze, dumps, mesh, verify
from .specfile import parse_spec
from .verify import FAULTS

EXIT_OK, EXIT_ANALYSIS, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _grid(text):
    try:
        n, m = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}") from None
    if n < 2 or m < 2:
        raise argparse.ArgumentTypeError("grid dimensions must be at least 2")
    return n, m


def _pair(text):
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return tuple(v)


def build_parser():
    p = _Parser(prog="lightlike", description="Lightlike loci of frontals in Minkowski 3-space.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--spec", type=Path, help="surface description file")
        src.add_argument("--name", help="built-in catalog entry")
        sp.add_argument("--tol", action="append", default=[], metavar="KEY=VAL", help="tolerance override (repeatable)")
        sp.add_argument("--samples", type=int, help="number of locus samples")

    a = sub.add_parser("analyze", help="full analysis report (JSON)")
    common(a)
    a.add_argument("--u0", type=_floats, help="comma separated locus parameters for contact reports")
    a.add_argument("--out", type=Path, help="write the report here instead of stdout")

    m = sub.add_parser("mesh", help="export geometry as OBJ/CSV")
    common(m)
    m.add_argument("--target", required=True, choices=MESH_TARGETS)
    m.add_argument("--grid", type=_grid, default=(64, 16), help="NxM (locus samples x ruling samples)")
    m.add_argument("--out", type=Path, default=Path("."), help="output directory")
    m.add_argument("--u0", type=_floats, help="base point of the model curves")
    m.add_argument("--v-range", type=_pair, default=(-1.0, 1.0), help="ruling parameter range for f_L, f_N")

    v = sub.add_parser("verify", help="run the identity checks (JSON)")
    common(v)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", type=Path)
    v.add_argument("--fault", choices=sorted(FAULTS), help=argparse.SUPPRESS)

    c = sub.add_parser("catalog", help="list catalog entries or print one as a spec file")
    c.add_argument("--name")
    return p


def _load_spec(args):
    if args.spec is not None:
        try:
            text = args.spec.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.spec}: {exc}") from exc
        return parse_spec(text, source=str(args.spec))
    try:
        return catalog(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            if args.name is None:
                sys.stdout.write("\n".join(catalog_names()) + "\n")
            else:
                sys.stdout.write(_load_spec(argparse.Namespace(spec=None, name=args.name)).to_text())
            return EXIT_OK
        spec = _load_spec(args)
        try:
            tol = DEFAULT.with_overrides(args.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.samples is not None and args.samples < 2:
            raise UsageError("--samples must be at least 2")
    except (UsageError, ParseError) as exc:
        sys.stderr.write(f"lightlike: error: {exc}\n")
        return EXIT_USAGE

    if args.command == "analyze":
        rep = analyze(spec, tol, args.u0, args.samples)
        _emit(dumps(rep), args.out)
        return EXIT_OK if rep["status"] == "ok" else EXIT_ANALYSIS
    if args.command == "verify":
        rep = verify(spec, tol, args.seed, args.samples, args.fault)
        _emit(dumps(rep), args.out)
        if rep["status"] == "error":
            return EXIT_ANALYSIS
        return EXIT_OK if rep["status"] == "ok" else EXIT_VERIFY
    # mesh
    u0 = None if not args.u0 else args.u0[0]
    try:
        path = mesh(spec, args.target, args.grid, args.out, tol, u0, args.v_range)
    except (StageError, MeshError) as exc:
        sys.stderr.write(f"lightlike: error: {exc}\n")
        return EXIT_ANALYSIS
    sys.stdout.write(f"{path}\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
