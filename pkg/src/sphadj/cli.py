"""Command-line entry point: ``sphadj <command> [options]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on input or
resource errors (including usage errors).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import documents
from .errors import AlgebraValidationError, DocumentError, InvalidStructure, ResourceRefusal, SphadjError
from .verifier import Report, Scenario, run_counterexample, run_monad, run_sphere, run_twist_zeta


def _dims(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if lo_i < 0 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad dimension range {text!r}")
    return lo_i, hi_i


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", metavar="PATH", default=argparse.SUPPRESS, help="write the report document here")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="no human-readable output")

    parser = _Parser(prog="sphadj", description="Exact checks of spherical adjunctions over prime fields.", parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    sp = sub.add_parser("sphere", parents=[common], help="sphere-poset adjunction suite")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--dims", type=_dims, default=(1, 2), metavar="LO..HI")
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)

    mp = sub.add_parser("monad", parents=[common], help="sphericalness verdict for a tensor monad")
    src = mp.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", metavar="NAME")
    src.add_argument("--file", metavar="PATH")
    mp.add_argument("--p", type=int)
    mp.add_argument("--expect", choices=["spherical", "not-spherical"])

    cp = sub.add_parser("counterexample", parents=[common], help="product vs square-zero monad comparison")
    cp.add_argument("--p", type=int, required=True)

    tp = sub.add_parser("twist-zeta", parents=[common], help="twist versus tensoring with zeta")
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--p", type=int, required=True)
    tp.add_argument("--dims", type=_dims, default=(0, 4), metavar="LO..HI")
    tp.add_argument("--trials", type=int, default=10)
    tp.add_argument("--seed", type=int, default=0)

    vp = sub.add_parser("validate", parents=[common], help="validate a complex, diagram, algebra or report document")
    vp.add_argument("--file", required=True, metavar="PATH")
    return parser


def _validate(path: str) -> Report:
    doc = documents.load_json(path)
    kind = documents.document_type(doc)
    report = Report(Scenario("validate", {"file": Path(path).name, "document": kind}))

    def run():
        try:
            if kind == "complex":
                c = documents.complex_from_doc(doc)
                return True, {"p": c.p, "dims": [[i, n] for i, n in sorted(c.dims.items(), reverse=True)]}
            if kind == "chain-map":
                f = documents.map_from_doc(doc)
                return True, {"p": f.p}
            if kind == "diagram":
                f = documents.diagram_from_doc(doc)
                return True, {"p": f.p, "elements": len(f.base)}
            if kind == "algebra":
                a = documents.algebra_from_doc(doc)
                return True, {"p": a.p, "dim": a.dim}
            if kind == "report":
                r = Report.from_document(doc)
                same = r.to_document() == doc
                return same, {"checks": len(r.checks), "round_trip": same}
        except AlgebraValidationError as exc:
            return False, {"violations": exc.violations}
        except (InvalidStructure, ValueError) as exc:
            if isinstance(exc, DocumentError):
                raise
            return False, {"error": str(exc)}
        raise DocumentError(f"unknown document type {kind!r}")

    report.check(f"valid-{kind}", run)
    return report


def render(report: Report) -> str:
    lines = [f"scenario: {report.scenario.kind} " + " ".join(f"{k}={v}" for k, v in report.scenario.params.items())]
    for c in report.checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
        for key, value in c.witness.items():
            if isinstance(value, list) and value and all(isinstance(r, list) and len(r) == 2 for r in value):
                lines.append(f"      {key}: " + ", ".join(f"{d}:{n}" for d, n in value))
            elif isinstance(value, dict) and "rows" in value and "shape" in value:
                lines.append(f"      {key}: {value['rows']}")
    lines.append(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed")
    return "\n".join(lines)


def _dispatch(args: argparse.Namespace) -> Report:
    if args.command == "sphere":
        return run_sphere(args.n, args.p, args.dims, args.trials, args.seed)
    if args.command == "twist-zeta":
        return run_twist_zeta(args.n, args.p, args.dims, args.trials, args.seed)
    if args.command == "counterexample":
        return run_counterexample(args.p)
    if args.command == "monad":
        if args.preset is not None:
            if args.p is None:
                raise DocumentError("--preset needs --p")
            return run_monad(args.preset, args.p, args.expect)
        raw = documents.algebra_raw_from_doc(documents.load_json(args.file))
        return run_monad(raw, args.p, args.expect)
    if args.command == "validate":
        return _validate(args.file)
    raise DocumentError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    quiet = getattr(args, "quiet", False)
    try:
        report = _dispatch(args)
    except (ResourceRefusal, DocumentError, ValueError, SphadjError) as exc:
        print(f"sphadj: error: {exc}", file=sys.stderr)
        return 2
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(documents.dumps(report.to_document()))
    if not quiet:
        print(render(report))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
