"""Command-line interface.

    marsrank analyze  --input results.csv --out report.json [--svg cd.svg]
    marsrank scenario --id 1 [--seed 7] [--out s1.csv]
    marsrank diagram  --report report.json --which mars --out cd.svg

Exit codes: 0 success, 2 invalid input or I/O failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .diagram import DiagramOptions, render_cd_diagram
from .errors import InvariantViolation, MissingMode, ValidationError
from .kernel import table_alpha
from .matrix_io import read_matrix, to_csv
from .pipeline import MODES, analyze
from .report import AnalysisReport
from .scenarios import ScenarioSpec, generate_scenario

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _diagram_for(report: AnalysisReport, which: str, options: DiagramOptions | None = None) -> str:
    if which == "mars":
        if report.mars is None:
            raise MissingMode("report has no MARS section; rerun analyze with --mode mars or both")
        section = report.mars
        scores, cd = section.mars_scores, section.cd_mars
        default_label = "MARS score"
    elif which == "standard":
        if report.standard is None:
            raise MissingMode("report has no standard section; rerun analyze with --mode standard or both")
        section = report.standard
        scores, cd = section.avg_ranks, section.cd_standard
        default_label = "average rank"
    else:
        raise ValidationError(f"unknown diagram kind {which!r}")
    if options is None:
        options = DiagramOptions(score_label=default_label)
    elif not options.score_label:
        options = DiagramOptions(options.width_px, options.height_px, options.title, options.show_cd_ruler, default_label)
    return render_cd_diagram(scores, report.method_names, section.cliques, cd, options)


def cmd_analyze(args) -> int:
    table_alpha(args.alpha)
    matrix = read_matrix(args.input, args.format, args.direction)
    report = analyze(
        matrix,
        mode=args.mode,
        alpha=args.alpha,
        rho=args.permutations,
        seed=args.seed,
        sigma_mode=args.sigma,
        clique_source=args.cliques,
        standard_clique_source=args.standard_cliques,
        gate=not args.no_gate,
        workers=args.workers,
    )
    report.check_invariants()
    _write_text(args.out, report.to_json())
    if args.svg:
        which = args.svg_which or ("mars" if report.mars is not None else "standard")
        _write_text(args.svg, _diagram_for(report, which))
    return EXIT_OK


def cmd_scenario(args) -> int:
    matrix = generate_scenario(ScenarioSpec(args.id, args.seed))
    _write_text(args.out, to_csv(matrix))
    return EXIT_OK


def cmd_diagram(args) -> int:
    if args.report == "-":
        text = sys.stdin.read()
    else:
        with open(args.report, encoding="utf-8") as fh:
            text = fh.read()
    report = AnalysisReport.from_json(text)
    options = DiagramOptions(args.width, args.height, args.title, not args.no_ruler, args.score_label)
    _write_text(args.out, _diagram_for(report, args.which, options))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="marsrank", description="Classical and magnitude-aware rank statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyse a performance matrix")
    a.add_argument("--input", required=True, help="CSV or JSON matrix; '-' reads stdin")
    a.add_argument("--format", choices=["csv", "json"], help="input format (default: from suffix, else csv)")
    a.add_argument("--mode", choices=MODES, default="both")
    a.add_argument("--alpha", type=float, default=0.05, help="0.05 or 0.10")
    a.add_argument("--direction", choices=["higher", "lower"], default=None,
                   help="metric orientation (default: higher, or the JSON document's own)")
    a.add_argument("--permutations", type=int, default=10_000, metavar="RHO")
    a.add_argument("--seed", type=int, default=42)
    a.add_argument("--sigma", choices=["pooled", "scores"], default="pooled")
    a.add_argument("--cliques", choices=["cd", "holm"], default="cd", help="clique rule for the MARS diagram")
    a.add_argument("--standard-cliques", choices=["holm", "cd"], default="holm",
                   help="clique rule for the standard diagram")
    a.add_argument("--no-gate", action="store_true", help="run post-hoc tests even if Friedman does not reject")
    a.add_argument("--workers", type=int, default=1, help="threads for the permutation loop")
    a.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    a.add_argument("--svg", default=None, help="also write a CD diagram here")
    a.add_argument("--svg-which", choices=["standard", "mars"], default=None)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scenario", help="write one of the synthetic scenarios as CSV")
    s.add_argument("--id", type=int, required=True)
    s.add_argument("--seed", type=int, default=42, help="only used by scenario 6")
    s.add_argument("--out", default=None, help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_scenario)

    d = sub.add_parser("diagram", help="render a CD diagram from a JSON report")
    d.add_argument("--report", required=True)
    d.add_argument("--which", choices=["standard", "mars"], default="mars")
    d.add_argument("--out", default=None, help="SVG path (default: stdout)")
    d.add_argument("--width", type=int, default=720)
    d.add_argument("--height", type=int, default=200)
    d.add_argument("--title", default="")
    d.add_argument("--score-label", default="")
    d.add_argument("--no-ruler", action="store_true")
    d.set_defaults(func=cmd_diagram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"marsrank: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValidationError, OSError) as exc:
        print(f"marsrank: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
