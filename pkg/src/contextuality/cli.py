"""Command-line front end.

Subcommands: ``analyze`` (LP verdict, optional measure/witness), ``cyclic``
(closed-form criterion per cycle), ``estimate`` (bunches from trial CSV),
``generate`` (bundled examples and the four-axis spin system).  Exit codes
classify verdicts: 0 noncontextual, 1 contextual, 2 error or no verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .analysis import (
    DEFAULT_COLUMN_CAP,
    contextuality_measure,
    decide_contextuality,
)
from .cyclic import NotCyclic, detect_cycles, evaluate_criterion
from .errors import ContextualityError
from .ingest import (
    EXAMPLE_NAMES,
    canonical_example,
    estimate_system,
    generate_epr_b,
    parse_layout,
    parse_system,
    parse_trials,
    serialize_system,
)
from .systems import CCSystem, consistency_report

EXIT_NONCONTEXTUAL = 0
EXIT_CONTEXTUAL = 1
EXIT_ERROR = 2


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")


def _frac(x: Fraction) -> str:
    return str(x)


def _system_summary(system: CCSystem) -> dict:
    report = consistency_report(system)
    connections = system.connections()
    return {
        "contexts": len(system.contexts),
        "contents": len(system.contents),
        "variables": system.variable_count,
        "consistently_connected": report.consistent,
        "all_connections_singleton": all(c.size == 1 for c in connections),
        "all_bunches_singleton": all(
            len(system.context_contents(c)) == 1 for c in system.contexts
        ),
    }


def _cyclic_section(system: CCSystem) -> dict:
    detected = detect_cycles(system)
    if isinstance(detected, NotCyclic):
        return {"cyclic": False, "condition": detected.condition, "detail": detected.detail}
    cycles = []
    for view in detected:
        report = evaluate_criterion(view, system)
        cycles.append(
            {
                "rank": report.rank,
                "contents": list(view.contents),
                "contexts": list(view.contexts),
                "lhs": _frac(report.lhs),
                "rhs": _frac(report.rhs),
                "delta": _frac(report.delta),
                "contextual": report.contextual,
            }
        )
    return {"cyclic": True, "cycles": cycles, "contextual": any(c["contextual"] for c in cycles)}


def _render_text(report: dict) -> str:
    lines = []
    summary = report["system"]
    lines.append(
        f"system: {summary['contexts']} contexts, {summary['contents']} contents, "
        f"{summary['variables']} variables"
    )
    lines.append(
        "consistently connected: " + ("yes" if summary["consistently_connected"] else "no")
    )
    if summary["all_connections_singleton"]:
        lines.append("note: trivially noncontextual shape (no connection links two bunches)")
    elif summary["all_bunches_singleton"]:
        lines.append("note: trivially noncontextual shape (every bunch is a single variable)")
    cyclic = report.get("cyclic")
    if cyclic is not None:
        if not cyclic["cyclic"]:
            lines.append(f"cyclic: no ({cyclic['condition']}: {cyclic['detail']})")
        else:
            for cycle in cyclic["cycles"]:
                lines.append(
                    f"cycle rank {cycle['rank']}: lhs = {cycle['lhs']}, rhs = {cycle['rhs']}, "
                    f"delta = {cycle['delta']} -> "
                    + ("contextual" if cycle["contextual"] else "noncontextual")
                )
    verdict = report.get("verdict")
    if verdict is not None:
        lines.append("verdict: " + ("contextual" if verdict["contextual"] else "noncontextual"))
        if "witness" in verdict:
            kind = verdict["witness"]["kind"]
            lines.append(f"witness ({kind}):")
            if kind == "coupling":
                for outcome, mass in verdict["witness"]["masses"]:
                    lines.append(f"  {outcome}: {mass}")
            else:
                lines.append(f"  certificate rows: {verdict['witness']['certificate']}")
    measure = report.get("measure")
    if measure is not None:
        lines.append(
            f"total variation: {measure['total_variation']}  measure: {measure['measure']}"
        )
        if "witness" in measure:
            lines.append("quasi-coupling masses:")
            for outcome, mass in measure["witness"]:
                lines.append(f"  {outcome}: {mass}")
    timings = report.get("timings")
    if timings:
        parts = ", ".join(f"{k} {v:.3f}s" for k, v in timings.items())
        lines.append(f"timings: {parts}")
    return "\n".join(lines)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2))
    else:
        print(_render_text(report))


def cmd_analyze(args: argparse.Namespace) -> int:
    system = parse_system(_read_input(args.system))
    report: dict = {"system": _system_summary(system)}
    timings: dict[str, float] = {}

    start = time.perf_counter()
    verdict = decide_contextuality(system, max_columns=args.max_columns)
    timings["decide"] = time.perf_counter() - start
    report["verdict"] = {"contextual": verdict.contextual}
    if args.witness:
        if verdict.contextual:
            report["verdict"]["witness"] = {
                "kind": "certificate",
                "certificate": [_frac(y) for y in verdict.certificate],
            }
        else:
            report["verdict"]["witness"] = {
                "kind": "coupling",
                "masses": [
                    [list(outcome), _frac(mass)]
                    for outcome, mass in verdict.coupling.items()
                ],
            }

    cyclic = _cyclic_section(system)
    report["cyclic"] = cyclic
    if cyclic["cyclic"] and cyclic["contextual"] != verdict.contextual:
        raise ContextualityError(
            "internal inconsistency: cyclic criterion and feasibility verdict disagree"
        )

    report["measure"] = None
    if args.measure:
        start = time.perf_counter()
        result = contextuality_measure(system, max_columns=args.max_columns)
        timings["measure"] = time.perf_counter() - start
        report["measure"] = {
            "total_variation": _frac(result.total_variation),
            "measure": _frac(result.measure),
        }
        if args.witness:
            report["measure"]["witness"] = [
                [list(outcome), _frac(mass)]
                for outcome, mass in sorted(result.witness.masses.items())
            ]
    report["timings"] = timings
    _emit(report, args.format)
    return EXIT_CONTEXTUAL if verdict.contextual else EXIT_NONCONTEXTUAL


def cmd_cyclic(args: argparse.Namespace) -> int:
    system = parse_system(_read_input(args.system))
    report = {"system": _system_summary(system), "cyclic": _cyclic_section(system)}
    _emit(report, args.format)
    cyclic = report["cyclic"]
    if not cyclic["cyclic"]:
        return EXIT_ERROR
    return EXIT_CONTEXTUAL if cyclic["contextual"] else EXIT_NONCONTEXTUAL


def cmd_estimate(args: argparse.Namespace) -> int:
    trials = parse_trials(_read_input(args.trials))
    contents, contexts = parse_layout(_read_input(args.layout))
    system = estimate_system(trials, contents, contexts)
    _write_output(args.output, serialize_system(system))
    return EXIT_NONCONTEXTUAL


def cmd_generate(args: argparse.Namespace) -> int:
    if args.kind == "epr-b":
        angles = [float(a) for a in args.angles.split(",")]
        result = generate_epr_b(angles, args.denominator_bound)
        _write_output(args.output, serialize_system(result.system))
        print(
            f"correlation approximation: max error {result.max_error:.3g} "
            f"(denominator bound {result.denominator_bound})",
            file=sys.stderr,
        )
    else:
        _write_output(args.output, serialize_system(canonical_example(args.name)))
    return EXIT_NONCONTEXTUAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contextuality",
        description="Exact contextuality analysis of context-content systems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="decide contextuality of a system file")
    analyze.add_argument("system", help="system JSON file, or - for stdin")
    analyze.add_argument("--measure", action="store_true", help="also compute the TV measure")
    analyze.add_argument(
        "--witness", action="store_true", help="dump coupling / certificate / quasi-coupling"
    )
    analyze.add_argument(
        "--max-columns",
        type=int,
        default=DEFAULT_COLUMN_CAP,
        help="hidden-outcome cap (default 2^20)",
    )
    analyze.add_argument("--format", choices=("text", "json"), default="text")
    analyze.set_defaults(handler=cmd_analyze)

    cyclic = sub.add_parser("cyclic", help="evaluate the cyclic criterion per cycle")
    cyclic.add_argument("system", help="system JSON file, or - for stdin")
    cyclic.add_argument("--format", choices=("text", "json"), default="text")
    cyclic.set_defaults(handler=cmd_cyclic)

    estimate = sub.add_parser("estimate", help="estimate a system from trial CSV")
    estimate.add_argument("trials", help="trial CSV file, or - for stdin")
    estimate.add_argument("--layout", required=True, help="contents/contexts declaration JSON")
    estimate.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    estimate.set_defaults(handler=cmd_estimate)

    generate = sub.add_parser("generate", help="emit a canonical or constructed system")
    gensub = generate.add_subparsers(dest="kind", required=True)
    eprb = gensub.add_parser("epr-b", help="four-axis singlet-state system")
    eprb.add_argument("--angles", required=True, help="four comma-separated angles (radians)")
    eprb.add_argument("--denominator-bound", type=int, default=10**6)
    eprb.add_argument("-o", "--output", default=None)
    eprb.set_defaults(handler=cmd_generate, kind="epr-b")
    example = gensub.add_parser("example", help="bundled example system")
    example.add_argument("--name", required=True, choices=EXAMPLE_NAMES)
    example.add_argument("-o", "--output", default=None)
    example.set_defaults(handler=cmd_generate, kind="example")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ContextualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
