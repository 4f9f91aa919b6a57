"""Command-line front end: ``ctxrank <command> ...``.

Exit codes: 0 on success, 2 when the input is invalid (malformed, inconsistent
or unsupported), 3 when a resource cap is exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import io
from .automaton import END, build_automaton, simulate_stream
from .behavior import Behavior, validate_behavior
from .constructions import (
    build_color_behavior,
    build_cycle_behavior,
    build_pm_behavior,
    build_pr_behavior,
)
from .errors import CapExceededError, CtxRankError
from .graphs import arboricity, forest_decomposition, parse_edge_list
from .measures import (
    contextual_fraction,
    contradiction_number,
    relative_entropy_uniform,
    robustness,
)
from .oracle import DEFAULT_MAX_ASSIGNMENTS
from .rank import rank_of_contextuality

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 2, 3


def _write(args, text: str) -> None:
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path: str) -> Behavior:
    return io.read_behavior(path)


def _require_valid(P: Behavior) -> None:
    report = validate_behavior(P)
    if not report.ok:
        bad = [i for i, ok in enumerate(report.normalized) if not ok]
        if bad:
            raise _Invalid(f"table of context {P.hypergraph.context_label(bad[0])} is not normalized")
        v = report.violations[0]
        H = P.hypergraph
        raise _Invalid(
            "marginals disagree between contexts "
            f"{H.context_label(v.contexts[0])} and {H.context_label(v.contexts[1])}"
        )


class _Invalid(CtxRankError):
    pass


def cmd_check(args) -> int:
    P = _load(args.behavior)
    report = validate_behavior(P)
    _write(args, io.dumps(io.report_to_dict(P, report)))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_rank(args) -> int:
    P = _load(args.behavior)
    _require_valid(P)
    result = rank_of_contextuality(
        P, method=args.method, cap=args.max_assignments, threads=args.threads
    )
    _write(args, io.dumps(io.rank_to_dict(P, result)))
    return EXIT_OK


def cmd_measures(args) -> int:
    P = _load(args.behavior)
    _require_valid(P)
    cap = args.max_assignments
    result = rank_of_contextuality(P, cap=cap, threads=args.threads)
    out = {
        "rc": result.rc,
        "rc2": io.rank_to_dict(P, result)["rc2"],
        "contextual_fraction": io.measure_to_dict(P, contextual_fraction(P, cap)),
        "robustness": io.measure_to_dict(P, robustness(P, cap)),
        "relative_entropy_uniform": io.measure_to_dict(
            P, relative_entropy_uniform(P, tol=args.tol, cap=cap)
        ),
        "contradiction_number": io.measure_to_dict(P, contradiction_number(P, cap)),
    }
    _write(args, io.dumps(out))
    return EXIT_OK


def cmd_arboricity(args) -> int:
    G = parse_edge_list(io.read_text(args.graph))
    out = {"arboricity": arboricity(G)}
    k = args.decompose if args.decompose is not None else out["arboricity"]
    out["decomposition"] = io.decomposition_to_dict(forest_decomposition(G, k))
    _write(args, io.dumps(out))
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.family == "cycle":
        corrected = False if args.uncorrected else None
        P = build_cycle_behavior(args.n, corrected=corrected)
    elif args.family == "pm":
        P = build_pm_behavior()
    elif args.family == "pr":
        P = build_pr_behavior(args.alpha)
    else:
        P = build_color_behavior(parse_edge_list(io.read_text(args.graph)))
    _write(args, io.dump_behavior(P))
    return EXIT_OK


def _parse_queries(text: str) -> list:
    queries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line in (END, "ω"):
            queries.append(END)
            continue
        try:
            queries.append(int(line))
        except ValueError:
            raise _Invalid(f"query line {lineno} is not a context index: {line!r}") from None
    return queries


def cmd_simulate(args) -> int:
    P = _load(args.behavior)
    _require_valid(P)
    queries = _parse_queries(io.read_text(args.queries))
    if not queries:
        raise _Invalid("query file is empty")
    result = rank_of_contextuality(P, cap=args.max_assignments, threads=args.threads)
    A = build_automaton(P, result)
    outcomes, report = simulate_stream(A, queries, args.seed)
    H = P.hypergraph
    lines = []
    for q, o in zip(queries, outcomes):
        if o is not None:
            lines.append(",".join(H.symbols(q, o)))
    summary = {
        "memory_states": A.memory_states,
        "memory_bits": A.memory_bits,
        "queries": {str(k): v for k, v in report.queries.items()},
        "counts": {
            str(k): {",".join(H.symbols(k, o)): n for o, n in sorted(c.items())}
            for k, c in report.counts.items()
        },
        "chi2": {str(k): v for k, v in report.chi2.items()},
        "p_values": {str(k): v for k, v in report.p_values.items()},
    }
    _write(args, "\n".join(lines) + "\n" + json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--max-assignments",
        type=int,
        default=DEFAULT_MAX_ASSIGNMENTS,
        help="cap on enumerated deterministic assignments",
    )
    common.add_argument("--threads", type=int, default=1, help="worker threads for oracle queries")
    common.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")

    parser = argparse.ArgumentParser(
        prog="ctxrank", description="Rank of contextuality and related measures."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a behavior")
    p.add_argument("behavior")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("rank", parents=[common], help="rank of contextuality with a cover")
    p.add_argument("behavior")
    p.add_argument("--method", choices=("auto", "lp", "support"), default="auto")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("measures", parents=[common], help="rank plus the comparison measures")
    p.add_argument("behavior")
    p.add_argument("--tol", type=float, default=1e-4, help="duality-gap tolerance for the entropy")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("arboricity", parents=[common], help="arboricity of an edge list")
    p.add_argument("graph")
    p.add_argument("--decompose", type=int, metavar="K", help="forests to split into")
    p.set_defaults(func=cmd_arboricity)

    p = sub.add_parser("construct", help="write a standard behavior")
    fam = p.add_subparsers(dest="family", required=True)
    c = fam.add_parser("cycle", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--uncorrected", action="store_true", help="all edges anticorrelated")
    fam.add_parser("pm", parents=[common])
    c = fam.add_parser("pr", parents=[common])
    c.add_argument("--alpha", required=True, help="rational p/q in [1/2, 1]")
    c = fam.add_parser("color", parents=[common])
    c.add_argument("graph")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", parents=[common], help="run the simulating automaton")
    p.add_argument("--behavior", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (CtxRankError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
