"""JSON interchange for behaviors, witnesses and results.

Probabilities are written as ``"p/q"`` strings, outcome keys as the
comma-joined outcome symbols, and only nonzero entries are listed.  Output
uses sorted keys and a fixed layout, so serializing a parsed file reproduces
it byte for byte.
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Any, TextIO

from .behavior import Behavior, Hypergraph, ValidationReport, as_rational
from .errors import StructuralError
from .graphs import ForestDecomposition
from .measures import MeasureValue
from .oracle import NCWitness, mask_indices
from .rank import RankResult


def rational_str(p: Fraction) -> str:
    p = Fraction(p)
    return f"{p.numerator}/{p.denominator}"


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- behaviors ------------------------------------------------------------------------


def behavior_to_dict(P: Behavior, witness: NCWitness | None = None) -> dict:
    H = P.hypergraph
    tables = []
    for i, table in enumerate(P.tables):
        probs = {",".join(H.symbols(i, o)): rational_str(p) for o, p in table.items()}
        tables.append({"context": i, "probs": probs})
    data = {
        "observables": list(H.observables),
        "alphabets": [list(a) for a in H.alphabets],
        "contexts": [list(c) for c in H.contexts],
        "tables": tables,
    }
    if P.factorization is not None:
        data["factorization"] = [list(p) for p in P.factorization]
    if witness is not None:
        data["witness"] = witness_to_dict(H, witness)
    return data


def witness_to_dict(H: Hypergraph, witness: NCWitness) -> dict:
    return {
        ",".join(H.alphabets[v][a] for v, a in enumerate(assignment)): rational_str(w)
        for assignment, w in witness.weights.items()
    }


def _field(data: dict, key: str):
    if key not in data:
        raise StructuralError(f"behavior JSON lacks the {key!r} field")
    return data[key]


def behavior_from_dict(data: dict) -> Behavior:
    """Parse the interchange dict; contexts may list their observables in any order."""
    observables = _field(data, "observables")
    alphabets = _field(data, "alphabets")
    raw_contexts = [list(c) for c in _field(data, "contexts")]
    H = Hypergraph(observables, alphabets, raw_contexts)
    lookup = [{s: k for k, s in enumerate(a)} for a in H.alphabets]
    tables: list[dict | None] = [None] * len(raw_contexts)
    for entry in _field(data, "tables"):
        i = entry["context"]
        if not isinstance(i, int) or not 0 <= i < len(raw_contexts):
            raise StructuralError(f"table refers to unknown context {i!r}")
        if tables[i] is not None:
            raise StructuralError(f"context {i} has two tables")
        order = raw_contexts[i]
        ctx = sorted(order)
        table = {}
        for key, p in entry["probs"].items():
            symbols = key.split(",") if key != "" else []
            if len(symbols) != len(order):
                raise StructuralError(f"outcome {key!r} has the wrong arity for context {i}")
            by_obs = {}
            for v, s in zip(order, symbols):
                if s not in lookup[v]:
                    raise StructuralError(f"symbol {s!r} not in the alphabet of {H.observables[v]!r}")
                by_obs[v] = lookup[v][s]
            table[tuple(by_obs[v] for v in ctx)] = as_rational(p)
        tables[i] = table
    # tables are indexed by file order; the hypergraph keeps that order
    factorization = data.get("factorization")
    return Behavior(H, tuple(tables), factorization=factorization)


def witness_from_dict(H: Hypergraph, data: dict) -> NCWitness:
    lookup = [{s: k for k, s in enumerate(a)} for a in H.alphabets]
    weights = {}
    for key, p in data.items():
        symbols = key.split(",")
        if len(symbols) != len(H.observables):
            raise StructuralError(f"assignment {key!r} does not cover every observable")
        weights[tuple(lookup[v][s] for v, s in enumerate(symbols))] = as_rational(p)
    return NCWitness(dict(sorted(weights.items())))


def dump_behavior(P: Behavior, witness: NCWitness | None = None) -> str:
    return dumps(behavior_to_dict(P, witness))


def load_behavior(text: str) -> Behavior:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise StructuralError("behavior JSON must be an object")
    return behavior_from_dict(data)


def read_text(path: str, stdin: TextIO | None = None) -> str:
    if path == "-":
        return (stdin or sys.stdin).read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def read_behavior(path: str) -> Behavior:
    return load_behavior(read_text(path))


# -- results --------------------------------------------------------------------------


def report_to_dict(P: Behavior, report: ValidationReport) -> dict:
    H = P.hypergraph
    return {
        "ok": report.ok,
        "normalized": list(report.normalized),
        "consistent": {
            f"{i},{j}": ok for (i, j), ok in sorted(report.consistent.items())
        },
        "violations": [
            {
                "contexts": [H.context_label(v.contexts[0]), H.context_label(v.contexts[1])],
                "shared": [H.observables[k] for k in v.shared],
                "outcome": [H.alphabets[k][a] for k, a in zip(v.shared, v.outcome)],
                "left": rational_str(v.left),
                "right": rational_str(v.right),
            }
            for v in report.violations
        ],
    }


def rank_to_dict(P: Behavior, result: RankResult) -> dict:
    H = P.hypergraph
    rc2 = result.rc2
    return {
        "rc": result.rc,
        "rc2": int(rc2) if rc2 == int(rc2) else rc2,
        "cover": [
            {"contexts": mask_indices(mask), "witness": witness_to_dict(H, w)}
            for mask, w in result.cover
        ],
        "maximal_sets": [mask_indices(m) for m in result.maximal_sets],
    }


def measure_to_dict(P: Behavior, m: MeasureValue) -> Any:
    if isinstance(m.value, Fraction):
        out = {"value": rational_str(m.value), "float": float(m.value)}
    elif isinstance(m.value, float):
        out = {"value": m.value, "gap": m.gap, "converged": m.converged}
    else:
        out = {"value": m.value}
    if m.kind == "ContradictionNumber":
        out["removed"] = list(m.witness)
    return out


def decomposition_to_dict(forests: ForestDecomposition) -> list:
    return [[list(e) for e in f] for f in forests.forests]
