"""Shared behavior corpus and independent reference oracles for the tests."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from ctxrank import (
    Behavior,
    Hypergraph,
    build_color_behavior,
    build_cycle_behavior,
    build_pm_behavior,
    build_pr_behavior,
    mix,
)
from ctxrank.graphs import cycle_graph
from ctxrank.oracle import NCWitness, enumerate_deterministic


def random_nc(H: Hypergraph, rng: random.Random, n_points: int = 3) -> Behavior:
    """Random rational mixture of a few deterministic assignments."""
    assignments = enumerate_deterministic(H)
    picks = rng.sample(assignments, min(n_points, len(assignments)))
    raw = [rng.randint(1, 6) for _ in picks]
    total = sum(raw)
    return NCWitness({a: Fraction(r, total) for a, r in zip(picks, raw)}).behavior(H)


def random_lambda(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 9), 10)


def named_behaviors() -> dict[str, Behavior]:
    out = {
        "cycle3": build_cycle_behavior(3),
        "cycle4": build_cycle_behavior(4),
        "cycle4_plain": build_cycle_behavior(4, corrected=False),
        "cycle5": build_cycle_behavior(5),
        "cycle6": build_cycle_behavior(6),
        "pm": build_pm_behavior(),
        "color_c3": build_color_behavior(cycle_graph(3)),
    }
    for a in ("1/2", "3/4", "4/5", "7/8", "9/10", "1"):
        out[f"pr_{a}"] = build_pr_behavior(a)
    return out


def corpus(seed: int = 2024) -> dict[str, Behavior]:
    """Families plus seeded random consistent behaviors (at least 20 in total)."""
    rng = random.Random(seed)
    out = named_behaviors()
    pr1 = out["pr_1"]
    c3, c5, pm = out["cycle3"], out["cycle5"], out["pm"]
    for k in range(3):
        lam = random_lambda(rng)
        out[f"pr_mix{k}"] = mix(pr1, random_nc(pr1.hypergraph, rng), lam)
        out[f"cycle3_mix{k}"] = mix(c3, random_nc(c3.hypergraph, rng), lam)
    out["cycle5_mix"] = mix(c5, random_nc(c5.hypergraph, rng), random_lambda(rng))
    out["pm_mix"] = mix(pm, random_nc(pm.hypergraph, rng, 4), random_lambda(rng))
    for k in range(3):
        H = random_hypergraph(rng)
        out[f"random_nc{k}"] = random_nc(H, rng)
    return out


def random_hypergraph(rng: random.Random) -> Hypergraph:
    n = rng.randint(3, 5)
    names = tuple(f"x{k}" for k in range(n))
    alphabets = tuple(tuple(str(s) for s in range(rng.randint(2, 3))) for _ in range(n))
    target = rng.randint(2, 4)
    contexts = set()
    while len(contexts) < target:
        contexts.add(tuple(sorted(rng.sample(range(n), rng.randint(1, 3)))))
    covered = {v for c in contexts for v in c}
    contexts |= {(v,) for v in range(n) if v not in covered}
    return Hypergraph(names, alphabets, sorted(contexts))


# -- independent reference computations (floating LP via HiGHS, no shared code) -------


def scipy_extendable(P: Behavior, contexts) -> bool:
    """Feasibility of an NC model matching ``P`` on ``contexts``, solved with HiGHS."""
    H = P.hypergraph
    sizes = [len(a) for a in H.alphabets]
    points = list(itertools.product(*(range(s) for s in sizes)))
    rows, rhs = [], []
    for i in contexts:
        ctx = H.contexts[i]
        for outcome in itertools.product(*(range(sizes[v]) for v in ctx)):
            rows.append([1.0 if tuple(d[v] for v in ctx) == outcome else 0.0 for d in points])
            rhs.append(float(P.tables[i].get(outcome, 0)))
    rows.append([1.0] * len(points))
    rhs.append(1.0)
    res = linprog(
        np.zeros(len(points)),
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=(0, None),
        method="highs",
    )
    return res.status == 0


def brute_force_rank(P: Behavior) -> int:
    """Minimum cover of the contexts by extendable subsets, every subset tested."""
    n = P.n_contexts
    full = (1 << n) - 1
    good = [
        m
        for m in range(1, full + 1)
        if scipy_extendable(P, [i for i in range(n) if m >> i & 1])
    ]
    best = {0: 0}
    frontier = {0}
    for k in range(1, n + 1):
        nxt = set()
        for u in frontier:
            for m in good:
                if u | m not in best:
                    best[u | m] = k
                    nxt.add(u | m)
        if full in best:
            return best[full]
        frontier = nxt
    raise AssertionError("singletons always cover")
