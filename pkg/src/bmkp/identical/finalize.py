"""Completing a guess: pairs for knapsacks without critical items, then the
cheap items by LP and sliding rounding."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from ..lp_engine import GE, LE, Infeasible, LinearProgram, solve_lp
from ..model import FractionalAssignment, Item
from ..rounding_kit.matching import MatchGraph, max_matching
from ..rounding_kit.sliding import WindowInstance, sliding_round
from .labels import is_expensive


class GuessRejected(Exception):
    """The guess cannot be completed into a solution."""


def pair_graph(items: Mapping[int, Item], eps: Fraction, free: Sequence[int]) -> MatchGraph:
    target = Fraction(2, 3) - 4 * eps
    free = sorted(free)
    edges = []
    for a in range(len(free)):
        for b in range(a + 1, len(free)):
            u, v = items[free[a]], items[free[b]]
            if u.weight + v.weight <= 1 and u.profit + v.profit >= target:
                edges.append((u.id, v.id))
    return MatchGraph(tuple(free), tuple(edges))


def pair_matching(items: Mapping[int, Item], eps: Fraction, H: Sequence[frozenset[int]],
                  L: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    """E*_j = H*_j | L*_j where that is non-empty; the remaining knapsacks,
    in index order, each get one edge of a maximum matching among the
    non-critical expensive items (edges in sorted order)."""
    m = len(H)
    E = [frozenset(H[j] | L[j]) for j in range(m)]
    empty = [j for j in range(m) if not E[j]]
    if not empty:
        return E
    taken = set().union(*E)
    free = [i for i, it in items.items() if is_expensive(it, eps) and i not in taken]
    M = sorted(tuple(sorted(e)) for e in max_matching(pair_graph(items, eps, free)))
    for j, pair in zip(empty, M):
        E[j] = frozenset(pair)
    return E


def cheap_lp(items: Mapping[int, Item], E: Sequence[frozenset[int]], cheap: Sequence[int]):
    """max t  s.t.  p(E_j) + sum p x >= t,  w(E_j) + sum w x <= 1,
    sum_j x_ij <= 1,  x >= 0."""
    lp = LinearProgram()
    t = lp.add_var(None, None, "t")
    var = {}
    for i in cheap:
        for j in range(len(E)):
            var[(i, j)] = lp.add_var(0, None, f"x[{i},{j}]")
    for j, e in enumerate(E):
        pe = sum((items[i].profit for i in e), Fraction(0))
        we = sum((items[i].weight for i in e), Fraction(0))
        row = {var[(i, j)]: items[i].profit for i in cheap}
        row[t] = Fraction(-1)
        lp.add_constraint(row, GE, -pe, f"profit[{j}]")
        lp.add_constraint({var[(i, j)]: items[i].weight for i in cheap}, LE, 1 - we, f"weight[{j}]")
    for i in cheap:
        lp.add_constraint({var[(i, j)]: 1 for j in range(len(E))}, LE, 1, f"item[{i}]")
    lp.maximize({t: 1})
    return lp, t, var


def finalize_cheap(items: Mapping[int, Item], eps: Fraction,
                   E: Sequence[frozenset[int]]) -> tuple[list[frozenset[int]], Fraction]:
    """Returns the bundles and the LP optimum t.  Every bundle then has
    profit >= t - 2 * (largest cheap profit)."""
    if any(sum((items[i].weight for i in e), Fraction(0)) > 1 for e in E):
        raise GuessRejected("a fixed bundle exceeds the capacity")
    used = set().union(*E) if E else set()
    cheap = sorted(i for i, it in items.items() if not is_expensive(it, eps) and i not in used)
    lp, t, var = cheap_lp(items, E, cheap)
    try:
        sol = solve_lp(lp)
    except Infeasible as exc:  # pragma: no cover - t is free, so this needs a broken E
        raise GuessRejected("cheap-item LP is infeasible") from exc
    tval = sol.values[t]
    if not cheap:
        return [frozenset(e) for e in E], tval
    z = {(i, j): sol.values[v] for (i, j), v in var.items() if sol.values[v]}
    targets = []
    caps = []
    for e in E:
        pe = sum((items[i].profit for i in e), Fraction(0))
        we = sum((items[i].weight for i in e), Fraction(0))
        targets.append(max(Fraction(0), tval - pe))
        caps.append(1 - we)
    wi = WindowInstance(tuple(items[i] for i in cheap), tuple(targets), tuple(caps),
                        FractionalAssignment(z))
    rounded = sliding_round(wi)
    return [frozenset(E[j] | rounded.bundles[j]) for j in range(len(E))], tval
