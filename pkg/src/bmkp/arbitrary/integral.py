"""Integral expensive items, then integral cheap items."""

from __future__ import annotations

from fractions import Fraction

from ..model import Assignment, FractionalAssignment, Item
from ..rounding_kit import WindowInstance, lst_reduce, sliding_round
from .assignment import column_totals, fractional_knapsacks
from .rounding import RoundedInstance, slack_cap

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


def round_expensive(z: FractionalAssignment, rounded: RoundedInstance) -> FractionalAssignment:
    """Re-solve the expensive part of the fractional knapsacks as a gated
    covering LP (an item may only go where it already has a positive
    share), round a vertex so each knapsack keeps at most one fractional
    edge, and delete that edge.  Each affected knapsack then drops its
    cheapest expensive items while it stays at 1/2 - eps, which leaves at
    most 1/eps of them."""
    e = rounded.eps
    by = rounded.by_id()
    frac = fractional_knapsacks(rounded, z)
    if not frac:
        return z
    gates = {}
    cheap_profit = {j: _ZERO for j in frac}
    keep = {}
    for (i, j), v in z.z.items():
        if j in frac:
            if by[i].expensive:
                gates[(i, j)] = by[i].p
            else:
                cheap_profit[j] += by[i].p * v
                keep[(i, j)] = v
        else:
            keep[(i, j)] = v
    demands = {j: 1 - e - cheap_profit[j] for j in frac}
    res = lst_reduce(gates, demands)
    chosen: dict[int, list[int]] = {j: [] for j in frac}
    for (i, j), v in res.x.items():
        if v == 1:
            chosen[j].append(i)
    for j, ids in chosen.items():
        ids.sort(key=lambda i: (by[i].p, i))
        total = cheap_profit[j] + sum((by[i].p for i in ids), _ZERO)
        while ids and total - by[ids[0]].p >= _HALF - e:
            total -= by[ids.pop(0)].p
        for i in ids:
            keep[(i, j)] = Fraction(1)
    return FractionalAssignment(keep)


def check_expensive(z: FractionalAssignment, rounded: RoundedInstance) -> dict[str, bool]:
    e = rounded.eps
    tot = column_totals(rounded, z)
    return {
        "integral": not fractional_knapsacks(rounded, z),
        "profit": all(p >= _HALF - e for p, _ in tot),
        "weight": all(w <= slack_cap(rounded, j) for j, (_, w) in enumerate(tot)),
    }


def round_cheap(z: FractionalAssignment, rounded: RoundedInstance) -> Assignment:
    """Sliding rounding of the cheap part against residual capacities
    (1 - 2eps) B - w(E_j) and targets (1/2 - eps) - p(E_j)."""
    e = rounded.eps
    by = rounded.by_id()
    if fractional_knapsacks(rounded, z):
        raise ValueError("expensive entries must be integral before cheap rounding")
    fixed: list[set[int]] = [set() for _ in range(rounded.m)]
    cheap_x = {}
    for (i, j), v in z.z.items():
        if by[i].expensive:
            fixed[j].add(i)
        else:
            cheap_x[(i, j)] = v
    caps, targets = [], []
    for j in range(rounded.m):
        cap = slack_cap(rounded, j) - rounded.bundle_weight(fixed[j])
        if cap < 0:
            raise ValueError(f"knapsack {j}: expensive items exceed (1 - 2 eps) B")
        caps.append(cap)
        targets.append(max(_ZERO, _HALF - e - rounded.bundle_profit(fixed[j])))
    cheap_ids = sorted({i for i, _ in cheap_x})
    items = tuple(Item(i, by[i].p, by[i].w) for i in cheap_ids)
    wi = WindowInstance(items, tuple(targets), tuple(caps), FractionalAssignment(cheap_x))
    rounded_cheap = sliding_round(wi)
    return Assignment(tuple(frozenset(fixed[j] | rounded_cheap.bundles[j]) for j in range(rounded.m)))
