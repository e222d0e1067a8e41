"""Exact solver for small instances.

Depth-first branch and bound.  Items are placed in order of decreasing
profit (ties: lower id first); each item goes to a knapsack, lowest index
first, or stays out.  All data is rescaled to integers, so the optimum is an
integer and the search looks for a solution that beats the incumbent by at
least one unit.

A node is pruned when, for the target value T = incumbent + 1:

* some knapsack cannot reach T even with a fractional greedy fill from the
  remaining items, or
* the knapsacks still short of T need more profit in total than the
  remaining items can deliver fractionally inside their combined free
  capacity.

Two knapsacks with equal capacity, load and profit are interchangeable, so
only the first of them is tried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import Assignment, Instance

DEFAULT_BUDGET = 2_000_000


@dataclass
class ExactResult:
    opt: Fraction
    witness: Assignment
    nodes: int
    optimal: bool = True


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _frac_fill(order, profits, weights, cap):
    """floor of the fractional knapsack value of `order` (density sorted)."""
    total = 0
    for i in order:
        w = weights[i]
        if w <= cap:
            cap -= w
            total += profits[i]
        else:
            if cap > 0:
                total += (profits[i] * cap) // w
            break
    return total


def solve_exact(instance: Instance, budget: int = DEFAULT_BUDGET) -> ExactResult:
    m = instance.m
    items = sorted(instance.items, key=lambda it: (-it.profit, it.id))
    n = len(items)
    pden = _lcm_den([it.profit for it in items])
    wden = _lcm_den([it.weight for it in items] + list(instance.capacities))
    P = [int(it.profit * pden) for it in items]
    W = [int(it.weight * wden) for it in items]
    caps = [int(c * wden) for c in instance.capacities]

    def dens_key(i):
        # density order, heaviest-density first; zero-weight items carry no profit
        return (Fraction(-P[i], W[i]) if W[i] else Fraction(0), items[i].id)

    # suffix[k] = items k.. sorted by density, used by the bounds
    suffix = [sorted(range(k, n), key=dens_key) for k in range(n + 1)]
    rem_profit = [sum(P[k:]) for k in range(n + 1)]

    load = [0] * m
    prof = [0] * m
    where = [-1] * n

    # the empty assignment is always feasible
    best_val = 0
    best_where = [-1] * n
    nodes = 0
    out_of_budget = False

    def bound_ok(k: int, target: int) -> bool:
        order = suffix[k]
        need = 0
        free = 0
        for j in range(m):
            short = target - prof[j]
            if short > 0:
                if _frac_fill(order, P, W, caps[j] - load[j]) < short:
                    return False
                need += short
                free += caps[j] - load[j]
        if need == 0:
            return True
        if need > rem_profit[k]:
            return False
        return _frac_fill(order, P, W, free) >= need

    def search(k: int):
        nonlocal nodes, best_val, best_where, out_of_budget
        if out_of_budget:
            return
        nodes += 1
        if nodes > budget:
            out_of_budget = True
            return
        target = best_val + 1
        if not bound_ok(k, target):
            return
        if k == n:
            best_val = min(prof)
            best_where = list(where)
            return
        seen = set()
        for j in range(m):
            if load[j] + W[k] > caps[j]:
                continue
            state = (caps[j], load[j], prof[j])
            if state in seen:
                continue
            seen.add(state)
            load[j] += W[k]
            prof[j] += P[k]
            where[k] = j
            search(k + 1)
            load[j] -= W[k]
            prof[j] -= P[k]
            where[k] = -1
            if out_of_budget or best_val >= _root_bound:
                return
        if best_val < _root_bound:
            search(k + 1)

    # the root bound caps what any solution can achieve
    _root_bound = _root_upper(P, W, caps, suffix[0])
    search(0)
    bundles = [set() for _ in range(m)]
    for k, j in enumerate(best_where):
        if j >= 0:
            bundles[j].add(items[k].id)
    return ExactResult(Fraction(best_val, pden), Assignment(tuple(bundles)), nodes,
                       optimal=not out_of_budget)


def _root_upper(P, W, caps, order) -> int:
    per = min(_frac_fill(order, P, W, c) for c in caps)
    return min(per, sum(P) // len(caps))
