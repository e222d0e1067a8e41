"""From a configuration-LP point to a fractional item assignment.

Per capacity class the configuration amounts are spread over the class's
knapsacks by a vertex of the transport system

    sum_C x_Cj = 1 for every knapsack j,   sum_j x_Cj = x_C for every C.

A knapsack whose column is a single configuration at value 1 is integral.
Expensive items are then handed out per profit index u.  Every knapsack
demands, for each weight class c, the amount sum_C x_Cj n_c(C); any item
of index u and weight index <= c may serve it.  Demands are served in
increasing class order from the items sorted by (v, id).  Integral
knapsacks take whole fresh items; fractional ones first finish the one
partly used item, then open fresh ones.  Both kinds together touch at most
i + ceil(f) items up to class c, where i + f is the demand up to c, and
row family (4) bounds that by |E^u_{<=c}|, so every item handed out is
light enough.  Cheap items follow their configuration:
z_ij = sum_C (x_Cj / x_C) y_iC.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ..lp_engine import EQ, LinearProgram, solve_lp, verify_basic
from ..model import FractionalAssignment
from .config_lp import ConfigLpSolution
from .rounding import RoundedInstance

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class AlpSolution:
    z: FractionalAssignment
    # (configuration index, knapsack) -> amount
    transport: dict[tuple[int, int], Fraction]
    integral_knapsacks: frozenset[int]
    extra: dict = field(default_factory=dict)


def transport(sol: ConfigLpSolution, rounded: RoundedInstance, q: int) -> dict[tuple[int, int], Fraction]:
    """A vertex of the transport system of class q."""
    ks = rounded.knapsack_classes()[q]
    cols = [k for k in sol.by_class().get(q, []) if sol.x[k] > 0]
    lp = LinearProgram()
    var = {(k, j): lp.add_var(0, None, f"x[{k},{j}]") for k in cols for j in ks}
    for j in ks:
        lp.add_constraint({var[(k, j)]: 1 for k in cols}, EQ, 1, f"knapsack[{j}]")
    for k in cols:
        lp.add_constraint({var[(k, j)]: 1 for j in ks}, EQ, sol.x[k], f"config[{k}]")
    s = solve_lp(lp)
    assert verify_basic(lp, s), "transport solution is not a vertex"
    return {key: s.values[v] for key, v in var.items() if s.values[v] != 0}


def config_to_assignment(sol: ConfigLpSolution, rounded: RoundedInstance) -> AlpSolution:
    by_q = rounded.knapsack_classes()
    flow: dict[tuple[int, int], Fraction] = {}
    for q in sorted(by_q):
        flow.update(transport(sol, rounded, q))
    integral = frozenset(j for (k, j), v in flow.items() if v == 1)

    # demands[u] = [(class c, integral?, knapsack, amount)]
    demands: dict[int, list] = defaultdict(list)
    for j in range(rounded.m):
        need: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (k, jj), a in flow.items():
            if jj == j:
                for key, n in sol.configs[k].counts:
                    need[key] += a * n
        for (u, c), amt in sorted(need.items()):
            if amt:
                demands[u].append((c, j not in integral, j, amt))

    z: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    items_by_u: dict[int, list] = defaultdict(list)
    for it in rounded.items:
        if it.expensive:
            items_by_u[it.u].append(it)
    for u, dem in demands.items():
        fresh = sorted(items_by_u[u], key=lambda it: (it.v, it.id))
        nxt = 0
        open_item, open_left = None, _ZERO
        for c, fractional, j, amt in sorted(dem, key=lambda d: (d[0], d[1], d[2])):
            if not fractional:
                assert amt.denominator == 1
                for _ in range(int(amt)):
                    it = fresh[nxt]
                    nxt += 1
                    assert it.v <= c, "supply rows violated"
                    z[(it.id, j)] += 1
                continue
            left = amt
            while left > 0:
                if open_item is None or open_left == 0:
                    open_item, open_left = fresh[nxt], _ONE
                    nxt += 1
                assert open_item.v <= c, "supply rows violated"
                take = min(left, open_left)
                z[(open_item.id, j)] += take
                open_left -= take
                left -= take

    for (i, k), yv in sol.y.items():
        if sol.x[k] == 0:
            continue
        for (kk, j), a in flow.items():
            if kk == k:
                z[(i, j)] += a / sol.x[k] * yv
    return AlpSolution(FractionalAssignment(dict(z)), flow, integral)


def fractional_knapsacks(rounded: RoundedInstance, z: FractionalAssignment) -> set[int]:
    """Knapsacks holding some expensive item strictly between 0 and 1."""
    by = rounded.by_id()
    return {j for (i, j), v in z.z.items() if by[i].expensive and v != 1}


def column_totals(rounded: RoundedInstance, z: FractionalAssignment) -> list[tuple[Fraction, Fraction]]:
    by = rounded.by_id()
    out = [[_ZERO, _ZERO] for _ in range(rounded.m)]
    for (i, j), v in z.z.items():
        out[j][0] += by[i].p * v
        out[j][1] += by[i].w * v
    return [(p, w) for p, w in out]


def check_alp(rounded: RoundedInstance, alp: AlpSolution, sol: ConfigLpSolution) -> dict[str, bool]:
    """Assignment-LP rows plus the three structural properties."""
    e = rounded.eps
    by = rounded.by_id()
    z = alp.z
    tot = column_totals(rounded, z)
    item_sum: dict[int, Fraction] = defaultdict(Fraction)
    for (i, _), v in z.z.items():
        item_sum[i] += v
    frac = fractional_knapsacks(rounded, z)
    sizes = defaultdict(int)
    for c in sol.configs:
        sizes[c.q] += 1
    per_q = defaultdict(int)
    for j in frac:
        per_q[rounded.q[j]] += 1
    return {
        "weight": all(w <= rounded.label_caps[j] for j, (_, w) in enumerate(tot)),
        "profit": all(p >= 1 - e for p, _ in tot),
        "item": all(s <= 1 for s in item_sum.values()),
        "box": all(0 <= v <= 1 for v in z.z.values()),
        "integral_small": all(rounded.q[j] not in sol.integral_classes for j in frac),
        "few_fractional": all(per_q[q] <= sizes[q] for q in per_q),
        "fits": all(by[i].w <= rounded.label_caps[j] for (i, j) in z.z if by[i].expensive),
    }
