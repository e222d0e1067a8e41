"""Making room before the expensive items are rounded.

Every knapsack whose expensive entries are integral gives up a donor set:
the minimum-density prefix of its (item, fraction) pieces, stopped as soon
as it reaches 3 eps of the knapsack's profit.  What stays keeps more than
half the profit inside (1 - 3 eps) of the old weight.

The knapsacks with fractional expensive entries are sorted by label
capacity (ties by index) and each bundle moves tau places up, where the
capacity is at least 1/eps^2 times larger.  The first min(k, tau) of them
are left empty and each is refilled with s donor sets taken from the
smallest knapsacks.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ..model import FractionalAssignment
from .assignment import column_totals, fractional_knapsacks
from .rounding import RoundedInstance

_ZERO = Fraction(0)


class DonorShortage(RuntimeError):
    """Not enough small integral knapsacks to refill the emptied ones."""


@dataclass(frozen=True)
class Constants:
    tau: int
    s: int
    delta: int
    L: int
    eta: int


def constants(eps: Fraction, eta: int) -> Constants:
    """tau: smallest with (1+eps)^tau >= eps^(-2 eta); s = ceil(1/(3 eps));
    delta: smallest with (1+eps)^delta >= s / (1 - 2 eps); L = tau s + delta."""
    e = Fraction(eps)
    base = 1 + e
    tau = 0
    goal = (1 / e) ** (2 * eta)
    while base ** tau < goal:
        tau += 1
    s = math.ceil(1 / (3 * e))
    delta = 0
    while base ** delta < Fraction(s) / (1 - 2 * e):
        delta += 1
    return Constants(tau, s, delta, tau * s + delta, eta)


@dataclass
class ShiftPlan:
    constants: Constants
    order: tuple[int, ...]
    # target knapsack -> source knapsack for the shifted bundles
    moves: dict[int, int]
    # emptied knapsack -> donor knapsacks whose sets it receives
    refills: dict[int, tuple[int, ...]]
    donor_sets: dict[int, tuple[tuple[int, Fraction], ...]] = field(default_factory=dict)


def density_key(rounded: RoundedInstance):
    by = rounded.by_id()

    def key(piece):
        it = by[piece[0]]
        return (it.p / it.w, it.id)
    return key


def donor_set(rounded: RoundedInstance, col: dict[int, Fraction]) -> list[tuple[int, Fraction]]:
    """Minimum-density prefix of the pieces reaching 3 eps of the column
    profit.  Weightless pieces carry no profit and are never taken."""
    by = rounded.by_id()
    pieces = sorted(((i, v) for i, v in col.items() if by[i].w > 0), key=density_key(rounded))
    total = sum((by[i].p * v for i, v in col.items()), _ZERO)
    goal = 3 * rounded.eps * total
    out, got = [], _ZERO
    for i, v in pieces:
        if got >= goal:
            break
        out.append((i, v))
        got += by[i].p * v
    return out


def check_donor(rounded: RoundedInstance, col: dict[int, Fraction], d) -> bool:
    by = rounded.by_id()
    e = rounded.eps
    p_all = sum((by[i].p * v for i, v in col.items()), _ZERO)
    w_all = sum((by[i].w * v for i, v in col.items()), _ZERO)
    p_d = sum((by[i].p * v for i, v in d), _ZERO)
    w_d = sum((by[i].w * v for i, v in d), _ZERO)
    return 3 * e * p_all <= p_d < p_all / 2 and w_d >= 3 * e * w_all


def shift_and_compensate(z: FractionalAssignment, rounded: RoundedInstance, consts: Constants,
                         ) -> tuple[FractionalAssignment, ShiftPlan]:
    e = rounded.eps
    cols: dict[int, dict[int, Fraction]] = defaultdict(dict)
    for (i, j), v in z.z.items():
        cols[j][i] = v
    frac = fractional_knapsacks(rounded, z)
    integral = [j for j in range(rounded.m) if j not in frac]

    donors = {}
    for j in integral:
        d = donor_set(rounded, cols[j])
        assert check_donor(rounded, cols[j], d), f"donor bounds fail on knapsack {j}"
        donors[j] = tuple(d)

    order = tuple(sorted(frac, key=lambda j: (rounded.label_caps[j], j)))
    k = len(order)
    tau, s = consts.tau, consts.s
    moves = {order[r]: order[r - tau] for r in range(tau, k)}
    emptied = order[:min(k, tau)]
    for r in range(len(order) - tau):
        assert rounded.label_caps[order[r]] <= e * e * rounded.label_caps[order[r + tau]], \
            "fractional knapsacks too close in capacity"

    need = len(emptied) * s
    pool = sorted(integral, key=lambda j: (rounded.label_caps[j], j))[:need]
    if len(pool) < need:
        raise DonorShortage(f"need {need} donor knapsacks, have {len(pool)} integral ones")
    refills = {}
    for r, j in enumerate(emptied):
        group = tuple(pool[r * s:(r + 1) * s])
        for u in group:
            if rounded.label_caps[u] > (1 - 2 * e) / s * rounded.label_caps[j]:
                raise DonorShortage(f"donor knapsack {u} too large for knapsack {j}")
        refills[j] = group

    new: dict[tuple[int, int], Fraction] = {}
    for j in integral:
        gone = {i for i, _ in donors[j]}
        for i, v in cols[j].items():
            if i not in gone:
                new[(i, j)] = v
    for tgt, src in moves.items():
        for i, v in cols[src].items():
            new[(i, tgt)] = v
    for j, group in refills.items():
        for u in group:
            for i, v in donors[u]:
                # two donors may hold pieces of the same cheap item
                new[(i, j)] = new.get((i, j), _ZERO) + v
    plan = ShiftPlan(consts, order, moves, refills, donors)
    return FractionalAssignment(new), plan


def dichotomy(rounded: RoundedInstance, z: FractionalAssignment) -> list[bool]:
    """Per knapsack: integral expensive entries with weight <= (1-2eps)B and
    profit >= 1/2 - eps, or fractional ones with weight <= eps^2 B, profit
    >= 1 - eps and every expensive item of weight <= eps^2 B."""
    e = rounded.eps
    by = rounded.by_id()
    frac = fractional_knapsacks(rounded, z)
    tot = column_totals(rounded, z)
    out = []
    for j, (p, w) in enumerate(tot):
        cap = rounded.label_caps[j]
        if j in frac:
            small = all(by[i].w <= e * e * cap for (i, jj) in z.z if jj == j and by[i].expensive)
            out.append(w <= e * e * cap and p >= 1 - e and small)
        else:
            out.append(w <= (1 - 2 * e) * cap and p >= Fraction(1, 2) - e)
    return out
