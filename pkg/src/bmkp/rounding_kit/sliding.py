"""Rounding a fractional assignment one knapsack at a time.

Knapsack j is handled against the items not yet placed, sorted by density.
Its fractional column has weight w* and profit p*; on the density profile
we look for a window of length w* whose profit is exactly p*, and give j the
whole items inside it.  The window differs from the column's content by at
most two partially covered items, so j loses at most 2 * p_max.

Items taken by j may still be fractionally spread over later knapsacks.
Those later knapsacks are refunded from j's own leftover pieces: the pieces
ranked before the window (denser) and after it (sparser).  Mixing the two
pools in the right proportion restores each later knapsack's weight and
profit exactly, so the next step starts from a feasible column again.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..model import Assignment, FractionalAssignment, Item

_ZERO = Fraction(0)


class InfeasibleInput(ValueError):
    """The fractional input violates a row it promised to satisfy."""


@dataclass(frozen=True)
class WindowInstance:
    items: tuple[Item, ...]
    targets: tuple[Fraction, ...]
    capacities: tuple[Fraction, ...]
    x: FractionalAssignment

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "targets", tuple(Fraction(t) for t in self.targets))
        object.__setattr__(self, "capacities", tuple(Fraction(b) for b in self.capacities))
        if len(self.targets) != len(self.capacities):
            raise ValueError("targets and capacities differ in length")

    @property
    def m(self) -> int:
        return len(self.capacities)

    def column_totals(self) -> list[tuple[Fraction, Fraction]]:
        """(profit, weight) of every fractional column."""
        items = {it.id: it for it in self.items}
        out = [[_ZERO, _ZERO] for _ in range(self.m)]
        for (i, j), v in self.x.z.items():
            out[j][0] += items[i].profit * v
            out[j][1] += items[i].weight * v
        return [(p, w) for p, w in out]

    def check(self) -> None:
        items = {it.id: it for it in self.items}
        for (i, j) in self.x.z:
            if i not in items:
                raise InfeasibleInput(f"fractional entry for unknown item {i}")
            if not 0 <= j < self.m:
                raise InfeasibleInput(f"fractional entry for knapsack {j} out of range")
        for j, (p, w) in enumerate(self.column_totals()):
            if p < self.targets[j]:
                raise InfeasibleInput(f"knapsack {j}: profit {p} below target {self.targets[j]}")
            if w > self.capacities[j]:
                raise InfeasibleInput(f"knapsack {j}: weight {w} above capacity {self.capacities[j]}")


@dataclass(frozen=True)
class DensityProfile:
    """Items sorted by non-increasing density (ties by id) with prefix sums.

    The step function f is the density of the item covering position x and
    zero past the last item."""

    order: tuple[Item, ...]
    W: tuple[Fraction, ...]   # W[r] = weight of the first r items
    P: tuple[Fraction, ...]   # P[r] = profit of the first r items

    @classmethod
    def of(cls, items: Sequence[Item]) -> "DensityProfile":
        order = sorted((it for it in items if it.weight > 0),
                       key=lambda it: (-it.density, it.id))
        W = [_ZERO]
        P = [_ZERO]
        for it in order:
            W.append(W[-1] + it.weight)
            P.append(P[-1] + it.profit)
        return cls(tuple(order), tuple(W), tuple(P))

    @property
    def total_weight(self) -> Fraction:
        return self.W[-1]

    def density_at(self, x: Fraction) -> Fraction:
        r = bisect.bisect_right(self.W, x)
        if r > len(self.order):
            return _ZERO
        return self.order[r - 1].density

    def cumulative(self, x: Fraction) -> Fraction:
        """Integral of f over [0, x]."""
        if x <= 0:
            return _ZERO
        if x >= self.W[-1]:
            return self.P[-1]
        r = bisect.bisect_right(self.W, x)
        it = self.order[r - 1]
        return self.P[r - 1] + it.density * (x - self.W[r - 1])

    def window_profit(self, y: Fraction, width: Fraction) -> Fraction:
        return self.cumulative(y + width) - self.cumulative(y)


def find_window(profile: DensityProfile, width, target) -> Fraction:
    """Leftmost y >= 0 with window_profit(y, width) == target.

    The window profit is piecewise linear and non-increasing in y, with
    breakpoints at W[r] and W[r] - width, so it is enough to bracket the
    target between two consecutive breakpoints and solve one linear piece.
    """
    width = Fraction(width)
    target = Fraction(target)
    F = lambda y: profile.window_profit(y, width)  # noqa: E731
    f0 = F(_ZERO)
    if f0 < target:
        raise ValueError(f"no window reaches profit {target}: best is {f0}")
    if f0 == target:
        return _ZERO
    cands = {_ZERO}
    for w in profile.W:
        cands.add(w)
        if w - width > 0:
            cands.add(w - width)
    prev, fprev = _ZERO, f0
    for c in sorted(cands)[1:]:
        fc = F(c)
        if fc <= target:
            # F is linear on [prev, c] and F(prev) > target >= F(c)
            return prev + (fprev - target) * (c - prev) / (fprev - fc)
        prev, fprev = c, fc
    raise AssertionError("window profit never reaches zero")  # F(W[last]) == 0


def _whole_items_inside(profile: DensityProfile, y: Fraction, width: Fraction) -> tuple[int, int]:
    """Range [a, b) of profile positions whose items lie inside [y, y + width]."""
    W = profile.W
    a = bisect.bisect_left(W, y)            # first r with W[r] >= y: item r+1 starts there
    b = bisect.bisect_right(W, y + width)   # W[b-1] <= y + width
    # items a+1 .. b-1 (1-based) start at W[r-1] >= y and end at W[r] <= y+width
    return a, max(a, b - 1)


def sliding_round(wi: WindowInstance, check_exchange: bool = True) -> Assignment:
    """Integral assignment with weight_j <= B_j and profit_j >= t_j - 2 p_max.

    Items left over at the end stay unassigned."""
    wi.check()
    items = {it.id: it for it in wi.items}
    m = wi.m
    # x[k] = {item: fraction} for knapsacks still open
    x: list[dict[int, Fraction]] = [dict() for _ in range(m)]
    for (i, j), v in wi.x.z.items():
        if items[i].weight > 0:
            x[j][i] = v
    pool = {i for i, it in items.items() if it.weight > 0}
    bundles: list[frozenset[int]] = []

    def totals(col: Mapping[int, Fraction]) -> tuple[Fraction, Fraction]:
        p = sum((items[i].profit * v for i, v in col.items()), _ZERO)
        w = sum((items[i].weight * v for i, v in col.items()), _ZERO)
        return p, w

    for j in range(m):
        col = x[j]
        x[j] = {}
        if all(v == 1 for v in col.values()):
            chosen = set(col)
        else:
            chosen = _choose(items, pool, col, totals(col))
        pool -= chosen
        bundles.append(frozenset(chosen))
        if j + 1 == m or not chosen:
            continue
        before = [totals(x[k]) for k in range(j + 1, m)] if check_exchange else None
        _exchange(items, pool, col, chosen, x, j)
        if check_exchange:
            after = [totals(x[k]) for k in range(j + 1, m)]
            assert before == after, f"exchange after knapsack {j} changed later columns"
            for k in range(j + 1, m):
                assert all(i in pool for i in x[k]), "exchange used a placed item"
    return Assignment(tuple(bundles))


def _choose(items, pool, col, pw) -> set[int]:
    p_star, w_star = pw
    profile = DensityProfile.of([items[i] for i in pool])
    y = find_window(profile, w_star, p_star)
    a, b = _whole_items_inside(profile, y, w_star)
    return {it.id for it in profile.order[a:b]}


def _exchange(items, pool, col, chosen, x, j) -> None:
    """Move the later knapsacks' shares of `chosen` onto j's leftover pieces."""
    m = len(x)
    owe: dict[int, tuple[Fraction, Fraction]] = {}
    for k in range(j + 1, m):
        dw = dp = _ZERO
        for h in chosen:
            a = x[k].pop(h, None)
            if a:
                dw += items[h].weight * a
                dp += items[h].profit * a
        if dw:
            owe[k] = (dw, dp)
    if not owe:
        return

    order = sorted((items[i] for i in pool | chosen if items[i].weight > 0),
                   key=lambda it: (-it.density, it.id))
    rank = {it.id: r for r, it in enumerate(order)}
    lo = min(rank[h] for h in chosen)
    hi = max(rank[h] for h in chosen)
    left = {i: v for i, v in col.items() if i not in chosen and rank[i] < lo}
    right = {i: v for i, v in col.items() if i not in chosen and rank[i] > hi}
    assert len(left) + len(right) + len(chosen & set(col)) == len(col)

    def pool_stats(pieces):
        w = sum((items[i].weight * v for i, v in pieces.items()), _ZERO)
        p = sum((items[i].profit * v for i, v in pieces.items()), _ZERO)
        return w, p, (p / w if w else _ZERO)

    wl, pl, rl = pool_stats(left)
    wr, pr, rr = pool_stats(right)

    used = {"l": _ZERO, "r": _ZERO}
    for k, (W, P) in owe.items():
        if wl and wr and rl != rr:
            eta = (P - W * rr) / (rl - rr)
            xi = W - eta
        elif wl and wr:
            # both pools have the same density; split in proportion to size
            eta = W * wl / (wl + wr)
            xi = W - eta
        elif wl:
            eta, xi = W, _ZERO
        elif wr:
            eta, xi = _ZERO, W
        else:
            raise AssertionError("deficit with no pieces to refund it from")
        assert eta >= 0 and xi >= 0, "refund needs a negative draw"
        for side, pieces, amount, total in (("l", left, eta, wl), ("r", right, xi, wr)):
            if not amount:
                continue
            share = amount / total
            used[side] += share
            assert used[side] <= 1, "refund pool overdrawn"
            for i, v in pieces.items():
                x[k][i] = x[k].get(i, _ZERO) + v * share
