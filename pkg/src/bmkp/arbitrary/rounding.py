"""Power-grid rounding of profits, weights and capacities.

For an expensive item (p >= eps) the label profit is eps (1+eps)^u with u
the largest integer below p, and the label weight eps^2 (1+eps^2)^v with v
the smallest integer covering w.  Cheap items keep their values.  A
knapsack of capacity B gets label capacity (1+eps)^(t+1) where t is the
smallest integer with B <= (1+eps)^t; its class index is q = t + 1.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..model import Assignment, Instance, epsilon


class RoundingPreconditionError(RuntimeError):
    """A rounded bundle is too heavy to be carried back to the original."""


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def floor_log(x: Fraction, base: Fraction) -> int:
    """Largest k with base**k <= x, for x > 0 and base > 1."""
    if x <= 0 or base <= 1:
        raise ValueError("need x > 0 and base > 1")
    k = math.floor(_log(x) / _log(base))
    while base ** k > x:
        k -= 1
    while base ** (k + 1) <= x:
        k += 1
    return k


def ceil_log(x: Fraction, base: Fraction) -> int:
    """Smallest k with x <= base**k."""
    k = floor_log(x, base)
    return k if base ** k == x else k + 1


def profit_index(p: Fraction, eps: Fraction) -> int:
    return floor_log(p / eps, 1 + eps)


def weight_index(w: Fraction, eps: Fraction) -> int:
    return ceil_log(w / (eps * eps), 1 + eps * eps)


def capacity_index(b: Fraction, eps: Fraction) -> int:
    """q with label capacity (1+eps)^q, i.e. one above the covering power."""
    return ceil_log(b, 1 + eps) + 1


def label_profit(u: int, eps: Fraction) -> Fraction:
    return eps * (1 + eps) ** u


def label_weight(v: int, eps: Fraction) -> Fraction:
    return eps * eps * (1 + eps * eps) ** v


def max_weight_index(q: int, eps: Fraction) -> int:
    """v(q): the largest weight index whose label weight fits (1+eps)^q."""
    return floor_log((1 + eps) ** q / (eps * eps), 1 + eps * eps)


@dataclass(frozen=True)
class RoundedItem:
    id: int
    profit: Fraction
    weight: Fraction
    p: Fraction
    w: Fraction
    u: int | None = None
    v: int | None = None

    @property
    def expensive(self) -> bool:
        return self.u is not None


@dataclass(frozen=True)
class RoundedInstance:
    eps: Fraction
    items: tuple[RoundedItem, ...]
    capacities: tuple[Fraction, ...]
    label_caps: tuple[Fraction, ...]
    q: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.capacities)

    def by_id(self) -> dict[int, RoundedItem]:
        return {it.id: it for it in self.items}

    def expensive(self) -> list[RoundedItem]:
        return [it for it in self.items if it.expensive]

    def cheap(self) -> list[RoundedItem]:
        return [it for it in self.items if not it.expensive]

    @property
    def U(self) -> tuple[int, ...]:
        return tuple(sorted({it.u for it in self.items if it.expensive}))

    @property
    def V(self) -> tuple[int, ...]:
        return tuple(sorted({it.v for it in self.items if it.expensive}))

    @property
    def Q(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.q)))

    def knapsack_classes(self) -> dict[int, list[int]]:
        """K_q: knapsack indices per capacity class, in index order."""
        out: dict[int, list[int]] = defaultdict(list)
        for j, q in enumerate(self.q):
            out[q].append(j)
        return dict(out)

    def type_counts(self) -> dict[tuple[int, int], int]:
        """|E^u_v| for every realized (u, v)."""
        out: dict[tuple[int, int], int] = defaultdict(int)
        for it in self.items:
            if it.expensive:
                out[(it.u, it.v)] += 1
        return dict(out)

    def count_le(self, u: int, v: int) -> int:
        """|E^u_{<=v}|."""
        return sum(1 for it in self.items if it.expensive and it.u == u and it.v <= v)

    def bundle_profit(self, bundle: Iterable[int]) -> Fraction:
        by = self.by_id()
        return sum((by[i].p for i in bundle), Fraction(0))

    def bundle_weight(self, bundle: Iterable[int]) -> Fraction:
        by = self.by_id()
        return sum((by[i].w for i in bundle), Fraction(0))


def round_item(it, eps: Fraction) -> RoundedItem:
    if it.profit >= eps:
        u = profit_index(it.profit, eps)
        v = weight_index(it.weight, eps)
        return RoundedItem(it.id, it.profit, it.weight, label_profit(u, eps), label_weight(v, eps), u, v)
    return RoundedItem(it.id, it.profit, it.weight, it.profit, it.weight)


def round_instance(instance: Instance, eps) -> RoundedInstance:
    """Label values for a normalized instance (profits scaled by the guess)."""
    e = epsilon(eps)
    items = tuple(round_item(it, e) for it in instance.items)
    if any(b <= 0 for b in instance.capacities):
        raise ValueError("rounding needs positive capacities")
    qs = tuple(capacity_index(b, e) for b in instance.capacities)
    caps = tuple((1 + e) ** q for q in qs)
    return RoundedInstance(e, items, instance.capacities, caps, qs)


def slack_cap(rounded: RoundedInstance, j: int) -> Fraction:
    return (1 - 2 * rounded.eps) * rounded.label_caps[j]


def to_original(rounded: RoundedInstance, bundles) -> Assignment:
    """Carry a rounded solution back.  Every bundle must stay within
    (1 - 2 eps) of its label capacity, which implies the original fit."""
    bundles = tuple(frozenset(b) for b in bundles)
    if len(bundles) != rounded.m:
        raise RoundingPreconditionError(f"expected {rounded.m} bundles, got {len(bundles)}")
    for j, b in enumerate(bundles):
        w = rounded.bundle_weight(b)
        if w > slack_cap(rounded, j):
            raise RoundingPreconditionError(
                f"knapsack {j}: rounded weight {w} exceeds {slack_cap(rounded, j)}")
    return Assignment(bundles)
