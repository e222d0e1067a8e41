"""Item classes, rounded labels and types for the equal-capacity algorithm.

All functions work on an instance scaled so that the capacity is 1 and the
optimum (or its guess) is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..model import Item


def is_heavy(it: Item, eps: Fraction) -> bool:
    return it.weight >= 1 - eps * eps


def is_expensive(it: Item, eps: Fraction) -> bool:
    return it.profit >= eps


def bucket(p: Fraction, eps: Fraction) -> int:
    return math.floor(p / eps)


def weight_key(it: Item):
    """Total order used wherever 'heavier' has to break ties: weight, then id."""
    return (it.weight, it.id)


@dataclass(frozen=True)
class HeavyLabel:
    weight: Fraction | None   # None stands for +infinity
    profit: Fraction
    rep: int | None           # the profile item that supplied the label

    @property
    def type(self):
        return ("H", self.weight, self.profit)


@dataclass(frozen=True)
class LightLabel:
    weight: Fraction
    profit: Fraction
    scale: Fraction           # W(e)

    @property
    def type(self):
        return ("L", self.weight, self.profit)


def label_heavy(h: Item, T: Iterable[int], items: Mapping[int, Item], eps: Fraction) -> HeavyLabel:
    """Lightest profile item in h's profit bucket that is at least as heavy
    as h.  Ties go to the lower id."""
    b = bucket(h.profit, eps)
    fits = [items[t] for t in T if bucket(items[t].profit, eps) == b and items[t].weight >= h.weight]
    if not fits:
        return HeavyLabel(None, Fraction(0), None)
    t = min(fits, key=lambda x: (x.weight, x.id))
    return HeavyLabel(t.weight, t.profit, t.id)


def light_scale(e: Item, T: Iterable[int], items: Mapping[int, Item], eps: Fraction) -> Fraction:
    fits = [items[t] for t in T if e.weight <= 1 - items[t].weight]
    if not fits:
        return eps ** 3
    t = max(fits, key=lambda x: (x.weight, -x.id))
    lab = label_heavy(t, T, items, eps)
    assert lab.weight is not None  # t labels itself at worst
    return eps * (1 - lab.weight)


def label_light(e: Item, T: Iterable[int], items: Mapping[int, Item], eps: Fraction) -> LightLabel:
    W = light_scale(e, T, items, eps)
    step = eps * W
    w = math.ceil(e.weight / step) * step
    p = math.floor(e.profit / (eps * eps)) * eps * eps
    return LightLabel(Fraction(w), Fraction(p), W)


@dataclass
class Labeling:
    """Labels for every expensive item under a fixed profile."""

    T: frozenset[int]
    heavy: dict[int, HeavyLabel]
    light: dict[int, LightLabel]

    def type_of(self, i: int):
        if i in self.heavy:
            return self.heavy[i].type
        return self.light[i].type

    def label_weight(self, i: int) -> Fraction | None:
        if i in self.heavy:
            return self.heavy[i].weight
        return self.light[i].weight

    def members(self) -> dict[tuple, list[int]]:
        out: dict[tuple, list[int]] = {}
        for i in list(self.heavy) + list(self.light):
            out.setdefault(self.type_of(i), []).append(i)
        return out


def label_all(items: Mapping[int, Item], T: Iterable[int], eps: Fraction) -> Labeling:
    T = frozenset(T)
    heavy = {}
    light = {}
    for i, it in items.items():
        if not is_expensive(it, eps):
            continue
        if is_heavy(it, eps):
            heavy[i] = label_heavy(it, T, items, eps)
        else:
            light[i] = label_light(it, T, items, eps)
    return Labeling(T, heavy, light)
