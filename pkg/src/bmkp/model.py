"""Core data types for the bottleneck multiple knapsack problem.

Every profit, weight and capacity is a :class:`fractions.Fraction`.  Floats
only show up when results are formatted for humans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

IDENTICAL = "identical"
ARBITRARY = "arbitrary"


class MalformedAssignment(ValueError):
    """An assignment refers to items the instance does not have."""


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and 'p/q' strings.  Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise ValueError(f"decimal literal {x!r} is not an exact rational")
        return Fraction(s)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def epsilon(x) -> Fraction:
    """Validate an accuracy parameter: 0 < eps <= 1 and 1/eps an integer."""
    e = as_fraction(x)
    if e <= 0 or e > 1 or e.numerator != 1:
        raise ValueError(f"epsilon must be 1/k for a positive integer k, got {e}")
    return e


@dataclass(frozen=True)
class Item:
    id: int
    profit: Fraction
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "profit", as_fraction(self.profit))
        object.__setattr__(self, "weight", as_fraction(self.weight))
        if self.profit < 0 or self.weight < 0:
            raise ValueError(f"item {self.id}: negative profit or weight")
        if self.weight == 0 and self.profit != 0:
            raise ValueError(f"item {self.id}: zero-weight items must have zero profit")

    @property
    def density(self) -> Fraction:
        if self.weight == 0:
            return Fraction(0)
        return self.profit / self.weight


@dataclass(frozen=True)
class Instance:
    items: tuple[Item, ...]
    capacities: tuple[Fraction, ...]
    kind: str = ARBITRARY

    def __post_init__(self):
        items = tuple(self.items)
        caps = tuple(as_fraction(c) for c in self.capacities)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "capacities", caps)
        if self.kind not in (IDENTICAL, ARBITRARY):
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if not caps:
            raise ValueError("an instance needs at least one knapsack")
        if any(c < 0 for c in caps):
            raise ValueError("negative capacity")
        if any(a > b for a, b in zip(caps, caps[1:])):
            raise ValueError("capacities must be sorted non-decreasingly")
        if self.kind == IDENTICAL and caps[0] != caps[-1]:
            raise ValueError("identical instance with different capacities")
        seen = set()
        for it in items:
            if it.id in seen:
                raise ValueError(f"duplicate item id {it.id}")
            seen.add(it.id)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def m(self) -> int:
        return len(self.capacities)

    def item(self, item_id: int) -> Item:
        return self.by_id()[item_id]

    def by_id(self) -> dict[int, Item]:
        # cheap enough at the sizes we run; kept off the frozen dataclass fields
        return {it.id: it for it in self.items}

    def total_profit(self) -> Fraction:
        return sum((it.profit for it in self.items), Fraction(0))


@dataclass(frozen=True)
class Assignment:
    """One set of item ids per knapsack.  Items may be left out."""

    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))

    @classmethod
    def empty(cls, m: int) -> "Assignment":
        return cls(tuple(frozenset() for _ in range(m)))

    def assigned(self) -> set[int]:
        out: set[int] = set()
        for b in self.bundles:
            out |= b
        return out

    def knapsack_of(self) -> dict[int, int]:
        return {i: j for j, b in enumerate(self.bundles) for i in b}


@dataclass(frozen=True)
class FractionalAssignment:
    """Sparse z[(item id, knapsack index)] with values in [0, 1]."""

    z: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: as_fraction(v) for k, v in dict(self.z).items() if v != 0}
        for (i, j), v in clean.items():
            if v < 0 or v > 1:
                raise ValueError(f"z[{i},{j}] = {v} outside [0, 1]")
        totals: dict[int, Fraction] = {}
        for (i, _), v in clean.items():
            totals[i] = totals.get(i, Fraction(0)) + v
        for i, s in totals.items():
            if s > 1:
                raise ValueError(f"item {i} is assigned {s} > 1 in total")
        object.__setattr__(self, "z", clean)

    def column(self, j: int) -> dict[int, Fraction]:
        return {i: v for (i, k), v in self.z.items() if k == j}

    def is_integral(self) -> bool:
        return all(v == 1 for v in self.z.values())


@dataclass
class ValidationReport:
    overlaps: list[int] = field(default_factory=list)
    unknown: list[int] = field(default_factory=list)
    # (knapsack index, weight - capacity) for every overfull knapsack
    excess: list[tuple[int, Fraction]] = field(default_factory=list)
    wrong_length: bool = False

    @property
    def ok(self) -> bool:
        return not (self.overlaps or self.unknown or self.excess or self.wrong_length)

    def __bool__(self) -> bool:
        return self.ok


def bundle_profit(items: Mapping[int, Item], bundle: Iterable[int]) -> Fraction:
    return sum((items[i].profit for i in bundle), Fraction(0))


def bundle_weight(items: Mapping[int, Item], bundle: Iterable[int]) -> Fraction:
    return sum((items[i].weight for i in bundle), Fraction(0))


def evaluate(instance: Instance, a: Assignment) -> Fraction:
    """Minimum bundle profit.  Does not check capacities."""
    items = instance.by_id()
    if len(a.bundles) != instance.m:
        raise MalformedAssignment(f"expected {instance.m} bundles, got {len(a.bundles)}")
    for b in a.bundles:
        for i in b:
            if i not in items:
                raise MalformedAssignment(f"unknown item id {i}")
    return min(bundle_profit(items, b) for b in a.bundles)


def validate(instance: Instance, a: Assignment) -> ValidationReport:
    items = instance.by_id()
    rep = ValidationReport()
    if len(a.bundles) != instance.m:
        rep.wrong_length = True
    seen: set[int] = set()
    for b in a.bundles:
        for i in sorted(b):
            if i not in items:
                rep.unknown.append(i)
            elif i in seen:
                rep.overlaps.append(i)
            seen.add(i)
    for j, (b, cap) in enumerate(zip(a.bundles, instance.capacities)):
        w = sum((items[i].weight for i in b if i in items), Fraction(0))
        if w > cap:
            rep.excess.append((j, w - cap))
    return rep


@dataclass(frozen=True)
class Scaling:
    """Record of a normalization: original = scaled * factor."""

    profit_factor: Fraction
    weight_factor: Fraction


def normalize(instance: Instance, opt_guess) -> tuple[Instance, Scaling]:
    """Scale weights and capacities so the smallest capacity is 1, then profits
    so that `opt_guess` becomes 1."""
    g = as_fraction(opt_guess)
    if g <= 0:
        raise ValueError("opt_guess must be positive")
    b1 = instance.capacities[0]
    if b1 <= 0:
        raise ValueError("cannot normalize an instance with a zero capacity")
    items = tuple(Item(it.id, it.profit / g, it.weight / b1) for it in instance.items)
    caps = tuple(c / b1 for c in instance.capacities)
    return Instance(items, caps, instance.kind), Scaling(g, b1)


def denormalize_value(value: Fraction, scaling: Scaling) -> Fraction:
    return value * scaling.profit_factor


@dataclass(frozen=True)
class ItemClass:
    heavy: bool
    expensive: bool
    density: Fraction


def classify_item(it: Item, eps: Fraction, identical: bool = True) -> ItemClass:
    heavy = identical and it.weight >= 1 - eps * eps
    return ItemClass(heavy=heavy, expensive=it.profit >= eps, density=it.density)


def classify(instance: Instance, eps) -> dict[int, ItemClass]:
    e = epsilon(eps)
    ident = instance.kind == IDENTICAL
    return {it.id: classify_item(it, e, ident) for it in instance.items}


def sub_instance(instance: Instance, keep_items: Sequence[int] | None = None,
                 keep_knapsacks: Sequence[int] | None = None) -> Instance:
    ids = set(keep_items) if keep_items is not None else None
    items = tuple(it for it in instance.items if ids is None or it.id in ids)
    caps = instance.capacities
    if keep_knapsacks is not None:
        caps = tuple(instance.capacities[j] for j in keep_knapsacks)
    return Instance(items, caps, instance.kind)


def fill_greedily(instance: Instance, a: Assignment) -> Assignment:
    """Add unassigned items, most profitable first (ties by id), each to the
    poorest knapsack (ties by index) that still has room.  Never lowers a
    bundle's profit."""
    items = instance.by_id()
    bundles = [set(b) for b in a.bundles]
    prof = [bundle_profit(items, b) for b in bundles]
    room = [c - bundle_weight(items, b) for c, b in zip(instance.capacities, bundles)]
    used = a.assigned()
    for it in sorted((it for it in instance.items if it.id not in used), key=lambda it: (-it.profit, it.id)):
        fits = [j for j in range(instance.m) if room[j] >= it.weight]
        if not fits:
            continue
        j = min(fits, key=lambda j: (prof[j], j))
        bundles[j].add(it.id)
        prof[j] += it.profit
        room[j] -= it.weight
    return Assignment(tuple(frozenset(b) for b in bundles))
