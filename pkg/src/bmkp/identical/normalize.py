"""Making the critical items of each type the heaviest of their type.

Within one type, a bad pair is a critical item that is lighter than some
non-critical item (in a bundle of at most two items, or unassigned).  The
lightest critical item and the heaviest non-critical item trade places;
bundle sizes do not change, so the critical slots stay where they were.
'Lighter' uses the total order (weight, id).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from ..model import Item
from .labels import is_expensive, is_heavy, label_all, weight_key


def _swap_to_order(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], pool: Iterable[int],
                   type_of: Callable[[int], object]) -> tuple[list[frozenset[int]], list[tuple[int, int]]]:
    out = [set(b) for b in bundles]
    where = {i: j for j, b in enumerate(out) for i in b}
    groups: dict[object, list[int]] = {}
    for i in sorted(pool):
        groups.setdefault(type_of(i), []).append(i)
    swaps = []

    def critical(i):
        return i in where and len(out[where[i]]) >= 3

    for members in groups.values():
        while True:
            crit = [i for i in members if critical(i)]
            non = [i for i in members if not critical(i)]
            if not crit or not non:
                break
            a = min(crit, key=lambda i: weight_key(items[i]))
            b = max(non, key=lambda i: weight_key(items[i]))
            if weight_key(items[a]) >= weight_key(items[b]):
                break
            ja = where.pop(a)
            jb = where.pop(b, None)
            out[ja].discard(a)
            out[ja].add(b)
            where[b] = ja
            if jb is not None:
                out[jb].discard(b)
                out[jb].add(a)
                where[a] = jb
            swaps.append((a, b))
    return [frozenset(b) for b in out], swaps


def normalize_critical_heavy(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T,
                             eps: Fraction) -> tuple[list[frozenset[int]], list[tuple[int, int]]]:
    """Swap critical heavy items with heavier non-critical ones of the same
    label type until none is lighter.  Returns new bundles and the swaps."""
    lab = label_all(items, T, eps)
    pool = [i for i in lab.heavy]
    return _swap_to_order(items, bundles, pool, lambda i: lab.heavy[i].type)


def normalize_critical_light(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T,
                             eps: Fraction) -> tuple[list[frozenset[int]], list[tuple[int, int]]]:
    """Same for light expensive items.  Heavy items are not moved."""
    lab = label_all(items, T, eps)
    pool = [i for i in lab.light]
    return _swap_to_order(items, bundles, pool, lambda i: lab.light[i].type)


def critical_sets(items: Mapping[int, Item], bundle: Iterable[int], eps: Fraction) -> tuple[set[int], set[int]]:
    """(critical heavy, critical light) items of one bundle."""
    b = list(bundle)
    if len(b) < 3:
        return set(), set()
    heavy = {i for i in b if is_heavy(items[i], eps)}
    light = {i for i in b if i not in heavy and is_expensive(items[i], eps)}
    return heavy, light


def rounded_weight_ok(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T,
                      eps: Fraction) -> tuple[bool, int | None]:
    """Bundles of three or more items still fit when every critical item is
    charged its label weight instead of its weight."""
    lab = label_all(items, T, eps)
    for j, b in enumerate(bundles):
        b = list(b)
        if len(b) < 3:
            continue
        H, L = critical_sets(items, b, eps)
        total = sum((items[i].weight for i in b), Fraction(0))
        for i in H | L:
            lw = lab.label_weight(i)
            if lw is None:
                return False, j
            total += lw - items[i].weight
        if total > 1:
            return False, j
    return True, None


def order_ok(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T, eps: Fraction,
             heavy: bool) -> bool:
    """Within each type, every critical item outranks every non-critical one."""
    lab = label_all(items, T, eps)
    labels = lab.heavy if heavy else lab.light
    where = {i: j for j, b in enumerate(bundles) for i in b}
    sizes = [len(list(b)) for b in bundles]
    groups: dict[object, list[int]] = {}
    for i, l in labels.items():
        groups.setdefault(l.type, []).append(i)
    for members in groups.values():
        crit = [weight_key(items[i]) for i in members if i in where and sizes[where[i]] >= 3]
        non = [weight_key(items[i]) for i in members if not (i in where and sizes[where[i]] >= 3)]
        if crit and non and min(crit) < max(non):
            return False
    return True
