"""Turning an optimal solution into a slack one with a small profile.

Input bundles have profit >= 1 (capacity 1).  Every bundle is first made
minimal and then cut down so that it keeps room for rounding its critical
items, losing at most 1/3 + eps of profit:

* a bundle whose best one or two items already reach 2/3 - eps keeps just
  those items;
* an all-light bundle that is too full drops one item heavier than eps^3, or
  else a least-dense run of tiny items weighing between eps^3 and 2 eps^3;
* a bundle with a heavy item h drops h when h is worth at most 1/3 + eps,
  and otherwise drops a least-dense set Y of light items with
  eps <= p(Y) <= 1/3 and eps (w(X) - w(h)) <= w(Y) <= eps^2.

Bundles of the last kind are then grouped by floor(p(h)/eps) and sorted by
the weight of h.  In a group of k, the first floor(eps k) bundles are
rebuilt from the removed Y sets, every other bundle takes the heavy item
floor(eps k) places lighter, and every delta-th heavy item becomes part of
the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..model import Item
from .labels import bucket, is_expensive, is_heavy, label_heavy

THIRD = Fraction(1, 3)


class SlackPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class RemovedSet:
    bundle: int
    heavy: int
    items: frozenset[int]
    profit: Fraction
    weight: Fraction
    light_weight: Fraction   # w(X) - w(h) of the bundle it came from


@dataclass
class SlackSolution:
    bundles: list[frozenset[int]]
    # per bundle: None (fewer than 3 items), "light" or the heavy item's id
    witness: list[object]
    profile: frozenset[int] = frozenset()
    removed: list[RemovedSet] = field(default_factory=list)
    steps: list[str] = field(default_factory=list)


def _p(items, S) -> Fraction:
    return sum((items[i].profit for i in S), Fraction(0))


def _w(items, S) -> Fraction:
    return sum((items[i].weight for i in S), Fraction(0))


def minimize_bundle(items: Mapping[int, Item], bundle) -> set[int]:
    """Drop items, cheapest first (ties: lower id), while profit stays >= 1.
    The result is minimal: removing any single item falls below 1."""
    X = set(bundle)
    for i in sorted(X, key=lambda i: (items[i].profit, i)):
        if _p(items, X) - items[i].profit >= 1:
            X.discard(i)
        else:
            break
    return X


def _by_density_up(items, S) -> list[int]:
    return sorted(S, key=lambda i: (items[i].profit / items[i].weight if items[i].weight else Fraction(0), i))


def removed_set(items: Mapping[int, Item], X: set[int], h: int) -> list[int]:
    """Least-dense light items of X adding up to just below the point where
    their profit first exceeds 1/3."""
    prefix: list[int] = []
    total = Fraction(0)
    for i in _by_density_up(items, X - {h}):
        prefix.append(i)
        total += items[i].profit
        if total > THIRD:
            return prefix[:-1]
    raise SlackPreconditionError("light items of the bundle never exceed profit 1/3")


def build_slack_solution(items: Mapping[int, Item], bundles: Sequence[Iterable], eps: Fraction) -> SlackSolution:
    """Items are scaled so the capacity is 1; every bundle must have profit >= 1."""
    eps = Fraction(eps)
    # the tiny-item step needs eps <= (sqrt(105) - 9) / 12
    if eps <= 0 or (12 * eps + 9) ** 2 > 105:
        raise SlackPreconditionError(f"eps = {eps} is too large for the tiny-item removal step")
    m = len(bundles)
    out: list[frozenset[int]] = []
    witness: list[object] = []
    removed: list[RemovedSet] = []
    steps: list[str] = []
    heavy_of: dict[int, int] = {}
    Ys: dict[int, RemovedSet] = {}
    for j, b in enumerate(bundles):
        if _p(items, b) < 1:
            raise SlackPreconditionError(f"bundle {j} has profit {_p(items, b)} < 1")
        X = minimize_bundle(items, b)
        n_exp = sum(1 for i in X if is_expensive(items[i], eps))
        assert n_exp <= 1 / eps, "a minimal bundle holds at most 1/eps expensive items"
        best = sorted(X, key=lambda i: (-items[i].profit, i))
        heavies = [i for i in X if is_heavy(items[i], eps)]
        target = Fraction(2, 3) - eps
        if items[best[0]].profit >= target:
            I, step = {best[0]}, "single"
        elif len(best) >= 2 and items[best[0]].profit + items[best[1]].profit >= target:
            I, step = set(best[:2]), "pair"
        elif heavies:
            assert len(heavies) == 1
            h = heavies[0]
            if items[h].profit <= THIRD + eps:
                I, step = X - {h}, "drop-heavy"
            else:
                Y = removed_set(items, X, h)
                rs = RemovedSet(j, h, frozenset(Y), _p(items, Y), _w(items, Y),
                                _w(items, X) - items[h].weight)
                removed.append(rs)
                Ys[j] = rs
                heavy_of[j] = h
                I, step = X - set(Y), "remove-light-set"
        elif _w(items, X) <= 1 - eps ** 3:
            I, step = X, "light-slack"
        else:
            big = sorted(i for i in X if items[i].profit <= THIRD + eps and items[i].weight > eps ** 3)
            if big:
                I, step = X - {big[0]}, "drop-light"
            else:
                Xc = [i for i in X if items[i].profit <= THIRD + eps]
                Y: list[int] = []
                for i in _by_density_up(items, Xc):
                    Y.append(i)
                    if _w(items, Y) >= eps ** 3:
                        break
                assert eps ** 3 <= _w(items, Y) <= 2 * eps ** 3
                assert _p(items, Y) <= THIRD
                I, step = X - set(Y), "remove-tiny"
        out.append(frozenset(I))
        steps.append(step)

    # group the bundles that went through the light-set removal
    profile: set[int] = set()
    ell = math.ceil(Fraction(2, 3) / eps)
    cap = int(1 / eps)
    groups: dict[int, list[int]] = {}
    for j, h in heavy_of.items():
        groups.setdefault(bucket(items[h].profit, eps), []).append(j)
    for key in sorted(groups):
        js = sorted(groups[key], key=lambda j: (items[heavy_of[j]].weight, heavy_of[j]))
        k = len(js)
        d = math.floor(eps * k)
        hs = [heavy_of[j] for j in js]
        new = {}
        for r in range(d):
            union: set[int] = set()
            for q in range(r * ell, (r + 1) * ell):
                union |= Ys[js[q]].items
            new[js[r]] = _cap_expensive(items, union, eps, cap)
            steps[js[r]] = "refill"
        for r in range(d, k):
            j = js[r]
            new[j] = (out[j] - {hs[r]}) | {hs[r - d]}
            if d:
                steps[j] = "shift"
        for j, b in new.items():
            out[j] = frozenset(b)
        delta = max(1, d)
        profile |= {hs[q * delta - 1] for q in range(1, k // delta + 1)}

    for j in range(m):
        witness.append(_witness(items, out[j], eps))
    return SlackSolution(out, witness, frozenset(profile), removed, steps)


def _cap_expensive(items, S, eps, cap) -> set[int]:
    exp = sorted((i for i in S if is_expensive(items[i], eps)), key=lambda i: (-items[i].profit, i))
    return {i for i in S if not is_expensive(items[i], eps)} | set(exp[:cap])


def _witness(items, b, eps):
    if len(b) < 3:
        return None
    hs = [i for i in b if is_heavy(items[i], eps)]
    if not hs:
        return "light"
    return min(hs)


def check_slack(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], eps: Fraction) -> tuple[bool, int | None]:
    """Every bundle with at least three items satisfies exactly one slack
    condition.  Returns (ok, first offending bundle)."""
    eps = Fraction(eps)
    for j, b in enumerate(bundles):
        b = list(b)
        if len(b) < 3:
            continue
        hs = [i for i in b if is_heavy(items[i], eps)]
        w = _w(items, b)
        cond_light = not hs and w <= 1 - eps ** 3
        cond_heavy = len(hs) == 1 and 1 - w >= eps * (1 - items[hs[0]].weight)
        if cond_light == cond_heavy:
            return False, j
    return True, None


def check_profile(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T, eps: Fraction) -> tuple[bool, int | None]:
    """For every bundle of size >= 3 holding a heavy item h, some profile
    item t in h's profit bucket has
    w(I) - w(h) <= (1-eps)(1-w(t)) <= (1-eps)(1-w(h))."""
    eps = Fraction(eps)
    T = list(T)
    for j, b in enumerate(bundles):
        b = list(b)
        if len(b) < 3:
            continue
        for h in (i for i in b if is_heavy(items[i], eps)):
            rest = _w(items, b) - items[h].weight
            ok = any(bucket(items[t].profit, eps) == bucket(items[h].profit, eps)
                     and rest <= (1 - eps) * (1 - items[t].weight) <= (1 - eps) * (1 - items[h].weight)
                     for t in T)
            if not ok:
                return False, j
    return True, None


def profile_label_bound(items, bundles, T, eps) -> bool:
    """w(I) - w(h) <= (1-eps)(1 - label weight of h) for critical heavy h."""
    for b in bundles:
        if len(b) < 3:
            continue
        for h in (i for i in b if is_heavy(items[i], eps)):
            lab = label_heavy(items[h], T, items, eps)
            if lab.weight is None or _w(items, b) - items[h].weight > (1 - eps) * (1 - lab.weight):
                return False
    return True
