"""Guessing the critical items.

A guess is a profile T plus one configuration per knapsack.  A
configuration lists the types of the critical items that knapsack holds:
at most one heavy type and a multiset of light types.  From a guess the
critical sets are rebuilt the same way whether the guess was enumerated or
read off a known solution:

* per type, the heaviest items (by weight, then id) are the critical ones,
  as many as the configurations ask for;
* the critical heavy items go to knapsacks 0, 1, ... in type order and the
  configurations are matched to knapsacks by heavy type with a maximum
  matching (it has to be perfect);
* each light type in a knapsack's configuration takes the lowest-id unused
  critical item of that type.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from ..model import Item
from ..rounding_kit.matching import MatchGraph, max_matching
from .labels import Labeling, label_all, weight_key
from .normalize import critical_sets

NO_HEAVY = ()


@dataclass(frozen=True)
class GuessState:
    T: frozenset[int]
    configs: tuple            # sorted tuple of (heavy type or (), sorted light types)
    H: tuple[frozenset[int], ...]
    L: tuple[frozenset[int], ...]

    @property
    def key(self):
        return (tuple(sorted(self.T)), self.configs)


@dataclass
class EnumerationReport:
    produced: int = 0
    exhausted: bool = False
    budget: int = 0


def config_of(lab: Labeling, items: Mapping[int, Item], bundle: Iterable[int], eps: Fraction):
    H, L = critical_sets(items, bundle, eps)
    if len(H) > 1:
        raise ValueError("a bundle holds two heavy items")
    heavy = lab.heavy[next(iter(H))].type if H else NO_HEAVY
    if heavy != NO_HEAVY and heavy[1] is None:
        raise ValueError("a critical heavy item has no profile label")
    light = tuple(sorted(lab.light[i].type for i in L))
    return (heavy, light)


def build_guess(items: Mapping[int, Item], eps: Fraction, T, configs: Sequence,
                lab: Labeling | None = None) -> GuessState | None:
    """Critical sets for a profile and a configuration multiset, or None when
    the instance cannot supply them."""
    T = frozenset(T)
    lab = lab or label_all(items, T, eps)
    configs = tuple(sorted(configs))
    m = len(configs)
    members = lab.members()
    need = Counter()
    for heavy, light in configs:
        if heavy != NO_HEAVY:
            need[heavy] += 1
        need.update(light)
    chosen: dict[tuple, list[int]] = {}
    for typ, cnt in need.items():
        pool = members.get(typ, [])
        if len(pool) < cnt:
            return None
        chosen[typ] = sorted(pool, key=lambda i: weight_key(items[i]), reverse=True)[:cnt]

    heavy_items = sorted((i for typ, ids in chosen.items() if typ[0] == "H" for i in ids),
                         key=lambda i: (lab.heavy[i].type, i))
    if len(heavy_items) > m:
        return None
    H = [frozenset([i]) for i in heavy_items] + [frozenset()] * (m - len(heavy_items))

    edges = []
    for j in range(m):
        want = lab.heavy[next(iter(H[j]))].type if H[j] else NO_HEAVY
        for c, (heavy, _) in enumerate(configs):
            if heavy == want:
                edges.append((("k", j), ("c", c)))
    verts = tuple([("k", j) for j in range(m)] + [("c", c) for c in range(m)])
    match = max_matching(MatchGraph(verts, tuple(edges)))
    if len(match) < m:
        return None
    conf_of = {}
    for e in match:
        c, k = sorted(e)  # ("c", .) sorts before ("k", .)
        conf_of[k[1]] = c[1]

    unused = {typ: sorted(ids) for typ, ids in chosen.items() if typ[0] == "L"}
    L = []
    for j in range(m):
        _, light = configs[conf_of[j]]
        got = set()
        for typ in light:
            got.add(unused[typ].pop(0))
        L.append(frozenset(got))
    return GuessState(T, configs, tuple(H), tuple(L))


def guess_from_solution(items: Mapping[int, Item], bundles: Sequence[Iterable[int]], T,
                        eps: Fraction) -> GuessState:
    """The guess that a normalized slack solution corresponds to."""
    lab = label_all(items, T, eps)
    configs = [config_of(lab, items, b, eps) for b in bundles]
    g = build_guess(items, eps, T, configs, lab)
    if g is None:
        raise ValueError("solution does not yield a consistent guess")
    return g


def enumerate_guesses(items: Mapping[int, Item], eps: Fraction, m: int, budget: int,
                      report: EnumerationReport | None = None,
                      max_profile: int | None = None) -> Iterator[GuessState]:
    """All guesses in a fixed order: profiles by size then ids, and for each
    profile every multiset of m configurations the items can supply.  Stops
    after `budget` guesses; `report` says whether the space was exhausted."""
    rep = report if report is not None else EnumerationReport()
    rep.budget = budget
    cap = int(1 / Fraction(eps))
    if budget <= 0:
        rep.exhausted = False
        return
    base = label_all(items, (), eps)
    heavy_ids = sorted(base.heavy)
    sizes = range(0, (len(heavy_ids) if max_profile is None else min(max_profile, len(heavy_ids))) + 1)
    for size in sizes:
        for T in itertools.combinations(heavy_ids, size):
            lab = label_all(items, T, eps)
            avail = Counter(lab.type_of(i) for i in list(lab.heavy) + list(lab.light))
            heavy_types = sorted(t for t in avail if t[0] == "H" and t[1] is not None)
            light_types = sorted(t for t in avail if t[0] == "L")
            configs = _configs(heavy_types, light_types, avail, cap)
            for multiset in _multisets(configs, m, avail):
                g = build_guess(items, eps, T, multiset, lab)
                if g is None:
                    continue
                if rep.produced >= budget:
                    return
                rep.produced += 1
                yield g
    rep.exhausted = True


def _configs(heavy_types, light_types, avail, cap) -> list:
    out = []
    for heavy in [NO_HEAVY] + heavy_types:
        room = cap - (0 if heavy == NO_HEAVY else 1)
        for size in range(0, room + 1):
            for light in itertools.combinations_with_replacement(light_types, size):
                c = Counter(light)
                if all(c[t] <= avail[t] for t in c):
                    out.append((heavy, light))
    return sorted(out)


def _multisets(configs, m, avail) -> Iterator[tuple]:
    used = Counter()

    def rec(start, left, acc):
        if left == 0:
            yield tuple(acc)
            return
        for k in range(start, len(configs)):
            heavy, light = configs[k]
            add = Counter(light)
            if heavy != NO_HEAVY:
                add[heavy] += 1
            if any(used[t] + c > avail[t] for t, c in add.items()):
                continue
            used.update(add)
            acc.append(configs[k])
            yield from rec(k, left - 1, acc)
            acc.pop()
            used.subtract(add)

    yield from rec(0, m, [])
