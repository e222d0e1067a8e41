"""Seeded desk-scale instance families used by the benchmarks and tests.

* ``desk``: identical capacities, n <= 12, m <= 3.  Half plain random
  instances, half planted ones whose bundles carry a near-full heavy item
  plus light items, or one large light item plus tiny ones.
* ``arb-desk``: arbitrary capacities, n <= 12, m <= 4, at most three
  distinct capacities.  All but one knapsack are planted with a single
  valuable item; the last one holds a bundle of items each worth well
  under a sixth of the bundle, drawn from at most three (profit, weight)
  prototypes plus a few cheap fillers.
"""

from __future__ import annotations

from fractions import Fraction

from .instance_io import SplitMix64, gen_random
from .model import ARBITRARY, IDENTICAL, Instance, Item


def planted_identical(seed: int, eps=Fraction(1, 10), m: int | None = None) -> Instance:
    """Capacity 1.  Each planted bundle is either a heavy item of weight
    above 1 - eps^2 with profit 40..55 plus light items of total weight
    below its slack, or an all-light bundle filled to exactly 1 by one
    large item and tiny items of weight eps^3."""
    e = Fraction(eps)
    rng = SplitMix64(seed)
    if m is None:
        m = rng.randint(2, 3)
    per = 12 // m
    items = []
    iid = 1
    for _ in range(m):
        k = rng.randint(max(3, per - 2), per)
        if rng.randint(0, 2):
            slack = e * e * Fraction(rng.randint(1, 9), 10)
            items.append(Item(iid, rng.randint(40, 55), 1 - slack))
            iid += 1
            for _ in range(k - 1):
                items.append(Item(iid, rng.randint(8, 20), slack * Fraction(rng.randint(1, 8), 10 * k)))
                iid += 1
        else:
            tiny = e ** 3
            items.append(Item(iid, rng.randint(40, 52), 1 - (k - 1) * tiny))
            iid += 1
            for _ in range(k - 1):
                items.append(Item(iid, rng.randint(8, 16), tiny))
                iid += 1
    return Instance(tuple(items), (Fraction(1),) * m, IDENTICAL)


def planted_tight(seed: int, eps=Fraction(1, 10)) -> Instance:
    """Bundles where no one or two items reach 2/3 - eps of the bundle.
    Either two knapsacks, each a heavy item worth 44 plus five light
    items worth 11 or 12, or one knapsack, a light item worth 44
    just under 1 - eps^2 plus eleven items of weight eps^3 worth 5 or 6."""
    e = Fraction(eps)
    rng = SplitMix64(seed)
    items = []
    if rng.randint(0, 1):
        iid = 1
        for _ in range(2):
            slack = e * e * Fraction(rng.randint(5, 9), 10)
            items.append(Item(iid, 44, 1 - slack))
            iid += 1
            for _ in range(5):
                items.append(Item(iid, rng.randint(11, 12), slack * Fraction(rng.randint(1, 9), 50)))
                iid += 1
        return Instance(tuple(items), (Fraction(1),) * 2, IDENTICAL)
    tiny = e ** 3
    items.append(Item(1, 44, 1 - e * e - tiny * Fraction(rng.randint(1, 9), 10)))
    for iid in range(2, 13):
        items.append(Item(iid, rng.randint(5, 6), tiny))
    return Instance(tuple(items), (Fraction(1),), IDENTICAL)


def desk_identical(count: int, seed: int = 0) -> list[Instance]:
    out = []
    for k in range(count):
        s = seed * 1_000_003 + k
        if k % 4 == 3:
            out.append(planted_tight(s))
        elif k % 2:
            out.append(planted_identical(s))
        else:
            rng = SplitMix64(s)
            n = rng.randint(6, 12)
            m = rng.randint(2, 3)
            out.append(gen_random(n, m, (1, 30), (1, 30), IDENTICAL, seed=s))
    return out


def planted_arbitrary(seed: int) -> Instance:
    rng = SplitMix64(seed)
    m = rng.randint(2, 4)
    n_rest = 12 - (m - 1)
    items, caps = [], []
    iid = 1
    small = rng.randint(15, 25)
    for _ in range(m - 1):
        items.append(Item(iid, rng.randint(100, 140), rng.randint(8, small)))
        iid += 1
        caps.append(small if rng.randint(0, 1) else small + 5)
    protos = [(rng.randint(11, 14), rng.randint(4, 9)) for _ in range(rng.randint(1, 3))]
    n_exp = rng.randint(7, min(8, n_rest))
    load = 0
    for k in range(n_exp):
        p, w = protos[k % len(protos)]
        items.append(Item(iid, p, w))
        iid += 1
        load += w
    for _ in range(n_rest - n_exp):
        w = rng.randint(1, 4)
        items.append(Item(iid, rng.randint(3, 9), w))
        iid += 1
        load += w
    caps.append(load)
    return Instance(tuple(items), tuple(sorted(caps)), ARBITRARY)


def desk_arbitrary(count: int, seed: int = 0) -> list[Instance]:
    return [planted_arbitrary(seed * 1_000_003 + k) for k in range(count)]


def random_arbitrary(count: int, seed: int = 0) -> list[Instance]:
    out = []
    for k in range(count):
        s = seed * 1_000_003 + k
        rng = SplitMix64(s)
        out.append(gen_random(rng.randint(5, 10), rng.randint(2, 3), (1, 30), (1, 30), ARBITRARY, seed=s))
    return out


SUITES = {
    "desk": (IDENTICAL, desk_identical),
    "arb-desk": (ARBITRARY, desk_arbitrary),
}
