"""Configurations of expensive items for one capacity class.

A configuration for class q counts how many expensive items of each
profit index u it takes, split by weight class.  Items whose weight index
is below q are priced at index q, so for fixed u the classes are q itself
(collecting every realized v <= q) and each realized v in (q, v(q)].
Only realized (u, v) pairs index a configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rounding import RoundedInstance, label_profit, label_weight, max_weight_index

DEFAULT_CONFIG_CAP = 20_000


class ConfigLimitExceeded(RuntimeError):
    def __init__(self, q: int, count: int, cap: int):
        super().__init__(f"class q={q}: more than {cap} configurations (reached {count})")
        self.q = q
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class Configuration:
    q: int
    vq: int
    # ((u, class index c), count) with q <= c <= vq and count > 0, sorted
    counts: tuple[tuple[tuple[int, int], int], ...]
    profit: Fraction
    weight: Fraction

    @property
    def size(self) -> int:
        return sum(n for _, n in self.counts)

    def count(self, u: int, c: int) -> int:
        for key, n in self.counts:
            if key == (u, c):
                return n
        return 0

    def cum(self, u: int, v: int) -> int:
        """n^u_{<=v}(C): zero below q, frozen at v(q) above it."""
        if v < self.q:
            return 0
        top = min(v, self.vq)
        return sum(n for (uu, c), n in self.counts if uu == u and c <= top)

    def cumulative(self) -> dict[tuple[int, int], int]:
        """The cumulative vector at every class point the configuration uses."""
        out = {}
        for (u, c), _ in self.counts:
            out[(u, c)] = self.cum(u, c)
        return out


def config_classes(rounded: RoundedInstance, q: int) -> list[tuple[int, int, int]]:
    """(u, c, |E^u_{<=c}|) for the merged classes usable in class q."""
    vq = max_weight_index(q, rounded.eps)
    seen = set()
    for it in rounded.items:
        if it.expensive and it.v <= vq:
            seen.add((it.u, max(it.v, q)))
    return [(u, c, rounded.count_le(u, c)) for u, c in sorted(seen)]


def config_of(rounded: RoundedInstance, q: int, counts: dict[tuple[int, int], int]) -> Configuration:
    e = rounded.eps
    vq = max_weight_index(q, e)
    clean = tuple(sorted((k, n) for k, n in counts.items() if n))
    profit = sum((n * label_profit(u, e) for (u, _), n in clean), Fraction(0))
    weight = sum((n * label_weight(c, e) for (_, c), n in clean), Fraction(0))
    return Configuration(q, vq, clean, profit, weight)


def in_class(rounded: RoundedInstance, conf: Configuration) -> bool:
    """Membership test for C_q: cumulative caps, at most 1/eps items and
    weight within (1+eps)^q."""
    e = rounded.eps
    if conf.size > 1 / e or conf.weight > (1 + e) ** conf.q:
        return False
    for (u, c), n in conf.counts:
        if n < 0 or c < conf.q or c > conf.vq:
            return False
        if conf.cum(u, c) > rounded.count_le(u, c):
            return False
    return True


def enumerate_configs(rounded: RoundedInstance, q: int, cap: int = DEFAULT_CONFIG_CAP) -> list[Configuration]:
    """All of C_q over realized types.  Raises ConfigLimitExceeded past `cap`."""
    e = rounded.eps
    classes = config_classes(rounded, q)
    limit_items = int(1 / e)
    limit_weight = (1 + e) ** q
    lw = [label_weight(c, e) for _, c, _ in classes]
    out: list[Configuration] = []
    counts: dict[tuple[int, int], int] = {}
    cum: dict[int, int] = {}

    def rec(k: int, items_left: int, weight_left: Fraction):
        if k == len(classes):
            out.append(config_of(rounded, q, counts))
            if len(out) > cap:
                raise ConfigLimitExceeded(q, len(out), cap)
            return
        u, c, supply = classes[k]
        base = cum.get(u, 0)
        n = 0
        while True:
            counts[(u, c)] = n
            cum[u] = base + n
            rec(k + 1, items_left - n, weight_left - n * lw[k])
            n += 1
            if n > items_left or base + n > supply or n * lw[k] > weight_left:
                break
        counts.pop((u, c), None)
        cum[u] = base

    rec(0, limit_items, limit_weight)
    out.sort(key=lambda cf: (cf.size, cf.counts))
    return out
