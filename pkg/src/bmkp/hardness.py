"""Restricted numerical 3-dimensional matching and its reduction to BMKP.

An RN3DM instance is a multiset U = (u_1..u_n) and a target t.  It is a
yes-instance when permutations v, w of 1..n exist with u_j + v(j) + w(j) = t
for every j.  The reduction creates two unit-profit items of each weight
i in 1..n (ids 2i-1 and 2i) and one knapsack of capacity t - u_j per row.
The yes-instances are exactly those whose reduced instance has optimum 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .instance_io import ParseError, SplitMix64
from .model import ARBITRARY, Assignment, Instance, Item, validate


class NotDecodable(ValueError):
    pass


@dataclass(frozen=True)
class Rn3dmInstance:
    u: tuple[int, ...]
    t: int

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        if any(x < 0 for x in self.u):
            raise ValueError("U must hold non-negative integers")

    @property
    def n(self) -> int:
        return len(self.u)

    def balanced(self) -> bool:
        n = self.n
        return sum(self.u) + n * (n + 1) == n * self.t


@dataclass(frozen=True)
class Reduction:
    instance: Instance
    # row_of[k] = the RN3DM row j whose knapsack sits at sorted position k
    row_of: tuple[int, ...]

    def knapsack_of_row(self) -> dict[int, int]:
        return {j: k for k, j in enumerate(self.row_of)}


def item_weight(item_id: int) -> int:
    return (item_id + 1) // 2


def reduce(r: Rn3dmInstance, strict: bool = True) -> Reduction:
    """Build the BMKP instance.  Capacities are sorted, so the row order is
    kept in `row_of`.  With strict=False unbalanced inputs are accepted
    (used to build perturbed no-instances)."""
    if strict and not r.balanced():
        raise ValueError("RN3DM instance violates sum(U) + n(n+1) = n t")
    n = r.n
    if n < 1:
        raise ValueError("RN3DM needs n >= 1")
    caps = [r.t - u for u in r.u]
    if any(c < 0 for c in caps):
        raise ValueError("some u_j exceeds t")
    items = []
    for i in range(1, n + 1):
        items.append(Item(2 * i - 1, 1, i))
        items.append(Item(2 * i, 1, i))
    order = sorted(range(n), key=lambda j: (caps[j], j))
    inst = Instance(tuple(items), tuple(Fraction(caps[j]) for j in order), ARBITRARY)
    return Reduction(inst, tuple(order))


def decode(red: Reduction, a: Assignment) -> tuple[list[int], list[int]]:
    """Recover (v, w) from a value-2 solution by two-colouring items.

    Items sharing a knapsack are joined by a partner edge and the two items
    of equal weight by a same-weight edge.  Every vertex then has degree 1
    or 2.  A knapsack holding both copies of a weight forms an isolated
    edge; the rest are even cycles alternating the two edge kinds, coloured
    alternately starting with red on the lowest id of each component.  The
    red weight of row j is v(j) and the blue one w(j).
    """
    inst = red.instance
    if not validate(inst, a).ok:
        raise NotDecodable("assignment is not feasible")
    if any(len(b) != 2 for b in a.bundles):
        raise NotDecodable("every knapsack must hold exactly two items")
    n = len(red.row_of)
    partner: dict[int, int] = {}
    for b in a.bundles:
        x, y = sorted(b)
        partner[x], partner[y] = y, x
    if len(partner) != 2 * n:
        raise NotDecodable("some item is unassigned")

    def twin(i: int) -> int:
        return i + 1 if i % 2 else i - 1

    color: dict[int, str] = {}
    for start in sorted(partner):
        if start in color:
            continue
        if partner[start] == twin(start):
            # degree one after merging the parallel edges
            color[start], color[partner[start]] = "red", "blue"
            continue
        # walk the cycle: partner edge, same-weight edge, partner edge, ...
        cur, c = start, "red"
        use_partner = True
        while cur not in color:
            color[cur] = c
            cur = partner[cur] if use_partner else twin(cur)
            use_partner = not use_partner
            c = "blue" if c == "red" else "red"
        if color[start] != c:
            raise NotDecodable("odd cycle in the partner graph")
    v = [0] * n
    w = [0] * n
    for k, b in enumerate(a.bundles):
        row = red.row_of[k]
        for i in b:
            if color[i] == "red":
                v[row] = item_weight(i)
            else:
                w[row] = item_weight(i)
    return v, w


def partner_components(a: Assignment) -> list[int]:
    """Sizes of the cycles left after peeling same-knapsack twins.  Each
    should be even; exposed for tests of that fact."""
    partner: dict[int, int] = {}
    for b in a.bundles:
        if len(b) == 2:
            x, y = sorted(b)
            partner[x], partner[y] = y, x

    def twin(i):
        return i + 1 if i % 2 else i - 1

    sizes = []
    seen: set[int] = set()
    for s in sorted(partner):
        if s in seen or partner[s] == twin(s):
            seen.add(s)
            continue
        size = 0
        cur, use_partner = s, True
        while cur not in seen:
            seen.add(cur)
            size += 1
            cur = partner[cur] if use_partner else twin(cur)
            use_partner = not use_partner
        sizes.append(size)
    return sizes


def verify(r: Rn3dmInstance, v, w) -> bool:
    n = r.n
    want = list(range(1, n + 1))
    if sorted(v) != want or sorted(w) != want:
        return False
    return all(r.u[j] + v[j] + w[j] == r.t for j in range(n))


def gen_yes(n: int, seed: int, slack: int = 2) -> tuple[Rn3dmInstance, list[int], list[int]]:
    """A yes-instance together with the permutations that certify it.
    t is max_j (v(j) + w(j)) plus a random extra in [0, slack]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = SplitMix64(seed)
    v = list(range(1, n + 1))
    w = list(range(1, n + 1))
    rng.shuffle(v)
    rng.shuffle(w)
    t = max(a + b for a, b in zip(v, w)) + rng.randint(0, slack)
    u = tuple(t - a - b for a, b in zip(v, w))
    return Rn3dmInstance(u, t), v, w


def perturb(r: Rn3dmInstance) -> Rn3dmInstance:
    """Raise u_1 by one, which breaks the sum identity by exactly one."""
    return Rn3dmInstance((r.u[0] + 1,) + r.u[1:], r.t)


# ------------------------------------------------------------------ file form

def dumps_rn3dm(r: Rn3dmInstance) -> str:
    return f"t: {r.t}\nU: {' '.join(str(u) for u in r.u)}\n"


def loads_rn3dm(text: str) -> Rn3dmInstance:
    """Two lines, ``t: <int>`` and ``U: <ints>``, in either order.  Blank
    lines and lines starting with # are ignored."""
    fields: dict[str, tuple[int, str]] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("t", "U"):
            raise ParseError(f"expected 't: <int>' or 'U: <ints>', got {line!r}", ln)
        if key in fields:
            raise ParseError(f"duplicate {key} line", ln)
        fields[key] = (ln, rest)
    for key in ("t", "U"):
        if key not in fields:
            raise ParseError(f"missing {key} line")
    ln, rest = fields["t"]
    try:
        t = int(rest.strip())
    except ValueError:
        raise ParseError(f"t must be an integer, got {rest.strip()!r}", ln, "t") from None
    ln, rest = fields["U"]
    try:
        u = tuple(int(x) for x in rest.split())
    except ValueError:
        raise ParseError("U must hold integers", ln, "U") from None
    try:
        return Rn3dmInstance(u, t)
    except ValueError as e:
        raise ParseError(str(e), ln, "U") from None


def write_rn3dm(r: Rn3dmInstance, path) -> None:
    Path(path).write_text(dumps_rn3dm(r), encoding="utf-8")


def read_rn3dm(path) -> Rn3dmInstance:
    return loads_rn3dm(Path(path).read_text(encoding="utf-8"))
