"""Seeded generators and brute-force checkers shared by the test modules."""

import itertools
from fractions import Fraction as F

from bmkp.instance_io import SplitMix64
from bmkp.lp_engine import EQ, GE, LE, LinearProgram
from bmkp.model import FractionalAssignment, Item
from bmkp.rounding_kit import MatchGraph, WindowInstance


def random_window_instance(seed: int, max_n=12, max_m=4) -> WindowInstance:
    """Random column-stochastic x, capacities at or above the column weight,
    targets at or below the column profit."""
    rng = SplitMix64(seed)
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    items = tuple(Item(i, F(rng.randint(1, 40), rng.randint(1, 4)), F(rng.randint(1, 40), rng.randint(1, 4)))
                  for i in range(1, n + 1))
    z = {}
    for it in items:
        if rng.randint(0, 5) == 0:
            continue  # item left out
        shares = [rng.randint(0, 3) for _ in range(m)]
        if not any(shares):
            shares[rng.randint(0, m - 1)] = 1
        tot = sum(shares)
        for j, s in enumerate(shares):
            if s:
                z[(it.id, j)] = F(s, tot)
    x = FractionalAssignment(z)
    by = {it.id: it for it in items}
    caps, targets = [], []
    for j in range(m):
        p = sum((by[i].profit * v for (i, k), v in z.items() if k == j), F(0))
        w = sum((by[i].weight * v for (i, k), v in z.items() if k == j), F(0))
        caps.append(w + (F(rng.randint(0, 4), 3) if rng.randint(0, 1) else 0))
        targets.append(p - (F(rng.randint(0, 4), 3) * p / 4 if rng.randint(0, 1) else 0))
    return WindowInstance(items, tuple(targets), tuple(caps), x)


def random_graph(seed: int, max_v=12) -> MatchGraph:
    rng = SplitMix64(seed)
    n = rng.randint(0, max_v)
    dens = rng.randint(1, 9)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.randint(0, 9) < dens]
    return MatchGraph(tuple(range(n)), tuple(edges))


def brute_matching_size(g: MatchGraph) -> int:
    edges = list(g.edges)

    def rec(k, used):
        if k == len(edges):
            return 0
        best = rec(k + 1, used)
        u, v = edges[k]
        if u not in used and v not in used:
            best = max(best, 1 + rec(k + 1, used | {u, v}))
        return best
    return rec(0, frozenset())


def random_gated_system(seed: int):
    """Gates p[i, j] > 0 and demands met by a random fractional point."""
    rng = SplitMix64(seed)
    n = rng.randint(1, 8)
    m = rng.randint(1, 4)
    gates, z = {}, {}
    for i in range(1, n + 1):
        left = F(1)
        for j in range(m):
            if rng.randint(0, 2) == 0:
                continue
            gates[(i, j)] = F(rng.randint(1, 12), rng.randint(1, 3))
            share = left * F(rng.randint(0, 4), 4)
            z[(i, j)] = share
            left -= share
    demands = {}
    for j in range(m):
        cover = sum((gates[k] * v for k, v in z.items() if k[1] == j), F(0))
        demands[j] = cover * F(rng.randint(1, 4), 4)
    return gates, demands


def subsets(xs):
    for r in range(len(xs) + 1):
        yield from itertools.combinations(xs, r)


def gauss(rows, rhs):
    """Unique solution of a square system, or None."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][n] / a[r][r] for r in range(n)]


def vertices(lp):
    """All basic feasible points, by brute force over tight sets."""
    n = lp.num_vars
    hyper = []
    for c in lp.constraints:
        hyper.append(([c.coeffs.get(k, F(0)) for k in range(n)], c.rhs))
    for k in range(n):
        e = [F(int(i == k)) for i in range(n)]
        if lp.lower[k] is not None:
            hyper.append((e, lp.lower[k]))
        if lp.upper[k] is not None:
            hyper.append((e, lp.upper[k]))
    out = set()
    for sub in itertools.combinations(hyper, n):
        x = gauss([h[0] for h in sub], [h[1] for h in sub])
        if x is not None and lp.is_feasible(x):
            out.add(tuple(x))
    return out


def seeded_lp(seed: int, nv=4, nr=5) -> LinearProgram:
    """Small boxed LP with integer data, so it is bounded."""
    rng = SplitMix64(seed)
    lp = LinearProgram()
    for _ in range(rng.randint(1, nv)):
        lp.add_var(0, rng.randint(1, 5))
    for _ in range(rng.randint(0, nr)):
        coeffs = {k: rng.randint(-3, 3) for k in range(lp.num_vars)}
        lp.add_constraint(coeffs, (LE, GE, EQ)[rng.randint(0, 2)], rng.randint(-2, 6))
    lp.maximize({k: rng.randint(-3, 3) for k in range(lp.num_vars)})
    return lp
