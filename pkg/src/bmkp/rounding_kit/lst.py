"""Turning a gated covering LP into a nearly integral assignment.

The system is

    sum_i p[i, j] x[i, j] >= d[j]   for every knapsack j
    sum_j x[i, j]         <= 1      for every item i
    x >= 0,  x[i, j] only where the gate (i, j) is open

At a vertex every connected component of the fractional support has no more
edges than vertices, so it is a tree or a tree plus one edge.  Orienting
each component so every item points at one knapsack (parent pointers in a
tree, the cycle direction on the unique cycle) lets every item be rounded up
to 1 on its chosen knapsack.  Each knapsack then keeps at most one edge it
did not win; that edge stays at its LP value and is the caller's to delete.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..lp_engine import GE, LE, BasicSolution, LinearProgram, solve_lp, verify_basic

_ZERO = Fraction(0)
_ONE = Fraction(1)


class NotAVertex(ValueError):
    pass


@dataclass
class GatedLp:
    lp: LinearProgram
    var: dict[tuple[int, int], int]
    demand_rows: dict[int, int] = field(default_factory=dict)


def gated_lp(gates: Mapping[tuple[int, int], Fraction], demands: Mapping[int, Fraction]) -> GatedLp:
    """LP over the open gates.  The objective minimizes total assigned mass,
    which keeps vertices sparse."""
    lp = LinearProgram()
    var = {}
    for key in sorted(gates):
        var[key] = lp.add_var(0, None, f"x[{key[0]},{key[1]}]")
    by_item = defaultdict(dict)
    by_knap = defaultdict(dict)
    for (i, j), v in var.items():
        by_item[i][v] = _ONE
        if gates[(i, j)]:
            by_knap[j][v] = Fraction(gates[(i, j)])
    rows = {}
    for j in sorted(demands):
        rows[j] = lp.add_constraint(by_knap.get(j, {}), GE, demands[j], f"profit[{j}]")
    for i in sorted(by_item):
        lp.add_constraint(by_item[i], LE, 1, f"item[{i}]")
    lp.minimize({v: _ONE for v in var.values()})
    return GatedLp(lp, var, rows)


@dataclass
class LstResult:
    x: dict[tuple[int, int], Fraction]
    # knapsack -> (item, LP value) of the single edge it gave up, if any
    leftover: dict[int, tuple[int, Fraction]]
    lp_solution: BasicSolution

    def integral_part(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = defaultdict(set)
        for (i, j), v in self.x.items():
            if v == 1:
                out[j].add(i)
        return dict(out)


def lst_reduce(gates: Mapping[tuple[int, int], Fraction], demands: Mapping[int, Fraction],
               basic: BasicSolution | None = None) -> LstResult:
    """Solve (or take) a vertex of the gated LP and round it.

    Raises lp_engine.Infeasible when no fractional solution exists.  In the
    returned x every knapsack row is still satisfied, every entry is 0, 1 or
    the LP value of that knapsack's single leftover edge, and each item is 1
    on at most one knapsack."""
    g = gated_lp(gates, demands)
    sol = basic if basic is not None else solve_lp(g.lp)
    if not verify_basic(g.lp, sol):
        raise NotAVertex("solution is not a vertex of the gated LP")
    val = {key: sol.values[v] for key, v in g.var.items() if sol.values[v] != 0}
    x = {key: v for key, v in val.items() if v == 1}
    frac = [key for key, v in val.items() if v != 1]

    owner = _orient(frac)
    leftover: dict[int, tuple[int, Fraction]] = {}
    for (i, j) in frac:
        if owner[i] == j:
            x[(i, j)] = _ONE
        else:
            if j in leftover:
                raise NotAVertex(f"knapsack {j} would give up two edges")
            leftover[j] = (i, val[(i, j)])
            x[(i, j)] = val[(i, j)]
    return LstResult(x, leftover, sol)


def _orient(edges: list[tuple[int, int]]) -> dict[int, int]:
    """Pick one knapsack per item so that every knapsack misses at most one
    of its edges.  Vertices are ('i', item) and ('k', knapsack)."""
    adj: dict[tuple, list[tuple]] = defaultdict(list)
    for i, j in sorted(edges):
        adj[("i", i)].append(("k", j))
        adj[("k", j)].append(("i", i))
    owner: dict[int, int] = {}
    seen: set[tuple] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp = _component(adj, start)
        seen |= comp
        n_edges = sum(len(adj[v]) for v in comp) // 2
        if n_edges > len(comp):
            raise NotAVertex("fractional support has a component with two cycles")
        roots: list[tuple] = []
        parent: dict[tuple, tuple | None] = {}
        if n_edges == len(comp):
            cycle = _find_cycle(adj, comp)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if a[0] == "i":
                    owner[a[1]] = b[1]
            roots = cycle
        else:
            roots = [min(v for v in comp if v[0] == "k")]
        for r in roots:
            parent[r] = None
        q = deque(roots)
        while q:
            v = q.popleft()
            for u in adj[v]:
                if u not in parent:
                    parent[u] = v
                    if u[0] == "i":
                        owner[u[1]] = v[1]
                    q.append(u)
    return owner


def _component(adj, start) -> set:
    comp = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in comp:
                comp.add(u)
                stack.append(u)
    return comp


def _find_cycle(adj, comp) -> list:
    """The unique cycle of a connected unicyclic graph, by peeling leaves."""
    deg = {v: len(adj[v]) for v in comp}
    leaves = deque(v for v in comp if deg[v] == 1)
    alive = set(comp)
    while leaves:
        v = leaves.popleft()
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] == 1:
                    leaves.append(u)
    start = min(alive)
    cycle = [start]
    prev, cur = None, start
    while True:
        nxt = next(u for u in adj[cur] if u in alive and u != prev)
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    return cycle
