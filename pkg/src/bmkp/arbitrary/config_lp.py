"""The configuration LP and its exact post-hoc check.

Variables: x_C for every configuration of every class, and y_iC for every
cheap item i and configuration C.  Rows:

    (1) sum_{C in C_q} x_C = |K_q|                         for every q
    (2) sum_i p(i) y_iC >= (1 - eps - p(C)) x_C            for every C
    (3) sum_i w(i) y_iC <= ((1+eps)^q - w(C)) x_C          for every C
    (4) sum_C n^u_{<=v}(C) x_C <= |E^u_{<=v}|              for every u, v
    (5) sum_C y_iC <= 1                                     for every cheap i

Row family (4) runs over every threshold in V and Q, using the clamped
cumulative count of each configuration.  That is exactly the Hall
condition for serving each demanded weight class with items that are no
heavier, which is what the conversion to an assignment relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..lp_engine import EQ, GE, LE, Infeasible, LinearProgram, solve_milp
from .configs import Configuration, config_of, in_class
from .rounding import RoundedInstance

_ZERO = Fraction(0)


class ConfigLpInfeasible(Infeasible):
    """No feasible point: the profit guess is too high."""


@dataclass
class ConfigLpSolution:
    configs: list[Configuration]
    x: list[Fraction]
    # (cheap item id, configuration index) -> value, nonzero entries only
    y: dict[tuple[int, int], Fraction]
    integral_classes: tuple[int, ...] = ()
    nodes: int = 0
    extra: dict = field(default_factory=dict)

    def by_class(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, c in enumerate(self.configs):
            out.setdefault(c.q, []).append(k)
        return out


def thresholds(rounded: RoundedInstance) -> list[tuple[int, int]]:
    """(u, v) pairs for row family (4)."""
    pts = sorted(set(rounded.V) | set(rounded.Q))
    return [(u, v) for u in rounded.U for v in pts]


def build_lp(rounded: RoundedInstance, configs: list[Configuration]):
    """Returns (lp, x variable ids, y variable ids keyed (item, config))."""
    e = rounded.eps
    classes = rounded.knapsack_classes()
    cheap = rounded.cheap()
    lp = LinearProgram()
    xv = [lp.add_var(0, None, f"x[{k}]") for k in range(len(configs))]
    yv = {}
    for k in range(len(configs)):
        for it in cheap:
            yv[(it.id, k)] = lp.add_var(0, 1, f"y[{it.id},{k}]")
    for q in sorted(classes):
        row = {xv[k]: 1 for k, c in enumerate(configs) if c.q == q}
        lp.add_constraint(row, EQ, len(classes[q]), f"count[{q}]")
    for k, c in enumerate(configs):
        prow = {yv[(it.id, k)]: it.p for it in cheap if it.p}
        prow[xv[k]] = -(1 - e - c.profit)
        lp.add_constraint(prow, GE, 0, f"profit[{k}]")
        wrow = {yv[(it.id, k)]: it.w for it in cheap if it.w}
        wrow[xv[k]] = -((1 + e) ** c.q - c.weight)
        lp.add_constraint(wrow, LE, 0, f"weight[{k}]")
    seen = set()
    for u, v in thresholds(rounded):
        row = {xv[k]: c.cum(u, v) for k, c in enumerate(configs) if c.cum(u, v)}
        if not row:
            continue
        rhs = rounded.count_le(u, v)
        key = (tuple(sorted(row.items())), rhs)
        if key in seen:
            continue
        seen.add(key)
        lp.add_constraint(row, LE, rhs, f"supply[{u},{v}]")
    for it in cheap:
        lp.add_constraint({yv[(it.id, k)]: 1 for k in range(len(configs))}, LE, 1, f"once[{it.id}]")
    return lp, xv, yv


def solve_config_lp(rounded: RoundedInstance, configs: list[Configuration], L: int,
                    node_budget: int = 10_000) -> ConfigLpSolution:
    """Feasible point with x_C integral on the min(L, |Q|) smallest classes."""
    Q = rounded.Q
    small = tuple(Q[:max(0, min(L, len(Q)))])
    lp, xv, yv = build_lp(rounded, configs)
    ints = [xv[k] for k, c in enumerate(configs) if c.q in small]
    try:
        sol = solve_milp(lp, ints, node_budget)
    except Infeasible as exc:
        raise ConfigLpInfeasible(None, f"configuration LP infeasible: {exc}") from None
    x = [sol.values[v] for v in xv]
    y = {key: sol.values[v] for key, v in yv.items() if sol.values[v] != 0}
    return ConfigLpSolution(list(configs), x, y, small, getattr(sol, "nodes", 0))


def check_config_lp(rounded: RoundedInstance, sol: ConfigLpSolution) -> list[str]:
    """Every violated row family, checked exactly.  Empty means feasible."""
    e = rounded.eps
    bad = []
    by = rounded.by_id()
    classes = rounded.knapsack_classes()
    configs = sol.configs
    for k, c in enumerate(configs):
        if not in_class(rounded, c):
            bad.append(f"configuration {k} is not in C_{c.q}")
        if sol.x[k] < 0:
            bad.append(f"x[{k}] negative")
        if c.q in sol.integral_classes and sol.x[k].denominator != 1:
            bad.append(f"x[{k}] not integral in class {c.q}")
    for q in classes:
        if sum((sol.x[k] for k, c in enumerate(configs) if c.q == q), _ZERO) != len(classes[q]):
            bad.append(f"(1) class {q}")
    for k, c in enumerate(configs):
        yp = sum((by[i].p * v for (i, kk), v in sol.y.items() if kk == k), _ZERO)
        yw = sum((by[i].w * v for (i, kk), v in sol.y.items() if kk == k), _ZERO)
        if yp < (1 - e - c.profit) * sol.x[k]:
            bad.append(f"(2) configuration {k}")
        if yw > ((1 + e) ** c.q - c.weight) * sol.x[k]:
            bad.append(f"(3) configuration {k}")
    for u, v in thresholds(rounded):
        used = sum((c.cum(u, v) * sol.x[k] for k, c in enumerate(configs)), _ZERO)
        if used > rounded.count_le(u, v):
            bad.append(f"(4) u={u} v={v}")
    tot: dict[int, Fraction] = {}
    for (i, _), v in sol.y.items():
        if by[i].expensive:
            bad.append(f"y set for expensive item {i}")
        if not 0 <= v <= 1:
            bad.append(f"y[{i}] outside [0, 1]")
        tot[i] = tot.get(i, _ZERO) + v
    bad.extend(f"(5) item {i}" for i, s in tot.items() if s > 1)
    return bad


def witness_solution(rounded: RoundedInstance, bundles, configs: list[Configuration]) -> ConfigLpSolution:
    """The integral point read off a rounded solution: x_C counts knapsacks
    using C and y_iC = 1 when cheap item i sits next to configuration C.
    Each bundle must hold at most 1/eps expensive items."""
    index = {(c.q, c.counts): k for k, c in enumerate(configs)}
    by = rounded.by_id()
    x = [_ZERO] * len(configs)
    y = {}
    for j, b in enumerate(bundles):
        q = rounded.q[j]
        counts: dict[tuple[int, int], int] = {}
        for i in b:
            it = by[i]
            if it.expensive:
                key = (it.u, max(it.v, q))
                counts[key] = counts.get(key, 0) + 1
        conf = config_of(rounded, q, counts)
        k = index.get((q, conf.counts))
        if k is None:
            raise ValueError(f"bundle {j} uses a configuration outside C_{q}")
        x[k] += 1
        for i in b:
            if not by[i].expensive:
                y[(i, k)] = Fraction(1)
    return ConfigLpSolution(list(configs), x, y, rounded.Q)
