"""Exact rational simplex and a small branch-and-bound MILP layer.

The tableau is stored as sparse dict rows of Fractions.  Pivoting uses the
largest-coefficient rule and falls back to Bland's rule whenever the method
stalls on degenerate pivots, so it cannot cycle.  Results are basic feasible
solutions; :func:`verify_basic` checks the vertex property independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

LE, GE, EQ = "<=", ">=", "=="
_SENSES = (LE, GE, EQ)
_ZERO = Fraction(0)
_ONE = Fraction(1)

# Number of consecutive degenerate pivots tolerated before switching to Bland.
_STALL = 30


class LpError(Exception):
    pass


class Infeasible(LpError):
    """No point satisfies the constraints.  `certificate` proves it."""

    def __init__(self, certificate: "FarkasCertificate | None" = None, msg: str = "infeasible"):
        super().__init__(msg)
        self.certificate = certificate


class Unbounded(LpError):
    def __init__(self, ray: list[Fraction] | None = None):
        super().__init__("unbounded")
        self.ray = ray


class BudgetExceeded(LpError):
    def __init__(self, best: "MilpSolution | None", nodes: int):
        super().__init__(f"node budget exhausted after {nodes} nodes")
        self.best = best
        self.nodes = nodes


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    sense: str
    rhs: Fraction
    name: str | None = None


class LinearProgram:
    """Variables with bounds, linear rows, and an optional objective."""

    def __init__(self):
        self.lower: list[Fraction | None] = []
        self.upper: list[Fraction | None] = []
        self.names: list[str] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, Fraction] = {}
        self.sense: str | None = None  # "max", "min" or None for feasibility

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    def add_var(self, lower=0, upper=None, name: str | None = None) -> int:
        lo = None if lower is None else Fraction(lower)
        hi = None if upper is None else Fraction(upper)
        if lo is not None and hi is not None and lo > hi:
            raise ValueError("empty variable range")
        self.lower.append(lo)
        self.upper.append(hi)
        self.names.append(name or f"x{len(self.names)}")
        return len(self.lower) - 1

    def add_constraint(self, coeffs: Mapping[int, object], sense: str, rhs, name=None) -> int:
        if sense not in _SENSES:
            raise ValueError(f"bad relation {sense!r}")
        row = {}
        for k, v in coeffs.items():
            if not 0 <= k < self.num_vars:
                raise ValueError(f"row references undeclared variable {k}")
            v = Fraction(v)
            if v:
                row[k] = row.get(k, _ZERO) + v
        self.constraints.append(Constraint(row, sense, Fraction(rhs), name))
        return len(self.constraints) - 1

    def maximize(self, coeffs: Mapping[int, object]):
        self.objective = {k: Fraction(v) for k, v in coeffs.items() if v}
        self.sense = "max"

    def minimize(self, coeffs: Mapping[int, object]):
        self.objective = {k: Fraction(v) for k, v in coeffs.items() if v}
        self.sense = "min"

    def copy(self) -> "LinearProgram":
        lp = LinearProgram()
        lp.lower = list(self.lower)
        lp.upper = list(self.upper)
        lp.names = list(self.names)
        lp.constraints = self.constraints  # rows are never mutated
        lp.objective = dict(self.objective)
        lp.sense = self.sense
        return lp

    def objective_value(self, values: Sequence[Fraction]) -> Fraction:
        return sum((c * values[k] for k, c in self.objective.items()), _ZERO)

    def is_feasible(self, values: Sequence[Fraction]) -> bool:
        return not self.violations(values)

    def violations(self, values: Sequence[Fraction]) -> list[str]:
        out = []
        for k, x in enumerate(values):
            lo, hi = self.lower[k], self.upper[k]
            if lo is not None and x < lo:
                out.append(f"{self.names[k]} below lower bound")
            if hi is not None and x > hi:
                out.append(f"{self.names[k]} above upper bound")
        for r, c in enumerate(self.constraints):
            lhs = sum((a * values[k] for k, a in c.coeffs.items()), _ZERO)
            if (c.sense == LE and lhs > c.rhs) or (c.sense == GE and lhs < c.rhs) or (
                    c.sense == EQ and lhs != c.rhs):
                out.append(f"row {c.name or r}: {lhs} {c.sense} {c.rhs} fails")
        return out

    def dump(self) -> str:
        """Human readable listing, handy when debugging a model."""
        def term(k, a):
            return f"{a} {self.names[k]}"
        lines = []
        if self.sense:
            obj = " + ".join(term(k, a) for k, a in sorted(self.objective.items())) or "0"
            lines.append(f"{self.sense} {obj}")
        for r, c in enumerate(self.constraints):
            lhs = " + ".join(term(k, a) for k, a in sorted(c.coeffs.items())) or "0"
            lines.append(f"  {c.name or 'r%d' % r}: {lhs} {c.sense} {c.rhs}")
        for k in range(self.num_vars):
            lines.append(f"  {self.lower[k]} <= {self.names[k]} <= {self.upper[k]}")
        return "\n".join(lines)


@dataclass
class FarkasCertificate:
    """Multipliers proving infeasibility.

    Signs follow the row orientation: >= rows and lower bounds get
    non-negative multipliers, <= rows and upper bounds non-positive ones.
    The weighted sum of all rows has zero coefficients and a positive
    right-hand side.
    """

    rows: dict[int, Fraction] = field(default_factory=dict)
    lower: dict[int, Fraction] = field(default_factory=dict)
    upper: dict[int, Fraction] = field(default_factory=dict)


@dataclass
class BasicSolution:
    values: list[Fraction]
    objective: Fraction | None
    tight: list[tuple[str, int]]
    pivots: int = 0


@dataclass
class MilpSolution(BasicSolution):
    nodes: int = 0
    optimal: bool = True


# ---------------------------------------------------------------- standard form

class _Std:
    """min c.x'  s.t.  A x' (+ slack) = b,  x' >= 0, with b >= 0."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        n = lp.num_vars
        # each original variable: (offset, [(column, sign)])
        self.var_map: list[tuple[Fraction, list[tuple[int, int]]]] = []
        ncol = 0
        for k in range(n):
            lo, hi = lp.lower[k], lp.upper[k]
            if lo is not None:
                self.var_map.append((lo, [(ncol, 1)]))
                ncol += 1
            elif hi is not None:
                self.var_map.append((hi, [(ncol, -1)]))
                ncol += 1
            else:
                self.var_map.append((_ZERO, [(ncol, 1), (ncol + 1, -1)]))
                ncol += 2
        self.n_struct = ncol
        # rows: (coeffs over structural cols, kappa, rhs, origin)
        # origin = ("row", r) or ("upper", k)
        rows = []
        for r, c in enumerate(lp.constraints):
            coeffs: dict[int, Fraction] = {}
            rhs = c.rhs
            for k, a in c.coeffs.items():
                off, cols = self.var_map[k]
                rhs -= a * off
                for col, sg in cols:
                    coeffs[col] = coeffs.get(col, _ZERO) + a * sg
            kappa = {LE: 1, GE: -1, EQ: 0}[c.sense]
            rows.append(({k: v for k, v in coeffs.items() if v}, kappa, rhs, ("row", r)))
        for k in range(n):
            lo, hi = lp.lower[k], lp.upper[k]
            if lo is not None and hi is not None:
                col = self.var_map[k][1][0][0]
                rows.append(({col: _ONE}, 1, hi - lo, ("upper", k)))
        self.rows = rows
        # objective in min form
        self.cost: dict[int, Fraction] = {}
        sgn = -1 if lp.sense == "max" else 1
        for k, a in lp.objective.items():
            for col, s in self.var_map[k][1]:
                self.cost[col] = self.cost.get(col, _ZERO) + sgn * s * a
        if lp.sense is None:
            self.cost = {}

    def to_original(self, xs: Mapping[int, Fraction]) -> list[Fraction]:
        out = []
        for off, cols in self.var_map:
            v = off
            for col, sg in cols:
                v += sg * xs.get(col, _ZERO)
            out.append(v)
        return out


class _Tableau:
    def __init__(self):
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.cost: dict[int, Fraction] = {}
        self.z = _ZERO
        self.pivots = 0

    def pivot(self, r: int, c: int):
        row = self.rows[r]
        a = row[c]
        if a != 1:
            inv = 1 / a
            row = {k: v * inv for k, v in row.items()}
            self.rows[r] = row
            self.rhs[r] *= inv
        b = self.rhs[r]
        items = list(row.items())
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(c)
            if f is None:
                continue
            for k, v in items:
                nv = other.get(k, _ZERO) - f * v
                if nv:
                    other[k] = nv
                else:
                    del other[k]
            if b:
                self.rhs[i] -= f * b
        f = self.cost.get(c)
        if f is not None:
            for k, v in items:
                nv = self.cost.get(k, _ZERO) - f * v
                if nv:
                    self.cost[k] = nv
                else:
                    del self.cost[k]
            self.z += f * b
        self.basis[r] = c
        self.pivots += 1

    def run(self, allowed) -> int | None:
        """Minimize.  Returns None at optimum or an unbounded column."""
        stall = 0
        while True:
            bland = stall >= _STALL
            enter = None
            best = _ZERO
            for k, d in self.cost.items():
                if d < 0 and allowed(k):
                    if bland:
                        if enter is None or k < enter:
                            enter = k
                    elif d < best or (d == best and enter is not None and k < enter):
                        best, enter = d, k
            if enter is None:
                return None
            leave = None
            ratio = None
            for i, row in enumerate(self.rows):
                a = row.get(enter)
                if a is not None and a > 0:
                    q = self.rhs[i] / a
                    if ratio is None or q < ratio or (q == ratio and self.basis[i] < self.basis[leave]):
                        ratio, leave = q, i
            if leave is None:
                return enter
            stall = stall + 1 if ratio == 0 else 0
            self.pivot(leave, enter)


def _solve_std(lp: LinearProgram):
    std = _Std(lp)
    tab = _Tableau()
    ncol = std.n_struct
    slack_of_row: dict[int, int] = {}
    art_of_row: dict[int, int] = {}
    sign_of_row: list[int] = []
    for i, (coeffs, kappa, rhs, _) in enumerate(std.rows):
        row = dict(coeffs)
        if kappa:
            row[ncol] = Fraction(kappa)
            slack_of_row[i] = ncol
            ncol += 1
        sgn = 1
        if rhs < 0:
            sgn = -1
            row = {k: -v for k, v in row.items()}
            rhs = -rhs
        sign_of_row.append(sgn)
        tab.rows.append(row)
        tab.rhs.append(rhs)
        tab.basis.append(-1)
    n_real = ncol
    for i, row in enumerate(tab.rows):
        s = slack_of_row.get(i)
        if s is not None and row[s] == 1:
            tab.basis[i] = s
        else:
            row[ncol] = _ONE
            art_of_row[i] = ncol
            tab.basis[i] = ncol
            ncol += 1
    # phase one
    for i, a in art_of_row.items():
        for k, v in tab.rows[i].items():
            if k != a:
                tab.cost[k] = tab.cost.get(k, _ZERO) - v
        tab.z += tab.rhs[i]
    tab.cost = {k: v for k, v in tab.cost.items() if v}
    if art_of_row:
        tab.run(lambda k: True)
        if tab.z > 0:
            raise Infeasible(_farkas(std, tab, slack_of_row, art_of_row, sign_of_row))
    # drive zero-level artificials out of the basis
    drop = []
    for i in range(len(tab.rows)):
        if tab.basis[i] >= n_real:
            cand = [k for k in tab.rows[i] if k < n_real]
            if cand:
                tab.pivot(i, min(cand))
            else:
                drop.append(i)
    for i in reversed(drop):
        del tab.rows[i], tab.rhs[i], tab.basis[i]
    for row in tab.rows:
        for k in [k for k in row if k >= n_real]:
            del row[k]
    # phase two
    tab.cost = dict(std.cost)
    tab.z = _ZERO
    for i, bcol in enumerate(tab.basis):
        cb = std.cost.get(bcol)
        if cb:
            for k, v in tab.rows[i].items():
                tab.cost[k] = tab.cost.get(k, _ZERO) - cb * v
            tab.z += cb * tab.rhs[i]
    for bcol in tab.basis:
        tab.cost.pop(bcol, None)
    tab.cost = {k: v for k, v in tab.cost.items() if v}
    col = tab.run(lambda k: k < n_real)
    if col is not None:
        raise Unbounded(_ray(std, tab, col))
    xs = {b: tab.rhs[i] for i, b in enumerate(tab.basis) if b < std.n_struct}
    return std.to_original(xs), tab.pivots


def _farkas(std, tab, slack_of_row, art_of_row, sign_of_row) -> FarkasCertificate:
    # phase-one duals read off the reduced costs of unit columns
    y = []
    for i in range(len(std.rows)):
        if i in art_of_row:
            y.append(_ONE - tab.cost.get(art_of_row[i], _ZERO))
        else:
            y.append(-tab.cost.get(slack_of_row[i], _ZERO))
    cert = FarkasCertificate()
    agg = [_ZERO] * std.n_struct
    for i, (coeffs, kappa, rhs, origin) in enumerate(std.rows):
        mu = y[i] * sign_of_row[i]
        if not mu:
            continue
        for k, v in coeffs.items():
            agg[k] += mu * v
        kind, idx = origin
        if kind == "row":
            cert.rows[idx] = mu
        else:
            cert.upper[idx] = mu
    # cancel what is left with the bounds x' >= 0
    for k, (off, cols) in enumerate(std.var_map):
        if len(cols) == 2:
            continue
        col, sg = cols[0]
        if agg[col]:
            # orig var x = off + sg*x'; row on x' with multiplier -agg
            if sg == 1:
                cert.lower[k] = cert.lower.get(k, _ZERO) - agg[col]
            else:
                cert.upper[k] = cert.upper.get(k, _ZERO) + agg[col]
    return cert


def _ray(std, tab, col) -> list[Fraction]:
    d = {col: _ONE}
    for i, b in enumerate(tab.basis):
        a = tab.rows[i].get(col)
        if a:
            d[b] = -a
    ray = []
    for off, cols in std.var_map:
        ray.append(sum((sg * d.get(c, _ZERO) for c, sg in cols), _ZERO))
    return ray


# ---------------------------------------------------------------- public API

def tight_set(lp: LinearProgram, values: Sequence[Fraction]) -> list[tuple[str, int]]:
    out = []
    for r, c in enumerate(lp.constraints):
        lhs = sum((a * values[k] for k, a in c.coeffs.items()), _ZERO)
        if lhs == c.rhs:
            out.append(("row", r))
    for k, x in enumerate(values):
        if lp.lower[k] is not None and x == lp.lower[k]:
            out.append(("lower", k))
        if lp.upper[k] is not None and x == lp.upper[k]:
            out.append(("upper", k))
    return out


def solve_lp(lp: LinearProgram) -> BasicSolution:
    """Optimal basic feasible solution, or raise Infeasible / Unbounded."""
    values, pivots = _solve_std(lp)
    obj = lp.objective_value(values) if lp.sense else None
    return BasicSolution(values, obj, tight_set(lp, values), pivots)


def rank(vectors: Iterable[Mapping[int, Fraction]]) -> int:
    """Rank of sparse rational vectors by exact elimination."""
    pivots: dict[int, dict[int, Fraction]] = {}
    r = 0
    for v in vectors:
        v = {k: Fraction(a) for k, a in v.items() if a}
        while v:
            lead = min(v)
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = {k: a / v[lead] for k, a in v.items()}
                r += 1
                break
            f = v[lead]
            for k, a in p.items():
                nv = v.get(k, _ZERO) - f * a
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return r


def verify_basic(lp: LinearProgram, sol: BasicSolution | Sequence[Fraction]) -> bool:
    """True iff the point is feasible and its tight constraints have full rank."""
    values = sol.values if isinstance(sol, BasicSolution) else list(sol)
    if len(values) != lp.num_vars or not lp.is_feasible(values):
        return False
    vecs = []
    for kind, idx in tight_set(lp, values):
        if kind == "row":
            vecs.append(lp.constraints[idx].coeffs)
        else:
            vecs.append({idx: _ONE})
    return rank(vecs) == lp.num_vars


def check_farkas(lp: LinearProgram, cert: FarkasCertificate) -> bool:
    """Independent check that `cert` proves `lp` infeasible."""
    agg: dict[int, Fraction] = {}
    rhs = _ZERO
    for r, mu in cert.rows.items():
        c = lp.constraints[r]
        if (c.sense == LE and mu > 0) or (c.sense == GE and mu < 0):
            return False
        for k, a in c.coeffs.items():
            agg[k] = agg.get(k, _ZERO) + mu * a
        rhs += mu * c.rhs
    for k, mu in cert.lower.items():
        if mu < 0 or lp.lower[k] is None:
            return False
        agg[k] = agg.get(k, _ZERO) + mu
        rhs += mu * lp.lower[k]
    for k, mu in cert.upper.items():
        if mu > 0 or lp.upper[k] is None:
            return False
        agg[k] = agg.get(k, _ZERO) + mu
        rhs += mu * lp.upper[k]
    return all(v == 0 for v in agg.values()) and rhs > 0


def check_ray(lp: LinearProgram, ray: Sequence[Fraction]) -> bool:
    for k, d in enumerate(ray):
        if lp.lower[k] is not None and d < 0:
            return False
        if lp.upper[k] is not None and d > 0:
            return False
    for c in lp.constraints:
        s = sum((a * ray[k] for k, a in c.coeffs.items()), _ZERO)
        if (c.sense == LE and s > 0) or (c.sense == GE and s < 0) or (c.sense == EQ and s != 0):
            return False
    gain = lp.objective_value(ray)
    return gain > 0 if lp.sense == "max" else gain < 0


def _frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def solve_milp(lp: LinearProgram, integer_vars: Iterable[int], node_budget: int = 10_000) -> MilpSolution:
    """Depth-first branch and bound on the most fractional integer variable.

    With no integer variables this is exactly solve_lp.  The returned point
    is a basic solution of the LP with the integer variables fixed.
    """
    ints = sorted(set(integer_vars))
    if not ints:
        s = solve_lp(lp)
        return MilpSolution(s.values, s.objective, s.tight, s.pivots, nodes=1)
    maximize = lp.sense == "max"
    best: BasicSolution | None = None
    stack = [(list(lp.lower), list(lp.upper))]
    nodes = 0
    exhausted = True
    while stack:
        if nodes >= node_budget:
            exhausted = False
            break
        lo, hi = stack.pop()
        nodes += 1
        sub = lp.copy()
        sub.lower, sub.upper = lo, hi
        try:
            s = solve_lp(sub)
        except Infeasible:
            continue
        if best is not None:
            if lp.sense is None:
                break
            if (maximize and s.objective <= best.objective) or (not maximize and s.objective >= best.objective):
                continue
        pick = None
        score = None
        for k in ints:
            f = _frac_part(s.values[k])
            if f:
                d = abs(f - Fraction(1, 2))
                if score is None or d < score:
                    pick, score = k, d
        if pick is None:
            best = s
            if lp.sense is None:
                break
            continue
        v = s.values[pick]
        down_hi = list(hi)
        down_hi[pick] = Fraction(math.floor(v))
        up_lo = list(lo)
        up_lo[pick] = Fraction(math.ceil(v))
        stack.append((up_lo, list(hi)))
        stack.append((list(lo), down_hi))
    if best is None:
        if not exhausted:
            raise BudgetExceeded(None, nodes)
        raise Infeasible(None, "no integral point")
    fixed = lp.copy()
    fixed.lower = list(lp.lower)
    fixed.upper = list(lp.upper)
    for k in ints:
        fixed.lower[k] = fixed.upper[k] = best.values[k]
    s = solve_lp(fixed)
    return MilpSolution(s.values, s.objective, tight_set(fixed, s.values), s.pivots,
                        nodes=nodes, optimal=exhausted)
