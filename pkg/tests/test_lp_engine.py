from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmkp.exact_oracle import solve_exact
from bmkp.lp_engine import (EQ, GE, LE, BudgetExceeded, Infeasible, LinearProgram, Unbounded,
                            check_farkas, check_ray, solve_lp, solve_milp, verify_basic)
from bmkp.model import IDENTICAL, Instance, Item

from helpers import vertices


def random_lp(draw, nv=3, nr=4, eq=True):
    lp = LinearProgram()
    for _ in range(draw(st.integers(1, nv))):
        lp.add_var(0, draw(st.integers(1, 5)))
    senses = [LE, GE, EQ] if eq else [LE, GE]
    for _ in range(draw(st.integers(0, nr))):
        coeffs = {k: draw(st.integers(-3, 3)) for k in range(lp.num_vars)}
        lp.add_constraint(coeffs, draw(st.sampled_from(senses)), draw(st.integers(-2, 6)))
    lp.maximize({k: draw(st.integers(-3, 3)) for k in range(lp.num_vars)})
    return lp


def test_max_x():
    lp = LinearProgram()
    x = lp.add_var(0, None)
    lp.add_constraint({x: 1}, LE, 3)
    lp.maximize({x: 1})
    s = solve_lp(lp)
    assert s.values == [3] and verify_basic(lp, s)


def test_contradiction_has_farkas_certificate():
    lp = LinearProgram()
    x = lp.add_var(None, None)
    lp.add_constraint({x: 1}, LE, 0)
    lp.add_constraint({x: 1}, GE, 1)
    with pytest.raises(Infeasible) as ei:
        solve_lp(lp)
    assert check_farkas(lp, ei.value.certificate)


def test_unbounded_has_ray():
    lp = LinearProgram()
    x, y = lp.add_var(), lp.add_var()
    lp.add_constraint({x: 1, y: -1}, LE, 1)
    lp.maximize({x: 1, y: 1})
    with pytest.raises(Unbounded) as ei:
        solve_lp(lp)
    assert check_ray(lp, ei.value.ray)


def test_assignment_lp_at_opt_is_feasible():
    inst = Instance((Item(1, 3, 5), Item(2, 3, 5), Item(3, 2, 5), Item(4, 2, 5)), (10, 10), IDENTICAL)
    opt = solve_exact(inst).opt
    lp = LinearProgram()
    z = {(i, j): lp.add_var(0, 1) for i in range(1, 5) for j in range(2)}
    t = lp.add_var(0, None)
    by = inst.by_id()
    for i in range(1, 5):
        lp.add_constraint({z[(i, j)]: 1 for j in range(2)}, LE, 1)
    for j in range(2):
        lp.add_constraint({z[(i, j)]: by[i].weight for i in range(1, 5)}, LE, inst.capacities[j])
        row = {z[(i, j)]: by[i].profit for i in range(1, 5)}
        row[t] = -1
        lp.add_constraint(row, GE, 0)
    lp.maximize({t: 1})
    s = solve_lp(lp)
    assert s.objective >= opt and verify_basic(lp, s)


def test_milp_without_integers_is_lp():
    lp = LinearProgram()
    x, y = lp.add_var(0, 4), lp.add_var(0, 4)
    lp.add_constraint({x: 2, y: 2}, LE, 3)
    lp.maximize({x: 1, y: 2})
    assert solve_milp(lp, []).values == solve_lp(lp).values


def test_milp_branches_one_and_a_half():
    lp = LinearProgram()
    x = lp.add_var(0, 3)
    y = lp.add_var(0, None)
    lp.add_constraint({x: 2}, LE, 3)
    lp.add_constraint({x: 1, y: 1}, LE, 2)
    lp.maximize({x: 2, y: 1})
    assert solve_lp(lp).values[x] == F(3, 2)
    s = solve_milp(lp, [x])
    # branches x <= 1 and x >= 2; only x = 1 survives, with y = 1
    assert s.values == [1, 1] and s.objective == 3


def test_milp_integral_gap_is_infeasible():
    lp = LinearProgram()
    x = lp.add_var(0, 1)
    lp.add_constraint({x: 2}, EQ, 1)
    assert solve_lp(lp).values == [F(1, 2)]
    with pytest.raises(Infeasible):
        solve_milp(lp, [x])


def test_milp_budget():
    lp = LinearProgram()
    xs = [lp.add_var(0, 1) for _ in range(6)]
    lp.add_constraint({x: 2 for x in xs}, EQ, 7)
    with pytest.raises((BudgetExceeded, Infeasible)):
        solve_milp(lp, xs, node_budget=3)


def test_midpoint_not_basic_and_empty_lp_basic():
    lp = LinearProgram()
    x, y = lp.add_var(0, 1), lp.add_var(0, 1)
    lp.add_constraint({x: 1, y: 1}, LE, 1)
    assert verify_basic(lp, [F(1), F(0)])
    assert not verify_basic(lp, [F(1, 2), F(1, 2)])
    assert not verify_basic(lp, [F(1, 2), F(0)])
    assert verify_basic(LinearProgram(), [])


def test_dump_mentions_rows():
    lp = LinearProgram()
    x = lp.add_var(0, 1, "x")
    lp.add_constraint({x: 2}, LE, 1, "cap")
    lp.maximize({x: 1})
    assert "cap: 2 x <= 1" in lp.dump()


@settings(max_examples=150)
@given(st.data())
def test_objective_matches_vertex_enumeration(data):
    lp = random_lp(data.draw, nv=4, nr=5)
    verts = vertices(lp)
    try:
        s = solve_lp(lp)
    except Infeasible as exc:
        assert not verts
        assert check_farkas(lp, exc.certificate)
        return
    assert verify_basic(lp, s)
    assert tuple(s.values) in verts
    assert s.objective == max(lp.objective_value(v) for v in verts)
