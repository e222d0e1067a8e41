from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmkp.arbitrary.assignment import check_alp, column_totals, config_to_assignment, fractional_knapsacks, transport
from bmkp.arbitrary.config_lp import (ConfigLpInfeasible, ConfigLpSolution, check_config_lp, solve_config_lp,
                                      witness_solution)
from bmkp.arbitrary.configs import ConfigLimitExceeded, config_of, enumerate_configs, in_class
from bmkp.arbitrary.integral import check_expensive, round_cheap, round_expensive
from bmkp.arbitrary.pipeline import bound_factor, pin_items, run_arbitrary, upper_bound
from bmkp.arbitrary.rounding import RoundingPreconditionError, max_weight_index, round_instance, to_original
from bmkp.arbitrary.shifting import (Constants, DonorShortage, check_donor, constants, dichotomy, donor_set,
                                     shift_and_compensate)
from bmkp.exact_oracle import solve_exact
from bmkp.instance_io import gen_random
from bmkp.model import ARBITRARY, IDENTICAL, FractionalAssignment, Instance, Item, normalize, validate
from bmkp.suites import desk_arbitrary, random_arbitrary

from conftest import fractions

E = F(1, 10)


def inst(rows, caps, kind=ARBITRARY):
    return Instance(tuple(Item(i, F(p), F(w)) for i, (p, w) in enumerate(rows, 1)), tuple(F(c) for c in caps), kind)


def trimmed_witness(norm, rounded, witness):
    """Oracle bundles with at most 1/eps expensive items each (the most
    profitable ones kept)."""
    by = rounded.by_id()
    out = []
    for b in witness.bundles:
        exp = sorted((i for i in b if by[i].expensive), key=lambda i: (-by[i].p, i))
        drop = set(exp[int(1 / rounded.eps):])
        out.append(frozenset(b - drop))
    return out


# ---------------------------------------------------------------- rounding

def test_unit_capacity_label():
    r = round_instance(inst([(F(1, 20), F(1, 2))], [1]), E)
    # t = 0 is the smallest with 1 <= (1+eps)^t
    assert r.q == (1,) and r.label_caps == (F(11, 10),)


def test_profit_label_three_tenths():
    u = 0
    while E * (1 + E) ** (u + 1) <= F(3, 10):
        u += 1
    r = round_instance(inst([(F(3, 10), F(1, 2))], [1]), E)
    it = r.items[0]
    assert it.u == u == 11
    assert it.p == E * F(11, 10) ** 11


def test_cheap_item_unchanged():
    r = round_instance(inst([(F(1, 11), F(2, 7))], [1]), E)
    it = r.items[0]
    assert not it.expensive and it.p == F(1, 11) and it.w == F(2, 7)


@settings(max_examples=150)
@given(p=fractions(F(1, 10), F(1), 1000), w=fractions(F(1, 1000), F(3), 1000), b=fractions(F(1), F(50), 100),
       den=st.sampled_from([8, 10, 20]))
def test_rounding_bounds(p, w, b, den):
    e = F(1, den)
    r = round_instance(Instance((Item(1, p, w),), (F(1), b), ARBITRARY), e)
    it = r.items[0]
    if it.expensive:
        assert it.w >= w and it.w - w < e * e * w
        assert it.p <= p and p - it.p < e
    for B, Bt in zip(r.capacities, r.label_caps):
        assert Bt - B >= e * B
        assert Bt / (1 + e) ** 2 < B  # t is the smallest covering power


def test_to_original_empty_bundles():
    r = round_instance(inst([(1, 1)], [1, 2]), E)
    a = to_original(r, [frozenset(), frozenset()])
    assert a.bundles == (frozenset(), frozenset())


def test_to_original_boundary_is_closed():
    r = round_instance(inst([(F(1, 20), F(22, 25)), (F(1, 20), F(22, 25) + F(1, 1000))], [1, 1]), E)
    # (1 - 2 eps) * 11/10 = 22/25
    assert to_original(r, [{1}, set()]).bundles[0] == frozenset({1})
    with pytest.raises(RoundingPreconditionError):
        to_original(r, [set(), {2}])


# ---------------------------------------------------------------- configurations

def test_no_expensive_items_gives_zero_config():
    r = round_instance(inst([(F(1, 20), F(1, 2)), (F(1, 30), F(1, 3))], [1]), E)
    cs = enumerate_configs(r, r.q[0])
    assert len(cs) == 1 and cs[0].size == 0 and cs[0].weight == 0


def test_one_type_two_copies():
    r = round_instance(inst([(F(1, 5), F(1, 10)), (F(1, 5), F(1, 10))], [1]), E)
    cs = enumerate_configs(r, r.q[0])
    assert sorted(c.size for c in cs) == [0, 1, 2]


def test_heavy_pair_excluded():
    r = round_instance(inst([(F(1, 5), F(3, 4)), (F(1, 5), F(3, 4))], [1]), E)
    cs = enumerate_configs(r, r.q[0])
    assert sorted(c.size for c in cs) == [0, 1]
    pair = config_of(r, r.q[0], {cs[1].counts[0][0]: 2})
    assert not in_class(r, pair)


def test_config_limit():
    r = round_instance(inst([(F(1, 5), F(1, 10)), (F(1, 5), F(1, 10))], [1]), E)
    with pytest.raises(ConfigLimitExceeded) as info:
        enumerate_configs(r, r.q[0], cap=2)
    assert info.value.count == 3 and info.value.cap == 2


def test_cumulative_accessor_clamps():
    r = round_instance(inst([(F(1, 5), F(1, 10)), (F(1, 5), F(1, 100)), (F(3, 10), F(1, 5))], [2]), E)
    q = r.q[0]
    vq = max_weight_index(q, E)
    for c in enumerate_configs(r, q):
        for u in r.U:
            assert c.cum(u, q - 1) == 0
            assert c.cum(u, vq + 7) == c.cum(u, vq)
            assert c.cum(u, q) <= c.cum(u, vq)


# ---------------------------------------------------------------- configuration LP

def test_witness_point_is_feasible():
    seen = 0
    for k, instance in enumerate(random_arbitrary(12, seed=3)):
        res = solve_exact(instance)
        if res.opt == 0:
            continue
        norm, _ = normalize(instance, res.opt)
        r = round_instance(norm, E)
        bundles = trimmed_witness(norm, r, res.witness)
        assert all(r.bundle_profit(b) >= 1 - E for b in bundles)
        assert all(r.bundle_weight(b) <= r.label_caps[j] for j, b in enumerate(bundles))
        configs = [c for q in r.Q for c in enumerate_configs(r, q)]
        sol = witness_solution(r, bundles, configs)
        assert check_config_lp(r, sol) == [], k
        seen += 1
    assert seen >= 8


def _two_class_instance():
    # two identical unit knapsacks, four expensive items, a few cheap ones
    return round_instance(inst([(F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)), (F(1, 2), F(1, 3)), (F(1, 2), F(1, 3)),
                                (F(1, 20), F(1, 10)), (F(1, 20), F(1, 10)), (F(3, 100), F(1, 10))], [1, 1]), F(1, 8))


def test_solve_config_lp_plain_lp():
    r = _two_class_instance()
    configs = enumerate_configs(r, r.Q[0])
    sol = solve_config_lp(r, configs, 0)
    assert sol.integral_classes == ()
    assert check_config_lp(r, sol) == []


def test_single_class_is_integral():
    r = _two_class_instance()
    configs = enumerate_configs(r, r.Q[0])
    sol = solve_config_lp(r, configs, 5)
    assert sol.integral_classes == r.Q
    assert all(x.denominator == 1 for x in sol.x)
    assert check_config_lp(r, sol) == []


def test_config_lp_infeasible_when_guess_too_high():
    instance = inst([(1, 1), (1, 1)], [1, 1])
    norm, _ = normalize(instance, 3)
    r = round_instance(norm, E)
    configs = enumerate_configs(r, r.Q[0])
    with pytest.raises(ConfigLpInfeasible):
        solve_config_lp(r, configs, 1)


# ---------------------------------------------------------------- conversion

def test_transport_vertex_has_integral_column():
    r = round_instance(inst([(F(1, 2), F(1, 2))], [1, 1]), E)
    configs = enumerate_configs(r, r.Q[0])
    assert [c.size for c in configs] == [0, 1]
    sol = ConfigLpSolution(configs, [F(3, 2), F(1, 2)], {})
    flow = transport(sol, r, r.Q[0])
    assert any(v == 1 for v in flow.values())
    for j in range(2):
        assert sum(v for (_, jj), v in flow.items() if jj == j) == 1


def test_conversion_checks_on_lp_points():
    for r in (_two_class_instance(),):
        configs = [c for q in r.Q for c in enumerate_configs(r, q)]
        for L in (0, 1):
            sol = solve_config_lp(r, configs, L)
            alp = config_to_assignment(sol, r)
            assert all(check_alp(r, alp, sol).values())


def test_integral_x_gives_integral_expensive():
    r = _two_class_instance()
    configs = enumerate_configs(r, r.Q[0])
    sol = solve_config_lp(r, configs, 1)
    alp = config_to_assignment(sol, r)
    assert not fractional_knapsacks(r, alp.z)


# ---------------------------------------------------------------- shifting

def _shift_fixture(n_small=3, big_caps=(10,)):
    """Unit knapsacks each with one expensive item and eight cheap ones,
    plus large knapsacks holding fractional expensive items."""
    rows, caps, z = [], [], {}
    for j in range(n_small):
        rows.append((F(3, 5), F(1, 2)))
        z[(len(rows), j)] = F(1)
        for _ in range(8):
            rows.append((F(1, 20), F(1, 20)))
            z[(len(rows), j)] = F(1)
        caps.append(1)
    for k, b in enumerate(big_caps):
        j = n_small + k
        for _ in range(4):
            rows.append((F(1, 2), F(1, 100)))
            z[(len(rows), j)] = F(1, 2)
        caps.append(b)
    r = round_instance(inst(rows, caps), E)
    return r, FractionalAssignment(z)


def test_donor_sets_meet_bounds():
    r, z = _shift_fixture()
    for j in range(3):
        col = z.column(j)
        d = donor_set(r, col)
        assert check_donor(r, col, d)
        assert all(not r.by_id()[i].expensive for i, _ in d)


def test_no_fractional_only_removes_donors():
    r, z = _shift_fixture(big_caps=())
    out, plan = shift_and_compensate(z, r, constants(E, 1))
    assert not plan.moves and not plan.refills
    assert all(dichotomy(r, out))
    for j in range(3):
        assert len(out.column(j)) == 9 - len(plan.donor_sets[j])


def test_refill_from_donors():
    r, z = _shift_fixture()
    out, plan = shift_and_compensate(z, r, Constants(tau=1, s=2, delta=0, L=2, eta=1))
    assert plan.order == (3,) and not plan.moves and plan.refills == {3: (0, 1)}
    got = set(out.column(3))
    want = {i for u in (0, 1) for i, _ in plan.donor_sets[u]}
    assert got == want
    assert all(dichotomy(r, out))
    totals = {}
    for (i, _), v in out.z.items():
        totals[i] = totals.get(i, 0) + v
    assert all(v <= 1 for v in totals.values())


def test_shift_moves_bundles_up():
    r, z = _shift_fixture(big_caps=(10, 1500))
    before = z.column(3)
    out, plan = shift_and_compensate(z, r, Constants(tau=1, s=2, delta=0, L=2, eta=1))
    assert plan.order == (3, 4) and plan.moves == {4: 3}
    assert out.column(4) == before
    assert all(dichotomy(r, out))


def test_donor_shortage():
    r, z = _shift_fixture()
    with pytest.raises(DonorShortage):
        shift_and_compensate(z, r, Constants(tau=1, s=4, delta=0, L=4, eta=1))


# ---------------------------------------------------------------- integral rounding

def test_round_expensive_integral_is_identity():
    r, z = _shift_fixture(big_caps=())
    assert round_expensive(z, r) is z


def test_round_expensive_fractional_columns():
    rows = [(F(7, 20), F(1, 10))] * 6
    r = round_instance(inst(rows, [100, 100]), E)
    z = FractionalAssignment({(1, 0): F(1), (2, 0): F(1), (3, 0): F(1, 2), (4, 0): F(1, 2),
                              (3, 1): F(1, 2), (4, 1): F(1, 2), (5, 1): F(1), (6, 1): F(1)})
    assert all(dichotomy(r, z))
    out = round_expensive(z, r)
    assert all(check_expensive(out, r).values())
    # each item used at most once
    ids = [i for (i, _), v in out.z.items() if v]
    assert len(ids) == len(set(ids))


def test_round_cheap_without_cheap_items():
    r = round_instance(inst([(F(3, 5), F(1, 2)), (F(3, 5), F(1, 2))], [1, 1]), E)
    z = FractionalAssignment({(1, 0): F(1), (2, 1): F(1)})
    assert round_cheap(z, r).bundles == (frozenset({1}), frozenset({2}))


def test_round_cheap_rejects_fractional_expensive():
    r = round_instance(inst([(F(3, 5), F(1, 2))], [1, 1]), E)
    with pytest.raises(ValueError):
        round_cheap(FractionalAssignment({(1, 0): F(1, 2), (1, 1): F(1, 2)}), r)


def test_round_cheap_profit_loss_small():
    r, z0 = _shift_fixture(big_caps=())
    z, _ = shift_and_compensate(z0, r, constants(E, 1))
    out = round_cheap(z, r)
    for j, b in enumerate(out.bundles):
        p, _ = column_totals(r, z)[j]
        # cheap profits here are at most 1/20, so the loss is at most 1/10
        assert r.bundle_profit(b) >= min(p, F(1, 2) - E) - 2 * F(1, 20)
        assert r.bundle_weight(b) <= F(4, 5) * r.label_caps[j]


# ---------------------------------------------------------------- pipeline

def test_pin_items_smallest_fitting():
    norm = inst([(F(9, 10), F(3, 2)), (F(4, 5), F(1, 2)), (F(1, 10), F(1, 2))], [1, 2, 3])
    pin = pin_items(norm, E)
    assert pin.pinned == {1: 1, 0: 2} and pin.free == (2,) and pin.rest == (3,)


def test_eps_above_eighth_rejected():
    with pytest.raises(ValueError):
        run_arbitrary(inst([(1, 1)], [1]), F(1, 7))


def test_degenerate_band_eighth():
    e = F(1, 8)
    done = 0
    for instance in random_arbitrary(8, seed=11):
        res = solve_exact(instance)
        if res.opt == 0:
            continue
        a, rep = run_arbitrary(instance, e, opt_guess=res.opt)
        assert validate(instance, a).ok
        assert rep.certified and rep.value >= (F(1, 2) - F(7, 2) * e) * res.opt
        done += 1
    assert done >= 5


def test_identical_capacities_accepted():
    for seed in range(4):
        instance = gen_random(8, 2, (1, 20), (1, 20), IDENTICAL, seed=seed)
        res = solve_exact(instance)
        a, rep = run_arbitrary(instance, E, opt_guess=res.opt if res.opt else None)
        assert validate(instance, a).ok


def test_desk_certified_with_oracle_guess():
    for instance in desk_arbitrary(4, seed=1):
        res = solve_exact(instance)
        a, rep = run_arbitrary(instance, E, opt_guess=res.opt)
        assert validate(instance, a).ok
        assert rep.certified and rep.value >= bound_factor(E) * res.opt


def test_search_mode():
    instance = desk_arbitrary(1, seed=2)[0]
    a, rep = run_arbitrary(instance, E)
    assert rep.guess_source == "search" and rep.opt_guess is not None
    assert rep.opt_guess <= upper_bound(instance)
    assert validate(instance, a).ok
    assert rep.certified == (rep.value >= bound_factor(E) * rep.opt_guess)


def test_guess_above_opt_is_reported():
    instance = inst([(4, 1), (4, 1)], [1, 1])
    a, rep = run_arbitrary(instance, E, opt_guess=100)
    assert not rep.certified and rep.opt_guess is None
    assert any("infeasible" in n for n in rep.notes)
    assert validate(instance, a).ok
