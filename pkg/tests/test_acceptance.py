"""Acceptance gate.  Each test records one pass/fail line in
conftest.ACCEPTANCE, printed in the terminal summary, then asserts."""

import time
from fractions import Fraction as F

from bmkp.arbitrary.pipeline import bound_factor, pin_items, run_arbitrary
from bmkp.arbitrary.rounding import round_instance
from bmkp.exact_oracle import solve_exact
from bmkp.hardness import decode, gen_yes, perturb, reduce, verify
from bmkp.identical import (ENUMERATE, ORACLE, EnumerationReport, GuessRejected, build_slack_solution, check_slack,
                            guess_drivers, run_identical)
from bmkp.identical.pipeline import evaluate_guess
from bmkp.instance_io import SplitMix64, gen_random
from bmkp.lp_engine import Infeasible, solve_lp, verify_basic
from bmkp.model import IDENTICAL, normalize, validate
from bmkp.rounding_kit import gated_lp, is_matching, lst_reduce, max_matching, sliding_round
from bmkp.suites import desk_arbitrary, desk_identical, random_arbitrary

from conftest import ACCEPTANCE
from helpers import (brute_matching_size, random_gated_system, random_graph, random_window_instance, seeded_lp,
                     vertices)

E = F(1, 10)


def record(k, ok, detail, elapsed, limit):
    within = elapsed < limit
    ACCEPTANCE[k] = (ok and within, f"{detail}; {elapsed:.1f} s (limit {limit} s)")
    assert ok, detail
    assert within, f"took {elapsed:.1f} s, limit {limit} s"


def identical_corpus():
    """At least 100 desk instances with a positive certified optimum."""
    out = []
    for inst in desk_identical(130, seed=7):
        res = solve_exact(inst)
        if res.optimal and res.opt > 0:
            out.append((inst, res))
    return out[:110]


def test_c1_sliding_rounding():
    t0 = time.perf_counter()
    bad = []
    for seed in range(1000):
        wi = random_window_instance(seed)
        a = sliding_round(wi)
        by = {it.id: it for it in wi.items}
        pmax = max((it.profit for it in wi.items), default=F(0))
        for j, b in enumerate(a.bundles):
            w = sum((by[i].weight for i in b), F(0))
            p = sum((by[i].profit for i in b), F(0))
            if w > wi.capacities[j] or p < wi.targets[j] - 2 * pmax:
                bad.append((seed, j))
        if sum(len(b) for b in a.bundles) != len(set().union(*a.bundles)):
            bad.append((seed, "duplicate"))
    record(1, not bad, f"1000 window instances, {len(bad)} violations", time.perf_counter() - t0, 10)


def test_c2_slack_solution():
    t0 = time.perf_counter()
    corpus = identical_corpus()
    bad, extractions = [], 0
    for k, (inst, res) in enumerate(corpus):
        norm, _ = normalize(inst, res.opt)
        items = norm.by_id()
        S = build_slack_solution(items, res.witness.bundles, E)
        if not check_slack(items, S.bundles, E)[0]:
            bad.append((k, "slack"))
        for b in S.bundles:
            if sum((items[i].profit for i in b), F(0)) < F(2, 3) - E:
                bad.append((k, "profit"))
        for rs in S.removed:
            extractions += 1
            if not (E <= rs.profit <= F(1, 3) and E * rs.light_weight <= rs.weight <= E * E):
                bad.append((k, "removed set", rs))
    ok = len(corpus) >= 100 and not bad
    record(2, ok, f"{len(corpus)} instances, {extractions} removed sets, {len(bad)} violations",
           time.perf_counter() - t0, 30)


def test_c3_identical_oracle_guided():
    t0 = time.perf_counter()
    corpus = identical_corpus()
    bad, worst = [], None
    for k, (inst, res) in enumerate(corpus):
        a, rep = run_identical(inst, E, mode=ORACLE)
        r = rep.value / res.opt
        worst = r if worst is None else min(worst, r)
        if not validate(inst, a).ok or rep.value < (F(2, 3) - 6 * E) * res.opt:
            bad.append(k)
    ok = len(corpus) >= 100 and not bad
    record(3, ok, f"{len(corpus)} instances, worst ratio {float(worst):.4f} (bound {float(F(2, 3) - 6 * E):.4f}), "
                  f"{len(bad)} violations", time.perf_counter() - t0, 60)


def _containment(inst, res, eps):
    """Enumerated guesses contain the one read off the optimum, and the best
    enumerated guess is at least as good."""
    norm, _ = normalize(inst, res.opt)
    items = norm.by_id()
    (g,) = list(guess_drivers(items, eps, norm.m, ORACLE, witness=res.witness.bundles))
    rep = EnumerationReport()
    found = list(guess_drivers(items, eps, norm.m, ENUMERATE, budget=10**6, report=rep))

    def value(h):
        try:
            bundles, _ = evaluate_guess(items, eps, h)
        except GuessRejected:
            return None
        return min(sum(items[i].profit for i in b) for b in bundles)
    vals = [v for v in map(value, found) if v is not None]
    return rep.exhausted and g in found and max(vals) >= value(g)


def test_c4_enumeration_completeness():
    t0 = time.perf_counter()
    bad, runs, guesses = [], 0, 0
    third = F(1, 3)
    for seed in range(40):
        inst = gen_random(2 + seed % 5, 1 + seed % 3, (1, 9), (1, 9), IDENTICAL, seed=seed)
        res = solve_exact(inst)
        _, og = run_identical(inst, third, mode=ORACLE)
        _, en = run_identical(inst, third, mode=ENUMERATE, opt_guess=res.opt if res.opt else None)
        runs += 1
        if og.guess is not None:
            guesses += 1
            if not _containment(inst, res, third):
                bad.append((seed, "containment"))
        if en.value != og.value:
            bad.append((seed, "value", en.value, og.value))
    # at 1/3 every item is pinned, so the guess space is empty; check the
    # same containment where it is not
    deep = 0
    for seed in range(6):
        inst = gen_random(5, 2, (1, 9), (1, 9), IDENTICAL, seed=seed)
        res = solve_exact(inst)
        if res.opt == 0:
            continue
        try:
            ok = _containment(inst, res, E)
        except GuessRejected:
            continue
        deep += 1
        if not ok:
            bad.append((seed, "containment at 1/10"))
    record(4, not bad, f"{runs} instances at eps=1/3 ({guesses} with a non-empty guess), values match; "
                       f"{deep} containment checks at eps=1/10; {len(bad)} violations", time.perf_counter() - t0, 300)


def test_c5_arbitrary_rounding():
    t0 = time.perf_counter()
    corpus = []
    for inst in random_arbitrary(80, seed=5) + desk_arbitrary(40, seed=5):
        res = solve_exact(inst)
        if res.optimal and res.opt > 0:
            corpus.append((inst, res))
    corpus = corpus[:100]
    bad = []
    for k, (inst, res) in enumerate(corpus):
        norm, _ = normalize(inst, res.opt)
        r = round_instance(norm, E)
        for j, b in enumerate(res.witness.bundles):
            if r.bundle_weight(b) > r.label_caps[j] or r.bundle_profit(b) < 1 - E:
                bad.append((k, j))
    ok = len(corpus) == 100 and not bad
    record(5, ok, f"{len(corpus)} instances, {len(bad)} violating bundles", time.perf_counter() - t0, 30)


STAGE_KEYS = {"config_lp", "alp_weight", "alp_profit", "alp_item", "alp_box", "alp_integral_small",
              "alp_few_fractional", "alp_fits", "dichotomy", "expensive_integral", "expensive_profit",
              "expensive_weight", "cheap_profit"}


def test_c6_arbitrary_end_to_end():
    t0 = time.perf_counter()
    bad, screened, worst, staged = [], 0, None, 0
    for k, inst in enumerate(desk_arbitrary(40, seed=0)):
        assert inst.n <= 12 and inst.m <= 4 and len(set(inst.capacities)) <= 3
        res = solve_exact(inst)
        norm, _ = normalize(inst, res.opt)
        pin = pin_items(norm, E)
        rest = set(pin.rest)
        types = {(it.u, it.v) for it in round_instance(norm, E).items if it.expensive and it.id in rest}
        assert len(types) <= 3
        # check=True raises on any failed stage invariant
        a, rep = run_arbitrary(inst, E, opt_guess=res.opt, check=True)
        if any("compensation impossible" in n for n in rep.notes):
            screened += 1  # the donor precondition fails; outside the curated suite
            continue
        if rep.stages:
            staged += 1
            if set(rep.stages) != STAGE_KEYS or not all(rep.stages.values()):
                bad.append((k, "stages"))
        r = rep.value / res.opt
        worst = r if worst is None else min(worst, r)
        if not validate(inst, a).ok or rep.value < bound_factor(E) * res.opt:
            bad.append((k, "bound"))
    ok = not bad and screened == 0
    record(6, ok, f"40 instances ({staged} through every stage, {screened} screened out), worst ratio "
                  f"{float(worst):.4f} (bound {float(bound_factor(E)):.2f}), {len(bad)} violations",
           time.perf_counter() - t0, 300)


def test_c7_hardness():
    t0 = time.perf_counter()
    bad = []
    for seed in range(50):
        n = 1 + seed % 8
        r, _, _ = gen_yes(n, seed)
        red = reduce(r)
        res = solve_exact(red.instance)
        if res.opt != 2:
            bad.append((seed, "yes opt", res.opt))
            continue
        v, w = decode(red, res.witness)
        if not verify(r, v, w):
            bad.append((seed, "decode"))
        no = perturb(gen_yes(n, seed + 1000)[0])
        if solve_exact(reduce(no, strict=False).instance).opt > 1:
            bad.append((seed, "perturbed"))
    record(7, not bad, f"50 yes and 50 perturbed instances (n <= 8), {len(bad)} violations",
           time.perf_counter() - t0, 120)


def test_c8_matching():
    t0 = time.perf_counter()
    bad = []
    for seed in range(200):
        g = random_graph(seed)
        mm = max_matching(g)
        if not is_matching(mm) or len(mm) != brute_matching_size(g):
            bad.append(seed)
    record(8, not bad, f"200 graphs, {len(bad)} mismatches", time.perf_counter() - t0, 10)


def test_c9_vertices_and_lst():
    t0 = time.perf_counter()
    bad = []
    lps, seed = 0, 0
    while lps < 100:
        lp = seeded_lp(seed)
        seed += 1
        verts = sorted(vertices(lp))
        if len(verts) < 2:
            continue
        lps += 1
        s = solve_lp(lp)
        if not verify_basic(lp, s):
            bad.append(("accept", seed))
        mid = [(a + b) / 2 for a, b in zip(verts[0], verts[-1])]
        if not lp.is_feasible(mid) or verify_basic(lp, mid):
            bad.append(("reject", seed))
    systems, seed = 0, 0
    rng = SplitMix64(99)
    while systems < 100:
        gates, demands = random_gated_system(rng.next_u64())
        seed += 1
        try:
            g = gated_lp(gates, demands)
            sol = solve_lp(g.lp)
        except Infeasible:
            continue
        systems += 1
        res = lst_reduce(gates, demands, sol)
        frac = {}
        for (i, j), v in res.x.items():
            if 0 < v < 1 and j is not None:
                frac[j] = frac.get(j, 0) + 1
        if any(c > 1 for c in frac.values()):
            bad.append(("lst", seed))
    record(9, not bad, f"{lps} LPs with a midpoint each, {systems} gated systems, {len(bad)} violations",
           time.perf_counter() - t0, 30)
