"""End-to-end (2/3 - 6 eps)-approximation for equal capacities."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..exact_oracle import solve_exact
from ..model import (IDENTICAL, Assignment, Instance, Item, epsilon, evaluate, fill_greedily,
                     normalize, validate)
from .finalize import GuessRejected, finalize_cheap, pair_matching
from .guess import EnumerationReport, GuessState, enumerate_guesses, guess_from_solution
from .labels import is_expensive, is_heavy
from .normalize import (normalize_critical_heavy, normalize_critical_light, order_ok,
                        rounded_weight_ok)
from .slack import SlackSolution, build_slack_solution, check_profile, check_slack

ORACLE = "oracle-guided"
ENUMERATE = "enumerate"
DEFAULT_BUDGET = 10_000


class GuessTooLow(ValueError):
    """More items reach the pinning threshold than there are knapsacks."""

    def __init__(self, high: list[int], m: int):
        super().__init__(f"{len(high)} items reach the pinning threshold but m = {m}")
        self.high = high


def pin_threshold(eps: Fraction) -> Fraction:
    return Fraction(2, 3) - 6 * eps


@dataclass
class Preprocessed:
    items: dict[int, Item]                 # what the guessing stages work on
    pinned: list[tuple[int, int]]          # (knapsack, item)
    free: list[int]                        # knapsacks left for the rest
    dropped_heavy_cheap: list[int]
    dropped_oversize: list[int]
    expensive_cap: int


def preprocess(instance: Instance, eps) -> Preprocessed:
    """Instance scaled to capacity 1 and optimum (guess) 1."""
    eps = epsilon(eps)
    if instance.kind != IDENTICAL:
        raise ValueError("preprocess expects an identical instance")
    over = sorted(it.id for it in instance.items if it.weight > 1)
    fits = [it for it in instance.items if 0 < it.weight <= 1]
    high = sorted((it for it in fits if it.profit >= pin_threshold(eps)), key=lambda it: (-it.profit, it.id))
    if len(high) > instance.m:
        raise GuessTooLow([it.id for it in high], instance.m)
    pinned = [(j, it.id) for j, it in enumerate(high)]
    taken = {i for _, i in pinned}
    rest = {it.id: it for it in fits if it.id not in taken}
    hc = sorted(i for i, it in rest.items() if is_heavy(it, eps) and not is_expensive(it, eps))
    for i in hc:
        del rest[i]
    return Preprocessed(rest, pinned, list(range(len(high), instance.m)), hc, over, int(1 / eps))


@dataclass
class IdenticalReport:
    mode: str
    eps: Fraction
    opt_guess: Fraction
    value: Fraction
    certified: bool
    bound_factor: Fraction             # 2/3 - 6 eps
    rescaled_eps: Fraction             # run with this eps to certify 2/3 - eps
    guesses_tried: int = 0
    exhausted: bool = True
    lp_value: Fraction | None = None   # scaled LP optimum of the winning guess
    guess: GuessState | None = None
    stages: dict[str, object] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def reduced_witness(witness: Assignment, pre: Preprocessed) -> list[frozenset[int]]:
    """Bundles of an optimal solution that avoid the pinned items, one per
    free knapsack."""
    pinned = {i for _, i in pre.pinned}
    clean = [b for b in witness.bundles if not (b & pinned)]
    if len(clean) < len(pre.free):
        raise AssertionError("pinned items touch more bundles than were pinned")
    return clean[:len(pre.free)]


def evaluate_guess(items: Mapping[int, Item], eps: Fraction, g: GuessState):
    E = pair_matching(items, eps, g.H, g.L)
    return finalize_cheap(items, eps, E)


def oracle_stages(items: Mapping[int, Item], bundles, eps: Fraction,
                  extra: Mapping[int, Item] | None = None) -> tuple[GuessState, dict]:
    """Run the constructive steps on a known solution and read off its guess.
    `extra` holds items (dropped heavy-cheap ones) the solution may still
    contain; the slack construction removes them."""
    allitems = dict(items)
    if extra:
        allitems.update(extra)
    stages: dict[str, object] = {}
    S: SlackSolution = build_slack_solution(allitems, bundles, eps)
    stray = set().union(*S.bundles) - set(items) if S.bundles else set()
    if stray:
        raise AssertionError(f"slack solution still holds dropped items {sorted(stray)}")
    stages["slack"] = S
    stages["check_slack"] = check_slack(items, S.bundles, eps)[0]
    stages["check_profile"] = check_profile(items, S.bundles, S.profile, eps)[0]
    b1, sw1 = normalize_critical_heavy(items, S.bundles, S.profile, eps)
    stages["heavy_swaps"] = sw1
    stages["heavy_order"] = order_ok(items, b1, S.profile, eps, heavy=True)
    b2, sw2 = normalize_critical_light(items, b1, S.profile, eps)
    stages["light_swaps"] = sw2
    stages["light_order"] = order_ok(items, b2, S.profile, eps, heavy=False)
    stages["rounded_weight"] = rounded_weight_ok(items, b2, S.profile, eps)[0]
    stages["normalized"] = b2
    g = guess_from_solution(items, b2, S.profile, eps)
    return g, stages


def upper_bound(instance: Instance) -> Fraction:
    """Average profit of the items that fit anywhere; no solution beats it."""
    cap = instance.capacities[-1]
    total = sum((it.profit for it in instance.items if it.weight <= cap), Fraction(0))
    return total / instance.m


def run_identical(instance: Instance, eps, mode: str = ORACLE, budget: int = DEFAULT_BUDGET,
                  opt_guess=None) -> tuple[Assignment, IdenticalReport]:
    eps = epsilon(eps)
    if instance.kind != IDENTICAL:
        raise ValueError("run_identical needs an identical instance")
    if mode not in (ORACLE, ENUMERATE):
        raise ValueError(f"unknown mode {mode!r}")
    m = instance.m
    witness = None
    if mode == ORACLE:
        ex = solve_exact(instance)
        if not ex.optimal:
            raise RuntimeError("exact oracle ran out of budget")
        g = ex.opt
        witness = ex.witness
    else:
        g = Fraction(opt_guess) if opt_guess is not None else upper_bound(instance)
    factor = pin_threshold(eps)
    rep = IdenticalReport(mode, eps, g, Fraction(0), False, factor, eps / 6)
    if g <= 0 or instance.capacities[0] == 0:
        a = fill_greedily(instance, Assignment.empty(m))
        rep.value = evaluate(instance, a) if instance.items else Fraction(0)
        rep.certified = rep.value >= factor * g
        rep.notes.append("trivial: optimum guess or capacity is zero")
        return a, rep

    norm, scaling = normalize(instance, g)
    try:
        pre = preprocess(norm, eps)
    except GuessTooLow as exc:
        top = exc.high[:m]
        a = fill_greedily(instance, Assignment(tuple(frozenset([i]) for i in top)))
        rep.value = evaluate(instance, a)
        rep.certified = rep.value >= factor * g
        rep.notes.append("every knapsack pinned to one high-profit item")
        return a, rep

    bundles: list[frozenset[int]] = [frozenset()] * m
    for j, i in pre.pinned:
        bundles[j] = frozenset([i])
    mfree = len(pre.free)
    if mfree:
        items = pre.items
        if mode == ORACLE:
            normw = Assignment(witness.bundles)
            wb = reduced_witness(normw, pre)
            extra = {i: norm.item(i) for i in pre.dropped_heavy_cheap}
            guess, stages = oracle_stages(items, wb, eps, extra)
            rep.stages = stages
            rep.guess = guess
            rep.guesses_tried = 1
            try:
                sub, t = evaluate_guess(items, eps, guess)
            except GuessRejected as exc:
                raise AssertionError(f"guess read off the optimum was rejected: {exc}") from exc
            rep.lp_value = t
        else:
            er = EnumerationReport()
            best = None
            for guess in enumerate_guesses(items, eps, mfree, budget, er):
                try:
                    cand, t = evaluate_guess(items, eps, guess)
                except GuessRejected:
                    continue
                val = min(sum((items[i].profit for i in b), Fraction(0)) for b in cand)
                if best is None or val > best[0]:
                    best = (val, cand, t, guess)
            rep.guesses_tried = er.produced
            rep.exhausted = er.exhausted
            if best is None:
                sub, t = [frozenset()] * mfree, None
            else:
                _, sub, t, rep.guess = best
            rep.lp_value = t
        for j, b in zip(pre.free, sub):
            bundles[j] = b
    a = fill_greedily(instance, Assignment(tuple(bundles)))
    if not validate(instance, a).ok:
        raise AssertionError("identical pipeline produced an infeasible assignment")
    rep.value = evaluate(instance, a)
    rep.certified = rep.value >= factor * g and (mode == ORACLE or rep.exhausted)
    return a, rep


def guess_drivers(items: Mapping[int, Item], eps, m: int, mode: str, budget: int = DEFAULT_BUDGET,
                  witness=None, report: EnumerationReport | None = None):
    """Stream of guesses for a preprocessed, scaled instance with m knapsacks.

    In oracle-guided mode the single guess comes from an optimal solution
    (computed here when `witness` is not given); in enumerate mode guesses
    are produced in a fixed order until the budget runs out."""
    eps = epsilon(eps)
    if mode == ENUMERATE:
        yield from enumerate_guesses(items, eps, m, budget, report)
        return
    if mode != ORACLE:
        raise ValueError(f"unknown mode {mode!r}")
    if witness is None:
        inst = Instance(tuple(items.values()), (Fraction(1),) * m, IDENTICAL)
        ex = solve_exact(inst)
        if ex.opt < 1:
            raise ValueError(f"optimum {ex.opt} of the scaled instance is below 1")
        witness = ex.witness.bundles
    g, _ = oracle_stages(items, witness, eps)
    if report is not None:
        report.produced, report.exhausted, report.budget = 1, True, budget
    yield g
