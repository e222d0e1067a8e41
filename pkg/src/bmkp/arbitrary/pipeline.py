"""End-to-end driver for arbitrary capacities.

With a profit guess g, items worth at least (1/2 - 7eps/2) g are pinned
first: each, in order of decreasing profit, takes the smallest free
knapsack it fits.  Replacing the bundle of that knapsack by the item and
moving the old bundle to the knapsack that held the item shows the rest
still supports value g.  The remaining instance is rounded, solved through
the configuration LP and rounded back.

Without a guess, g starts at an upper bound and shrinks by (1+eps) until
the configuration LP is feasible; an infeasible LP proves OPT < g.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..model import Assignment, Instance, epsilon, evaluate, fill_greedily, normalize, validate
from .assignment import check_alp, config_to_assignment
from .config_lp import ConfigLpInfeasible, check_config_lp, solve_config_lp
from .configs import DEFAULT_CONFIG_CAP, enumerate_configs
from .integral import check_expensive, round_cheap, round_expensive
from .rounding import round_instance, to_original
from .shifting import DonorShortage, constants, dichotomy, shift_and_compensate

DEFAULT_GUESS_STEPS = 200


class PipelineInvariantError(AssertionError):
    pass


def pin_threshold(eps: Fraction) -> Fraction:
    return Fraction(1, 2) - Fraction(7, 2) * eps


def bound_factor(eps: Fraction) -> Fraction:
    return pin_threshold(eps)


@dataclass
class Pinning:
    # original knapsack index -> pinned item id
    pinned: dict[int, int]
    free: tuple[int, ...]
    dropped: tuple[int, ...]
    rest: tuple[int, ...]


def pin_items(norm: Instance, eps: Fraction) -> Pinning:
    theta = pin_threshold(eps)
    high = sorted((it for it in norm.items if it.profit >= theta), key=lambda it: (-it.profit, it.id))
    free = list(range(norm.m))
    pinned, dropped = {}, []
    for it in high:
        fit = [j for j in free if norm.capacities[j] >= it.weight]
        if not fit:
            dropped.append(it.id)
            continue
        j = fit[0]
        pinned[j] = it.id
        free.remove(j)
    high_ids = {it.id for it in high}
    rest = tuple(it.id for it in norm.items if it.id not in high_ids)
    return Pinning(pinned, tuple(free), tuple(dropped), rest)


@dataclass
class ArbitraryReport:
    eps: Fraction
    opt_guess: Fraction | None
    value: Fraction
    certified: bool
    bound_factor: Fraction
    guesses_tried: int = 0
    guess_source: str = "given"
    pinned: dict[int, int] = field(default_factory=dict)
    constants: object = None
    stages: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    ms: float = 0.0


class GuessTooHigh(Exception):
    pass


def upper_bound(instance: Instance) -> Fraction:
    """min(total profit / m, best fractional fill of the smallest knapsack)."""
    items = sorted((it for it in instance.items if it.weight > 0),
                   key=lambda it: (-(it.profit / it.weight), it.id))
    cap = instance.capacities[0]
    fill = Fraction(0)
    for it in items:
        if it.weight <= cap:
            cap -= it.weight
            fill += it.profit
        else:
            fill += it.profit * cap / it.weight
            break
    return min(fill, instance.total_profit() / instance.m)


def _solve_at(instance: Instance, e: Fraction, g: Fraction, report: ArbitraryReport,
              config_cap: int, node_budget: int) -> Assignment:
    norm, _ = normalize(instance, g)
    pin = pin_items(norm, e)
    report.pinned = dict(pin.pinned)
    bundles = [frozenset() for _ in range(instance.m)]
    for j, i in pin.pinned.items():
        bundles[j] = frozenset({i})
    if not pin.free:
        return Assignment(tuple(bundles))
    keep = set(pin.rest)
    residual = Instance(tuple(it for it in norm.items if it.id in keep),
                        tuple(norm.capacities[j] for j in pin.free), norm.kind)
    rounded = round_instance(residual, e)
    configs = []
    eta = 0
    for q in rounded.Q:
        cq = enumerate_configs(rounded, q, config_cap)
        eta = max(eta, len(cq))
        configs.extend(cq)
    consts = constants(e, eta)
    report.constants = consts
    try:
        sol = solve_config_lp(rounded, configs, consts.L, node_budget)
    except ConfigLpInfeasible:
        raise GuessTooHigh() from None
    st = report.stages
    st["config_lp"] = not check_config_lp(rounded, sol)
    alp = config_to_assignment(sol, rounded)
    for k, ok in check_alp(rounded, alp, sol).items():
        st[f"alp_{k}"] = ok
    try:
        z, plan = shift_and_compensate(alp.z, rounded, consts)
    except DonorShortage as exc:
        report.notes.append(f"compensation impossible: {exc}")
        return Assignment(tuple(bundles))
    st["dichotomy"] = all(dichotomy(rounded, z))
    z = round_expensive(z, rounded)
    for k, ok in check_expensive(z, rounded).items():
        st[f"expensive_{k}"] = ok
    final = round_cheap(z, rounded)
    e_final = [rounded.bundle_profit(b) >= pin_threshold(e) for b in final.bundles]
    st["cheap_profit"] = all(e_final)
    back = to_original(rounded, final.bundles)
    for k, j in enumerate(pin.free):
        bundles[j] = back.bundles[k]
    return Assignment(tuple(bundles))


def run_arbitrary(instance: Instance, eps, opt_guess=None, config_cap: int = DEFAULT_CONFIG_CAP,
                  node_budget: int = 10_000, guess_steps: int = DEFAULT_GUESS_STEPS,
                  check: bool = True) -> tuple[Assignment, ArbitraryReport]:
    e = epsilon(eps)
    if e > Fraction(1, 8):
        raise ValueError("the arbitrary pipeline needs eps <= 1/8")
    t0 = time.perf_counter()
    factor = bound_factor(e)
    report = ArbitraryReport(e, None, Fraction(0), False, factor)
    if opt_guess is not None:
        guesses = [Fraction(opt_guess)]
    else:
        report.guess_source = "search"
        ub = upper_bound(instance)
        guesses = [ub / (1 + e) ** k for k in range(guess_steps)] if ub > 0 else []
    result = Assignment.empty(instance.m)
    for g in guesses:
        if g <= 0:
            raise ValueError("opt_guess must be positive")
        report.guesses_tried += 1
        report.stages = {}
        report.notes = []
        try:
            result = _solve_at(instance, e, g, report, config_cap, node_budget)
        except GuessTooHigh:
            if opt_guess is not None:
                report.notes.append("configuration LP infeasible: guess above the optimum")
            continue
        report.opt_guess = g
        break
    else:
        if not guesses:
            report.notes.append("upper bound is zero")
            report.certified = True
    result = fill_greedily(instance, result)
    report.value = evaluate(instance, result)
    if report.opt_guess is not None:
        report.certified = report.value >= factor * report.opt_guess
    if check:
        if not validate(instance, result).ok:
            raise PipelineInvariantError("output infeasible on the original instance")
        bad = [k for k, ok in report.stages.items() if not ok]
        if bad:
            raise PipelineInvariantError(f"stage checks failed: {bad}")
    report.ms = (time.perf_counter() - t0) * 1000
    return result, report
