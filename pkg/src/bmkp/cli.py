"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 when the run finished but
the answer is infeasible, unproven or uncertified.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import hardness
from .arbitrary import run_arbitrary
from .exact_oracle import DEFAULT_BUDGET as EXACT_BUDGET
from .exact_oracle import solve_exact
from .identical import ENUMERATE, ORACLE, run_identical
from .identical.pipeline import DEFAULT_BUDGET as ENUM_BUDGET
from .instance_io import (CSV_COLUMNS, ParseError, RunRecord, gen_random, instance_hash,
                          persist_runs, read_assignment, read_instance, read_runs,
                          write_assignment, write_instance)
from .model import ARBITRARY, IDENTICAL, as_fraction, validate
from .suites import SUITES

OK, FAIL, USAGE = 0, 2, 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_eps(text: str) -> Fraction:
    m = re.fullmatch(r"\s*1\s*/\s*(\d+)\s*", text)
    if not m or int(m.group(1)) < 1:
        raise argparse.ArgumentTypeError(f"epsilon must look like 1/k with integer k >= 1, got {text!r}")
    return Fraction(1, int(m.group(1)))


def parse_rational(text: str) -> Fraction:
    try:
        x = as_fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+):(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"range must look like LO:HI, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _fmt_ratio(r: Fraction | None) -> str:
    return "n/a" if r is None else f"{r} ({float(r):.6f})"


def _ratio(value: Fraction, ref: Fraction | None) -> Fraction | None:
    if ref is None or ref == 0:
        return None
    return value / ref


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bmkp", description="Bottleneck multiple knapsack solvers and tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve-exact", help="exact optimum by branch and bound")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--budget", type=int, default=EXACT_BUDGET, help="search node budget")

    s = sub.add_parser("solve-identical", help="2/3-approximation for identical capacities")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--eps", type=parse_eps, default=Fraction(1, 10))
    s.add_argument("--mode", choices=(ORACLE, ENUMERATE), default=ORACLE)
    s.add_argument("--budget", type=int, default=ENUM_BUDGET, help="guess enumeration budget")
    s.add_argument("--opt-guess", type=parse_rational)

    s = sub.add_parser("solve-arbitrary", help="1/2-approximation for arbitrary capacities")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--eps", type=parse_eps, default=Fraction(1, 10))
    s.add_argument("--budget", type=int, default=10_000, help="branch-and-bound node budget")
    s.add_argument("--opt-guess", type=parse_rational)

    s = sub.add_parser("gen", help="generate a seeded instance")
    s.add_argument("--out", required=True)
    s.add_argument("--kind", choices=(IDENTICAL, ARBITRARY, "rn3dm-yes", "rn3dm-no"), default=ARBITRARY)
    s.add_argument("-n", type=int, default=8)
    s.add_argument("-m", type=int, default=2)
    s.add_argument("--profit-range", type=parse_range, default=(1, 20))
    s.add_argument("--weight-range", type=parse_range, default=(1, 20))
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("reduce-rn3dm", help="turn an RN3DM instance into a BMKP instance")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("decode-rn3dm", help="recover an RN3DM solution from a value-2 assignment")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--solution", help="assignment for the reduced instance; solved exactly if absent")

    s = sub.add_parser("bench", help="run a seeded suite and write RunRecords as CSV")
    s.add_argument("--suite", choices=sorted(SUITES), required=True)
    s.add_argument("--eps", type=parse_eps, default=Fraction(1, 10))
    s.add_argument("--mode", choices=(ORACLE, ENUMERATE), default=ORACLE)
    s.add_argument("--budget", type=int, default=ENUM_BUDGET)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="record wall times (output no longer reproducible)")
    s.add_argument("--out", help="CSV file to append to; stdout if absent")

    s = sub.add_parser("report", help="summarize a RunRecord CSV")
    s.add_argument("--in", dest="inp", required=True)
    return p


# ---------------------------------------------------------------- commands

def cmd_solve_exact(args) -> int:
    inst = read_instance(args.inp)
    res = solve_exact(inst, budget=args.budget)
    print(f"OPT {res.opt}")
    print(f"nodes {res.nodes}")
    print(f"optimal {'yes' if res.optimal else 'no'}")
    if args.out:
        write_assignment(res.witness, args.out, res.opt)
    return OK if res.optimal else FAIL


def _print_run(value, guess, certified, factor, notes) -> None:
    print(f"value {value}")
    print(f"opt_guess {guess if guess is not None else 'n/a'}")
    print(f"ratio {_fmt_ratio(_ratio(value, guess))}")
    print(f"bound {factor}")
    print(f"certified {'yes' if certified else 'no'}")
    for n in notes:
        print(f"note {n}")


def cmd_solve_identical(args) -> int:
    inst = read_instance(args.inp)
    if inst.kind != IDENTICAL:
        raise UsageError("solve-identical needs an identical-capacity instance")
    a, rep = run_identical(inst, args.eps, mode=args.mode, budget=args.budget, opt_guess=args.opt_guess)
    _print_run(rep.value, rep.opt_guess, rep.certified, rep.bound_factor, rep.notes)
    if args.out:
        write_assignment(a, args.out, rep.value)
    return OK if rep.certified else FAIL


def cmd_solve_arbitrary(args) -> int:
    inst = read_instance(args.inp)
    try:
        a, rep = run_arbitrary(inst, args.eps, opt_guess=args.opt_guess, node_budget=args.budget)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _print_run(rep.value, rep.opt_guess, rep.certified, rep.bound_factor, rep.notes)
    if args.out:
        write_assignment(a, args.out, rep.value)
    return OK if rep.certified else FAIL


def cmd_gen(args) -> int:
    if args.kind in ("rn3dm-yes", "rn3dm-no"):
        r, _, _ = hardness.gen_yes(args.n, args.seed)
        if args.kind == "rn3dm-no":
            r = hardness.perturb(r)
        hardness.write_rn3dm(r, args.out)
        print(f"wrote RN3DM instance n={r.n} t={r.t}")
        return OK
    try:
        inst = gen_random(args.n, args.m, args.profit_range, args.weight_range, args.kind, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    write_instance(inst, args.out)
    print(f"wrote {args.kind} instance n={inst.n} m={inst.m} hash={instance_hash(inst)}")
    return OK


def _reduce(r):
    # unbalanced inputs still reduce; they simply cannot reach value 2
    try:
        red = hardness.reduce(r, strict=False)
    except ValueError as e:
        raise UsageError(str(e)) from None
    print(f"balanced {'yes' if r.balanced() else 'no'}")
    return red


def cmd_reduce(args) -> int:
    r = hardness.read_rn3dm(args.inp)
    red = _reduce(r)
    write_instance(red.instance, args.out)
    print(f"items {red.instance.n}")
    print(f"capacities {' '.join(str(c) for c in red.instance.capacities)}")
    print(f"row_of {' '.join(str(j) for j in red.row_of)}")
    return OK


def cmd_decode(args) -> int:
    r = hardness.read_rn3dm(args.inp)
    red = _reduce(r)
    if args.solution:
        a = read_assignment(args.solution)
        if not validate(red.instance, a).ok:
            print("solution infeasible for the reduced instance")
            return FAIL
    else:
        res = solve_exact(red.instance)
        print(f"OPT {res.opt}")
        a = res.witness
    try:
        v, w = hardness.decode(red, a)
    except hardness.NotDecodable as e:
        print(f"not decodable: {e}")
        return FAIL
    ok = hardness.verify(r, v, w)
    print(f"v {' '.join(map(str, v))}")
    print(f"w {' '.join(map(str, w))}")
    print(f"verified {'yes' if ok else 'no'}")
    return OK if ok else FAIL


def _bench_one(job):
    suite, k, inst, eps, mode, budget, seed, timing = job
    t0 = time.perf_counter()
    opt = solve_exact(inst).opt
    if SUITES[suite][0] == IDENTICAL:
        _, rep = run_identical(inst, eps, mode=mode, budget=budget)
        algo = f"identical-{mode}"
    else:
        _, rep = run_arbitrary(inst, eps, opt_guess=opt if opt > 0 else None)
        algo = "arbitrary"
    ms = (time.perf_counter() - t0) * 1000 if timing else 0.0
    rec = RunRecord(instance_hash(inst), algo, eps, rep.opt_guess, rep.value, _ratio(rep.value, opt), ms, seed)
    return rec, rep.certified


def cmd_bench(args) -> int:
    if args.count < 0 or args.jobs < 1:
        raise UsageError("need --count >= 0 and --jobs >= 1")
    _, make = SUITES[args.suite]
    jobs = [(args.suite, k, inst, args.eps, args.mode, args.budget, args.seed, args.timing)
            for k, inst in enumerate(make(args.count, args.seed))]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    records = [r for r, _ in results]
    if args.out:
        persist_runs(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    else:
        print(",".join(CSV_COLUMNS))
        for rec in records:
            print(",".join(rec.row()))
    bad = sum(1 for _, c in results if not c)
    if bad:
        print(f"uncertified {bad} of {len(results)}", file=sys.stderr)
    return OK if not bad else FAIL


def cmd_report(args) -> int:
    rows = read_runs(args.inp)
    by_algo: dict[str, list[Fraction | None]] = {}
    for r in rows:
        ratio = Fraction(r["ratio_exact"]) if r.get("ratio_exact") else None
        by_algo.setdefault(r["algo"], []).append(ratio)
    print("algo,runs,with_ratio,min_ratio,mean_ratio")
    for algo in sorted(by_algo):
        rs = [x for x in by_algo[algo] if x is not None]
        lo = min(rs) if rs else None
        mean = sum(rs, Fraction(0)) / len(rs) if rs else None
        print(f"{algo},{len(by_algo[algo])},{len(rs)},"
              f"{'' if lo is None else f'{float(lo):.6f}'},{'' if mean is None else f'{float(mean):.6f}'}")
    return OK


COMMANDS = {
    "solve-exact": cmd_solve_exact,
    "solve-identical": cmd_solve_identical,
    "solve-arbitrary": cmd_solve_arbitrary,
    "gen": cmd_gen,
    "reduce-rn3dm": cmd_reduce,
    "decode-rn3dm": cmd_decode,
    "bench": cmd_bench,
    "report": cmd_report,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return USAGE
    except (ParseError, OSError, KeyError) as e:
        print(f"bmkp: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
