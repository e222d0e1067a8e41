"""Reading and writing instances, solutions and run records.

Instances are JSON with every rational written as an integer pair::

    {
      "format": "bmkp-instance/1",
      "kind": "identical",
      "capacities": [[10, 1], [10, 1]],
      "items": [
        [1, 3, 1, 5, 1],
        ...
      ]
    }

An item row is ``[id, profit_num, profit_den, weight_num, weight_den]``.
Decimal literals are rejected anywhere in the file.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .model import ARBITRARY, IDENTICAL, Assignment, Instance, Item

INSTANCE_FORMAT = "bmkp-instance/1"
ASSIGNMENT_FORMAT = "bmkp-assignment/1"
CSV_COLUMNS = ("instance_hash", "algo", "eps", "opt_guess", "value",
               "ratio_exact", "ratio_float", "ms", "seed")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.line = line
        self.field = field


# ------------------------------------------------------------------ instances

def _pair(x: Fraction) -> str:
    return f"[{x.numerator}, {x.denominator}]"


def dumps_instance(instance: Instance) -> str:
    lines = ["{", f'  "format": "{INSTANCE_FORMAT}",', f'  "kind": "{instance.kind}",']
    caps = ", ".join(_pair(c) for c in instance.capacities)
    lines.append(f'  "capacities": [{caps}],')
    rows = [f"    [{it.id}, {it.profit.numerator}, {it.profit.denominator}, "
            f"{it.weight.numerator}, {it.weight.denominator}]" for it in instance.items]
    if rows:
        lines.append('  "items": [')
        lines.append(",\n".join(rows))
        lines.append("  ]")
    else:
        lines.append('  "items": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _reject_float(text: str):
    def hook(token):
        m = re.search(r"(?<![\w\"])-?\d+\.\d*|(?<![\w\"])-?\d+[eE][-+]?\d+", text)
        line = text.count("\n", 0, m.start()) + 1 if m else None
        raise ParseError(f"decimal literal {token!r} where an integer was expected", line)
    return hook


def _int(v, field: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, found {v!r}", field=field)
    return v


def _rational(num, den, field: str) -> Fraction:
    n = _int(num, field + "[num]")
    d = _int(den, field + "[den]")
    if d <= 0:
        raise ParseError("denominator must be positive", field=field)
    return Fraction(n, d)


def _line_of_item(text: str, index: int) -> int | None:
    # items are written one per line; find the index-th row after "items"
    start = text.find('"items"')
    if start < 0:
        return None
    rows = [m.start() for m in re.finditer(r"\[\s*-?\d+\s*,", text[start:])]
    if index < len(rows):
        return text.count("\n", 0, start + rows[index]) + 1
    return None


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text, parse_float=_reject_float(text),
                          parse_constant=lambda c: (_ for _ in ()).throw(
                              ParseError(f"constant {c} not allowed")))
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    if data.get("format") != INSTANCE_FORMAT:
        raise ParseError(f"unknown format tag {data.get('format')!r}", field="format")
    kind = data.get("kind")
    if kind not in (IDENTICAL, ARBITRARY):
        raise ParseError(f"kind must be identical or arbitrary, got {kind!r}", field="kind")
    caps_raw = data.get("capacities")
    if not isinstance(caps_raw, list):
        raise ParseError("capacities must be a list", field="capacities")
    caps = []
    for j, c in enumerate(caps_raw):
        if not isinstance(c, list) or len(c) != 2:
            raise ParseError("capacity must be [num, den]", field=f"capacities[{j}]")
        caps.append(_rational(c[0], c[1], f"capacities[{j}]"))
    items_raw = data.get("items")
    if not isinstance(items_raw, list):
        raise ParseError("items must be a list", field="items")
    items = []
    seen = set()
    for k, row in enumerate(items_raw):
        fld = f"items[{k}]"
        line = _line_of_item(text, k)
        if not isinstance(row, list) or len(row) != 5:
            raise ParseError("item must be [id, pn, pd, wn, wd]", line, fld)
        try:
            iid = _int(row[0], fld + "[0]")
            p = _rational(row[1], row[2], fld + "[profit]")
            w = _rational(row[3], row[4], fld + "[weight]")
        except ParseError as e:
            raise ParseError(str(e).split(": ", 1)[-1], line, e.field) from None
        if iid in seen:
            raise ParseError(f"duplicate item id {iid}", line, fld)
        seen.add(iid)
        try:
            items.append(Item(iid, p, w))
        except ValueError as e:
            raise ParseError(str(e), line, fld) from None
    try:
        return Instance(tuple(items), tuple(caps), kind)
    except ValueError as e:
        raise ParseError(str(e)) from None


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8")


def read_instance(path) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def instance_hash(instance: Instance) -> str:
    return hashlib.sha256(dumps_instance(instance).encode()).hexdigest()[:16]


# ---------------------------------------------------------------- assignments

def dumps_assignment(a: Assignment, value: Fraction | None = None) -> str:
    bundles = [sorted(b) for b in a.bundles]
    data = {"format": ASSIGNMENT_FORMAT, "bundles": bundles}
    if value is not None:
        data["value"] = [value.numerator, value.denominator]
    return json.dumps(data, indent=2) + "\n"


def write_assignment(a: Assignment, path, value: Fraction | None = None) -> None:
    Path(path).write_text(dumps_assignment(a, value), encoding="utf-8")


def read_assignment(path) -> Assignment:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text, parse_float=_reject_float(text))
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno) from None
    if not isinstance(data, dict) or data.get("format") != ASSIGNMENT_FORMAT:
        raise ParseError("not an assignment file", field="format")
    bundles = data.get("bundles")
    if not isinstance(bundles, list):
        raise ParseError("bundles must be a list", field="bundles")
    out = []
    for j, b in enumerate(bundles):
        if not isinstance(b, list):
            raise ParseError("bundle must be a list of ids", field=f"bundles[{j}]")
        out.append(frozenset(_int(i, f"bundles[{j}]") for i in b))
    return Assignment(tuple(out))


# ---------------------------------------------------------------- generation

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014).  Integers in a range are drawn
    by rejection: with span s, draws >= floor(2^64 / s) * s are discarded and
    the rest reduced mod s.  Easy to reproduce in any language."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = ((1 << 64) // span) * span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def shuffle(self, xs: list) -> None:
        for i in range(len(xs) - 1, 0, -1):
            j = self.randint(0, i)
            xs[i], xs[j] = xs[j], xs[i]


def gen_random(n: int, m: int, profit_range=(1, 20), weight_range=(1, 20),
               kind: str = ARBITRARY, seed: int = 0, capacity_range=None,
               denominator: int = 1) -> Instance:
    """Random instance with ids 1..n.

    Profits and weights are integers from the given ranges divided by
    `denominator`.  Without `capacity_range`, identical instances get
    B = max(largest weight, ceil(total weight / m)) and arbitrary ones draw
    each capacity between half and one and a half times that average.
    """
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    for lo, hi in (profit_range, weight_range):
        if lo <= 0 or hi < lo:
            raise ValueError("ranges must be positive and non-empty")
    rng = SplitMix64(seed)
    d = denominator
    items = []
    for i in range(1, n + 1):
        p = Fraction(rng.randint(profit_range[0] * d, profit_range[1] * d), d)
        w = Fraction(rng.randint(weight_range[0] * d, weight_range[1] * d), d)
        items.append(Item(i, p, w))
    if capacity_range is not None:
        lo, hi = capacity_range
        if kind == IDENTICAL:
            caps = [Fraction(rng.randint(lo * d, hi * d), d)] * m
        else:
            caps = sorted(Fraction(rng.randint(lo * d, hi * d), d) for _ in range(m))
    else:
        total = sum((it.weight for it in items), Fraction(0))
        wmax = max((it.weight for it in items), default=Fraction(1))
        avg = max(wmax, Fraction(math.ceil(total * d / m), d))
        if kind == IDENTICAL:
            caps = [avg] * m
        else:
            lo = max(1, int(avg * d) // 2)
            hi = max(lo, (3 * int(avg * d)) // 2)
            caps = sorted(Fraction(rng.randint(lo, hi), d) for _ in range(m))
    return Instance(tuple(items), tuple(caps), kind)


# ---------------------------------------------------------------- run records

@dataclass
class RunRecord:
    instance_hash: str
    algo: str
    eps: Fraction | None
    opt_guess: Fraction | None
    value: Fraction
    ratio: Fraction | None
    ms: float
    seed: int | None = None

    def row(self) -> list[str]:
        def q(x):
            return "" if x is None else str(x)
        return [self.instance_hash, self.algo, q(self.eps), q(self.opt_guess), q(self.value),
                q(self.ratio), "" if self.ratio is None else f"{float(self.ratio):.6f}",
                f"{self.ms:.3f}", q(self.seed)]


def persist_runs(records, csv_path) -> None:
    """Append records, writing the header first when the file is new or empty."""
    path = Path(csv_path)
    fresh = not path.exists() or os.path.getsize(path) == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if fresh:
            w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())


def persist_run(record: RunRecord, csv_path) -> None:
    persist_runs([record], csv_path)


def read_runs(csv_path) -> list[dict[str, str]]:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
