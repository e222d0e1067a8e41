import csv
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bmkp.instance_io import (CSV_COLUMNS, ParseError, RunRecord, SplitMix64, dumps_assignment,
                              dumps_instance, gen_random, instance_hash, loads_instance,
                              persist_run, persist_runs, read_assignment, read_instance, read_runs,
                              write_assignment, write_instance)
from bmkp.model import ARBITRARY, IDENTICAL, Assignment, Instance, Item

from conftest import instances


def sample():
    items = (Item(1, F(3, 2), 2), Item(2, 4, F(7, 3)), Item(3, 0, 0), Item(4, 9, 1))
    return Instance(items, (F(5, 2), 4), ARBITRARY)


def test_round_trip_file(tmp_path):
    inst = sample()
    write_instance(inst, tmp_path / "x.json")
    assert read_instance(tmp_path / "x.json") == inst


@given(instances())
def test_round_trip_text(inst):
    text = dumps_instance(inst)
    assert loads_instance(text) == inst
    assert dumps_instance(loads_instance(text)) == text


def test_duplicate_id_named():
    text = dumps_instance(sample()).replace("[2, 4, 1", "[1, 4, 1")
    with pytest.raises(ParseError, match="duplicate item id 1") as ei:
        loads_instance(text)
    assert ei.value.line is not None


def test_decimal_rejected():
    text = dumps_instance(sample()).replace("[1, 3, 2, 2, 1]", "[1, 0.5, 1, 2, 1]")
    assert "0.5" in text
    with pytest.raises(ParseError, match="decimal"):
        loads_instance(text)


@pytest.mark.parametrize("edit,msg", [
    (lambda t: t.replace("bmkp-instance/1", "other"), "format"),
    (lambda t: t.replace('"arbitrary"', '"odd"'), "kind"),
    (lambda t: t.replace("[5, 2]", "[5, 0]"), "denominator"),
    (lambda t: t.replace("[4, 9, 1, 1, 1]", "[4, 9, 1]"), "item must be"),
    (lambda t: t[:-3], None),
])
def test_malformed(edit, msg):
    with pytest.raises(ParseError, match=msg):
        loads_instance(edit(dumps_instance(sample())))


def test_unsorted_capacities_rejected():
    text = dumps_instance(sample()).replace("[[5, 2], [4, 1]]", "[[4, 1], [5, 2]]")
    assert text != dumps_instance(sample())
    with pytest.raises(ParseError, match="sorted"):
        loads_instance(text)


def test_assignment_round_trip(tmp_path):
    a = Assignment(({1, 4}, set(), {2}))
    write_assignment(a, tmp_path / "a.json", F(5, 3))
    assert read_assignment(tmp_path / "a.json") == a
    assert '"value": [\n    5,\n    3\n  ]' in dumps_assignment(a, F(5, 3))


def test_gen_random_deterministic():
    a = gen_random(9, 3, (1, 30), (1, 30), ARBITRARY, seed=5)
    b = gen_random(9, 3, (1, 30), (1, 30), ARBITRARY, seed=5)
    assert a == b and instance_hash(a) == instance_hash(b)
    assert gen_random(9, 3, seed=6) != a


def test_gen_random_identical_and_empty():
    inst = gen_random(7, 3, kind=IDENTICAL, seed=1)
    assert len(set(inst.capacities)) == 1
    assert max(it.weight for it in inst.items) <= inst.capacities[0]
    empty = gen_random(0, 2, seed=1)
    assert empty.items == () and empty.m == 2


@given(st.integers(0, 12), st.integers(1, 4), st.integers(0, 2**40),
       st.sampled_from([IDENTICAL, ARBITRARY]), st.integers(1, 4))
def test_gen_random_nonnegative_and_valid(n, m, seed, kind, den):
    inst = gen_random(n, m, (1, 9), (1, 9), kind, seed=seed, denominator=den)
    assert all(it.profit > 0 and it.weight > 0 for it in inst.items)
    assert [it.id for it in inst.items] == list(range(1, n + 1))
    assert inst.kind == kind


def test_gen_random_rejects_bad_ranges():
    with pytest.raises(ValueError):
        gen_random(3, 1, (0, 5))
    with pytest.raises(ValueError):
        gen_random(3, 0)


def test_splitmix_reference_values():
    # first outputs for seed 0 of the published SplitMix64 generator
    g = SplitMix64(0)
    assert [g.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_persist_two_appends(tmp_path):
    path = tmp_path / "runs.csv"
    rec = RunRecord("abc", "identical", F(1, 10), F(3), F(2), F(5, 7), 1.5, 4)
    persist_run(rec, path)
    persist_run(rec, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 3
    assert rows[1][5:7] == ["5/7", "0.714286"]
    assert read_runs(path)[1]["ratio_exact"] == "5/7"


def test_persist_empty_is_header_only(tmp_path):
    path = tmp_path / "runs.csv"
    persist_runs([], path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_ratio_unknown_left_blank():
    rec = RunRecord("h", "a", None, None, F(1), None, 0.0)
    assert rec.row()[5:7] == ["", ""]
