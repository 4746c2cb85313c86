import csv
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sandfix.errors import InvariantViolation
from sandfix import harness
from sandfix.harness import (
    CSV_FIELDS,
    bench_compare,
    gen_comb,
    gen_random,
    gen_single_pile,
    naive_scan,
    speedups,
    write_csv,
    write_ratio_csv,
)
from sandfix.model import Configuration, run_to_fixpoint_naive


def test_single_pile():
    assert gen_single_pile(8) == (8,)
    assert gen_single_pile(0) == ()
    assert gen_single_pile(10**6).heights == (1000000,)


@pytest.mark.parametrize(
    "n, expected", [(14, (7, 0, 0, 0, 7)), (7, (7,)), (9, (7, 0, 0, 0, 2)), (0, ()), (3, (3,))]
)
def test_comb(n, expected):
    c = gen_comb(n)
    assert c.heights == expected
    assert c.n == n


def test_random_generator():
    assert gen_random(5, 0, 1).heights == (0, 0, 0, 0, 0)
    assert gen_random(0, 9, 1).heights == ()
    a = gen_random(3, 9, 42)
    assert a.heights == gen_random(3, 9, 42).heights
    assert len(a) == 3 and all(0 <= h <= 9 for h in a)
    assert gen_random(40, 9, 1).heights != gen_random(40, 9, 2).heights


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 15), max_size=12).map(tuple))
def test_naive_scan_matches_python_oracle(c):
    assert naive_scan(c) == run_to_fixpoint_naive(c)


def test_bench_compare_records_and_agrees():
    configs = [("single", gen_single_pile(200)), ("comb", gen_comb(70)), ("random", gen_random(20, 9, 5))]
    records = bench_compare(configs, repetitions=2)
    assert len(records) == 9
    for name, c in configs:
        rows = [r for r in records if r.generator == name]
        assert len({r.checksum for r in rows}) == 1
        naive = next(r for r in rows if r.algorithm == "naive-seq")
        merge = next(r for r in rows if r.algorithm == "fast-merge")
        assert naive.steps == merge.steps
    comb_merge = next(r for r in records if r.generator == "comb" and r.algorithm == "fast-merge")
    assert comb_merge.merges == 9


def test_bench_empty_configuration():
    records = bench_compare([("single", gen_single_pile(0))], repetitions=1)
    assert {r.steps for r in records if r.steps is not None} == {0}
    assert all(r.iterations in (None, 0) for r in records)


def test_bench_mismatch_is_fatal(monkeypatch):
    real = harness._run

    def broken(algorithm, c):
        fp, *rest = real(algorithm, c)
        if algorithm == "fast-merge":
            fp = Configuration(tuple(fp) + (1,))
        return (fp, *rest)

    monkeypatch.setattr(harness, "_run", broken)
    with pytest.raises(InvariantViolation):
        bench_compare([("single", gen_single_pile(10))], repetitions=1)


def test_bench_rejects_zero_repetitions():
    with pytest.raises(ValueError):
        bench_compare([], repetitions=0)


def test_csv_layout():
    records = bench_compare([("comb", gen_comb(700))], algorithms=("fast-general", "fast-merge"), repetitions=1)
    buf = io.StringIO()
    write_csv(records, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "generator,l,n,algorithm,wall_ns,steps,iterations,merges,checksum"
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == CSV_FIELDS
    assert rows[0]["steps"] == "" and rows[0]["merges"] == ""
    assert rows[1]["merges"] == "99"


def test_speedup_rows():
    records = bench_compare([("single", gen_single_pile(500))], algorithms=("naive-seq", "fast-merge"), repetitions=1)
    rows = speedups(records)
    assert len(rows) == 1 and rows[0]["ratio"] > 0
    buf = io.StringIO()
    write_ratio_csv(rows, buf)
    assert buf.getvalue().splitlines()[0] == "generator,l,n,naive-seq_ns,fast-merge_ns,ratio"
