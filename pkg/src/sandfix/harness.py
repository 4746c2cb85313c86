"""Configuration generators and a fast-vs-naive benchmark runner."""
from __future__ import annotations

import csv
import hashlib
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .analysis import f_n
from .errors import DivergenceError, InvariantViolation
from .fastfix import run_fast_general, run_fast_spm
from .model import Configuration, as_configuration

ALGORITHMS = ("naive-seq", "fast-general", "fast-merge")
CSV_FIELDS = ("generator", "l", "n", "algorithm", "wall_ns", "steps", "iterations", "merges", "checksum")


def gen_single_pile(n: int) -> Configuration:
    if n < 0:
        raise ValueError("n must be non-negative")
    return Configuration((n,) if n else ())


def gen_comb(n: int) -> Configuration:
    """A 7 every fourth column, then ``n mod 7`` on column ``4 * (n // 7)``.

    Returned in canonical form, so a zero remainder leaves no column.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    blocks = n // 7
    heights = [0] * (4 * blocks + 1)
    heights[0 : 4 * blocks : 4] = [7] * blocks
    heights[4 * blocks] = n % 7
    return Configuration(tuple(heights)).canonical()


def gen_random(l: int, max_height: int, seed: int) -> Configuration:
    """``l`` heights drawn uniformly from ``[0, max_height]``.

    Uses numpy's PCG64 stream (``numpy.random.default_rng(seed)``) with a
    single ``integers`` call, so a (l, max_height, seed) triple always
    yields the same configuration.
    """
    if l < 0 or max_height < 0:
        raise ValueError("l and max_height must be non-negative")
    rng = np.random.default_rng(seed)
    return Configuration(tuple(int(h) for h in rng.integers(0, max_height + 1, size=l)))


GENERATORS = {
    "single": lambda n, seed=0, l=None: gen_single_pile(n),
    "comb": lambda n, seed=0, l=None: gen_comb(n),
    "random": lambda n, seed=0, l=None: gen_random(l if l is not None else 50, n, seed),
}


@njit(cache=True)
def _naive_scan_kernel(a, limit):
    # rescans from column 0 before every move; ``a`` has room for the fixed point
    steps = 0
    size = a.shape[0]
    while True:
        i = 0
        while i < size - 1 and a[i] - a[i + 1] < 2:
            i += 1
        if i == size - 1:
            return steps
        if steps >= limit:
            return -1
        a[i] -= 1
        a[i + 1] += 1
        steps += 1


def naive_scan(c, step_limit: int = 10**12) -> tuple[Configuration, int]:
    """Leftmost-move sequential SPM with a full rescan per step (benchmark baseline)."""
    c = as_configuration(c)
    # no configuration of length l and n grains ever exceeds l + f(n) - 1 columns
    room = len(c) + f_n(c.n) + 1
    a = np.zeros(room, dtype=np.int64)
    a[: len(c)] = c.heights
    steps = _naive_scan_kernel(a, step_limit)
    if steps < 0:
        raise DivergenceError(f"no fixed point within {step_limit} steps")
    return Configuration(tuple(int(h) for h in a)).canonical(), int(steps)


def checksum(c: Configuration) -> str:
    return hashlib.sha256(str(c.canonical()).encode()).hexdigest()[:16]


@dataclass
class BenchRecord:
    generator: str
    l: int
    n: int
    algorithm: str
    wall_ns: int
    steps: int | None
    iterations: int | None
    merges: int | None
    checksum: str


def _run(algorithm: str, c: Configuration):
    if algorithm == "naive-seq":
        fp, steps = naive_scan(c)
        return fp, steps, None, None
    if algorithm == "fast-general":
        r = run_fast_general(c)
        return r.fixpoint, None, r.iterations, None
    if algorithm == "fast-merge":
        r = run_fast_spm(c)
        return r.fixpoint, r.transient, r.iterations, r.merges
    raise ValueError(f"unknown algorithm {algorithm!r}")


def bench_compare(
    configs: Iterable[tuple[str, Configuration]],
    algorithms: Sequence[str] = ALGORITHMS,
    repetitions: int = 3,
) -> list[BenchRecord]:
    """Time every algorithm on every (generator name, configuration) pair.

    Wall time is the minimum over ``repetitions`` runs.  All algorithms must
    agree on the fixed point, otherwise ``InvariantViolation`` is raised.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if "naive-seq" in algorithms:
        _naive_scan_kernel(np.array([2, 0], dtype=np.int64), 10)  # compile outside the timings
    records = []
    for name, c in configs:
        c = as_configuration(c)
        sums = set()
        for algo in algorithms:
            best = None
            for _ in range(repetitions):
                t = time.perf_counter_ns()
                fp, steps, iterations, merges = _run(algo, c)
                elapsed = time.perf_counter_ns() - t
                best = elapsed if best is None else min(best, elapsed)
            sums.add(checksum(fp))
            records.append(BenchRecord(name, len(c), c.n, algo, best, steps, iterations, merges, checksum(fp)))
        if len(sums) > 1:
            raise InvariantViolation(f"algorithms disagree on the fixed point of {name} (n={c.n})")
    return records


def write_csv(records: Iterable[BenchRecord], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})


def speedups(records: Sequence[BenchRecord], baseline: str = "naive-seq", against: str = "fast-merge") -> list[dict]:
    """Baseline wall time over ``against`` wall time, per (generator, l, n)."""
    by_key: dict[tuple, dict[str, int]] = {}
    for r in records:
        by_key.setdefault((r.generator, r.l, r.n), {})[r.algorithm] = r.wall_ns
    rows = []
    for (gen, l, n), times in by_key.items():
        if baseline in times and against in times:
            rows.append(
                {
                    "generator": gen,
                    "l": l,
                    "n": n,
                    f"{baseline}_ns": times[baseline],
                    f"{against}_ns": times[against],
                    "ratio": times[baseline] / max(times[against], 1),
                }
            )
    return rows


def write_ratio_csv(rows: Sequence[dict], fh) -> None:
    if not rows:
        return
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
