"""Fast SPM fixed points: cut into reachable windows, solve each window in
closed form, then merge neighbouring windows whose border still holds a cliff.

A window of ``l`` columns holding ``n`` grains settles into a staircase
``p, p-1, ..., p-l+1`` with one extra grain on each of its last ``k``
columns.  The rightmost window is unbounded; it is given the length of the
fixed point of a single pile of its grains.

Transients are tracked through movement weights.  A window's weight is
``sum_i i * a_{start+i}``; every SPM move raises it by exactly one, so the
moves spent inside a window are its fixed-point weight minus the weight of
its initial content (``t0``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .analysis import f_n
from .errors import InvariantViolation
from .model import Configuration, as_configuration


@dataclass(frozen=True)
class Interval:
    """A window of the configuration.

    ``start`` is the 0-based index of its first column.  ``l`` is the
    content length as cut, replaced by ``f_n(n)`` once the last window is
    computed.  ``t0`` is the weight of the window's original content
    relative to ``start``; ``t`` is the number of moves spent inside the
    window to reach its fixed point.
    """

    start: int
    l: int
    n: int
    t0: int = 0
    is_last: bool = False
    p: int = 0
    q: int = 0
    k: int = 0
    t: int = 0
    computed: bool = False


@dataclass
class FixpointReport:
    fixpoint: Configuration
    transient: int | None
    iterations: int
    merges: int
    intervals: list[Interval] = field(default_factory=list)


def cut(c) -> list[Interval]:
    """Split ``c`` into maximal windows whose contents are reachable.

    A window ends before every increase and on the second plateau seen since
    the last cliff, increase or cut.  ``n``, ``l`` and ``t0`` are gathered
    during the same scan.
    """
    a = as_configuration(c).heights
    if not a:
        return []
    out = []
    start = 0
    n = a[0]
    t0 = 0
    plateaus = 0
    for i in range(len(a) - 1):
        d = a[i] - a[i + 1]
        end_here = False
        if d < 0:
            end_here = True
            plateaus = 0
        elif d >= 2:
            plateaus = 0
        elif d == 0:
            plateaus += 1
            if plateaus == 2:
                end_here = True
                plateaus = 0
        if end_here:
            out.append(Interval(start, i + 1 - start, n, t0))
            start, n, t0 = i + 1, 0, 0
        n += a[i + 1]
        t0 += (i + 1 - start) * a[i + 1]
    out.append(Interval(start, len(a) - start, n, t0, is_last=True))
    return out


def staircase_weight(l: int, p: int, k: int) -> int:
    """Movement weight of the rendered staircase fixed point of a window."""
    return l * (l - 1) * (3 * p - 2 * l + 1) // 6 + k * (2 * l - k - 1) // 2


def compute_interval(iv: Interval) -> Interval:
    """Fill in ``p``, ``q``, ``k`` and the window transient ``t``."""
    n = iv.n
    l = f_n(n) if iv.is_last else iv.l
    if n == 0:
        return replace(iv, l=l, p=0, q=0, k=0, t=0, computed=True)
    p = (2 * n + l * l - l) // (2 * l)
    q = -((l * l - l - 2 * n) // (2 * l))
    k = n - l * (2 * p + 1 - l) // 2
    t = staircase_weight(l, p, k) - iv.t0
    return replace(iv, l=l, p=p, q=q, k=k, t=t, computed=True)


def render_interval_fixpoint(iv: Interval) -> tuple[int, ...]:
    if not iv.computed:
        raise ValueError("interval statistics have not been computed")
    if iv.n == 0:
        return (0,) * iv.l
    hs = tuple(iv.p - i + (1 if i >= iv.l - iv.k else 0) for i in range(iv.l))
    if hs[-1] < 0 or sum(hs) != iv.n:
        raise InvariantViolation(f"window {iv} renders as {hs}")
    return hs


def _render(intervals) -> Configuration:
    heights: list[int] = []
    for iv in intervals:
        heights.extend(render_interval_fixpoint(iv))
    return Configuration(tuple(heights))


def iteration_bound(l: int, n: int) -> int:
    """Proven cap on cut/compute rounds for a length-``l`` configuration of ``n`` grains."""
    return l * (l + 2 * f_n(n) - 1) // 2


def run_fast_general(c) -> FixpointReport:
    """Iterate cut and compute until the rendered configuration stops changing.

    Every round, including the final one that confirms stability, counts
    as an iteration.  The transient is not tracked by this variant.
    """
    current = as_configuration(c)
    if current.n == 0:
        return FixpointReport(current.canonical(), None, 0, 0, [])
    bound = iteration_bound(current.l, current.n)
    iterations = 0
    while True:
        iterations += 1
        if iterations > bound + 1:
            raise InvariantViolation(f"{iterations} iterations exceed the bound {bound}")
        intervals = [compute_interval(iv) for iv in cut(current)]
        rendered = _render(intervals)
        if rendered == current:
            return FixpointReport(rendered.canonical(), None, iterations, 0, intervals)
        current = rendered


def merge_pair(left: Interval, right: Interval) -> Interval:
    """Fuse two computed neighbours into one window and solve it.

    The right window's content moves ``left.l`` columns further from the
    merged origin, which adds ``left.l * right.n`` to its initial weight.
    """
    n = left.n + right.n
    merged = Interval(
        start=left.start,
        l=left.l + right.l,
        n=n,
        t0=left.t0 + right.t0 + left.l * right.n,
        is_last=right.is_last,
    )
    return compute_interval(merged)


def _border_cliff(left: Interval, right: Interval) -> bool:
    return left.q >= right.p + 2


def merge_pass(intervals: list[Interval], chain: bool = True) -> tuple[list[Interval], bool]:
    """One left-to-right scan merging every neighbour pair with a cliff at its border.

    With ``chain`` a freshly merged window is compared against its next
    neighbour within the same scan; without it the scan moves past it.
    """
    if not intervals:
        return [], False
    out = [intervals[0]]
    merged = False
    fresh = False
    for iv in intervals[1:]:
        left = out[-1]
        if (chain or not fresh) and _border_cliff(left, iv):
            out[-1] = merge_pair(left, iv)
            merged = fresh = True
        else:
            out.append(iv)
            fresh = False
    return out, merged


def run_fast_spm(c, chain: bool = True) -> FixpointReport:
    """Cut once, compute every window, and merge until no border holds a cliff.

    The reported transient is the sum of the final window transients.
    """
    c = as_configuration(c)
    intervals = [compute_interval(iv) for iv in cut(c)]
    merges = 0
    passes = 0
    while len(intervals) > 1:
        passes += 1
        before = len(intervals)
        intervals, merged = merge_pass(intervals, chain)
        merges += before - len(intervals)
        if merges > c.n:
            raise InvariantViolation(f"{merges} merges exceed the grain count {c.n}")
        if not merged:
            break
    return FixpointReport(
        fixpoint=_render(intervals).canonical(),
        transient=sum(iv.t for iv in intervals),
        iterations=passes,
        merges=merges,
        intervals=intervals,
    )
