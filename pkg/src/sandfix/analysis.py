"""Single-pile closed forms, reachability, and exhaustive orbit graphs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from math import isqrt
from typing import NamedTuple

from .errors import GraphExplosionError, PreconditionError
from .model import (
    PARALLEL,
    SEQUENTIAL,
    SPM,
    Configuration,
    Model,
    applicable_moves,
    apply_move,
    as_configuration,
    run_to_fixpoint_naive,
    step_parallel,
)


class Decomposition(NamedTuple):
    """``n = k + p(p+1)/2`` with ``0 <= k <= p``."""

    p: int
    k: int


def integer_decomposition(n: int) -> Decomposition:
    if n < 0:
        raise ValueError("n must be non-negative")
    p = (isqrt(8 * n + 1) - 1) // 2
    return Decomposition(p, n - p * (p + 1) // 2)


def closed_form_fixpoint(n: int) -> Configuration:
    """Fixed point of the single pile ``(n)`` under SPM."""
    p, k = integer_decomposition(n)
    stairs = list(range(p, 0, -1))
    if k:
        stairs.insert(p - k + 1, k)
    return Configuration(tuple(stairs))


def t_seq_closed_form(n: int) -> int:
    """Sequential transient length from ``(n)`` to its fixed point."""
    p, k = integer_decomposition(n)
    return (p + 1) * p * (p - 1) // 6 + k * (2 * p + 1 - k) // 2


def f_n(n: int) -> int:
    """ceil((sqrt(8n+1) - 1) / 2): the length of the fixed point of ``(n)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = 8 * n + 1
    m = (isqrt(x) - 1) // 2
    while (2 * m + 1) ** 2 < x:
        m += 1
    return m


def is_reachable(c) -> bool:
    """Non-increasing, and every two plateaus are separated by a cliff.

    A plateau of length 3 counts as two adjacent plateaus.
    """
    a = as_configuration(c).heights
    plateaus = 0
    for i in range(len(a) - 1):
        d = a[i] - a[i + 1]
        if d < 0:
            return False
        if d >= 2:
            plateaus = 0
        elif d == 0:
            plateaus += 1
            if plateaus == 2:
                return False
    return True


@dataclass(frozen=True)
class TransientReport:
    t_seq: int
    t_par: int
    bounds: tuple[float, int]


def transient_report(n: int) -> TransientReport:
    """Sequential transient (closed form) against the measured parallel one."""
    p, _ = integer_decomposition(n)
    t_seq = t_seq_closed_form(n)
    _, t_par = run_to_fixpoint_naive((n,), SPM, PARALLEL)
    lower = t_seq / (p - 1) if p >= 2 else float(t_seq)
    return TransientReport(t_seq, t_par, (lower, t_seq))


@dataclass
class OrbitGraph:
    """Configurations reachable from ``root`` and the single rule applications between them.

    ``vertices`` lists canonical configurations in discovery order, root first.
    """

    root: Configuration
    vertices: list[Configuration] = field(default_factory=list)
    edges: set[tuple[Configuration, Configuration]] = field(default_factory=set)
    mode: str = SEQUENTIAL
    model: Model = SPM

    def successors(self) -> dict[Configuration, list[Configuration]]:
        succ: dict[Configuration, list[Configuration]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            succ[u].append(v)
        return succ

    def sinks(self) -> list[Configuration]:
        has_out = {u for u, _ in self.edges}
        return [v for v in self.vertices if v not in has_out]

    def to_dot(self, name: str = "orbit") -> str:
        index = {v: i for i, v in enumerate(self.vertices)}
        lines = [f"digraph {name} {{"]
        for v, i in index.items():
            lines.append(f'  v{i} [label="{v}"];')
        for u, v in sorted(self.edges, key=lambda e: (index[e[0]], index[e[1]])):
            lines.append(f"  v{index[u]} -> v{index[v]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_orbit_graph(
    c,
    m: Model = SPM,
    mode: str = SEQUENTIAL,
    vertex_limit: int = 100_000,
    wall: int | None = None,
) -> OrbitGraph:
    if vertex_limit <= 0:
        raise ValueError("vertex_limit must be positive")
    root = as_configuration(c).canonical()
    g = OrbitGraph(root=root, vertices=[root], mode=mode, model=m)
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        if mode == PARALLEL:
            v = step_parallel(u, m, wall).canonical()
            targets = [] if v == u else [v]
        else:
            targets = [apply_move(u, mv, m).canonical() for mv in applicable_moves(u, m, wall)]
        for v in targets:
            g.edges.add((u, v))
            if v not in seen:
                if len(seen) >= vertex_limit:
                    raise GraphExplosionError(f"orbit of {root} exceeds {vertex_limit} vertices")
                seen.add(v)
                g.vertices.append(v)
                queue.append(v)
    return g


def restrict_length(g: OrbitGraph, l: int) -> OrbitGraph:
    """Induced subgraph on the vertices of length at most ``l``."""
    keep = [v for v in g.vertices if len(v) <= l]
    kept = set(keep)
    edges = {(u, v) for u, v in g.edges if u in kept and v in kept}
    return OrbitGraph(root=g.root, vertices=keep, edges=edges, mode=g.mode, model=g.model)


def _topological(g: OrbitGraph) -> list[Configuration]:
    preds: dict[Configuration, set[Configuration]] = {v: set() for v in g.vertices}
    for u, v in g.edges:
        preds[v].add(u)
    try:
        return list(TopologicalSorter(preds).static_order())
    except CycleError as exc:
        raise PreconditionError("is_lattice needs an acyclic graph") from exc


def is_lattice(g: OrbitGraph) -> bool:
    """Whether reachability orders the vertices as a lattice.

    ``u >= v`` when ``v`` is reachable from ``u``.  Down-sets and up-sets
    are kept as integer bitsets; a pair has a meet exactly when the
    intersection of their down-sets is itself the down-set of one vertex
    (and dually for joins).
    """
    order = _topological(g)
    if not order:
        return True
    pos = {v: i for i, v in enumerate(order)}
    succ = [[] for _ in order]
    pred = [[] for _ in order]
    for u, v in g.edges:
        succ[pos[u]].append(pos[v])
        pred[pos[v]].append(pos[u])
    size = len(order)
    down = [0] * size
    for i in reversed(range(size)):
        bits = 1 << i
        for j in succ[i]:
            bits |= down[j]
        down[i] = bits
    up = [0] * size
    for i in range(size):
        bits = 1 << i
        for j in pred[i]:
            bits |= up[j]
        up[i] = bits
    for a in range(size):
        for b in range(a + 1, size):
            lower = down[a] & down[b]
            # the top of a principal down-set comes first in topological order
            if not lower or down[(lower & -lower).bit_length() - 1] != lower:
                return False
            upper = up[a] & up[b]
            if not upper or up[upper.bit_length() - 1] != upper:
                return False
    return True


def reachable_set(n: int) -> set[Configuration]:
    """All canonical configurations with ``n`` grains that pass ``is_reachable``."""
    out = set()

    def parts(remaining, cap, prefix):
        if remaining == 0:
            if is_reachable(prefix):
                out.add(Configuration(tuple(prefix)))
            return
        for h in range(min(remaining, cap), 0, -1):
            prefix.append(h)
            parts(remaining - h, h, prefix)
            prefix.pop()

    parts(n, n, [])
    return out
