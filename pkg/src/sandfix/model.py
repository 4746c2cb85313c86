"""Sandpile configurations, the SPM and IPM(k) rules, and naive simulation.

Columns are indexed from 0.  Everything to the right of the last stored
column is an implicit zero, so a grain may fall (or slide) into a fresh
column and grow the configuration by one.  An optional ``wall`` caps the
number of columns a configuration may occupy; moves whose destination
lies at or beyond the wall are disabled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import DivergenceError, NotApplicableError, UnsupportedModeError

SEQUENTIAL = "seq"
PARALLEL = "par"
MODES = (SEQUENTIAL, PARALLEL)

DEFAULT_STEP_LIMIT = 50_000_000


def _strip(heights: Sequence[int]) -> tuple[int, ...]:
    end = len(heights)
    while end and heights[end - 1] == 0:
        end -= 1
    return tuple(heights[:end])


@dataclass(frozen=True, eq=False)
class Configuration:
    """Column heights ``(a_0, ..., a_{l-1})``.

    Equality and hashing use the canonical form (trailing zero columns
    stripped), so ``(3, 0)`` and ``(3,)`` describe the same sandpile.
    The stored heights keep explicit zeros.
    """

    heights: tuple[int, ...] = ()

    def __post_init__(self):
        hs = tuple(int(h) for h in self.heights)
        if any(h < 0 for h in hs):
            raise ValueError(f"negative column height in {hs}")
        object.__setattr__(self, "heights", hs)

    @classmethod
    def of(cls, *heights: int) -> "Configuration":
        return cls(tuple(heights))

    @property
    def n(self) -> int:
        return sum(self.heights)

    @property
    def l(self) -> int:
        return len(self.heights)

    def canonical(self) -> "Configuration":
        return Configuration(_strip(self.heights))

    def __len__(self):
        return len(self.heights)

    def __iter__(self) -> Iterator[int]:
        return iter(self.heights)

    def __getitem__(self, i):
        return self.heights[i]

    def __eq__(self, other):
        if isinstance(other, Configuration):
            return _strip(self.heights) == _strip(other.heights)
        if isinstance(other, (tuple, list)):
            return _strip(self.heights) == _strip(tuple(other))
        return NotImplemented

    def __hash__(self):
        return hash(_strip(self.heights))

    def __str__(self):
        return ",".join(map(str, self.heights))

    def __repr__(self):
        return f"Configuration({self.heights!r})"


def as_configuration(c) -> Configuration:
    return c if isinstance(c, Configuration) else Configuration(tuple(c))


@dataclass(frozen=True)
class Model:
    """``kind`` is ``"spm"`` or ``"ipm"``; ``k`` bounds the plateau a grain may slide across."""

    kind: str = "spm"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("spm", "ipm"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "ipm" and self.k < 1:
            raise ValueError("IPM(k) needs k >= 1")
        if self.kind == "spm" and self.k != 0:
            raise ValueError("SPM takes no plateau bound")

    def __str__(self):
        return "SPM" if self.kind == "spm" else f"IPM({self.k})"


SPM = Model("spm")


def IPM(k: int) -> Model:
    return Model("ipm", k)


class Move(NamedTuple):
    """One grain leaves ``source`` and lands on ``dest``.

    ``plateau`` is 0 for the vertical rule and the slid-over plateau
    length k' for the horizontal rule.
    """

    source: int
    dest: int
    plateau: int = 0

    @property
    def rule(self) -> str:
        return "vertical" if self.plateau == 0 else "horizontal"


def _height(a: Sequence[int], i: int) -> int:
    return a[i] if i < len(a) else 0


def applicable_moves(c, m: Model = SPM, wall: int | None = None) -> list[Move]:
    """Every move that can fire on ``c``, in increasing source order."""
    a = as_configuration(c).heights
    moves = []
    for i, h in enumerate(a):
        if h == 0:
            continue
        if h - _height(a, i + 1) >= 2:
            if wall is None or i + 1 < wall:
                moves.append(Move(i, i + 1))
            continue
        if m.kind != "ipm" or _height(a, i + 1) != h - 1:
            continue
        # grain slides across a plateau of height h-1 and drops onto h-2
        for kp in range(1, m.k + 1):
            nxt = _height(a, i + kp + 1)
            if nxt == h - 2:
                if wall is None or i + kp + 1 < wall:
                    moves.append(Move(i, i + kp + 1, kp))
                break
            if nxt != h - 1:
                break
    return moves


def apply_move(c, mv: Move, m: Model | None = None) -> Configuration:
    """Transfer one grain along ``mv``; rejects a move that cannot fire."""
    c = as_configuration(c)
    if m is None:
        m = IPM(mv.plateau) if mv.plateau else SPM
    if mv not in applicable_moves(c, m):
        raise NotApplicableError(f"{mv} does not apply to {c}")
    a = list(c.heights)
    if mv.dest >= len(a):
        a.extend([0] * (mv.dest + 1 - len(a)))
    a[mv.source] -= 1
    a[mv.dest] += 1
    return Configuration(tuple(a))


def _parallel_once(a: list[int], wall: int | None) -> list[int]:
    ext = a + [0]
    out = list(ext)
    for i in range(len(a)):
        if ext[i] - ext[i + 1] >= 2 and (wall is None or i + 1 < wall):
            out[i] -= 1
            out[i + 1] += 1
    if out[-1] == 0:
        out.pop()
    return out


def step_parallel(c, m: Model = SPM, wall: int | None = None) -> Configuration:
    """Fire every applicable vertical rule at once, from a snapshot of ``c``."""
    if m.kind != "spm":
        raise UnsupportedModeError("parallel mode is only defined for SPM")
    return Configuration(tuple(_parallel_once(list(as_configuration(c).heights), wall)))


def _spm_sequential(a: list[int], wall: int | None, step_limit: int) -> int:
    # leftmost-first; after firing at i the only new cliff left of i+1 can be i-1
    i = 0
    steps = 0
    while True:
        while True:
            last = len(a) if wall is None else min(len(a), wall - 1)
            if i >= last:
                return steps
            nxt = a[i + 1] if i + 1 < len(a) else 0
            if a[i] - nxt >= 2:
                break
            i += 1
        if steps >= step_limit:
            raise DivergenceError(f"no fixed point within {step_limit} steps")
        if i + 1 == len(a):
            a.append(0)
        a[i] -= 1
        a[i + 1] += 1
        steps += 1
        if i:
            i -= 1


def run_to_fixpoint_naive(
    c,
    m: Model = SPM,
    mode: str = SEQUENTIAL,
    step_limit: int = DEFAULT_STEP_LIMIT,
    wall: int | None = None,
) -> tuple[Configuration, int]:
    """Simulate until no rule applies; return the fixed point and the step count.

    Sequential mode always fires the leftmost applicable move.  ``wall``
    forbids moves into column ``wall`` and beyond.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    c = as_configuration(c)
    a = list(c.heights)
    if mode == PARALLEL:
        if m.kind != "spm":
            raise UnsupportedModeError("parallel mode is only defined for SPM")
        steps = 0
        cur = list(_strip(a))
        while True:
            nxt = _parallel_once(cur, wall)
            if nxt == cur:
                return Configuration(tuple(cur)), steps
            if steps >= step_limit:
                raise DivergenceError(f"no fixed point within {step_limit} steps")
            cur = nxt
            steps += 1
    if m.kind == "spm":
        steps = _spm_sequential(a, wall, step_limit)
        return Configuration(tuple(a)), steps
    steps = 0
    while True:
        moves = applicable_moves(c, m, wall)
        if not moves:
            return c, steps
        if steps >= step_limit:
            raise DivergenceError(f"no fixed point within {step_limit} steps")
        c = apply_move(c, moves[0], m)
        steps += 1


def trajectory(c, m: Model = SPM, mode: str = SEQUENTIAL, step_limit: int = DEFAULT_STEP_LIMIT) -> Iterable[Configuration]:
    """Yield every configuration from ``c`` to its fixed point (inclusive)."""
    c = as_configuration(c)
    yield c
    for _ in range(step_limit):
        if mode == PARALLEL:
            nxt = step_parallel(c, m)
            if nxt == c:
                return
        else:
            moves = applicable_moves(c, m)
            if not moves:
                return
            nxt = apply_move(c, moves[0], m)
        c = nxt
        yield c
    raise DivergenceError(f"no fixed point within {step_limit} steps")


def phi(c) -> int:
    """Potential sum_i a_i (a_i + 1) / 2; strictly decreases under every rule."""
    return sum(h * (h + 1) // 2 for h in as_configuration(c).heights)


def height_differences(c) -> tuple[int, ...]:
    a = as_configuration(c).heights
    return tuple(a[i] - a[i + 1] for i in range(len(a) - 1))
