"""Multiplication automata on eventually constant configurations.

Position convention (used everywhere in the package): position ``i`` holds the
coefficient of ``(pq) ** -i``. Position 0 is the units digit, negative
positions are the more significant integer digits and position 1 is the first
digit after the point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import DIGIT_CHARS, Params, format_digits, parse_digits
from .errors import ConsistencyViolation, ParseError, UndefinedTriple

AUTOMATA = ("mul_p", "mul_q", "shift", "shift_inverse", "fmul_p_over_q", "fmul_q_over_p")
DIRECTIONS = ("p_over_q", "q_over_p")


# -- local rules ---------------------------------------------------------


def mul_rule(a: int, b: int, params: Params, direction: str = "by_p") -> int:
    """Multiply-by-p (``by_p``) or multiply-by-q (``by_q``) local rule.

    With ``a = a1*q + a0`` and ``b = b1*q + b0`` the by-p rule returns
    ``a0*p + b1``; the by-q rule is the same with p and q exchanged.
    """
    if direction == "by_p":
        m, other = params.p, params.q
    elif direction == "by_q":
        m, other = params.q, params.p
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return (a % other) * m + b // other


def fmul_rule(a: int, c: int, b: int, params: Params, direction: str = "p_over_q") -> int:
    """Radius-1 rule of the multiply-by-fraction automaton.

    ``a``, ``c``, ``b`` are the digits at positions i-1, i, i+1.
    """
    by = _mul_direction(direction)
    return mul_rule(mul_rule(a, c, params, by), mul_rule(c, b, params, by), params, by)


def _mul_direction(direction):
    if direction == "p_over_q":
        return "by_p"
    if direction == "q_over_p":
        return "by_q"
    raise ValueError(f"unknown direction {direction!r}")


def inverse_direction(direction: str) -> str:
    return "q_over_p" if direction == "p_over_q" else "p_over_q"


@lru_cache(maxsize=None)
def mul_table(params: Params, direction: str = "by_p") -> np.ndarray:
    B = params.base
    a, b = np.indices((B, B))
    m, other = (params.p, params.q) if direction == "by_p" else (params.q, params.p)
    table = (a % other) * m + b // other
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def fmul_table(params: Params, direction: str = "p_over_q") -> np.ndarray:
    """Dense ``(B, B, B)`` table of the fused rule, indexed ``[a, c, b]``.

    Built from the literal composition of the two-digit rule and checked
    against the closed-form fused expression; a mismatch is a transcription
    bug and raises immediately.
    """
    m2 = mul_table(params, _mul_direction(direction))
    B = params.base
    a, c, b = np.indices((B, B, B))
    composed = m2[m2[a, c], m2[c, b]]
    fused = np.array(
        [[[fmul_rule(x, y, z, params, direction) for z in range(B)] for y in range(B)] for x in range(B)]
    )
    if not np.array_equal(composed, fused):
        raise ConsistencyViolation("fused fmul table disagrees with the literal composition")
    composed = composed.astype(np.uint8)
    composed.setflags(write=False)
    return composed


@lru_cache(maxsize=None)
def _flat_rule(params: Params, automaton: str):
    """(flat lookup list, memory, anticipation) for the Python-level engine."""
    if automaton == "mul_p":
        return mul_table(params, "by_p").ravel().tolist(), 0, 1
    if automaton == "mul_q":
        return mul_table(params, "by_q").ravel().tolist(), 0, 1
    if automaton == "fmul_p_over_q":
        return fmul_table(params, "p_over_q").ravel().tolist(), -1, 1
    if automaton == "fmul_q_over_p":
        return fmul_table(params, "q_over_p").ravel().tolist(), -1, 1
    raise ValueError(f"unknown automaton {automaton!r}")


# -- configurations ------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Bi-infinite digit sequence that is constant outside a finite core.

    Positions ``< offset`` hold ``left``, positions ``offset .. offset+len(core)-1``
    hold the core, positions beyond hold ``right``. Instances are always
    canonical: the core never starts with ``left`` nor ends with ``right``.
    """

    left: int
    core: tuple[int, ...]
    right: int
    offset: int = 0

    def __post_init__(self):
        core = list(self.core)
        offset = self.offset
        start = 0
        while start < len(core) and core[start] == self.left:
            start += 1
        offset += start
        core = core[start:]
        while core and core[-1] == self.right:
            core.pop()
        if not core and self.left == self.right:
            offset = 0
        object.__setattr__(self, "core", tuple(core))
        object.__setattr__(self, "offset", offset)

    @classmethod
    def zero(cls) -> "Configuration":
        return cls(0, (), 0, 0)

    @classmethod
    def finite(cls, core, offset: int = 0) -> "Configuration":
        return cls(0, tuple(core), 0, offset)

    @property
    def is_finite(self) -> bool:
        return self.left == 0 and self.right == 0

    @property
    def end(self) -> int:
        """First position of the right tail."""
        return self.offset + len(self.core)

    def digit_at(self, i: int) -> int:
        if i < self.offset:
            return self.left
        if i >= self.end:
            return self.right
        return self.core[i - self.offset]

    def window(self, lo: int, hi: int) -> tuple[int, ...]:
        """Digits at positions lo..hi inclusive."""
        return tuple(self.digit_at(i) for i in range(lo, hi + 1))

    def glue(self, other: "Configuration", j: int) -> "Configuration":
        """Positions < j from self, positions >= j from other."""
        lo = min(self.offset, other.offset, j) - 1
        hi = max(self.end, other.end, j) + 1
        digits = [self.digit_at(i) if i < j else other.digit_at(i) for i in range(lo, hi)]
        return Configuration(self.left, tuple(digits), other.right, lo)

    def to_text(self) -> str:
        """``left|core-with-dot|right``; the dot follows position 0."""
        lo = min(self.offset, 0)
        hi = max(self.end - 1, 0)
        parts = []
        for i in range(lo, hi + 1):
            parts.append(DIGIT_CHARS[self.digit_at(i)])
            if i == 0:
                parts.append(".")
        return f"{DIGIT_CHARS[self.left]}|{''.join(parts)}|{DIGIT_CHARS[self.right]}"

    @classmethod
    def parse(cls, text: str, base: int) -> "Configuration":
        fields = text.strip().split("|")
        if len(fields) != 3:
            raise ParseError(f"configuration must look like 'left|core.digits|right', got {text!r}")
        left_s, core_s, right_s = (f.strip() for f in fields)
        if len(left_s) != 1 or len(right_s) != 1:
            raise ParseError("tails must be single digits")
        if core_s.count(".") > 1:
            raise ParseError("at most one '.' allowed in the core")
        if "." in core_s:
            before, after = core_s.split(".")
        else:
            before, after = core_s, ""
        left = parse_digits(left_s, base)[0]
        right = parse_digits(right_s, base)[0]
        digits = parse_digits(before, base) + parse_digits(after, base)
        offset = 1 - len(parse_digits(before, base))
        return cls(left, digits, right, offset)

    def __str__(self):
        return self.to_text()


def apply(x: Configuration, params: Params, automaton: str = "fmul_p_over_q") -> Configuration:
    """Exact image of an eventually constant configuration."""
    if automaton == "shift":
        return Configuration(x.left, x.core, x.right, x.offset - 1)
    if automaton == "shift_inverse":
        return Configuration(x.left, x.core, x.right, x.offset + 1)
    flat, memory, anticipation = _flat_rule(params, automaton)
    B = params.base
    pad = anticipation - memory
    ext = [x.left] * pad + list(x.core) + [x.right] * pad
    if anticipation - memory == 2:
        out = [flat[(ext[j] * B + ext[j + 1]) * B + ext[j + 2]] for j in range(len(ext) - 2)]
        left = flat[(x.left * B + x.left) * B + x.left]
        right = flat[(x.right * B + x.right) * B + x.right]
    else:
        out = [flat[ext[j] * B + ext[j + 1]] for j in range(len(ext) - 1)]
        left = flat[x.left * B + x.left]
        right = flat[x.right * B + x.right]
    # ext[0] sits at offset - pad; output j is the image at (offset - pad) + j - memory
    return Configuration(left, tuple(out), right, x.offset - pad - memory)


def fmul_automaton(direction: str) -> str:
    return "fmul_" + direction


def iterate(x: Configuration, params: Params, steps: int, direction: str = "p_over_q") -> list[Configuration]:
    """Rows ``x, F(x), ..., F^(steps-1)(x)``; negative steps run the inverse."""
    automaton = fmul_automaton(direction if steps >= 0 else inverse_direction(direction))
    rows = [x]
    for _ in range(abs(steps) - 1):
        rows.append(apply(rows[-1], params, automaton))
    return rows


@dataclass(frozen=True)
class SpaceTimeDiagram:
    rows: tuple[Configuration, ...]
    params: Params
    steps: int

    @classmethod
    def build(cls, x: Configuration, params: Params, steps: int, direction: str = "p_over_q"):
        return cls(tuple(iterate(x, params, steps, direction)) if steps else (), params, steps)

    def matrix(self, lo: int, hi: int) -> list[tuple[int, ...]]:
        return [row.window(lo, hi) for row in self.rows]

    def bounds(self) -> tuple[int, int]:
        """Smallest position window that contains every row's core."""
        lo = min((r.offset for r in self.rows if r.core), default=0)
        hi = max((r.end - 1 for r in self.rows if r.core), default=0)
        return min(lo, 0), max(hi, 0)


def random_configuration(rng: random.Random, params: Params, *, max_core: int = 12,
                         finite: bool = False, spread: int = 6) -> Configuration:
    B = params.base
    core = tuple(rng.randrange(B) for _ in range(rng.randint(0, max_core)))
    offset = rng.randint(-spread, spread)
    if finite:
        return Configuration(0, core, 0, offset)
    return Configuration(rng.randrange(B), core, rng.randrange(B), offset)


# -- left determination --------------------------------------------------


@dataclass(frozen=True)
class DeltaRule:
    """Column-to-the-left reconstruction rule.

    ``table[u, c, v]`` is the digit ``x[0]`` given ``u = F^-1(x)[1]``,
    ``c = x[1]`` and ``v = F(x)[1]``; ``-1`` marks unrealizable triples.
    """

    params: Params
    direction: str
    table: np.ndarray

    def __call__(self, u: int, c: int, v: int) -> int:
        d = int(self.table[u, c, v])
        if d < 0:
            raise UndefinedTriple((u, c, v))
        return d

    @property
    def realizable(self) -> int:
        return int((self.table >= 0).sum())

    def apply_word(self, y) -> list[int]:
        """Image of a finite trace word; two letters shorter than ``y``."""
        return [self(y[t - 1], y[t], y[t + 1]) for t in range(1, len(y) - 1)]


def derive_delta(params: Params, direction: str = "p_over_q") -> DeltaRule:
    """Tabulate the left-determination rule by exhausting all digit triples."""
    B = params.base
    fwd = fmul_table(params, direction)
    inv = fmul_table(params, inverse_direction(direction))
    table = np.full((B, B, B), -1, dtype=np.int16)
    for x0 in range(B):
        for x1 in range(B):
            for x2 in range(B):
                u = inv[x0, x1, x2]
                v = fwd[x0, x1, x2]
                prev = table[u, x1, v]
                if prev >= 0 and prev != x0:
                    raise ConsistencyViolation(
                        f"triple {(int(u), x1, int(v))} determines both {int(prev)} and {x0}")
                table[u, x1, v] = x0
    table.setflags(write=False)
    return DeltaRule(params, direction, table)


def widen_trace(y, delta: DeltaRule, width: int) -> list[tuple[int, ...]]:
    """Rebuild the ``width``-column trace ending at the column of ``y``.

    Entry ``k`` of the result is the tuple of columns ``j-width+1 .. j`` at
    time ``k + width - 1`` (relative to the first letter of ``y``), since each
    application of the rule loses one letter at both ends.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    columns = [list(y)]
    for _ in range(width - 1):
        columns.append(delta.apply_word(columns[-1]))
    trim = width - 1
    n = len(y) - 2 * trim
    if n <= 0:
        return []
    out = []
    for k in range(n):
        t = k + trim
        out.append(tuple(columns[d][t - d] for d in range(width - 1, -1, -1)))
    return out


def format_word(word) -> str:
    return format_digits(word)
