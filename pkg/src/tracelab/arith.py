"""Digit-level arithmetic in base pq.

Everything here is parameterised by an explicit :class:`Params` value; there
is no module-level state, so several (p, q) pairs can be used side by side.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidParams, ParseError

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"

DEFAULT_BUDGET = 10**9
BUDGET_ENV = "TRACELAB_BUDGET"


def default_budget() -> int:
    """Enumeration cap, overridable through ``TRACELAB_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParseError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ParseError(f"{BUDGET_ENV} must be positive")
    return value


@dataclass(frozen=True)
class Params:
    """A coprime pair p, q > 1. The working base is ``p * q``."""

    p: int
    q: int

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InvalidParams(f"{name} must be an integer, got {v!r}")
            if v <= 1:
                raise InvalidParams(f"{name} must be > 1, got {v}")
        if math.gcd(self.p, self.q) != 1:
            raise InvalidParams(f"p={self.p} and q={self.q} are not coprime")
        if self.p * self.q > len(DIGIT_CHARS):
            raise InvalidParams(f"base {self.p * self.q} exceeds the supported maximum {len(DIGIT_CHARS)}")

    @property
    def base(self) -> int:
        return self.p * self.q

    def swapped(self) -> "Params":
        return Params(self.q, self.p)

    def require_p_greater(self) -> None:
        if self.p <= self.q:
            raise InvalidParams(f"this operation needs p > q, got p={self.p}, q={self.q}")

    @cached_property
    def marker_digits(self) -> tuple[int, ...]:
        """The digits n*p for 1 <= n < q (tail markers)."""
        return tuple(n * self.p for n in range(1, self.q))

    def __str__(self):
        return f"{self.p}/{self.q}"


def md(m: int, n: int) -> int:
    """Remainder of m modulo n in [0, n), also for negative m."""
    if n <= 1:
        raise ValueError(f"modulus must be > 1, got {n}")
    return m - n * (m // n)


def decompose(d: int, params: Params, direction: str = "by_q") -> tuple[int, int]:
    """Split a digit as ``hi * q + lo`` (``by_q``) or ``hi * p + lo`` (``by_p``)."""
    _check_digit(d, params)
    if direction == "by_q":
        return divmod(d, params.q)
    if direction == "by_p":
        return divmod(d, params.p)
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class ResidueClass:
    modulus_part: int
    representative: int
    members: tuple[int, ...]

    def __contains__(self, d):
        return d in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def residue_class(a: int, params: Params, kind: str = "Qpq") -> ResidueClass:
    """``Qpq``: digits congruent to a mod p (q of them).
    ``Qqp``: digits congruent to a mod q (p of them).
    """
    _check_digit(a, params)
    if kind == "Qpq":
        m = params.p
    elif kind == "Qqp":
        m = params.q
    else:
        raise ValueError(f"unknown residue class kind {kind!r}")
    members = tuple(d for d in range(params.base) if d % m == a % m)
    return ResidueClass(m, a, members)


def residue_mask(a: int, modulus: int, base: int) -> int:
    """Bitmask over digits of ``{d < base : d = a mod modulus}``."""
    mask = 0
    for d in range(a % modulus, base, modulus):
        mask |= 1 << d
    return mask


def _check_digit(d, params):
    if not 0 <= d < params.base:
        raise ValueError(f"digit {d} outside [0, {params.base})")


# -- packed words --------------------------------------------------------


def pack_word(digits, base: int) -> int:
    """Positional base-``base`` integer of a word, first letter most significant."""
    key = 0
    for d in digits:
        key = key * base + d
    return key


def unpack_word(key: int, length: int, base: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        key, out[i] = divmod(key, base)
    if key:
        raise ValueError("packed key longer than the stated length")
    return tuple(out)


@dataclass(frozen=True)
class DigitWord:
    """A finite word over ``{0, ..., base-1}`` with a hashable packed form."""

    digits: tuple[int, ...]
    base: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if any(not 0 <= d < self.base for d in self.digits):
            raise ValueError(f"word {self.digits} has digits outside base {self.base}")

    @property
    def key(self) -> tuple[int, int]:
        return pack_word(self.digits, self.base), len(self.digits)

    @classmethod
    def from_key(cls, key: int, length: int, base: int) -> "DigitWord":
        return cls(unpack_word(key, length, base), base)

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return format_digits(self.digits)


def format_digits(digits) -> str:
    return "".join(DIGIT_CHARS[d] for d in digits)


def parse_digits(text: str, base: int) -> tuple[int, ...]:
    out = []
    for ch in text.strip().lower():
        v = DIGIT_CHARS.find(ch)
        if v < 0 or v >= base:
            raise ParseError(f"{ch!r} is not a base-{base} digit")
        out.append(v)
    return tuple(out)
