"""Exact conversion between nonnegative rationals and base-pq configurations."""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .arith import Params
from .automaton import Configuration, apply, fmul_automaton
from .errors import ConsistencyViolation, LeftTailNonzero, NonTerminating, ParseError

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a"`` or ``"a/b"``. Decimal points and exponents are rejected."""
    m = _RATIONAL.match(text)
    if not m:
        raise ParseError(f"not an exact rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError("zero denominator")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fraction_digits(den: int, base: int) -> int | None:
    """Smallest k with ``den | base**k``, or None when no such k exists."""
    d = den
    while (g := math.gcd(d, base)) > 1:
        d //= g
    if d != 1:
        return None
    k, power = 0, 1
    while power % den:
        k += 1
        power *= base
    return k


def encode(xi, params: Params) -> Configuration:
    """Finite configuration of the terminating base-pq expansion of ``xi``."""
    xi = Fraction(xi)
    if xi < 0:
        raise ValueError(f"cannot encode negative value {xi}")
    B = params.base
    k = fraction_digits(xi.denominator, B)
    if k is None:
        raise NonTerminating(f"{xi} has no terminating base-{B} expansion")
    whole, rem = divmod(xi.numerator, xi.denominator)
    int_digits = []
    while whole:
        whole, d = divmod(whole, B)
        int_digits.append(d)
    int_digits.reverse()
    frac_digits = []
    while rem:
        d, rem = divmod(rem * B, xi.denominator)
        frac_digits.append(d)
    if len(frac_digits) > k:
        raise ConsistencyViolation("fractional expansion longer than the denominator allows")
    offset = 1 - len(int_digits)
    return Configuration(0, tuple(int_digits + frac_digits), 0, offset)


def decode(x: Configuration, params: Params) -> Fraction:
    """Exact value of a configuration with a zero left tail.

    A nonzero right tail ``r`` starting at position ``e`` contributes the
    geometric sum ``r * B**(1-e) / (B-1)``.
    """
    if x.left != 0:
        raise LeftTailNonzero("left tail must be 0 for the value to be finite")
    B = params.base
    total = Fraction(0)
    for i, d in enumerate(x.core, start=x.offset):
        if d:
            total += Fraction(d) * Fraction(B) ** (-i)
    if x.right:
        total += Fraction(x.right) * Fraction(B) ** (1 - x.end) / (B - 1)
    return total


def verify_multiplication(xi, params: Params, steps: int, direction: str = "p_over_q") -> list[Fraction]:
    """Run the automaton ``steps`` times from ``encode(xi)`` and check every value.

    Returns the decoded trajectory ``[F(x), ..., F^steps(x)]``.
    """
    xi = Fraction(xi)
    factor = Fraction(params.p, params.q) if direction == "p_over_q" else Fraction(params.q, params.p)
    automaton = fmul_automaton(direction)
    x = encode(xi, params)
    expected = xi
    out = []
    for t in range(1, steps + 1):
        x = apply(x, params, automaton)
        expected *= factor
        got = decode(x, params)
        if got != expected:
            raise ConsistencyViolation(f"step {t}: automaton gives {got}, arithmetic gives {expected}")
        if not x.is_finite:
            raise ConsistencyViolation(f"step {t}: finite input produced a non-finite image {x}")
        out.append(got)
    return out


def digit_of(xi, i: int, params: Params) -> int:
    """Digit of ``xi`` at position ``i`` in the terminating expansion."""
    xi = Fraction(xi)
    return math.floor(xi * Fraction(params.base) ** i) % params.base
