"""Companion base-p/q digits and their link to column traces."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import Params, md
from .automaton import Configuration
from .errors import CollisionFound, ConsistencyViolation
from .language import trace_of


@dataclass(frozen=True)
class CompanionWord:
    """Companion digits at indices ``start .. start+len(digits)-1``."""

    digits: tuple[int, ...]
    start: int = 0

    def __getitem__(self, i):
        return self.digits[i - self.start]

    def __len__(self):
        return len(self.digits)


def companion_range(params: Params) -> range:
    return range(-(params.q - 1), params.p)


def psi(xi, params: Params) -> int:
    """``q * floor(p/q * xi) - p * floor(xi)`` for ``xi > 0``."""
    xi = Fraction(xi)
    if xi <= 0:
        raise ValueError(f"psi needs xi > 0, got {xi}")
    p, q = params.p, params.q
    value = q * math.floor(Fraction(p, q) * xi) - p * math.floor(xi)
    if value not in companion_range(params):
        raise ConsistencyViolation(f"psi({xi}) = {value} outside the companion digit range")
    shifted = q * math.floor(Fraction(p, q) * (xi + q)) - p * math.floor(xi + q)
    if shifted != value:
        raise ConsistencyViolation(f"psi is not q-periodic at {xi}")
    return value


def phi_window(xi, i_from: int, i_to: int, params: Params) -> CompanionWord:
    """Companion digits ``psi((p/q)**i * xi)`` for ``i_from <= i <= i_to``."""
    if i_from > i_to:
        raise ValueError("empty index range")
    xi = Fraction(xi)
    ratio = Fraction(params.p, params.q)
    v = xi * ratio ** i_from
    out = []
    for _ in range(i_from, i_to + 1):
        out.append(psi(v, params))
        v *= ratio
    return CompanionWord(tuple(out), i_from)


def phi_digit(prev: int, nxt: int, params: Params) -> int:
    """``q * md_p(nxt) - p * md_q(prev)`` for consecutive trace letters."""
    return params.q * md(nxt, params.p) - params.p * md(prev, params.q)


def phi_of_word(y, params: Params, start: int = 0) -> CompanionWord:
    """Sliding-block image of a finite trace word; one letter shorter."""
    y = list(y)
    return CompanionWord(tuple(phi_digit(y[i], y[i + 1], params) for i in range(len(y) - 1)), start)


def phi_of_trace(x, t_from: int, t_to: int, params: Params) -> CompanionWord:
    """Image at indices ``t_from .. t_to`` of the column-0 trace.

    ``x`` is either a configuration (its trace is simulated over
    ``t_from .. t_to + 1``) or a trace word whose first letter is at time
    ``t_from``.
    """
    if t_from > t_to:
        raise ValueError("empty index range")
    if isinstance(x, Configuration):
        y = trace_of(x, 0, t_to - t_from + 2, params, start=t_from)
    else:
        y = tuple(x)
        if len(y) < t_to - t_from + 2:
            raise ValueError("trace word too short for the requested range")
    return phi_of_word(y[: t_to - t_from + 2], params, t_from)


def compfrac_reconstruct(xi, N: int, params: Params) -> tuple[Fraction, Fraction]:
    """Partial sum ``(1/p) * sum_{i<=N} (q/p)**i * phi(xi)[i]`` and its distance
    to ``frac(xi)``. The distance is checked against ``(q/p)**(N+1)``."""
    xi = Fraction(xi)
    p, q = params.p, params.q
    digits = phi_window(xi, 0, N, params).digits
    ratio = Fraction(q, p)
    partial = sum((ratio ** i * d for i, d in enumerate(digits)), Fraction(0)) / p
    frac = xi - math.floor(xi)
    error = abs(frac - partial)
    if error > ratio ** (N + 1):
        raise ConsistencyViolation(f"compfrac error {error} exceeds {(ratio ** (N + 1))} at xi={xi}, N={N}")
    return partial, error


@dataclass(frozen=True)
class InjectivityReport:
    length: int
    words: int
    distinct_images: int


def reconstruct_word(image, first_mod_p: int, last_mod_q: int, params: Params) -> tuple[int, ...]:
    """Invert the sliding-block image of a word given its two boundary residues.

    ``image[i-1]`` fixes the letter at ``i`` modulo p and ``image[i]`` fixes it
    modulo q; the missing residues at the two ends are supplied.
    """
    p, q = params.p, params.q
    inv_q_mod_p = pow(q, -1, p)
    inv_p_mod_q = pow(p, -1, q)
    length = len(image) + 1
    mod_p = [first_mod_p] + [(v * inv_q_mod_p) % p for v in image]
    mod_q = [(-v * inv_p_mod_q) % q for v in image] + [last_mod_q]
    out = []
    for i in range(length):
        d = next(d for d in range(params.base) if d % p == mod_p[i] and d % q == mod_q[i])
        out.append(d)
    return tuple(out)


def phi_injectivity_check(params: Params, length: int, words=None) -> InjectivityReport:
    """Every word (default: all words of ``length``) is recovered from its image
    plus boundary residues, and distinct words have distinct such data."""
    if length < 2:
        raise ValueError("words need length >= 2")
    if words is None:
        words = itertools.product(range(params.base), repeat=length)
    seen = {}
    count = 0
    for w in words:
        w = tuple(w)
        image = phi_of_word(w, params).digits
        data = (image, w[0] % params.p, w[-1] % params.q)
        back = reconstruct_word(*data, params)
        if back != w:
            raise CollisionFound(f"{w} reconstructs to {back}")
        if data in seen and seen[data] != w:
            raise CollisionFound(f"{w} and {seen[data]} share image data {data}")
        seen[data] = w
        count += 1
    return InjectivityReport(length, count, len(seen))


def companion_rows(xi, t_from: int, t_to: int, params: Params):
    """Rows ``(i, trace col 0, trace col 1, Phi, phi, match, partial, error, bound)``.

    ``partial``/``error``/``bound`` are the compfrac reconstruction with
    ``N = i``; they are only defined for ``i >= 0`` and left ``None`` otherwise.
    """
    from .numbers import encode

    xi = Fraction(xi)
    x = encode(xi, params)
    col0 = trace_of(x, 0, t_to - t_from + 2, params, start=t_from)
    col1 = trace_of(x, 1, t_to - t_from + 1, params, start=t_from)
    big_phi = phi_of_word(col0, params, t_from)
    small_phi = phi_window(xi, t_from, t_to, params)
    rows = []
    for k, i in enumerate(range(t_from, t_to + 1)):
        if i >= 0:
            partial, error = compfrac_reconstruct(xi, i, params)
            bound = Fraction(params.q, params.p) ** (i + 1)
        else:
            partial = error = bound = None
        rows.append((i, col0[k], col1[k], big_phi.digits[k], small_phi.digits[k],
                     big_phi.digits[k] == small_phi.digits[k], partial, error, bound))
    return rows
