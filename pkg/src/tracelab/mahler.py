"""Columns that stay inside ``{0, ..., p-1}``: constructions, searches, pictures."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .arith import DIGIT_CHARS, Params, default_budget
from .automaton import Configuration, SpaceTimeDiagram, fmul_table
from .errors import BudgetExceeded, ConsistencyViolation, NoChoiceExists


@dataclass(frozen=True)
class ConstrainedPrefix:
    """``left_digits[k]`` is ``z[-(k+1)]``; ``z[0] = seed`` and ``z[i] = 0`` for i > 0.

    ``trace[t-1]`` is ``tr(z)[t]`` for ``t = 1 .. steps``, all below p.
    ``choices[k]`` lists every digit that would have worked at step k+1.
    """

    params: Params
    seed: int
    left_digits: tuple[int, ...]
    trace: tuple[int, ...]
    choices: tuple[tuple[int, ...], ...]

    def configuration(self) -> Configuration:
        core = tuple(reversed(self.left_digits)) + (self.seed,)
        return Configuration(0, core, 0, -len(self.left_digits))

    @property
    def value(self) -> int:
        """The integer represented by ``z`` with zeros left of the prefix."""
        B = self.params.base
        return sum(d * B ** (k + 1) for k, d in enumerate(self.left_digits)) + self.seed


def build_constrained_prefix(steps: int, params: Params) -> ConstrainedPrefix:
    """Choose ``z[-1], z[-2], ...`` so that every trace digit ``tr(z)[i]``,
    ``1 <= i <= steps``, is below p.

    Only the dependence cone is kept: after fixing ``z[-i]``, row ``t`` is
    known on positions ``-(i-t) .. t`` (zeros further right), so each step
    costs O(i) per candidate digit.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    p, q, B = params.p, params.q, params.base
    f = fmul_table(params, "p_over_q").ravel().tolist()

    def rule(a, c, b):
        return f[(a * B + c) * B + b]

    # rows[t] is a list of digits for positions lo_t .. t, lo_t = -(i - t)
    rows = [[p]]
    left, trace, choices = [], [], []
    for i in range(1, steps + 1):
        candidates = []
        for d in range(B):
            new_rows = _extend(rows, d, rule)
            candidates.append((d, new_rows))
        good = [(d, r) for d, r in candidates if r[i][0] < p]
        if not good:
            raise NoChoiceExists(f"no digit keeps the column below {p} at step {i}")
        digits = tuple(d for d, _ in good)
        values = {r[i][0] for _, r in good}
        if len(values) != 1 or len(digits) != p or len({d % q for d in digits}) != 1:
            raise ConsistencyViolation(f"step {i}: valid choices {digits} are not one residue class mod {q}")
        reached = {r[i][0] for _, r in candidates}
        if len(reached) != q or len({v % p for v in reached}) != 1:
            raise ConsistencyViolation(f"step {i}: reachable digits {sorted(reached)} are not a Q_pq class")
        d, rows = good[0]
        left.append(d)
        trace.append(values.pop())
        choices.append(digits)
    return ConstrainedPrefix(params, p, tuple(left), tuple(trace), tuple(choices))


def _extend(rows, d, rule):
    """Rows after prepending digit d on row 0 and adding one more row.

    Input: ``len(rows) = i`` rows, row t spanning positions ``-(i-1-t) .. t``.
    Output: ``i+1`` rows, row t spanning ``-(i-t) .. t``.
    """
    out = [[d] + rows[0]]
    for t in range(1, len(rows)):
        above = out[t - 1]
        # new leftmost digit of row t needs the first three digits of row t-1
        out.append([rule(above[0], above[1], above[2])] + rows[t])
    above = out[-1] + [0, 0]
    # row i spans -0 .. i; its positions j use row i-1 at j-1..j+1
    last = [rule(above[k], above[k + 1], above[k + 2]) for k in range(len(above) - 2)]
    out.append(last)
    return out


# -- column searches -----------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    """``run_length`` steps starting at t = 0 stayed below p; ``first_violation``
    is the first step that did not, or None within the horizon."""

    numerator: int
    den_exp: int
    base: int
    run_length: int
    first_violation: int | None

    @property
    def xi(self) -> Fraction:
        return Fraction(self.numerator, self.base ** self.den_exp)


def first_fraction_digits(xi, steps: int, params: Params) -> list[int]:
    """``floor(pq * frac((p/q)**t * xi))`` for ``t = 0 .. steps-1``."""
    xi = Fraction(xi)
    num, den = xi.numerator, xi.denominator
    B = params.base
    out = []
    for _ in range(steps):
        out.append((num % den) * B // den)
        num *= params.p
        den *= params.q
    return out


def _run(num, den_exp, steps, params):
    xi = Fraction(num, params.base ** den_exp)
    digits = first_fraction_digits(xi, steps, params)
    for t, d in enumerate(digits):
        if d >= params.p:
            return SearchResult(num, den_exp, params.base, t, t)
    return SearchResult(num, den_exp, params.base, steps, None)


def _run_batch(args):
    batch, steps, p, q = args
    params = Params(p, q)
    return [_run(m, k, steps, params) for m, k in batch]


def search_candidates(max_num: int, max_den_exp: int, params: Params):
    """``(m, k)`` with ``xi = m / (pq)**k``, each value listed once."""
    B = params.base
    for k in range(max_den_exp + 1):
        for m in range(1, max_num + 1):
            if k and m % B == 0:
                continue
            yield m, k


def search_finite_columns(max_num: int, max_den_exp: int, steps: int, params: Params, *,
                          budget: int | None = None, workers: int = 1) -> list[SearchResult]:
    """Rank terminating ``xi`` by how long the first fractional digit of
    ``(p/q)**t * xi`` stays below p, starting at ``t = 0``."""
    budget = default_budget() if budget is None else budget
    candidates = list(search_candidates(max_num, max_den_exp, params))
    if len(candidates) * max(steps, 1) > budget:
        raise BudgetExceeded(len(candidates) * steps, budget)
    if workers > 1 and len(candidates) > 1:
        size = -(-len(candidates) // (4 * workers))
        batches = [(candidates[i:i + size], steps, params.p, params.q) for i in range(0, len(candidates), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_batch, batches) for r in part]
    else:
        results = [_run(m, k, steps, params) for m, k in candidates]
    results.sort(key=lambda r: (-r.run_length, r.den_exp, r.numerator))
    return results


# -- rendering -------------------------------------------------------------


def render_diagram(x: Configuration, steps: int, window: tuple[int, int], params: Params,
                   style: str = "ascii", direction: str = "p_over_q") -> bytes:
    """ASCII (one character per digit) or plain PGM (P2) picture of rows
    ``0 .. steps-1`` restricted to positions ``window[0] .. window[1]``.

    PGM grey levels are ``floor(255 * (1 - d / (pq-1)))``, so 0 is white.
    """
    lo, hi = window
    if hi < lo:
        raise ValueError("empty window")
    diagram = SpaceTimeDiagram.build(x, params, steps, direction)
    rows = diagram.matrix(lo, hi)
    return render_matrix(rows, hi - lo + 1, params, style)


def render_matrix(rows, width: int, params: Params, style: str) -> bytes:
    B = params.base
    if style == "ascii":
        return "".join("".join(DIGIT_CHARS[d] for d in row) + "\n" for row in rows).encode()
    if style == "pgm":
        lines = ["P2", f"{width} {len(rows)}", "255"]
        for row in rows:
            lines.append(" ".join(str(255 * (B - 1 - d) // (B - 1)) for d in row))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown style {style!r}")
