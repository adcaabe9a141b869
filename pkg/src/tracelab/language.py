"""Traces and the finite languages of the trace subshift.

Words are stored packed: a word ``w[0] .. w[n-1]`` over base ``B`` is the
integer ``sum(w[i] * B**(n-1-i))``, so the first letter is most significant.
Prepending ``a`` to a length-n word is ``a * B**n + key`` and the length-n
suffix of a longer key is ``key % B**n``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .arith import Params, default_budget, residue_mask, unpack_word
from .automaton import Configuration, apply, fmul_automaton, fmul_table, inverse_direction
from .errors import BudgetExceeded, CounterexampleFound, ShapeViolation

CHUNK_ROWS = 1 << 20
MAX_PACKED_BASE_POWER = np.iinfo(np.int64).max


def trace_of(x: Configuration, column: int, length: int, params: Params,
             direction: str = "p_over_q", start: int = 0) -> tuple[int, ...]:
    """Digits ``F^t(x)[column]`` for ``t = start .. start+length-1``."""
    if length <= 0:
        return ()
    forward = fmul_automaton(direction)
    backward = fmul_automaton(inverse_direction(direction))
    while start < 0:
        x = apply(x, params, backward)
        start += 1
    for _ in range(start):
        x = apply(x, params, forward)
    out = [x.digit_at(column)]
    for _ in range(length - 1):
        x = apply(x, params, forward)
        out.append(x.digit_at(column))
    return tuple(out)


def trace_from_window(w, params: Params, direction: str = "p_over_q") -> tuple[int, ...]:
    """Centre-column trace of a width ``2n-1`` window over ``n`` steps."""
    w = list(w)
    if len(w) % 2 == 0:
        raise ValueError(f"window length must be odd, got {len(w)}")
    table = fmul_table(params, direction)
    out = [w[len(w) // 2]]
    while len(w) > 1:
        w = [int(table[w[j], w[j + 1], w[j + 2]]) for j in range(len(w) - 2)]
        out.append(w[len(w) // 2])
    return tuple(out)


# -- vectorised window enumeration ---------------------------------------


def window_count(n: int, params: Params, back: int = 0) -> int:
    return params.base ** (2 * _radius(n, back) + 1)


def _radius(n, back):
    return max(back, n - 1 - back)


def centered_back(n: int) -> int:
    """Number of backward steps that minimises the window width."""
    return (n - 1) // 2


def _all_digit_rows(B, width):
    if width == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    grid = np.indices((B,) * width, dtype=np.uint8).reshape(width, -1).T
    return np.ascontiguousarray(grid)


def _step(table_flat, cur, B):
    idx = (cur[:, :-2].astype(np.int32) * B + cur[:, 1:-1]) * B + cur[:, 2:]
    return table_flat[idx]


def _trace_keys_chunk(windows, n, back, B, fwd, inv, powers):
    r = (windows.shape[1] - 1) // 2
    digits = np.empty((windows.shape[0], n), dtype=np.int64)
    digits[:, back] = windows[:, r]
    cur = windows
    for s in range(1, n - back):
        cur = _step(fwd, cur, B)
        digits[:, back + s] = cur[:, r - s]
    cur = windows
    for s in range(1, back + 1):
        cur = _step(inv, cur, B)
        digits[:, back - s] = cur[:, r - s]
    return np.unique(digits @ powers)


def trace_word_keys(n: int, params: Params, direction: str = "p_over_q", back: int = 0,
                    budget: int | None = None, workers: int = 1) -> np.ndarray:
    """Sorted packed keys of every trace word of length ``n``.

    Each word is read at column 0 over times ``-back .. n-1-back`` from every
    window of width ``2r+1`` (``r = max(back, n-1-back)``). With ``back = 0``
    this is the plain forward dependence cone; any other choice gives the
    same set because the automaton is invertible and the trace shift is
    shift-invariant.
    """
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    if not 0 <= back <= n - 1:
        raise ValueError("back must lie in [0, n-1]")
    B = params.base
    if B ** n > MAX_PACKED_BASE_POWER:
        raise BudgetExceeded(B ** n, MAX_PACKED_BASE_POWER)
    budget = default_budget() if budget is None else budget
    total = window_count(n, params, back)
    if total > budget:
        raise BudgetExceeded(total, budget)
    width = 2 * _radius(n, back) + 1
    lead = 0
    while B ** (width - lead) > CHUNK_ROWS and lead < width:
        lead += 1
    tail = _all_digit_rows(B, width - lead)
    fwd = np.ascontiguousarray(fmul_table(params, direction).ravel())
    inv = np.ascontiguousarray(fmul_table(params, inverse_direction(direction)).ravel())
    powers = np.array([B ** (n - 1 - i) for i in range(n)], dtype=np.int64)

    def run(prefix):
        head = np.broadcast_to(np.array(prefix, dtype=np.uint8), (tail.shape[0], lead))
        windows = np.hstack([head, tail]) if lead else tail
        return _trace_keys_chunk(windows, n, back, B, fwd, inv, powers)

    prefixes = list(itertools.product(range(B), repeat=lead))
    if workers > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, prefixes))
    else:
        parts = [run(pr) for pr in prefixes]
    return np.unique(np.concatenate(parts))


@dataclass
class LanguageLevel:
    """All length-n words of the trace language, optionally classified.

    ``pre_mask[i]`` is the bitmask of predecessor letters of ``words[i]``;
    ``w2`` holds the words with ``2p`` predecessors and ``w1`` those with ``p``.
    """

    n: int
    params: Params
    direction: str
    words: np.ndarray
    pre_mask: np.ndarray | None = None
    _set: set | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        key = word if isinstance(word, (int, np.integer)) else _pack(word, self.params.base)
        i = np.searchsorted(self.words, key)
        return bool(i < len(self.words) and self.words[i] == key)

    def word(self, i: int) -> tuple[int, ...]:
        return unpack_word(int(self.words[i]), self.n, self.params.base)

    def iter_words(self):
        for key in self.words.tolist():
            yield unpack_word(key, self.n, self.params.base)

    def contains_keys(self, keys) -> np.ndarray:
        return np.isin(keys, self.words)

    @property
    def classified(self) -> bool:
        return self.pre_mask is not None

    @cached_property
    def pre_size(self) -> np.ndarray:
        self._need_classes()
        return np.array([int(m).bit_count() for m in self.pre_mask.tolist()], dtype=np.int64)

    @property
    def w2(self) -> np.ndarray:
        return self.words[self.pre_size == 2 * self.params.p]

    @property
    def w1(self) -> np.ndarray:
        return self.words[self.pre_size == self.params.p]

    def predecessor_digits(self, i: int) -> frozenset[int]:
        self._need_classes()
        m = int(self.pre_mask[i])
        return frozenset(d for d in range(self.params.base) if m >> d & 1)

    def _need_classes(self):
        if self.pre_mask is None:
            raise ValueError("level was built without predecessor classification")


def _pack(word, base):
    key = 0
    for d in word:
        key = key * base + d
    return key


def enumerate_language(n: int, params: Params, direction: str = "p_over_q", *,
                       method: str = "window", classify: bool = True,
                       budget: int | None = None, workers: int = 1) -> LanguageLevel:
    """Exact ``L^n`` of the trace shift.

    ``method="window"`` reads traces forward from every width ``2n-1`` window
    (the definitional brute force); ``method="centered"`` reads them around
    time 0 using the inverse automaton, which needs width about ``n+1``.
    Classification builds level ``n+1`` with the centered method and reads
    each predecessor set off it.
    """
    if method == "window":
        back = 0
    elif method == "centered":
        back = centered_back(n)
    else:
        raise ValueError(f"unknown method {method!r}")
    words = trace_word_keys(n, params, direction, back, budget, workers)
    level = LanguageLevel(n, params, direction, words)
    if classify and n >= 1:
        upper = trace_word_keys(n + 1, params, direction, centered_back(n + 1), budget, workers)
        level.pre_mask = predecessor_masks(words, upper, n, params.base)
    return level


def predecessor_masks(words: np.ndarray, upper: np.ndarray, n: int, base: int) -> np.ndarray:
    """Bitmask of letters ``a`` with ``a w`` in ``upper`` for every ``w`` in ``words``."""
    Bn = base ** n
    suffix = upper % Bn
    prefix = upper // Bn
    order = np.argsort(suffix, kind="stable")
    suffix, prefix = suffix[order], prefix[order]
    bits = np.left_shift(np.int64(1), prefix.astype(np.int64))
    uniq, starts = np.unique(suffix, return_index=True)
    masks = np.bitwise_or.reduceat(bits, starts) if len(bits) else np.zeros(0, dtype=np.int64)
    pos = np.searchsorted(uniq, words)
    ok = (pos < len(uniq)) & (uniq[np.minimum(pos, len(uniq) - 1)] == words) if len(uniq) else np.zeros(len(words), bool)
    if not ok.all():
        missing = int(words[~ok][0])
        raise ShapeViolation(f"word {unpack_word(missing, n, base)} has no predecessor; language is not extendable")
    return masks[pos]


def allowed_predecessor_masks(params: Params) -> dict[int, str]:
    """Masks of one residue class mod q, or two adjacent ones."""
    B, q = params.base, params.q
    out = {}
    for r in range(q):
        one = residue_mask(r, q, B)
        two = one | residue_mask(r + 1, q, B)
        out[one] = f"Q_qp({r})"
        out.setdefault(two, f"Q_qp({r})+Q_qp({(r + 1) % q})")
    return out


def predecessors(w, level_next: LanguageLevel) -> frozenset[int]:
    """Predecessor letters of ``w`` read from the length ``|w|+1`` level.

    Raises :class:`ShapeViolation` unless the set is one residue class mod q
    or the union of two adjacent classes.
    """
    params = level_next.params
    B = params.base
    n = level_next.n - 1
    key = _pack(w, B)
    members = frozenset(a for a in range(B) if (a * B ** n + key) in level_next)
    mask = sum(1 << a for a in members)
    if mask not in allowed_predecessor_masks(params):
        raise ShapeViolation(f"pre({tuple(w)}) = {sorted(members)} is not one or two adjacent Q_qp classes")
    return members


def check_predecessor_shapes(level: LanguageLevel) -> int:
    """Check every word of a classified level; returns the number checked."""
    allowed = allowed_predecessor_masks(level.params)
    level._need_classes()
    for i, m in enumerate(level.pre_mask.tolist()):
        if m not in allowed:
            raise ShapeViolation(f"pre({level.word(i)}) has mask {m:b}")
    return len(level)


def letter_has_two_classes(a: int, params: Params) -> bool:
    """Letter-level criterion for ``|pre(a)| = 2p``."""
    p, q = params.p, params.q
    return (a * q) % p in {p - i for i in range(1, q)}


# -- W2 generator ---------------------------------------------------------


def construct_w2(n: int, params: Params, direction: str = "p_over_q") -> np.ndarray:
    """Packed words ``tr(x)[1..n]`` over ``x[0] = s`` (a marker digit), zeros to
    the right and ``x[-n..-1]`` free."""
    if n < 1:
        raise ValueError("n must be >= 1")
    B = params.base
    fwd = np.ascontiguousarray(fmul_table(params, direction).ravel())
    powers = np.array([B ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    free = _all_digit_rows(B, n)
    parts = []
    for s in params.marker_digits:
        right = np.zeros((free.shape[0], n + 1), dtype=np.uint8)
        right[:, 0] = s
        cur = np.hstack([free, right])
        digits = np.empty((cur.shape[0], n), dtype=np.int64)
        for t in range(1, n + 1):
            cur = _step(fwd, cur, B)
            digits[:, t - 1] = cur[:, n - t]
        parts.append(np.unique(digits @ powers))
    return np.unique(np.concatenate(parts))


# -- aperiodicity -------------------------------------------------------


@dataclass(frozen=True)
class PeriodScan:
    period: int
    first_mismatch: int | None
    last_mismatch: int | None


@dataclass(frozen=True)
class AperiodicityReport:
    trace: tuple[int, ...]
    horizon: int
    scans: tuple[PeriodScan, ...]

    @property
    def periods_found(self) -> list[int]:
        half = self.horizon / 2
        return [s.period for s in self.scans if s.last_mismatch is None or s.last_mismatch + 1 < half]

    @property
    def aperiodic(self) -> bool:
        return not self.periods_found


def scan_periods(y, max_period: int) -> AperiodicityReport:
    """For each period P, the first and last index i with ``y[i] != y[i+P]``."""
    y = tuple(y)
    scans = []
    for P in range(1, max_period + 1):
        bad = [i for i in range(len(y) - P) if y[i] != y[i + P]]
        scans.append(PeriodScan(P, bad[0] if bad else None, bad[-1] if bad else None))
    return AperiodicityReport(y, len(y), tuple(scans))


def check_aperiodicity(x: Configuration, horizon: int, max_period: int, params: Params,
                       direction: str = "p_over_q") -> AperiodicityReport:
    """Scan ``tr(x)[0, horizon)`` for a period that holds on a suffix starting
    before ``horizon / 2``."""
    if x == Configuration.zero():
        raise ValueError("the zero configuration has a constant trace")
    y = trace_of(x, 0, horizon, params, direction)
    return scan_periods(y, max_period)


# -- exhaustive lemma checks on the language -------------------------------


def check_restr(n: int, params: Params, direction: str = "p_over_q", *,
                level: LanguageLevel | None = None, budget: int | None = None) -> int:
    """No ``a1 w b_j, a2 w b_j`` square with ``a1 != a2 (mod q)``, ``b1 != b2 (mod p)``.

    ``level`` may supply a prebuilt length ``n+2`` level. Returns the number of
    middle words examined.
    """
    B, p, q = params.base, params.p, params.q
    if level is None:
        level = enumerate_language(n + 2, params, direction, method="centered", classify=False, budget=budget)
    keys = level.words
    Bn1 = B ** (n + 1)
    a = keys // Bn1
    b = keys % B
    w = (keys // B) % (B ** n)
    order = np.lexsort((b, a, w))
    a, b, w = a[order].tolist(), b[order].tolist(), w[order].tolist()
    checked = 0
    i = 0
    while i < len(w):
        j = i
        rows: dict[int, int] = {}
        while j < len(w) and w[j] == w[i]:
            rows[a[j]] = rows.get(a[j], 0) | (1 << b[j])
            j += 1
        items = list(rows.items())
        for (a1, m1), (a2, m2) in itertools.combinations(items, 2):
            if (a1 - a2) % q == 0:
                continue
            common = m1 & m2
            residues = {d % p for d in range(B) if common >> d & 1}
            if len(residues) > 1:
                bs = sorted(d for d in range(B) if common >> d & 1)
                raise CounterexampleFound(
                    f"w={unpack_word(w[i], n, B)}, a1={a1}, a2={a2}, b in {bs}")
        checked += 1
        i = j
    return checked


def check_flipword(n: int, params: Params, direction: str = "p_over_q", *,
                   level: LanguageLevel | None = None, budget: int | None = None) -> int:
    """If ``w a`` is in the language (``|w| = n``) then so is ``w d`` for every
    ``d`` congruent to ``a`` modulo the numerator of the automaton."""
    B = params.base
    s = params.p if direction == "p_over_q" else params.q
    if level is None:
        level = enumerate_language(n + 1, params, direction, method="centered", classify=False, budget=budget)
    keys = level.words
    base_w = (keys // B) * B
    a = keys % B
    for k in range(s, B, s):
        shifted = base_w + (a + k) % B
        # (a + k) % B stays in the class of a mod s because s divides B
        present = level.contains_keys(shifted)
        if not present.all():
            bad = int(keys[~present][0])
            raise CounterexampleFound(
                f"{unpack_word(bad, n + 1, B)} in L but {unpack_word(int(shifted[~present][0]), n + 1, B)} is not")
    return len(keys)
