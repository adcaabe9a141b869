"""Complexity formulas and labelled-graph sofic shifts."""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property

from .arith import Params
from .errors import BudgetExceeded, GraphFormatError, NonIntegral

DEFAULT_STATE_CAP = 1 << 20


# -- closed forms ----------------------------------------------------------


def complexity_closed_form(n: int, params: Params) -> int:
    """Number of length-n words of the trace shift, ``p > q``."""
    params.require_p_greater()
    if n < 0:
        raise ValueError("n must be >= 0")
    p, q = params.p, params.q
    # n = 0 needs p**-1 terms, so scale by pq before dividing
    num = (p ** n * q - p * q ** n) * (q - 1)
    quotient, rem = divmod(num, p - q)
    if rem:
        raise NonIntegral(f"closed form not integral at n={n}")
    return quotient + p ** n * q


def w2_size(n: int, params: Params) -> int:
    return params.q ** n * (params.q - 1)


def gf_coefficients(N: int, params: Params) -> list[int]:
    """Coefficients ``a[0..N]`` of ``(1 + (pq-p-q) z) / ((1-pz)(1-qz))``.

    Computed from the linear recurrence and cross-checked against the
    closed form at every index.
    """
    params.require_p_greater()
    p, q = params.p, params.q
    a = [1, p * q][: N + 1]
    for n in range(2, N + 1):
        a.append((p + q) * a[n - 1] - p * q * a[n - 2])
    for n, v in enumerate(a):
        if v != complexity_closed_form(n, params):
            raise NonIntegral(f"generating function coefficient {n} disagrees with the closed form")
    return a


def series_coefficients(numerator, denominator, N: int) -> list[int]:
    """Power series of an integer rational function by long division."""
    if denominator[0] != 1:
        raise ValueError("denominator must have constant term 1")
    out = []
    for n in range(N + 1):
        v = numerator[n] if n < len(numerator) else 0
        v -= sum(denominator[k] * out[n - k] for k in range(1, min(n, len(denominator) - 1) + 1))
        out.append(v)
    return out


# -- labelled graphs -------------------------------------------------------


@dataclass(frozen=True)
class LabeledGraph:
    vertices: tuple
    edges: tuple  # (src, dst, label)

    def __post_init__(self):
        vs = set(self.vertices)
        for s, d, _ in self.edges:
            if s not in vs or d not in vs:
                raise GraphFormatError(f"edge {s}->{d} references an unknown vertex")

    @classmethod
    def from_edges(cls, edges) -> "LabeledGraph":
        edges = tuple((s, d, lab) for s, d, lab in edges)
        seen = {}
        for s, d, _ in edges:
            seen.setdefault(s, None)
            seen.setdefault(d, None)
        return cls(tuple(seen), edges)

    @cached_property
    def alphabet(self) -> tuple:
        return tuple(sorted({lab for _, _, lab in self.edges}, key=str))

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def out_edges(self, v):
        return [(d, lab) for s, d, lab in self.edges if s == v]

    def essential(self) -> "LabeledGraph":
        """Subgraph of vertices lying on bi-infinite paths."""
        alive = set(self.vertices)
        while True:
            edges = [(s, d, lab) for s, d, lab in self.edges if s in alive and d in alive]
            has_out = {s for s, _, _ in edges}
            has_in = {d for _, d, _ in edges}
            keep = alive & has_out & has_in
            if keep == alive:
                break
            alive = keep
        return LabeledGraph(tuple(v for v in self.vertices if v in alive), tuple(edges))

    def is_strongly_connected(self) -> bool:
        if not self.vertices:
            return False
        fwd, rev = defaultdict(set), defaultdict(set)
        for s, d, _ in self.edges:
            fwd[s].add(d)
            rev[d].add(s)
        start = self.vertices[0]
        return all(len(_reach(start, g)) == len(self.vertices) for g in (fwd, rev))

    def to_edge_list(self) -> str:
        return "".join(f"{s} {d} {lab}\n" for s, d, lab in self.edges)

    @classmethod
    def parse_edge_list(cls, text: str) -> "LabeledGraph":
        edges = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'from to label', got {line!r}")
            edges.append(tuple(parts))
        if not edges:
            raise GraphFormatError("edge list is empty")
        return cls.from_edges(edges)


def _reach(start, adj):
    seen = {start}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


class _SubsetAutomaton:
    """Determinised follower-set automaton over vertex bitmasks."""

    def __init__(self, g: LabeledGraph, cap: int = DEFAULT_STATE_CAP):
        self.g = g
        self.cap = cap
        self.alphabet = g.alphabet
        idx = g.index
        self.succ = defaultdict(int)  # (vertex index, label) -> target mask
        for s, d, lab in g.edges:
            self.succ[idx[s], lab] |= 1 << idx[d]
        self.full = (1 << len(g.vertices)) - 1
        self.memo: dict[int, tuple] = {}

    def step(self, state: int):
        if state not in self.memo:
            if len(self.memo) >= self.cap:
                raise BudgetExceeded(len(self.memo) + 1, self.cap)
            out = []
            for lab in self.alphabet:
                t = 0
                m = state
                while m:
                    low = m & -m
                    t |= self.succ.get((low.bit_length() - 1, lab), 0)
                    m ^= low
                if t:
                    out.append((lab, t))
            self.memo[state] = tuple(out)
        return self.memo[state]


def count_distinct_labels(g: LabeledGraph, n: int, cap: int = DEFAULT_STATE_CAP) -> int:
    """Number of distinct length-n labels of paths that extend bi-infinitely."""
    if n < 0:
        raise ValueError("n must be >= 0")
    core = g.essential()
    if not core.vertices:
        return 0
    auto = _SubsetAutomaton(core, cap)
    counts = {auto.full: 1}
    for _ in range(n):
        nxt: dict[int, int] = defaultdict(int)
        for state, c in counts.items():
            for _, t in auto.step(state):
                nxt[t] += c
        counts = nxt
    return sum(counts.values())


def naive_label_count(g: LabeledGraph, n: int) -> int:
    """Oracle: test every word over the alphabet for a path by backtracking."""
    core = g.essential()
    if not core.vertices:
        return 0
    if n == 0:
        return 1
    out = defaultdict(list)
    for s, d, lab in core.edges:
        out[s].append((d, lab))

    def readable(v, word, i):
        if i == len(word):
            return True
        return any(lab == word[i] and readable(d, word, i + 1) for d, lab in out[v])

    total = 0
    for word in itertools.product(core.alphabet, repeat=n):
        if any(readable(v, word, 0) for v in core.vertices):
            total += 1
    return total


def path_count(g: LabeledGraph, word) -> int:
    """Number of paths in ``g`` whose label is ``word``."""
    counts = {v: 1 for v in g.vertices}
    for letter in word:
        nxt = defaultdict(int)
        for s, d, lab in g.edges:
            if lab == letter and s in counts:
                nxt[d] += counts[s]
        counts = nxt
    return sum(counts.values())


def build_Zpq(params: Params) -> LabeledGraph:
    """Graph whose bi-infinite labels have language ``P* (empty | R) Q*``.

    Letters are ``P0..P{p-1}``, ``Q0..Q{q-1}``, ``R0..R{pq-p-q-1}``. One vertex
    loops on P letters, one on Q letters; the P vertex enters the Q vertex on
    every Q letter directly, or on an R letter.
    """
    params.require_p_greater()
    p, q = params.p, params.q
    r = p * q - p - q
    if r < 1:
        raise ValueError(f"pq - p - q = {r} must be positive for coprime p > q > 1")
    edges = [("P", "P", f"P{i}") for i in range(p)]
    edges += [("Q", "Q", f"Q{i}") for i in range(q)]
    edges += [("P", "Q", f"Q{i}") for i in range(q)]
    edges += [("P", "Q", f"R{i}") for i in range(r)]
    return LabeledGraph(("P", "Q"), tuple(edges))


def build_transitive_32() -> LabeledGraph:
    """Four-cycle graph with loops a, b at each vertex and cycle labels c, d, e, f."""
    vs = ("v1", "v2", "v3", "v4")
    edges = []
    for v in vs:
        edges += [(v, v, "a"), (v, v, "b")]
    for (s, d), lab in zip(zip(vs, vs[1:] + vs[:1]), "cdef"):
        edges.append((s, d, lab))
    return LabeledGraph(vs, tuple(edges))


def transitive_32_count(n: int) -> int:
    return 4 * 3 ** n - 3 * 2 ** n


def find_synchronizing_word(g: LabeledGraph, max_len: int):
    """Shortest word (up to ``max_len``) that collapses the follower-set
    automaton to a single vertex, or None.

    A word all of whose paths end at one vertex is synchronizing for the
    shift presented by ``g``.
    """
    core = g.essential()
    if not core.is_strongly_connected():
        raise ValueError("graph does not present a transitive shift")
    auto = _SubsetAutomaton(core)
    frontier = [((), auto.full)]
    seen = {auto.full}
    for _ in range(max_len):
        nxt = []
        for word, state in frontier:
            for lab, t in auto.step(state):
                w = word + (lab,)
                if t & (t - 1) == 0:
                    return w
                if t not in seen:
                    seen.add(t)
                    nxt.append((w, t))
        frontier = nxt
    return None
