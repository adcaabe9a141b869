import itertools
import random

import numpy as np
import pytest

from tracelab import Params
from tracelab.automaton import Configuration, apply, random_configuration
from tracelab.errors import BudgetExceeded, CounterexampleFound, ShapeViolation
from tracelab.language import (allowed_predecessor_masks, check_aperiodicity, check_flipword,
                               check_predecessor_shapes, check_restr, construct_w2,
                               enumerate_language, letter_has_two_classes, predecessors, scan_periods,
                               trace_from_window, trace_of, trace_word_keys)
from tracelab.numbers import encode
from tracelab.sofic import complexity_closed_form, w2_size


def naive_language(n, params, direction="p_over_q"):
    """Every window of width 2n-1, simulated one cell at a time."""
    B = params.base
    return {trace_from_window(w, params, direction) for w in itertools.product(range(B), repeat=2 * n - 1)}


def test_trace_examples(p32):
    assert trace_of(encode(1, p32), 0, 5, p32) == (1, 1, 2, 3, 5)
    assert trace_of(encode(1, p32), 1, 3, p32) == (0, 3, 1)
    # time -1 of encode(1) is 2/3 = 0.4
    assert trace_of(encode(1, p32), 1, 2, p32, start=-1) == (4, 0)


def test_trace_from_window_agrees(params):
    rng = random.Random(2)
    n = 4
    for _ in range(50):
        w = [rng.randrange(params.base) for _ in range(2 * n - 1)]
        x = Configuration(0, tuple(w), 0, -(n - 1))
        assert trace_from_window(w, params) == trace_of(x, 0, n, params)


@pytest.mark.parametrize("pq,n", [((3, 2), 3), ((2, 3), 3), ((5, 2), 2), ((4, 3), 2), ((3, 4), 2)])
def test_matches_naive(pq, n):
    params = Params(*pq)
    for direction in ("p_over_q", "q_over_p"):
        oracle = naive_language(n, params, direction)
        level = enumerate_language(n, params, direction, classify=False)
        assert set(level.iter_words()) == oracle


@pytest.mark.parametrize("pq,n", [((3, 2), 4), ((5, 2), 3), ((5, 3), 2), ((2, 3), 4)])
def test_window_equals_centered(pq, n):
    params = Params(*pq)
    a = trace_word_keys(n, params, back=0)
    b = trace_word_keys(n, params, back=(n - 1) // 2)
    assert np.array_equal(a, b)


def test_counts_32(p32):
    counts = [len(enumerate_language(n, p32, method="centered", classify=False)) for n in range(1, 6)]
    assert counts == [6, 24, 84, 276, 876]


def test_threads_deterministic(p32):
    a = trace_word_keys(4, p32, workers=1)
    b = trace_word_keys(4, p32, workers=4)
    assert np.array_equal(a, b)


def test_budget(p32):
    with pytest.raises(BudgetExceeded):
        enumerate_language(5, p32, budget=1000)


def test_membership(p32):
    level = enumerate_language(2, p32, classify=False)
    assert (1, 1) in level
    assert level.word(0) == (0, 0)
    assert len(list(level.iter_words())) == 24


def test_w1_w2_sizes(params):
    for n in range(1, 3):
        level = enumerate_language(n, params, method="centered")
        assert len(level.w2) == w2_size(n, params)
        assert len(level.w1) + len(level.w2) == len(level)
        assert len(level) == complexity_closed_form(n, params)


def test_predecessor_shapes(p32):
    level = enumerate_language(3, p32, method="centered")
    assert check_predecessor_shapes(level) == 84
    upper = enumerate_language(4, p32, method="centered", classify=False)
    for i in range(0, len(level), 7):
        w = level.word(i)
        direct = frozenset(a for a in range(6) if (a,) + w in upper)
        assert predecessors(w, upper) == direct == level.predecessor_digits(i)


def test_predecessors_missing_word(p32):
    upper = enumerate_language(2, p32, classify=False)
    with pytest.raises(ShapeViolation):
        predecessors((9,), upper)


def test_allowed_masks_32(p32):
    masks = set(allowed_predecessor_masks(p32))
    # even digits, odd digits, and everything
    assert masks == {0b010101, 0b101010, 0b111111}


def test_letter_criterion(params):
    level = enumerate_language(1, params, method="centered")
    for i, (a,) in enumerate(level.iter_words()):
        want = 2 * params.p if letter_has_two_classes(a, params) else params.p
        assert level.pre_size[i] == want


def test_construct_w2(params):
    for n in (1, 2):
        level = enumerate_language(n, params, method="centered")
        assert np.array_equal(construct_w2(n, params), level.w2)


def test_restr_flipword(p32):
    # every middle word of L^3 / L^4 is examined, and every word of L^3
    assert check_restr(1, p32) == 6
    assert check_restr(2, p32) == 24
    assert check_flipword(2, p32) == 84
    assert check_flipword(2, p32, "q_over_p") == 84


def test_flipword_detects_missing():
    params = Params(3, 2)
    level = enumerate_language(2, params, classify=False)
    level.words = level.words[1:]
    with pytest.raises(CounterexampleFound):
        check_flipword(1, params, level=level)


def test_aperiodicity(p32):
    rep = check_aperiodicity(encode(1, p32), 200, 20, p32)
    assert rep.aperiodic
    with pytest.raises(ValueError):
        check_aperiodicity(Configuration.zero(), 10, 3, p32)


def test_scan_periods_detects_period():
    rep = scan_periods([1, 2, 3] * 20, 5)
    assert rep.periods_found == [3]
    assert not rep.aperiodic


def test_inverse_trace_consistent(params):
    rng = random.Random(4)
    for _ in range(20):
        x = random_configuration(rng, params)
        y = apply(x, params, "fmul_q_over_p")
        assert trace_of(x, 0, 5, params, start=-1) == trace_of(y, 0, 5, params)
