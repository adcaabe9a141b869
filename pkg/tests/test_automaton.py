import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracelab.automaton import (Configuration, SpaceTimeDiagram, apply, derive_delta, fmul_rule,
                                fmul_table, iterate, mul_rule, mul_table, random_configuration,
                                widen_trace)
from tracelab.errors import ParseError, UndefinedTriple
from tracelab.language import trace_of
from tracelab.numbers import decode, encode

# transcribed from the printed tables for p = 3, q = 2
MUL_32 = [
    [0, 0, 1, 1, 2, 2],
    [3, 3, 4, 4, 5, 5],
] * 3

FMUL_32_BLOCKS = {
    0: ([0, 0, 0, 0, 1, 1], [3, 3, 3, 3, 4, 4]),
    1: ([1, 1, 2, 2, 2, 2], [4, 4, 5, 5, 5, 5]),
    2: ([3, 3, 3, 3, 4, 4], [0, 0, 0, 0, 1, 1]),
    3: ([4, 4, 5, 5, 5, 5], [1, 1, 2, 2, 2, 2]),
    4: ([0, 0, 0, 0, 1, 1], [3, 3, 3, 3, 4, 4]),
    5: ([1, 1, 2, 2, 2, 2], [4, 4, 5, 5, 5, 5]),
}


def test_mul_table_matches_printed(p32):
    assert mul_table(p32).tolist() == MUL_32
    assert mul_rule(1, 2, p32) == 4


def test_fmul_table_matches_printed(p32):
    f = fmul_table(p32)
    for c, (even, odd) in FMUL_32_BLOCKS.items():
        for a in range(6):
            assert f[a, c, :].tolist() == (even if a % 2 == 0 else odd), (a, c)
    assert fmul_rule(0, 0, 4, p32) == 1
    assert fmul_rule(5, 3, 1, p32) == 1


def test_tails_fixed(params):
    top = params.base - 1
    for direction in ("by_p", "by_q"):
        assert mul_rule(0, 0, params, direction) == 0
        assert mul_rule(top, top, params, direction) == top


def test_fmul_is_composition(params):
    # p/q = p * p / pq: multiply by p twice, then shift one place
    B = params.base
    for a in range(B):
        for c in range(B):
            for b in range(B):
                want = mul_rule(mul_rule(a, c, params, "by_p"), mul_rule(c, b, params, "by_p"), params, "by_p")
                assert fmul_rule(a, c, b, params) == want


def test_mul_automata_multiply(params):
    rng = random.Random(1)
    B = params.base
    for _ in range(200):
        xi = Fraction(rng.randrange(10 ** 4), B ** rng.randrange(4))
        x = encode(xi, params)
        assert decode(apply(x, params, "mul_p"), params) == params.p * xi
        assert decode(apply(x, params, "mul_q"), params) == params.q * xi
        assert decode(apply(x, params, "shift"), params) == B * xi
        assert decode(apply(x, params, "fmul_q_over_p"), params) == xi * params.q / params.p


def test_inverse_identity(params):
    rng = random.Random(7)
    for _ in range(300):
        x = random_configuration(rng, params)
        assert apply(apply(x, params, "fmul_p_over_q"), params, "fmul_q_over_p") == x
        assert apply(apply(x, params, "fmul_q_over_p"), params, "fmul_p_over_q") == x
        assert apply(apply(x, params, "shift"), params, "shift_inverse") == x


def test_configuration_canonical():
    a = Configuration(0, (0, 0, 3, 0), 0, -2)
    b = Configuration(0, (3,), 0, 0)
    assert a == b
    assert Configuration(5, (5, 5), 5, 3) == Configuration(5, (), 5, 0)
    assert b.digit_at(0) == 3 and b.digit_at(-10) == 0 and b.digit_at(10) == 0


@pytest.mark.parametrize("text", ["0|3.|0", "0|12.5|0", "5|0.01|3", "0|.4|0", "2|7|2"])
def test_text_roundtrip(text):
    x = Configuration.parse(text, 12)
    assert Configuration.parse(x.to_text(), 12) == x


@pytest.mark.parametrize("text", ["0|3.|", "03.0", "0|3..1|0", "00|3|0", "0|9|0"])
def test_text_rejects(text):
    with pytest.raises(ParseError):
        Configuration.parse(text, 6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5), st.lists(st.integers(0, 5), max_size=8), st.integers(0, 5), st.integers(-5, 5))
def test_text_roundtrip_any(left, core, right, offset):
    x = Configuration(left, tuple(core), right, offset)
    assert Configuration.parse(x.to_text(), 6) == x


def test_glue():
    x = Configuration(0, (1, 2, 3), 0, -1)
    y = Configuration(5, (4,), 5, 1)
    g = x.glue(y, 1)
    assert [g.digit_at(i) for i in range(-2, 4)] == [0, 1, 2, 4, 5, 5]


def test_marker_drifts_one_per_step(p32):
    # 0|3.|0 is the single marker at position 0; it moves right one step at a time
    x = Configuration.parse("0|3.|0", 6)
    rows = iterate(x, p32, 6)
    for t, row in enumerate(rows):
        assert row.digit_at(t) == 3
        assert row.end == t + 1


def test_diagram_bounds(p32):
    d = SpaceTimeDiagram.build(encode(1, p32), p32, 5)
    assert d.bounds() == (0, 4)
    assert d.matrix(0, 1)[1] == (1, 3)


def test_delta_example(p32):
    delta = derive_delta(p32)
    assert delta(2, 4, 3) == 3
    assert (delta.table >= 0).sum() == delta.realizable


def test_delta_undefined(p32):
    delta = derive_delta(p32)
    u, c, v = (int(i) for i in np.argwhere(delta.table < 0)[0])
    with pytest.raises(UndefinedTriple):
        delta(u, c, v)


def test_delta_reconstructs_left_column(params):
    delta = derive_delta(params)
    rng = random.Random(3)
    for _ in range(100):
        x = random_configuration(rng, params)
        j = rng.randint(-4, 4)
        y = trace_of(x, j, 12, params, start=-1)
        left = trace_of(x, j - 1, 10, params)
        assert delta.apply_word(y) == list(left)


def test_widen_trace_matches_columns(params):
    delta = derive_delta(params)
    rng = random.Random(5)
    width, length = 3, 14
    for _ in range(40):
        x = random_configuration(rng, params)
        y = trace_of(x, 0, length, params)
        wide = widen_trace(y, delta, width)
        cols = [trace_of(x, c, length, params) for c in range(-width + 1, 1)]
        assert len(wide) == length - 2 * (width - 1)
        for k, entry in enumerate(wide):
            t = k + width - 1
            assert entry == tuple(col[t] for col in cols)


def test_apply_unknown_automaton(p32):
    with pytest.raises(ValueError):
        apply(Configuration.zero(), p32, "rotate")


def test_zero_fixed(params):
    z = Configuration.zero()
    for a in ("mul_p", "mul_q", "fmul_p_over_q", "fmul_q_over_p"):
        assert apply(z, params, a) == z
