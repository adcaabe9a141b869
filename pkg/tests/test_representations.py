import random
from fractions import Fraction

import pytest

from tracelab.errors import CollisionFound
from tracelab.numbers import encode
from tracelab.representations import (companion_range, companion_rows, compfrac_reconstruct,
                                      phi_injectivity_check, phi_of_trace, phi_of_word, phi_window,
                                      psi, reconstruct_word)


def test_psi_values(p32):
    assert psi(Fraction(1, 2), p32) == 0
    assert psi(Fraction(3, 4), p32) == 2
    assert psi(Fraction(9, 8), p32) == -1
    with pytest.raises(ValueError):
        psi(0, p32)


def test_psi_range(params):
    rng = random.Random(0)
    for _ in range(500):
        xi = Fraction(rng.randrange(1, 10 ** 4), rng.randrange(1, 200))
        assert psi(xi, params) in companion_range(params)


def test_phi_window_half(p32):
    assert phi_window(Fraction(1, 2), 0, 2, p32).digits == (0, 2, -1)


def test_phi_of_trace_matches_companion(params):
    rng = random.Random(9)
    for _ in range(20):
        xi = Fraction(rng.randrange(1, 5000), params.base ** rng.randrange(3))
        assert phi_of_trace(encode(xi, params), 0, 15, params) == phi_window(xi, 0, 15, params)


def test_phi_of_trace_negative_indices(p32):
    xi = Fraction(27, 8)
    assert phi_of_trace(encode(xi, p32), -3, 4, p32) == phi_window(xi, -3, 4, p32)


def test_phi_of_trace_word(p32):
    y = (1, 1, 2, 3, 5)
    assert phi_of_trace(y, 0, 3, p32) == phi_of_word(y, p32)
    with pytest.raises(ValueError):
        phi_of_trace(y, 0, 4, p32)


def test_compfrac(params):
    for xi in (Fraction(1), Fraction(7, 3), Fraction(1, 2), Fraction(123, 17)):
        for N in range(0, 21):
            partial, error = compfrac_reconstruct(xi, N, params)
            assert error <= Fraction(params.q, params.p) ** (N + 1)


def test_reconstruct_word(params):
    rng = random.Random(1)
    for _ in range(100):
        w = tuple(rng.randrange(params.base) for _ in range(6))
        image = phi_of_word(w, params).digits
        assert reconstruct_word(image, w[0] % params.p, w[-1] % params.q, params) == w


def test_injectivity(p32):
    rep = phi_injectivity_check(p32, 3)
    assert rep.words == rep.distinct_images == 216


def test_injectivity_detects_duplicates(monkeypatch, p32):
    import tracelab.representations as rp
    monkeypatch.setattr(rp, "reconstruct_word", lambda image, a, b, params: (0, 0))
    with pytest.raises(CollisionFound):
        rp.phi_injectivity_check(p32, 2, words=[(1, 1)])


def test_companion_rows(p32):
    rows = companion_rows(1, -2, 10, p32)
    assert all(r[5] for r in rows)
    assert rows[0][6] is None and rows[2][6] is not None
    assert [r[1] for r in rows[2:7]] == [1, 1, 2, 3, 5]
