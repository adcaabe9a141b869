"""Exhaustive checks of the structural lemmas, one function per property.

Every check returns a :class:`CheckResult`; none of them raise on a failed
property, so a whole suite can be run and summarised. Local-rule checks
enumerate all digit tuples with numpy broadcasting; language checks use the
exact enumerated levels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .arith import Params, residue_class
from .automaton import (Configuration, apply, derive_delta, fmul_table, mul_table,
                        random_configuration)
from .errors import ConsistencyViolation
from .language import (allowed_predecessor_masks, check_flipword, check_restr, construct_w2,
                       enumerate_language, letter_has_two_classes)
from .representations import phi_injectivity_check
from .sofic import complexity_closed_form, gf_coefficients, w2_size


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: Params
    cases: int
    passed: bool
    counterexample: str | None = None
    skipped: bool = False

    def line(self) -> str:
        if self.skipped:
            status = "SKIP"
        else:
            status = "PASS" if self.passed else "FAIL"
        tail = f" counterexample: {self.counterexample}" if self.counterexample else ""
        return f"{status} {self.name} p={self.params.p} q={self.params.q} cases={self.cases}{tail}"


def _first(mask, *grids):
    idx = tuple(int(g[mask][0]) for g in grids)
    return str(idx)


def _result(name, params, cases, bad, grids):
    if bad.any():
        return CheckResult(name, params, cases, False, _first(bad, *grids))
    return CheckResult(name, params, cases, True)


# -- two-digit rule ------------------------------------------------------


def check_g1(params: Params) -> CheckResult:
    """mul(a,c) = mul(b,d) implies a = b (mod q)."""
    B, q = params.base, params.q
    m = mul_table(params)
    a, b, c, d = np.indices((B,) * 4)
    bad = (m[a, c] == m[b, d]) & (a % q != b % q)
    return _result("g1", params, B ** 4, bad, (a, b, c, d))


def check_g2(params: Params) -> CheckResult:
    """mul(a,c) = mul(b,c) mod q  <=>  a = b mod q  <=>  mul(a,c) = mul(b,c)."""
    B, q = params.base, params.q
    m = mul_table(params)
    a, b, c = np.indices((B,) * 3)
    x = m[a, c] % q == m[b, c] % q
    y = a % q == b % q
    z = m[a, c] == m[b, c]
    bad = (x != y) | (y != z)
    return _result("g2", params, B ** 3, bad, (a, b, c))


def check_g3(params: Params) -> CheckResult:
    """mul(a,c) = mul(b,c) (mod p) for all a, b."""
    B, p = params.base, params.p
    m = mul_table(params)
    a, b, c = np.indices((B,) * 3)
    bad = m[a, c] % p != m[b, c] % p
    return _result("g3", params, B ** 3, bad, (a, b, c))


# -- three-digit rule ------------------------------------------------------


def check_f1(params: Params) -> CheckResult:
    """fmul(a,c,d) = fmul(b,c,e) implies a = b (mod q)."""
    B, q = params.base, params.q
    f = fmul_table(params)
    a, d = np.indices((B, B))
    for c in range(B):
        lhs = f[a, c, d].ravel()
        bad = (lhs[:, None] == lhs[None, :]) & ((a.ravel() % q)[:, None] != (a.ravel() % q)[None, :])
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return CheckResult("f1", params, B ** 5, False,
                               str((int(a.ravel()[i]), int(a.ravel()[j]), c, int(d.ravel()[i]), int(d.ravel()[j]))))
    return CheckResult("f1", params, B ** 5, True)


def check_f2(params: Params) -> CheckResult:
    """fmul(a,c,d) = fmul(b,c,d) mod q  <=>  a = b mod q  <=>  equal outputs."""
    B, q = params.base, params.q
    f = fmul_table(params)
    a, b, c, d = np.indices((B,) * 4)
    fa, fb = f[a, c, d], f[b, c, d]
    x = fa % q == fb % q
    y = a % q == b % q
    z = fa == fb
    bad = (x != y) | (y != z)
    return _result("f2", params, B ** 4, bad, (a, b, c, d))


def check_f3(params: Params) -> CheckResult:
    """fmul(a,c,d) = fmul(b,c,d) (mod p) for all a, b."""
    B, p = params.base, params.p
    f = fmul_table(params)
    a, b, c, d = np.indices((B,) * 4)
    bad = f[a, c, d] % p != f[b, c, d] % p
    return _result("f3", params, B ** 4, bad, (a, b, c, d))


def check_strongxz(params: Params) -> CheckResult:
    """fmul(a,c,d) = fmul(b,c,e) implies fmul(a,c,d) = fmul(a,c,e)."""
    B = params.base
    f = fmul_table(params)
    for c in range(B):
        t = f[:, c, :]  # t[a, d]
        # eq[a, d, b, e]: t[a, d] == t[b, e]
        eq = t[:, :, None, None] == t[None, None, :, :]
        # need[a, d, e]: t[a, d] == t[a, e]
        same_row = t[:, :, None] == t[:, None, :]
        bad = eq & ~same_row[:, :, None, :]
        if bad.any():
            a, d, b, e = (int(v) for v in np.argwhere(bad)[0])
            return CheckResult("strongxz", params, B ** 5, False, str((a, b, c, d, e)))
    return CheckResult("strongxz", params, B ** 5, True)


def check_flip(params: Params) -> CheckResult:
    """The image of ``Q w`` (|w| = 2) is a full class ``Q_pq(b)`` whenever Q
    holds a complete residue system mod q; checked for every ``Q_pq(a)`` and
    for the whole digit set."""
    B = params.base
    f = fmul_table(params)
    sets = [residue_class(a, params, "Qpq").members for a in range(B)] + [tuple(range(B))]
    cases = 0
    for Q in sets:
        for w1 in range(B):
            for w2 in range(B):
                image = {int(f[d, w1, w2]) for d in Q}
                b = next(iter(image))
                cases += 1
                if image != set(residue_class(b, params, "Qpq").members):
                    return CheckResult("flip", params, cases, False, f"Q={Q}, w={(w1, w2)}, image={sorted(image)}")
    return CheckResult("flip", params, cases, True)


def check_tail_fixed(params: Params) -> CheckResult:
    B = params.base
    top = B - 1
    m, f = mul_table(params), fmul_table(params)
    ok = m[0, 0] == 0 and m[top, top] == top and f[0, 0, 0] == 0 and f[top, top, top] == top
    return CheckResult("tail_fixed", params, 4, bool(ok), None if ok else "tails not fixed")


def _glued(x, j, marker, right):
    tail = Configuration(right, (marker,), right, j)
    return x.glue(tail, j)


def check_tail(params: Params, samples: int = 200, seed: int = 0) -> CheckResult:
    """Markers ``s = n*p`` before a 0-tail and ``s-1`` before a (pq-1)-tail
    travel together: one position per step of the fraction automaton, none
    for the multiply-by-p automaton, with identical digits on their left."""
    rng = random.Random(seed)
    B = params.base
    markers = set(params.marker_digits)
    cases = 0
    for _ in range(samples):
        x = random_configuration(rng, params, max_core=10)
        for s in params.marker_digits:
            for j in range(-5, 6):
                cases += 1
                x1 = _glued(x, j, s, 0)
                x2 = _glued(x, j, s - 1, B - 1)
                for automaton, shift in (("mul_p", 0), ("fmul_p_over_q", 1)):
                    y1, y2 = apply(x1, params, automaton), apply(x2, params, automaton)
                    k = j + shift
                    s1 = y1.digit_at(k)
                    ok = (
                        s1 in markers
                        and y2.digit_at(k) == s1 - 1
                        and y1.right == 0 and y1.end <= k + 1
                        and y2.right == B - 1 and y2.end <= k + 1
                        and all(y1.digit_at(i) == y2.digit_at(i) for i in range(min(x.offset, j) - 3, k))
                        and y1.left == y2.left
                    )
                    if not ok:
                        return CheckResult("tail", params, cases, False,
                                           f"{automaton} x={x} s={s} j={j}: {y1} / {y2}")
    return CheckResult("tail", params, cases, True)


def check_contexts_letter_rule(params: Params) -> CheckResult:
    """``|fmul_{q/p}(0, a, digits)|`` is 2 exactly for letters meeting the
    predecessor criterion, with the jump between ``b`` and ``b+1``, ``p | b+1``."""
    B, p = params.base, params.p
    g = fmul_table(params, "q_over_p")
    for a in range(B):
        values = g[0, a, :].tolist()
        image = sorted(set(values))
        expect_two = letter_has_two_classes(a, params)
        if len(image) != (2 if expect_two else 1):
            return CheckResult("contexts_rule", params, a + 1, False, f"a={a}, image={image}")
        if expect_two:
            d = image[0]
            if image[1] != d + 1:
                return CheckResult("contexts_rule", params, a + 1, False, f"a={a}, image={image}")
            jumps = [b for b in range(B - 1) if values[b] == d and values[b + 1] == d + 1]
            if not jumps or (jumps[0] + 1) % p:
                return CheckResult("contexts_rule", params, a + 1, False, f"a={a}, jumps={jumps}")
    return CheckResult("contexts_rule", params, B, True)


def check_delta(params: Params, samples: int = 200, seed: int = 0) -> CheckResult:
    """The left-determination table is single-valued and rebuilds column i-1
    from column i on random configurations."""
    try:
        delta = derive_delta(params)
    except ConsistencyViolation as exc:
        return CheckResult("delta", params, 0, False, str(exc))
    rng = random.Random(seed)
    for k in range(samples):
        x = random_configuration(rng, params)
        rows = [apply(x, params, "fmul_q_over_p"), x, apply(x, params, "fmul_p_over_q")]
        for i in range(x.offset - 3, x.end + 3):
            u, c, v = (r.digit_at(i) for r in rows)
            if delta(u, c, v) != x.digit_at(i - 1):
                return CheckResult("delta", params, k + 1, False, f"x={x}, column {i}")
    return CheckResult("delta", params, samples, True)


LOCAL_CHECKS = (check_g1, check_g2, check_g3, check_f1, check_f2, check_f3, check_strongxz,
                check_flip, check_tail_fixed, check_tail, check_contexts_letter_rule, check_delta)
# the predecessor criterion is only claimed for p > q; with q > p the image can
# cover three or more consecutive digits
ORDERED_ONLY = {check_contexts_letter_rule: "contexts_rule"}


# -- language-level checks -------------------------------------------------


def check_contexts(params: Params) -> CheckResult:
    """``|pre(a)| = 2p`` exactly when the letter criterion holds."""
    level = enumerate_language(1, params, method="centered")
    allowed = allowed_predecessor_masks(params)
    for i, a in enumerate(level.iter_words()):
        size = int(level.pre_size[i])
        want = 2 * params.p if letter_has_two_classes(a[0], params) else params.p
        if size != want or int(level.pre_mask[i]) not in allowed:
            return CheckResult("contexts", params, i + 1, False, f"a={a[0]}, |pre|={size}")
    return CheckResult("contexts", params, len(level), True)


def check_wordcontexts(params: Params, n_max: int) -> CheckResult:
    allowed = allowed_predecessor_masks(params)
    cases = 0
    for n in range(1, n_max + 1):
        level = enumerate_language(n, params, method="centered")
        for i, m in enumerate(level.pre_mask.tolist()):
            cases += 1
            if m not in allowed:
                return CheckResult("wordcontexts", params, cases, False, f"w={level.word(i)}, mask={m:b}")
    return CheckResult("wordcontexts", params, cases, True)


def check_construct(params: Params, n_max: int) -> CheckResult:
    cases = 0
    for n in range(1, n_max + 1):
        level = enumerate_language(n, params, method="centered")
        built = construct_w2(n, params)
        cases += len(built)
        if len(built) != w2_size(n, params) or not np.array_equal(built, level.w2):
            return CheckResult("construct", params, cases, False,
                               f"n={n}: |construct|={len(built)}, |W2|={len(level.w2)}")
    return CheckResult("construct", params, cases, True)


def check_combi(params: Params, n_max: int) -> CheckResult:
    """Counts equal the closed form and the counting step
    ``|L^(n+1)| = 2p |W2| + p |W1|``."""
    p = params.p
    prev = None
    for n in range(1, n_max + 1):
        level = enumerate_language(n, params, method="centered")
        if len(level) != complexity_closed_form(n, params):
            return CheckResult("combi", params, n, False, f"n={n}: {len(level)} words")
        if prev is not None and len(level) != 2 * p * len(prev.w2) + p * len(prev.w1):
            return CheckResult("combi", params, n, False, f"n={n}: recurrence fails")
        prev = level
    return CheckResult("combi", params, n_max, True)


def _wrap(name, params, fn):
    try:
        cases = fn()
    except ConsistencyViolation as exc:
        return CheckResult(name, params, 0, False, str(exc))
    return CheckResult(name, params, cases, True)


def check_restr_suite(params: Params, n_max: int) -> CheckResult:
    return _wrap("restr", params, lambda: sum(check_restr(n, params) for n in range(1, n_max + 1)))


def check_flipword_suite(params: Params, n_max: int) -> CheckResult:
    def run():
        return sum(check_flipword(n, params, d) for n in range(1, n_max + 1) for d in ("p_over_q", "q_over_p"))
    return _wrap("flipword", params, run)


def check_phi_injective(params: Params) -> CheckResult:
    return _wrap("phi_injective", params,
                 lambda: sum(phi_injectivity_check(params, k).words for k in (2, 3)))


def check_gf(params: Params, N: int = 50) -> CheckResult:
    return _wrap("generating_function", params, lambda: len(gf_coefficients(N, params)))


def run_suite(params: Params, suite: str = "all", *, stop_on_failure: bool = False) -> list[CheckResult]:
    """``lemmas``: local-rule checks. ``all``: also the language-level checks
    (the ones that assume p > q are skipped otherwise)."""
    if suite not in ("lemmas", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    ordered = params.p > params.q

    def skip(name):
        return lambda: CheckResult(name, params, 0, True, skipped=True)

    jobs = []
    for c in LOCAL_CHECKS:
        if c in ORDERED_ONLY and not ordered:
            jobs.append(skip(ORDERED_ONLY[c]))
        else:
            jobs.append(lambda c=c: c(params))
    if suite == "all":
        language_jobs = [
            ("contexts", lambda: check_contexts(params)),
            ("wordcontexts", lambda: check_wordcontexts(params, 3)),
            ("construct", lambda: check_construct(params, 3)),
            ("combi", lambda: check_combi(params, 4)),
            ("restr", lambda: check_restr_suite(params, 2)),
            ("generating_function", lambda: check_gf(params)),
        ]
        for name, job in language_jobs:
            if ordered:
                jobs.append(job)
            else:
                jobs.append(skip(name))
        jobs.append(lambda: check_flipword_suite(params, 3))
        jobs.append(lambda: check_phi_injective(params))
    results = []
    for job in jobs:
        r = job()
        results.append(r)
        if stop_on_failure and not r.passed:
            break
    return results

