import math
import random
import threading
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipext.epsseq import EpsilonSequence, check_hypotheses, new_sequence
from lipext.errors import ConstantFunctionShortcut, NonpositiveParameter

from oracles import eps_table


def test_rho_and_clamp():
    assert new_sequence(1, 1, 1).rho == pytest.approx(1 / 6, rel=1e-15)
    s = new_sequence(1, 2, 1)
    assert s.eps_eff == 1 and s.rho == pytest.approx(1 / 6, rel=1e-15)
    with pytest.raises(ConstantFunctionShortcut):
        new_sequence(0, 1, 1)
    for bad in [(-1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, float("inf"))]:
        with pytest.raises(NonpositiveParameter):
            new_sequence(*bad)


def test_values_from_hand_recurrence():
    s = new_sequence(1, 1, 1)
    assert s.eps(-1) == pytest.approx(1 / 12, rel=1e-15)
    assert s.eps(1) == pytest.approx(9, rel=1e-15)
    assert s.eps(-2) == pytest.approx(1 / 216, rel=1e-15)


def test_values_match_exact_oracle():
    s = new_sequence(1, 1, 1)
    exact = eps_table(Fr(1, 6), 1, -12, 12)
    for k in range(-12, 13):
        assert s.eps(k) == pytest.approx(float(exact[k]), rel=1e-13)


def test_bracket_examples():
    s = new_sequence(1, 1, 1)
    assert s.bracket(0.5) == 0
    assert s.bracket(1.0) == 1
    assert s.eps(2) == pytest.approx(67.5)
    assert s.bracket(9.0) == 2
    assert s.bracket(0.5, -2) == 2 and s.bracket(0.5, -1) == 1


def test_caching_is_order_independent():
    a = new_sequence(0.7, 0.3, 2.5)
    b = new_sequence(0.7, 0.3, 2.5)
    ks = list(range(-30, 15))
    va = {k: a.eps(k) for k in ks}
    random.Random(3).shuffle(ks)
    assert all(b.eps(k) == va[k] for k in ks)


def test_concurrent_growth_matches_sequential():
    ref = new_sequence(2.0, 0.5, 1.0)
    expected = {k: ref.eps(k) for k in range(-40, 25)}
    shared = new_sequence(2.0, 0.5, 1.0)
    bad = []

    def worker(seed):
        rng = random.Random(seed)
        for _ in range(300):
            k = rng.randint(-40, 24)
            if shared.eps(k) != expected[k]:
                bad.append(k)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not bad


def test_log_eps_survives_underflow():
    s = new_sequence(1, 1, 1)
    assert s.eps(-60) == 0.0  # float underflow
    assert math.isfinite(s.log_eps(-60))
    assert s.log_eps(-5) == pytest.approx(math.log(s.eps(-5)), rel=1e-12)


def test_custom_rule_hook():
    def halving(rho, k):
        return rho / (1 + 2.0 ** (-k)) / 2

    s = EpsilonSequence(0.1, 1.0, rule=halving)
    assert s.rule_id == "halving"
    assert s.eps(-1) == pytest.approx(0.1 / 4)
    assert all(check_hypotheses(s, -30, 10).values())


pairs = st.tuples(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))


@given(pairs)
@settings(max_examples=50, deadline=None)
def test_hypotheses_hold(p):
    L, eps, anchor = p
    s = new_sequence(L, eps, anchor)
    assert check_hypotheses(s, -60, 20) == {
        "positive": True, "ratio_increasing": True,
        "ratio_below_rho": True, "ratio_decay": True,
    }
    for k in range(-15, 20):
        assert s.eps(k) > 6 * s.eps(k - 1)


@given(pairs, st.floats(1e-6, 1e6), st.floats(1e-6, 1e6), st.integers(-3, 3))
@settings(max_examples=80, deadline=None)
def test_bracket_consistent_and_monotone(p, t1, t2, offset):
    s = new_sequence(*p)
    for t in (t1, t2):
        k = s.bracket(t, offset)
        assert s.eps(k - 1 + offset) <= t < s.eps(k + offset)
    lo, hi = sorted((t1, t2))
    assert s.bracket(lo, offset) <= s.bracket(hi, offset)
