from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipext.errors import CoincidentPoints, EmptySubset, NonpositiveParameter
from lipext.extension import (
    VARIANTS, clamp_bounded, extend, extend_ascending, extend_descending,
    extend_mcshane, extend_slope, phi_eval, psi_eval,
)
from lipext.lipconst import lip_global
from lipext.metric import from_matrix, from_points, subset_function
from lipext.verification import example22, random_instance, t3, tolerance

from oracles import exact_pen

# exact-rational oracle values for t3 with eps = 0.5, anchor = diameter = 2
T3_SLOPE_F1 = 0.5344066464221335
T3_DESC_F1 = 0.4655933535778665


def test_t3_oracle_values_are_current():
    co, C, g = [0, 1, 2], [0, 2], {0: 0, 2: 1}
    pen = exact_pen(co, C, g, 0, Fr(1, 6), 2, Fr(1, 2), 1)
    assert float(pen) == pytest.approx(T3_SLOPE_F1, rel=1e-15)
    down = exact_pen(co, C, g, 2, Fr(1, 6), 2, Fr(1, 2), 1, "descending")
    assert float(1 - down) == pytest.approx(T3_DESC_F1, rel=1e-15)


def test_mcshane():
    space, sub = t3()
    assert extend_mcshane(space, sub).f[1] == 0.5
    full = subset_function(space, [0, 1, 2], [0.0, 3.0, 1.0])
    assert np.array_equal(extend_mcshane(space, full).f, full.values)
    inst = example22(0.01)
    f = extend_mcshane(inst.space, inst.subset).f
    assert f[150] == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("variant", VARIANTS)
def test_full_subset_reproduces_data(variant):
    space = from_points([0, 0.3, 1.1, 2.0, 2.2])
    g = [0.1, -0.2, 0.4, 0.4, 1.0]
    sub = subset_function(space, range(5), g)
    assert np.array_equal(extend(variant, space, sub, 0.3).f, np.array(g))


def test_t3_slope():
    space, sub = t3()
    res = extend_slope(space, sub, 0.5)
    assert res.f[0] == 0 and res.f[2] == 1
    assert res.f[1] == pytest.approx(T3_SLOPE_F1, rel=1e-13)
    # the penalized extension sits above McShane at the midpoint here
    assert res.f[1] > extend_mcshane(space, sub).f[1]
    assert res.minimizer.tolist() == [0, 0, 2]
    assert res.params.eps_eff == 0.5 and res.params.anchor == 2.0


def test_t3_descending_and_ascending():
    space, sub = t3()
    d = extend_descending(space, sub, 0.5)
    assert d.f[0] == 0 and d.f[2] == 1
    assert d.f[1] == pytest.approx(T3_DESC_F1, rel=1e-13)
    a = extend_ascending(space, sub, 0.5)
    assert a.f[1] == pytest.approx(T3_SLOPE_F1, rel=1e-13)
    assert np.array_equal(a.f, -extend_descending(space, -sub, 0.5).f)


def test_phi_eval():
    space, sub = t3()
    res = extend_slope(space, sub, 0.5)
    assert phi_eval(space, sub, res.penalties, 0, 0) == 0.0
    assert phi_eval(space, sub, res.penalties, 0, 1) == pytest.approx(T3_SLOPE_F1, rel=1e-13)
    assert phi_eval(space, sub, res.penalties, 2, 1, "minus") == pytest.approx(1 - T3_SLOPE_F1, rel=1e-13)
    for x in (0, 2):
        for y in range(3):
            assert phi_eval(space, sub, res.penalties, x, y) >= sub.value(x)


def test_constant_data():
    space = from_points([0, 1, 2, 5])
    sub = subset_function(space, [0, 3], [4.0, 4.0])
    for variant in VARIANTS:
        res = extend(variant, space, sub, 0.5)
        assert np.all(res.f == 4.0)
    single = subset_function(space, [2], [-1.0])
    assert np.all(extend_slope(space, single, 1.0).f == -1.0)


def test_parameter_errors():
    space, sub = t3()
    with pytest.raises(NonpositiveParameter):
        extend_slope(space, sub, 0.0)
    with pytest.raises(EmptySubset):
        subset_function(space, [], [])


def test_psi():
    space, sub = t3()
    seq = extend_slope(space, sub, 0.5).seq
    assert psi_eval(space, sub, seq, 2, 0, 1) == pytest.approx(5 / 11, rel=1e-15)
    assert psi_eval(space, sub, seq, 2, 0, 0) == 0.0
    assert psi_eval(space, sub, seq, 2, 0, 2) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(CoincidentPoints):
        psi_eval(space, sub, seq, 0, 0, 1)


def test_clamp():
    space, sub = t3()
    res = extend_slope(space, sub, 0.5)
    c = clamp_bounded(res, sub)
    assert np.array_equal(c.f, res.f) and c.params.clamped
    assert np.array_equal(clamp_bounded(c, sub).f, c.f)
    line = from_points([0, 1, 5])
    s2 = subset_function(line, [0, 1], [0.0, 1.0])
    m = extend_mcshane(line, s2)
    assert m.f[2] == 5.0
    cm = clamp_bounded(m, s2)
    assert cm.f.tolist() == [0.0, 1.0, 1.0]


@pytest.mark.parametrize("variant", ["slope", "descending", "ascending"])
def test_relabelling_points_does_not_change_f(variant):
    inst = random_instance(11, 30, 12)
    perm = np.random.default_rng(1).permutation(inst.space.n)
    D = inst.space.dist[np.ix_(perm, perm)]
    space2 = from_matrix(D)
    inv = np.argsort(perm)
    sub2 = subset_function(space2, inv[inst.subset.indices], inst.subset.values)
    f1 = extend(variant, inst.space, inst.subset, 0.4).f
    f2 = extend(variant, space2, sub2, 0.4).f
    assert np.array_equal(f1, f2[inv])


def test_parallel_evaluation_matches():
    inst = random_instance(5, 40, 15)
    res = extend_slope(inst.space, inst.subset, 0.5)
    pens = [res.penalties[int(x)] for x in inst.subset.indices]
    order = np.random.default_rng(2).permutation(inst.space.n)

    def row(p):
        return np.array([p(float(inst.space.dist[p.x, y])) for y in order])

    with ThreadPoolExecutor(4) as ex:
        rows = list(ex.map(row, pens))
    phi = inst.subset.values[:, None] + np.array(rows)
    assert np.array_equal(phi.min(axis=0), res.f[order])


@st.composite
def line_instances(draw):
    n = draw(st.integers(2, 6))
    xs = draw(st.lists(st.integers(0, 40), min_size=n, max_size=n, unique=True))
    c = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    g = draw(st.lists(st.integers(-8, 8), min_size=len(c), max_size=len(c)))
    return [x / 4 for x in xs], sorted(c), g


@given(line_instances(), st.sampled_from([Fr(1, 4), Fr(1, 2), Fr(2)]))
@settings(max_examples=25, deadline=None)
def test_slope_extension_matches_brute_force(inst, eps):
    xs, C, gvals = inst
    space = from_points(xs)
    sub = subset_function(space, C, [v / 2 for v in gvals])
    L = lip_global(space, sub.indices, sub.values)
    res = extend_slope(space, sub, float(eps), anchor=1.0)
    if L == 0:
        assert np.all(res.f == sub.values[0])
        return
    Lf = Fr(L)
    e = min(eps, Lf)
    rho = e / (3 * (Lf + e))
    g = {int(c): Fr(v) for c, v in zip(sub.indices, sub.values)}
    for y in range(space.n):
        want = min(g[x] + exact_pen(xs, list(g), g, x, rho, 1, Lf, abs(Fr(xs[x]) - Fr(xs[y])), depth=40)
                   for x in g)
        assert res.f[y] == pytest.approx(float(want), rel=1e-11, abs=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_result_invariants_on_random_instances(seed):
    inst = random_instance(seed, 20, 8)
    tol = tolerance(inst.subset)
    allX = np.arange(inst.space.n)
    for variant in VARIANTS:
        res = extend(variant, inst.space, inst.subset, 0.5)
        assert np.max(np.abs(res.f[inst.subset.indices] - inst.subset.values)) <= tol
        bound = res.params.L + res.params.eps_eff
        assert lip_global(inst.space, allX, res.f) <= bound + tol / inst.space.min_positive_distance
        assert set(res.minimizer.tolist()) <= set(inst.subset.indices.tolist())
