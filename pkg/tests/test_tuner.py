import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from calctune import (
    CALCULI, JointTable, LinearParams, OptimizerFailure, ProblemSet, TunerConfig,
    kernels, objective, probe_grid, theoretical_init, tune,
)
from calctune.calculi import CALC_IDS, PARAM_TYPES, evaluate
from calctune.mce import norm_targets
from calctune.tuner import conjugate_gradient, to_model, to_search

from .conftest import tables

GRID = probe_grid()


def _problems(table):
    return ProblemSet.from_probes(GRID, norm_targets(table, GRID))


def _linear_problems(a, b1, b2):
    p = LinearParams(a, b1, b2)
    p1 = np.array([g.p1 for g in GRID])
    p2 = np.array([g.p2 for g in GRID])
    return ProblemSet(p1, p2, evaluate(p, p1, p2))


@pytest.fixture
def product_table():
    return JointTable.from_factors(0.3, 0.65, [[0.2, 0.7], [0.55, 0.9]])


def test_problem_set_validation():
    with pytest.raises(ValueError):
        ProblemSet(np.array([0.5]), np.array([0.5, 0.2]), np.array([0.1]))
    with pytest.raises(ValueError):
        ProblemSet(np.array([0.5]), np.array([0.5]), np.array([1.2]))


def test_objective_zero_at_exact_fit():
    ps = _linear_problems(0.2, 0.3, 0.4)
    assert objective("linear", LinearParams(0.2, 0.3, 0.4), ps) == 0.0


def test_objective_constant_model(t_star):
    ps = _problems(t_star)
    c = 0.37
    expected = sum((c - t) ** 2 for t in ps.targets) / len(ps)
    assert objective("linear", LinearParams(c, 0, 0), ps) == pytest.approx(expected, rel=1e-14)


def test_independence_exact_on_product_table(product_table):
    p = theoretical_init(product_table, "independence")
    assert objective("independence", p, _problems(product_table)) < 1e-12


def test_linear_recovers_generating_model(t_star):
    res = tune("linear", _linear_problems(0.2, 0.3, 0.4), t_star)
    p = res.params
    assert (p.a, p.b1, p.b2) == pytest.approx((0.2, 0.3, 0.4), abs=1e-4)
    assert res.mse < 1e-10


def test_independence_on_product_table(product_table):
    res = tune("independence", _problems(product_table), product_table)
    assert res.mse < 1e-8


@pytest.mark.parametrize("calc", ["linear", "independence"])
def test_restart_seeds_agree(t_star, calc):
    ps = _problems(t_star)
    a = tune(calc, ps, t_star, TunerConfig(seed=1))
    b = tune(calc, ps, t_star, TunerConfig(seed=2))
    assert abs(a.mse - b.mse) < 1e-6


@pytest.mark.parametrize("calc", CALCULI)
def test_tuning_never_loses_and_descends(t_star, calc):
    res = tune(calc, _problems(t_star), t_star, TunerConfig(seed=4))
    assert res.mse <= res.init_mse
    assert res.rmse == pytest.approx(math.sqrt(res.mse), abs=1e-15)
    assert len(res.starts) == 5
    assert 1 <= res.starts_agreeing <= 5
    for run in res.starts:
        h = np.array(run.history)
        assert np.all(np.diff(h) <= 0.0)
        assert run.f == h[-1]


@pytest.mark.parametrize("calc", ["linear", "independence"])
def test_converged_gradient_is_small(calc):
    rng = np.random.default_rng(8)
    for _ in range(5):
        t = JointTable.from_cells(rng.dirichlet(np.ones(8)))
        ps = _problems(t)
        res = tune(calc, ps, t)
        z = to_search(calc, res.params)
        g = kernels.search_gradient(CALC_IDS[calc], z, ps.p1, ps.p2, ps.targets, False, 1e-5)
        assert np.linalg.norm(g) < 1e-6


@pytest.mark.parametrize("calc", CALCULI)
def test_gradient_richardson_consistency(t_star, calc):
    ps = _problems(t_star)
    cid = CALC_IDS[calc]
    rng = np.random.default_rng(cid)
    z = rng.uniform(-1, 1, kernels.N_PARAMS[cid])
    g1 = kernels.search_gradient(cid, z, ps.p1, ps.p2, ps.targets, False, 1e-4)
    g2 = kernels.search_gradient(cid, z, ps.p1, ps.p2, ps.targets, False, 5e-5)
    np.testing.assert_allclose(g1, g2, rtol=1e-5, atol=1e-10)

    f = lambda v: kernels.search_objective(cid, v, ps.p1, ps.p2, ps.targets, False)
    d = rng.normal(size=z.size)
    slope = (f(z + 1e-6 * d) - f(z - 1e-6 * d)) / 2e-6
    assert slope == pytest.approx(float(g2 @ d), rel=1e-5, abs=1e-10)


@given(st.sampled_from(CALCULI), st.lists(st.floats(1e-6, 1 - 1e-6), min_size=7, max_size=7),
       st.lists(st.floats(-0.999999, 0.999999), min_size=2, max_size=2))
def test_transform_round_trip(calc, probs, cfs):
    n = kernels.N_PARAMS[CALC_IDS[calc]]
    values = list(probs[:n])
    if calc == "mycin":
        values[3:5] = cfs
    if calc == "linear":
        values = [v * 10 - 5 for v in values]
    p = PARAM_TYPES[calc].from_array(values)
    back = to_model(calc, to_search(calc, p))
    np.testing.assert_allclose(back.to_array(), p.to_array(), atol=1e-12, rtol=0)


def _helical_valley():
    def theta(x1, x2):
        t = math.atan(x2 / x1) / (2 * math.pi)
        return t + 0.5 if x1 < 0 else t

    def f(x):
        r = math.hypot(x[0], x[1])
        return 100 * ((x[2] - 10 * theta(x[0], x[1])) ** 2 + (r - 1) ** 2) + x[2] ** 2

    def grad(x, h=1e-7):
        g = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            g[i] = (f(x + e) - f(x - e)) / (2 * h)
        return g

    return f, grad


def test_conjugate_gradient_on_helical_valley():
    f, grad = _helical_valley()
    res = conjugate_gradient(f, grad, np.array([-1.0, 0.0, 0.0]),
                             TunerConfig(max_iter=5000, gtol=1e-6))
    np.testing.assert_allclose(res.z, [1.0, 0.0, 0.0], atol=1e-4)
    assert np.all(np.diff(res.history) <= 0)


def test_conjugate_gradient_quadratic_is_fast():
    a = np.diag([1.0, 10.0, 100.0])
    res = conjugate_gradient(lambda z: 0.5 * z @ a @ z, lambda z: a @ z, np.ones(3))
    assert res.f < 1e-16
    assert res.iterations < 60


def test_optimizer_failure(t_star, monkeypatch):
    monkeypatch.setattr(kernels, "search_objective", lambda *a: float("nan"))
    with pytest.raises(OptimizerFailure):
        tune("linear", _problems(t_star), t_star)


def test_start_points_deterministic(t_star):
    from calctune.tuner import start_points

    a = start_points("mycin", t_star, TunerConfig(seed=3), key=5)
    b = start_points("mycin", t_star, TunerConfig(seed=3), key=5)
    c = start_points("mycin", t_star, TunerConfig(seed=3), key=6)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[1], c[1])
    assert np.all(np.abs(np.array(a[1:])) <= 3.0)


@given(tables(floor=0.01))
def test_tuned_linear_is_least_squares(t):
    ps = _problems(t)
    x = np.column_stack([np.ones(len(ps)), ps.p1, ps.p2])
    coef, *_ = np.linalg.lstsq(x, ps.targets, rcond=None)
    res = tune("linear", ps, t, TunerConfig(restarts=0))
    np.testing.assert_allclose([res.params.a, res.params.b1, res.params.b2], coef, atol=1e-5)
