"""LP front end and simplex kernels, checked against scipy and enumeration."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from gridrisk import _kernels
from gridrisk.errors import SolverError
from gridrisk.lp import LinearProgram, solve_lp, to_standard_form

from _oracles import brute_force_lp

KERNELS = _kernels.available()


def random_lp(rng, n_max=10, feasible_bias=True):
    n = int(rng.integers(2, n_max))
    m_eq = int(rng.integers(0, min(n, 4)))
    m_ub = int(rng.integers(0, 7))
    c = rng.normal(size=n) * rng.uniform(0.5, 50)
    A_eq = rng.normal(size=(m_eq, n))
    A_ub = rng.normal(size=(m_ub, n))
    lb = rng.uniform(-5, 0, size=n)
    ub = lb + rng.uniform(0.1, 10, size=n)
    x0 = rng.uniform(lb, ub)
    b_eq = A_eq @ x0 if m_eq else np.zeros(0)
    slack = rng.uniform(-0.5, 2.0, size=m_ub) if feasible_bias else \
        rng.uniform(-3.0, 0.5, size=m_ub)
    b_ub = (A_ub @ x0 + slack) if m_ub else np.zeros(0)
    return LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub,
                         lb=lb, ub=ub)


def scipy_solve(lp):
    return linprog(lp.c,
                   A_ub=lp.A_ub if len(lp.b_ub) else None,
                   b_ub=lp.b_ub if len(lp.b_ub) else None,
                   A_eq=lp.A_eq if len(lp.b_eq) else None,
                   b_eq=lp.b_eq if len(lp.b_eq) else None,
                   bounds=list(zip(lp.lb, lp.ub)), method="highs")


@pytest.mark.parametrize("kernel", KERNELS)
class TestAgainstScipy:
    def test_random_battery(self, kernel):
        rng = np.random.default_rng(81)
        checked = 0
        for _ in range(120):
            lp = random_lp(rng)
            res = solve_lp(lp, kernel=kernel)
            ref = scipy_solve(lp)
            if ref.status == 2:
                assert res.status == "infeasible"
                continue
            assert ref.status == 0
            assert res.status == "optimal"
            assert res.objective == pytest.approx(ref.fun, abs=1e-7, rel=1e-7)
            # returned point must itself be feasible
            if len(lp.b_eq):
                assert np.max(np.abs(lp.A_eq @ res.x - lp.b_eq)) < 1e-7
            if len(lp.b_ub):
                assert np.max(lp.A_ub @ res.x - lp.b_ub) < 1e-6
            assert np.all(res.x >= lp.lb - 1e-7)
            assert np.all(res.x <= lp.ub + 1e-7)
            checked += 1
        assert checked > 60

    def test_warm_chain(self, kernel):
        rng = np.random.default_rng(5)
        lp = random_lp(rng, n_max=14)
        res = solve_lp(lp, kernel=kernel)
        warm = res.warm_state
        for _ in range(8):
            b2 = lp.b_eq + rng.normal(size=len(lp.b_eq)) * 0.2 \
                if len(lp.b_eq) else lp.b_eq
            lp = LinearProgram(lp.c, lp.A_eq, b2, lp.A_ub, lp.b_ub, lp.lb, lp.ub)
            rw = solve_lp(lp, kernel=kernel, warm_state=warm)
            ref = scipy_solve(lp)
            if ref.status == 2:
                assert rw.status == "infeasible"
                continue
            assert rw.status == "optimal"
            assert rw.objective == pytest.approx(ref.fun, abs=1e-7, rel=1e-7)
            if rw.warm_state is not None:
                warm = rw.warm_state


@pytest.mark.parametrize("kernel", KERNELS)
def test_against_enumeration(kernel):
    rng = np.random.default_rng(17)
    agree = 0
    for _ in range(40):
        lp = random_lp(rng, n_max=7)
        res = solve_lp(lp, kernel=kernel)
        status, x, obj = brute_force_lp(lp)
        assert res.status == ("optimal" if status == "optimal" else "infeasible")
        if status == "optimal":
            assert res.objective == pytest.approx(obj, abs=1e-6, rel=1e-6)
            agree += 1
    assert agree > 15


@pytest.mark.parametrize("kernel", KERNELS)
def test_determinism(kernel):
    rng = np.random.default_rng(3)
    lp = random_lp(rng)
    r1 = solve_lp(lp, kernel=kernel)
    r2 = solve_lp(lp, kernel=kernel)
    assert r1.status == r2.status
    assert np.array_equal(r1.x, r2.x)
    assert r1.objective == r2.objective
    assert r1.iterations == r2.iterations


def test_kernel_selection():
    assert "python" in KERNELS
    assert _kernels.get("python") is _kernels._BACKENDS["python"]
    assert _kernels.get() is _kernels.default
    with pytest.raises(KeyError):
        _kernels.get("not-a-kernel")


class TestStandardForm:
    def test_slack_bounds_cover_box(self):
        rng = np.random.default_rng(10)
        lp = random_lp(rng)
        if not len(lp.b_ub):
            lp = random_lp(np.random.default_rng(11))
        c, A, b, lb, ub, slack_of_row = to_standard_form(lp)
        n = lp.n_vars
        m_eq = len(lp.b_eq)
        # for random box points the needed slack must fit within its bounds
        for _ in range(50):
            x = rng.uniform(lp.lb, lp.ub)
            need = lp.b_ub - lp.A_ub @ x
            for t in range(len(lp.b_ub)):
                if need[t] >= 0:
                    assert need[t] <= ub[n + t] + 1e-12
        assert list(slack_of_row[:m_eq]) == [-1] * m_eq
        assert list(slack_of_row[m_eq:]) == list(range(n, n + len(lp.b_ub)))

    def test_infinite_rows_dropped(self):
        lp = LinearProgram(c=np.array([1.0, 1.0]),
                           A_eq=np.array([[1.0, 1.0]]), b_eq=np.array([1.0]),
                           A_ub=np.array([[1.0, 0.0], [0.0, 1.0]]),
                           b_ub=np.array([np.inf, 0.8]),
                           lb=np.zeros(2), ub=np.ones(2))
        c, A, b, lb, ub, slack_of_row = to_standard_form(lp)
        assert A.shape == (2, 3)  # one eq row + one finite ub row + its slack
        res = solve_lp(lp)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(1.0)

    def test_validation(self):
        ok = LinearProgram(c=np.array([1.0]), A_eq=np.zeros((0, 1)),
                           b_eq=np.zeros(0), A_ub=None, b_ub=None,
                           lb=np.array([0.0]), ub=np.array([2.0]))
        assert solve_lp(ok).objective == pytest.approx(0.0)
        with pytest.raises(SolverError, match="finite"):
            bad = LinearProgram(c=np.array([1.0]), A_eq=None, b_eq=None,
                                A_ub=None, b_ub=None,
                                lb=np.array([-np.inf]), ub=np.array([2.0]))
            solve_lp(bad)
        with pytest.raises(SolverError, match="columns"):
            bad = LinearProgram(c=np.array([1.0, 2.0]),
                                A_eq=np.zeros((1, 3)), b_eq=np.zeros(1),
                                A_ub=None, b_ub=None,
                                lb=np.zeros(2), ub=np.ones(2))
            solve_lp(bad)
        with pytest.raises(SolverError, match="bound"):
            bad = LinearProgram(c=np.array([1.0]), A_eq=None, b_eq=None,
                                A_ub=None, b_ub=None,
                                lb=np.array([3.0]), ub=np.array([2.0]))
            solve_lp(bad)


def test_contradictory_equalities_infeasible():
    lp = LinearProgram(c=np.array([1.0, 1.0]),
                       A_eq=np.array([[1.0, 1.0], [1.0, 1.0]]),
                       b_eq=np.array([1.0, 2.0]),
                       A_ub=None, b_ub=None,
                       lb=np.zeros(2), ub=np.ones(2))
    assert solve_lp(lp).status == "infeasible"


def test_box_conflict_infeasible():
    lp = LinearProgram(c=np.array([0.0]),
                       A_eq=None, b_eq=None,
                       A_ub=np.array([[-1.0]]), b_ub=np.array([-5.0]),
                       lb=np.array([0.0]), ub=np.array([1.0]))
    assert solve_lp(lp).status == "infeasible"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_never_beaten_by_feasible_points(seed):
    """Any feasible point must score at least the reported optimum."""
    rng = np.random.default_rng(seed)
    lp = random_lp(rng)
    res = solve_lp(lp, kernel="python")
    if res.status != "optimal":
        return
    for _ in range(20):
        x = rng.uniform(lp.lb, lp.ub)
        if len(lp.b_eq):
            # project the random point back onto the equality manifold
            A = lp.A_eq
            x = x - A.T @ np.linalg.lstsq(A @ A.T, A @ x - lp.b_eq, rcond=None)[0]
            if np.any(x < lp.lb) or np.any(x > lp.ub):
                continue
        if len(lp.b_ub) and np.any(lp.A_ub @ x > lp.b_ub):
            continue
        assert lp.c @ x >= res.objective - 1e-7 * (1 + abs(res.objective))
