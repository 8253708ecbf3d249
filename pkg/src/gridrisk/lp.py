"""Linear program container and solver front end.

Problems are stated in the usual mixed form

    min c.x   s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lb <= x <= ub

and converted here to the all-equality bounded standard form the kernels
consume (inequality rows gain slack columns). Bounds must be finite; callers
pick suitably large box bounds for variables that are conceptually free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SolverError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray | None
    b_ub: np.ndarray | None
    lb: np.ndarray
    ub: np.ndarray

    @property
    def n_vars(self):
        return len(self.c)


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int
    warm_state: tuple | None = None


def _validate(lp: LinearProgram):
    n = lp.n_vars
    c = np.asarray(lp.c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise SolverError("objective coefficients must be finite")
    for name, arr, rows in (("A_eq", lp.A_eq, lp.b_eq), ("A_ub", lp.A_ub, lp.b_ub)):
        if arr is None:
            continue
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2 or a.shape[1] != n:
            raise SolverError(f"{name} must be 2-d with {n} columns")
        if len(np.asarray(rows, dtype=float)) != a.shape[0]:
            raise SolverError(f"{name} and its right-hand side disagree on rows")
        if not np.all(np.isfinite(a)):
            raise SolverError(f"{name} has non-finite entries")
    lb = np.asarray(lp.lb, dtype=float)
    ub = np.asarray(lp.ub, dtype=float)
    if len(lb) != n or len(ub) != n:
        raise SolverError("bound vectors must match the variable count")
    if not (np.all(np.isfinite(lb)) and np.all(np.isfinite(ub))):
        raise SolverError("kernel requires finite variable bounds")
    if np.any(lb > ub):
        raise SolverError("lower bound exceeds upper bound")


def to_standard_form(lp: LinearProgram):
    """Append slack columns for the inequality rows.

    Inequality rows with an infinite right-hand side are vacuous and dropped.
    Slack upper bounds come from interval arithmetic over the box, so they
    never cut into the feasible set. Returns (c, A, b, lb, ub, slack_of_row).
    """
    _validate(lp)
    n = lp.n_vars
    c = np.asarray(lp.c, dtype=float)
    lb = np.asarray(lp.lb, dtype=float)
    ub = np.asarray(lp.ub, dtype=float)
    A_eq = np.zeros((0, n)) if lp.A_eq is None else np.asarray(lp.A_eq, dtype=float)
    b_eq = np.zeros(0) if lp.b_eq is None else np.asarray(lp.b_eq, dtype=float)

    if lp.A_ub is None or len(lp.b_ub) == 0:
        A_ub = np.zeros((0, n))
        b_ub = np.zeros(0)
    else:
        A_ub = np.asarray(lp.A_ub, dtype=float)
        b_ub = np.asarray(lp.b_ub, dtype=float)
        keep = np.isfinite(b_ub)
        A_ub, b_ub = A_ub[keep], b_ub[keep]

    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    m = m_eq + m_ub
    A = np.zeros((m, n + m_ub))
    A[:m_eq, :n] = A_eq
    A[m_eq:, :n] = A_ub
    A[m_eq:, n:] = np.eye(m_ub)
    b = np.concatenate([b_eq, b_ub])

    # largest slack ever needed: b_i minus the row minimum over the box
    row_min = np.minimum(A_ub * lb, A_ub * ub).sum(axis=1) if m_ub else np.zeros(0)
    s_ub = b_ub - row_min
    s_ub = np.maximum(s_ub, 0.0) + 1e-9 * (1.0 + np.abs(s_ub))

    lb_full = np.concatenate([lb, np.zeros(m_ub)])
    ub_full = np.concatenate([ub, s_ub])
    c_full = np.concatenate([c, np.zeros(m_ub)])
    slack_of_row = np.concatenate([np.full(m_eq, -1, dtype=np.int64),
                                   n + np.arange(m_ub, dtype=np.int64)])
    return c_full, A, b, lb_full, ub_full, slack_of_row


def solve_lp(lp: LinearProgram, kernel=None, warm_state=None) -> LpResult:
    """Solve with the selected kernel ("python", "compiled", or None for the
    installation default). ``warm_state`` from a previous result on the same
    structure usually skips phase 1; it is validated and dropped if stale.
    """
    impl = _kernels.get(kernel) if isinstance(kernel, (str, type(None))) else kernel
    c, A, b, lb, ub, slack_of_row = to_standard_form(lp)
    basis0, vstat0 = warm_state if warm_state is not None else (None, None)

    status, x, obj, iters, basis, vstat = impl.solve(
        c, A, b, lb, ub, slack_of_row, basis0=basis0, vstat0=vstat0)
    if status == 2 and warm_state is not None:
        # a stale warm start can thrash; retry cold once
        status, x, obj, iters2, basis, vstat = impl.solve(
            c, A, b, lb, ub, slack_of_row)
        iters += iters2

    n = lp.n_vars
    if status == 0:
        warm = (basis, vstat) if basis is not None else None
        return LpResult(status=OPTIMAL, x=x[:n], objective=float(lp.c @ x[:n]),
                        iterations=iters, warm_state=warm)
    if status == 1:
        return LpResult(status=INFEASIBLE, x=None, objective=None,
                        iterations=iters)
    return LpResult(status=ITERATION_LIMIT, x=None, objective=None,
                    iterations=iters)
