"""Scratch check: numpy simplex vs scipy HiGHS on random bounded LPs."""

import numpy as np
from scipy.optimize import linprog

from gridrisk.lp import LinearProgram, solve_lp

rng = np.random.default_rng(7)
bad = 0
agree = 0
infeas = 0
for trial in range(400):
    n = rng.integers(2, 9)
    m_eq = rng.integers(0, min(n, 4))
    m_ub = rng.integers(0, 7)
    c = rng.normal(size=n) * rng.uniform(0.5, 50)
    A_eq = rng.normal(size=(m_eq, n))
    A_ub = rng.normal(size=(m_ub, n))
    lb = rng.uniform(-5, 0, size=n)
    ub = lb + rng.uniform(0.1, 10, size=n)
    x0 = rng.uniform(lb, ub)
    # bias toward feasible problems: rhs from an interior point, then perturb
    b_eq = A_eq @ x0 if m_eq else np.zeros(0)
    b_ub = (A_ub @ x0 + rng.uniform(-0.5, 2.0, size=m_ub)) if m_ub else np.zeros(0)

    lp = LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub, lb=lb, ub=ub)
    res = solve_lp(lp, kernel="python")

    ref = linprog(c, A_ub=A_ub if m_ub else None, b_ub=b_ub if m_ub else None,
                  A_eq=A_eq if m_eq else None, b_eq=b_eq if m_eq else None,
                  bounds=list(zip(lb, ub)), method="highs")
    if ref.status == 2:
        if res.status != "infeasible":
            print(f"trial {trial}: scipy infeasible, ours {res.status}")
            bad += 1
        else:
            infeas += 1
        continue
    assert ref.status == 0, f"scipy status {ref.status}"
    if res.status != "optimal":
        print(f"trial {trial}: scipy optimal {ref.fun:.6f}, ours {res.status}")
        bad += 1
        continue
    if abs(res.objective - ref.fun) > 1e-7 * (1 + abs(ref.fun)):
        print(f"trial {trial}: obj {res.objective:.9f} vs scipy {ref.fun:.9f}")
        bad += 1
        continue
    # solution must satisfy all constraints
    if m_eq and np.abs(A_eq @ res.x - b_eq).max() > 1e-7:
        print(f"trial {trial}: eq residual {np.abs(A_eq @ res.x - b_eq).max():.2e}")
        bad += 1
        continue
    if m_ub and (A_ub @ res.x - b_ub).max() > 1e-6:
        print(f"trial {trial}: ub violation {(A_ub @ res.x - b_ub).max():.2e}")
        bad += 1
        continue
    if (lb - res.x).max() > 1e-7 or (res.x - ub).max() > 1e-7:
        print(f"trial {trial}: bound violation")
        bad += 1
        continue
    agree += 1

print(f"agree={agree} infeasible(both)={infeas} bad={bad}")
