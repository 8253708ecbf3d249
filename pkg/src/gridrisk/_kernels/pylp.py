"""Bounded-variable two-phase revised simplex, plain numpy.

Reference kernel. The compiled module ``_fastlp`` mirrors the same entry
point; both solve

    min c.x   s.t.  A x = b,  lb <= x <= ub

with all bounds finite. Inequalities must already be rewritten as equalities
with slack columns inside ``A``; ``slack_of_row[i]`` names row i's slack
column (-1 for a true equality row). Phase 1 adds artificial columns for the
rows a slack cannot absorb, phase 2 pins them at zero.

The basis inverse is kept explicitly and refreshed by full refactorization
every ``_REFACTOR_EVERY`` pivots, which is plenty of drift control at the
problem sizes this package targets (a few hundred rows).
"""

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
MAXITER = 2

_PIV_TOL = 1e-9        # smallest acceptable pivot magnitude
_DUAL_TOL = 1e-10      # reduced-cost threshold on the scaled objective
_FEAS_TOL = 1e-7       # phase-1 residual considered "zero"
_REFACTOR_EVERY = 128
_BLAND_AFTER = 40      # degenerate pivots in a row before anti-cycling kicks in


def _recompute(A, b, lb, ub, basis, vstat):
    """Fresh basis inverse and basic values from scratch (drift control)."""
    Binv = np.linalg.inv(A[:, basis])
    nonbasic = np.flatnonzero(vstat != 2)
    xn = np.where(vstat[nonbasic] == 1, ub[nonbasic], lb[nonbasic])
    x_B = Binv @ (b - A[:, nonbasic] @ xn)
    return Binv, x_B


def _simplex(c, A, b, lb, ub, basis, vstat, Binv, x_B, max_iter):
    """Iterate from a feasible basic state until optimal or out of budget.

    vstat codes: 0 at lower bound, 1 at upper bound, 2 basic. All five state
    arrays are mutated in place. Returns (code, iterations used).
    """
    movable = (ub - lb) > 0
    it = 0
    bland = False
    stall = 0
    since_refactor = 0
    while it < max_iter:
        it += 1
        y = Binv.T @ c[basis]
        d = c - A.T @ y
        ok = (((vstat == 0) & (d < -_DUAL_TOL))
              | ((vstat == 1) & (d > _DUAL_TOL))) & movable
        eligible = np.flatnonzero(ok)
        if eligible.size == 0:
            return OPTIMAL, it - 1
        if bland:
            q = int(eligible[0])
        else:
            q = int(eligible[np.argmax(np.abs(d[eligible]))])
        s = 1.0 if vstat[q] == 0 else -1.0
        w = Binv @ A[:, q]
        delta = s * w

        # ratio test; entering moves by t >= 0, basics by -t*delta
        t_star = ub[q] - lb[q]
        r_star = -1  # -1 means bound flip, no basis change
        cand = np.flatnonzero(np.abs(delta) > _PIV_TOL)
        if cand.size:
            dlt = delta[cand]
            room = np.where(dlt > 0.0,
                            x_B[cand] - lb[basis[cand]],
                            x_B[cand] - ub[basis[cand]])
            t_i = np.maximum(room / dlt, 0.0)
            tmin = t_i.min()
            if tmin < t_star:
                near = np.flatnonzero(t_i <= tmin + 1e-9 * (1.0 + tmin))
                if bland:
                    k = near[np.argmin(basis[cand[near]])]
                else:
                    k = near[np.argmax(np.abs(dlt[near]))]
                t_star = t_i[k]
                r_star = int(cand[k])

        x_B -= t_star * delta
        if r_star < 0:
            vstat[q] = 1 - vstat[q]
        else:
            leaving = basis[r_star]
            vstat[leaving] = 0 if delta[r_star] > 0.0 else 1
            vstat[q] = 2
            basis[r_star] = q
            x_B[r_star] = (lb[q] if s > 0.0 else ub[q]) + s * t_star
            wr = w[r_star]
            br = Binv[r_star] / wr
            Binv -= np.outer(w, br)
            Binv[r_star] = br
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                Binv2, x_B2 = _recompute(A, b, lb, ub, basis, vstat)
                Binv[:, :] = Binv2
                x_B[:] = x_B2
                since_refactor = 0

        if t_star <= 1e-12:
            stall += 1
            if stall >= _BLAND_AFTER:
                bland = True
        else:
            stall = 0
            bland = False
    return MAXITER, it


def _dual_simplex(c, A, b, lb, ub, basis, vstat, Binv, x_B, max_iter):
    """Restore primal feasibility from a dual-feasible basis.

    This is the re-optimization path for warm starts where only ``b`` (and
    possibly bounds) changed: the previous optimal basis keeps its reduced-
    cost signs, so driving the bound-violating basics out recovers the new
    optimum in few pivots. Returns (code, iterations); OPTIMAL here means
    primal-feasible (the caller should finish with a primal pass). The
    INFEASIBLE verdict is only trustworthy when the start really was dual
    feasible; callers treat it as a hint and re-solve cold.
    """
    m, n = A.shape
    movable = (ub - lb) > 0
    ftol = _FEAS_TOL * max(1.0, float(np.abs(b).max()))
    it = 0
    since_refactor = 0
    while it < max_iter:
        it += 1
        lbB = lb[basis]
        ubB = ub[basis]
        lo = lbB - x_B
        hi = x_B - ubB
        worst = np.maximum(lo, hi)
        r = int(np.argmax(worst))
        if worst[r] <= ftol:
            return OPTIMAL, it - 1
        below = lo[r] >= hi[r]

        alpha = Binv[r] @ A
        d = c - A.T @ (Binv.T @ c[basis])
        at_lo = (vstat == 0) & movable
        at_hi = (vstat == 1) & movable
        if below:   # basic must increase toward its lower bound
            elig = (at_lo & (alpha < -_PIV_TOL)) | (at_hi & (alpha > _PIV_TOL))
        else:
            elig = (at_lo & (alpha > _PIV_TOL)) | (at_hi & (alpha < -_PIV_TOL))
        cand = np.flatnonzero(elig)
        if cand.size == 0:
            return INFEASIBLE, it
        q = int(cand[np.argmin(np.abs(d[cand] / alpha[cand]))])

        s = 1.0 if vstat[q] == 0 else -1.0
        w = Binv @ A[:, q]
        bound_r = lbB[r] if below else ubB[r]
        t = (x_B[r] - bound_r) / (s * w[r])
        if t > ub[q] - lb[q]:
            # entering hits its far bound before the violation clears: flip
            # and look again with the violation reduced
            x_B -= s * (ub[q] - lb[q]) * w
            vstat[q] = 1 - vstat[q]
            continue
        leaving = basis[r]
        x_B -= s * t * w
        x_B[r] = (lb[q] if s > 0.0 else ub[q]) + s * t
        vstat[leaving] = 0 if below else 1
        vstat[q] = 2
        basis[r] = q
        wr = w[r]
        br = Binv[r] / wr
        Binv -= np.outer(w, br)
        Binv[r] = br
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            Binv2, x_B2 = _recompute(A, b, lb, ub, basis, vstat)
            Binv[:, :] = Binv2
            x_B[:] = x_B2
            since_refactor = 0
    return MAXITER, it


def solve(c, A, b, lb, ub, slack_of_row, max_iter=None, basis0=None, vstat0=None):
    """Solve min c.x s.t. A x = b, lb <= x <= ub (finite bounds).

    basis0/vstat0, when given, warm-start from a previous solve on the same
    structure (same c and A; changed b and bounds are what warm starts are
    for). A primal-infeasible warm basis goes through the dual simplex; an
    unusable one falls back to the cold two-phase start.

    Returns (status, x, objective, iterations, basis, vstat); basis/vstat are
    None unless the final basis is reusable for a warm start.
    """
    c = np.asarray(c, dtype=float)
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 200

    cscale = max(1.0, float(np.abs(c).max())) if n else 1.0
    c1 = c / cscale
    iterations = 0

    if m == 0:
        x = np.where(c > 0, lb, ub)
        return OPTIMAL, x, float(c @ x), 0, None, None

    state = None
    if basis0 is not None and vstat0 is not None and len(basis0) == m \
            and len(vstat0) == n and int(np.max(basis0)) < n:
        basis = np.asarray(basis0, dtype=np.int64).copy()
        vstat = np.asarray(vstat0, dtype=np.int8).copy()
        if int((vstat == 2).sum()) == m and bool(np.all(vstat[basis] == 2)):
            try:
                Binv, x_B = _recompute(A, b, lb, ub, basis, vstat)
                ftol = _FEAS_TOL * max(1.0, float(np.abs(b).max()))
                if np.all(x_B >= lb[basis] - ftol) and np.all(x_B <= ub[basis] + ftol):
                    state = (c1, A, lb, ub, basis, vstat, Binv, x_B)
                else:
                    # a convergent dual run needs few pivots; a degenerate one
                    # can cycle, so give it a short budget and restart cold
                    budget = max(50, m // 8)
                    code, used = _dual_simplex(c1, A, b, lb, ub, basis, vstat,
                                               Binv, x_B, budget)
                    iterations += used
                    if code == OPTIMAL:
                        state = (c1, A, lb, ub, basis, vstat, Binv, x_B)
            except np.linalg.LinAlgError:
                state = None

    if state is None:
        # cold start: nonbasics at the bound nearer zero, slack columns
        # absorb nonnegative residuals, artificials cover the rest
        vstat = np.where(np.abs(ub) < np.abs(lb), 1, 0).astype(np.int8)
        xn = np.where(vstat == 1, ub, lb)
        resid = b - A @ xn
        basis = np.empty(m, dtype=np.int64)
        signs = np.ones(m)
        art_rows = []
        for i in range(m):
            j = slack_of_row[i]
            if j >= 0 and 0.0 <= resid[i] <= ub[j]:
                basis[i] = j
            else:
                art_rows.append(i)
        k = len(art_rows)
        n1 = n + k
        A1 = np.zeros((m, n1))
        A1[:, :n] = A
        lb1 = np.concatenate([lb, np.zeros(k)])
        ub1 = np.concatenate([ub, np.zeros(k)])
        c_art = np.zeros(n1)
        vstat = np.concatenate([vstat, np.full(k, 2, dtype=np.int8)])
        for t, i in enumerate(art_rows):
            j = n + t
            sg = 1.0 if resid[i] >= 0 else -1.0
            A1[i, j] = sg
            signs[i] = sg
            ub1[j] = abs(resid[i]) + 1.0
            c_art[j] = 1.0
            basis[i] = j
        vstat[basis] = 2
        # rows served by their slack hold the raw residual, artificial rows |resid|
        x_B = signs * resid
        Binv = np.diag(signs)

        if k:
            code, used = _simplex(c_art, A1, b, lb1, ub1, basis, vstat, Binv,
                                  x_B, max_iter)
            iterations += used
            if code == MAXITER:
                return MAXITER, None, None, iterations, None, None
            ftol = _FEAS_TOL * max(1.0, float(np.abs(b).max()))
            art_val = float(x_B[basis >= n].sum()) if np.any(basis >= n) else 0.0
            nb_art = np.flatnonzero((vstat[n:] != 2))
            art_val += float(np.where(vstat[n + nb_art] == 1,
                                      ub1[n + nb_art], lb1[n + nb_art]).sum())
            if art_val > ftol:
                return INFEASIBLE, None, None, iterations, None, None
            # pin artificials at zero for phase 2
            lb1[n:] = 0.0
            ub1[n:] = 0.0
            vstat[n:][vstat[n:] != 2] = 0
            x_B[basis >= n] = 0.0
        c2 = np.concatenate([c1, np.zeros(k)])
        state = (c2, A1, lb1, ub1, basis, vstat, Binv, x_B)

    c_w, A_w, lb_w, ub_w, basis, vstat, Binv, x_B = state
    code, used = _simplex(c_w, A_w, b, lb_w, ub_w, basis, vstat, Binv, x_B,
                          max_iter - iterations)
    iterations += used
    if code == MAXITER:
        return MAXITER, None, None, iterations, None, None

    # rebuild the solution from a fresh factorization to shed update drift
    Binv, x_B = _recompute(A_w, b, lb_w, ub_w, basis, vstat)
    x_full = np.where(vstat == 1, ub_w, lb_w)
    x_full[basis] = x_B
    x = x_full[:n]
    obj = float(c @ x)
    if int(np.max(basis)) < n:
        return OPTIMAL, x, obj, iterations, basis.copy(), vstat[:n].copy()
    return OPTIMAL, x, obj, iterations, None, None
