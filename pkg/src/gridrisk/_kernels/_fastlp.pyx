# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Bounded-variable two-phase revised simplex, compiled.

Same entry point, pivot rules, and return contract as ``pylp.solve``; see
that module for the algorithm notes. The per-iteration work (pricing, ratio
test, rank-1 basis-inverse update) runs as C loops over typed views, which
is where the numpy kernel spends its time in fancy indexing and temporaries
at the few-hundred-row problem sizes this package targets. Refactorization
still defers to numpy's LAPACK binding; it runs once per 128 pivots and at
the ends, so there is nothing to win by hand-rolling it.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()

OPTIMAL = 0
INFEASIBLE = 1
MAXITER = 2

cdef double _PIV_TOL = 1e-9
cdef double _DUAL_TOL = 1e-10
cdef double _FEAS_TOL = 1e-7
cdef int _REFACTOR_EVERY = 128
cdef int _BLAND_AFTER = 40


def _recompute(A, b, lb, ub, basis, vstat):
    """Fresh basis inverse and basic values from scratch (drift control)."""
    Binv = np.linalg.inv(A[:, basis])
    nonbasic = np.flatnonzero(vstat != 2)
    xn = np.where(vstat[nonbasic] == 1, ub[nonbasic], lb[nonbasic])
    x_B = Binv @ (b - A[:, nonbasic] @ xn)
    return Binv, x_B


cdef void _price(double[::1] c, double[:, ::1] A, double[:, ::1] Binv,
                 cnp.int64_t[::1] basis, double[::1] y, double[::1] d) noexcept:
    """d = c - A.T @ (Binv.T @ c[basis]), accumulated row-major."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t i, j
    cdef double cb, yi
    for j in range(m):
        y[j] = 0.0
    for i in range(m):
        cb = c[basis[i]]
        if cb != 0.0:
            for j in range(m):
                y[j] += Binv[i, j] * cb
    for j in range(n):
        d[j] = c[j]
    for i in range(m):
        yi = y[i]
        if yi != 0.0:
            for j in range(n):
                d[j] -= A[i, j] * yi


cdef void _ftran(double[:, ::1] Binv, double[:, ::1] A, Py_ssize_t q,
                 double[::1] aq, double[::1] w) noexcept:
    """w = Binv @ A[:, q]."""
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(m):
        aq[i] = A[i, q]
    for i in range(m):
        acc = 0.0
        for k in range(m):
            acc += Binv[i, k] * aq[k]
        w[i] = acc


cdef void _update_inverse(double[:, ::1] Binv, double[::1] w, double[::1] br,
                          Py_ssize_t r) noexcept:
    """Rank-1 update after the column in row r changes: standard product form."""
    cdef Py_ssize_t m = Binv.shape[0]
    cdef Py_ssize_t i, k
    cdef double wr = w[r], wi
    for k in range(m):
        br[k] = Binv[r, k] / wr
    for i in range(m):
        wi = w[i]
        if wi != 0.0 and i != r:
            for k in range(m):
                Binv[i, k] -= wi * br[k]
    for k in range(m):
        Binv[r, k] = br[k]


def _simplex(double[::1] c, double[:, ::1] A, b, double[::1] lb,
             double[::1] ub, cnp.int64_t[::1] basis, cnp.int8_t[::1] vstat,
             double[:, ::1] Binv, double[::1] x_B, int max_iter):
    """Primal loop; mirrors pylp._simplex pivot for pivot."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef int it = 0, stall = 0, since_refactor = 0
    cdef bint bland = False
    cdef Py_ssize_t i, j, q, r_star
    cdef cnp.int64_t leaving, best_basis
    cdef double dj, adj, best, s, t_star, tmin, thresh, room, ti, dlt, mag
    cdef double best_mag

    scratch_y = np.empty(m)
    scratch_d = np.empty(n)
    scratch_w = np.empty(m)
    scratch_aq = np.empty(m)
    scratch_br = np.empty(m)
    scratch_t = np.empty(m)
    cdef double[::1] y = scratch_y, d = scratch_d, w = scratch_w
    cdef double[::1] aq = scratch_aq, br = scratch_br, t_arr = scratch_t

    while it < max_iter:
        it += 1
        _price(c, A, Binv, basis, y, d)

        # entering variable: most-negative pricing, or Bland when cycling
        q = -1
        best = 0.0
        for j in range(n):
            if ub[j] - lb[j] <= 0.0:
                continue
            dj = d[j]
            if (vstat[j] == 0 and dj < -_DUAL_TOL) or \
                    (vstat[j] == 1 and dj > _DUAL_TOL):
                if bland:
                    q = j
                    break
                adj = fabs(dj)
                if adj > best:
                    best = adj
                    q = j
        if q < 0:
            return OPTIMAL, it - 1

        s = 1.0 if vstat[q] == 0 else -1.0
        _ftran(Binv, A, q, aq, w)

        # ratio test; entering moves by t >= 0, basics by -t*delta
        t_star = ub[q] - lb[q]
        r_star = -1
        tmin = INFINITY
        for i in range(m):
            dlt = s * w[i]
            if fabs(dlt) > _PIV_TOL:
                if dlt > 0.0:
                    room = x_B[i] - lb[basis[i]]
                else:
                    room = x_B[i] - ub[basis[i]]
                ti = room / dlt
                if ti < 0.0:
                    ti = 0.0
                t_arr[i] = ti
                if ti < tmin:
                    tmin = ti
            else:
                t_arr[i] = INFINITY
        if tmin < t_star:
            thresh = tmin + 1e-9 * (1.0 + tmin)
            best_mag = -1.0
            best_basis = 0
            for i in range(m):
                if t_arr[i] <= thresh:
                    if bland:
                        if r_star < 0 or basis[i] < best_basis:
                            best_basis = basis[i]
                            r_star = i
                    else:
                        mag = fabs(s * w[i])
                        if mag > best_mag:
                            best_mag = mag
                            r_star = i
            t_star = t_arr[r_star]

        for i in range(m):
            x_B[i] -= t_star * s * w[i]
        if r_star < 0:
            vstat[q] = 1 - vstat[q]
        else:
            leaving = basis[r_star]
            vstat[leaving] = 0 if s * w[r_star] > 0.0 else 1
            vstat[q] = 2
            basis[r_star] = q
            x_B[r_star] = (lb[q] if s > 0.0 else ub[q]) + s * t_star
            _update_inverse(Binv, w, br, r_star)
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                Binv2, x_B2 = _recompute(np.asarray(A), b, np.asarray(lb),
                                         np.asarray(ub), np.asarray(basis),
                                         np.asarray(vstat))
                np.asarray(Binv)[:, :] = Binv2
                np.asarray(x_B)[:] = x_B2
                since_refactor = 0

        if t_star <= 1e-12:
            stall += 1
            if stall >= _BLAND_AFTER:
                bland = True
        else:
            stall = 0
            bland = False
    return MAXITER, it


def _dual_simplex(double[::1] c, double[:, ::1] A, b, double[::1] lb,
                  double[::1] ub, cnp.int64_t[::1] basis,
                  cnp.int8_t[::1] vstat, double[:, ::1] Binv,
                  double[::1] x_B, int max_iter):
    """Dual re-optimization loop; mirrors pylp._dual_simplex."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef int it = 0, since_refactor = 0
    cdef Py_ssize_t i, j, k, q, r
    cdef cnp.int64_t leaving
    cdef bint below
    cdef double lo, hi, worst, wr_val, ftol, brk, s, t, bound_r, ratio
    cdef double best_ratio, span

    scratch_y = np.empty(m)
    scratch_d = np.empty(n)
    scratch_w = np.empty(m)
    scratch_aq = np.empty(m)
    scratch_br = np.empty(m)
    scratch_alpha = np.empty(n)
    cdef double[::1] y = scratch_y, d = scratch_d, w = scratch_w
    cdef double[::1] aq = scratch_aq, br = scratch_br, alpha = scratch_alpha

    ftol = _FEAS_TOL * max(1.0, float(np.abs(np.asarray(b)).max()))

    while it < max_iter:
        it += 1
        # most-violated basic row
        r = -1
        worst = -INFINITY
        below = False
        for i in range(m):
            lo = lb[basis[i]] - x_B[i]
            hi = x_B[i] - ub[basis[i]]
            wr_val = lo if lo >= hi else hi
            if wr_val > worst:
                worst = wr_val
                r = i
                below = lo >= hi
        if worst <= ftol:
            return OPTIMAL, it - 1

        # alpha = Binv[r] @ A, row-major accumulation
        for j in range(n):
            alpha[j] = 0.0
        for k in range(m):
            brk = Binv[r, k]
            if brk != 0.0:
                for j in range(n):
                    alpha[j] += brk * A[k, j]
        _price(c, A, Binv, basis, y, d)

        # entering: smallest |d/alpha| among sign-compatible nonbasics
        q = -1
        best_ratio = INFINITY
        for j in range(n):
            if ub[j] - lb[j] <= 0.0 or vstat[j] == 2:
                continue
            if below:
                if not ((vstat[j] == 0 and alpha[j] < -_PIV_TOL) or
                        (vstat[j] == 1 and alpha[j] > _PIV_TOL)):
                    continue
            else:
                if not ((vstat[j] == 0 and alpha[j] > _PIV_TOL) or
                        (vstat[j] == 1 and alpha[j] < -_PIV_TOL)):
                    continue
            ratio = fabs(d[j] / alpha[j])
            if ratio < best_ratio:
                best_ratio = ratio
                q = j
        if q < 0:
            return INFEASIBLE, it

        s = 1.0 if vstat[q] == 0 else -1.0
        _ftran(Binv, A, q, aq, w)
        bound_r = lb[basis[r]] if below else ub[basis[r]]
        t = (x_B[r] - bound_r) / (s * w[r])
        span = ub[q] - lb[q]
        if t > span:
            # entering hits its far bound before the violation clears: flip
            for i in range(m):
                x_B[i] -= s * span * w[i]
            vstat[q] = 1 - vstat[q]
            continue
        leaving = basis[r]
        for i in range(m):
            x_B[i] -= s * t * w[i]
        x_B[r] = (lb[q] if s > 0.0 else ub[q]) + s * t
        vstat[leaving] = 0 if below else 1
        vstat[q] = 2
        basis[r] = q
        _update_inverse(Binv, w, br, r)
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            Binv2, x_B2 = _recompute(np.asarray(A), b, np.asarray(lb),
                                     np.asarray(ub), np.asarray(basis),
                                     np.asarray(vstat))
            np.asarray(Binv)[:, :] = Binv2
            np.asarray(x_B)[:] = x_B2
            since_refactor = 0
    return MAXITER, it


def solve(c, A, b, lb, ub, slack_of_row, max_iter=None, basis0=None,
          vstat0=None):
    """Solve min c.x s.t. A x = b, lb <= x <= ub (finite bounds).

    Drop-in replacement for ``pylp.solve``; see there for the warm-start and
    return-value contract.
    """
    c = np.asarray(c, dtype=float)
    A = np.ascontiguousarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lb = np.ascontiguousarray(lb, dtype=float)
    ub = np.ascontiguousarray(ub, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 200

    cscale = max(1.0, float(np.abs(c).max())) if n else 1.0
    c1 = np.ascontiguousarray(c / cscale)
    iterations = 0

    if m == 0:
        x = np.where(c > 0, lb, ub)
        return OPTIMAL, x, float(c @ x), 0, None, None

    state = None
    if basis0 is not None and vstat0 is not None and len(basis0) == m \
            and len(vstat0) == n and int(np.max(basis0)) < n:
        basis = np.ascontiguousarray(basis0, dtype=np.int64).copy()
        vstat = np.ascontiguousarray(vstat0, dtype=np.int8).copy()
        if int((vstat == 2).sum()) == m and bool(np.all(vstat[basis] == 2)):
            try:
                Binv, x_B = _recompute(A, b, lb, ub, basis, vstat)
                Binv = np.ascontiguousarray(Binv)
                x_B = np.ascontiguousarray(x_B)
                ftol = _FEAS_TOL * max(1.0, float(np.abs(b).max()))
                if np.all(x_B >= lb[basis] - ftol) \
                        and np.all(x_B <= ub[basis] + ftol):
                    state = (c1, A, lb, ub, basis, vstat, Binv, x_B)
                else:
                    budget = max(50, m // 8)
                    code, used = _dual_simplex(c1, A, b, lb, ub, basis, vstat,
                                               Binv, x_B, budget)
                    iterations += used
                    if code == OPTIMAL:
                        state = (c1, A, lb, ub, basis, vstat, Binv, x_B)
            except np.linalg.LinAlgError:
                state = None

    if state is None:
        # cold start, same construction as the reference kernel
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
        x_B = np.ascontiguousarray(signs * resid)
        Binv = np.ascontiguousarray(np.diag(signs))

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
            lb1[n:] = 0.0
            ub1[n:] = 0.0
            vstat[n:][vstat[n:] != 2] = 0
            x_B[basis >= n] = 0.0
        c2 = np.ascontiguousarray(np.concatenate([c1, np.zeros(k)]))
        state = (c2, A1, lb1, ub1, basis, vstat, Binv, x_B)

    c_w, A_w, lb_w, ub_w, basis, vstat, Binv, x_B = state
    code, used = _simplex(c_w, A_w, b, lb_w, ub_w, basis, vstat, Binv, x_B,
                          max_iter - iterations)
    iterations += used
    if code == MAXITER:
        return MAXITER, None, None, iterations, None, None

    Binv, x_B = _recompute(A_w, b, lb_w, ub_w, basis, vstat)
    x_full = np.where(vstat == 1, ub_w, lb_w)
    x_full[basis] = x_B
    x = x_full[:n]
    obj = float(c @ x)
    if int(np.max(basis)) < n:
        return OPTIMAL, x, obj, iterations, basis.copy(), vstat[:n].copy()
    return OPTIMAL, x, obj, iterations, None, None
