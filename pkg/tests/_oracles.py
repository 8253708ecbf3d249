"""Independent reference implementations used to check the real code.

Everything here is deliberately naive: enumeration and plain loops, no shared
code with the package internals beyond the public data containers.
"""

import itertools

import numpy as np
from scipy.linalg import null_space


def brute_force_lp(lp, tol=1e-7, chunk=20000):
    """Globally solve a small LP by enumerating candidate vertices.

    Equalities are eliminated through a nullspace parametrization, then every
    combination of k reduced inequality rows is intersected; feasible
    intersection points are scored by the objective. Bounds must be finite so
    the feasible set is a polytope and the optimum (when it exists) sits on a
    vertex. Returns ("optimal", x, objective) or ("infeasible", None, None).
    """
    c = np.asarray(lp.c, dtype=float)
    n = len(c)
    lb = np.asarray(lp.lb, dtype=float)
    ub = np.asarray(lp.ub, dtype=float)

    rows = [np.eye(n), -np.eye(n)]
    rhs = [ub, -lb]
    if lp.A_ub is not None and len(lp.b_ub):
        A_ub = np.asarray(lp.A_ub, dtype=float)
        b_ub = np.asarray(lp.b_ub, dtype=float)
        keep = np.isfinite(b_ub)
        rows.insert(0, A_ub[keep])
        rhs.insert(0, b_ub[keep])
    G = np.vstack(rows)
    h = np.concatenate(rhs)

    if lp.A_eq is not None and len(lp.b_eq):
        A_eq = np.asarray(lp.A_eq, dtype=float)
        b_eq = np.asarray(lp.b_eq, dtype=float)
        x0, *_ = np.linalg.lstsq(A_eq, b_eq, rcond=None)
        if np.max(np.abs(A_eq @ x0 - b_eq)) > tol * (1 + np.abs(b_eq).max()):
            return "infeasible", None, None
        Z = null_space(A_eq)
    else:
        x0 = np.zeros(n)
        Z = np.eye(n)
    k = Z.shape[1]

    htol = tol * (1.0 + np.abs(h).max())
    if k == 0:
        if np.all(G @ x0 <= h + htol):
            return "optimal", x0, float(c @ x0)
        return "infeasible", None, None

    Gz = G @ Z
    hz = h - G @ x0
    # normalize rows so a fixed determinant threshold is meaningful
    norms = np.linalg.norm(Gz, axis=1)
    ok = norms > 1e-12
    Gz, hz = Gz[ok] / norms[ok, None], hz[ok] / norms[ok]

    best_obj = np.inf
    best_x = None
    combos = itertools.combinations(range(Gz.shape[0]), k)
    while True:
        idx = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if idx.size == 0:
            break
        M = Gz[idx]
        dets = np.abs(np.linalg.det(M))
        good = dets > 1e-10
        if not np.any(good):
            continue
        t = np.linalg.solve(M[good], hz[idx[good]][..., None])[..., 0]
        x = x0 + t @ Z.T
        feas = np.all(x @ G.T <= h + htol, axis=1)
        if not np.any(feas):
            continue
        objs = x[feas] @ c
        j = int(np.argmin(objs))
        if objs[j] < best_obj:
            best_obj = float(objs[j])
            best_x = x[feas][j]
    if best_x is None:
        return "infeasible", None, None
    return "optimal", best_x, best_obj


def gcn_forward_reference(A_hat, feats, params, head, slots):
    """Three graph-convolution layers plus a head readout, written as plain
    nested loops over Python floats. Inputs are already normalized."""
    n = len(feats)
    H = [[float(v) for v in row] for row in feats]
    for layer in (1, 2, 3):
        W = params[f"W{layer}"]
        b = params[f"b{layer}"]
        fan_in, fan_out = W.shape
        agg = [[sum(float(A_hat[i][k]) * H[k][j] for k in range(n))
                for j in range(fan_in)] for i in range(n)]
        nxt = []
        for i in range(n):
            row = []
            for j in range(fan_out):
                v = float(b[j]) + sum(agg[i][q] * float(W[q][j])
                                      for q in range(fan_in))
                row.append(v if v > 0.0 else 0.0)
            nxt.append(row)
        H = nxt
    R = params["R"]
    rb = params["rb"]
    w = len(H[0])
    if head == "bus_pg":
        return [float(rb[0]) + sum(H[i][q] * float(R[q][0]) for q in range(w))
                for i in slots["node_index"]]
    if head == "branch_pf":
        out = []
        for fi, ti in zip(slots["from_index"], slots["to_index"]):
            v = float(rb[0])
            v += sum(H[fi][q] * float(R[q][0]) for q in range(w))
            v += sum(H[ti][q] * float(R[w + q][0]) for q in range(w))
            out.append(v)
        return out
    pooled = [sum(H[i][q] for i in range(n)) / n for q in range(w)]
    return [float(rb[j]) + sum(pooled[q] * float(R[q][j]) for q in range(w))
            for j in range(len(rb))]


def indicator_table_metrics(U, costs):
    """Branch overload metrics straight off a 0/1 indicator table.

    ``U[k][i]`` says whether branch i is overloaded in sample k. Returns
    (p, cond, risk): marginal probabilities, the conditional matrix with
    None on the diagonal and on undefined rows, and the overall risk where
    undefined conditionals contribute nothing. Counting only, no arrays.
    """
    m = len(U)
    n = len(U[0])
    p = [sum(U[k][i] for k in range(m)) / m for i in range(n)]
    cond = [[None] * n for _ in range(n)]
    for i in range(n):
        omega = [k for k in range(m) if U[k][i]]
        if not omega:
            continue
        for j in range(n):
            if j == i:
                continue
            cond[i][j] = sum(U[k][j] for k in omega) / len(omega)
    risk = []
    for i in range(n):
        row = 0.0
        for j in range(n):
            if j != i and cond[i][j] is not None:
                row += cond[i][j] * costs[j]
        risk.append(p[i] * costs[i] + row)
    return p, cond, risk


def pairwise_mean_distance(X, Y):
    """Plain double loop over all pairs; no vectorization on purpose."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    total = 0.0
    for i in range(X.shape[0]):
        for j in range(Y.shape[0]):
            total += float(np.sqrt(np.sum((X[i] - Y[j]) ** 2)))
    return total / (X.shape[0] * Y.shape[0])
