"""Minimum-norm element of the convex hull of finitely many vectors.

This is the quadratic program ``min ||sum_i lam_i v_i||`` over the unit
simplex.  Three routes are provided: a closed form for two vectors,
Wolfe's finite active-set method, and plain projected gradient.
"""

from __future__ import annotations

import numpy as np


def project_simplex(c) -> np.ndarray:
    """Euclidean projection of ``c`` onto ``{x >= 0, sum(x) = 1}``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    a = -np.sort(-c)
    lambdas = (np.cumsum(a) - 1.0) / np.arange(1, n + 1)
    for k in range(n - 1, -1, -1):
        if a[k] > lambdas[k]:
            return np.maximum(c - lambdas[k], 0.0)
    return np.full(n, 1.0 / n)


def _pair(v1, v2):
    diff = v1 - v2
    dd = diff @ diff
    if dd == 0.0:
        return np.array([1.0, 0.0])
    gamma = min(1.0, max(0.0, -(diff @ v2) / dd))
    return np.array([gamma, 1.0 - gamma])


def _affine_min(Q):
    # min ||Q^T mu|| subject to sum(mu) = 1, via the (possibly singular) KKT system
    k = Q.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = Q @ Q.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    mu = sol[:k]
    return mu / mu.sum()


def _wolfe(P, max_iter, tol):
    k = P.shape[0]
    sq = np.einsum("ij,ij->i", P, P)
    scale = max(float(sq.max()), 1e-300)
    S = [int(np.argmin(sq))]
    lam = np.array([1.0])
    for _ in range(max_iter):
        x = lam @ P[S]
        dots = P @ x
        j = int(np.argmin(dots))
        if dots[j] >= x @ x - tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        for _minor in range(k + 1):
            mu = _affine_min(P[S])
            if np.all(mu > tol):
                lam = mu
                break
            shrink = (mu <= tol) & (lam > mu)
            if not np.any(shrink):
                lam = np.clip(mu, 0.0, None)
                lam /= lam.sum()
                break
            theta = float(np.min(lam[shrink] / (lam[shrink] - mu[shrink])))
            lam = lam + theta * (mu - lam)
            keep = lam > tol
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep] / lam[keep].sum()
    out = np.zeros(k)
    out[S] = lam
    return out


def _projected_gradient(P, iters):
    k = P.shape[0]
    G = P @ P.T
    L = float(np.linalg.eigvalsh(G)[-1])
    lam = np.full(k, 1.0 / k)
    if L <= 0.0:
        return lam
    for _ in range(iters):
        lam = project_simplex(lam - (G @ lam) / L)
    return lam


def min_norm_element(vectors, method: str = "auto", max_iter: int = 200, tol: float = 1e-14):
    """Return ``(weights, point)`` with ``point = weights @ vectors`` of least norm.

    ``method`` is ``"auto"`` (closed form for at most two vectors, Wolfe's
    method otherwise), ``"wolfe"``, or ``"projected-gradient"`` (fixed
    step ``1/L`` for ``max_iter`` iterations).
    """
    P = np.atleast_2d(np.asarray(vectors, dtype=float))
    k = P.shape[0]
    if k == 1:
        lam = np.ones(1)
    elif method == "projected-gradient":
        lam = _projected_gradient(P, max_iter)
    elif method == "auto" and k == 2:
        lam = _pair(P[0], P[1])
    elif method in ("auto", "wolfe"):
        lam = _wolfe(P, max(max_iter, 10 * k), tol)
    else:
        raise ValueError(f"unknown min-norm method {method!r}")
    return lam, lam @ P
