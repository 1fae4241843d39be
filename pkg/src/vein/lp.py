"""Dense two-phase simplex for small standard-form linear programs.

Solves ``min c @ z  s.t.  A @ z = b, z >= 0`` on a full tableau with
Bland's rule.  Sized for the gauge and membership programs used in this
package (a handful of rows, at most a few hundred columns).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass(frozen=True, eq=False)
class LPResult:
    x: np.ndarray
    value: float
    iterations: int


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T, basis, ncols, tol, max_iter):
    # Objective row is the last row; reduced costs live in T[-1, :ncols].
    it = 0
    while True:
        red = T[-1, :ncols]
        entering = np.flatnonzero(red < -tol)
        if entering.size == 0:
            return it
        col = int(entering[0])
        colv = T[:-1, col]
        pos = colv > tol
        if not pos.any():
            raise Unbounded("objective unbounded below")
        ratios = np.full(colv.shape, np.inf)
        ratios[pos] = T[:-1, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        # Bland: among tied rows leave the one with the smallest basic index.
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise LPError("simplex iteration cap reached")


def linprog_eq(c, A, b, tol=1e-11, max_iter=10_000):
    """Minimize ``c @ z`` over ``{z >= 0 : A z = b}``.

    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: artificials a >= 0 with A z + a = b, minimize sum(a).
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    it1 = _run(T, basis, n + m, tol, max_iter)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > 1e-9 * scale:
        raise Infeasible("no feasible point")

    # Drive remaining artificials out of the basis where possible.
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > tol)
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = int(nz[0])
    keep = [r for r in range(m) if basis[r] < n]

    # Phase 2 on the original columns; redundant rows are dropped.
    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = T[keep, :n]
    T2[:-1, -1] = T[keep, -1]
    basis2 = [basis[r] for r in keep]
    T2[-1, :n] = c
    for r, j in enumerate(basis2):
        if T2[-1, j] != 0.0:
            T2[-1] -= T2[-1, j] * T2[r]
    it2 = _run(T2, basis2, n, tol, max_iter)

    x = np.zeros(n)
    for r, j in enumerate(basis2):
        x[j] = T2[r, -1]
    return LPResult(x=x, value=float(c @ x), iterations=it1 + it2)


def min_l1_representation(generators, x):
    """Smallest ``sum |lam_i|`` with ``sum lam_i v_i = x``.

    This is the gauge of ``x`` with respect to the absolute convex hull of
    the rows of ``generators``.  Returns ``(value, lam)``.
    """
    V = np.asarray(generators, dtype=float)
    x = np.asarray(x, dtype=float)
    N = V.shape[0]
    A = np.hstack([V.T, -V.T])
    res = linprog_eq(np.ones(2 * N), A, x)
    lam = res.x[:N] - res.x[N:]
    return res.value, lam


def in_convex_hull(points, x):
    """True when ``x`` is a convex combination of the rows of ``points``."""
    P = np.asarray(points, dtype=float)
    N = P.shape[0]
    A = np.vstack([P.T, np.ones(N)])
    b = np.append(np.asarray(x, dtype=float), 1.0)
    try:
        linprog_eq(np.zeros(N), A, b)
    except Infeasible:
        return False
    return True
