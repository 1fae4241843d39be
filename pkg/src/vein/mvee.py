"""Minimal-volume centred ellipsoids, volumes and the outer volume ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .body import INF, BodySpec, EllipsoidShape, gauge_many
from .hull import convex_hull


class RankDeficient(ValueError):
    pass


class MonteCarloUnreliable(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MveeResult:
    shape: EllipsoidShape
    iterations: int
    duality_gap: float

    def to_dict(self):
        return {
            "shape": self.shape.matrix.tolist(),
            "iterations": self.iterations,
            "duality_gap": self.duality_gap,
        }


def ball_volume(d):
    """Volume of the Euclidean unit ball in R^d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.exp(0.5 * d * math.log(math.pi) - gammaln(1.0 + 0.5 * d))


def lp_ball_volume(p, d):
    """``2^d Γ(1+1/p)^d / Γ(1+d/p)``; the cube ``2^d`` when p is infinite."""
    if p == INF:
        return 2.0 ** d
    return math.exp(d * math.log(2.0) + d * gammaln(1.0 + 1.0 / p) - gammaln(1.0 + d / p))


def mvee_of_points(points, eps=1e-7, max_iter=100_000):
    """Minimal-volume ellipsoid centred at 0 containing ``±points``.

    Khachiyan's coordinate ascent on the weights of the design problem
    ``max log det sum_i u_i x_i x_i^T``, with Todd-Yildirim drop steps.
    Stops once ``max_i x_i^T M^{-1} x_i <= d (1 + eps)``; the returned
    shape is rescaled so that every point lies inside.
    """
    X = np.array(points, dtype=float, ndmin=2)
    N, d = X.shape
    if np.linalg.matrix_rank(X, tol=1e-10 * max(1.0, np.abs(X).max())) < d:
        raise RankDeficient("points do not span R^d")
    keep = np.any(X != 0.0, axis=1)
    X = X[keep]
    N = len(X)
    u = np.full(N, 1.0 / N)
    it = 0
    while True:
        M = X.T @ (u[:, None] * X)
        Minv = np.linalg.inv(M)
        kappa = np.einsum("ij,jk,ik->i", X, Minv, X)
        j = int(np.argmax(kappa))
        kmax = float(kappa[j])
        if kmax <= d * (1.0 + eps) or it >= max_iter:
            break
        support_idx = np.flatnonzero(u > 0)
        k = int(support_idx[np.argmin(kappa[support_idx])])
        kmin = float(kappa[k])
        if d - kmin > kmax - d and u[k] < 1.0:
            floor = -u[k] / (1.0 - u[k])
            alpha = floor if kmin <= 1.0 else max((kmin / d - 1.0) / (kmin - 1.0), floor)
            u *= 1.0 - alpha
            u[k] += alpha
            if alpha == floor:
                u[k] = 0.0
        else:
            alpha = (kmax / d - 1.0) / (kmax - 1.0)
            u *= 1.0 - alpha
            u[j] += alpha
        it += 1
    A = kmax * M
    A = 0.5 * (A + A.T)
    return MveeResult(EllipsoidShape(A), it, max(kmax / d - 1.0, 0.0))


def mvee_of_body(body, eps=1e-7):
    """Minimal-volume centred ellipsoid of a body.

    Closed forms for lp balls (a ball of radius ``d^{max(0, 1/2-1/p)}``) and
    ellipsoids (themselves); Khachiyan on the generators otherwise.
    """
    d = body.dim
    if body.kind == "ellipsoid":
        return MveeResult(EllipsoidShape(np.array(body.matrix)), 0, 0.0)
    if body.kind == "lp_ball":
        return MveeResult(EllipsoidShape(lp_ball_mvee_radius(body.p, d) ** 2 * np.eye(d)), 0, 0.0)
    return mvee_of_points(body.generators, eps=eps)


def lp_ball_mvee_radius(p, d):
    if p <= 2:
        return 1.0
    inv = 0.0 if p == INF else 1.0 / p
    return d ** (0.5 - inv)


def polytope_volume(points):
    """Exact volume of ``conv(points)`` for d = 2, 3."""
    return abs(convex_hull(points).volume())


def monte_carlo_volume(body, shape, n_samples=1_000_000, seed=0, shard=100_000):
    """Rejection estimate of ``vol(K)`` from uniform samples in ``shape ⊇ K``.

    Samples are drawn in shards; shard ``i`` uses the stream
    ``default_rng([seed, i])`` so the estimate does not depend on how the
    shards are scheduled.  Returns ``(volume, standard_error)``.
    """
    d = body.dim
    L = np.linalg.cholesky(shape.matrix)
    inside = _membership(body)
    hits = 0
    n_done = 0
    i = 0
    while n_done < n_samples:
        m = min(shard, n_samples - n_done)
        rng = np.random.default_rng([seed, i])
        G = rng.standard_normal((m, d))
        G /= np.linalg.norm(G, axis=1, keepdims=True)
        r = rng.random(m) ** (1.0 / d)
        Y = (G * r[:, None]) @ L.T
        hits += int(np.count_nonzero(inside(Y)))
        n_done += m
        i += 1
    frac = hits / n_samples
    vol_e = shape.volume()
    se = vol_e * math.sqrt(frac * (1.0 - frac) / n_samples)
    return vol_e * frac, se


def _membership(body):
    if body.kind == "sym_polytope" and body.dim > 3:
        # Facets via Qhull; exact hulls in d > 3 are outside this package.
        from scipy.spatial import ConvexHull

        G = body.generators
        eq = ConvexHull(np.vstack([G, -G])).equations
        return lambda Y: np.all(Y @ eq[:, :-1].T + eq[:, -1] <= 1e-12, axis=1)
    return lambda Y: gauge_many(body, Y) <= 1.0


def body_volume(body, n_samples=1_000_000, seed=0):
    """Volume of a body and its standard error (0 when exact)."""
    d = body.dim
    if body.kind == "lp_ball":
        return lp_ball_volume(body.p, d), 0.0
    if body.kind == "ellipsoid":
        return EllipsoidShape(body.matrix).volume(), 0.0
    if d <= 3:
        return abs(body.hull.volume()), 0.0
    return monte_carlo_volume(body, mvee_of_body(body).shape, n_samples=n_samples, seed=seed)


def ovr(body, n_samples=1_000_000, seed=0):
    """Outer volume ratio ``(vol(E)/vol(K))^{1/d}`` for the MVEE ``E``."""
    d = body.dim
    if body.kind == "ellipsoid":
        return 1.0
    if body.kind == "lp_ball":
        r = lp_ball_mvee_radius(body.p, d)
        log_ratio = d * math.log(r) + math.log(ball_volume(d)) - math.log(lp_ball_volume(body.p, d))
        return math.exp(log_ratio / d)
    vol_e = mvee_of_body(body).shape.volume()
    vol_k, se = body_volume(body, n_samples=n_samples, seed=seed)
    if se > 0.05 * vol_k:
        raise MonteCarloUnreliable(f"relative standard error {se / vol_k:.3f} exceeds 5%")
    return (vol_e / vol_k) ** (1.0 / d)
