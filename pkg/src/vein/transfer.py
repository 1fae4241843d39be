"""Moving vertex-index bounds between bodies through linear images.

If ``L ⊆ T K ⊆ λ L`` then ``vein(K) <= λ vein(L)`` and
``vein(K) >= vein(L) / λ``.  Distances here are only ever upper bounds,
obtained from the minimal-volume ellipsoid or from Hadamard matrices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .body import INF
from .lower import FOUR_SQRT2, SQRT3_6, BoundCertificate
from .mvee import mvee_of_body, lp_ball_mvee_radius

# Enumerating all 2^d sign vectors is done up to this dimension.
MAX_ENUMERATED_DIM = 16


@dataclass(frozen=True, eq=False)
class DistanceWitness:
    """``L ⊆ operator·K ⊆ ratio·L``, with how each side was verified."""

    operator: np.ndarray
    ratio: float
    mode: str
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.ratio >= 1.0 - 1e-12:
            raise ValueError("distance ratio must be at least 1")

    def to_dict(self):
        return {
            "operator": np.asarray(self.operator).tolist(),
            "ratio": self.ratio,
            "mode": self.mode,
            "checks": self.checks,
        }


def transfer_bound(vein_L_upper, distance):
    """Upper bound ``distance * vein(L)`` on ``vein(K)``."""
    if not (vein_L_upper > 0 and math.isfinite(vein_L_upper)):
        raise ValueError("vein bound must be finite and positive")
    if not (distance >= 1.0 - 1e-12 and math.isfinite(distance)):
        raise ValueError("a Banach-Mazur distance is at least 1")
    return vein_L_upper * distance


def sylvester_hadamard(m):
    H = np.array([[1]], dtype=np.int64)
    for _ in range(m):
        H = np.block([[H, H], [H, -H]])
    return H


def hadamard_witness(m, n_random=10_000, seed=0):
    """Certify ``H B_1^d ⊆ B_inf^d ⊆ sqrt(d) H B_1^d`` for ``d = 2^m``.

    The first inclusion holds because every column of ``H`` is a ±1 vector.
    For the second, a cube vertex ``x`` lies in ``λ H B_1^d`` iff
    ``||H^T x||_1 <= λ d``; with ``λ = sqrt(d)`` this is the integer
    inequality ``||H^T x||_1^2 <= d^3``.  It is checked over all sign
    vectors for ``d <= 16``.  Beyond that the identity ``H H^T = d I`` is
    checked exactly, which gives the inequality for every ``x`` by
    Cauchy-Schwarz, and random sign vectors are tested as well.
    """
    if not 1 <= m <= 6:
        raise ValueError("m must lie in 1..6")
    d = 2 ** m
    H = sylvester_hadamard(m)
    checks = {
        "entries_pm1": bool(np.all(np.abs(H) == 1)),
        "orthogonal": bool(np.array_equal(H @ H.T, d * np.eye(d, dtype=np.int64))),
    }
    if d <= MAX_ENUMERATED_DIM:
        X = np.array(list(itertools.product((-1, 1), repeat=d)), dtype=np.int64)
        mode = "exhaustive"
    else:
        rng = np.random.default_rng([seed, m])
        X = rng.choice(np.array([-1, 1], dtype=np.int64), size=(n_random, d))
        mode = "identity+sampled"
    l1 = np.abs(X @ H).sum(axis=1)
    checks["sign_vectors"] = len(X)
    checks["inner_inclusion"] = bool(np.abs(H).max() == 1)
    checks["outer_inclusion"] = bool(np.all(l1 * l1 <= d ** 3)) and checks["orthogonal"]
    # Smallest λ that works for the checked vertices (exact when enumerated).
    checks["attained_ratio"] = float(l1.max()) / d
    if not (checks["entries_pm1"] and checks["inner_inclusion"] and checks["outer_inclusion"]):
        raise AssertionError(f"Hadamard inclusions failed for d={d}: {checks}")
    return DistanceWitness(H.astype(float), math.sqrt(d), mode, checks)


def john_distance_witness(body):
    """``K ⊆ E ⊆ λ K`` for the minimal-volume ellipsoid ``E = T B_2^d``.

    Closed form for lp balls and ellipsoids; for polytopes ``λ`` is the
    largest ``h_E(u) / h_K(u)`` over the facet normals of ``K``, which is
    exact because those normals cut out ``K``.
    """
    d = body.dim
    if body.kind == "ellipsoid":
        return DistanceWitness(np.linalg.cholesky(body.matrix), 1.0, "analytic")
    if body.kind == "lp_ball":
        p = body.p
        inv = 0.0 if p == INF else 1.0 / p
        r = lp_ball_mvee_radius(p, d)
        return DistanceWitness(r * np.eye(d), d ** abs(inv - 0.5), "analytic")
    E = mvee_of_body(body).shape
    if d <= 3:
        U, b = body.hull.normals, body.hull.offsets
    else:
        from scipy.spatial import ConvexHull

        G = body.generators
        eq = ConvexHull(np.vstack([G, -G])).equations
        U, b = eq[:, :-1], -eq[:, -1]
    hE = np.sqrt(np.einsum("ij,jk,ik->i", U, E.matrix, U))
    ratio = max(float(np.max(hE / b)), 1.0)
    return DistanceWitness(np.linalg.cholesky(E.matrix), ratio, "exact_facet",
                           {"facets": len(U)})


def dist_to_ball_upper(body):
    """Upper bound on the Banach-Mazur distance from the body to ``B_2^d``."""
    return john_distance_witness(body).ratio


def ball_route_bounds(body):
    """Bounds on ``vein(K)`` through the Euclidean ball, for d = 2, 3.

    Lower: the exact ball value divided by the distance.  Upper: the
    distance times ``2 d^{3/2}``, realized by the scaled cross-polytope of
    the John ellipsoid.
    """
    d = body.dim
    if d not in (2, 3):
        raise ValueError("the ball route needs d = 2 or 3")
    lam = dist_to_ball_upper(body)
    exact = FOUR_SQRT2 if d == 2 else SQRT3_6
    lower = BoundCertificate("transfer", exact / lam, "lower",
                             {"distance": lam, "ball_value": exact}, checked=True)
    upper = BoundCertificate("transfer", transfer_bound(2 * d ** 1.5, lam), "upper",
                             {"distance": lam, "ball_value": 2 * d ** 1.5}, checked=True)
    return lower, upper


def planar_vein_bound(body):
    """``(lower, upper)`` certificates sandwiching ``vein(K)`` in the plane.

    The lower value is ``max(4 sqrt(2) / d_K, 4)``; ``d_K <= sqrt(2)`` in the
    plane, so the clip only removes slack from the distance estimate.  The
    upper value 6 is ``d(K, B_inf^2) vein(B_inf^2) <= 3/2 * 4``; the 3/2
    distance bound is cited, not computed, so it is marked unchecked.
    """
    if body.dim != 2:
        raise ValueError("planar_vein_bound needs d = 2")
    lam = dist_to_ball_upper(body)
    lower = BoundCertificate("transfer", max(FOUR_SQRT2 / lam, 4.0), "lower",
                             {"distance": lam}, checked=True)
    upper = BoundCertificate("transfer", transfer_bound(4.0, 1.5), "upper",
                             {"cube_vein": 4.0, "cube_distance": 1.5}, checked=False)
    return lower, upper
