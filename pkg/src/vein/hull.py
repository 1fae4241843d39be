"""Convex hulls in the plane and in space, plus sphere direction sets.

The 2-D hull is a Graham scan (angular sort about the lowest point); the
3-D hull is built incrementally, one point at a time, by replacing the
faces a new point can see with a cone over their horizon.  Coplanar
triangles are merged into a single facet on output.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0


class DegenerateHull(ValueError):
    """Points do not affinely span the ambient space."""


@dataclass(frozen=True, eq=False)
class Hull:
    """Result of a hull computation.

    ``normals``/``offsets`` describe merged facets ``{x : n.x <= b}``.
    ``simplices`` are outward-oriented edges (2-D) or triangles (3-D)
    indexing into ``points``; ``vertices`` are indices of extreme points.
    """

    points: np.ndarray
    vertices: np.ndarray
    simplices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray

    @property
    def dim(self):
        return self.points.shape[1]

    def volume(self):
        """Volume by a fan of simplices from the origin (signed, exact)."""
        P = self.points[self.simplices]
        if self.dim == 2:
            return 0.5 * float(np.sum(P[:, 0, 0] * P[:, 1, 1] - P[:, 0, 1] * P[:, 1, 0]))
        return float(np.sum(np.linalg.det(P))) / 6.0


def fibonacci_sphere(n, dim=3):
    """Deterministic, nearly uniform unit directions.

    ``dim=3`` gives the Fibonacci lattice on S^2; ``dim=2`` gives ``n``
    equally spaced angles on the circle.
    """
    if dim == 2:
        t = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim != 3:
        raise ValueError("fibonacci_sphere supports dim 2 or 3")
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * np.pi * i / GOLDEN
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def random_directions(n, dim, rng):
    U = rng.standard_normal((n, dim))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def _scale(points):
    return max(1.0, float(np.abs(points).max()))


def _hull2d(P, eps):
    n = len(P)
    i0 = int(np.lexsort((P[:, 0], P[:, 1]))[0])
    d = P - P[i0]
    dist = np.hypot(d[:, 0], d[:, 1])
    if dist.max() <= eps:
        raise DegenerateHull("all points coincide")
    far = int(np.argmax(dist))
    cross = d[far, 0] * d[:, 1] - d[far, 1] * d[:, 0]
    if np.abs(cross).max() <= eps * dist[far]:
        raise DegenerateHull("points are collinear")
    others = [i for i in range(n) if dist[i] > eps]
    ang = np.arctan2(d[others, 1], d[others, 0])
    order = [others[k] for k in np.lexsort((dist[others], ang))]
    stack = [i0]
    for i in order:
        while len(stack) >= 2:
            a, b = P[stack[-2]], P[stack[-1]]
            c = P[i]
            turn = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if turn <= eps * max(np.linalg.norm(b - a), np.linalg.norm(c - a), eps):
                stack.pop()
            else:
                break
        stack.append(i)
    verts = np.array(stack)
    edges = np.column_stack([verts, np.roll(verts, -1)])
    e = P[edges[:, 1]] - P[edges[:, 0]]
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = np.einsum("ij,ij->i", normals, P[edges[:, 0]])
    return Hull(P, verts, edges, normals, offsets)


def _plane(P, f):
    a, b, c = P[f[0]], P[f[1]], P[f[2]]
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n)
    n = n / nn
    return n, float(n @ a)


def _initial_tetra(P, eps):
    i0 = int(np.argmin(P[:, 0]))
    d0 = np.linalg.norm(P - P[i0], axis=1)
    i1 = int(np.argmax(d0))
    if d0[i1] <= eps:
        raise DegenerateHull("all points coincide")
    u = (P[i1] - P[i0]) / d0[i1]
    w = P - P[i0]
    perp = w - np.outer(w @ u, u)
    dl = np.linalg.norm(perp, axis=1)
    i2 = int(np.argmax(dl))
    if dl[i2] <= eps:
        raise DegenerateHull("points are collinear")
    n = np.cross(P[i1] - P[i0], P[i2] - P[i0])
    n /= np.linalg.norm(n)
    dp = w @ n
    i3 = int(np.argmax(np.abs(dp)))
    if abs(dp[i3]) <= eps:
        raise DegenerateHull("points are coplanar")
    return i0, i1, i2, i3


def _hull3d(P, eps):
    i0, i1, i2, i3 = _initial_tetra(P, eps)
    centroid = P[[i0, i1, i2, i3]].mean(axis=0)
    faces = {}
    for f in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        n, b = _plane(P, f)
        if n @ centroid > b:
            f = (f[0], f[2], f[1])
            n, b = -n, -b
        faces[f] = (n, b)

    rest = [i for i in range(len(P)) if i not in (i0, i1, i2, i3)]
    # Far points first keeps intermediate hulls large and well conditioned.
    rest.sort(key=lambda i: -float(np.linalg.norm(P[i] - centroid)))
    for p in rest:
        x = P[p]
        visible = [f for f, (n, b) in faces.items() if n @ x - b > eps]
        if not visible:
            continue
        vis = set(visible)
        edges = set()
        for f in visible:
            for k in range(3):
                edges.add((f[k], f[(k + 1) % 3]))
        horizon = [e for e in edges if (e[1], e[0]) not in edges]
        for f in vis:
            del faces[f]
        for a, b in horizon:
            f = (a, b, p)
            n, off = _plane(P, f)
            faces[f] = (n, off)

    tri = np.array(list(faces.keys()), dtype=int)
    tn = np.array([v[0] for v in faces.values()])
    tb = np.array([v[1] for v in faces.values()])

    # Merge coplanar triangles into facets.
    normals, offsets = [], []
    for n, b in zip(tn, tb):
        for k, m in enumerate(normals):
            if np.abs(m - n).max() <= 1e-9 and abs(offsets[k] - b) <= eps:
                break
        else:
            normals.append(n)
            offsets.append(b)
    normals = np.array(normals)
    offsets = np.array(offsets)
    # Recompute offsets as exact support values of the input set.
    offsets = np.max(P @ normals.T, axis=0)
    slack = offsets[None, :] - P @ normals.T
    on = (slack <= eps).sum(axis=1)
    verts = np.flatnonzero(on >= 3)
    return Hull(P, verts, tri, normals, offsets)


def convex_hull(points):
    """Full hull description of a point set in d = 2 or 3."""
    P = np.array(points, dtype=float, ndmin=2)
    if P.ndim != 2 or P.shape[1] not in (2, 3):
        raise ValueError("convex_hull supports d = 2 or 3")
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite coordinates")
    if len(P) < P.shape[1] + 1:
        raise DegenerateHull("too few points for a full-dimensional hull")
    eps = 1e-9 * _scale(P)
    return _hull2d(P, eps) if P.shape[1] == 2 else _hull3d(P, eps)


def hull_facets(vertices):
    """Facets of ``conv(vertices)`` as ``(normals, offsets)``.

    Each facet is ``{x : normals[k] @ x <= offsets[k]}`` with a unit
    outward normal.
    """
    h = convex_hull(vertices)
    return h.normals, h.offsets


@lru_cache(maxsize=64)
def _subsets(n, k):
    return np.array(list(combinations(range(n), k)))


def enumerate_facets(P, eps=1e-9):
    """Facets of many small point sets at once by brute force.

    ``P`` has shape ``(K, n, d)`` with ``d`` in (2, 3).  Every pair (2-D) or
    triple (3-D) of points spans a candidate hyperplane; it is a facet when
    all other points lie weakly on one side.  Returns unit outward normals
    ``(K, T, d)``, offsets ``(K, T)`` and a validity mask ``(K, T)``.
    Coplanar point sets produce the same facet several times, which is
    harmless for anything that takes a max over facets.
    """
    K, n, d = P.shape
    if d not in (2, 3):
        raise ValueError("enumerate_facets supports d = 2 or 3")
    idx = _subsets(n, d)
    A = P[:, idx[:, 0]]
    if d == 3:
        N = np.cross(P[:, idx[:, 1]] - A, P[:, idx[:, 2]] - A)
    else:
        e = P[:, idx[:, 1]] - A
        N = np.stack([e[..., 1], -e[..., 0]], axis=-1)
    length = np.linalg.norm(N, axis=-1)
    scale = np.maximum(1.0, np.abs(P).max(axis=(1, 2)))[:, None]
    ok = length > 1e-12 * scale ** (d - 1)
    N = N / np.where(ok, length, 1.0)[..., None]
    b = np.einsum("ktd,ktd->kt", N, A)
    S = N @ P.transpose(0, 2, 1) - b[..., None]
    tol = eps * scale[..., None]
    above = (S > tol).any(axis=-1)
    below = (S < -tol).any(axis=-1)
    flip = above & ~below
    N = np.where(flip[..., None], -N, N)
    b = np.where(flip, -b, b)
    return N, b, ok & ~(above & below)
