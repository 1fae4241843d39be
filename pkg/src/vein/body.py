"""Origin-symmetric convex bodies: gauge, support, polarity, containment.

A body is described declaratively by :class:`BodySpec` (an lp ball, a
centred ellipsoid, or the absolute convex hull of generators).  Polytopes
that may enclose a body are :class:`Polytope` vertex lists, with facets
computed on demand in dimensions 2 and 3.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .hull import DegenerateHull, convex_hull, random_directions
from .lp import min_l1_representation

INF = math.inf

ALGEBRAIC_TOL = 1e-9
ROUNDTRIP_TOL = 1e-7


class InvalidBody(ValueError):
    pass


class OriginNotInterior(ValueError):
    pass


def dual_exponent(p):
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _vec(x, dim=None):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    if dim is not None and x.shape[-1] != dim:
        raise ValueError(f"expected {dim}-vectors, got shape {x.shape}")
    return x


def _parse_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity", "∞"):
            return INF
        p = float(p)
    p = float(p)
    if not (p >= 1.0):
        raise InvalidBody(f"lp exponent must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True, eq=False)
class BodySpec:
    """Declarative origin-symmetric convex body.

    Build through :meth:`lp_ball`, :meth:`ellipsoid` or
    :meth:`sym_polytope`; the constructors enforce full dimensionality.
    """

    kind: str
    dim: int
    p: float | None = None
    matrix: np.ndarray | None = None
    generators: np.ndarray | None = None
    name: str | None = field(default=None, compare=False)

    @classmethod
    def lp_ball(cls, p, dim, name=None):
        dim = int(dim)
        if dim < 2:
            raise InvalidBody("dim must be at least 2")
        return cls("lp_ball", dim, p=_parse_p(p), name=name)

    @classmethod
    def ellipsoid(cls, matrix, name=None):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise InvalidBody("ellipsoid matrix must be square with dim >= 2")
        if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
            raise InvalidBody("ellipsoid matrix must be symmetric")
        try:
            np.linalg.cholesky(A)
        except np.linalg.LinAlgError as exc:
            raise InvalidBody("ellipsoid matrix is not positive definite") from exc
        A = 0.5 * (A + A.T)
        A.setflags(write=False)
        return cls("ellipsoid", A.shape[0], matrix=A, name=name)

    @classmethod
    def sym_polytope(cls, generators, name=None):
        G = np.array(generators, dtype=float, ndmin=2)
        if G.ndim != 2 or G.shape[0] == 0:
            raise InvalidBody("generators must be a nonempty list of vectors")
        if not np.all(np.isfinite(G)):
            raise InvalidBody("non-finite generator")
        d = G.shape[1]
        if d < 2:
            raise InvalidBody("dim must be at least 2")
        if np.linalg.matrix_rank(G, tol=1e-9 * max(1.0, np.abs(G).max())) < d:
            raise InvalidBody("generators do not span R^d")
        G.setflags(write=False)
        return cls("sym_polytope", d, generators=G, name=name)

    # -- serialization -------------------------------------------------
    def to_dict(self):
        if self.kind == "lp_ball":
            p = "inf" if self.p == INF else self.p
            out = {"kind": "lp_ball", "p": p, "dim": self.dim}
        elif self.kind == "ellipsoid":
            out = {"kind": "ellipsoid", "matrix": self.matrix.tolist()}
        else:
            out = {"kind": "sym_polytope", "generators": self.generators.tolist()}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, data):
        kind = data.get("kind")
        name = data.get("name")
        if kind == "lp_ball":
            return cls.lp_ball(data["p"], data["dim"], name=name)
        if kind == "ellipsoid":
            return cls.ellipsoid(data["matrix"], name=name)
        if kind == "sym_polytope":
            return cls.sym_polytope(data["generators"], name=name)
        raise InvalidBody(f"unknown body kind {kind!r}")

    def label(self):
        if self.name:
            return self.name
        if self.kind == "lp_ball":
            p = "inf" if self.p == INF else f"{self.p:g}"
            return f"B_{p}^{self.dim}"
        return f"{self.kind}{self.dim}"

    # -- cached geometry -------------------------------------------------
    @cached_property
    def _chol(self):
        return np.linalg.cholesky(self.matrix)

    @cached_property
    def hull(self):
        """Hull of ``±generators`` (sym_polytope, d <= 3 only)."""
        if self.kind != "sym_polytope" or self.dim > 3:
            return None
        G = self.generators
        return convex_hull(np.vstack([G, -G]))

    def extreme_directions(self):
        """Directions at which the body has extreme points or facets.

        Used to enrich sampled containment checks.
        """
        d = self.dim
        if self.kind == "sym_polytope":
            G = self.generators
            return G / np.linalg.norm(G, axis=1, keepdims=True)
        if self.kind == "lp_ball":
            dirs = [np.eye(d)]
            if d <= 12:
                S = np.array(list(itertools.product((-1.0, 1.0), repeat=d - 1)))
                S = np.hstack([np.ones((len(S), 1)), S]) / math.sqrt(d)
                dirs.append(S)
            return np.vstack(dirs)
        return self._chol.T.copy() / np.linalg.norm(self._chol.T, axis=1, keepdims=True)

    def transformed(self, T):
        """Image ``T K`` of the body under an invertible linear map."""
        T = np.asarray(T, dtype=float)
        if self.kind == "ellipsoid":
            return BodySpec.ellipsoid(T @ self.matrix @ T.T)
        if self.kind == "sym_polytope":
            return BodySpec.sym_polytope(self.generators @ T.T)
        if self.p == 2:
            return BodySpec.ellipsoid(T @ T.T)
        if self.p == 1:
            return BodySpec.sym_polytope(T.T)
        if self.p == INF:
            S = np.array(list(itertools.product((-1.0, 1.0), repeat=self.dim - 1)))
            S = np.hstack([np.ones((len(S), 1)), S])
            return BodySpec.sym_polytope(S @ T.T)
        raise InvalidBody("linear images of lp balls with 1 < p < inf, p != 2 are not representable")


def regular_polygon(n, circumradius=1.0, phase=0.0, name=None):
    """Regular ``n``-gon (``n`` even) as a sym_polytope."""
    if n % 2:
        raise InvalidBody("a centrally symmetric regular polygon needs an even vertex count")
    t = phase + 2.0 * np.pi * np.arange(n // 2) / n
    G = circumradius * np.column_stack([np.cos(t), np.sin(t)])
    return BodySpec.sym_polytope(G, name=name)


def hexagon(name="hexagon"):
    return regular_polygon(6, name=name)


@dataclass(frozen=True, eq=False)
class Polytope:
    """Vertex list with an optional facet description."""

    vertices: np.ndarray
    normals: np.ndarray | None = None
    offsets: np.ndarray | None = None

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float, ndmin=2)
        object.__setattr__(self, "vertices", V)

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def has_facets(self):
        return self.normals is not None

    def with_facets(self):
        if self.has_facets:
            return self
        h = convex_hull(self.vertices)
        return Polytope(self.vertices, h.normals, h.offsets)

    def facets(self):
        p = self.with_facets()
        return p.normals, p.offsets

    def scaled(self, t):
        if self.has_facets:
            return Polytope(t * self.vertices, self.normals, t * self.offsets)
        return Polytope(t * self.vertices)

    def to_dict(self):
        return {"vertices": self.vertices.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data["vertices"], dtype=float))


@dataclass(frozen=True, eq=False)
class EllipsoidShape:
    """Centred ellipsoid ``{x : x^T A^{-1} x <= 1}``."""

    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def volume(self):
        from .mvee import ball_volume

        sign, logdet = np.linalg.slogdet(self.matrix)
        return ball_volume(self.dim) * math.exp(0.5 * logdet)

    def as_body(self):
        return BodySpec.ellipsoid(self.matrix)

    def to_dict(self):
        return {"matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class ContainmentReport:
    contained: bool
    mode: str
    worst_margin: float
    worst_direction: np.ndarray

    def to_dict(self):
        return {
            "contained": self.contained,
            "mode": self.mode,
            "worst_margin": self.worst_margin,
            "worst_direction": self.worst_direction.tolist(),
        }


# -- gauge and support ---------------------------------------------------

def gauge(body, x):
    """Minkowski functional ``||x||_K``."""
    x = _vec(x, body.dim)
    if not np.any(x):
        return 0.0
    if body.kind == "lp_ball":
        return float(np.linalg.norm(x, ord=body.p))
    if body.kind == "ellipsoid":
        y = np.linalg.solve(body._chol, x)
        return float(math.sqrt(y @ y))
    value, _ = min_l1_representation(body.generators, x)
    return float(value)


def gauge_many(body, X):
    """Row-wise gauge of ``X``.

    For sym_polytope bodies in d <= 3 this reads the gauge off the body's
    facets, ``max_k n_k.x / b_k``, which is the same number the LP returns.
    """
    X = _vec(np.atleast_2d(X), body.dim)
    if body.kind == "lp_ball":
        return np.linalg.norm(X, ord=body.p, axis=1)
    if body.kind == "ellipsoid":
        Y = np.linalg.solve(body._chol, X.T)
        return np.sqrt(np.sum(Y * Y, axis=0))
    h = body.hull
    if h is not None:
        return np.maximum(np.max(X @ h.normals.T / h.offsets, axis=1), 0.0)
    return np.array([gauge(body, x) for x in X])


def support(body, u):
    """Support function ``h_K(u) = max_{y in K} <u, y>``."""
    u = _vec(u, body.dim)
    if not np.any(u):
        return 0.0
    return float(support_many(body, u[None, :])[0])


def support_many(body, U):
    U = _vec(np.atleast_2d(U), body.dim)
    if body.kind == "lp_ball":
        return np.linalg.norm(U, ord=dual_exponent(body.p), axis=1)
    if body.kind == "ellipsoid":
        return np.sqrt(np.einsum("ij,jk,ik->i", U, body.matrix, U))
    return np.max(np.abs(U @ body.generators.T), axis=1)


def vein_objective(body, points):
    """``sum_i ||p_i||_K``: the quantity minimized by the vertex index."""
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return 0.0
    return float(np.sum(gauge_many(body, np.atleast_2d(P))))


# -- polytopes -------------------------------------------------------------

def polar_polytope(poly):
    """Polar of a polytope containing the origin in its interior (d <= 3)."""
    if poly.dim > 3:
        raise ValueError("polar_polytope supports d <= 3")
    h = convex_hull(poly.vertices)
    if np.any(h.offsets <= 1e-9):
        raise OriginNotInterior("origin is not interior to the polytope")
    verts = h.normals / h.offsets[:, None]
    ext = poly.vertices[h.vertices]
    r = np.linalg.norm(ext, axis=1)
    return Polytope(verts, ext / r[:, None], 1.0 / r)


def contains(poly, body, tol=ALGEBRAIC_TOL, n_samples=4096, seed=0):
    """Check ``body ⊆ conv(poly.vertices)``.

    In d <= 3 the facets of the polytope are enumerated and the check is
    exact up to ``tol``.  In higher dimension the support functions are
    compared along random unit directions plus the body's own extreme
    directions, and the report says so.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = poly.dim
    if d != body.dim:
        raise ValueError("dimension mismatch")
    if d <= 3:
        N, b = poly.facets()
        margins = b - support_many(body, N)
        k = int(np.argmin(margins))
        worst = float(margins[k])
        return ContainmentReport(worst >= -tol, "exact_facet", worst, N[k].copy())
    rng = np.random.default_rng(seed)
    U = np.vstack([random_directions(n_samples, d, rng), body.extreme_directions()])
    U = np.vstack([U, -U])
    hP = np.max(U @ poly.vertices.T, axis=1)
    margins = hP - support_many(body, U)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return ContainmentReport(worst >= -tol, "sampled", worst, U[k].copy())


def repair_scale(points, body):
    """Smallest ``t`` with ``body ⊆ t·conv(points)`` (d <= 3, exact).

    Returns ``inf`` when the origin is not interior to the hull.
    """
    try:
        h = convex_hull(points)
    except DegenerateHull:
        return INF
    if np.any(h.offsets <= 1e-12):
        return INF
    return float(np.max(support_many(body, h.normals) / h.offsets))
