"""Lower bounds on the vertex index and the numeric facts behind them.

Covers the planar Jensen bound, the three-dimensional spherical machinery
(caps, the functions f, g, h and the Euler edge count), the simplex bound,
the coordinate argument for the cross-polytope, and the volume bound
through the outer volume ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .body import BodySpec, Polytope, contains, polar_polytope
from .hull import convex_hull, fibonacci_sphere
from .lp import in_convex_hull
from .mvee import RankDeficient, ball_volume

SQRT3_6 = 6.0 * math.sqrt(3.0)
FOUR_SQRT2 = 4.0 * math.sqrt(2.0)

# Area thresholds splitting the faces in the 5 <= n <= 7 case.
SMALL_FACE_AREA = 0.4
LARGE_FACE_AREA = 5.5

# Published values, four printed decimals.
G_TABLE = {
    (0, 7): 10.9168, (1, 7): 10.8422, (2, 7): 10.8426,
    (3, 7): 11.0201, (4, 7): 11.7828, (5, 7): 18.3370,
    (0, 6): 10.3923, (1, 6): 10.4034, (2, 6): 10.6206,
    (3, 6): 11.5561, (4, 6): 21.2948,
    (1, 5): 10.6302, (2, 5): 11.8680, (3, 5): 28.1356,
}
H_MIN_PUBLISHED = 10.5618
ARCCOS_1_8_PUBLISHED = 1.4454

KINDS = (
    "jensen2d", "simplex", "cap_area", "spherical_case_c",
    "octahedron_coordinate", "ovr_ball_pajor", "transfer",
)


class ContainmentUnverified(ValueError):
    pass


class InequalityViolated(AssertionError):
    pass


@dataclass(frozen=True)
class BoundCertificate:
    """A lower or upper bound on the vertex index with its evidence."""

    kind: str
    value: float
    side: str
    witness: dict = field(default_factory=dict)
    checked: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.side not in ("lower", "upper"):
            raise ValueError("side must be 'lower' or 'upper'")
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError("certificate value must be finite and positive")

    def to_dict(self):
        return {
            "kind": self.kind,
            "side": self.side,
            "value": self.value,
            "witness": self.witness,
            "checked": self.checked,
        }


@dataclass(frozen=True, eq=False)
class SphericalCap:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if abs(np.linalg.norm(c) - 1.0) > 1e-9:
            raise ValueError("cap center must be a unit vector")
        if not 0.0 < self.radius < math.pi / 2:
            raise ValueError("cap radius must lie in (0, pi/2)")
        object.__setattr__(self, "center", c)

    @property
    def area(self):
        return 2.0 * math.pi * (1.0 - math.cos(self.radius))


# -- closed-form bounds ----------------------------------------------------

def jensen2d_bound(n):
    """``n / cos(pi/n)``: lower bound for n-gons circumscribing the disc."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return n / math.cos(math.pi / n)


def simplex_bound(d):
    """``d(d+1)``: lower bound for simplices circumscribing ``B_2^d``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return float(d * (d + 1))


def cap_area_bound(n):
    """``n^2/(n-2)``, from caps of total area at least 4 pi."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return n * n / (n - 2.0)


def f_spherical(x, y):
    """``tan(pi/y) tan((x + (y-2) pi)/(2y))``.

    For integer ``y`` this is ``1/cos`` of the circumradius of the regular
    spherical y-gon of area ``x``.  Vectorized over numpy inputs.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa <= 0) or np.any(xa >= 2 * math.pi) or np.any(ya < 3):
        raise ValueError("f is defined for 0 < x < 2 pi and y >= 3")
    out = np.tan(np.pi / ya) * np.tan((xa + (ya - 2.0) * np.pi) / (2.0 * ya))
    return float(out) if out.ndim == 0 else out


def g_case_c(m, n):
    """Jensen lower bound for ``n`` vertices, ``m`` of them with small faces."""
    if not (5 <= n <= 7 and 0 <= m < n - 1):
        raise ValueError("g is defined for 5 <= n <= 7 and 0 <= m < n - 1")
    k = n - m
    x = (4.0 * math.pi - SMALL_FACE_AREA * m) / k
    y = ((6.0 * n - 12.0) - 3.0 * m) / k
    return m + k * f_spherical(x, y)


def h_case_n5(a):
    """``2 sqrt3 tan((a+pi)/6) + 3 tan((5pi-a)/12)`` on ``[0, 5.5]``."""
    if not 0.0 <= a <= LARGE_FACE_AREA:
        raise ValueError("h is defined on [0, 5.5]")
    return 2.0 * math.sqrt(3.0) * math.tan((a + math.pi) / 6.0) + 3.0 * math.tan(
        (5.0 * math.pi - a) / 12.0
    )


def h_min(tol=1e-10, grid=1000):
    """Minimum of :func:`h_case_n5` over ``[0, 5.5]``; returns ``(a*, h(a*))``.

    A grid scan brackets the minimum before golden-section refinement, so
    no unimodality is assumed.
    """
    a = np.linspace(0.0, LARGE_FACE_AREA, grid + 1)
    vals = np.array([h_case_n5(t) for t in a])
    i = int(np.argmin(vals))
    lo, hi = a[max(i - 1, 0)], a[min(i + 1, grid)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    e = lo + invphi * (hi - lo)
    fc, fe = h_case_n5(c), h_case_n5(e)
    while hi - lo > tol:
        if fc < fe:
            hi, e, fe = e, c, fc
            c = hi - invphi * (hi - lo)
            fc = h_case_n5(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + invphi * (hi - lo)
            fe = h_case_n5(e)
    best = 0.5 * (lo + hi)
    cands = [(h_case_n5(best), best), (vals[0], 0.0), (vals[-1], LARGE_FACE_AREA)]
    v, t = min(cands)
    return t, v


def euler_edge_bound(face_side_counts):
    """``sum n_i <= 6n - 12`` for the face side counts of a polytope."""
    counts = list(face_side_counts)
    n = len(counts)
    if n < 4 or min(counts) < 3:
        raise ValueError("need at least 4 faces with at least 3 sides each")
    return sum(counts) <= 6 * n - 12


# -- lemma checks -------------------------------------------------------

@dataclass(frozen=True)
class LemmaItem:
    name: str
    passed: bool
    worst_value: float
    witness: tuple
    detail: str = ""


@dataclass(frozen=True)
class LemmaReport:
    items: tuple

    @property
    def passed(self):
        return all(it.passed for it in self.items)

    def item(self, name):
        return next(it for it in self.items if it.name == name)


def lemma_func_checks(grid_step=0.01, f=None, hessian_floor=-1e-6):
    """Grid verification of the monotonicity and convexity claims on f.

    Items: (i) decreasing in y on [3, 30] for x0 in {0.5, 1.0, ..., 6.0};
    (ii) increasing in x on (0, 2 pi) for y0 in [3, 30]; (iii) convex in x
    (second differences); (iv) jointly convex on [0.4, 5.5] x [3, 9]
    (smallest finite-difference Hessian eigenvalue >= ``hessian_floor``).
    ``f`` replaces the function under test (negative controls).
    """
    if not 0.0 < grid_step <= 0.1:
        raise ValueError("grid_step must lie in (0, 0.1]")
    f = f or (lambda x, y: np.tan(np.pi / y) * np.tan((x + (y - 2.0) * np.pi) / (2.0 * y)))
    two_pi = 2.0 * math.pi
    items = []

    hd = 1e-5
    x0 = np.arange(0.5, 6.0 + 1e-9, 0.5)
    ys = np.arange(3.0, 30.0 + 1e-9, grid_step)
    X, Y = np.meshgrid(x0, ys, indexing="ij")
    dfdy = (f(X, Y + hd) - f(X, Y - hd)) / (2 * hd)
    k = np.unravel_index(np.argmax(dfdy), dfdy.shape)
    items.append(LemmaItem("i", bool(dfdy.max() < 0), float(dfdy.max()),
                           (float(X[k]), float(Y[k])), "max df/dy"))

    xs = np.arange(grid_step, two_pi - 0.5 * grid_step, grid_step)
    y0 = np.arange(3.0, 30.0 + 1e-9, 0.5)
    X, Y = np.meshgrid(xs, y0, indexing="ij")
    dfdx = (f(X + hd, Y) - f(X - hd, Y)) / (2 * hd)
    k = np.unravel_index(np.argmin(dfdx), dfdx.shape)
    items.append(LemmaItem("ii", bool(dfdx.min() > 0), float(dfdx.min()),
                           (float(X[k]), float(Y[k])), "min df/dx"))

    Xi, Yi = X[1:-1], Y[1:-1]
    s = grid_step
    d2 = f(Xi + s, Yi) - 2.0 * f(Xi, Yi) + f(Xi - s, Yi)
    k = np.unravel_index(np.argmin(d2), d2.shape)
    items.append(LemmaItem("iii", bool(d2.min() >= -1e-8), float(d2.min()),
                           (float(Xi[k]), float(Yi[k])), "min second difference in x"))

    xr = np.arange(SMALL_FACE_AREA, LARGE_FACE_AREA + 1e-9, grid_step)
    yr = np.arange(3.0, 9.0 + 1e-9, grid_step)
    X, Y = np.meshgrid(xr, yr, indexing="ij")
    lam, _ = _hessian_min_eig(f, X, Y, 1e-3)
    k = np.unravel_index(np.argmin(lam), lam.shape)
    worst = float(lam[k])
    detail = "min Hessian eigenvalue"
    if worst < hessian_floor:
        cx = _midpoint_counterexample(f, X, Y, lam)
        if cx is not None:
            detail += "; midpoint convexity fails at p=(%.4f, %.4f), v=(%.4f, %.4f), t=%.3f: gap %.3e" % cx
    items.append(LemmaItem("iv", bool(worst >= hessian_floor), worst,
                           (float(X[k]), float(Y[k])), detail))
    return LemmaReport(tuple(items))


def _hessian_min_eig(f, X, Y, h):
    fxx = (f(X + h, Y) - 2.0 * f(X, Y) + f(X - h, Y)) / (h * h)
    fyy = (f(X, Y + h) - 2.0 * f(X, Y) + f(X, Y - h)) / (h * h)
    fxy = (f(X + h, Y + h) - f(X + h, Y - h) - f(X - h, Y + h) + f(X - h, Y - h)) / (4.0 * h * h)
    mean = 0.5 * (fxx + fyy)
    rad = np.sqrt(0.25 * (fxx - fyy) ** 2 + fxy ** 2)
    lam = mean - rad
    # Eigenvector of the smaller eigenvalue.
    vx = np.where(np.abs(fxy) > 1e-300, fxy, 0.0)
    vy = np.where(np.abs(fxy) > 1e-300, lam - fxx, 1.0)
    vx = np.where((np.abs(fxy) <= 1e-300) & (fxx < fyy), 1.0, vx)
    vy = np.where((np.abs(fxy) <= 1e-300) & (fxx < fyy), 0.0, vy)
    nrm = np.hypot(vx, vy)
    return lam, (vx / nrm, vy / nrm)


def _midpoint_counterexample(f, X, Y, lam, t=0.05):
    """A finite witness ``f(p+tv) + f(p-tv) < 2 f(p)`` inside the rectangle."""
    order = np.argsort(lam, axis=None)[:200]
    _, (VX, VY) = _hessian_min_eig(f, X, Y, 1e-3)
    for idx in order:
        k = np.unravel_index(idx, lam.shape)
        p = np.array([X[k], Y[k]])
        v = np.array([VX[k], VY[k]])
        a, b = p + t * v, p - t * v
        if not all(SMALL_FACE_AREA <= q[0] <= LARGE_FACE_AREA and 3.0 <= q[1] <= 9.0 for q in (a, b)):
            continue
        gap = float(f(*a) + f(*b) - 2.0 * f(*p))
        if gap < 0:
            return (p[0], p[1], v[0], v[1], t, gap)
    return None


# -- spherical caps --------------------------------------------------------

def cap_from_vertex(p):
    """Cap of the unit sphere seen from an exterior point ``p`` (``|p| > 1``)."""
    p = np.asarray(p, dtype=float)
    r = float(np.linalg.norm(p))
    if r <= 1.0:
        raise ValueError("point must lie outside the unit ball")
    return SphericalCap(p / r, math.acos(1.0 / r))


@dataclass(frozen=True, eq=False)
class CoverageReport:
    covered: bool
    worst_point: np.ndarray
    worst_gap: float
    n_samples: int
    mode: str = "sampled"


def cap_covering_check(caps, n_samples=10_000, tol=1e-12):
    """Sampled check that ``caps`` cover the unit sphere.

    Uses a Fibonacci lattice; a sample ``q`` is covered when
    ``<q, center> >= cos(radius)`` for some cap.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    Q = fibonacci_sphere(n_samples)
    C = np.array([c.center for c in caps])
    cosr = np.array([math.cos(c.radius) for c in caps])
    gap = np.max(Q @ C.T - cosr, axis=1)
    k = int(np.argmin(gap))
    return CoverageReport(bool(gap[k] >= -tol), Q[k], float(gap[k]), n_samples)


# -- certificates ---------------------------------------------------------

def octahedron_certificate(points, assume_contained=False, tol=1e-9):
    """Coordinate certificate ``sum ||p_i||_1 >= sum_k (max - min) >= 2d``.

    Containment of the cross-polytope in ``conv(points)`` is checked by
    facet enumeration for d <= 3 and, above that, by testing each ``±e_k``
    for membership with an LP unless the caller asserts it.
    """
    P = np.array(points, dtype=float, ndmin=2)
    d = P.shape[1]
    if d <= 3:
        rep = contains(Polytope(P), BodySpec.lp_ball(1, d), tol=tol)
        if not rep.contained:
            raise ContainmentUnverified(f"cross-polytope not inside hull (margin {rep.worst_margin:.3g})")
        how = "exact_facet"
    elif assume_contained:
        how = "asserted"
    else:
        E = np.vstack([np.eye(d), -np.eye(d)])
        if not all(in_convex_hull(P, e) for e in E):
            raise ContainmentUnverified("some ±e_k is not a convex combination of the points")
        how = "lp_membership"
    S = float(np.abs(P).sum())
    T = float(np.sum(P.max(axis=0) - P.min(axis=0)))
    if S < T - tol or T < 2 * d - tol:
        raise InequalityViolated(f"S={S}, T={T}, 2d={2 * d}")
    return BoundCertificate(
        "octahedron_coordinate", float(2 * d), "lower",
        {"S": S, "T": T, "d": d, "n_points": len(P), "containment": how},
        checked=True,
    )


@dataclass(frozen=True)
class BallPajorReport:
    vol_L: float
    vol_polar: float
    ball_pajor_rhs: float
    santalo_product: float
    santalo_rhs: float

    @property
    def ball_pajor_ok(self):
        return self.vol_polar >= self.ball_pajor_rhs * (1.0 - 1e-12)

    @property
    def santalo_ok(self):
        return self.santalo_product <= self.santalo_rhs * (1.0 + 1e-12)

    @property
    def ok(self):
        return self.ball_pajor_ok and self.santalo_ok


def ball_pajor_check(points):
    """Check the two volume inequalities for ``L = abs conv(points)``.

    ``vol(L°) >= (d / sum |p_i|)^d`` and ``vol(L) vol(L°) <= vol(B_2^d)^2``,
    with both volumes computed exactly from hulls (d = 2, 3).
    """
    P = np.array(points, dtype=float, ndmin=2)
    d = P.shape[1]
    if d not in (2, 3):
        raise ValueError("ball_pajor_check supports d = 2, 3")
    if np.linalg.matrix_rank(P, tol=1e-9 * max(1.0, np.abs(P).max())) < d:
        raise RankDeficient("points do not span R^d")
    L = Polytope(np.vstack([P, -P]))
    vol_L = abs(convex_hull(L.vertices).volume())
    polar = polar_polytope(L)
    vol_polar = abs(convex_hull(polar.vertices).volume())
    s = float(np.linalg.norm(P, axis=1).sum())
    vb = ball_volume(d)
    return BallPajorReport(vol_L, vol_polar, (d / s) ** d, vol_L * vol_polar, vb * vb)


def ovr_lower_bound(d, ovr_value):
    """``d / (vol(B_2^d)^{1/d} ovr)``, with the weaker closed form recorded."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if ovr_value < 1.0 - 1e-12:
        raise ValueError("outer volume ratio is at least 1")
    value = d / (ball_volume(d) ** (1.0 / d) * ovr_value)
    simplified = d ** 1.5 / (math.sqrt(2.0 * math.pi * math.e) * ovr_value)
    return BoundCertificate(
        "ovr_ball_pajor", value, "lower",
        {"d": d, "ovr": ovr_value, "simplified": simplified},
        checked=bool(simplified <= value * (1.0 + 1e-12)),
    )


def case_bounds_3d():
    """Lower bound on ``sum |p_i|`` for each vertex count of a polytope around ``B_2^3``.

    Returns ``{label: value}`` covering n = 4, n >= 8, and 5 <= n <= 7.
    """
    out = {"n=4 simplex": simplex_bound(3), "n>=8 caps": cap_area_bound(8)}
    out["n=5 h_min"] = h_min()[1]
    for n in (6, 7):
        out[f"n={n} min_m g"] = min(g_case_c(m, n) for m in range(n - 1))
    return out


def euclidean_ball_certificate(d):
    """Lower certificate for ``vein(B_2^d)`` in d = 2, 3."""
    if d == 2:
        ns = np.arange(3, 10_001)
        vals = ns / np.cos(np.pi / ns)
        n = int(ns[np.argmin(vals)])
        value = jensen2d_bound(4)
        return BoundCertificate("jensen2d", value, "lower", {"argmin_n": n},
                                checked=bool(n == 4 and vals.min() >= value - 1e-12))
    if d == 3:
        cases = case_bounds_3d()
        ok = all(v >= SQRT3_6 - 1e-9 for v in cases.values())
        return BoundCertificate(
            "spherical_case_c", SQRT3_6, "lower",
            {"cases": cases, "premise": "joint convexity of f on [0.4,5.5]x[3,9]"},
            checked=ok,
        )
    raise ValueError("exact Euclidean-ball certificates exist for d = 2, 3 only")
