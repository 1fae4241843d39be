"""Upper bounds on the vertex index by explicit enclosing point sets.

Two sources: closed-form witnesses for bodies where a good enclosing
polytope is known, and a multistart penalized pattern search over the
vertex coordinates.  Every search result is rescaled at the end so that
containment holds exactly (d <= 3), which makes the reported objective a
valid upper bound.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .body import (
    INF,
    BodySpec,
    Polytope,
    contains,
    gauge_many,
    repair_scale,
    support_many,
)
from .hull import (
    DegenerateHull,
    convex_hull,
    enumerate_facets,
    fibonacci_sphere,
    random_directions,
)
from .mvee import mvee_of_body
from .transfer import hadamard_witness


class InfeasibleVertexCount(ValueError):
    pass


class RestartBudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    n_vertices: int = 6
    restarts: int = 8
    penalty_weight: float = 10.0
    penalty_growth: float = 10.0
    max_iters: int = 3000
    seed: int = 0
    containment_tol: float = 1e-9
    n_fixed_directions: int = 64
    refresh_every: int = 20
    initial_step: float = 0.25
    min_step: float = 1e-9
    max_escalations: int = 4
    kicks: int = 6
    kick_size: float = 0.1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.penalty_weight <= 0 or self.penalty_growth <= 1:
            raise ValueError("penalty_weight > 0 and penalty_growth > 1 required")
        if self.kicks < 0 or self.kick_size <= 0:
            raise ValueError("kicks must be >= 0 and kick_size > 0")
        if self.containment_tol <= 0:
            raise ValueError("containment_tol must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_points: np.ndarray
    objective: float
    raw_objective: float
    feasibility_margin: float
    restarts_used: int
    mode: str
    seed: int = 0
    source: str = "search"
    budget_exhausted: bool = False
    history: tuple = field(default=(), repr=False)

    @property
    def n_vertices(self):
        return len(self.best_points)

    def to_dict(self):
        return {
            "best_points": self.best_points.tolist(),
            "objective": self.objective,
            "raw_objective": self.raw_objective,
            "feasibility_margin": self.feasibility_margin,
            "restarts_used": self.restarts_used,
            "mode": self.mode,
            "seed": self.seed,
            "source": self.source,
            "budget_exhausted": self.budget_exhausted,
        }


def _sort_key(res):
    P = res.best_points
    rows = sorted(map(tuple, np.round(P, 12)))
    return (res.objective, rows)


def best_of(results):
    """Lowest objective; ties go to the lexicographically smallest vertex list."""
    return min(results, key=_sort_key)


# -- witnesses ---------------------------------------------------------------

def regular_simplex(d):
    """Vertices of a regular simplex with circumradius 1, centred at 0."""
    E = np.eye(d + 1) - 1.0 / (d + 1)
    Q, _ = np.linalg.qr(E.T)
    V = E @ Q[:, :d]
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _finish(body, P, source, seed=0, restarts=0, raw=None, history=(), exhausted=False):
    d = body.dim
    objective = float(np.sum(gauge_many(body, P)))
    raw = objective if raw is None else raw
    if d <= 3:
        rep = contains(Polytope(P), body)
        mode = "certified"
    else:
        rep = contains(Polytope(P), body, n_samples=4096, seed=seed)
        mode = "sampled"
    return SearchResult(P, objective, raw, rep.worst_margin, restarts, mode, seed, source,
                        exhausted, tuple(history))


def _john_frame(body):
    """Cholesky factor ``L`` of the MVEE, so ``K ⊆ L B_2^d ⊆ sqrt(d) K``."""
    return np.linalg.cholesky(mvee_of_body(body).shape.matrix)


def _tighten(body, P):
    t = repair_scale(P, body)
    return P * t if math.isfinite(t) else P


def witness_candidates(body):
    """Every closed-form enclosing point set that applies to the body.

    Cross-polytopes give ``2d``; the Euclidean ball gives ``2 d^{3/2}``
    through ``±sqrt(d) e_i``; a polytope body can use its own vertices; the
    cube in dimension ``2^m`` uses the Sylvester-Hadamard cross-polytope;
    every body has the scaled cross-polytope of its John ellipsoid.
    """
    d = body.dim
    cands = []
    if body.kind == "lp_ball" and body.p == 1:
        cands.append(("cross_polytope", np.vstack([np.eye(d), -np.eye(d)])))
    if body.kind == "lp_ball" and body.p == 2:
        cands.append(("scaled_cross_polytope", math.sqrt(d) * np.vstack([np.eye(d), -np.eye(d)])))
    if body.kind == "lp_ball" and body.p == INF:
        if d <= 10:
            cands.append(("cube_vertices", np.array(list(itertools.product((-1.0, 1.0), repeat=d)))))
        m = int(round(math.log2(d)))
        if 2 ** m == d and 1 <= m <= 6:
            w = hadamard_witness(m)
            # A sampled maximum could undershoot; only trust an exhaustive one.
            lam = w.checks["attained_ratio"] if w.mode == "exhaustive" else w.ratio
            cols = lam * w.operator.T
            cands.append(("hadamard_cross_polytope", np.vstack([cols, -cols])))
    if body.kind == "sym_polytope":
        if d <= 3:
            V = body.hull.points[body.hull.vertices]
        else:
            V = np.vstack([body.generators, -body.generators])
        cands.append(("own_vertices", V))

    L = _john_frame(body)
    C = math.sqrt(d) * np.vstack([np.eye(d), -np.eye(d)]) @ L.T
    cands.append(("john_cross_polytope", _tighten(body, C) if d <= 3 else C))

    return [_finish(body, P, f"witness:{name}") for name, P in cands]


def known_witness(body):
    """Best of :func:`witness_candidates`."""
    return best_of(witness_candidates(body))


# -- local search ------------------------------------------------------------

def _random_rotation(d, rng):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def initial_points(n, d, rng):
    """Feasible start in John coordinates (the body lies in ``B_2^d``).

    ``n >= 2d``: the cross-polytope ``±sqrt(d) e_i`` padded with random
    points of norm ``sqrt(d)``.  ``n < 2d``: a regular simplex of
    circumradius ``d`` (inradius 1) padded the same way.
    """
    if n >= 2 * d:
        base = math.sqrt(d) * np.vstack([np.eye(d), -np.eye(d)])
    else:
        base = d * regular_simplex(d)
    extra = n - len(base)
    if extra > 0:
        base = np.vstack([base, math.sqrt(d) * random_directions(extra, d, rng)])
    return base


# Enumerating all pairs/triples stays cheap up to this many candidates.
MAX_ENUMERATED = 2000


class _Objective:
    """Batched evaluation of candidate point sets.

    ``penalized``: ``sum ||p_i||_K + lam * sum_u max(0, h_K(u) - h_P(u))``
    over the certification directions ``u``.
    ``scaled``: ``max_u h_K(u)/h_P(u) * sum ||p_i||_K``, the objective after
    rescaling to containment along ``u``; it is scale invariant.

    In d <= 3 with few points the facets of every candidate are enumerated,
    so the directions are that candidate's own facet normals plus the fixed
    set and ``scaled`` is exact.  Otherwise the facet normals of the current
    iterate are used and refreshed periodically.
    """

    def __init__(self, body, n, fixed):
        self.body = body
        self.n = n
        self.d = body.dim
        self.fixed = fixed
        self.hK_fixed = support_many(body, fixed)
        self.exact = self.d in (2, 3) and math.comb(n, self.d) <= MAX_ENUMERATED
        self.U = np.zeros((0, self.d))
        self.hK = np.zeros(0)

    def refresh(self, x):
        if self.exact or self.d > 3:
            return
        try:
            U = convex_hull(x.reshape(self.n, self.d)).normals
        except DegenerateHull:
            U = np.zeros((0, self.d))
        self.U = U
        self.hK = support_many(self.body, U)

    def _gauges(self, P):
        K = P.shape[0]
        return gauge_many(self.body, P.reshape(-1, self.d)).reshape(K, self.n).sum(axis=1)

    def _directional(self, P):
        """Support values ``(h_K, h_P)`` per candidate, plus a facet mask."""
        K = P.shape[0]
        hPf = np.max(P @ self.fixed.T, axis=1)
        hKf = np.broadcast_to(self.hK_fixed, hPf.shape)
        if self.exact:
            N, b, valid = enumerate_facets(P)
            hK = support_many(self.body, N.reshape(-1, self.d)).reshape(b.shape)
            return hK, b, valid, hKf, hPf
        hP = np.max(P @ self.U.T, axis=1)
        hK = np.broadcast_to(self.hK, hP.shape)
        return hK, hP, np.ones(hP.shape, dtype=bool), hKf, hPf

    def violation_many(self, X):
        P = X.reshape(X.shape[0], self.n, self.d)
        hK, hP, valid, hKf, hPf = self._directional(P)
        v = np.sum(np.where(valid, np.maximum(hK - hP, 0.0), 0.0), axis=1)
        return v + np.sum(np.maximum(hKf - hPf, 0.0), axis=1)

    def violation(self, x):
        return float(self.violation_many(x[None, :])[0])

    def penalized(self, X, lam):
        P = X.reshape(X.shape[0], self.n, self.d)
        return self._gauges(P) + lam * self.violation_many(X)

    def scaled(self, X):
        P = X.reshape(X.shape[0], self.n, self.d)
        hK, hP, valid, hKf, hPf = self._directional(P)
        with np.errstate(divide="ignore", invalid="ignore"):
            tiny = 1e-12 * np.maximum(1.0, np.abs(P).max(axis=(1, 2)))[:, None]
            r = np.where(hP > tiny, hK / hP, np.inf)
            rf = np.where(hPf > tiny, hKf / hPf, np.inf)
        r = np.where(valid, r, -np.inf)
        t = np.maximum(r.max(axis=1, initial=-np.inf), rf.max(axis=1))
        if self.exact:
            t = np.where(valid.any(axis=1), t, np.inf)
        return t * self._gauges(P)


def _poll_directions(dim, rng):
    B = _random_rotation(dim, rng) if dim > 1 else np.ones((1, 1))
    return np.vstack([np.eye(dim), -np.eye(dim), B, -B])


def _pattern_search(fbatch, x, step, min_step, max_iters, rng, refresh=None,
                    refresh_every=20, exact=None):
    """Compass search with a complete poll over coordinates plus a random basis.

    ``fbatch`` maps a ``(K, dim)`` array of candidates to ``K`` values.  The
    step doubles after a successful poll and halves after a failed one.
    When ``exact`` is given, the best polled candidates are re-scored by it
    and accepted only on exact improvement; ``exact`` returns
    ``(value, x_new)`` so it may also renormalize the point.  Returns
    ``(x, fx, iterations, converged)``.
    """
    fx = exact(x)[0] if exact else float(fbatch(x[None, :])[0])
    it = 0
    while step > min_step:
        if it >= max_iters:
            return x, fx, it, False
        if refresh is not None and it % refresh_every == 0:
            refresh(x)
            if exact is None:
                fx = float(fbatch(x[None, :])[0])
        Y = x + step * _poll_directions(x.size, rng)
        vals = fbatch(Y)
        improved = False
        for k in np.argsort(vals, kind="stable")[:3]:
            if not vals[k] < fx - 1e-15 * max(1.0, abs(fx)):
                break
            if exact is None:
                x, fx = Y[k], float(vals[k])
                improved = True
                break
            fy, y = exact(Y[k])
            if fy < fx - 1e-15 * max(1.0, abs(fx)):
                x, fx = y, fy
                improved = True
                break
        step = step * 2.0 if improved else step * 0.5
        it += 1
    return x, fx, it, True


def _one_restart(body, cfg, L, fixed, r):
    d = body.dim
    n = cfg.n_vertices
    rng = np.random.default_rng([cfg.seed, r])
    Q = np.eye(d) if r == 0 else _random_rotation(d, rng)
    x = (initial_points(n, d, rng) @ Q.T @ L.T).ravel()
    scale = float(np.mean(np.abs(x)))
    step, min_step = cfg.initial_step * scale, cfg.min_step * scale
    obj = _Objective(body, n, fixed)
    total = 0
    converged = True

    lam = cfg.penalty_weight
    for esc in range(cfg.max_escalations + 1):
        obj.refresh(x)
        x, _, it, ok = _pattern_search(
            lambda X: obj.penalized(X, lam), x, step, min_step, cfg.max_iters, rng,
            obj.refresh, cfg.refresh_every)
        total += it
        converged &= ok
        obj.refresh(x)
        if obj.violation(x) <= cfg.containment_tol:
            break
        if esc < cfg.max_escalations:
            lam *= cfg.penalty_growth

    # Polish on the rescaled objective, which needs no penalty weight, then
    # perturb the best point and polish again a few times.
    polish = _polisher(body, cfg, obj, fixed, rng)
    x, fx, it, ok = polish(x, step)
    total += it
    converged &= ok
    for _ in range(cfg.kicks if math.isfinite(fx) else 0):
        y = x + cfg.kick_size * float(np.mean(np.abs(x))) * rng.standard_normal(x.size)
        y, fy, it, ok = polish(y, 0.2 * step)
        total += it
        converged &= ok
        if fy < fx:
            x, fx = y, fy
    # The polished objective is scale invariant, so the iterate's scale
    # drifts; bring it back to tight containment before the repair step.
    if obj.exact and math.isfinite(fx):
        t = repair_scale(x.reshape(n, d), body)
        if math.isfinite(t):
            x = x * t
    return x.reshape(n, d), total, converged


def _polisher(body, cfg, obj, fixed, rng):
    n, d = cfg.n_vertices, body.dim

    def polish(x, step):
        scale = float(np.mean(np.abs(x)))
        min_step = cfg.min_step * scale
        if obj.exact:
            return _pattern_search(obj.scaled, x, step, min_step, cfg.max_iters, rng)
        exact = _exact_scaled(body, n, fixed, cfg.seed)
        if not math.isfinite(exact(x)[0]):
            return x, math.inf, 0, True
        obj.refresh(x)
        return _pattern_search(obj.scaled, x, step, min_step, cfg.max_iters, rng,
                               obj.refresh, cfg.refresh_every, exact=exact)

    return polish


def _exact_scaled(body, n, fixed, seed):
    """Rescaled objective checked on the true hull, renormalized to be tight."""
    d = body.dim
    if d > 3:
        rng = np.random.default_rng([seed, 2 ** 31])
        U = np.vstack([fixed, random_directions(4096, d, rng), body.extreme_directions()])
        U = np.vstack([U, -U])
        hK = support_many(body, U)

    def exact(x):
        P = x.reshape(n, d)
        if d <= 3:
            t = repair_scale(P, body)
        else:
            hP = np.max(U @ P.T, axis=1)
            t = float(np.max(hK / hP)) if np.all(hP > 0) else math.inf
        if not math.isfinite(t):
            return math.inf, x
        y = x * t
        return float(np.sum(gauge_many(body, y.reshape(n, d)))), y

    return exact


def _repair(body, P, fixed, seed):
    d = body.dim
    if d <= 3:
        t = repair_scale(P, body)
    else:
        rng = np.random.default_rng([seed, 2 ** 31])
        U = np.vstack([fixed, random_directions(20_000, d, rng), body.extreme_directions()])
        U = np.vstack([U, -U])
        hP = np.max(U @ P.T, axis=1)
        t = float(np.max(support_many(body, U) / np.maximum(hP, 1e-300)))
    if not math.isfinite(t):
        return None
    # Never shrink: the repaired value must dominate the raw one.
    t = max(t, 1.0)
    if d <= 3:
        # Nudge upward until the exact facet check passes.
        while not contains(Polytope(P * t), body).contained:
            t *= 1.0 + 1e-12
    return P * t


def _fixed_directions(d, m, seed):
    if d in (2, 3):
        U = fibonacci_sphere(m, d)
    else:
        U = random_directions(m, d, np.random.default_rng([seed, 2 ** 32]))
    return np.vstack([U, -U])


def local_search(body, cfg):
    """Multistart penalized pattern search over ``cfg.n_vertices`` points.

    Each restart starts from a feasible configuration in the body's John
    frame (restart 0 unrotated, the others randomly rotated), runs compass
    search on the penalized objective, escalates the penalty while the
    sampled containment is violated, and finally scales the points up to
    exact containment.
    """
    d = body.dim
    n = cfg.n_vertices
    if n <= d:
        raise InfeasibleVertexCount(f"{n} points cannot enclose a body in R^{d}")
    L = _john_frame(body)
    fixed = _fixed_directions(d, cfg.n_fixed_directions, cfg.seed)
    results = []
    history = []
    exhausted = False
    for r in range(cfg.restarts):
        P, iters, converged = _one_restart(body, cfg, L, fixed, r)
        raw = float(np.sum(gauge_many(body, P)))
        Pr = _repair(body, P, fixed, cfg.seed)
        if Pr is None:
            history.append((r, raw, math.inf, iters))
            continue
        exhausted |= not converged
        res = _finish(body, Pr, "search", cfg.seed, r + 1, raw=raw)
        history.append((r, raw, res.objective, iters))
        results.append(res)
    if not results:
        raise RestartBudgetExhausted("no restart produced an enclosing configuration")
    best = best_of(results)
    return replace(best, restarts_used=cfg.restarts, budget_exhausted=exhausted,
                   history=tuple(history))


def vein_upper(body, n_range, cfg):
    """Best upper bound over closed-form witnesses and searches for each n."""
    d = body.dim
    lo, hi = n_range
    if lo < d + 1 or hi > 64 or lo > hi:
        raise ValueError(f"n_range must lie within [{d + 1}, 64]")
    results = [known_witness(body)]
    for n in range(lo, hi + 1):
        results.append(local_search(body, replace(cfg, n_vertices=n)))
    return best_of(results)


def results_csv(rows):
    """CSV with columns body, n, objective, margin, seed."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["body", "n", "objective", "margin", "seed"])
    for label, res in rows:
        w.writerow([label, res.n_vertices, repr(res.objective), repr(res.feasibility_margin), res.seed])
    return buf.getvalue()
