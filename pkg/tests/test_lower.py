import math

import numpy as np
import pytest

from vein.lower import (
    ARCCOS_1_8_PUBLISHED,
    FOUR_SQRT2,
    G_TABLE,
    H_MIN_PUBLISHED,
    SQRT3_6,
    BoundCertificate,
    ContainmentUnverified,
    ball_pajor_check,
    cap_area_bound,
    cap_covering_check,
    cap_from_vertex,
    case_bounds_3d,
    euclidean_ball_certificate,
    euler_edge_bound,
    f_spherical,
    g_case_c,
    h_case_n5,
    h_min,
    jensen2d_bound,
    lemma_func_checks,
    octahedron_certificate,
    ovr_lower_bound,
    simplex_bound,
)
from vein.body import regular_polygon


def test_jensen_examples():
    assert jensen2d_bound(4) == pytest.approx(FOUR_SQRT2)
    assert jensen2d_bound(3) == pytest.approx(6)
    assert jensen2d_bound(6) == pytest.approx(4 * math.sqrt(3))
    ns = np.arange(3, 10_001)
    assert int(ns[np.argmin(ns / np.cos(np.pi / ns))]) == 4
    with pytest.raises(ValueError):
        jensen2d_bound(2)


def test_simplex_and_cap_bounds():
    assert [simplex_bound(d) for d in (2, 3, 4)] == [6, 12, 20]
    assert cap_area_bound(8) == pytest.approx(64 / 6)
    assert cap_area_bound(4) == 8
    assert cap_area_bound(100) == pytest.approx(10000 / 98)
    assert all(cap_area_bound(n) > SQRT3_6 for n in range(8, 200))


def test_f_examples():
    assert f_spherical(1e-9, 3) == pytest.approx(1, abs=1e-8)
    assert f_spherical(4 * math.pi / 6, 4) == pytest.approx(math.sqrt(3))
    assert 7 * f_spherical(4 * math.pi / 7, 30 / 7) == pytest.approx(10.9168, abs=5e-4)
    with pytest.raises(ValueError):
        f_spherical(0.0, 4)
    with pytest.raises(ValueError):
        f_spherical(1.0, 2.5)


def test_g_table():
    for (m, n), published in G_TABLE.items():
        assert g_case_c(m, n) == pytest.approx(published, abs=5e-4)
    assert g_case_c(0, 6) == pytest.approx(SQRT3_6, abs=1e-12)


def test_g_exceeds_threshold_except_excluded_case():
    for n in (5, 6, 7):
        for m in range(n - 1):
            if (m, n) == (0, 5):
                assert g_case_c(m, n) < SQRT3_6
            else:
                assert g_case_c(m, n) >= SQRT3_6 - 1e-9
    with pytest.raises(ValueError):
        g_case_c(5, 6)


def test_h():
    assert h_case_n5(0.0) == pytest.approx(2 + 3 * (2 + math.sqrt(3)))
    a, v = h_min()
    assert v == pytest.approx(H_MIN_PUBLISHED, abs=5e-4)
    assert v > SQRT3_6
    grid = np.linspace(0, 5.5, 20001)
    assert v <= min(h_case_n5(t) for t in grid) + 1e-12
    with pytest.raises(ValueError):
        h_case_n5(5.6)


def test_euler_counts():
    assert euler_edge_bound([3, 3, 3, 3])
    assert euler_edge_bound([3, 3, 4, 4, 4])
    assert not euler_edge_bound([5, 5, 5, 5, 5])


def test_caps():
    c = cap_from_vertex([0, 0, 8])
    assert c.radius == pytest.approx(ARCCOS_1_8_PUBLISHED, abs=1e-4)
    c = cap_from_vertex([2, 0, 0])
    assert c.radius == pytest.approx(math.pi / 3)
    assert c.area == pytest.approx(math.pi)
    assert cap_from_vertex([1 + 1e-9, 0, 0]).area < 1e-6
    with pytest.raises(ValueError):
        cap_from_vertex([0.5, 0, 0])


def test_cap_covering():
    E = math.sqrt(3) * np.eye(3)
    assert cap_covering_check([cap_from_vertex(p) for p in np.vstack([E, -E])]).covered
    T = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) * math.sqrt(3)
    assert cap_covering_check([cap_from_vertex(p) for p in T]).covered
    lone = cap_covering_check([cap_from_vertex([0, 0, 1 / math.cos(1.0)])])
    assert not lone.covered and lone.worst_gap < 0


def test_case_bounds_exceed_ball_value():
    cases = case_bounds_3d()
    assert cases["n=4 simplex"] == 12
    assert cases["n>=8 caps"] == pytest.approx(64 / 6)
    assert cases["n=6 min_m g"] == pytest.approx(SQRT3_6)
    assert min(cases.values()) >= SQRT3_6 - 1e-9


def test_euclidean_ball_certificates():
    c2 = euclidean_ball_certificate(2)
    assert c2.value == pytest.approx(FOUR_SQRT2) and c2.checked
    c3 = euclidean_ball_certificate(3)
    assert c3.value == pytest.approx(SQRT3_6) and c3.kind == "spherical_case_c"
    assert "premise" in c3.witness


def test_certificate_validation():
    with pytest.raises(ValueError):
        BoundCertificate("made_up", 1.0, "lower")
    with pytest.raises(ValueError):
        BoundCertificate("simplex", -1.0, "lower")
    c = BoundCertificate("simplex", 12.0, "lower", {"d": 3}, True)
    assert c.to_dict() == {"kind": "simplex", "side": "lower", "value": 12.0,
                           "witness": {"d": 3}, "checked": True}


# -- lemma checks ---------------------------------------------------------------

def test_lemma_monotonicity_items_pass():
    rep = lemma_func_checks(grid_step=0.01)
    for name in ("i", "ii", "iii"):
        assert rep.item(name).passed, rep.item(name)


def test_joint_convexity_fails_on_the_rectangle():
    # The Hessian of f is indefinite near the corner x = 0.4, y = 3.
    rep = lemma_func_checks(grid_step=0.01)
    iv = rep.item("iv")
    assert not iv.passed
    assert iv.worst_value < -0.1
    assert "midpoint convexity fails" in iv.detail


def test_finite_convexity_counterexample():
    p = np.array([0.44, 3.04])
    lam = np.linalg.eigh(_fd_hessian(p))[0][0]
    assert lam < 0
    v = np.linalg.eigh(_fd_hessian(p))[1][:, 0]
    a, b = p + 0.05 * v, p - 0.05 * v
    assert 0.4 <= min(a[0], b[0]) and max(a[1], b[1]) <= 9 and min(a[1], b[1]) >= 3
    assert f_spherical(*a) + f_spherical(*b) < 2 * f_spherical(*p)


def _fd_hessian(p, h=1e-4):
    f = lambda q: f_spherical(q[0], q[1])
    H = np.zeros((2, 2))
    E = np.eye(2) * h
    for i in range(2):
        for j in range(2):
            H[i, j] = (f(p + E[i] + E[j]) - f(p + E[i] - E[j]) - f(p - E[i] + E[j]) + f(p - E[i] - E[j])) / (4 * h * h)
    return H


def test_coarse_grid_same_verdicts():
    fine, coarse = lemma_func_checks(0.01), lemma_func_checks(0.1)
    assert [it.passed for it in fine.items] == [it.passed for it in coarse.items]


def test_perturbed_function_fails_convexity():
    bumped = lambda x, y: np.tan(np.pi / y) * np.tan((x + (y - 2) * np.pi) / (2 * y)) - 0.5 * np.sin(3 * x)
    rep = lemma_func_checks(0.05, f=bumped)
    assert not rep.item("iv").passed


# -- coordinate and volume certificates ------------------------------------------------

def test_octahedron_examples():
    for d in (2, 3):
        E = np.eye(d)
        c = octahedron_certificate(np.vstack([E, -E]))
        assert c.witness["S"] == pytest.approx(2 * d) and c.witness["T"] == pytest.approx(2 * d)
    c = octahedron_certificate([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert (c.witness["S"], c.witness["T"], c.value) == (8, 4, 4)
    E = 1.5 * np.eye(3)
    c = octahedron_certificate(np.vstack([E, -E]))
    assert c.witness["S"] == pytest.approx(9) and c.witness["T"] == pytest.approx(9)


def test_octahedron_containment_is_verified():
    with pytest.raises(ContainmentUnverified):
        octahedron_certificate(0.9 * np.vstack([np.eye(3), -np.eye(3)]))
    with pytest.raises(ContainmentUnverified):
        octahedron_certificate(0.9 * np.vstack([np.eye(5), -np.eye(5)]))
    c = octahedron_certificate(np.vstack([np.eye(5), -np.eye(5)]))
    assert c.witness["containment"] == "lp_membership"


def test_octahedron_random(rng):
    for _ in range(200):
        d = int(rng.integers(2, 7))
        E = np.eye(d)
        extra = rng.standard_normal((int(rng.integers(0, 6)), d)) * 2
        P = np.vstack([E, -E, extra])
        c = octahedron_certificate(P, assume_contained=d > 3)
        assert c.witness["S"] >= c.witness["T"] >= 2 * d - 1e-9


def test_ball_pajor_examples():
    rep = ball_pajor_check([[1, 0], [0, 1]])
    assert rep.vol_polar == pytest.approx(4) and rep.ball_pajor_rhs == pytest.approx(1)
    E = np.eye(3)
    rep = ball_pajor_check(np.vstack([E, -E]))
    assert rep.vol_polar == pytest.approx(8) and rep.ball_pajor_rhs == pytest.approx(0.125)
    assert rep.ok


def test_santalo_for_inscribed_polygons():
    prods = []
    for n in (4, 8, 16, 64):
        rep = ball_pajor_check(regular_polygon(n).generators)
        assert rep.ok
        prods.append(rep.santalo_product)
    assert prods == sorted(prods) and prods[-1] < math.pi ** 2


def test_ball_pajor_random(rng):
    for _ in range(200):
        d = int(rng.integers(2, 4))
        assert ball_pajor_check(rng.standard_normal((int(rng.integers(d, 9)), d))).ok


def test_ovr_lower_bound_examples():
    c = ovr_lower_bound(3, 1.0)
    assert c.value == pytest.approx(3 / (4 * math.pi / 3) ** (1 / 3))
    assert c.witness["simplified"] == pytest.approx(3 ** 1.5 / math.sqrt(2 * math.pi * math.e))
    for d in (2, 5, 10):
        c = ovr_lower_bound(d, math.sqrt(2 * math.pi * math.e) / 2)
        assert c.witness["simplified"] == pytest.approx(d ** 1.5 / (math.pi * math.e))
        assert c.value >= c.witness["simplified"]
