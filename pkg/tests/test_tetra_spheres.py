import itertools
import math

import numpy as np
import pytest

from tetrasphere.core_geom import DegenerateError, Sphere, tangency_residual, unit
from tetrasphere.tetra_spheres import (
    SIGN_VECTORS,
    Tetrahedron,
    canonical,
    cos_product_check,
    grace_pairs,
    grace_radii_check,
    grace_sphere,
    homothety_residual,
    random_tetrahedron,
    regular_tetrahedron,
    sign_class,
    tangent_spheres,
)


def _independent_tangent_sphere(v: np.ndarray, eps) -> tuple[np.ndarray, float]:
    """Solve ``signed_dist_i(x) = eps_i rho`` from scratch, outward normals by the centroid."""
    g = v.mean(axis=0)
    rows, rhs = [], []
    for i in range(4):
        p, q, r = (v[j] for j in range(4) if j != i)
        n = np.cross(q - p, r - p)
        n /= np.linalg.norm(n)
        if n @ (g - p) > 0:
            n = -n
        # inside distance d - n.x, so n.x + eps rho = n.p
        rows.append([*n, eps[i]])
        rhs.append(n @ p)
    sol = np.linalg.solve(np.array(rows), np.array(rhs))
    return sol[:3], float(sol[3])


def _random_rotation(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def test_sign_classes():
    assert len(SIGN_VECTORS) == 8
    assert sign_class((1, 1, 1, 1)) == ("insphere", ())
    assert sign_class((-1, 1, 1, 1)) == ("exsphere", (0,))
    assert sign_class((1, 1, -1, 1)) == ("exsphere", (2,))
    assert sign_class((1, -1, -1, 1))[0] == "goof"
    assert canonical((-1, 1, -1, 1)) == (1, -1, 1, -1)


def test_regular_tetrahedron_spheres():
    t = regular_tetrahedron()
    ts = tangent_spheres(t)
    assert len(ts) == 5
    ins = ts.spheres[(1, 1, 1, 1)]
    assert np.allclose(ins.center, 0, atol=1e-15)
    assert ins.r == pytest.approx(1 / math.sqrt(3), abs=1e-14)
    for eps, s in ts:
        if sign_class(eps)[0] == "exsphere":
            assert s.r == pytest.approx(2 / math.sqrt(3), abs=1e-14)
        assert sign_class(eps)[0] != "goof"


def test_insphere_volume_formula_and_independent_solve():
    rng = np.random.default_rng(41)
    for _ in range(50):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        ins = ts.spheres[(1, 1, 1, 1)]
        assert ins.r == pytest.approx(3 * t.volume / t.areas.sum(), rel=1e-12)
        for eps, s in ts:
            c, rho = _independent_tangent_sphere(t.vertices, eps)
            assert abs(abs(rho) - s.r) <= 1e-10 * t.scale
            assert np.linalg.norm(c - s.center) <= 1e-10 * t.scale


def test_all_face_tangency_residuals():
    rng = np.random.default_rng(43)
    for _ in range(500):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        assert len(ts) == 8
        assert max(ts.residuals.values()) <= 1e-9 * t.scale


def test_degenerate_tetrahedron_rejected():
    with pytest.raises(DegenerateError):
        Tetrahedron([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])


def test_similarity_invariance():
    rng = np.random.default_rng(47)
    t = random_tetrahedron(rng)
    rot = _random_rotation(rng)
    k, shift = 2.5, rng.normal(size=3)
    moved = Tetrahedron(k * t.vertices @ rot.T + shift)
    a, b = tangent_spheres(t), tangent_spheres(moved)
    for eps, s in a:
        img = k * rot @ s.center + shift
        other = b.spheres[eps]
        assert np.linalg.norm(img - other.center) <= 1e-10 * moved.scale
        assert abs(k * s.r - other.r) <= 1e-10 * moved.scale


def test_pair_counts():
    t = regular_tetrahedron()
    assert len(grace_pairs(tangent_spheres(t), t)) == 4
    g = random_tetrahedron(np.random.default_rng(53))
    pairs = grace_pairs(tangent_spheres(g), g)
    assert len(pairs) == 16
    assert sorted(p.face for p in pairs) == sorted(list(range(4)) * 4)


def test_pairs_cross_groups_and_are_homothetic():
    rng = np.random.default_rng(59)
    for _ in range(30):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            kinds = {sign_class(p.first)[0] == "exsphere", sign_class(p.second)[0] == "exsphere"}
            assert kinds == {True, False}
            assert homothety_residual(ts, t, p) <= 1e-10 * t.scale
            a, b = ts.spheres[p.first], ts.spheres[p.second]
            v = t.vertices[p.face]
            col = np.linalg.norm(np.cross(a.center - v, b.center - v))
            assert col <= 1e-10 * t.scale**2


def test_homothetic_pair_projects_to_same_circle():
    rng = np.random.default_rng(61)
    for _ in range(30):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            v = t.vertices[p.face]
            views = []
            for eps in (p.first, p.second):
                s = ts.spheres[eps]
                w = s.center - v
                axis = unit(w)
                # homothety with k < 0 sends the sphere through the vertex
                views.append((axis, math.asin(s.r / np.linalg.norm(w))))
            (a1, r1), (a2, r2) = views
            assert abs(r1 - r2) <= 1e-10
            assert abs(abs(float(a1 @ a2)) - 1) <= 1e-12


def test_grace_spheres_random():
    rng = np.random.default_rng(67)
    for _ in range(100):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            g = grace_sphere(t, ts, p)
            assert g.through_residual <= 1e-9 * t.scale
            assert max(g.tangency_residuals) <= 1e-8 * t.scale
            assert g.collinearity_residual <= 1e-8 * t.scale
            assert "non-unique" not in g.flags


def test_grace_sphere_count_regular():
    t = regular_tetrahedron()
    ts = tangent_spheres(t)
    per_face = [sum(1 for p in grace_pairs(ts, t) if p.face == i) for i in range(4)]
    assert per_face == [1, 1, 1, 1]
    for p in grace_pairs(ts, t):
        g = grace_sphere(t, ts, p)
        assert max(g.tangency_residuals) <= 1e-12


def test_flat_prism_limit_approaches_diametral_sphere():
    base = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 0.8, 0.0]])
    errs = []
    for height in (1e2, 1e3, 1e4):
        apex = base.mean(axis=0) + [0.1, -0.05, height]
        t = Tetrahedron(np.vstack([apex, base]))
        ts = tangent_spheres(t)
        pair = next(p for p in grace_pairs(ts, t) if p.face == 0 and set((p.first, p.second)) == {(1, 1, 1, 1), (1, -1, -1, -1)})
        g = grace_sphere(t, ts, pair).sphere
        circ = t.circumcircle(0)
        errs.append(max(np.linalg.norm(g.center - circ.center), abs(g.r - circ.r)))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] <= 1e-3


def test_grace_radii_and_product():
    rng = np.random.default_rng(71)
    for _ in range(100):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            g = grace_sphere(t, ts, p)
            res = grace_radii_check(t, ts, p, g)
            assert max(res.radius_residuals) <= 1e-8 * t.scale
            assert res.product_residual <= 1e-9 * t.scale**2


def test_grace_radii_symmetric_isoceles():
    # mirror symmetric about the plane x = 0
    t = Tetrahedron([[0, 0.3, 1.2], [-0.7, 0, 0], [0.7, 0, 0], [0, 1.1, 0]])
    ts = tangent_spheres(t)
    for p in grace_pairs(ts, t):
        res = grace_radii_check(t, ts, p, grace_sphere(t, ts, p))
        assert max(res.radius_residuals) <= 1e-12


def test_cos_product_both_signs():
    rng = np.random.default_rng(73)
    seen = set()
    worst = 0.0
    for _ in range(32):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            worst = max(worst, cos_product_check(t, ts, p))
            seen.add(p.k > 0)
    assert worst <= 1e-8
    assert seen == {True, False}


def test_sign_k_matches_sides_of_face():
    rng = np.random.default_rng(79)
    for _ in range(20):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t):
            plane = t.face_plane(p.face)
            s1 = plane.signed_distance(ts.spheres[p.first].center)
            s2 = plane.signed_distance(ts.spheres[p.second].center)
            same_side = s1 * s2 > 0
            # measured: same side of the face gives k < 0
            assert (p.k < 0) == same_side


def test_tangent_sphere_touches_each_face_plane():
    t = random_tetrahedron(np.random.default_rng(83))
    ts = tangent_spheres(t)
    for (eps, s), i in itertools.product(ts, range(4)):
        ext, _ = tangency_residual(s, t.face_plane(i))
        assert abs(ext) <= 1e-10
