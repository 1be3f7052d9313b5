import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tetrasphere.core_geom import (
    Circle3,
    Cone,
    DegenerateError,
    DomainError,
    Plane,
    Sphere,
    Tangency,
    Tolerance,
    cone_sphere_tangency_residual,
    invert,
    pencil_limit_points,
    power_of_point,
    radical_axis,
    radical_plane,
    similitude_centers,
    sphere_angle_cos,
    tangency_classify,
    tangent_cone,
)

coord = st.floats(-3, 3, allow_nan=False)
point = st.tuples(coord, coord, coord).map(np.array)
radius = st.floats(0.1, 2.0)
XY = Plane(np.array([0.0, 0.0, 1.0]), 0.0)


def test_tolerance_scaling():
    t = Tolerance(1e-9, 1e-15, 10.0)
    assert t.length == pytest.approx(1e-8)
    assert t.area == pytest.approx(1e-7)
    with pytest.raises(ValueError):
        Tolerance(0.0)


def test_power_of_point_examples():
    s = Sphere([1, 2, 3], 2.0)
    assert power_of_point([3, 2, 3], s) == pytest.approx(0.0)
    # orthocenter of the 3-4-5 triangle against the circle on a leg
    c = Circle3(XY, [0, 1.5, 0], 1.5)
    assert power_of_point([0, 0, 0], c) == pytest.approx(0.0, abs=1e-15)
    # Sigma(F) = d^2 - R^2
    sig = Circle3(XY, [0, 0, 0], 2.0)
    assert power_of_point([0.5, 0, 0], sig) == pytest.approx(0.25 - 4.0)
    with pytest.raises(DomainError):
        power_of_point([0, 0, 1], c)


def test_sphere_angle_cos_examples():
    assert sphere_angle_cos(Sphere([0, 0, 0], 1), Sphere([1, 0, 0], 2)) == pytest.approx(1.0)
    assert sphere_angle_cos(Sphere([0, 0, 0], 1), Sphere([3, 0, 0], 2)) == pytest.approx(-1.0)
    assert sphere_angle_cos(Sphere([0, 0, 0], 1), Sphere([0, 0, 0], 3)) == pytest.approx(5 / 3)


def test_tangency_classify_examples():
    assert tangency_classify(Sphere([0, 0, 0], 1), Sphere([3, 0, 0], 2)) is Tangency.EXTERNAL
    assert tangency_classify(Sphere([0, 0, 0], 3), Sphere([1, 0, 0], 2)) is Tangency.INTERNAL
    assert tangency_classify(Sphere([0, 0, 0], 3), Sphere([1.5, 0, 0], 2)) is Tangency.NOT_TANGENT
    up = Sphere([0.3, -1, 0.7], 0.7)
    assert tangency_classify(up, XY) is Tangency.EXTERNAL
    assert tangency_classify(up, XY.flipped()) is Tangency.INTERNAL
    # circumscribed diametral sphere against the lifted incircle sphere, equilateral (R = 2r)
    assert tangency_classify(Sphere([0, 0, 0], 2.0), Sphere([0, 0, 1.0], 1.0)) is Tangency.INTERNAL


def test_tangency_ambiguous_for_tiny_radius():
    with pytest.raises(DegenerateError):
        tangency_classify(Sphere([0, 0, 0], 1.0), Sphere([1.0, 0, 0], 1e-12))


def test_invert_examples():
    s = Sphere([1, 1, 1], 2.0)
    img = invert([1, 1, 1], 4.0, s)
    assert np.allclose(img.center, s.center) and img.r == pytest.approx(2.0)
    # plane at distance h from the center -> sphere of radius k / (2h) through the center
    h, k = 0.5, 3.0
    pl = Plane(np.array([0, 0, 1.0]), h)
    img = invert([0, 0, 0], k, pl)
    assert img.r == pytest.approx(k / (2 * h))
    for p in ([0, 0, h], [1, 2, h], [-3, 0.4, h]):
        q = invert([0, 0, 0], k, np.array(p, dtype=float))
        assert abs(np.linalg.norm(q - img.center) - img.r) < 1e-12
    # a sphere through the center becomes a plane
    out = invert([0, 0, 0], 1.0, Sphere([0, 0, 1], 1.0))
    assert isinstance(out, Plane) and out.d == pytest.approx(0.5)


@settings(max_examples=60, deadline=None)
@given(point, point, radius, st.floats(0.2, 3.0), st.booleans())
def test_inversion_is_an_involution(c, x, r, k, neg):
    k = -k if neg else k
    s = Sphere(x, r)
    if abs(np.linalg.norm(x - c) - r) < 1e-3:
        return
    twice = invert(c, k, invert(c, k, s))
    assert np.allclose(twice.center, s.center, atol=1e-8) and twice.r == pytest.approx(r, abs=1e-8)
    if np.linalg.norm(x - c) > 1e-3:
        assert np.allclose(invert(c, k, invert(c, k, x)), x, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(point, radius, point, st.floats(0, 2 * math.pi), point)
def test_power_is_rigid_invariant(c, r, p, ang, shift):
    rot = np.array([[math.cos(ang), -math.sin(ang), 0], [math.sin(ang), math.cos(ang), 0], [0, 0, 1]])
    a = Sphere(c, r).power(p)
    b = Sphere(rot @ c + shift, r).power(rot @ p + shift)
    assert a == pytest.approx(b, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(point, radius, point, radius, st.floats(-2, 2), st.floats(-2, 2))
def test_radical_plane_has_equal_power(c1, r1, c2, r2, u, v):
    if np.linalg.norm(c1 - c2) < 1e-2:
        return
    s1, s2 = Sphere(c1, r1), Sphere(c2, r2)
    pl = radical_plane(s1, s2)
    from tetrasphere.core_geom import orthonormal_pair

    e1, e2 = orthonormal_pair(pl.n)
    x = pl.origin + u * e1 + v * e2
    assert s1.power(x) == pytest.approx(s2.power(x), abs=1e-9)


def test_radical_locus_examples():
    pl = radical_plane(Sphere([0, 0, 0], 1), Sphere([2, 0, 0], 1))
    assert abs(pl.n[0]) == pytest.approx(1.0) and pl.signed_distance([1, 5, 5]) == pytest.approx(0.0)
    with pytest.raises(DegenerateError):
        radical_plane(Sphere([0, 0, 0], 1), Sphere([0, 0, 0], 2))
    # circles on the legs of the right triangle (0,0),(4,0),(0,3): radical axis is the altitude from C
    ca = Circle3(XY, [0, 1.5, 0], 1.5)
    cb = Circle3(XY, [2, 0, 0], 2.0)
    ax = radical_axis(ca, cb)
    assert ax.distance([0, 0, 0]) < 1e-12
    assert ax.distance([1.2, 1.6, 0]) < 1e-12  # foot of the altitude on the hypotenuse


def test_similitude_centers():
    ext, inn = similitude_centers(Sphere([0, 0, 0], 1), Sphere([3, 0, 0], 2))
    assert np.allclose(ext, [-3, 0, 0]) and np.allclose(inn, [1, 0, 0])
    ext, inn = similitude_centers(Sphere([0, 0, 0], 1), Sphere([4, 2, 0], 1))
    assert ext is None and np.allclose(inn, [2, 1, 0])
    _, inn = similitude_centers(Sphere([0, 0, 0], 1), Sphere([3, 0, 0], 2))
    assert np.allclose(inn, [1, 0, 0])  # tangent spheres: the contact point


def test_pencil_limit_points():
    lp = pencil_limit_points(Sphere([0, 0, 0], 1), Sphere([4, 0, 0], 1))
    xs = sorted(p[0] for p in lp)
    assert xs == pytest.approx([2 - math.sqrt(3), 2 + math.sqrt(3)])
    assert pencil_limit_points(Sphere([0, 0, 0], 1), Sphere([1, 0, 0], 1)) is None
    a, b = pencil_limit_points(Sphere([0, 0, 0], 2), Sphere([1, 0, 0], 1))
    assert np.allclose(a, b) and np.allclose(a, [2, 0, 0])
    with pytest.raises(DegenerateError):
        pencil_limit_points(Sphere([0, 0, 0], 1), Sphere([0, 0, 0], 2))


@settings(max_examples=60, deadline=None)
@given(point, radius, point, radius)
def test_limit_points_are_inverse_pairs(c1, r1, c2, r2):
    if np.linalg.norm(c1 - c2) < 1e-2:
        return
    s1, s2 = Sphere(c1, r1), Sphere(c2, r2)
    lp = pencil_limit_points(s1, s2)
    if lp is None:
        return
    a, b = lp
    pl = radical_plane(s1, s2)
    u = (c2 - c1) / np.linalg.norm(c2 - c1)
    m = c1 + (pl.d - pl.n @ c1) / (pl.n @ u) * u  # radical point on the center line
    for p in lp:
        # squared tangent length from the radical point
        assert s1.power(m) == pytest.approx(float(np.sum((m - p) ** 2)), abs=1e-8)
        assert s2.power(m) == pytest.approx(float(np.sum((m - p) ** 2)), abs=1e-8)
    for s in (s1, s2):
        # the two limit points are mutually inverse in every sphere of the pencil
        assert float((a - s.center) @ (b - s.center)) == pytest.approx(s.r**2, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(point, radius, point, radius, st.booleans())
def test_tangent_cone_touches_both(c1, r1, c2, r2, internal):
    dist = np.linalg.norm(c1 - c2)
    if dist < r1 + r2 + 0.05 or (not internal and abs(r1 - r2) < 0.05):
        return
    k = tangent_cone(Sphere(c1, r1), Sphere(c2, r2), internal=internal)
    scale = dist + r1 + r2
    assert cone_sphere_tangency_residual(k, Sphere(c1, r1)) <= 1e-9 * scale
    assert cone_sphere_tangency_residual(k, Sphere(c2, r2)) <= 1e-9 * scale


def test_tangent_cone_errors():
    with pytest.raises(DegenerateError):
        tangent_cone(Sphere([0, 0, 0], 1), Sphere([5, 0, 0], 1))
    with pytest.raises(DegenerateError):
        tangent_cone(Sphere([0, 0, 0], 1), Sphere([1.5, 0, 0], 1), internal=True)


def test_cone_sphere_residual():
    a = 0.4
    k = Cone([0, 0, 0], [0, 0, 1], a)
    d = 3.0
    inscribed = Sphere([0, 0, d], d * math.sin(a))
    assert cone_sphere_tangency_residual(k, inscribed) < 1e-15
    # the other nappe counts too
    assert cone_sphere_tangency_residual(k, Sphere([0, 0, -d], d * math.sin(a))) < 1e-15
    eps = 1e-4
    moved = Sphere([0, 0, d + eps], d * math.sin(a))
    assert cone_sphere_tangency_residual(k, moved) == pytest.approx(eps * math.sin(a), rel=1e-3)
    with pytest.raises(DomainError):
        cone_sphere_tangency_residual(k, Sphere([0, 0, 0], 1.0))


@settings(max_examples=100, deadline=None)
@given(point, radius, st.floats(0.1, 2.0), st.tuples(coord, coord, coord), st.booleans())
def test_angle_cos_characterizes_tangency(c, r1, r2, direction, external):
    u = np.array(direction)
    if np.linalg.norm(u) < 1e-3 or abs(r1 - r2) < 1e-2:
        return
    u = u / np.linalg.norm(u)
    dist = r1 + r2 if external else abs(r1 - r2)
    s1, s2 = Sphere(c, r1), Sphere(c + dist * u, r2)
    kind = tangency_classify(s1, s2)
    assert kind is (Tangency.EXTERNAL if external else Tangency.INTERNAL)
    assert sphere_angle_cos(s1, s2) == pytest.approx(-kind.sign, abs=1e-9)


def test_domain_errors_on_construction():
    with pytest.raises(DomainError):
        Sphere([0, 0, 0], 0.0)
    with pytest.raises(DomainError):
        Cone([0, 0, 0], [0, 0, 1], math.pi / 2)
    with pytest.raises(DomainError):
        Circle3(XY, [0, 0, 1], 1.0)
