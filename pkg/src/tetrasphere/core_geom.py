"""Euclidean primitives and inversive-geometry utilities.

Points and directions are plain ``numpy`` arrays of shape ``(3,)``.  The
compound objects (spheres, planes, circles, cones, lines) are small frozen
dataclasses; every operation here is a pure function of its arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "GeometryError",
    "DomainError",
    "DegenerateError",
    "TheoremViolation",
    "Tolerance",
    "Sphere",
    "Plane",
    "Circle3",
    "Cone",
    "Line3",
    "Tangency",
    "vec",
    "unit",
    "orthonormal_pair",
    "plane_through",
    "power_of_point",
    "sphere_angle_cos",
    "tangency_classify",
    "tangency_residual",
    "invert",
    "radical_plane",
    "radical_axis",
    "plane_plane_intersection",
    "similitude_centers",
    "pencil_limit_points",
    "tangent_cone",
    "cone_sphere_tangency_residual",
    "circumcircle",
    "reflect_point",
]

UNIT_EPS = 1e-14


class GeometryError(ValueError):
    """Base class for geometric construction failures."""


class DomainError(GeometryError):
    """An argument lies outside the domain of an operation."""


class DegenerateError(GeometryError):
    """The configuration is degenerate for the requested construction."""


class TheoremViolation(GeometryError):
    """A construction that a theorem guarantees could not be realized.

    These are surfaced in verification reports, never swallowed.
    """


def vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(3)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise DegenerateError("cannot normalize a zero vector")
    return v / n


def orthonormal_pair(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``n`` to a right-handed orthonormal frame."""
    n = unit(n)
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = unit(np.cross(n, helper))
    e2 = np.cross(n, e1)
    return e1, e2


@dataclass(frozen=True)
class Tolerance:
    """Scale-aware tolerance.

    ``rel`` is dimensionless; a residual of physical dimension ``k`` (1 for
    lengths, 2 for areas and powers) passes when it is at most
    ``max(rel * scale**k, abs_floor)``.
    """

    rel: float = 1e-9
    abs_floor: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError("Tolerance.rel must be positive")
        if not self.scale > 0:
            raise ValueError("Tolerance.scale must be positive")

    def eff(self, k: int = 1) -> float:
        return max(self.rel * self.scale**k, self.abs_floor)

    @property
    def length(self) -> float:
        return self.eff(1)

    @property
    def area(self) -> float:
        return self.eff(2)

    def with_scale(self, scale: float) -> "Tolerance":
        return Tolerance(self.rel, self.abs_floor, scale)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Plane:
    """The unoriented plane ``{x : n.x = d}`` with ``|n| = 1``."""

    n: np.ndarray
    d: float

    def __post_init__(self):
        n = vec(self.n)
        norm = np.linalg.norm(n)
        if abs(norm - 1.0) > 1e-12:
            n = n / norm
            object.__setattr__(self, "d", float(self.d) / norm)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", float(self.d))

    @classmethod
    def from_point_normal(cls, point, normal) -> "Plane":
        n = unit(vec(normal))
        return cls(n, float(n @ vec(point)))

    def signed_distance(self, p) -> float:
        return float(self.n @ vec(p) - self.d)

    def project(self, p) -> np.ndarray:
        p = vec(p)
        return p - self.signed_distance(p) * self.n

    @property
    def origin(self) -> np.ndarray:
        return self.d * self.n

    def flipped(self) -> "Plane":
        return Plane(-self.n, -self.d)


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    r: float

    def __post_init__(self):
        object.__setattr__(self, "center", vec(self.center))
        object.__setattr__(self, "r", float(self.r))
        if not self.r > 0:
            raise DomainError(f"sphere radius must be positive, got {self.r}")

    def power(self, p) -> float:
        q = vec(p) - self.center
        return float(q @ q - self.r * self.r)


@dataclass(frozen=True)
class Circle3:
    """A circle lying in ``plane`` with the given center and radius."""

    plane: Plane
    center: np.ndarray
    r: float

    def __post_init__(self):
        object.__setattr__(self, "center", vec(self.center))
        object.__setattr__(self, "r", float(self.r))
        if not self.r > 0:
            raise DomainError(f"circle radius must be positive, got {self.r}")
        off = abs(self.plane.signed_distance(self.center))
        if off > 1e-9 * max(1.0, self.r, float(np.linalg.norm(self.center))):
            raise DomainError(f"circle center is {off:g} off its plane")

    def point(self, angle: float) -> np.ndarray:
        e1, e2 = orthonormal_pair(self.plane.n)
        return self.center + self.r * (math.cos(angle) * e1 + math.sin(angle) * e2)

    def diametral_sphere(self) -> Sphere:
        return Sphere(self.center, self.r)


@dataclass(frozen=True)
class Cone:
    """A double circular cone; ``half_angle`` is measured from the axis line."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, "apex", vec(self.apex))
        object.__setattr__(self, "axis", unit(vec(self.axis)))
        a = float(self.half_angle)
        if not 0.0 < a < math.pi / 2:
            raise DomainError(f"cone half-angle {a} outside (0, pi/2)")
        object.__setattr__(self, "half_angle", a)

    def quadratic_form(self) -> np.ndarray:
        """Matrix ``M`` with ``(x-apex) M (x-apex) = 0`` on the cone."""
        c2 = math.cos(self.half_angle) ** 2
        return np.outer(self.axis, self.axis) - c2 * np.eye(3)

    def contains_line(self, direction) -> float:
        """Angular residual of a line through the apex against the cone."""
        u = unit(vec(direction))
        cosang = min(1.0, abs(float(u @ self.axis)))
        return abs(math.acos(cosang) - self.half_angle)


@dataclass(frozen=True)
class Line3:
    point: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", vec(self.point))
        object.__setattr__(self, "dir", unit(vec(self.dir)))

    def distance(self, p) -> float:
        q = vec(p) - self.point
        return float(np.linalg.norm(q - (q @ self.dir) * self.dir))


class Tangency(enum.Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"
    NOT_TANGENT = "not_tangent"

    @property
    def sign(self) -> int:
        if self is Tangency.EXTERNAL:
            return 1
        if self is Tangency.INTERNAL:
            return -1
        raise DomainError("no tangency sign for NOT_TANGENT")


def plane_through(p0, p1, p2) -> Plane:
    p0, p1, p2 = vec(p0), vec(p1), vec(p2)
    n = np.cross(p1 - p0, p2 - p0)
    if np.linalg.norm(n) < 1e-300:
        raise DegenerateError("collinear points do not span a plane")
    return Plane.from_point_normal(p0, n)


def reflect_point(p, plane: Plane) -> np.ndarray:
    p = vec(p)
    return p - 2.0 * plane.signed_distance(p) * plane.n


def circumcircle(p0, p1, p2) -> Circle3:
    """Circle through three points in space."""
    p0, p1, p2 = vec(p0), vec(p1), vec(p2)
    a = p1 - p0
    b = p2 - p0
    axb = np.cross(a, b)
    denom = 2.0 * (axb @ axb)
    if denom < 1e-300:
        raise DegenerateError("collinear points have no circumcircle")
    offset = (np.cross(axb, a) * (b @ b) + np.cross(b, axb) * (a @ a)) / denom
    center = p0 + offset
    return Circle3(Plane.from_point_normal(p0, axb), center, float(np.linalg.norm(offset)))


def power_of_point(p, s: Union[Sphere, Circle3], tol: Tolerance = DEFAULT_TOL) -> float:
    """``|p - center|^2 - r^2``.

    For a circle the point must already lie in the carrier plane; nothing is
    projected on the caller's behalf.
    """
    p = vec(p)
    if isinstance(s, Circle3):
        off = abs(s.plane.signed_distance(p))
        if off > tol.length:
            raise DomainError(f"point is {off:g} off the circle's plane")
    q = p - s.center
    return float(q @ q - s.r * s.r)


def sphere_angle_cos(s1: Sphere, s2: Sphere) -> float:
    """Cosine of the angle between two spheres; may exceed 1 in magnitude."""
    dist2 = float(np.sum((s1.center - s2.center) ** 2))
    return (s1.r**2 + s2.r**2 - dist2) / (2.0 * s1.r * s2.r)


def tangency_residual(s1: Sphere, s2: Union[Sphere, Plane]) -> tuple[float, float]:
    """(external gap, internal gap) as signed lengths.

    For a plane the two entries coincide: ``|signed distance| - r``.
    """
    if isinstance(s2, Plane):
        g = abs(s2.signed_distance(s1.center)) - s1.r
        return g, g
    dist = float(np.linalg.norm(s1.center - s2.center))
    return dist - (s1.r + s2.r), dist - abs(s1.r - s2.r)


def tangency_classify(
    s1: Sphere, s2: Union[Sphere, Plane], tol: Tolerance = DEFAULT_TOL
) -> Tangency:
    """Classify the contact of ``s1`` with a sphere or a plane.

    Against a plane, EXTERNAL means the sphere sits on the side the normal
    points to and INTERNAL the opposite side.
    """
    if isinstance(s2, Plane):
        h = s2.signed_distance(s1.center)
        if abs(abs(h) - s1.r) > tol.length:
            return Tangency.NOT_TANGENT
        return Tangency.EXTERNAL if h > 0 else Tangency.INTERNAL
    ext, inn = tangency_residual(s1, s2)
    is_ext = abs(ext) <= tol.length
    is_int = abs(inn) <= tol.length
    if is_ext and is_int:
        raise DegenerateError("tangency type is ambiguous for a vanishing radius")
    if is_ext:
        return Tangency.EXTERNAL
    if is_int:
        return Tangency.INTERNAL
    return Tangency.NOT_TANGENT


def invert(center, k: float, obj, tol: Tolerance = DEFAULT_TOL):
    """Inversion ``x -> center + k (x - center) / |x - center|^2``.

    ``k`` may be negative.  Spheres through the center become planes and
    planes missing the center become spheres through it.
    """
    c = vec(center)
    if k == 0:
        raise DomainError("inversion power must be nonzero")
    if isinstance(obj, Sphere):
        w = obj.center - c
        p = float(w @ w) - obj.r**2
        if abs(p) <= tol.length * max(obj.r, 1e-300) * 2.0:
            # sphere through the center
            n = unit(w)
            return Plane(n, float(n @ c) + k / (2.0 * obj.r))
        return Sphere(c + (k / p) * w, abs(k) * obj.r / abs(p))
    if isinstance(obj, Plane):
        h = obj.d - float(obj.n @ c)
        if abs(h) <= tol.length:
            return obj
        return Sphere(c + (k / (2.0 * h)) * obj.n, abs(k) / (2.0 * abs(h)))
    x = vec(obj)
    w = x - c
    w2 = float(w @ w)
    if w2 == 0.0:
        raise DomainError("the inversion center has no finite image")
    return c + (k / w2) * w


def radical_plane(s1: Sphere, s2: Sphere) -> Plane:
    w = s2.center - s1.center
    if np.linalg.norm(w) == 0.0:
        raise DegenerateError("concentric spheres have no radical plane")
    rhs = float(s2.center @ s2.center - s2.r**2 - s1.center @ s1.center + s1.r**2)
    return Plane(2.0 * w, rhs)


def plane_plane_intersection(p1: Plane, p2: Plane) -> Line3:
    direction = np.cross(p1.n, p2.n)
    s = float(np.linalg.norm(direction))
    if s < 1e-14:
        raise DegenerateError("parallel planes do not meet in a line")
    # point minimizing |x| on both planes
    m = np.vstack([p1.n, p2.n, direction])
    point = np.linalg.solve(m, np.array([p1.d, p2.d, 0.0]))
    return Line3(point, direction)


def radical_axis(c1: Circle3, c2: Circle3, tol: Tolerance = DEFAULT_TOL) -> Line3:
    if abs(abs(float(c1.plane.n @ c2.plane.n)) - 1.0) > 1e-12 or abs(
        c1.plane.signed_distance(c2.center)
    ) > tol.length:
        raise DomainError("radical_axis needs coplanar circles")
    rp = radical_plane(c1.diametral_sphere(), c2.diametral_sphere())
    return plane_plane_intersection(c1.plane, rp)


def similitude_centers(s1: Sphere, s2: Sphere) -> tuple[np.ndarray | None, np.ndarray]:
    """(external, internal) centers of similitude.

    The external center is ``None`` for equal radii (it is at infinity).
    """
    if np.linalg.norm(s1.center - s2.center) == 0.0 and s1.r == s2.r:
        raise DegenerateError("identical spheres")
    internal = (s2.r * s1.center + s1.r * s2.center) / (s1.r + s2.r)
    if s1.r == s2.r:
        return None, internal
    external = (s2.r * s1.center - s1.r * s2.center) / (s2.r - s1.r)
    return external, internal


def pencil_limit_points(
    s1: Sphere, s2: Sphere, tol: Tolerance = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray] | None:
    """Limit points of the coaxial pencil spanned by two spheres.

    Returns ``None`` when the spheres intersect (the limit points are
    imaginary).  Tangent spheres give a doubled point.
    """
    w = s2.center - s1.center
    dist = float(np.linalg.norm(w))
    if dist == 0.0:
        raise DegenerateError("concentric spheres span no pencil with limit points")
    u = w / dist
    t0 = (dist**2 + s1.r**2 - s2.r**2) / (2.0 * dist)
    disc = t0 * t0 - s1.r**2
    if disc < -tol.area:
        return None
    h = math.sqrt(max(disc, 0.0))
    return s1.center + (t0 - h) * u, s1.center + (t0 + h) * u


def tangent_cone(s1: Sphere, s2: Sphere, internal: bool = False) -> Cone:
    """Common tangent cone of two spheres with apex at a similitude center."""
    ext, inn = similitude_centers(s1, s2)
    if internal:
        apex = inn
    else:
        if ext is None:
            raise DegenerateError("equal radii: the external tangent cone is a cylinder")
        apex = ext
    w = s1.center - apex
    dist = float(np.linalg.norm(w))
    if dist <= s1.r or np.linalg.norm(s2.center - apex) <= s2.r:
        raise DegenerateError("cone apex lies inside one of the spheres")
    return Cone(apex, w / dist, math.asin(s1.r / dist))


def cone_sphere_tangency_residual(k: Cone, s: Sphere) -> float:
    """Gap of a sphere against the nearer-touching nappe of a double cone.

    For each nappe the distance from the center to that half-cone surface is
    compared with ``r``; the smaller absolute mismatch is returned.  A sphere
    touching one nappe may still cut the other one.
    """
    w = s.center - k.apex
    dist = float(np.linalg.norm(w))
    if dist == 0.0:
        raise DomainError("sphere centered at the cone apex")
    best = math.inf
    for axis in (k.axis, -k.axis):
        theta = math.atan2(float(np.linalg.norm(np.cross(w, axis))), float(w @ axis))
        gap = abs(theta - k.half_angle)
        surface = dist * math.sin(gap) if gap < math.pi / 2 else dist
        best = min(best, abs(surface - s.r))
    return best
