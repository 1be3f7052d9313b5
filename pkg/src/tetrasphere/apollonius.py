"""Tangency solvers: spheres of a pencil touching a sphere, planar Apollonius
circles, a stereographic chart of the unit sphere and the spherical Hart
(Feuerbach) circle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core_geom import (
    DEFAULT_TOL,
    DegenerateError,
    DomainError,
    Circle3,
    Plane,
    Sphere,
    Tangency,
    TheoremViolation,
    Tolerance,
    orthonormal_pair,
    tangency_classify,
    unit,
    vec,
)


@dataclass(frozen=True)
class Circle2:
    center: np.ndarray
    r: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(2))
        object.__setattr__(self, "r", float(self.r))
        if not self.r > 0:
            raise DomainError("circle radius must be positive")


@dataclass(frozen=True)
class Line2:
    """Degenerate chart image of a circle through the projection pole."""

    point: np.ndarray
    dir: np.ndarray


@dataclass(frozen=True)
class SphericalCircle:
    """Circle ``{x : |x| = 1, x . pole = cos(rho)}`` on the unit sphere."""

    pole: np.ndarray
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "pole", unit(vec(self.pole)))
        rho = float(self.rho)
        if not 0.0 < rho < math.pi:
            raise DomainError(f"angular radius {rho} outside (0, pi)")
        object.__setattr__(self, "rho", rho)

    def reoriented(self) -> "SphericalCircle":
        """Same point set described from the opposite pole."""
        return SphericalCircle(-self.pole, math.pi - self.rho)

    def reflected(self) -> "SphericalCircle":
        """Image under the central symmetry ``x -> -x``."""
        return SphericalCircle(-self.pole, self.rho)

    def canonical(self) -> "SphericalCircle":
        """Same point set, with ``rho <= pi/2``."""
        return self.reoriented() if self.rho > math.pi / 2 else self

    def points(self, n: int = 3, phase: float = 0.0) -> np.ndarray:
        e1, e2 = orthonormal_pair(self.pole)
        ang = phase + 2.0 * math.pi * np.arange(n) / n
        ring = np.outer(np.cos(ang), e1) + np.outer(np.sin(ang), e2)
        return math.cos(self.rho) * self.pole + math.sin(self.rho) * ring


def spherical_tangency_residual(c1: SphericalCircle, c2: SphericalCircle) -> float:
    """Angular gap between two circles regarded as point sets.

    Zero iff they touch; both orientations of the second circle are tried.
    """
    best = math.inf
    for other in (c2, c2.reoriented()):
        theta = math.acos(max(-1.0, min(1.0, float(c1.pole @ other.pole))))
        best = min(best, abs(theta - (c1.rho + other.rho)), abs(theta - abs(c1.rho - other.rho)))
    return best


def great_circle_tangency_residual(c: SphericalCircle, pole) -> float:
    """Gap between ``c`` and the great circle with the given pole."""
    c = c.canonical()
    dist = abs(math.asin(max(-1.0, min(1.0, float(c.pole @ unit(vec(pole)))))))
    return abs(dist - c.rho)


# -- tangency classes --------------------------------------------------------

TangencyClass = int  # +1 or -1


def _contact_sign(x: Union[Sphere, Plane], ref: Union[Sphere, Plane], tol: Tolerance) -> int:
    if isinstance(x, Plane) and isinstance(ref, Plane):
        raise DomainError("class of a plane against a plane is undefined")
    if isinstance(x, Plane):
        kind = tangency_classify(ref, x, tol)
        if kind is Tangency.NOT_TANGENT:
            raise DomainError("object is not tangent to a reference")
        return kind.sign
    kind = tangency_classify(x, ref, tol)
    if kind is Tangency.NOT_TANGENT:
        raise DomainError("object is not tangent to a reference")
    return kind.sign


def m_class(
    x: Union[Sphere, Plane], ref1: Union[Sphere, Plane], ref2: Union[Sphere, Plane], tol: Tolerance = DEFAULT_TOL
) -> TangencyClass:
    """Product of the contact signs of ``x`` with two references.

    External contact counts +1 and internal -1.  A plane, as reference or as
    member, contributes the side of the plane the sphere lies on (the side
    of its normal is +1); the labels flip with the plane's orientation but
    the two-class partition does not.
    """
    return _contact_sign(x, ref1, tol) * _contact_sign(x, ref2, tol)


# -- spheres through a circle ------------------------------------------------


def spheres_through_circle_tangent_to(
    c: Circle3, s: Sphere, tol: Tolerance = DEFAULT_TOL
) -> list[tuple[Union[Sphere, Plane], TangencyClass]]:
    """Members of the pencil of spheres through ``c`` that touch ``s``.

    Pencil member ``t`` has center ``O + t n`` and radius ``sqrt(r^2 + t^2)``.
    Tangency reads ``L(t) = +-2 r_s rho(t)`` with ``L`` linear in ``t``;
    squaring once gives a quadratic whose roots are labelled by the sign of
    ``L`` (positive: external).  The carrier plane itself is reported when
    it touches ``s``.
    """
    n = c.plane.n
    w = c.center - s.center
    p = float(w @ w) - c.r**2 - s.r**2
    q = 2.0 * float(n @ w)
    a2 = q * q - 4.0 * s.r**2
    a1 = 2.0 * p * q
    a0 = p * p - 4.0 * s.r**2 * c.r**2
    scale = max(c.r, s.r, float(np.linalg.norm(w)))
    roots: list[float] = []
    if abs(a2) <= 1e-12 * scale**2:
        if abs(a1) > 0:
            roots.append(-a0 / a1)
    else:
        disc = a1 * a1 - 4.0 * a2 * a0
        if disc >= 0:
            sq = math.sqrt(disc)
            # numerically stable pair
            qq = -0.5 * (a1 + math.copysign(sq, a1))
            if qq != 0:
                roots.extend([qq / a2, a0 / qq])
            else:
                roots.append(0.0)
        elif disc > -1e-12 * (a1 * a1 + abs(4 * a2 * a0)):
            roots.append(-a1 / (2 * a2))
    out: list[tuple[Union[Sphere, Plane], TangencyClass]] = []
    for t in roots:
        cand = Sphere(c.center + t * n, math.sqrt(c.r**2 + t * t))
        kind = tangency_classify(cand, s, Tolerance(1e-7, 0.0, scale))
        if kind is Tangency.NOT_TANGENT:
            continue
        out.append((cand, kind.sign))
    plane_kind = tangency_classify(s, c.plane, Tolerance(1e-9, 0.0, scale))
    if plane_kind is not Tangency.NOT_TANGENT:
        out.append((c.plane, plane_kind.sign))
    return out


# -- planar Apollonius -------------------------------------------------------


def planar_apollonius(
    c1: Circle2, c2: Circle2, c3: Circle2, signs=(1, 1, 1), tol: Tolerance = DEFAULT_TOL
) -> list[Circle2]:
    """Circles with ``|X - c_i| = |rho + s_i r_i|`` for the given signs.

    ``s_i = +1`` asks for external contact and ``-1`` for internal.
    Subtracting the squared equations pairwise leaves two linear equations in
    ``(x, y, rho)``; two unknowns are eliminated through the best-conditioned
    2x2 block and the first equation becomes a quadratic in the third.
    """
    cs = [c1, c2, c3]
    for a, b in itertools.combinations(cs, 2):
        if np.allclose(a.center, b.center) and abs(a.r - b.r) <= tol.length:
            raise DomainError("coincident circles")
    sr = [s * c.r for s, c in zip(signs, cs)]
    x1, y1 = cs[0].center
    rows, rhs = [], []
    for c, s in zip(cs[1:], sr[1:]):
        xi, yi = c.center
        # 2(xi-x1) x + 2(yi-y1) y + 2(s_i - s_1) rho = |ci|^2 - |c1|^2 - s_i^2 + s_1^2
        rows.append([2 * (xi - x1), 2 * (yi - y1), 2 * (s - sr[0])])
        rhs.append(xi * xi + yi * yi - x1 * x1 - y1 * y1 - s * s + sr[0] ** 2)
    m = np.array(rows)
    b = np.array(rhs)
    best = None
    for free in (2, 1, 0):
        keep = [j for j in range(3) if j != free]
        block = m[:, keep]
        cond = np.linalg.cond(block)
        if best is None or cond < best[0]:
            best = (cond, free, keep, block)
    cond, free, keep, block = best
    if not np.isfinite(cond) or cond > 1e12:
        raise DegenerateError("degenerate Apollonius configuration")
    # unknowns[keep] = u0 + u1 * unknowns[free]
    u0 = np.linalg.solve(block, b)
    u1 = np.linalg.solve(block, -m[:, free])

    def unpack(z: float) -> np.ndarray:
        vals = np.empty(3)
        vals[free] = z
        vals[keep] = u0 + u1 * z
        return vals

    # first equation: (x - x1)^2 + (y - y1)^2 - (rho + s1)^2 = 0, quadratic in z
    v0 = unpack(0.0)
    v1 = unpack(1.0) - v0
    d0 = np.array([v0[0] - x1, v0[1] - y1, v0[2] + sr[0]])
    quad_a = v1[0] ** 2 + v1[1] ** 2 - v1[2] ** 2
    quad_b = 2 * (d0[0] * v1[0] + d0[1] * v1[1] - d0[2] * v1[2])
    quad_c = d0[0] ** 2 + d0[1] ** 2 - d0[2] ** 2
    zs = _quadratic_roots(quad_a, quad_b, quad_c)
    out = []
    scale = max(1.0, max(float(np.linalg.norm(c.center)) + c.r for c in cs))
    for z in zs:
        x, y, rho = unpack(z)
        if not rho > 0:
            continue
        cand = Circle2((x, y), rho)
        res = max(
            abs(float(np.linalg.norm(cand.center - c.center)) - abs(rho + s))
            for c, s in zip(cs, sr)
        )
        if res <= max(tol.length, 1e-9 * scale):
            out.append(cand)
    return out


def _quadratic_roots(a: float, b: float, c: float) -> list[float]:
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        return []
    if abs(a) <= 1e-14 * scale:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        if disc > -1e-12 * (b * b + abs(4 * a * c)):
            return [-b / (2 * a)]
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0:
        return [0.0]
    return [q / a, c / q]


def circle_through(p0, p1, p2) -> Circle2:
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
    a = p1 - p0
    b = p2 - p0
    det = 2.0 * (a[0] * b[1] - a[1] * b[0])
    if abs(det) < 1e-300:
        raise DegenerateError("collinear points")
    aa, bb = a @ a, b @ b
    ux = (b[1] * aa - a[1] * bb) / det
    uy = (a[0] * bb - b[0] * aa) / det
    off = np.array([ux, uy])
    return Circle2(p0 + off, float(np.linalg.norm(off)))


# -- stereographic chart -----------------------------------------------------


class Stereographic:
    """Projection of the unit sphere from ``pole`` onto the plane through the
    origin orthogonal to it."""

    def __init__(self, pole):
        self.pole = unit(vec(pole))
        self.e1, self.e2 = orthonormal_pair(self.pole)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = x @ self.pole
        denom = 1.0 - h
        return np.stack([x @ self.e1, x @ self.e2], axis=-1) / np.expand_dims(denom, -1)

    def inverse(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        big_q = np.expand_dims(q[..., 0], -1) * self.e1 + np.expand_dims(q[..., 1], -1) * self.e2
        n2 = np.sum(q * q, axis=-1, keepdims=True)
        return (2.0 * big_q + (n2 - 1.0) * self.pole) / (n2 + 1.0)

    def to_chart(self, c: SphericalCircle, tol: float = 1e-9) -> Union[Circle2, Line2]:
        if abs(float(self.pole @ c.pole) - math.cos(c.rho)) <= tol:
            pts = self.forward(c.points(4, phase=0.3))
            # drop any point near the pole
            good = pts[np.all(np.isfinite(pts), axis=1)]
            good = good[np.argsort(np.linalg.norm(good, axis=1))][:2]
            return Line2(good[0], unit(np.append(good[1] - good[0], 0.0))[:2])
        pts = self.forward(c.points(3))
        return circle_through(*pts)

    def from_chart(self, c: Circle2) -> SphericalCircle:
        ang = 2.0 * math.pi * np.arange(3) / 3 + 0.1
        pts2 = c.center + c.r * np.column_stack([np.cos(ang), np.sin(ang)])
        pts = self.inverse(pts2)
        m = np.cross(pts[1] - pts[0], pts[2] - pts[0])
        m = unit(m)
        h = float(m @ pts[0])
        if h < 0:
            m, h = -m, -h
        return SphericalCircle(m, math.acos(min(1.0, h)))


def fibonacci_sphere(n: int = 92) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    rr = np.sqrt(1.0 - z * z)
    return np.column_stack([rr * np.cos(phi), rr * np.sin(phi), z])


def _distance_to_circle(x: np.ndarray, c: SphericalCircle) -> np.ndarray:
    theta = np.arccos(np.clip(x @ c.pole, -1.0, 1.0))
    return np.abs(theta - c.rho)


def best_chart_pole(circles, exclude=()) -> np.ndarray:
    """Sample point farthest (in min angular distance) from all circles."""
    cand = fibonacci_sphere(92)
    score = np.full(len(cand), np.inf)
    for c in circles:
        score = np.minimum(score, _distance_to_circle(cand, c))
    for p in exclude:
        score = np.minimum(score, np.arccos(np.clip(cand @ unit(vec(p)), -1.0, 1.0)))
    return cand[int(np.argmax(score))]


# -- Hart circle -------------------------------------------------------------


@dataclass
class HartCandidate:
    circle: SphericalCircle
    residual: float  # max tangency gap against all four circles
    signs: tuple[int, int, int]


def hart_circles(
    inscribed, side_poles=(), tol: float = 1e-7, pole=None
) -> list[HartCandidate]:
    """Spherical circles touching all four given circles.

    Three of the circles are solved in a stereographic chart over all eight
    sign patterns and the candidates filtered by their contact with the
    fourth.  Great circles matching ``side_poles`` (the triangle sides, which
    trivially touch all four) are dropped.  Candidates are deduplicated and
    sorted by residual.
    """
    inscribed = list(inscribed)
    if len(inscribed) != 4:
        raise DomainError("need four circles")
    if pole is None:
        pole = best_chart_pole(inscribed)
    chart = Stereographic(pole)
    planar = [chart.to_chart(c) for c in inscribed[:3]]
    if any(isinstance(c, Line2) for c in planar):
        raise DegenerateError("chart pole lies on an input circle")
    found: list[HartCandidate] = []
    for signs in itertools.product((1, -1), repeat=3):
        try:
            sols = planar_apollonius(*planar, signs=signs, tol=Tolerance(1e-6))
        except DegenerateError:
            continue
        for sol in sols:
            sc = chart.from_chart(sol).canonical()
            res = max(spherical_tangency_residual(sc, c) for c in inscribed)
            if any(
                abs(sc.rho - math.pi / 2) < 1e-6 and abs(abs(float(sc.pole @ unit(vec(sp)))) - 1) < 1e-9
                for sp in side_poles
            ):
                continue
            if any(_same_circle(sc, f.circle) for f in found):
                continue
            found.append(HartCandidate(sc, res, signs))
    found.sort(key=lambda h: h.residual)
    return found


def _same_circle(a: SphericalCircle, b: SphericalCircle, tol: float = 1e-6) -> bool:
    a, b = a.canonical(), b.canonical()
    if abs(a.rho - math.pi / 2) < tol and abs(b.rho - math.pi / 2) < tol:
        return abs(abs(float(a.pole @ b.pole)) - 1.0) < tol
    return abs(a.rho - b.rho) < tol and float(a.pole @ b.pole) > 1 - tol


def hart_circle(inscribed, side_poles=(), tol: float = 1e-7, pole=None) -> SphericalCircle:
    """The best Hart candidate; raises when none touches the fourth circle."""
    cands = hart_circles(inscribed, side_poles, tol, pole)
    good = [c for c in cands if c.residual <= tol]
    if not good:
        best = cands[0].residual if cands else math.inf
        raise TheoremViolation(f"no circle touches all four (best residual {best:g})")
    return good[0].circle
