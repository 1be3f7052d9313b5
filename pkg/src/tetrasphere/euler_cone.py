"""Trihedral-angle geometry at a tetrahedron vertex.

Everything is expressed on the unit sphere around the apex: edges become
points, face planes become great circles, tangent spheres become small
circles and circular cones through the apex become small circles too.
Lines through the apex are identified with antipodal point pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .apollonius import SphericalCircle, hart_circles
from .core_geom import (
    Cone,
    DegenerateError,
    DomainError,
    Plane,
    TheoremViolation,
    cone_sphere_tangency_residual,
    unit,
    vec,
)
from .tetra_spheres import SignVector, TangentSphereSet, Tetrahedron, tangent_spheres

__all__ = [
    "TrihedralAngle",
    "SphericalTriangle",
    "FootSet",
    "PseudoAltitudes",
    "FeetCone",
    "EulerCone",
    "EulerPlane",
    "spherical_excess",
    "project_from_vertex",
    "hart_euler_cone",
    "mediator",
    "pseudo_altitudes",
    "pseudo_altitude_stability",
    "circumscribed_cone",
    "foot_set",
    "six_feet_cone",
    "euler_plane_check",
    "cone_agreement",
    "coplanarity_residual",
    "VertexCheck",
    "verify_vertex",
]


# -- types -------------------------------------------------------------------


@dataclass(frozen=True)
class TrihedralAngle:
    apex: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "apex", vec(self.apex))
        for name in ("e1", "e2", "e3"):
            object.__setattr__(self, name, unit(vec(getattr(self, name))))
        if abs(np.linalg.det(np.array([self.e1, self.e2, self.e3]))) <= 1e-9:
            raise DegenerateError("trihedral edges are coplanar")

    @classmethod
    def from_tetrahedron(cls, t: Tetrahedron, v: int) -> "TrihedralAngle":
        apex = t.vertices[v]
        e = [t.vertices[j] - apex for j in range(4) if j != v]
        return cls(apex, *e)

    def triangle(self) -> "SphericalTriangle":
        return SphericalTriangle(self.e1, self.e2, self.e3)


def spherical_excess(a, b, c) -> float:
    """Area of the spherical triangle with unit vertices ``a, b, c``.

    L'Huilier's formula in the side lengths.
    """
    sa = _arc(b, c)
    sb = _arc(a, c)
    sc = _arc(a, b)
    s = 0.5 * (sa + sb + sc)
    prod = (
        math.tan(0.5 * s)
        * math.tan(0.5 * (s - sa))
        * math.tan(0.5 * (s - sb))
        * math.tan(0.5 * (s - sc))
    )
    return 4.0 * math.atan(math.sqrt(max(prod, 0.0)))


def _arc(p, q) -> float:
    # atan2 form keeps precision for nearly equal or antipodal points
    return math.atan2(float(np.linalg.norm(np.cross(p, q))), float(p @ q))


@dataclass(frozen=True)
class SphericalTriangle:
    """Unit points ``a, b, c``; side ``i`` is the great circle opposite vertex ``i``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, unit(vec(getattr(self, name))))
        d = float(np.linalg.det(self.matrix))
        if abs(d) <= 1e-12:
            raise DegenerateError("spherical triangle vertices lie on a great circle")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @property
    def vertices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.a, self.b, self.c

    @property
    def poles(self) -> np.ndarray:
        """Unit normals of the side planes, pointing toward the opposite vertex."""
        out = []
        for i in range(3):
            p, q = (v for j, v in enumerate(self.vertices) if j != i)
            n = unit(np.cross(p, q))
            out.append(n if n @ self.vertices[i] > 0 else -n)
        return np.array(out)

    @property
    def excess(self) -> float:
        return spherical_excess(self.a, self.b, self.c)

    @property
    def interior_direction(self) -> np.ndarray:
        return unit(self.a + self.b + self.c)

    def rotated(self, k: int) -> "SphericalTriangle":
        v = self.vertices
        return SphericalTriangle(v[k % 3], v[(k + 1) % 3], v[(k + 2) % 3])

    def side_point(self, i: int, phi: float) -> np.ndarray:
        """Point at angle ``phi`` along side ``i``, from its first endpoint."""
        p, q = (v for j, v in enumerate(self.vertices) if j != i)
        return _gc_point(p, q, phi)

    def region_sign_count(self, x) -> int:
        """Number of side planes with ``x`` on the far side from the triangle."""
        return int(sum(float(n @ x) < 0 for n in self.poles))


def _gc_point(p, q, phi: float) -> np.ndarray:
    w = unit(q - (q @ p) * p)
    return math.cos(phi) * p + math.sin(phi) * w


@dataclass
class FootSet:
    """Three mediator feet and three pseudo-altitude feet, all unit vectors.

    Foot ``i`` of each triple lies on side ``i`` (opposite vertex ``i``).
    """

    mediators: np.ndarray
    pseudo: np.ndarray
    poles: np.ndarray

    def on_side_residual(self) -> float:
        return float(
            max(
                np.max(np.abs(np.sum(self.mediators * self.poles, axis=1))),
                np.max(np.abs(np.sum(self.pseudo * self.poles, axis=1))),
            )
        )

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.mediators, self.pseudo])


# -- projection of the tangent spheres ---------------------------------------


def _canonical_region(c: SphericalCircle, tri: SphericalTriangle) -> SphericalCircle:
    # Homothetic spheres on opposite sides of the apex project to circles
    # related by x -> -x; keep the copy that lies in the triangle's region
    # or one of the three adjacent ones.
    return c if tri.region_sign_count(c.pole) <= 1 else c.reflected()


def project_from_vertex(
    t: Tetrahedron, v: int, ts: TangentSphereSet, tol: float = 1e-10
) -> tuple[SphericalTriangle, list[SphericalCircle], dict[SignVector, int]]:
    """Central projection of the tangent spheres onto the unit sphere at vertex ``v``.

    Returns the spherical triangle of the edges, the distinct projected
    circles and the index of the circle each sphere maps to.
    """
    apex = t.vertices[v]
    tri = TrihedralAngle.from_tetrahedron(t, v).triangle()
    circles: list[SphericalCircle] = []
    owner: dict[SignVector, int] = {}
    for eps, s in ts.spheres.items():
        w = s.center - apex
        dist = float(np.linalg.norm(w))
        if dist <= s.r * (1 + 1e-12):
            raise DomainError("tangent sphere contains the vertex; projection undefined")
        c = _canonical_region(SphericalCircle(w / dist, math.asin(s.r / dist)), tri)
        for k, other in enumerate(circles):
            if float(np.linalg.norm(other.pole - c.pole)) <= tol and abs(other.rho - c.rho) <= tol:
                owner[eps] = k
                break
        else:
            owner[eps] = len(circles)
            circles.append(c)
    return tri, circles, owner


# -- Hart circle as a cone ------------------------------------------------------


@dataclass
class EulerCone:
    cone: Cone
    hart: SphericalCircle
    residuals: dict[SignVector, float]
    hart_residual: float
    flags: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _cone_from_circle(apex, c: SphericalCircle) -> Cone:
    c = c.canonical()
    if abs(c.rho - math.pi / 2) < 1e-12:
        raise DegenerateError("great circle does not define a proper cone")
    return Cone(apex, c.pole, c.rho)


def hart_euler_cone(t: Tetrahedron, v: int, ts: TangentSphereSet, tol: float = 1e-7) -> EulerCone:
    """Cone at vertex ``v`` touching all tangent spheres, via the Hart circle.

    Raises ``TheoremViolation`` when no circle touches the four projections.
    """
    tri, circles, _ = project_from_vertex(t, v, ts)
    if len(circles) != 4:
        raise DegenerateError(f"expected 4 projected circles, got {len(circles)}")
    cands = hart_circles(circles, tri.poles, tol=tol)
    if not cands or cands[0].residual > tol:
        best = cands[0].residual if cands else math.inf
        raise TheoremViolation(f"no Hart circle at vertex {v} (best residual {best:g})")
    flags = []
    if len([c for c in cands if c.residual <= tol]) > 1:
        flags.append("hart-ambiguous")
    hart = cands[0].circle
    cone = _cone_from_circle(t.vertices[v], hart)
    res = {eps: cone_sphere_tangency_residual(cone, s) for eps, s in ts.spheres.items()}
    return EulerCone(cone, hart, res, cands[0].residual, flags)


# -- mediators ----------------------------------------------------------------


def mediator(tri: SphericalTriangle, i: int, tol: float = 1e-12) -> tuple[Plane, np.ndarray, float]:
    """Cevian from vertex ``i`` splitting the excess in half.

    Returns the plane through the apex, the foot on side ``i`` and the
    final excess imbalance.  The sub-triangle excess grows monotonically
    with the foot parameter, so a bracketing root finder suffices.
    """
    v = tri.vertices[i]
    p, q = (x for j, x in enumerate(tri.vertices) if j != i)
    side = _arc(p, q)
    total = tri.excess

    def split(phi: float) -> float:
        f = _gc_point(p, q, phi)
        return spherical_excess(v, p, f) - spherical_excess(v, f, q)

    phi = brentq(split, 0.0, side, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    foot = _gc_point(p, q, phi)
    imbalance = abs(split(phi))
    if imbalance > max(tol, 1e-12 * max(total, 1.0)) and imbalance > 1e-12:
        raise TheoremViolation(f"mediator imbalance {imbalance:g}")
    return Plane(unit(np.cross(v, foot)), 0.0), foot, imbalance


# -- pseudo-altitudes ---------------------------------------------------------


def coplanarity_residual(x1, x2, x3, x4) -> float:
    """Determinant that vanishes when four points lie in one plane."""
    return float(np.linalg.det(np.array([x2 - x1, x3 - x1, x4 - x1])))


def _system(tri: SphericalTriangle, x) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    a, b, c = tri.vertices
    ha = _gc_point(b, c, x[0])
    hb = _gc_point(a, c, x[1])
    hc = _gc_point(a, b, x[2])
    f = np.array(
        [
            coplanarity_residual(a, b, ha, hb),
            coplanarity_residual(a, c, ha, hc),
            coplanarity_residual(b, c, hb, hc),
        ]
    )
    return f, (ha, hb, hc)


def _angles(tri: SphericalTriangle, h) -> np.ndarray:
    a, b, c = tri.vertices
    out = []
    for p, q, x in ((b, c, h[0]), (a, c, h[1]), (a, b, h[2])):
        w = unit(q - (q @ p) * p)
        out.append(math.atan2(float(x @ w), float(x @ p)))
    return np.array(out)


def _newton(tri: SphericalTriangle, x, iters: int = 50, target: float = 1e-15):
    x = np.array(x, dtype=float)
    f, _ = _system(tri, x)
    step = 1e-7
    for _ in range(iters):
        if np.max(np.abs(f)) <= target:
            break
        jac = np.empty((3, 3))
        for k in range(3):
            e = np.zeros(3)
            e[k] = step
            jac[:, k] = (_system(tri, x + e)[0] - _system(tri, x - e)[0]) / (2 * step)
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        x_new = x + dx
        f_new, _ = _system(tri, x_new)
        if np.max(np.abs(f_new)) >= np.max(np.abs(f)) and np.max(np.abs(f)) < 1e-13:
            break
        x, f = x_new, f_new
    return x, float(np.max(np.abs(f)))


def _second_on_gc(m: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Second intersection with the great circle ``cos t a + sin t w`` of the
    circles through ``a`` whose planes have normals ``m`` (one per row)."""
    psi = 2.0 * np.arctan2(m @ w, m @ a)
    return np.outer(np.cos(psi), a) + np.outer(np.sin(psi), w)


def _scan_seeds(tri: SphericalTriangle, n: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    # Moving h_a along side a fixes h_b and h_c through the first two
    # quadruples; the third quadruple leaves one equation in one angle.
    a, b, c = tri.vertices
    w_bc = unit(c - (c @ b) * b)
    w_ac = unit(c - (c @ a) * a)
    w_ab = unit(b - (b @ a) * a)
    phi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False) + 0.5 * math.pi / n

    def triple(ph):
        ph = np.atleast_1d(ph)
        ha = np.outer(np.cos(ph), b) + np.outer(np.sin(ph), w_bc)
        hb = _second_on_gc(np.cross(b - a, ha - a), a, w_ac)
        hc = _second_on_gc(np.cross(c - a, ha - a), a, w_ab)
        return ha, hb, hc

    def g(ph):
        _, hb, hc = triple(ph)
        return np.einsum("j,ij->i", c - b, np.cross(hb - b, hc - b))

    vals = g(phi)
    seeds = []
    for k in range(n):
        lo, hi = phi[k], phi[(k + 1) % n] + (2.0 * math.pi if k == n - 1 else 0.0)
        if vals[k] == 0.0 or vals[k] * vals[(k + 1) % n] < 0.0:
            root = lo if vals[k] == 0.0 else brentq(lambda s: float(g(s)[0]), lo, hi, xtol=1e-15)
            ha, hb, hc = triple(root)
            seeds.append((ha[0], hb[0], hc[0]))
    return seeds


def _same_line(x, y, tol: float) -> bool:
    return abs(abs(float(x @ y)) - 1.0) <= tol


@dataclass
class PseudoAltitudes:
    """Pseudo-altitude lines ``h_a, h_b, h_c`` (unit vectors, sign arbitrary)."""

    lines: np.ndarray
    planes: list[Plane]
    residual: float
    n_candidates: int
    flags: list[str] = field(default_factory=list)

    def feet(self, tri: SphericalTriangle) -> np.ndarray:
        """Antipode of each line nearest the triangle interior."""
        g = tri.interior_direction
        return np.array([h if h @ g >= 0 else -h for h in self.lines])


def pseudo_altitudes(tri: SphericalTriangle, tol: float = 1e-11, n_scan: int = 720) -> PseudoAltitudes:
    """The unique triple of lines making all three quadruples inscribed.

    Seeds come from a one-parameter scan (repeated from each vertex so that
    parametrization singularities at one vertex do not hide the root) and
    are polished by Newton's method on the three coplanarity determinants.
    The mediator triple also solves the system and is discarded unless it
    is the only solution, as for equilateral triangles.
    """
    verts = tri.vertices
    meds = np.array([mediator(tri, i)[1] for i in range(3)])
    sols: list[tuple[np.ndarray, float]] = []
    med_hit = False
    for k in range(3):
        rot = tri.rotated(k)
        for seed in _scan_seeds(rot, n_scan):
            h = [seed[(i - k) % 3] for i in range(3)]
            if any(_same_line(x, v, 1e-12) for x in h for v in verts):
                continue
            x, res = _newton(tri, _angles(tri, h))
            if res > tol:
                continue
            _, h = _system(tri, x)
            h = np.array(h)
            if any(_same_line(x_, v, 1e-9) for x_ in h for v in verts):
                continue
            if all(_same_line(x_, m, 1e-7) for x_, m in zip(h, meds)):
                med_hit = True
                continue
            if any(all(_same_line(x_, y, 1e-7) for x_, y in zip(h, s)) for s, _ in sols):
                continue
            sols.append((h, res))
    flags = []
    if not sols:
        if not med_hit:
            raise TheoremViolation("no pseudo-altitude triple found")
        x, res = _newton(tri, _angles(tri, meds))
        sols = [(np.array(_system(tri, x)[1]), res)]
        flags.append("coincides-with-mediators")
    if len(sols) > 1:
        flags.append(f"non-unique:{len(sols)}")
    sols.sort(key=lambda s: s[1])
    h, res = sols[0]
    planes = [Plane(unit(np.cross(v, x)), 0.0) for v, x in zip(verts, h)]
    return PseudoAltitudes(h, planes, res, len(sols), flags)


def pseudo_altitude_stability(
    tri: SphericalTriangle, pa: PseudoAltitudes, delta: float = 1e-3, n: int = 6, seed: int = 0
) -> float:
    """Largest line deviation after re-solving from perturbed starts."""
    rng = np.random.default_rng(seed)
    x0 = _angles(tri, pa.lines)
    worst = 0.0
    for _ in range(n):
        x, _ = _newton(tri, x0 + delta * rng.choice((-1.0, 1.0), size=3))
        h = _system(tri, x)[1]
        dev = max(float(np.linalg.norm(np.cross(p, q))) for p, q in zip(h, pa.lines))
        worst = max(worst, dev)
    return worst


# -- cones from the feet ------------------------------------------------------


def circumscribed_cone(tri: SphericalTriangle, apex=(0.0, 0.0, 0.0)) -> Cone:
    a, b, c = tri.vertices
    n = unit(np.cross(b - a, c - a))
    if n @ a < 0:
        n = -n
    return Cone(apex, n, math.acos(min(1.0, float(n @ a))))


def foot_set(tri: SphericalTriangle, pa: PseudoAltitudes | None = None) -> FootSet:
    if pa is None:
        pa = pseudo_altitudes(tri)
    meds = np.array([mediator(tri, i)[1] for i in range(3)])
    return FootSet(meds, pa.feet(tri), tri.poles)


@dataclass
class FeetCone:
    cone: Cone
    residual: float
    interior_residual: float
    signs: tuple[int, int, int]
    flags: list[str] = field(default_factory=list)

    def passed(self, tol: float) -> bool:
        return self.residual <= tol


def _plane_fit(points: np.ndarray) -> tuple[np.ndarray, float, float]:
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    n = vt[-1]
    d = float(n @ centroid)
    if d < 0:
        n, d = -n, -d
    return n, d, float(np.max(np.abs(points @ n - d)))


def six_feet_cone(feet: FootSet, tol: float = 1e-8, apex=(0.0, 0.0, 0.0)) -> FeetCone:
    """Circular cone through the six feet, fitted as a plane section of the sphere.

    The interior-nearest feet are tried first.  A cone contains whole lines,
    so when that choice fails the remaining antipode choices of the
    pseudo-altitude feet are tried and the change is flagged.
    """
    n, d, interior = _plane_fit(feet.points)
    best = (interior, n, d, (1, 1, 1))
    flags = []
    if interior > tol:
        for signs in itertools.product((1, -1), repeat=3):
            pts = np.vstack([feet.mediators, feet.pseudo * np.array(signs)[:, None]])
            n_, d_, r_ = _plane_fit(pts)
            if r_ < best[0]:
                best = (r_, n_, d_, signs)
        if best[3] != (1, 1, 1):
            flags.append("antipode-convention-changed")
    res, n, d, signs = best
    if d >= 1.0 or d <= 1e-12:
        raise DegenerateError("fitted plane does not cut a proper cone")
    return FeetCone(Cone(apex, n, math.acos(d)), res, interior, signs, flags)


def cone_agreement(k1: Cone, k2: Cone) -> tuple[float, float]:
    """Axis angle (as lines) and half-angle difference of two cones."""
    axis = math.atan2(float(np.linalg.norm(np.cross(k1.axis, k2.axis))), abs(float(k1.axis @ k2.axis)))
    return axis, abs(k1.half_angle - k2.half_angle)


@dataclass
class EulerPlane:
    residual: float
    lines: dict[str, np.ndarray]
    concurrency: dict[str, float]


def _common_line(normals) -> tuple[np.ndarray, float]:
    _, s, vt = np.linalg.svd(np.array([unit(n) for n in normals]))
    return vt[-1], float(s[-1])


def euler_plane_check(
    tri: SphericalTriangle, pa: PseudoAltitudes | None = None, feet_cone: FeetCone | None = None
) -> EulerPlane:
    """Smallest singular value of the four concurrent line directions.

    The lines are the common line of the mediator planes, the common line of
    the pseudo-altitude planes, and the axes of the circumscribed and the
    six-feet cones.
    """
    if pa is None:
        pa = pseudo_altitudes(tri)
    if feet_cone is None:
        feet_cone = six_feet_cone(foot_set(tri, pa))
    med_planes = [mediator(tri, i)[0] for i in range(3)]
    centroidal, r_med = _common_line([p.n for p in med_planes])
    orthocentral, r_alt = _common_line([p.n for p in pa.planes])
    lines = {
        "pseudocentroidal": centroidal,
        "pseudoorthocentral": orthocentral,
        "circumscribed_axis": circumscribed_cone(tri).axis,
        "euler_axis": feet_cone.cone.axis,
    }
    s = np.linalg.svd(np.array(list(lines.values())), compute_uv=False)
    return EulerPlane(float(s[-1]), lines, {"mediators": r_med, "pseudo_altitudes": r_alt})


@dataclass
class VertexCheck:
    """All Euler-cone facts at one vertex of a tetrahedron.

    ``tangency`` is scaled by the tetrahedron's size; the angles are radians.
    """

    euler: EulerCone
    feet_cone: FeetCone
    tangency: float
    axis_angle: float
    half_angle_gap: float
    feet_residual: float
    plane_singular: float
    flags: list[str] = field(default_factory=list)


def verify_vertex(t: Tetrahedron, v: int, ts: TangentSphereSet | None = None, n_scan: int = 720) -> VertexCheck:
    """Tangent cone via the Hart circle against the six-feet cone at vertex ``v``."""
    ts = tangent_spheres(t) if ts is None else ts
    ec = hart_euler_cone(t, v, ts)
    tri = TrihedralAngle.from_tetrahedron(t, v).triangle()
    pa = pseudo_altitudes(tri, n_scan=n_scan)
    fc = six_feet_cone(foot_set(tri, pa), apex=t.vertices[v])
    axis, half = cone_agreement(ec.cone, fc.cone)
    plane = euler_plane_check(tri, pa, fc)
    return VertexCheck(
        ec, fc, ec.max_residual / t.scale, axis, half, fc.residual, plane.residual,
        ec.flags + pa.flags + fc.flags,
    )
