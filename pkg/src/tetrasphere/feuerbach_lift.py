"""Planar triangle facts proved by lifting circles to spheres.

A triangle lives in a carrier plane inside 3-space.  Each circle of the
triangle gets a *lift*: either the diametral sphere (center on the plane) or
the sphere of the same radius resting on the plane at the circle's center.
Tangencies between lifted spheres then encode classical planar identities
(Euler-Chapple, Feuerbach).  Every step of the lift proof of Feuerbach's
theorem is exposed as a numeric residual.

Residuals in the reports are dimensionless: lengths are divided by the
circumradius ``R`` and powers by ``R**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core_geom import (
    Circle3,
    DegenerateError,
    Plane,
    Sphere,
    Tangency,
    Tolerance,
    circumcircle,
    invert,
    orthonormal_pair,
    radical_axis,
    tangency_residual,
    unit,
    vec,
)
from .poncelet_pairs import triangle_centers_2d

__all__ = [
    "TriangleFrame",
    "LiftedSpheres",
    "LiftReport",
    "CoaxialReport",
    "lift_spheres",
    "random_triangle",
    "up_in_ex_touch",
    "inversion_proof_check",
    "xi_circle",
    "chi_circle",
    "side_circle",
    "chord_residual",
    "coaxial_test",
    "pencil_ratio_residual",
    "random_coaxial_triple",
    "radical_center_check",
    "feuerbach_lift_chain",
]


def _foot(p, a, b) -> np.ndarray:
    d = b - a
    return a + (float((p - a) @ d) / float(d @ d)) * d


@dataclass(frozen=True)
class TriangleFrame:
    """Triangle ``ABC`` with its carrier plane and the usual centers.

    The plane normal follows the orientation of ``A, B, C``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C"):
            p = np.zeros(3)
            x = np.asarray(getattr(self, name), dtype=float)
            p[: x.size] = x
            object.__setattr__(self, name, p)
        nrm = np.cross(self.B - self.A, self.C - self.A)
        side = max(np.linalg.norm(self.B - self.A), np.linalg.norm(self.C - self.A), 1e-300)
        if np.linalg.norm(nrm) <= 1e-12 * side**2:
            raise DegenerateError("degenerate triangle")

    @property
    def vertices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.A, self.B, self.C

    @cached_property
    def plane(self) -> Plane:
        return Plane.from_point_normal(self.A, np.cross(self.B - self.A, self.C - self.A))

    @property
    def n(self) -> np.ndarray:
        return self.plane.n

    @cached_property
    def _centers(self):
        return triangle_centers_2d(self.A, self.B, self.C)

    @property
    def I(self) -> np.ndarray:
        return self._centers[0]

    @property
    def r(self) -> float:
        return float(self._centers[1])

    @property
    def excenters(self) -> list[np.ndarray]:
        return self._centers[2]

    @property
    def exradii(self) -> list[float]:
        return [float(x) for x in self._centers[3]]

    @property
    def O(self) -> np.ndarray:
        return self._centers[4]

    @property
    def R(self) -> float:
        return float(self._centers[5])

    @property
    def H(self) -> np.ndarray:
        return self.A + self.B + self.C - 2.0 * self.O

    @property
    def N(self) -> np.ndarray:
        return 0.5 * (self.O + self.H)

    @property
    def midpoints_to_H(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``A1, B1, C1``: midpoints of ``AH, BH, CH``."""
        return tuple(0.5 * (v + self.H) for v in self.vertices)

    @property
    def I1(self) -> np.ndarray:
        return 0.5 * (self.I + self.H)

    def circle(self, center, radius: float) -> Circle3:
        return Circle3(self.plane, center, radius)

    @property
    def incircle(self) -> Circle3:
        return self.circle(self.I, self.r)

    @property
    def excircles(self) -> list[Circle3]:
        return [self.circle(c, r) for c, r in zip(self.excenters, self.exradii)]

    @property
    def circumcircle(self) -> Circle3:
        return self.circle(self.O, self.R)

    @property
    def nine_point_circle(self) -> Circle3:
        return self.circle(self.N, 0.5 * self.R)

    def touch_points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Incircle contacts on ``BC, CA, AB``."""
        A, B, C = self.vertices
        return _foot(self.I, B, C), _foot(self.I, C, A), _foot(self.I, A, B)

    def invariant_residual(self) -> float:
        """Nine-point circle checks: ``A1, B1, C1`` on it and center at mid ``OH``."""
        a1 = self.midpoints_to_H
        alt = circumcircle(*a1)
        res = [abs(float(np.linalg.norm(p - self.N)) - 0.5 * self.R) for p in a1]
        res.append(float(np.linalg.norm(alt.center - self.N)))
        res.append(abs(alt.r - 0.5 * self.R))
        return max(res) / self.R

    def is_equilateral(self, rel: float = 1e-12) -> bool:
        return float(np.linalg.norm(self.I - self.H)) <= rel * self.R


def random_triangle(rng: np.random.Generator, min_area: float = 0.02, embed: bool = True) -> TriangleFrame:
    """Vertices uniform in the unit disk, optionally placed in a random plane."""
    if embed:
        n = unit(rng.normal(size=3))
        e1, e2 = orthonormal_pair(n)
        origin = rng.uniform(-1.0, 1.0, size=3)
    while True:
        pts2 = []
        while len(pts2) < 3:
            p = rng.uniform(-1.0, 1.0, size=2)
            if p @ p <= 1.0:
                pts2.append(p)
        a, b, c = pts2
        area = 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        if area >= min_area:
            break
    if not embed:
        return TriangleFrame(a, b, c)
    lift = [origin + p[0] * e1 + p[1] * e2 for p in pts2]
    return TriangleFrame(*lift)


@dataclass(frozen=True)
class LiftedSpheres:
    """Sphere lifts of a triangle's circles.

    ``Delta`` and ``Theta`` are diametral on the circumcircle and nine-point
    circle; ``up`` and ``ups_ex`` rest on the plane at the in/excenters on the
    side the normal points to, ``down``/``downs_ex`` are their mirrors;
    ``Upsilon`` is the lifted incircle sphere of ``A1 B1 C1``.
    """

    Delta: Sphere
    Theta: Sphere
    up: Sphere
    ups_ex: tuple[Sphere, Sphere, Sphere]
    down: Sphere
    downs_ex: tuple[Sphere, Sphere, Sphere]
    Upsilon: Sphere


def lift_spheres(tf: TriangleFrame) -> LiftedSpheres:
    n = tf.n
    a1 = TriangleFrame(*tf.midpoints_to_H)
    # A1B1C1 keeps the orientation of ABC (positive homothety)
    return LiftedSpheres(
        Delta=Sphere(tf.O, tf.R),
        Theta=Sphere(tf.N, 0.5 * tf.R),
        up=Sphere(tf.I + tf.r * n, tf.r),
        ups_ex=tuple(Sphere(c + r * n, r) for c, r in zip(tf.excenters, tf.exradii)),
        down=Sphere(tf.I - tf.r * n, tf.r),
        downs_ex=tuple(Sphere(c - r * n, r) for c, r in zip(tf.excenters, tf.exradii)),
        Upsilon=Sphere(a1.I + a1.r * n, a1.r),
    )


@dataclass
class LiftReport:
    """Named dimensionless residuals of a verification chain."""

    residuals: dict[str, float]
    tol: float
    flags: list[str] = field(default_factory=list)
    info: dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def failures(self) -> list[str]:
        return [k for k, v in self.residuals.items() if v > self.tol]


def _touch_gap(s1: Sphere, s2: Sphere, kind: Tangency) -> float:
    ext, inn = tangency_residual(s1, s2)
    return abs(ext if kind is Tangency.EXTERNAL else inn)


def up_in_ex_touch(tf: TriangleFrame, tol: Tolerance = Tolerance(1e-10)) -> LiftReport:
    """Circumsphere of the triangle against its eight resting in/ex spheres.

    The incircle lifts touch from inside, the excircle lifts from outside.
    The same facts are the Euler-Chapple relations ``d^2 = R^2 - 2Rr`` and
    ``d_a^2 = R^2 + 2R r_a``, recorded as ``chapple*`` residuals.
    """
    ls = lift_spheres(tf)
    R = tf.R
    res: dict[str, float] = {}
    for tag, s in (("up", ls.up), ("down", ls.down)):
        res[f"in_{tag}"] = _touch_gap(ls.Delta, s, Tangency.INTERNAL) / R
    for i in range(3):
        res[f"ex{i}_up"] = _touch_gap(ls.Delta, ls.ups_ex[i], Tangency.EXTERNAL) / R
        res[f"ex{i}_down"] = _touch_gap(ls.Delta, ls.downs_ex[i], Tangency.EXTERNAL) / R
    d2 = float(np.sum((tf.I - tf.O) ** 2))
    res["chapple_in"] = abs(d2 - (R * R - 2 * R * tf.r)) / R**2
    for i, (c, ra) in enumerate(zip(tf.excenters, tf.exradii)):
        da2 = float(np.sum((c - tf.O) ** 2))
        res[f"chapple_ex{i}"] = abs(da2 - (R * R + 2 * R * ra)) / R**2
    return LiftReport(res, tol.rel)


def inversion_proof_check(tf: TriangleFrame, tol: Tolerance = Tolerance(1e-10)) -> LiftReport:
    """Invert about the diametral sphere of the incircle.

    The circumsphere goes to a sphere of radius ``r/2`` diametral on the
    circle through the midpoints of the contact triangle's sides, and the
    resting incircle sphere goes to the plane at height ``r/2``; these two
    images touch, hence so do the originals.
    """
    R, r, I, n = tf.R, tf.r, tf.I, tf.n
    ls = lift_spheres(tf)
    k = r * r
    dprime = invert(I, k, ls.Delta)
    ta, tb, tc = tf.touch_points()
    mids = circumcircle(0.5 * (tb + tc), 0.5 * (tc + ta), 0.5 * (ta + tb))
    res: dict[str, float] = {
        "image_radius": abs(dprime.r - 0.5 * r) / R,
        "image_center_in_plane": abs(tf.plane.signed_distance(dprime.center)) / R,
        "image_vs_contact_midpoints": max(
            float(np.linalg.norm(dprime.center - mids.center)), abs(dprime.r - mids.r)
        )
        / R,
    }
    for tag, s in (("up", ls.up), ("down", ls.down)):
        img = invert(I, k, s, tol.with_scale(R))
        if not isinstance(img, Plane):
            raise DegenerateError("lifted incircle sphere should pass through the incenter")
        # image plane must be parallel to the carrier
        res[f"{tag}_plane_parallel"] = float(np.linalg.norm(np.cross(img.n, n)))
        height = img.d - float(img.n @ I)
        res[f"{tag}_plane_height"] = abs(abs(height) - 0.5 * r) / R
        res[f"{tag}_image_touch"] = abs(tangency_residual(dprime, img)[0]) / R
        res[f"{tag}_original_touch"] = _touch_gap(ls.Delta, s, Tangency.INTERNAL) / R
    return LiftReport(res, tol.rel, info={"image_radius": dprime.r, "r": r})


# -- the circle apparatus -----------------------------------------------------


def xi_circle(tf: TriangleFrame) -> Circle3:
    """Circle about the incenter of radius ``r*sqrt(2)``."""
    return tf.circle(tf.I, math.sqrt(2.0) * tf.r)


def chi_circle(tf: TriangleFrame, vertex: int = 0) -> Circle3:
    """Circle on the Gergonne cevian of ``vertex`` as diameter."""
    v = tf.vertices[vertex]
    t = tf.touch_points()[vertex]
    return tf.circle(0.5 * (v + t), 0.5 * float(np.linalg.norm(v - t)))


def side_circle(tf: TriangleFrame, vertex: int = 0) -> Circle3:
    """Circle on the side opposite ``vertex`` as diameter."""
    p, q = (tf.vertices[j] for j in range(3) if j != vertex)
    return tf.circle(0.5 * (p + q), 0.5 * float(np.linalg.norm(p - q)))


def chord_residual(tf: TriangleFrame, c: Circle3 | None = None) -> float:
    """Max deviation of the chords ``c`` cuts on the side lines from ``2r``."""
    c = xi_circle(tf) if c is None else c
    worst = 0.0
    for i in range(3):
        p, q = (tf.vertices[j] for j in range(3) if j != i)
        h2 = float(np.sum((c.center - _foot(c.center, p, q)) ** 2))
        half = math.sqrt(max(c.r * c.r - h2, 0.0))
        worst = max(worst, abs(2.0 * half - 2.0 * tf.r))
    return worst / tf.R


def _power(c: Circle3, p) -> float:
    q = vec(p) - c.center
    return float(q @ q) - c.r * c.r


@dataclass
class CoaxialReport:
    """Two independent tests that three coplanar circles share a pencil.

    ``radical`` compares the radical axes of ``(c1, c2)`` and ``(c1, c3)``;
    ``pencil`` checks the power-ratio identity at one point of ``c3``.
    Both include the collinearity of the centers.
    """

    collinearity: float
    radical: float
    pencil: float
    agree: bool

    @property
    def residual(self) -> float:
        return self.radical


def _line_gap(l1, l2, scale: float) -> float:
    """Largest distance from ``l1`` of the two points of ``l2`` at +-scale."""
    return max(l1.distance(l2.point + s * scale * l2.dir) for s in (-1.0, 1.0))


def coaxial_test(c1: Circle3, c2: Circle3, c3: Circle3, tol: float = 1e-9) -> CoaxialReport:
    centers = [c.center for c in (c1, c2, c3)]
    scale = max(max(float(np.linalg.norm(a - b)) for a in centers for b in centers), c1.r, c2.r, c3.r)
    for a, b in ((c1, c2), (c1, c3), (c2, c3)):
        if np.linalg.norm(a.center - b.center) <= 1e-14 * scale:
            raise DegenerateError("concentric circles in a coaxial test")
    u, w = centers[1] - centers[0], centers[2] - centers[0]
    col = float(np.linalg.norm(np.cross(u, w))) / (float(np.linalg.norm(u)) * float(np.linalg.norm(w)))
    radical = max(col, _line_gap(radical_axis(c1, c2), radical_axis(c1, c3), scale) / scale)

    # power ratio at a point of c3 where beta's power is largest
    du = unit(u)
    d_ag = float((c3.center - c1.center) @ du)
    d_bg = float((c3.center - c2.center) @ du)
    pts = [c3.point(t) for t in np.linspace(0.0, 2 * math.pi, 8, endpoint=False)]
    p = max(pts, key=lambda x: abs(_power(c2, x)))
    pencil = max(col, pencil_ratio_residual(c1, c2, c3, p, d_ag / d_bg))
    agree = (radical <= tol) == (pencil <= tol) or abs(radical - pencil) <= 10 * tol
    return CoaxialReport(col, radical, pencil, agree)


def pencil_ratio_residual(
    alpha: Circle3, beta: Circle3, gamma: Circle3, p, ratio: float | None = None
) -> float | None:
    """``|alpha(P)/beta(P) - d_ag/d_bg|`` for ``P`` on ``gamma``.

    Center distances are signed along the line of centers.  Returns ``None``
    when ``beta(P)`` vanishes (the ratio is undefined there).
    """
    scale = max(alpha.r, beta.r, gamma.r, float(np.linalg.norm(alpha.center - beta.center)))
    pb = _power(beta, p)
    if abs(pb) <= 1e-9 * scale * scale:
        return None
    if ratio is None:
        du = unit(beta.center - alpha.center)
        d_ag = float((gamma.center - alpha.center) @ du)
        d_bg = float((gamma.center - beta.center) @ du)
        ratio = d_ag / d_bg
    return abs(_power(alpha, p) / pb - ratio) / max(1.0, abs(ratio))


def random_coaxial_triple(rng: np.random.Generator, plane: Plane | None = None):
    """Two random circles and a third from their pencil (linear combination
    of the power functions)."""
    plane = Plane(vec([0, 0, 1]), 0.0) if plane is None else plane
    e1, e2 = orthonormal_pair(plane.n)
    o = plane.origin

    def pt(xy):
        return o + xy[0] * e1 + xy[1] * e2

    while True:
        ca, cb = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        ra, rb = rng.uniform(0.2, 1.0, 2)
        if np.linalg.norm(ca - cb) < 0.2:
            continue
        lam = rng.uniform(-1.5, 2.5)
        if min(abs(lam), abs(1 - lam)) < 0.1:
            continue
        cg = lam * ca + (1 - lam) * cb
        const = lam * (ca @ ca - ra * ra) + (1 - lam) * (cb @ cb - rb * rb)
        rg2 = cg @ cg - const
        if rg2 > 0.01:
            return (
                Circle3(plane, pt(ca), ra),
                Circle3(plane, pt(cb), rb),
                Circle3(plane, pt(cg), math.sqrt(rg2)),
            )


def radical_center_check(tf: TriangleFrame) -> float:
    """``max |power(H, c) - power(H, xi)| / R^2`` over the side circles."""
    H = tf.H
    base = _power(xi_circle(tf), H)
    return max(abs(_power(side_circle(tf, i), H) - base) for i in range(3)) / tf.R**2


# -- the lift proof of Feuerbach's theorem ------------------------------------


def feuerbach_lift_chain(tf: TriangleFrame, tol: Tolerance = Tolerance(1e-9)) -> LiftReport:
    """Residuals for each step of the lift proof, plus direct cross-checks.

    Steps: ``Theta`` touches ``Upsilon`` (the circumsphere and resting
    insphere of ``A1 B1 C1``); the inversion centered ``r`` above ``H`` with
    power ``|IH|^2/2`` swaps ``Delta`` (diametral on the incircle) and
    ``Upsilon``; ``|IH|^2 - 2r^2 = 2 theta(H)``; ``Theta`` has power
    ``|IH|^2/2`` at the inversion center, so it is fixed and touches
    ``Delta``.  An equilateral triangle skips the inversion (``I = H``).
    """
    R, r, I, H, N, n = tf.R, tf.r, tf.I, tf.H, tf.N, tf.n
    ls = lift_spheres(tf)
    flags: list[str] = []
    res: dict[str, float] = {"nine_point": tf.invariant_residual()}

    small = TriangleFrame(*tf.midpoints_to_H)
    res["I1_is_incenter"] = float(np.linalg.norm(small.I - tf.I1)) / R
    res["theta_upsilon_touch"] = _touch_gap(ls.Theta, ls.Upsilon, Tangency.INTERNAL) / R

    delta_in = Sphere(I, r)
    theta = tf.nine_point_circle
    ih2 = float(np.sum((I - H) ** 2))
    theta_H = _power(theta, H)
    res["power_identity"] = abs((ih2 - 2 * r * r) - 2 * theta_H) / R**2
    res["radical_center"] = radical_center_check(tf)
    res["theta_half_side_power"] = max(
        abs(2 * theta_H - _power(side_circle(tf, i), H)) for i in range(3)
    ) / R**2

    if tf.is_equilateral():
        flags.append("equilateral-direct-only")
        flags.append("incircle-equals-nine-point-circle")
    else:
        S = H + r * n
        k = 0.5 * ih2
        img = invert(S, k, delta_in)
        res["inversion_swaps"] = max(
            float(np.linalg.norm(img.center - ls.Upsilon.center)), abs(img.r - ls.Upsilon.r)
        ) / R
        theta_S = ls.Theta.power(S)
        res["theta_S_is_power"] = abs(theta_S - k) / R**2
        res["theta_S_identity"] = abs(theta_S - (theta_H + r * r)) / R**2

    # final: in-plane tangency, its lifted version, and the distance form
    dist = float(np.linalg.norm(I - N))
    planar = abs(dist - abs(0.5 * R - r)) / R
    lifted = _touch_gap(ls.Theta, delta_in, Tangency.INTERNAL) / R
    res["feuerbach_incircle"] = planar
    res["feuerbach_lifted"] = lifted
    res["IN_formula"] = abs(dist - (0.5 * R - r)) / R
    for i, (c, ra) in enumerate(zip(tf.excenters, tf.exradii)):
        res[f"feuerbach_ex{i}"] = abs(float(np.linalg.norm(c - N)) - (0.5 * R + ra)) / R
    if (planar <= tol.rel) != (lifted <= tol.rel):
        flags.append("lift-disagrees")
    return LiftReport(res, tol.rel, flags, info={"IH2": ih2, "theta_H": theta_H})
