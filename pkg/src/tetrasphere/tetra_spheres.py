"""The eight tangent spheres of a tetrahedron, their vertex-homothetic pairs,
the sixteen Grace spheres and the metric identities they satisfy."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .apollonius import m_class, spheres_through_circle_tangent_to
from .core_geom import (
    DEFAULT_TOL,
    DegenerateError,
    DomainError,
    Plane,
    Sphere,
    TheoremViolation,
    Tolerance,
    circumcircle,
    similitude_centers,
    sphere_angle_cos,
    tangency_classify,
    Tangency,
    vec,
)

SignVector = tuple[int, int, int, int]

#: canonical sign vectors, first entry +1
SIGN_VECTORS: tuple[SignVector, ...] = tuple(
    (1,) + rest for rest in itertools.product((1, -1), repeat=3)
)


def canonical(eps) -> SignVector:
    eps = tuple(int(e) for e in eps)
    return eps if eps[0] == 1 else tuple(-e for e in eps)


def sign_class(eps) -> tuple[str, tuple[int, ...]]:
    """('insphere', ()), ('exsphere', (i,)) or ('goof', (i, j))."""
    eps = canonical(eps)
    minus = tuple(i for i, e in enumerate(eps) if e < 0)
    plus = tuple(i for i, e in enumerate(eps) if e > 0)
    few = minus if len(minus) <= len(plus) else plus
    if len(few) == 0:
        return "insphere", ()
    if len(few) == 1:
        return "exsphere", few
    return "goof", minus


class Tetrahedron:
    """Tetrahedron ``ABCD``; face ``i`` is the one opposite vertex ``i``.

    Face normals point outward, so ``d_i - n_i . x`` is the signed distance
    of ``x`` to face ``i``, positive inside.
    """

    def __init__(self, vertices, tol: Tolerance = DEFAULT_TOL):
        v = np.asarray(vertices, dtype=float).reshape(4, 3)
        self.vertices = v
        self.scale = float(max(np.linalg.norm(v[i] - v[j]) for i in range(4) for j in range(i)))
        vol6 = float(np.linalg.det(np.array([v[1] - v[0], v[2] - v[0], v[3] - v[0]])))
        if abs(vol6) <= tol.rel * self.scale**3:
            raise DegenerateError("degenerate tetrahedron")
        self.volume = abs(vol6) / 6.0
        normals, offsets, areas = [], [], []
        for i in range(4):
            p, q, r = (v[j] for j in range(4) if j != i)
            n = np.cross(q - p, r - p)
            area = 0.5 * float(np.linalg.norm(n))
            n = n / (2.0 * area)
            if n @ (v[i] - p) > 0:
                n = -n
            normals.append(n)
            offsets.append(float(n @ p))
            areas.append(area)
        self.normals = np.array(normals)
        self.offsets = np.array(offsets)
        self.areas = np.array(areas)

    def face_plane(self, i: int) -> Plane:
        return Plane(self.normals[i], self.offsets[i])

    def face_vertices(self, i: int) -> np.ndarray:
        return self.vertices[[j for j in range(4) if j != i]]

    def circumcircle(self, i: int):
        return circumcircle(*self.face_vertices(i))

    def circumsphere(self) -> Sphere:
        v = self.vertices
        m = 2.0 * (v[1:] - v[0])
        rhs = np.sum(v[1:] ** 2, axis=1) - v[0] @ v[0]
        c = np.linalg.solve(m, rhs)
        return Sphere(c, float(np.linalg.norm(v[0] - c)))

    def face_distances(self, x) -> np.ndarray:
        """Signed distances of ``x`` to the four faces, positive inside."""
        return self.offsets - self.normals @ vec(x)

    def __repr__(self):
        return f"Tetrahedron({self.vertices.tolist()!r})"


@dataclass
class TangentSphereSet:
    """Tangent spheres keyed by canonical sign vector.

    ``realized[eps]`` is the actual side pattern of the sphere (``eps`` or its
    negative) and ``residuals[eps]`` its largest face-tangency gap.
    """

    spheres: dict[SignVector, Sphere]
    realized: dict[SignVector, SignVector]
    residuals: dict[SignVector, float]
    denominators: dict[SignVector, float]
    flags: dict[SignVector, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.spheres)

    def __iter__(self):
        return iter(self.spheres.items())

    def find(self, s: Sphere, tol: Tolerance) -> SignVector | None:
        for eps, t in self.spheres.items():
            if np.linalg.norm(t.center - s.center) <= tol.length and abs(t.r - s.r) <= tol.length:
                return eps
        return None


def tangent_spheres(t: Tetrahedron, tol: Tolerance | None = None) -> TangentSphereSet:
    """All tangent spheres of ``t``.

    The radius follows from ``sum(S_i n_i) = 0``: ``r = 3V / sum(eps_i S_i)``;
    the center comes from the 4x4 system ``n_i . x + eps_i rho = d_i``.
    Entries whose signed area sum is below ``tol.area`` are absent.
    """
    tol = (tol or DEFAULT_TOL).with_scale(t.scale)
    spheres, realized, residuals, denoms, flags = {}, {}, {}, {}, {}
    for eps in SIGN_VECTORS:
        e = np.array(eps, dtype=float)
        denom = float(e @ t.areas)
        denoms[eps] = denom
        if abs(denom) <= tol.area:
            continue
        if abs(denom) <= 1e3 * tol.area:
            flags[eps] = "ill-conditioned"
        rho_closed = 3.0 * t.volume / denom
        m = np.column_stack([t.normals, e])
        sol = np.linalg.solve(m, t.offsets)
        center, rho = sol[:3], float(sol[3])
        if abs(rho - rho_closed) > 1e3 * tol.rel * max(abs(rho), t.scale):
            flags[eps] = "radius-mismatch"
        sgn = 1 if rho > 0 else -1
        realized[eps] = tuple(sgn * x for x in eps)
        sphere = Sphere(center, abs(rho))
        gaps = t.face_distances(center) - np.array(realized[eps]) * sphere.r
        residuals[eps] = float(np.max(np.abs(gaps)))
        spheres[eps] = sphere
    return TangentSphereSet(spheres, realized, residuals, denoms, flags)


@dataclass(frozen=True)
class GracePair:
    """Two tangent spheres homothetic about the vertex opposite ``face``."""

    first: SignVector
    second: SignVector
    face: int
    k: float

    @property
    def vertex(self) -> int:
        return self.face


def _flip(eps: SignVector, i: int) -> SignVector:
    out = list(eps)
    out[i] = -out[i]
    return canonical(out)


def grace_pairs(ts: TangentSphereSet, t: Tetrahedron) -> list[GracePair]:
    """Vertex-homothetic pairs; each crosses the {insphere, goofs} / exspheres split."""
    pairs = []
    seen = set()
    for eps in SIGN_VECTORS:
        if eps not in ts.spheres:
            continue
        for i in range(4):
            other = _flip(eps, i)
            key = (frozenset((eps, other)), i)
            if other not in ts.spheres or key in seen:
                continue
            seen.add(key)
            first, second = sorted((eps, other), key=SIGN_VECTORS.index)
            a, b = ts.spheres[first], ts.spheres[second]
            v = t.vertices[i]
            da, db = a.center - v, b.center - v
            k = math.copysign(b.r / a.r, float(da @ db))
            groups = {sign_class(first)[0] == "exsphere", sign_class(second)[0] == "exsphere"}
            assert groups == {True, False}, "homothetic pair inside one group"
            pairs.append(GracePair(first, second, i, k))
    return pairs


def homothety_residual(ts: TangentSphereSet, t: Tetrahedron, p: GracePair) -> float:
    """How far ``x -> v + k (x - v)`` is from mapping the first sphere onto the second."""
    a, b = ts.spheres[p.first], ts.spheres[p.second]
    v = t.vertices[p.face]
    image = v + p.k * (a.center - v)
    return float(max(np.linalg.norm(image - b.center), abs(abs(p.k) * a.r - b.r)))


def _touch_point(g: Sphere, s: Sphere, kind: Tangency) -> np.ndarray:
    """Point of contact of two tangent spheres."""
    if kind is Tangency.EXTERNAL:
        return (s.r * g.center + g.r * s.center) / (g.r + s.r)
    return (s.r * g.center - g.r * s.center) / (s.r - g.r)


@dataclass
class GraceSphere:
    pair: GracePair
    face: int
    sphere: Sphere
    touch_first: np.ndarray
    touch_second: np.ndarray
    kind_first: Tangency
    kind_second: Tangency
    through_residual: float
    tangency_residuals: tuple[float, float]
    collinearity_residual: float
    flags: list[str] = field(default_factory=list)


def grace_sphere(
    t: Tetrahedron, ts: TangentSphereSet, p: GracePair, tol: Tolerance | None = None
) -> GraceSphere:
    """Sphere through the vertices of ``p.face`` tangent to both pair members.

    Among the spheres of the pencil through the face circumcircle that touch
    the first sphere, take the one whose class in ``M(first, second)``
    differs from that of the face plane, then check it also touches the
    second sphere.
    """
    tol = (tol or DEFAULT_TOL).with_scale(t.scale)
    loose = Tolerance(max(tol.rel, 1e-7), tol.abs_floor, t.scale)
    alpha, beta = ts.spheres[p.first], ts.spheres[p.second]
    circle = t.circumcircle(p.face)
    face_plane = t.face_plane(p.face)
    plane_class = m_class(face_plane, alpha, beta, loose)
    candidates = spheres_through_circle_tangent_to(circle, alpha, tol)
    chosen = []
    for cand, _cls in candidates:
        if not isinstance(cand, Sphere):
            continue
        ext, inn = _gaps(cand, beta)
        if min(abs(ext), abs(inn)) > loose.length:
            continue
        if m_class(cand, alpha, beta, loose) != plane_class:
            chosen.append(cand)
    if not chosen:
        raise TheoremViolation(f"no Grace sphere for pair {p}")
    flags = []
    if len(chosen) > 1:
        flags.append("non-unique")
    g = chosen[0]
    ka = _kind(g, alpha)
    kb = _kind(g, beta)
    ta = _touch_point(g, alpha, ka)
    tb = _touch_point(g, beta, kb)
    res_a = min(abs(x) for x in _gaps(g, alpha))
    res_b = min(abs(x) for x in _gaps(g, beta))
    through = float(max(abs(np.linalg.norm(q - g.center) - g.r) for q in t.face_vertices(p.face)))
    # Monge: same contact type -> external center of (alpha, beta), else internal
    ext_c, int_c = similitude_centers(alpha, beta)
    center = ext_c if ka is kb else int_c
    if center is None:
        w = alpha.center - beta.center
        d = tb - ta
        colin = float(np.linalg.norm(np.cross(d, w)) / np.linalg.norm(w))
    else:
        d1, d2 = ta - center, tb - center
        colin = float(np.linalg.norm(np.cross(d1, d2)) / max(np.linalg.norm(d1), np.linalg.norm(d2)))
    return GraceSphere(p, p.face, g, ta, tb, ka, kb, through, (res_a, res_b), colin, flags)


def _gaps(g: Sphere, s: Sphere) -> tuple[float, float]:
    dist = float(np.linalg.norm(g.center - s.center))
    return dist - (g.r + s.r), dist - abs(g.r - s.r)


def _kind(g: Sphere, s: Sphere) -> Tangency:
    ext, inn = _gaps(g, s)
    return Tangency.EXTERNAL if abs(ext) < abs(inn) else Tangency.INTERNAL


def _tangent_point_on_plane(s: Sphere, plane: Plane) -> np.ndarray:
    return plane.project(s.center)


@dataclass
class GraceRadiiResult:
    radius_residuals: tuple[float, float]
    product_residual: float


def grace_radii_check(
    t: Tetrahedron, ts: TangentSphereSet, p: GracePair, g: GraceSphere, tol: Tolerance | None = None
) -> GraceRadiiResult:
    """Radii of the pair from the face circumcircle and the Grace sphere.

    ``S_a`` is the image of the contact point of sphere ``a`` with the face
    plane under the homothety at the contact point with ``g`` that maps
    ``a`` onto ``g``; it is one of the two points of ``g`` where the tangent
    plane is parallel to the face.
    """
    tol = (tol or DEFAULT_TOL).with_scale(t.scale)
    plane = t.face_plane(p.face)
    circle = t.circumcircle(p.face)
    res = []
    heights = []
    for eps, kind in ((p.first, g.kind_first), (p.second, g.kind_second)):
        s = ts.spheres[eps]
        h = plane.signed_distance(s.center)
        if abs(abs(h) - s.r) > 1e3 * tol.length:
            raise DomainError("pair sphere does not touch the face plane")
        m = -math.copysign(1.0, h) * plane.n  # from the center toward the plane
        apex = g.sphere.center + (-g.sphere.r if kind is Tangency.EXTERNAL else g.sphere.r) * m
        foot = plane.project(s.center)
        pw = float(np.sum((foot - circle.center) ** 2) - circle.r**2)
        dist = abs(plane.signed_distance(apex))
        heights.append(dist)
        res.append(abs(s.r - abs(pw / (2.0 * dist))))
    return GraceRadiiResult((res[0], res[1]), abs(heights[0] * heights[1] - circle.r**2))


def cos_product_check(t: Tetrahedron, ts: TangentSphereSet, p: GracePair) -> float:
    """``|cos(face sphere, a) cos(face sphere, b) - sign k|``."""
    circle = t.circumcircle(p.face)
    face_sphere = Sphere(circle.center, circle.r)
    prod = sphere_angle_cos(face_sphere, ts.spheres[p.first]) * sphere_angle_cos(
        face_sphere, ts.spheres[p.second]
    )
    return abs(prod - math.copysign(1.0, p.k))


def random_tetrahedron(rng: np.random.Generator, min_volume: float = 0.01, min_goof: float = 0.01) -> Tetrahedron:
    """Generic tetrahedron with vertices uniform in the unit cube.

    Rejects small volumes and near-vanishing signed area sums so that all
    eight tangent spheres exist comfortably.
    """
    while True:
        v = rng.uniform(0.0, 1.0, size=(4, 3))
        vol = abs(np.linalg.det(v[1:] - v[0])) / 6.0
        if vol < min_volume:
            continue
        t = Tetrahedron(v)
        sums = [abs(float(np.array(e) @ t.areas)) for e in SIGN_VECTORS]
        if min(sums) < min_goof * t.scale**2:
            continue
        return t


def regular_tetrahedron() -> Tetrahedron:
    return Tetrahedron([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
