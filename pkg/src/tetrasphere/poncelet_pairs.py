"""Circle-conic Poncelet triangles.

Conics are kept in focal form (two foci and a signed ``b^2``, negative for
hyperbolas) and converted to a 3x3 quadratic form in an in-plane frame
whenever tangency has to be computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core_geom import (
    DEFAULT_TOL,
    Circle3,
    Cone,
    DegenerateError,
    DomainError,
    Line3,
    Plane,
    Sphere,
    Tolerance,
    orthonormal_pair,
    tangent_cone,
    unit,
    vec,
)


@dataclass(frozen=True)
class ConicFoci:
    plane: Plane
    f1: np.ndarray
    f2: np.ndarray
    b_sq: float

    def __post_init__(self):
        object.__setattr__(self, "f1", vec(self.f1))
        object.__setattr__(self, "f2", vec(self.f2))
        if self.b_sq == 0:
            raise DomainError("b^2 must be nonzero")
        if self.a_sq <= 0:
            raise DomainError("inconsistent focal data: a^2 <= 0")

    @property
    def focal_half(self) -> float:
        return 0.5 * float(np.linalg.norm(self.f1 - self.f2))

    @property
    def a_sq(self) -> float:
        return float(self.b_sq) + self.focal_half**2

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.f1 + self.f2)

    @property
    def is_hyperbola(self) -> bool:
        return self.b_sq < 0


@dataclass(frozen=True)
class Parabola2:
    plane: Plane
    focus: np.ndarray
    directrix: Line3

    def __post_init__(self):
        object.__setattr__(self, "focus", vec(self.focus))
        if self.directrix.distance(self.focus) == 0:
            raise DomainError("focus lies on the directrix")


Conic = Union[ConicFoci, Parabola2]


@dataclass
class ClosureResult:
    closed: bool
    residual: float
    per_start: list[float]
    skipped: int = 0


class Frame2:
    """Affine chart of a plane: ``x = origin + u e1 + v e2``."""

    def __init__(self, plane: Plane, origin=None):
        self.plane = plane
        self.origin = plane.project(origin) if origin is not None else plane.origin
        self.e1, self.e2 = orthonormal_pair(plane.n)

    def to2(self, p) -> np.ndarray:
        q = vec(p) - self.origin
        return np.array([q @ self.e1, q @ self.e2])

    def to3(self, q) -> np.ndarray:
        return self.origin + q[0] * self.e1 + q[1] * self.e2


def conic_matrix(conic: Conic, frame: Frame2) -> np.ndarray:
    """Symmetric 3x3 ``C`` with ``[u v 1] C [u v 1]^T = 0`` on the conic."""
    if isinstance(conic, Parabola2):
        f = frame.to2(conic.focus)
        p0 = frame.to2(conic.directrix.point)
        d = np.array([conic.directrix.dir @ frame.e1, conic.directrix.dir @ frame.e2])
        d = d / np.linalg.norm(d)
        nrm = np.array([-d[1], d[0]])
        c0 = float(nrm @ p0)
        # |x - f|^2 - (nrm.x - c0)^2
        a = np.eye(2) - np.outer(nrm, nrm)
        b = -f + c0 * nrm
        c = float(f @ f) - c0 * c0
    else:
        center = frame.to2(conic.center)
        if conic.focal_half > 0:
            u = frame.to2(conic.f2) - frame.to2(conic.f1)
            u = u / np.linalg.norm(u)
        else:
            u = np.array([1.0, 0.0])
        v = np.array([-u[1], u[0]])
        a = np.outer(u, u) / conic.a_sq + np.outer(v, v) / conic.b_sq
        b = -a @ center
        c = float(center @ a @ center) - 1.0
    m = np.empty((3, 3))
    m[:2, :2] = a
    m[:2, 2] = b
    m[2, :2] = b
    m[2, 2] = c
    return m


def _adjugate(m: np.ndarray) -> np.ndarray:
    cof = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            minor = np.delete(np.delete(m, i, 0), j, 1)
            cof[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return cof.T


# -- cone sections -----------------------------------------------------------


def dandelin_spheres(k: Cone, p: Plane) -> list[Sphere]:
    """Spheres inscribed in the cone and tangent to ``p``.

    Centers ``apex + s axis`` with radius ``|s| sin(a)``; tangency to the plane
    is linear in ``s`` for each side.
    """
    h0 = p.signed_distance(k.apex)
    na = float(p.n @ k.axis)
    sa = math.sin(k.half_angle)
    out = []
    for sgn in (1.0, -1.0):
        den = na - sgn * sa
        if abs(den) < 1e-13:
            continue
        s = -h0 / den
        if s == 0:
            continue
        out.append(Sphere(k.apex + s * k.axis, abs(s) * sa))
    return out


def conic_from_cone_plane(k: Cone, p: Plane, tol: Tolerance = DEFAULT_TOL) -> Conic:
    """Section of a double cone by a plane missing its apex.

    The cone's quadratic form is restricted to in-plane coordinates; the
    eigen-decomposition of the quadratic part gives the type, the center,
    the semi-axes and the foci.
    """
    h = p.signed_distance(k.apex)
    scale = max(abs(h), tol.scale)
    if abs(h) <= tol.rel * scale:
        raise DegenerateError("plane through the cone apex")
    frame = Frame2(p, k.apex)
    e = np.column_stack([frame.e1, frame.e2])
    p0 = frame.origin - k.apex
    m = k.quadratic_form()
    a = e.T @ m @ e
    b = e.T @ m @ p0
    c = float(p0 @ m @ p0)
    lam, vecs = np.linalg.eigh(a)
    if min(abs(lam)) <= 1e-10 * max(abs(lam)):
        return _parabola_from_form(a, b, c, lam, vecs, frame, p)
    center = np.linalg.solve(a, -b)
    cprime = c + float(b @ center)
    s = -cprime / lam  # signed squared semi-axes
    order = np.argsort(s)[::-1]
    a_sq, b_sq = float(s[order[0]]), float(s[order[1]])
    if a_sq <= 0:
        raise DegenerateError("imaginary section")
    major = vecs[:, order[0]]
    focal = math.sqrt(a_sq - b_sq)
    f1 = frame.to3(center - focal * major)
    f2 = frame.to3(center + focal * major)
    return ConicFoci(p, f1, f2, b_sq)


def _parabola_from_form(a, b, c, lam, vecs, frame: Frame2, p: Plane) -> Parabola2:
    i0 = int(np.argmin(abs(lam)))
    i1 = 1 - i0
    axis = vecs[:, i0]
    across = vecs[:, i1]
    lam1 = lam[i1]
    # in coordinates (x along axis, y across): lam1 y^2 + 2 bx x + 2 by y + c = 0
    bx = float(b @ axis)
    by = float(b @ across)
    if abs(bx) < 1e-300:
        raise DegenerateError("degenerate parabolic section")
    y0 = -by / lam1
    # lam1 (y - y0)^2 + 2 bx x + c - lam1 y0^2 = 0
    x0 = -(c - lam1 * y0 * y0) / (2 * bx)
    four_f = -2 * bx / lam1  # (y-y0)^2 = four_f (x - x0)
    fpar = four_f / 4.0
    vertex = x0 * axis + y0 * across
    focus = vertex + fpar * axis
    dpoint = vertex - fpar * axis
    return Parabola2(
        p,
        frame.to3(focus),
        Line3(frame.to3(dpoint), across[0] * frame.e1 + across[1] * frame.e2),
    )


# -- tangency ----------------------------------------------------------------


def _dual_quadratic_in_offset(cstar: np.ndarray, nrm: np.ndarray) -> tuple[float, float, float]:
    """Coefficients of ``l^T C* l`` for ``l = (n1, n2, -t)`` as a polynomial in t."""
    n3 = np.array([nrm[0], nrm[1], 0.0])
    e3 = np.array([0.0, 0.0, -1.0])
    return float(e3 @ cstar @ e3), float(2 * n3 @ cstar @ e3), float(n3 @ cstar @ n3)


def tangency_gap(conic: Conic, frame: Frame2, point2, direction2) -> float:
    """Distance from an in-plane line to the nearest parallel tangent of the conic.

    Falls back to the distance to the nearest tangent of any direction
    through the line's point when no parallel tangent exists.
    """
    d = np.asarray(direction2, dtype=float)
    d = d / np.linalg.norm(d)
    nrm = np.array([-d[1], d[0]])
    t0 = float(nrm @ np.asarray(point2, dtype=float))
    cstar = _adjugate(conic_matrix(conic, frame))
    qa, qb, qc = _dual_quadratic_in_offset(cstar, nrm)
    roots = _real_roots(qa, qb, qc)
    if roots:
        return min(abs(t0 - r) for r in roots)
    return math.inf


def _real_roots(a: float, b: float, c: float) -> list[float]:
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        return []
    if abs(a) <= 1e-14 * scale:
        return [] if abs(b) <= 1e-300 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0:
        return [0.0, 0.0]
    return [q / a, c / q]


def tangent_directions(conic: Conic, frame: Frame2, point2) -> list[np.ndarray]:
    """Directions of the (0-2) tangents through an in-plane point.

    The pencil of lines through the point is parametrized by direction
    ``(c, s)``; ``l^T C* l`` is a binary quadratic form whose null vectors
    are the tangents.
    """
    px, py = np.asarray(point2, dtype=float)
    cstar = _adjugate(conic_matrix(conic, frame))
    cstar = cstar / np.max(np.abs(cstar))
    l1 = np.array([0.0, 1.0, -py])
    l2 = np.array([-1.0, 0.0, px])
    q = np.array([[l1 @ cstar @ l1, l1 @ cstar @ l2], [l1 @ cstar @ l2, l2 @ cstar @ l2]])
    lam, w = np.linalg.eigh(q)
    big = max(abs(lam))
    if big == 0:
        return []
    if lam[0] > 1e-13 * big or lam[1] < -1e-13 * big:
        return []
    if min(abs(lam)) <= 1e-13 * big:
        i = int(np.argmin(abs(lam)))
        return [w[:, i]]
    neg, pos = w[:, 0], w[:, 1]
    a, b = math.sqrt(-lam[0]), math.sqrt(lam[1])
    return [unit(b * neg + a * pos), unit(b * neg - a * pos)]


def tangent_lines(conic: Conic, p, tol: Tolerance = DEFAULT_TOL) -> list[Line3]:
    p = vec(p)
    if abs(conic.plane.signed_distance(p)) > tol.length:
        raise DomainError("point off the conic's plane")
    frame = Frame2(conic.plane, p)
    out = []
    for d in tangent_directions(conic, frame, frame.to2(p)):
        out.append(Line3(p, d[0] * frame.e1 + d[1] * frame.e2))
    return out


def focal_product(conic: ConicFoci, line: Line3) -> float:
    """Product of the signed distances of the foci to an in-plane line."""
    nrm = unit(np.cross(conic.plane.n, line.dir))
    return float((conic.f1 - line.point) @ nrm) * float((conic.f2 - line.point) @ nrm)


# -- Laguerre and closure ----------------------------------------------------


def laguerre_residual(sigma_circle: Circle3, conic: ConicFoci) -> float:
    """``((R^2 - d1^2)(R^2 - d2^2) - 4 R^2 b^2) / R^4``."""
    big_r2 = sigma_circle.r**2
    d1 = float(np.sum((sigma_circle.center - conic.f1) ** 2))
    d2 = float(np.sum((sigma_circle.center - conic.f2) ** 2))
    return ((big_r2 - d1) * (big_r2 - d2) - 4.0 * big_r2 * conic.b_sq) / big_r2**2


def parabola_criterion(sigma_circle: Circle3, par: Parabola2) -> float:
    return abs(float(np.linalg.norm(sigma_circle.center - par.focus)) - sigma_circle.r)


def _second_intersection(center2, radius, a2, d2) -> np.ndarray:
    t = -2.0 * float(d2 @ (a2 - center2))
    return a2 + t * d2


def poncelet_triangle(
    sigma_circle: Circle3, conic: Conic, angle: float, angle_tol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float] | None:
    """Walk A -> B -> C along tangents from the start at ``angle``.

    Returns the three vertices (3D) and the tangency gap of the closing side
    CA, or ``None`` when the start is unusable.
    """
    frame = Frame2(sigma_circle.plane, sigma_circle.center)
    o = np.zeros(2)
    a = sigma_circle.r * np.array([math.cos(angle), math.sin(angle)])
    dirs = tangent_directions(conic, frame, a)
    if len(dirs) < 2:
        return None
    d_ab = dirs[0]
    b = _second_intersection(o, sigma_circle.r, a, d_ab)
    dirs_b = tangent_directions(conic, frame, b)
    if len(dirs_b) < 2:
        return None
    sep = [abs(math.asin(max(-1.0, min(1.0, d[0] * d_ab[1] - d[1] * d_ab[0])))) for d in dirs_b]
    if max(sep) <= angle_tol or abs(sep[0] - sep[1]) <= angle_tol and min(sep) <= angle_tol:
        return None
    d_bc = dirs_b[int(np.argmax(sep))]
    if min(sep) > 1e-5:
        return None  # neither tangent through B is the incoming line
    c = _second_intersection(o, sigma_circle.r, b, d_bc)
    if np.linalg.norm(c - a) <= 1e-12 * sigma_circle.r:
        return None
    gap = tangency_gap(conic, frame, c, a - c)
    return frame.to3(a), frame.to3(b), frame.to3(c), gap


def closure_oracle(
    sigma_circle: Circle3,
    conic: Conic,
    n_starts: int = 20,
    tol: Tolerance | None = None,
    phase: float = 0.1234,
) -> ClosureResult:
    """Poncelet closure test over ``n_starts`` evenly spread starts."""
    tol = tol or Tolerance(1e-9, 0.0, sigma_circle.r)
    per_start, skipped = [], 0
    for j in range(n_starts):
        tri = poncelet_triangle(sigma_circle, conic, phase + 2.0 * math.pi * j / n_starts)
        if tri is None:
            skipped += 1
            continue
        per_start.append(tri[3])
    if len(per_start) < 3:
        raise DegenerateError(f"only {len(per_start)} usable starts; closure inconclusive")
    worst = max(per_start)
    return ClosureResult(worst <= tol.length, worst, per_start, skipped)


# -- Thebault and the 3-pair family ------------------------------------------


def pair_cone(alpha: Sphere, beta: Sphere, p: Plane) -> tuple[Cone, int]:
    """Common tangent cone of two spheres touching ``p`` whose apex is off ``p``.

    Spheres on opposite sides of the plane share the external cone
    (``sign k = +1``); on the same side the internal one (``sign k = -1``).
    """
    same_side = p.signed_distance(alpha.center) * p.signed_distance(beta.center) > 0
    if same_side:
        return tangent_cone(alpha, beta, internal=True), -1
    return tangent_cone(alpha, beta, internal=False), 1


def thebault_b2(alpha: Sphere, beta: Sphere, p: Plane, tol: Tolerance = DEFAULT_TOL) -> tuple[float, ConicFoci, int]:
    """Residual ``|b^2 - r_a r_b sign k|`` of the section of the pair's cone by p."""
    for s in (alpha, beta):
        if abs(abs(p.signed_distance(s.center)) - s.r) > tol.length:
            raise DomainError("sphere does not touch the plane")
    cone, sign_k = pair_cone(alpha, beta, p)
    sigma = conic_from_cone_plane(cone, p, tol)
    if not isinstance(sigma, ConicFoci):
        raise DegenerateError("parabolic section")
    return abs(sigma.b_sq - alpha.r * beta.r * sign_k), sigma, sign_k


def sphere_touching(gamma: Sphere, p: Plane, foot, side: int, external: bool) -> Sphere | None:
    """Sphere touching ``p`` at ``foot`` on the given side and touching ``gamma``.

    With ``w = c_gamma - foot`` and ``h = side * (n . w)``, tangency reads
    ``|w|^2 - r_gamma^2 = 2 r (h +- r_gamma)``.
    """
    foot = p.project(foot)
    w = gamma.center - foot
    h = side * float(p.n @ w)
    pw = float(w @ w) - gamma.r**2
    den = 2.0 * (h + (gamma.r if external else -gamma.r))
    if den == 0:
        return None
    r = pw / den
    if not r > 0:
        return None
    return Sphere(foot + side * r * p.n, r)


@dataclass
class SamplerRecord:
    laguerre: float
    closure: float
    closed: bool
    relation: float
    classes: tuple[int, int]


def family_pair_instance(
    p: Plane, circle: Circle3, gamma: Sphere, rng: np.random.Generator, cross_class: bool = True,
    n_starts: int = 20, max_tries: int = 200,
) -> tuple[SamplerRecord, int]:
    """One pair of spheres tangent to ``gamma`` and ``p`` and its 3-pair test.

    Returns the record and the number of resampled draws.
    """
    from .apollonius import m_class

    tol = Tolerance(1e-9, 0.0, circle.r)
    resampled = 0
    for _ in range(max_tries):
        picks = []
        for want in ((1, -1) if cross_class else (1, 1)):
            s = None
            for _inner in range(100):
                foot = circle.center + circle.r * 1.6 * _rand_disc(rng, circle.plane)
                side = int(rng.choice((-1, 1)))
                external = bool(rng.integers(2))
                cls = (1 if external else -1) * side
                if cls != want:
                    continue
                s = sphere_touching(gamma, p, foot, side, external)
                if s is not None and 0.02 * circle.r < s.r < 20 * circle.r:
                    break
                s = None
            picks.append(s)
        if any(s is None for s in picks):
            resampled += 1
            continue
        alpha, beta = picks
        try:
            cone, sign_k = pair_cone(alpha, beta, p)
            sigma = conic_from_cone_plane(cone, p, tol)
            if not isinstance(sigma, ConicFoci):
                resampled += 1
                continue
            clo = closure_oracle(circle, sigma, n_starts, Tolerance(1e-7, 0.0, circle.r))
        except (DegenerateError, DomainError):
            resampled += 1
            continue
        lag = laguerre_residual(circle, sigma)
        # Laguerre with b^2 taken from the Thebault value r_a r_b sign k
        big_r2 = circle.r**2
        fa, fb = p.project(alpha.center), p.project(beta.center)
        relation = abs(
            (big_r2 - float(np.sum((circle.center - fa) ** 2)))
            * (big_r2 - float(np.sum((circle.center - fb) ** 2)))
            - 4.0 * big_r2 * alpha.r * beta.r * sign_k
        ) / big_r2**2
        classes = (m_class(alpha, gamma, p, Tolerance(1e-8, 0, circle.r)), m_class(beta, gamma, p, Tolerance(1e-8, 0, circle.r)))
        return SamplerRecord(lag, clo.residual, clo.closed, relation, classes), resampled
    raise DegenerateError("could not sample an admissible sphere pair")


def _rand_disc(rng: np.random.Generator, plane: Plane) -> np.ndarray:
    e1, e2 = orthonormal_pair(plane.n)
    rad = math.sqrt(rng.uniform())
    ang = rng.uniform(0, 2 * math.pi)
    return rad * (math.cos(ang) * e1 + math.sin(ang) * e2)


def family_sampler(
    p: Plane, circle: Circle3, gamma: Sphere, n: int, rng: np.random.Generator, cross_class: bool = True
) -> tuple[list[SamplerRecord], int]:
    if abs(p.signed_distance(circle.center)) > 1e-9 * circle.r:
        raise DomainError("circle is not on the plane")
    h = p.signed_distance(gamma.center)
    if abs(gamma.r**2 - h * h - circle.r**2) > 1e-9 * circle.r**2 or np.linalg.norm(
        p.project(gamma.center) - circle.center
    ) > 1e-9 * circle.r:
        raise DomainError("circle is not the section of gamma by the plane")
    recs, resampled = [], 0
    for _ in range(n):
        rec, k = family_pair_instance(p, circle, gamma, rng, cross_class)
        recs.append(rec)
        resampled += k
    return recs, resampled


# -- Euler-Chapple -----------------------------------------------------------


def triangle_centers_2d(a, b, c):
    """Incenter, inradius, excenters, exradii, circumcenter, circumradius."""
    a, b, c = (vec(x) for x in (a, b, c))
    la = float(np.linalg.norm(b - c))
    lb = float(np.linalg.norm(c - a))
    lc = float(np.linalg.norm(a - b))
    area = 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))
    if area <= 1e-14 * max(la, lb, lc) ** 2:
        raise DegenerateError("degenerate triangle")
    s = 0.5 * (la + lb + lc)
    incenter = (la * a + lb * b + lc * c) / (2 * s)
    r = area / s
    ex = [
        (-la * a + lb * b + lc * c) / (-la + lb + lc),
        (la * a - lb * b + lc * c) / (la - lb + lc),
        (la * a + lb * b - lc * c) / (la + lb - lc),
    ]
    exr = [area / (s - la), area / (s - lb), area / (s - lc)]
    big_r = la * lb * lc / (4 * area)
    from .core_geom import circumcircle

    cc = circumcircle(a, b, c)
    return incenter, r, ex, exr, cc.center, big_r


def euler_chapple_residuals(a, b, c) -> tuple[float, list[float]]:
    incenter, r, ex, exr, o, big_r = triangle_centers_2d(a, b, c)
    d2 = float(np.sum((incenter - o) ** 2))
    res1 = abs(d2 - (big_r**2 - 2 * big_r * r)) / big_r**2
    res2 = [abs(float(np.sum((e - o) ** 2)) - (big_r**2 + 2 * big_r * re)) / big_r**2 for e, re in zip(ex, exr)]
    return res1, res2


# -- random circle/conic pairs -------------------------------------------------


def random_circle_conic(
    rng: np.random.Generator, satisfy: bool, hyperbola: bool = False, spread: float = 0.5
) -> tuple[Circle3, ConicFoci]:
    """Unit circle and a coplanar conic, on or off the Laguerre relation.

    Foci are drawn inside the circle (one outside for a hyperbola), ``b^2``
    is solved from the relation and, when ``satisfy`` is false, scaled by
    ``exp(u)`` with ``0.02 <= |u| <= spread``.
    """
    plane = Plane(vec([0.0, 0.0, 1.0]), 0.0)
    sigma = Circle3(plane, np.zeros(3), 1.0)

    def disc(lo, hi):
        rad = math.sqrt(rng.uniform(lo * lo, hi * hi))
        ang = rng.uniform(0.0, 2.0 * math.pi)
        return vec([rad * math.cos(ang), rad * math.sin(ang), 0.0])

    while True:
        f1 = disc(0.0, 0.9)
        f2 = disc(1.1, 2.0) if hyperbola else disc(0.0, 0.9)
        d1, d2 = float(f1 @ f1), float(f2 @ f2)
        b_sq = (1.0 - d1) * (1.0 - d2) / 4.0
        if not satisfy:
            u = rng.uniform(0.02, spread) * rng.choice((-1.0, 1.0))
            b_sq *= math.exp(u)
        # a hyperbola needs |b^2| below the squared focal half-distance
        if b_sq + 0.25 * float(np.sum((f1 - f2) ** 2)) > 1e-3:
            return sigma, ConicFoci(plane, f1, f2, b_sq)


def random_thebault_pair(rng: np.random.Generator, same_side: bool) -> tuple[Sphere, Sphere, Plane]:
    """Two spheres resting on the plane ``z = 0`` with a usable common cone.

    ``same_side`` puts both above the plane (internal cone, ``sign k = -1``);
    otherwise the second hangs below it (external cone, ``sign k = +1``).
    """
    p = Plane(vec([0.0, 0.0, 1.0]), 0.0)
    while True:
        ra, rb = rng.uniform(0.2, 1.0, size=2)
        fa, fb = rng.uniform(-2.0, 2.0, size=2), rng.uniform(-2.0, 2.0, size=2)
        sb = 1.0 if same_side else -1.0
        alpha = Sphere([fa[0], fa[1], ra], ra)
        beta = Sphere([fb[0], fb[1], sb * rb], rb)
        try:
            cone, _ = pair_cone(alpha, beta, p)
            sigma = conic_from_cone_plane(cone, p)
        except (DegenerateError, DomainError):
            continue
        if isinstance(sigma, ConicFoci):
            return alpha, beta, p
