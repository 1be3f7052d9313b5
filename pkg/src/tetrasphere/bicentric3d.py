"""Tetrahedra inscribed in a sphere S with all faces tangent to a sphere T.

The basic construction fixes a face plane ``nu`` tangent to T and two
vertices ``A, B`` on the circle ``S & nu``.  Every line in ``nu`` has exactly
one more tangent plane to T through it, so the third vertex ``C`` determines
the opposite vertex ``P`` as the meeting point of the three such planes;
``C`` is then solved for ``P`` on S.  The Poncelet view (apex fixed, the
face triangle sliding between the section circle and the section of the
apex's tangent cone) is used as an independent check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core_geom import (
    Circle3,
    Cone,
    DegenerateError,
    DomainError,
    Plane,
    Sphere,
    TheoremViolation,
    Tolerance,
    pencil_limit_points,
    plane_through,
    unit,
    vec,
)
from .poncelet_pairs import (
    ConicFoci,
    Parabola2,
    closure_oracle,
    conic_from_cone_plane,
    laguerre_residual,
    parabola_criterion,
    poncelet_triangle,
)
from .tetra_spheres import (
    GracePair,
    Tetrahedron,
    grace_pairs,
    grace_sphere,
    random_tetrahedron,
    tangent_spheres,
)

__all__ = [
    "Position",
    "BicentricConfig",
    "RotationSample",
    "Reality",
    "reality_criterion",
    "tangent_plane",
    "section_circle",
    "other_tangent_plane",
    "apex_of_triangle",
    "solve_apex",
    "construct_bicentric",
    "sample_with_face",
    "sample_with_vertex",
    "constructive_reality",
    "random_real_config",
    "random_face_plane",
    "apex_locus_check",
    "fixed_sphere_scan",
    "power_radius",
    "fixed_grace_sphere_check",
    "durrande_refutation",
]


class Position(enum.Enum):
    NESTED = "nested"  # T inside S
    EXTERNAL = "external"
    CROSSING = "crossing"
    CONTAINING = "containing"  # S inside T
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class BicentricConfig:
    S: Sphere  # circumscribed
    T: Sphere  # tangent to every face plane

    @property
    def d(self) -> float:
        return float(np.linalg.norm(self.T.center - self.S.center))

    @property
    def R(self) -> float:
        return self.S.r

    @property
    def r(self) -> float:
        return self.T.r

    def position(self, tol: float = 1e-12) -> Position:
        d, R, r = self.d, self.R, self.r
        eps = tol * max(R, r)
        if min(abs(d - (R + r)), abs(d - abs(R - r))) <= eps:
            return Position.BOUNDARY
        if d > R + r:
            return Position.EXTERNAL
        if d < R - r:
            return Position.NESTED
        if d < r - R:
            return Position.CONTAINING
        return Position.CROSSING

    @classmethod
    def coaxial(cls, R: float, r: float, d: float) -> "BicentricConfig":
        return cls(Sphere([0.0, 0.0, 0.0], R), Sphere([d, 0.0, 0.0], r))


# -- reality ------------------------------------------------------------------


@dataclass
class Reality:
    real: bool
    case: str  # "a", "b", "c", or "none"
    margin: float  # bound - d^2 for cases a and c, scaled by R^2
    position: Position
    flags: list[str] = field(default_factory=list)


def reality_criterion(cfg: BicentricConfig, tol: float = 1e-12) -> Reality:
    """Whether a real tetrahedron inscribed in S and circumscribed about T exists."""
    d2, R, r = cfg.d**2, cfg.R, cfg.r
    pos = cfg.position(tol)
    if pos is Position.BOUNDARY:
        return Reality(False, "none", 0.0, pos, ["tangent-position"])
    if pos is Position.NESTED:
        margin = ((R + r) * (R - 3 * r) - d2) / R**2
        return Reality(margin >= -tol, "a", margin, pos)
    if pos is Position.EXTERNAL:
        return Reality(True, "b", math.inf, pos)
    if pos is Position.CROSSING:
        margin = ((R - r) * (R + 3 * r) - d2) / R**2
        return Reality(margin >= -tol, "c", margin, pos)
    return Reality(False, "none", -math.inf, pos)


# -- planes tangent to T ------------------------------------------------------


def tangent_plane(T: Sphere, m) -> Plane:
    """Plane touching T at ``T.center + r m``, normal ``m`` pointing away from T."""
    m = unit(vec(m))
    return Plane(m, float(m @ T.center) + T.r)


def section_circle(S: Sphere, p: Plane) -> Circle3:
    h = p.signed_distance(S.center)
    if abs(h) >= S.r:
        raise DomainError("plane misses the circumsphere: no real face")
    return Circle3(p, p.project(S.center), math.sqrt(S.r**2 - h * h))


def _other_normals(points: np.ndarray, dirs: np.ndarray, T: Sphere, nu: Plane) -> np.ndarray:
    """Unit normals of the tangent planes to T through the given lines, other than ``nu``.

    Rows where the line meets T get NaN.
    """
    u = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    w = T.center - points
    w = w - np.sum(w * u, axis=1)[:, None] * u
    length = np.linalg.norm(w, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        e1 = w / length[:, None]
        e2 = np.cross(u, e1)
        t = np.arccos(np.clip(T.r / length, -1.0, 1.0))
        cands = [np.cos(t)[:, None] * e1 + s * np.sin(t)[:, None] * e2 for s in (1.0, -1.0)]
        par = np.stack([np.abs(c @ nu.n) for c in cands], axis=1)
        pick = np.argmin(par, axis=1)
        n = np.where(pick[:, None] == 0, cands[0], cands[1])
    n[length <= T.r * (1 + 1e-12)] = np.nan
    return n


def other_tangent_plane(p, q, T: Sphere, nu: Plane) -> Plane:
    """The tangent plane to T through line ``pq`` other than ``nu``."""
    n = _other_normals(vec(p)[None], (vec(q) - vec(p))[None], T, nu)[0]
    if not np.all(np.isfinite(n)):
        raise DegenerateError("line meets the tangent sphere")
    return Plane(n, float(n @ vec(p)))


def _apexes(A, B, C: np.ndarray, T: Sphere, nu: Plane) -> np.ndarray:
    """Opposite vertex for each row of ``C`` (NaN where undefined)."""
    m = len(C)
    A = np.broadcast_to(vec(A), (m, 3))
    B = np.broadcast_to(vec(B), (m, 3))
    pts = np.stack([A, B, C], axis=1)
    nxt = np.stack([B, C, A], axis=1)
    normals = _other_normals(pts.reshape(-1, 3), (nxt - pts).reshape(-1, 3), T, nu).reshape(m, 3, 3)
    rhs = np.einsum("mij,mij->mi", normals, pts)
    out = np.full((m, 3), np.nan)
    ok = np.all(np.isfinite(normals), axis=(1, 2))
    if np.any(ok):
        det = np.linalg.det(normals[ok])
        good = np.abs(det) > 1e-12
        idx = np.flatnonzero(ok)[good]
        out[idx] = np.linalg.solve(normals[idx], rhs[idx][..., None])[..., 0]
    return out


def apex_of_triangle(A, B, C, T: Sphere, nu: Plane) -> np.ndarray:
    P = _apexes(A, B, vec(C)[None], T, nu)[0]
    if not np.all(np.isfinite(P)):
        raise DegenerateError("side planes do not meet in a point")
    return P


def solve_apex(
    cfg: BicentricConfig, nu: Plane, a_angle: float, b_angle: float, n_scan: int = 360, gap: float = 1e-3
) -> list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Triangles ``ABC`` on the section circle of ``nu`` whose apex lies on S.

    ``A`` and ``B`` sit at the given angles; ``C`` is scanned and refined.
    Near ``C = A`` and ``C = B`` the apex is undefined and changes sign
    spuriously, so a neighbourhood of width ``gap`` (radians) is skipped.
    """
    sc = section_circle(cfg.S, nu)
    A, B = sc.point(a_angle), sc.point(b_angle)
    if np.linalg.norm(A - B) <= gap * sc.r:
        return []

    def f_many(angles):
        C = np.array([sc.point(t) for t in np.atleast_1d(angles)])
        P = _apexes(A, B, C, cfg.T, nu)
        return (np.sum((P - cfg.S.center) ** 2, axis=1) - cfg.R**2) / cfg.R**2

    def near(t):
        return min(_angdist(t, a_angle), _angdist(t, b_angle)) <= gap

    grid = np.linspace(0.0, 2.0 * math.pi, n_scan, endpoint=False) + a_angle + 0.5 * math.pi / n_scan
    vals = f_many(grid)
    out = []
    for k in range(n_scan):
        lo = grid[k]
        hi = grid[k + 1] if k + 1 < n_scan else grid[0] + 2.0 * math.pi
        va, vb = vals[k], vals[(k + 1) % n_scan]
        if not (np.isfinite(va) and np.isfinite(vb)) or va * vb >= 0:
            continue
        if near(lo) or near(hi) or _between(a_angle, lo, hi) or _between(b_angle, lo, hi):
            continue
        try:
            t = brentq(lambda s: float(f_many(s)[0]), lo, hi, xtol=1e-15)
        except ValueError:
            continue
        C = sc.point(t)
        P = _apexes(A, B, C[None], cfg.T, nu)[0]
        if np.all(np.isfinite(P)):
            out.append((A, B, C, P))
    return out


def _angdist(s: float, t: float) -> float:
    x = (s - t) % (2.0 * math.pi)
    return min(x, 2.0 * math.pi - x)


def _between(x: float, lo: float, hi: float) -> bool:
    x = (x - lo) % (2.0 * math.pi)
    return x <= hi - lo


# -- the Poncelet construction --------------------------------------------------


@dataclass
class RotationSample:
    D: np.ndarray
    pi: Plane
    theta: float
    tetrahedron: Tetrahedron | None
    closure_residual: float  # gap of the closing side at theta
    oracle_residual: float  # worst gap over the evenly spread starts
    laguerre: float
    on_sphere: float
    tangency: float
    closed: bool
    flags: list[str] = field(default_factory=list)


def _d_cone(cfg: BicentricConfig, D) -> Cone:
    w = cfg.T.center - D
    dist = float(np.linalg.norm(w))
    if dist <= cfg.r:
        raise DomainError("apex inside the tangent sphere: no tangent cone")
    return Cone(D, w / dist, math.asin(cfg.r / dist))


def construct_bicentric(
    cfg: BicentricConfig, D, pi: Plane, theta: float, tol: float = 1e-7, n_starts: int = 20
) -> RotationSample:
    """Tetrahedron with apex ``D`` and base in ``pi`` through Poncelet stepping.

    The base triangle is inscribed in ``S & pi`` and circumscribed about the
    section of the tangent cone from ``D`` to T, started at angle ``theta``.
    """
    D = vec(D)
    scale = cfg.R
    if abs(pi.signed_distance(D)) <= 1e-12 * scale:
        raise DomainError("apex lies in the base plane")
    if abs(abs(pi.signed_distance(cfg.T.center)) - cfg.r) > 1e-9 * scale:
        raise DomainError("base plane is not tangent to T")
    sigma_circle = section_circle(cfg.S, pi)
    conic = conic_from_cone_plane(_d_cone(cfg, D), pi)
    if isinstance(conic, ConicFoci):
        lag = laguerre_residual(sigma_circle, conic)
    elif isinstance(conic, Parabola2):
        lag = parabola_criterion(sigma_circle, conic)
    else:
        raise DegenerateError("degenerate cone section")
    flags = []
    try:
        oracle = closure_oracle(sigma_circle, conic, n_starts, Tolerance(tol, 0.0, scale))
        oracle_res = oracle.residual
    except DegenerateError:
        oracle_res = math.nan
        flags.append("oracle-inconclusive")
    tri = poncelet_triangle(sigma_circle, conic, theta)
    if tri is None:
        return RotationSample(D, pi, theta, None, math.nan, oracle_res, lag, math.nan, math.nan, False, flags + ["unusable-start"])
    A, B, C, gap = tri
    try:
        t = Tetrahedron([A, B, C, D])
    except DegenerateError:
        return RotationSample(D, pi, theta, None, gap, oracle_res, lag, math.nan, math.nan, False, flags + ["flat"])
    on_s = float(max(abs(np.linalg.norm(v - cfg.S.center) - cfg.R) for v in t.vertices))
    tang = float(max(abs(abs(t.face_plane(i).signed_distance(cfg.T.center)) - cfg.r) for i in range(4)))
    closed = gap <= tol * scale and tang <= tol * scale and on_s <= tol * scale
    return RotationSample(D, pi, theta, t, gap, oracle_res, lag, on_s, tang, closed, flags)


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    return unit(rng.normal(size=3))


def _construct_retry(cfg, D, pi, rng, theta, tries: int = 10) -> RotationSample:
    """Fixed ``theta`` is used as is; a random start is redrawn when unusable."""
    if theta is not None:
        return construct_bicentric(cfg, D, pi, theta)
    for _ in range(tries):
        s = construct_bicentric(cfg, D, pi, rng.uniform(0.0, 2.0 * math.pi))
        if s.tetrahedron is not None:
            break
    return s


def sample_with_face(
    cfg: BicentricConfig, pi: Plane, rng: np.random.Generator, theta: float | None = None, tries: int = 50
) -> RotationSample:
    """Bicentric tetrahedron with a face in the given plane.

    The apex is found on its locus by solving for a triangle in ``pi``,
    then the tetrahedron is rebuilt from that apex by Poncelet stepping.
    """
    for _ in range(tries):
        a, b = rng.uniform(0.0, 2.0 * math.pi, size=2)
        sols = solve_apex(cfg, pi, a, b)
        if sols:
            D = sols[int(rng.integers(len(sols)))][3]
            return _construct_retry(cfg, D, pi, rng, theta)
    raise TheoremViolation("no apex found for the given face plane")


def sample_with_vertex(
    cfg: BicentricConfig, D, rng: np.random.Generator, theta: float | None = None, tries: int = 50
) -> RotationSample:
    """Bicentric tetrahedron with the given point of S as a vertex.

    A face through ``D`` is chosen among the tangent planes of T through
    ``D``; its other two vertices come from the apex solve, and the face
    opposite ``D`` becomes the base plane for the Poncelet construction.
    """
    D = vec(D)
    if abs(np.linalg.norm(D - cfg.S.center) - cfg.R) > 1e-9 * cfg.R:
        raise DomainError("vertex is not on the circumsphere")
    cone = _d_cone(cfg, D)
    e1, e2 = _perp_pair(cone.axis)
    for _ in range(tries):
        phi = rng.uniform(0.0, 2.0 * math.pi)
        # normal of a tangent plane through D: angle pi/2 - half_angle from the axis
        m = math.sin(cone.half_angle) * cone.axis - math.cos(cone.half_angle) * (
            math.cos(phi) * e1 + math.sin(phi) * e2
        )
        nu = tangent_plane(cfg.T, -m if m @ (D - cfg.T.center) < 0 else m)
        if abs(nu.signed_distance(D)) > 1e-9 * cfg.R:
            continue
        try:
            sc = section_circle(cfg.S, nu)
        except DomainError:
            continue
        a = _angle_on(sc, D)
        sols = solve_apex(cfg, nu, a, rng.uniform(0.0, 2.0 * math.pi))
        if not sols:
            continue
        _, B, C, P = sols[int(rng.integers(len(sols)))]
        pi = plane_through(B, C, P)
        pi = pi if pi.signed_distance(cfg.T.center) < 0 else pi.flipped()
        return _construct_retry(cfg, D, pi, rng, theta)
    raise TheoremViolation("no face found through the given vertex")


def _perp_pair(n):
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = unit(np.cross(n, helper))
    return e1, np.cross(n, e1)


def _angle_on(sc: Circle3, x) -> float:
    p0 = sc.point(0.0) - sc.center
    p1 = sc.point(0.5 * math.pi) - sc.center
    w = vec(x) - sc.center
    return math.atan2(float(w @ p1), float(w @ p0))


def constructive_reality(
    cfg: BicentricConfig, n_planes: int = 8, n_a: int = 4, n_b: int = 90, n_scan: int = 180
) -> bool:
    """Search for one real tetrahedron on a grid of face planes and vertex pairs.

    The configuration is symmetric about the line of centers, so face planes
    are swept by the angle between their normal and that line.
    """
    axis = cfg.T.center - cfg.S.center
    axis = unit(axis) if np.linalg.norm(axis) > 1e-12 * cfg.R else np.array([0.0, 0.0, 1.0])
    e1, _ = _perp_pair(axis)
    for k in range(n_planes):
        ang = math.pi * (k + 0.5) / n_planes
        nu = tangent_plane(cfg.T, math.cos(ang) * axis + math.sin(ang) * e1)
        try:
            section_circle(cfg.S, nu)
        except DomainError:
            continue
        for i in range(n_a):
            a = 2.0 * math.pi * i / n_a
            for j in range(1, n_b):
                if solve_apex(cfg, nu, a, a + 2.0 * math.pi * j / n_b, n_scan):
                    return True
    return False


def random_real_config(rng: np.random.Generator, margin: float = 0.02, external: float = 0.25) -> BicentricConfig:
    """Coaxial Real configuration with ``R = 1``, away from the reality boundary.

    With probability ``external`` T lies outside S; otherwise it is nested
    with ``d^2`` at least ``margin`` below the bound ``(R + r)(R - 3r)``.
    """
    r = rng.uniform(0.1, 0.3)
    if rng.uniform() < external:
        d = rng.uniform(1.0 + r + 0.1, 2.5)
    else:
        bound = (1.0 + r) * (1.0 - 3.0 * r) - margin
        d = math.sqrt(rng.uniform(0.01 * bound, bound))
    return BicentricConfig.coaxial(1.0, r, d)


def random_face_plane(cfg: BicentricConfig, rng: np.random.Generator, tries: int = 1000) -> Plane:
    """Random tangent plane of T that cuts S in a circle."""
    for _ in range(tries):
        p = tangent_plane(cfg.T, _random_unit(rng))
        if abs(p.signed_distance(cfg.S.center)) < cfg.R:
            return p
    raise DomainError("no tangent plane of T cuts S")


# -- apex locus -----------------------------------------------------------------


@dataclass
class ApexLocus:
    plane: Plane
    plane_residual: float
    on_sphere: float
    points: np.ndarray


def apex_locus_check(cfg: BicentricConfig, pi: Plane, n: int, rng: np.random.Generator) -> ApexLocus:
    """Collect apexes over many base triangles in ``pi`` and fit a plane."""
    pts = []
    attempts = 0
    while len(pts) < n:
        attempts += 1
        if attempts > 50 * n:
            raise TheoremViolation("too few apexes found for the locus fit")
        a, b = rng.uniform(0.0, 2.0 * math.pi, size=2)
        for *_, P in solve_apex(cfg, pi, a, b):
            pts.append(P)
    pts = np.array(pts[:n])
    centroid = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centroid)
    plane = Plane(vt[-1], float(vt[-1] @ centroid))
    res = float(np.max(np.abs(pts @ plane.n - plane.d)))
    on_s = float(np.max(np.abs(np.linalg.norm(pts - cfg.S.center, axis=1) - cfg.R)))
    return ApexLocus(plane, res, on_s, pts)


# -- fixed Grace-tangent sphere ---------------------------------------------------


@dataclass
class FixedSphereScan:
    """Radius of the sphere about O_S touching the Grace spheres of many samples."""

    measured: float
    spread: float
    contact: str  # "internal": the fixed sphere encloses each Grace sphere
    values: np.ndarray
    roles: dict[tuple[int, ...], int]


@dataclass
class FixedSphereReport:
    K: np.ndarray | None
    predicted: float  # from the limit-point ratio
    candidates: list[float]
    scan: FixedSphereScan
    residuals: list[float]  # per Grace sphere, against ``predicted``
    power_radius: float  # |R^2 - pow_T(O_S)| / (2 r_T)
    flags: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else math.nan

    @property
    def power_radius_error(self) -> float:
        return abs(self.scan.measured - self.power_radius)


def _grace_for(t: Tetrahedron, T: Sphere):
    ts = tangent_spheres(t)
    eps = ts.find(T, Tolerance(1e-7, 0.0, t.scale))
    if eps is None:
        raise TheoremViolation("T is not a tangent sphere of the sample")
    pairs = [p for p in grace_pairs(ts, t) if eps in (p.first, p.second)]
    return eps, [grace_sphere(t, ts, p).sphere for p in pairs]


def fixed_sphere_scan(cfg: BicentricConfig, n: int, rng: np.random.Generator, max_tries: int = 20) -> FixedSphereScan:
    """Rotate the tetrahedron through ``n`` samples and measure the fixed sphere.

    For every Grace sphere touching T both concentric contact radii
    ``dist + r_G`` and ``|dist - r_G|`` are recorded; the branch with the
    smaller spread over all samples is the fixed sphere.
    """
    encl, other, roles = [], [], {}
    made = failures = 0
    while made < n:
        pi = random_face_plane(cfg, rng)
        try:
            s = sample_with_face(cfg, pi, rng)
        except (TheoremViolation, DomainError, DegenerateError):
            s = None
        if s is None or s.tetrahedron is None or not s.closed:
            failures += 1
            if failures > max_tries * n:
                raise TheoremViolation("could not sample the rotation")
            continue
        eps, spheres = _grace_for(s.tetrahedron, cfg.T)
        roles[eps] = roles.get(eps, 0) + 1
        for g in spheres:
            dist = float(np.linalg.norm(g.center - cfg.S.center))
            encl.append(dist + g.r)
            other.append(abs(dist - g.r))
        made += 1
    encl, other = np.array(encl), np.array(other)
    if np.ptp(encl) <= np.ptp(other):
        return FixedSphereScan(float(np.mean(encl)), float(np.ptp(encl)), "internal", encl, roles)
    return FixedSphereScan(float(np.mean(other)), float(np.ptp(other)), "external", other, roles)


def power_radius(cfg: BicentricConfig) -> float:
    """``|R^2 - pow_T(O_S)| / (2 r_T)``, the radius observed for the fixed sphere."""
    return abs(cfg.R**2 - (cfg.d**2 - cfg.r**2)) / (2.0 * cfg.r)


def fixed_grace_sphere_check(
    cfg: BicentricConfig, n: int, rng: np.random.Generator, tol: float = 1e-7
) -> FixedSphereReport:
    """Compare the fixed sphere with the radius ``(O_S K / O_T K) r_T``.

    Both limit points of the pencil of S and T are tried; the one closer to
    the measured radius is reported, flagged when neither or both agree.
    """
    if cfg.d <= 1e-12 * cfg.R:
        raise DomainError("concentric spheres: the limit points are undefined")
    limits = pencil_limit_points(cfg.S, cfg.T)
    if limits is None:
        raise DomainError("crossing spheres: imaginary limit points")
    scan = fixed_sphere_scan(cfg, n, rng)
    preds = [float(np.linalg.norm(K - cfg.S.center) / np.linalg.norm(K - cfg.T.center)) * cfg.r for K in limits]
    errs = [abs(p - scan.measured) for p in preds]
    good = [i for i, e in enumerate(errs) if e <= tol * cfg.R]
    flags = []
    if len(good) != 1:
        flags.append("limit-point-" + ("ambiguous" if good else "none"))
    pick = int(np.argmin(errs))
    residuals = [float(abs(v - preds[pick])) for v in scan.values]
    return FixedSphereReport(limits[pick], preds[pick], preds, scan, residuals, power_radius(cfg), flags)


# -- Durrande -------------------------------------------------------------------


@dataclass
class DurrandeReport:
    residuals: np.ndarray
    threshold: float
    fraction: float

    @property
    def passed(self) -> bool:
        return self.fraction >= 0.9


def durrande_residual(t: Tetrahedron) -> float:
    """``|d^2 - (R + r)(R - 3r)| / R^2`` for circumsphere R and insphere r."""
    cs = t.circumsphere()
    ins = tangent_spheres(t).spheres[(1, 1, 1, 1)]
    d2 = float(np.sum((cs.center - ins.center) ** 2))
    return abs(d2 - (cs.r + ins.r) * (cs.r - 3 * ins.r)) / cs.r**2


def durrande_refutation(n: int, rng: np.random.Generator, threshold: float = 1e-3) -> DurrandeReport:
    res = np.array([durrande_residual(random_tetrahedron(rng)) for _ in range(n)])
    return DurrandeReport(res, threshold, float(np.mean(res > threshold)))
