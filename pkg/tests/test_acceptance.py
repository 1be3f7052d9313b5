"""Acceptance suite: one or more tests per criterion, at the stated tolerances.

Each part is recorded through the ``criterion`` fixture; the terminal summary
prints one PASS/FAIL line per criterion (see ``conftest.py``).
"""

import math
import time

import numpy as np
import pytest

from tetrasphere import bicentric3d as bc
from tetrasphere import feuerbach_lift as fl
from tetrasphere import poncelet_pairs as pp
from tetrasphere.cli import main
from tetrasphere.core_geom import DEFAULT_TOL, Circle3, DegenerateError, Plane, Sphere, Tolerance, vec
from tetrasphere.euler_cone import verify_vertex
from tetrasphere.suites import SUITES, run_instance, run_suite
from tetrasphere.tetra_spheres import (
    SIGN_VECTORS,
    Tetrahedron,
    cos_product_check,
    grace_pairs,
    grace_radii_check,
    grace_sphere,
    random_tetrahedron,
    regular_tetrahedron,
    sign_class,
    tangent_spheres,
)


def _goofs_match_area_sums(t: Tetrahedron) -> bool:
    ts = tangent_spheres(t)
    thr = DEFAULT_TOL.with_scale(t.scale).area
    return all((eps in ts.spheres) == (abs(float(np.array(eps) @ t.areas)) > thr) for eps in SIGN_VECTORS)


# -- 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_c01_tangent_spheres(criterion):
    rng = np.random.default_rng(1001)
    worst, counts, goofs_ok = 0.0, set(), True
    for _ in range(500):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        worst = max(worst, max(ts.residuals.values()) / t.scale)
        counts.add(len(ts))
        goofs_ok &= _goofs_match_area_sums(t)
    ok = criterion.check("face tangency / scale, 500 tetrahedra", worst, 1e-9)

    # half-turn symmetric: S0 = S1 and S2 = S3, two goofs vanish
    p, q = np.array([0.9, 0.2, 0.7]), np.array([0.3, -0.8, -0.4])
    half = np.diag([-1.0, -1.0, 1.0])
    sym = Tetrahedron([p, half @ p, q, half @ q])
    # all faces congruent: every goof vanishes
    disph = Tetrahedron([[1, 0.6, 0.3], [1, -0.6, -0.3], [-1, 0.6, -0.3], [-1, -0.6, 0.3]])
    extra = [len(tangent_spheres(sym)) == 6, len(tangent_spheres(disph)) == 5]
    goofs_ok &= all(_goofs_match_area_sums(t) for t in (sym, disph)) and all(extra)
    ok &= criterion.flag("goofs absent iff |sum eps S| <= threshold", goofs_ok, f"random counts {sorted(counts)}")

    ts = tangent_spheres(regular_tetrahedron())
    r_in = ts.spheres[(1, 1, 1, 1)].r
    r_ex = [s.r for eps, s in ts if sign_class(eps)[0] == "exsphere"]
    gap = max(abs(r_in - 1 / math.sqrt(3)), *(abs(r - 2 / math.sqrt(3)) for r in r_ex))
    ok &= criterion.flag("regular: 5 spheres", len(ts) == 5 and len(r_ex) == 4, f"{len(ts)} spheres")
    ok &= criterion.check("regular: r_in, r_ex", gap, 1e-12)
    assert ok


# -- 2 -------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_c02_grace_spheres(criterion):
    rng = np.random.default_rng(1002)
    through = tang = 0.0
    counts = set()
    for _ in range(100):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        pairs = grace_pairs(ts, t)
        counts.add(len(pairs))
        for p in pairs:
            g = grace_sphere(t, ts, p)
            through = max(through, g.through_residual / t.scale)
            tang = max(tang, max(g.tangency_residuals) / t.scale)
    ok = criterion.flag("16 spheres per tetrahedron", counts == {16}, f"counts {sorted(counts)}")
    ok &= criterion.check("through face vertices / scale", through, 1e-9)
    ok &= criterion.check("tangent to both pair members / scale", tang, 1e-8)
    assert ok


# -- 3 -------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_c03_euler_cones(criterion):
    rng = np.random.default_rng(1003)
    tang = axis = plane = 0.0
    for _ in range(100):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for v in range(4):
            vc = verify_vertex(t, v, ts, n_scan=360)
            tang = max(tang, vc.tangency)
            axis = max(axis, vc.axis_angle)
            plane = max(plane, vc.plane_singular)
    ok = criterion.check("cone tangent to all eight spheres / scale", tang, 1e-7)
    ok &= criterion.check("axis angle vs six-feet cone (rad)", axis, 1e-7)
    ok &= criterion.check("Euler plane singular value", plane, 1e-8)
    assert ok


# -- 4 -------------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_c04_laguerre_closure(criterion):
    rng = np.random.default_rng(1004)
    disagree = band = inconclusive = 0
    sides = {True: 0, False: 0}
    for i in range(500):
        sigma, conic = pp.random_circle_conic(rng, satisfy=i % 2 == 0, hyperbola=(i // 2) % 2 == 1)
        lag = abs(pp.laguerre_residual(sigma, conic))
        if 1e-8 < lag < 1e-4:
            band += 1
            continue
        try:
            clo = pp.closure_oracle(sigma, conic, 20, Tolerance(1e-7, 0.0, sigma.r))
        except DegenerateError:
            inconclusive += 1
            continue
        sides[lag <= 1e-8] += 1
        disagree += (lag <= 1e-8) != clo.closed
    detail = f"{disagree} of {sum(sides.values())} ({sides[True]} on, {sides[False]} off; {band} in band, {inconclusive} inconclusive)"
    ok = criterion.flag("500 pairs: zero disagreements", disagree == 0 and min(sides.values()) >= 100, detail)

    p = Plane(vec([0.0, 0.0, 1.0]), 0.0)
    h = 0.3
    gamma = Sphere([0.0, 0.0, h], 1.0)
    circle = Circle3(p, np.zeros(3), math.sqrt(1.0 - h * h))
    cross, _ = pp.family_sampler(p, circle, gamma, 100, np.random.default_rng(1014))
    n_closed = sum(r.closed and abs(r.laguerre) <= 1e-8 for r in cross)
    ok &= criterion.flag("100 cross-class pairs close", n_closed == 100, f"{n_closed}/100")
    same, _ = pp.family_sampler(p, circle, gamma, 100, np.random.default_rng(1024), cross_class=False)
    n_open = sum(not r.closed for r in same)
    ok &= criterion.flag("same-class control fails", n_open == 100, f"{n_open}/100 do not close")
    assert ok


# -- 5 -------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c05_euler_chapple(criterion):
    rng = np.random.default_rng(1005)
    worst = 0.0
    for _ in range(1000):
        tf = fl.random_triangle(rng)
        r1, r2 = pp.euler_chapple_residuals(tf.A, tf.B, tf.C)
        worst = max(worst, r1, *r2)
    ok = criterion.check("1000 triangles", worst, 1e-10)

    inc, r, ex, exr, o, big_r = pp.triangle_centers_2d([4, 0, 0], [0, 3, 0], [0, 0, 0])
    d2 = float(np.sum((inc - o) ** 2))
    dc2 = float(np.sum((ex[int(np.argmax(exr))] - o) ** 2))
    ok &= criterion.check("3-4-5: d^2 = 1.25, d_C^2 = 36.25", max(abs(d2 - 1.25), abs(dc2 - 36.25)), 1e-12)
    assert ok


# -- 6 -------------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_c06_thebault(criterion):
    rng = np.random.default_rng(1006)
    worst = 0.0
    signs = set()
    for i in range(200):
        a, b, p = pp.random_thebault_pair(rng, same_side=i % 2 == 1)
        res, _, sign_k = pp.thebault_b2(a, b, p)
        scale = max(a.r, b.r, float(np.linalg.norm(a.center - b.center)))
        worst = max(worst, res / scale**2)
        signs.add(sign_k)
    ok = criterion.check("|b^2 - r_a r_b sign k| / scale^2", worst, 1e-8)
    ok &= criterion.flag("both sign branches", signs == {1, -1}, f"signs {sorted(signs)}")
    assert ok


# -- 7 -------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_c07_cos_product(criterion):
    rng = np.random.default_rng(1007)
    worst, n = 0.0, 0
    signs = set()
    while n < 500:
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        for p in grace_pairs(ts, t)[: 500 - n]:
            worst = max(worst, cos_product_check(t, ts, p))
            signs.add(p.k > 0)
            n += 1
    ok = criterion.check("|cos cos - sign k|, 500 instances", worst, 1e-8)
    ok &= criterion.flag("both signs", signs == {True, False})
    assert ok


# -- 8 -------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_c08_grace_radii(criterion):
    rng = np.random.default_rng(1008)
    radius = product = 0.0
    for _ in range(100):
        t = random_tetrahedron(rng)
        ts = tangent_spheres(t)
        pairs = grace_pairs(ts, t)
        p = pairs[int(rng.integers(len(pairs)))]
        gr = grace_radii_check(t, ts, p, grace_sphere(t, ts, p))
        radius = max(radius, max(gr.radius_residuals) / t.scale)
        product = max(product, gr.product_residual / t.scale**2)
    ok = criterion.check("radius residuals / scale", radius, 1e-8)
    ok &= criterion.check("power product = R^2 / scale^2", product, 1e-8)
    assert ok


# -- 9 -------------------------------------------------------------------------

REAL_SWEEP = [(0.25, 0.3), (0.25, 0.5), (0.25, 0.54), (0.5, 0.8), (0.5, 1.0), (0.5, 1.08)]
IMAGINARY_SWEEP = [(0.25, 0.58), (0.25, 0.62), (0.25, 0.7), (0.5, 1.16), (0.5, 1.3), (0.5, 1.45)]


@pytest.mark.criterion(9)
def test_c09_rotation_closes(criterion):
    rng = np.random.default_rng(1009)
    worst, closed = 0.0, 0
    for i in range(20):
        cfg = bc.random_real_config(rng)
        if i % 2 == 0:
            s = bc.sample_with_face(cfg, bc.random_face_plane(cfg, rng), rng)
        else:
            d = rng.normal(size=3)
            s = bc.sample_with_vertex(cfg, cfg.S.center + cfg.R * d / np.linalg.norm(d), rng)
        closed += s.closed
        worst = max(worst, s.closure_residual / cfg.R, s.on_sphere / cfg.R, s.tangency / cfg.R)
    ok = criterion.flag("20 constructions close", closed == 20, f"{closed}/20")
    ok &= criterion.check("closure residual / R", worst, 1e-7)
    assert ok


@pytest.mark.criterion(9)
def test_c09_reality_sweeps(criterion):
    mismatches = []
    for r, d in REAL_SWEEP:
        cfg = bc.BicentricConfig.coaxial(1.0, r, d)
        if not (bc.reality_criterion(cfg).real and bc.constructive_reality(cfg)):
            mismatches.append((r, d))
    for r, d in IMAGINARY_SWEEP:
        cfg = bc.BicentricConfig.coaxial(1.0, r, d)
        if bc.reality_criterion(cfg).real or bc.constructive_reality(cfg, n_planes=4, n_a=2, n_b=45):
            mismatches.append((r, d))
    n = len(REAL_SWEEP) + len(IMAGINARY_SWEEP)
    assert criterion.flag("predicate = constructive outcome on (a)/(c) sweeps", not mismatches, f"{n - len(mismatches)}/{n} agree")


@pytest.mark.criterion(9)
def test_c09_apex_locus(criterion):
    rng = np.random.default_rng(1019)
    worst = 0.0
    for _ in range(5):
        cfg = bc.random_real_config(rng)
        loc = bc.apex_locus_check(cfg, bc.random_face_plane(cfg, rng), 12, rng)
        worst = max(worst, loc.plane_residual / cfg.R)
    assert criterion.check("apex locus plane fit / R", worst, 1e-8)


@pytest.fixture(scope="module")
def fixed_sphere_report():
    rng = np.random.default_rng(1029)
    cfg = bc.BicentricConfig.coaxial(1.0, 0.2, 0.4)
    return cfg, bc.fixed_grace_sphere_check(cfg, 50, rng)


@pytest.mark.criterion(9)
def test_c09_fixed_sphere_exists(criterion, fixed_sphere_report):
    cfg, rep = fixed_sphere_report
    scan = rep.scan
    ok = criterion.flag("50 samples x 4 Grace spheres", len(scan.values) == 200, f"{len(scan.values)} contacts")
    ok &= criterion.check("radius spread / R", scan.spread / cfg.R, 1e-8)
    # the measured radius, compared with the power-of-a-point value
    gap = float(np.max(np.abs(scan.values - rep.power_radius))) / cfg.R
    ok &= criterion.check("tangent to Sphere(O_S, |R^2 - pow_T(O_S)| / 2r_T) / R", gap, 1e-7)
    assert ok


@pytest.mark.criterion(9)
@pytest.mark.xfail(strict=True, reason="the limit-point radius does not match the measured fixed sphere")
def test_c09_fixed_sphere_limit_point_radius(criterion, fixed_sphere_report):
    cfg, rep = fixed_sphere_report
    assert criterion.check("tangent to Sphere(O_S, (O_S K / O_T K) r_T) / R", rep.max_residual / cfg.R, 1e-7)


# -- 10 ------------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_c10_durrande(criterion):
    rep = bc.durrande_refutation(1000, np.random.default_rng(1010))
    assert criterion.flag("fraction with residual > 1e-3 >= 0.9", rep.fraction >= 0.9, f"{rep.fraction:.3f}")


# -- 11 ------------------------------------------------------------------------


@pytest.mark.criterion(11)
def test_c11_feuerbach_chain(criterion):
    rng = np.random.default_rng(1011)
    chi = center = power = tangency = in_gap = 0.0
    for _ in range(500):
        tf = fl.random_triangle(rng)
        for v in range(3):
            coax = fl.coaxial_test(fl.chi_circle(tf, v), fl.xi_circle(tf), fl.side_circle(tf, v))
            chi = max(chi, coax.residual)
        center = max(center, fl.radical_center_check(tf))
        r = fl.feuerbach_lift_chain(tf).residuals
        power = max(power, r["power_identity"])
        tangency = max(tangency, r["feuerbach_incircle"], *(r[f"feuerbach_ex{i}"] for i in range(3)))
        in_gap = max(in_gap, r["IN_formula"])
    ok = criterion.check("chi-circle coaxial", chi, 1e-9)
    ok &= criterion.check("orthocenter is the radical center", center, 1e-10)
    ok &= criterion.check("power identity / R^2", power, 1e-10)
    ok &= criterion.check("incircle internal, excircles external", tangency, 1e-9)
    ok &= criterion.check("||IN| - (R/2 - r)| / R", in_gap, 1e-10)
    assert ok


# -- 12 ------------------------------------------------------------------------


@pytest.mark.criterion(12)
def test_c12_up_in_ex(criterion):
    rng = np.random.default_rng(1012)
    touch = radius = height = 0.0
    for _ in range(500):
        tf = fl.random_triangle(rng)
        rep = fl.up_in_ex_touch(tf)
        touch = max(touch, *(v for k, v in rep.residuals.items() if not k.startswith("chapple")))
        inv = fl.inversion_proof_check(tf).residuals
        radius = max(radius, inv["image_radius"])
        height = max(height, inv["up_plane_height"], inv["down_plane_height"])
    ok = criterion.check("8 tangencies / scale", touch, 1e-10)
    ok &= criterion.check("image radius = r/2", radius, 1e-10)
    ok &= criterion.check("image plane height = r/2", height, 1e-10)
    assert ok


# -- 13 ------------------------------------------------------------------------


@pytest.mark.criterion(13)
def test_c13_determinism(criterion, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["verify", "all", "--seed", "13", "--trials", "2", "--json", str(path), "--quiet"])
    same = a.read_bytes() == b.read_bytes()
    # an instance alone reproduces its records inside a suite run
    alone = run_instance("grace", 13, 1)
    inside = [r for r in run_suite("grace", 13, 2).records if r.instance_seed == alone[0].instance_seed]
    same &= [r.to_dict() for r in alone] == [r.to_dict() for r in inside]
    assert criterion.flag("identical seeds give identical reports", same, f"{len(SUITES)} suites")


@pytest.mark.criterion(13)
def test_c13_default_run_time(criterion, tmp_path):
    t0 = time.perf_counter()
    code = main(["verify", "all", "--quiet", "--json", str(tmp_path / "full.json")])
    dt = time.perf_counter() - t0
    ok = criterion.flag("default run exits 0", code == 0, f"exit {code}")
    ok &= criterion.check("default run seconds", dt, 60.0)
    assert ok
