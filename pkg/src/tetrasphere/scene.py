"""Scene export for external viewers.

A scene is a flat list of typed records ``{kind, params, label, group}``:

========  =====================================================
kind      params
========  =====================================================
point     x, y, z
sphere    cx, cy, cz, r
plane     cx, cy, cz, nx, ny, nz, extent   (square patch)
circle    cx, cy, cz, nx, ny, nz, r
cone      ax, ay, az, ux, uy, uz, half_angle, length
line      x0, y0, z0, x1, y1, z1           (segment)
========  =====================================================

Descriptors name a reproducible instance: ``tetrahedron:<seed>``,
``tetrahedron:regular``, ``grace:<seed>``, ``bicentric:<seed>[:<n>]`` and
``triangle:<seed>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import bicentric3d as bc
from . import feuerbach_lift as fl
from .core_geom import Circle3, Cone, GeometryError, Plane, Sphere
from .euler_cone import hart_euler_cone
from .rng import MAX_SEED, instance_rng
from .tetra_spheres import Tetrahedron, grace_pairs, grace_sphere, random_tetrahedron, regular_tetrahedron, tangent_spheres

__all__ = ["Scene", "SceneError", "build_scene", "SCENE_KINDS"]

SCENE_SCHEMA_VERSION = 1
SCENE_KINDS = ("tetrahedron", "grace", "bicentric", "triangle")


class SceneError(ValueError):
    """The descriptor does not name a reproducible instance."""


def _eps_tag(eps) -> str:
    return "".join("+" if e > 0 else "-" for e in eps)


@dataclass
class Scene:
    descriptor: str
    items: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, kind: str, params, label: str, group: str) -> None:
        if any(it["label"] == label for it in self.items):
            raise ValueError(f"duplicate scene label {label!r}")
        self.items.append({"kind": kind, "params": [float(x) for x in params], "label": label, "group": group})

    def point(self, p, label, group):
        self.add("point", p, label, group)

    def sphere(self, s: Sphere, label, group):
        self.add("sphere", [*s.center, s.r], label, group)

    def plane(self, p: Plane, center, extent: float, label, group):
        c = p.project(center)
        self.add("plane", [*c, *p.n, extent], label, group)

    def circle(self, c: Circle3, label, group):
        self.add("circle", [*c.center, *c.plane.n, c.r], label, group)

    def cone(self, k: Cone, length: float, label, group):
        self.add("cone", [*k.apex, *k.axis, k.half_angle, length], label, group)

    def segment(self, p, q, label, group):
        self.add("line", [*p, *q], label, group)

    def count(self, group: str) -> int:
        return sum(it["group"] == group for it in self.items)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCENE_SCHEMA_VERSION,
            "descriptor": self.descriptor,
            "notes": list(self.notes),
            "items": self.items,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"


def _parse(descriptor: str) -> tuple[str, list[str]]:
    kind, _, rest = descriptor.partition(":")
    if kind not in SCENE_KINDS or not rest:
        raise SceneError(f"unknown descriptor {descriptor!r}; expected one of {', '.join(SCENE_KINDS)} followed by :<seed>")
    return kind, rest.split(":")


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise SceneError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed <= MAX_SEED:
        raise SceneError("seed out of the unsigned 64-bit range")
    return seed


def _tetra_items(sc: Scene, t: Tetrahedron, cones: bool) -> None:
    for i, v in enumerate(t.vertices):
        sc.point(v, f"V{i}", "vertices")
    for i in range(4):
        for j in range(i):
            sc.segment(t.vertices[j], t.vertices[i], f"edge{j}{i}", "edges")
    ts = tangent_spheres(t)
    for eps, s in ts:
        sc.sphere(s, f"tangent{_eps_tag(eps)}", "tangent-spheres")
    for p in grace_pairs(ts, t):
        try:
            g = grace_sphere(t, ts, p)
        except GeometryError as exc:
            sc.notes.append(f"grace sphere face {p.face} pair {_eps_tag(p.first)}/{_eps_tag(p.second)}: {exc}")
            continue
        label = f"grace-face{p.face}-{_eps_tag(p.first)}{_eps_tag(p.second)}"
        sc.sphere(g.sphere, label, "grace-spheres")
    if cones:
        for v in range(4):
            try:
                ec = hart_euler_cone(t, v, ts)
            except GeometryError as exc:
                sc.notes.append(f"euler cone at vertex {v}: {exc}")
                continue
            sc.cone(ec.cone, 2.0 * t.scale, f"euler-cone{v}", "euler-cones")


def _triangle_items(sc: Scene, tf: fl.TriangleFrame) -> None:
    for name, p in zip("ABC", tf.vertices):
        sc.point(p, name, "vertices")
    for name, p in (("I", tf.I), ("O", tf.O), ("H", tf.H), ("N", tf.N)):
        sc.point(p, name, "centers")
    sc.circle(tf.incircle, "incircle", "circles")
    sc.circle(tf.nine_point_circle, "nine-point", "circles")
    sc.circle(tf.circumcircle, "circumcircle", "circles")
    for i, c in enumerate(tf.excircles):
        sc.circle(c, f"excircle{i}", "circles")
    sc.circle(fl.xi_circle(tf), "xi", "circles")
    ls = fl.lift_spheres(tf)
    sc.sphere(ls.Delta, "circumsphere", "lifts")
    sc.sphere(ls.Theta, "nine-point-sphere", "lifts")
    sc.sphere(ls.up, "incircle-up", "lifts")
    sc.sphere(ls.down, "incircle-down", "lifts")
    for i in range(3):
        sc.sphere(ls.ups_ex[i], f"excircle{i}-up", "lifts")
        sc.sphere(ls.downs_ex[i], f"excircle{i}-down", "lifts")
    sc.sphere(ls.Upsilon, "small-incircle-up", "lifts")


def build_scene(descriptor: str) -> Scene:
    kind, args = _parse(descriptor)
    sc = Scene(descriptor)
    if kind in ("tetrahedron", "grace"):
        if args[0] == "regular":
            t = regular_tetrahedron()
        else:
            t = random_tetrahedron(instance_rng(_seed(args[0]), "scene-tetrahedron", 0))
        _tetra_items(sc, t, cones=kind == "tetrahedron")
    elif kind == "triangle":
        _triangle_items(sc, fl.random_triangle(instance_rng(_seed(args[0]), "scene-triangle", 0)))
    else:
        n = int(args[1]) if len(args) > 1 else 4
        if n < 1:
            raise SceneError("need at least one rotation sample")
        rng = instance_rng(_seed(args[0]), "scene-bicentric", 0)
        cfg = bc.random_real_config(rng)
        sc.sphere(cfg.S, "S", "spheres")
        sc.sphere(cfg.T, "T", "spheres")
        sc.sphere(Sphere(cfg.S.center, bc.power_radius(cfg)), "fixed", "spheres")
        k = 0
        for _ in range(20 * n):
            if k == n:
                break
            s = bc.sample_with_face(cfg, bc.random_face_plane(cfg, rng), rng)
            if s.tetrahedron is None or not s.closed:
                continue
            v = s.tetrahedron.vertices
            for i in range(4):
                sc.point(v[i], f"t{k}-V{i}", f"tetra{k}")
                for j in range(i):
                    sc.segment(v[j], v[i], f"t{k}-edge{j}{i}", f"tetra{k}")
            k += 1
        if k < n:
            sc.notes.append(f"only {k} of {n} rotation samples closed")
    return sc
