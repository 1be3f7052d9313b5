import hashlib
import json
import math
import re

import pytest

from tetrasphere.cli import main
from tetrasphere.report import SCHEMA_VERSION, Check, SuiteReport, record
from tetrasphere.rng import MAX_SEED, instance_rng, instance_seed
from tetrasphere.scene import SceneError, build_scene
from tetrasphere.suites import PRIMARY, SUITES, run_instance, run_suite

FAST = ["euler-chapple", "thebault", "radical-center"]


# -- rng -----------------------------------------------------------------------


def test_instance_seed_matches_blake2b():
    d = hashlib.blake2b(b"7:grace:3", digest_size=8).digest()
    assert instance_seed(7, "grace", 3) == int.from_bytes(d, "little")
    assert instance_seed(7, "grace", 3) != instance_seed(7, "grace", 4)
    assert instance_seed(7, "grace", 3) != instance_seed(7, "laguerre", 3)


def test_instance_rng_reproducible():
    a = instance_rng(11, "durrande", 5).normal(size=4)
    b = instance_rng(11, "durrande", 5).normal(size=4)
    assert (a == b).all()


def test_seed_range():
    instance_seed(MAX_SEED, "grace", 0)
    with pytest.raises(ValueError):
        instance_seed(MAX_SEED + 1, "grace", 0)
    with pytest.raises(ValueError):
        instance_seed(-1, "grace", 0)


# -- records -------------------------------------------------------------------


def test_non_finite_residual_is_flagged_not_failed():
    r = record(Check("x", math.nan, 1e-9), 5)
    assert r.residual is None and "non-finite-residual" in r.flags
    rep = SuiteReport("x", [r, record(Check("y", 1.0, 1e-9, ["known"]), 5)])
    assert rep.failures == []
    assert rep.summary()["flagged"] == 2
    bad = SuiteReport("x", [record(Check("z", 1.0, 1e-9), 5)])
    assert len(bad.failures) == 1 and bad.summary()["pass_rate"] == 0.0


def test_run_suite_errors():
    with pytest.raises(KeyError):
        run_suite("no-such-suite", 0, 1)
    with pytest.raises(ValueError):
        run_suite("grace", 0, 0)


def test_run_instance_carries_instance_seed():
    recs = run_instance("grace", 3, 2)
    assert recs and all(r.instance_seed == instance_seed(3, "grace", 2) for r in recs)


def test_suite_registry():
    assert len(PRIMARY) == 12
    assert set(PRIMARY) <= set(SUITES)


# -- cli -----------------------------------------------------------------------


def test_list_suites(capsys):
    assert main(["list-suites"]) == 0
    out = capsys.readouterr().out
    for name in SUITES:
        assert name in out


def test_verify_json_is_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", *FAST, "--seed", "42", "--trials", "3", "--json", str(p), "--quiet"]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert doc["schema_version"] == SCHEMA_VERSION
    assert list(doc) == ["schema_version", "seed", "trials", "summary", "suites"]
    assert [s["suite"] for s in doc["suites"]] == FAST
    assert "NaN" not in paths[0].read_text()


def test_verify_seed_changes_report(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "euler-chapple", "--seed", "1", "--trials", "2", "--json", str(a), "--quiet"])
    main(["verify", "euler-chapple", "--seed", "2", "--trials", "2", "--json", str(b), "--quiet"])
    assert a.read_bytes() != b.read_bytes()


def test_verify_json_to_stdout(capsys):
    assert main(["verify", "euler-chapple", "--trials", "1", "--json", "-", "--quiet"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["summary"]["ok"] is True


def test_verify_tiny_tolerance_fails():
    assert main(["verify", "thebault", "--trials", "2", "--tol", "0", "--quiet"]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "grace", "--trials", "0"],
        ["verify", "no-such-suite"],
        ["verify", "grace", "--seed", str(MAX_SEED + 1)],
        ["verify", "grace", "--tol", "-1"],
        ["export", "cube:3"],
        ["export", "tetrahedron:abc"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


# -- scenes --------------------------------------------------------------------


def test_tetrahedron_scene_counts():
    sc = build_scene("tetrahedron:7")
    assert sc.count("tangent-spheres") == 8
    assert sc.count("grace-spheres") == 16
    assert sc.count("euler-cones") == 4
    assert sc.count("vertices") == 4 and sc.count("edges") == 6
    reg = build_scene("tetrahedron:regular")
    assert reg.count("tangent-spheres") == 5
    assert reg.count("grace-spheres") == 4


def test_grace_scene_tags_face_and_pair():
    sc = build_scene("grace:7")
    assert sc.count("euler-cones") == 0
    labels = [it["label"] for it in sc.items if it["group"] == "grace-spheres"]
    pat = re.compile(r"grace-face([0-3])-([+-]{4})([+-]{4})$")
    assert all(pat.match(x) for x in labels)
    faces = sorted(int(pat.match(x).group(1)) for x in labels)
    assert faces == sorted(list(range(4)) * 4)


def test_bicentric_scene():
    sc = build_scene("bicentric:5:3")
    labels = {it["label"] for it in sc.items}
    assert {"S", "T", "fixed"} <= labels
    assert sum(sc.count(f"tetra{k}") == 10 for k in range(3)) == 3
    assert not sc.notes


def test_triangle_scene_and_json(tmp_path):
    out = tmp_path / "tri.json"
    assert main(["export", "triangle:3", "--scene", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["descriptor"] == "triangle:3"
    for it in doc["items"]:
        assert list(it) == ["kind", "params", "label", "group"]
    assert out.read_text() == build_scene("triangle:3").to_json()


def test_scene_rejects_bad_descriptors():
    for d in ("cube:1", "tetrahedron", "tetrahedron:x", f"grace:{MAX_SEED + 1}", "bicentric:1:0"):
        with pytest.raises(SceneError):
            build_scene(d)
