import json

import pytest
from mpmath import mpf

from retifica.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def quadric_map(tmp_path, capsys):
    code, out = run(capsys, "cremona", "build", "--monoid", "x0*x4 - x1*x2")
    assert code == EXIT_OK
    path = tmp_path / "map.json"
    path.write_text(out)
    return str(path)


@pytest.mark.parametrize("d, vertexes, expected", [(3, ["p0"], 29), (3, ["p0", "p4"], 24), (5, ["p4"], 90)])
def test_monoid_dim(capsys, d, vertexes, expected):
    code, out = run_json(capsys, "monoid-dim", "--d", str(d), "--vertexes", *vertexes)
    assert code == EXIT_OK
    assert out["enumerated"] == expected
    assert out["match"]


def test_monoid_dim_rejects_low_degree(capsys):
    code, _ = run(capsys, "monoid-dim", "--d", "1")
    assert code == EXIT_USAGE


def test_malformed_and_mismatched_descriptors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "rectify", "--surface", str(bad))[0] == EXIT_USAGE
    old = tmp_path / "old.json"
    old.write_text(json.dumps({"schema": 2, "kind": "surface", "forms": ["s*u", "t*v"]}))
    assert run(capsys, "rectify", "--surface", str(old))[0] == EXIT_USAGE
    assert run(capsys, "rectify", "--surface", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_cremona_build(capsys):
    code, out = run_json(capsys, "cremona", "build", "--monoid", "x0*x4 - x1*x2")
    assert code == EXIT_OK
    assert out["kind"] == "cremona"
    assert out["degrees"] == [2, 2]
    assert len(out["forward"]) == 4
    assert not out["gcd_skipped"]


def test_cremona_build_rejects_single_vertex(capsys):
    code, _ = run(capsys, "cremona", "build", "--monoid", "x0*x1 + x2*x3")
    assert code == EXIT_USAGE


def test_cremona_build_rejects_zero_denominator(capsys):
    code, out = run(capsys, "cremona", "build", "--monoid", "1/0*x0*x4 - x1*x2")
    assert code == EXIT_USAGE
    assert out == ""


def test_cremona_verify(capsys, quadric_map, tmp_path):
    code, out = run_json(capsys, "cremona", "verify", "--map", quadric_map, "--trials", "30")
    assert code == EXIT_OK
    assert out["verified"]
    broken = json.loads(open(quadric_map).read())
    broken["inverse"] = broken["forward"]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(broken))
    code, out = run_json(capsys, "cremona", "verify", "--map", str(path))
    assert code == EXIT_VERIFICATION
    assert not out["verified"]


def test_cremona_apply(capsys, quadric_map, plane_p3, write_surface):
    code, out = run_json(capsys, "cremona", "apply", "--map", quadric_map, "--surface", write_surface(plane_p3))
    assert code == EXIT_OK
    assert out["bidegree"] == [2, 2]
    assert out["image_degree"] == 2


def test_find_monoid_on_surface_in_p4(capsys, segre_z, write_surface):
    code, out = run_json(capsys, "find-monoid", "--surface", write_surface(segre_z), "--d", "2", "--seed", "3")
    assert code == EXIT_OK
    assert out["d"] == 2
    assert out["monoid"]["vertexes"] == ["p0", "p4"]


def test_rectify_scroll(capsys, segre_scroll, write_surface):
    code, out = run_json(capsys, "rectify", "--surface", write_surface(segre_scroll))
    assert code == EXIT_OK
    assert out["kind"] == "trace"
    assert out["steps"] == []
    assert out["final"] == out["initial"]
    assert out["surface_degrees"] == [2]


def test_seed_environment_override(capsys, segre_scroll, write_surface, monkeypatch):
    monkeypatch.setenv("RECT_SEED", "11")
    _, out = run_json(capsys, "rectify", "--surface", write_surface(segre_scroll), "--seed", "3")
    assert out["seed"] == 11


def test_reruns_are_byte_identical(capsys, segre_scroll, write_surface, tmp_path):
    path = write_surface(segre_scroll)
    outputs = []
    for name in ("one.json", "two.json"):
        target = tmp_path / name
        assert run(capsys, "demo-orbit", "--scroll", path, "--d1", "1", "--output", str(target))[0] == EXIT_OK
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    orbit = json.loads(outputs[0])
    assert orbit["status"] == "rectified"
    assert orbit["ruling_degree"] == 1


def test_demo_orbit_with_two_maps(capsys, segre_scroll, write_surface):
    code, out = run_json(capsys, "demo-orbit", "--scroll", write_surface(segre_scroll), "--d1", "1", "--d2", "1")
    assert code == EXIT_OK
    assert out["status"] == "rectified"
    assert out["ruling_degree"] == 1


def test_verify_lemmas_constants(capsys):
    code, out = run_json(capsys, "verify-lemmas", "--constants")
    assert code == EXIT_OK
    assert abs(mpf(out["xi"]) - mpf("2.567468375")) < mpf("1e-9")
    assert abs(mpf(out["a2"]) - mpf("0.8628701083")) < mpf("1e-9")
    assert out["a1"].startswith("-")


def test_verify_lemmas_json(capsys):
    code, out = run_json(capsys, "verify-lemmas", "--grid", "a=2..3,b=1", "--h-max", "40", "--json")
    assert code == EXIT_OK
    assert [(r["a"], r["b"]) for r in out["rows"]] == [(2, 1), (3, 1)]
    for row in out["rows"]:
        assert row["quadratic"] and row["cubic_remainder"]
        assert row["threshold_h"] is not None
        assert row["dimension"]["verdict"]


def test_verify_lemmas_table(capsys):
    code, out = run(capsys, "verify-lemmas", "--grid", "a=2,b=1..2", "--h-max", "20")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("a=2 b=1")
    assert "FAIL" not in out


@pytest.mark.parametrize("text", ["a=2..6", "a=3..2,b=1", "c=1,a=2,b=1", "a=x,b=1"])
def test_parse_grid_rejects(text):
    with pytest.raises(ValueError):
        parse_grid(text)


def test_parse_grid():
    assert parse_grid("a=2..4,b=1") == {"a": [2, 3, 4], "b": [1]}
