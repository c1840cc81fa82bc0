"""End-to-end checks of the command line front end."""

import json

import pytest

from cleav import cli
from cleav import fixtures as fx
from cleav import suites
from cleav.operad import cleavage_from_json

ROT_CHORD = {
    "n": 1,
    "tree": {
        "plane": {"normal": [0.0, 1.0], "offset": 0.0},
        "left": {"leaf": 1},
        "right": {"leaf": 2},
    },
}


def run(capsys, *argv):
    rc = cli.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def write_json(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


class TestGen:
    def test_byte_identical_reruns(self, capsys):
        rc1, out1, err1 = run(capsys, "gen", "--k", 4, "--seed", 9)
        rc2, out2, _ = run(capsys, "gen", "--k", 4, "--seed", 9)
        assert rc1 == rc2 == 0
        assert out1 == out2 and out1.strip()
        echoed = json.loads(err1)
        assert echoed["config"]["command"] == "gen"
        assert echoed["config"]["seed"] == 9

    def test_output_revalidates(self, capsys):
        rc, out, _ = run(capsys, "gen", "--k", 3, "--seed", 1)
        assert rc == 0
        assert cleavage_from_json(json.loads(out)).k == 3

    def test_env_seed_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("CLEAVE_SEED", "11")
        _, out_env, _ = run(capsys, "gen", "--k", 2)
        monkeypatch.delenv("CLEAVE_SEED")
        _, out_flag, _ = run(capsys, "gen", "--k", 2, "--seed", 11)
        assert out_env == out_flag

    def test_default_seed_is_zero(self, capsys, monkeypatch):
        monkeypatch.delenv("CLEAVE_SEED", raising=False)
        _, out_default, _ = run(capsys, "gen", "--k", 2)
        _, out_zero, _ = run(capsys, "gen", "--k", 2, "--seed", 0)
        assert out_default == out_zero

    def test_sphere_dimension_three_is_usage_error(self, capsys):
        rc, _, _ = run(capsys, "gen", "--n", 3)
        assert rc == 2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "c.json"
        rc, out, _ = run(capsys, "gen", "--k", 2, "--seed", 4, "--out", target)
        assert rc == 0 and out == ""
        assert cleavage_from_json(json.loads(target.read_text())).k == 2


class TestInspect:
    def test_chord_summary(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        rc, out, _ = run(capsys, "inspect", doc)
        assert rc == 0
        assert "arity 2" in out
        assert "components 1" in out
        assert "stable degree for dim 2: (2, 0), sum 2" in out
        assert "2: 8" in out  # every thickened sample has two preimages

    def test_corridor_summary(self, capsys, tmp_path):
        doc = write_json(tmp_path, "tri.json", fx.corridor_cleavage().to_json())
        rc, out, _ = run(capsys, "inspect", doc, "--dim-m", 2)
        assert rc == 0
        assert "arity 3" in out
        assert "components 2" in out
        assert "stable degree for dim 2: (4, 0), sum 4" in out

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{this is not json")
        rc, _, err = run(capsys, "inspect", path)
        assert rc == 1 and "error:" in err

    def test_missing_file(self, capsys, tmp_path):
        rc, _, err = run(capsys, "inspect", tmp_path / "nope.json")
        assert rc == 1 and "error:" in err


class TestComposePermute:
    def test_compose_grafts_rotated_chord(self, capsys, tmp_path):
        outer = write_json(tmp_path, "outer.json", fx.chord_cleavage().to_json())
        inner = write_json(tmp_path, "inner.json", ROT_CHORD)
        rc, out, err = run(capsys, "compose", outer, 1, inner)
        assert rc == 0
        composed = cleavage_from_json(json.loads(out))
        assert composed.k == 3
        assert json.loads(err)["config"]["slot"] == 1

    def test_compose_bad_slot(self, capsys, tmp_path):
        outer = write_json(tmp_path, "outer.json", fx.chord_cleavage().to_json())
        inner = write_json(tmp_path, "inner.json", ROT_CHORD)
        rc, _, err = run(capsys, "compose", outer, 9, inner)
        assert rc == 1 and "error:" in err

    def test_permute_involution(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        rc, once, _ = run(capsys, "permute", doc, "2,1")
        assert rc == 0
        again = write_json(tmp_path, "swapped.json", json.loads(once))
        rc, twice, _ = run(capsys, "permute", again, "2,1")
        assert rc == 0
        original = json.dumps(fx.chord_cleavage().to_json(), indent=2, sort_keys=True)
        assert twice.strip() == original

    def test_permute_rejects_non_bijection(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        assert run(capsys, "permute", doc, "2,2")[0] == 1
        assert run(capsys, "permute", doc, "a,b")[0] == 1


class TestUmkehr:
    def test_concentric_quarter_scale(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        loops = write_json(tmp_path, "loops.json", fx.mirrored_pair(0.05).to_json())
        rc, out, err = run(capsys, "umkehr", doc, loops, "--epsilon", 0.2)
        assert rc == 0
        value = json.loads(out)
        assert value["config"]["command"] == "umkehr"
        assert value["config"]["epsilon"] == 0.2
        comp = value["components"][0]
        assert comp["status"] == "finite"
        top = max(e["scale"] for e in comp["entries"])
        assert abs(top - 0.25) <= 1e-9
        assert "finite" in err

    def test_far_pair_collapses(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        loops = write_json(tmp_path, "loops.json", fx.mirrored_pair(0.3).to_json())
        rc, out, _ = run(capsys, "umkehr", doc, loops, "--epsilon", 0.2)
        assert rc == 0
        comp = json.loads(out)["components"][0]
        assert comp["status"] == "infinity"
        assert comp["entries"] == []

    def test_homotopy_flag_calms_invader(self, capsys, tmp_path):
        doc = write_json(tmp_path, "tri.json", fx.corridor_cleavage().to_json())
        loops = write_json(tmp_path, "trio.json", fx.corridor_trio(62.0).to_json())
        rc, out, _ = run(capsys, "umkehr", doc, loops, "--epsilon", 0.2,
                         "--density", 24)
        assert rc == 0
        assert json.loads(out)["components"][0]["status"] == "infinity"
        rc, out, _ = run(capsys, "umkehr", doc, loops, "--epsilon", 0.2,
                         "--density", 24, "--t", 1)
        assert rc == 0
        assert json.loads(out)["components"][0]["status"] == "finite"

    def test_mapping_glues_coincident_pair(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        loops = write_json(tmp_path, "loops.json", fx.mirrored_pair(0.0).to_json())
        rc, out, _ = run(capsys, "umkehr", doc, loops, "--epsilon", 0.2, "--mapping")
        assert rc == 0
        comp = json.loads(out)["components"][0]
        assert comp["uf_mask"], "coincident samples must be glued"
        glued = {e["sample"] for e in comp["entries"] if e["scale"] == 0.0}
        assert set(comp["uf_mask"]) <= glued

    def test_epsilon_is_required(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        loops = write_json(tmp_path, "loops.json", fx.mirrored_pair(0.1).to_json())
        assert run(capsys, "umkehr", doc, loops)[0] == 2


class TestCheck:
    def test_degree_suite_passes(self, capsys):
        rc, out, err = run(capsys, "check", "degree", "--seed", 0)
        assert rc == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert report["config"] == {"command": "check", "suite": "degree", "seed": 0}
        assert "[PASS] degree" in err

    def test_partition_suite_passes(self, capsys):
        rc, out, _ = run(capsys, "check", "partition")
        assert rc == 0 and json.loads(out)["failures"] == 0

    def test_unknown_suite_is_usage_error(self, capsys):
        assert run(capsys, "check", "bogus")[0] == 2

    def test_failing_suite_exits_one(self, capsys, monkeypatch):
        def forced(seed=0, **kw):
            return suites.SuiteReport("degree", False, 1, 1, {}, {"kind": "forced"})

        monkeypatch.setitem(suites.SUITES, "degree", forced)
        rc, out, err = run(capsys, "check", "degree")
        assert rc == 1
        assert json.loads(out)["counterexample"] == {"kind": "forced"}
        assert "[FAIL]" in err


class TestExportObj:
    def test_obj_stream(self, capsys, tmp_path):
        doc = write_json(tmp_path, "tri.json", fx.corridor_cleavage().to_json())
        rc, out, _ = run(capsys, "export-obj", doc)
        assert rc == 0
        assert out.startswith("#")
        assert any(line.startswith("v ") for line in out.splitlines())

    def test_obj_to_file(self, capsys, tmp_path):
        doc = write_json(tmp_path, "chord.json", fx.chord_cleavage().to_json())
        target = tmp_path / "diagram.obj"
        rc, out, _ = run(capsys, "export-obj", doc, "--out", target)
        assert rc == 0 and out == ""
        assert target.read_text().startswith("#")
