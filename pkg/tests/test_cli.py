"""Command line interface: exit codes, JSON reports, determinism."""

import json

import numpy as np
import pytest

from fellsem.cli import main
from fellsem.generators import busby_smith_z2, five_element_action
from fellsem.groupoid import pair_groupoid, z2_nontrivial_cocycle
from fellsem.tro import column_tro


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    paths = {}

    def dump(name, payload):
        p = d / name
        p.write_text(json.dumps(payload))
        paths[name] = str(p)

    dump("busby.json", busby_smith_z2().to_json())
    dump("five.json", five_element_action().to_json())
    dump("pair.json", pair_groupoid([0, 1]).to_json())
    G, tau = z2_nontrivial_cocycle()
    twisted = G.to_json()
    twisted["tau"] = {f"{G.labels[a]},{G.labels[b]}": str(tau(a, b).frac)
                      for (a, b) in G.composable_pairs() if not tau(a, b).is_one}
    dump("z2tw.json", twisted)
    dump("isg.json", {"table": [[0, 1], [1, 0]], "elements": ["1", "g"]})
    dump("badisg.json", {"table": [[0, 0], [1, 1]]})
    col = column_tro(2)
    dump("col.json", [[[ [v.real, v.imag] for v in row] for row in m] for m in col.basis])
    diag = [np.diag([1.0, 0]), np.diag([0, 1.0])]
    dump("diag.json", [[[ [v.real, v.imag] for v in row] for row in m] for m in diag])
    (d / "broken.json").write_text("{not json")
    paths["broken.json"] = str(d / "broken.json")
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_isg_verify_pass_and_fail(files, capsys):
    code, report = run(capsys, "isg", "verify", files["isg.json"])
    assert code == 0 and report["status"] == "pass"
    assert report["idempotents"] == ["1"]
    code, report = run(capsys, "isg", "verify", files["badisg.json"])
    assert code == 1 and report["status"] == "fail"
    assert report["violations"]


def test_input_errors_exit_2(files, capsys):
    code, report = run(capsys, "isg", "verify", files["broken.json"])
    assert code == 2 and report["status"] == "input-error"
    code, report = run(capsys, "isg", "verify", str(files["isg.json"]) + ".missing")
    assert code == 2
    code, report = run(capsys, "action", "bogus-op", files["busby.json"])
    assert code == 2


def test_action_commands(files, capsys):
    for op in ["verify", "consequences", "sieben", "siebenize", "germs"]:
        code, report = run(capsys, "action", op, files["busby.json"])
        assert code == 0, (op, report)
        assert report["violations"] == []
    code, report = run(capsys, "action", "germs", files["five.json"])
    assert report["arrows"] == 4


def test_bundle_commands(files, capsys):
    for op in ["verify", "classify", "extract", "roundtrip"]:
        code, report = run(capsys, "bundle", op, files["five.json"])
        assert code == 0, (op, report)
    code, report = run(capsys, "bundle", "roundtrip", files["busby.json"])
    assert report["exact"] is True


def test_groupoid_commands(files, capsys):
    code, report = run(capsys, "groupoid", "bisections", files["pair.json"])
    assert code == 0 and report["semigroup_size"] == 7
    for op in ["cocycle", "to-action", "roundtrip"]:
        code, report = run(capsys, "groupoid", op, files["z2tw.json"])
        assert code == 0, (op, report)


def test_algebra_commands(files, capsys):
    code, report = run(capsys, "algebra", "blocks", files["z2tw.json"])
    assert code == 0 and report["blocks"] == [1, 1]
    code, report = run(capsys, "algebra", "blocks", files["pair.json"])
    assert code == 0 and report["blocks"] == [2]
    code, report = run(capsys, "algebra", "germ", files["five.json"])
    assert code == 0 and report["dim"] == 4


def test_rep_commands(files, capsys):
    code, report = run(capsys, "rep", "regular", files["z2tw.json"])
    assert code == 0 and report["dimension"] == 2
    code, report = run(capsys, "rep", "convert", files["z2tw.json"])
    assert code == 0


def test_refine_commands(files, capsys):
    for op in ["saturate", "verify", "germ-check", "algebra-check"]:
        code, report = run(capsys, "refine", op, files["busby.json"])
        assert code == 0, (op, report)


def test_tro_commands(files, capsys):
    code, report = run(capsys, "tro", "regular", files["col.json"])
    assert code == 1 and report["status"] == "fail"
    code, report = run(capsys, "tro", "local", files["diag.json"])
    assert code == 0
    code, report = run(capsys, "tro", "closed", files["col.json"])
    assert code == 0


def test_shipped_examples_pass_their_verify_commands(capsys):
    import pathlib
    root = pathlib.Path(__file__).resolve().parent.parent / "data"
    commands = {
        "busby_smith_z2.json": ("action", "verify"),
        "five_element_s.json": ("action", "verify"),
        "pair_groupoid.json": ("groupoid", "verify"),
        "z2_twisted.json": ("groupoid", "cocycle"),
    }
    shipped = sorted(p.name for p in root.glob("*.json"))
    assert shipped == sorted(commands)
    for name, (cmd, op) in commands.items():
        code, report = run(capsys, cmd, op, str(root / name))
        assert code == 0 and report["status"] == "pass", (name, report)


def test_reports_are_deterministic(files, capsys):
    code1, r1 = run(capsys, "--seed", "5", "bundle", "verify", files["five.json"])
    code2, r2 = run(capsys, "--seed", "5", "bundle", "verify", files["five.json"])
    r1.pop("timings"), r2.pop("timings")
    assert code1 == code2 == 0 and r1 == r2
    assert r1["digest"] == r2["digest"]
    assert r1["seed"] == 5


def test_tolerance_and_threads_flags_accepted(files, capsys):
    code, report = run(capsys, "--tolerance", "1e-7", "--threads", "4",
                       "bundle", "verify", files["busby.json"])
    assert code == 0
