import json
import shutil
import subprocess
from importlib import resources

import jsonschema
import pytest

from orbitscope.cli import main

W5_SU41 = {"z": [[0, 0], [0, 0], [1, 0], [0, -1], [1, 0]],
           "w": [[0, 0], [0, 0], [1, 0], [0, 1], [1, 0]]}


def schema(name):
    text = resources.files("orbitscope").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_slice_report(capsys):
    code, rep = run(capsys, "slice", "--family", "SO0", "--n", "2", "--slice", "2", "--param", "0.5")
    assert code == 0
    jsonschema.validate(rep, schema("slice"))
    xi = [complex(*c) for c in rep["xi"]]
    assert xi[0] == pytest.approx(1.1752011936438014) and xi[1] == pytest.approx(1.5430806348152437j)


def test_classify_w5(capsys):
    code, rep = run(capsys, "classify", "--family", "SU", "--n", "4", "--point", json.dumps(W5_SU41))
    assert code == 0 and rep["label"] == "w5" and rep["rank"] == 15
    jsonschema.validate(rep, schema("classify"))


def test_classify_stdin(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"xi": [[0, 0], [0, 0], [1, 0]]})))
    code, rep = run(capsys, "classify", "--family", "SO0", "--n", "2", "--stdin")
    assert code == 0 and rep["label"] == "z1"


def test_classify_bad_point(capsys):
    code, _ = run(capsys, "classify", "--family", "SO0", "--n", "2", "--point", '{"xi": [1]}')
    assert code == 2
    code, _ = run(capsys, "classify", "--family", "SO0", "--n", "2", "--point", "not json")
    assert code == 2


def test_classify_off_model_point(capsys):
    code, rep = run(capsys, "classify", "--family", "SO0", "--n", "2",
                    "--point", '{"xi": [[0,0],[0,0],[3,0]]}')
    assert code == 1 and rep["nearest"] == "z1"


def test_levi_both_methods(capsys):
    code, rep = run(capsys, "levi", "--family", "SU", "--n", "3", "--site", "NonReduced_z3_x",
                    "--method", "both")
    assert code == 0 and len(rep) == 2
    assert {(r["pos"], r["neg"], r["zero"]) for r in rep} == {(1, 3, 1)}
    jsonschema.validate(rep, schema("levi"))


def test_levi_numeric_point(capsys):
    pt = {"xi": [[-1, 0], [0, 1], [-1, 0]]}
    code, rep = run(capsys, "levi", "--family", "SO0", "--n", "2", "--point", json.dumps(pt))
    assert code == 0 and (rep["pos"], rep["neg"], rep["zero"]) == (0, 0, 1)
    jsonschema.validate(rep, schema("levi"))


def test_levi_algebraic_needs_site(capsys):
    code, _ = run(capsys, "levi", "--family", "SO0", "--n", "3", "--method", "algebraic",
                  "--point", '{"xi": [[1,0],[0,0],[0,1],[1,0]]}')
    assert code == 2


def test_levi_bad_site_for_family(capsys):
    code, _ = run(capsys, "levi", "--family", "SO0", "--n", "3", "--site", "NonReduced_z2_x0")
    assert code == 2


def test_verify_table(capsys):
    code, rep = run(capsys, "verify-table", "--family", "SO0", "--n", "3", "--samples", "20")
    assert code == 0 and len(rep) == 8 and all(r["pass"] for r in rep)
    jsonschema.validate(rep, schema("verify-table"))


def test_cover(capsys):
    code, rep = run(capsys, "cover", "--variant", "groupCover", "--s", "0.7", "--g-norm", "0.5",
                    "--lam", "0.5", "0.5")
    assert code == 0 and rep["fiber_count"] == 2 and rep["jacobian_ranks"] == [6, 6]
    jsonschema.validate(rep, schema("cover"))


def test_cover_usage_errors(capsys):
    assert main(["cover", "--s", "-1"]) == 2
    assert main(["cover", "--variant", "groupCover", "--lam", "0", "0"]) == 2


def test_diagram(capsys):
    code, rep = run(capsys, "diagram", "--family", "SU", "--n", "2")
    assert code == 0 and rep["diagram"] == 9 and rep["closure_edges"]["w5"] == ["z3"]
    jsonschema.validate(rep, schema("diagram"))


def test_json_output_file(tmp_path, capsys):
    path = tmp_path / "d.json"
    assert main(["diagram", "--family", "SO0", "--n", "3", "--json", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text())["diagram"] == 4


def test_seed_determinism_and_env(capsys, monkeypatch):
    args = ["cover", "--g-norm", "1.0", "--seed", "7"]
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a == b
    monkeypatch.setenv("ORBITSCOPE_SEED", "7")
    _, c = run(capsys, "cover", "--g-norm", "1.0", "--seed", "99")
    assert c == a
    monkeypatch.setenv("ORBITSCOPE_SEED", "x")
    assert main(args) == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["bogus"]) == 2
    assert main(["slice", "--family", "SO0", "--n", "2", "--slice", "1", "--param", "3"]) == 2
    assert main(["diagram", "--family", "SO0", "--n", "1"]) == 2


def test_no_negative_zero(capsys):
    out = None
    main(["slice", "--family", "SU", "--n", "1", "--slice", "1", "--param", "0.5"])
    out = capsys.readouterr().out
    assert "-0.0" not in out


@pytest.mark.skipif(shutil.which("orbitscope") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["orbitscope", "diagram", "--family", "SU", "--n", "1"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["diagram"] == 3
