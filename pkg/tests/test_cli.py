import json

import pytest

from gausstopo.cli import main, parse_grid, parse_params
from gausstopo.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def model_file(tmp_path, capsys):
    def make(name, params=None, extra=()):
        path = tmp_path / f"{name}-{abs(hash((params, extra)))}.json"
        argv = ["model", "--name", name, "--out", str(path), *extra]
        if params:
            argv += ["--params", params]
        assert main(argv) == 0
        capsys.readouterr()
        return str(path)
    return make


def test_classify_spec(capsys):
    code, doc = run(capsys, "classify", "--spec", '{"trs":"plus","u1":false,"su2":"none"}')
    assert code == 0 and doc["class"] == "BDI"


def test_invariant_winding(capsys, model_file):
    path = model_file("kitaev")
    code, doc = run(capsys, "invariant", "--name", "winding", "--model", path, "--grid", "64")
    assert code == 0 and doc["value"] == 1
    code, doc = run(capsys, "invariant", "--name", "pfaffian", "--model", path)
    assert doc["value"] == -1


def test_tables_query(capsys):
    code, doc = run(capsys, "tables", "--class", "AII", "--dim", "3")
    assert code == 0
    assert (doc["state_group"], doc["op_group"], doc["image"]) == ("Z2", "Z2", "0")
    code, doc = run(capsys, "tables", "--dump")
    assert set(doc) >= {"full", "disentanglable", "non_disentanglable", "genuinely_dynamical"}


def test_report_kitaev(capsys, model_file):
    code, doc = run(capsys, "report", "--model", model_file("kitaev"))
    assert code == 0
    assert doc["class"] == "BDI" and doc["disentanglable"] is True
    assert doc["invariants"]["winding"]["value"] == 1
    assert doc["invariants"]["pfaffian"]["value"] == -1


def test_report_pip_and_vacuum(capsys, model_file):
    code, doc = run(capsys, "report", "--model", model_file("pip"))
    assert doc["class"] == "D" and doc["invariants"]["chern"]["value"] == 1
    assert doc["disentanglable"] is False
    code, doc = run(capsys, "report", "--model", model_file("vacuum"))
    assert code == 0 and doc["disentanglable"] is True and doc["invariants"] == {}


def test_validate_and_gap_failure(capsys, model_file):
    code, doc = run(capsys, "validate", "--model", model_file("kitaev"))
    assert code == 0 and doc["passed"]
    code, doc = run(capsys, "validate", "--model", model_file("kitaev", "mu=2"))
    assert code == 1 and doc["error"] == "GapError"


def test_deform_actions(capsys, model_file, tmp_path):
    a, b = model_file("kitaev", "mu=0"), model_file("kitaev", "mu=1")
    bundle = tmp_path / "path.json"
    code, doc = run(capsys, "deform", "connect", "--model", a, "--target", b, "--steps", "100",
                    "--bundle", str(bundle))
    assert code == 0 and doc["residual"] < 1e-6 and bundle.exists()
    code, doc = run(capsys, "deform", "unitarize-bop", "--model", model_file("squeezer", "w=-2"))
    assert code == 0 and doc["unitarity"] < 1e-10


def test_disentangle_emit_op(capsys, model_file, tmp_path):
    op = tmp_path / "op.json"
    code, doc = run(capsys, "disentangle", "--model", model_file("kitaev"), "--emit-op", str(op))
    assert code == 0 and doc["disentanglable"] and op.exists()


def test_random_model_deterministic(capsys):
    argv = ["model", "--name", "random", "--params", "class=BDI,d=1,smoothness=2", "--seed", "11"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a == b


def test_usage_errors(capsys, model_file):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["tables", "--bogus"])
    assert exc.value.code == 2
    assert main(["invariant", "--name", "winding"]) == 2
    assert main(["tables", "--class", "A"]) == 2
    assert main(["model", "--name", "kitaev", "--params", "colour=3"]) == 2
    assert main(["classify"]) == 2
    capsys.readouterr()


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("GAUSSTOPO_THREADS", "two")
    assert main(["tables", "--dump"]) == 2
    monkeypatch.setenv("GAUSSTOPO_THREADS", "2")
    assert main(["tables", "--class", "D", "--dim", "2"]) == 0
    capsys.readouterr()


def test_parse_helpers():
    assert parse_grid("8,10", 2, 4).sizes == (8, 10)
    assert parse_grid(None, 3, 6).sizes == (6, 6, 6)
    assert parse_params("mu=1.5,chirality=-1") == {"mu": 1.5, "chirality": -1}
    with pytest.raises(ConfigError):
        parse_grid("8,10", 3, 4)
