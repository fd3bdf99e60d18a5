import csv
import io
import json
import math

import pytest

from orlicz_gauss.cli import EXIT_DIVERGED, EXIT_INPUT, EXIT_OK, jsonable, main


def hermite(*terms, dim=1):
    return {"kind": "hermite", "dim": dim, "terms": [{"alpha": list(a), "c": c} for a, c in terms]}


def builtin(name, **params):
    return {"kind": "builtin", "name": name, "params": params}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(path)

    return _write


def run(argv, tmp_path):
    out = tmp_path / "out.json"
    code = main([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() and out.stat().st_size else None)


def test_norm_constant_closed_form(write, tmp_path):
    f = write("c.json", builtin("constant", c=3.0))
    code, doc = run(["norm", "--f", f, "--phi", "cosh-1"], tmp_path)
    assert code == EXIT_OK
    assert doc["command"] == "norm" and doc["config"]["phi"] == "cosh-1"
    assert doc["result"]["value"] == pytest.approx(3 / math.acosh(2.0), rel=1e-9)


def test_norm_dual_and_squared_kinds(write, tmp_path):
    f = write("x.json", hermite(((1,), 1.0)))
    code, doc = run(["norm", "--f", f, "--phi", "power:2", "--kind", "dual"], tmp_path)
    assert code == EXIT_OK and doc["result"]["value"] == pytest.approx(math.sqrt(2), rel=1e-8)
    code, doc = run(["norm", "--f", f, "--phi", "sq(power:2)", "--kind", "luxemburg"], tmp_path)
    assert code == EXIT_OK and math.isfinite(doc["result"]["value"])


def test_norm_diverged_exit_and_nonfinite_json(write, tmp_path):
    f = write("h2.json", hermite(((2,), 1.0)))
    code, doc = run(["norm", "--f", f, "--phi", "gauss2"], tmp_path)
    assert code == EXIT_DIVERGED
    assert doc["result"]["value"] == "inf" and doc["result"]["diverged"] is True


def test_input_errors(write, tmp_path, capsys):
    bad = write("bad.json", builtin("no_such_thing"))
    assert main(["norm", "--f", bad, "--phi", "cosh-1"]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "no_such_thing" in err and "f.name" in err
    x = write("x.json", hermite(((1,), 1.0)))
    assert main(["norm", "--f", x, "--phi", "bogus"]) == EXIT_INPUT
    assert main(["norm", "--f", str(tmp_path / "missing.json"), "--phi", "cosh-1"]) == EXIT_INPUT
    assert main(["norm", "--f", write("broken.json", "{"), "--phi", "cosh-1"]) == EXIT_INPUT
    assert main(["norm", "--f", x, "--phi", "cosh-1", "--quad", "gh:zero"]) == EXIT_INPUT
    assert main(["semigroup", "--f", x, "--t", "-1", "--eval-at", x]) == EXIT_INPUT
    assert main(["nonsense"]) == EXIT_INPUT


def test_verify_bad_catalog(write, tmp_path, capsys):
    cat = {"functions": [{"id": "a", "function": hermite(((1,), 1.0))}], "pairs": [{"f": "a", "g": "zzz"}]}
    assert main(["verify", "--catalog", write("cat.json", cat)]) == EXIT_INPUT
    assert "zzz" in capsys.readouterr().err


def test_verify_empty_catalog(write, tmp_path):
    code, doc = run(["verify", "--catalog", write("cat.json", {"functions": []})], tmp_path)
    assert code == EXIT_OK
    assert doc["result"]["summary"]["total"] == 0


def test_verify_csv_matches_json(write, tmp_path):
    cat = {
        "functions": [
            {"id": "h1", "function": hermite(((1,), 1.0))},
            {"id": "sin", "function": builtin("sin_sum", dim=1)},
        ],
        "pairs": [{"f": "h1", "g": "sin"}],
    }
    path = write("cat.json", cat)
    code, doc = run(["verify", "--catalog", path], tmp_path)
    assert code == EXIT_OK
    csv_out = tmp_path / "out.csv"
    assert main(["verify", "--catalog", path, "--format", "csv", "--out", str(csv_out)]) == EXIT_OK
    lines = csv_out.read_text().splitlines()
    assert lines[0].startswith("# tool: orlicz-gauss ")
    assert lines[1].startswith("# config: ")
    assert json.loads(lines[1][len("# config: "):]) == json.loads(json.dumps(doc["config"], sort_keys=True)) | {
        "format": "csv"
    }
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[2:]))))
    jrows = doc["result"]["rows"]
    assert len(rows) == len(jrows) > 0
    for r, j in zip(rows, jrows):
        assert r["status"] == j["status"]
        for key in ("lhs", "rhs"):
            if isinstance(j[key], float):
                assert float(r[key]) == j[key]


def test_semigroup_at_zero_and_infinity(write, tmp_path):
    f = write("f.json", builtin("sin_sum", dim=1))
    pts = write("pts.json", [[-1.0], [0.0], [0.5], [2.0]])
    code, doc = run(["semigroup", "--f", f, "--t", "0", "--eval-at", pts], tmp_path)
    assert code == EXIT_OK and doc["result"]["route"] == "mehler"
    assert doc["result"]["values"] == [math.sin(x) for x in (-1.0, 0.0, 0.5, 2.0)]
    diag = doc["result"]["diagnostics"]
    assert diag["mean_invariance_error"] < 1e-12 and diag["l2_contraction_holds"]
    h = write("h.json", hermite(((0,), 1.5), ((2,), 1.0)))
    code, doc = run(["semigroup", "--f", h, "--t", "inf", "--eval-at", pts], tmp_path)
    assert code == EXIT_OK and doc["result"]["route"] == "hermite"
    assert doc["result"]["values"] == pytest.approx([1.5] * 4, abs=1e-14)


def test_semigroup_decay_of_hermite(write, tmp_path):
    # P_t H_2 = e^{-2t} H_2
    h = write("h.json", hermite(((2,), 1.0)))
    pts = write("pts.json", {"points": [[1.3]]})
    code, doc = run(["semigroup", "--f", h, "--t", "0.5", "--eval-at", pts], tmp_path)
    assert code == EXIT_OK
    assert doc["result"]["values"][0] == pytest.approx(math.exp(-1.0) * (1.3**2 - 1), rel=1e-13)


def test_ig_score_fit(write, tmp_path):
    target = write("t.json", {"u": hermite(((1,), 0.3), ((2,), -0.1))})
    basis = write("b.json", [hermite(((1,), 1.0)), hermite(((2,), 1.0))])
    code, doc = run(["ig", "score-fit", "--target", target, "--basis", basis], tmp_path)
    assert code == EXIT_OK
    assert doc["result"]["coefficients"] == pytest.approx([0.3, -0.1], abs=1e-10)
    code, doc = run(["ig", "score-fit", "--target", target, "--basis", basis, "--mode", "empirical",
                     "--samples", "20000", "--seed", "7"], tmp_path)
    assert code == EXIT_OK and doc["config"]["samples"] == 20000
    se = doc["result"]["std_errors"]
    for c, s, want in zip(doc["result"]["coefficients"], se, (0.3, -0.1)):
        assert abs(c - want) <= 5 * s
    samples = write("s.json", {"samples": [[0.1], [0.2]]})
    assert main(["ig", "score-fit", "--target", samples, "--basis", basis]) == EXIT_INPUT


def test_ig_otto_gaussian(write, tmp_path):
    p = write("p.json", {"density": builtin("constant", dim=1, c=1.0)})
    x = write("x.json", hermite(((1,), 1.0)))
    code, doc = run(["ig", "otto", "--p", p, "--f", x, "--g", x], tmp_path)
    assert code == EXIT_OK
    assert doc["result"]["value"] == pytest.approx(1.0, rel=1e-12) and doc["result"]["agree"]


def test_ig_check_model(write, tmp_path):
    p = write("p.json", {"density": builtin("gauss_density", theta=[1.0])})
    code, doc = run(["ig", "check-model", "--p", p], tmp_path)
    assert code == EXIT_OK
    assert doc["result"]["maxexp"]["l2"] == pytest.approx(math.e, rel=1e-12)
    assert doc["result"]["K"] == pytest.approx(0.5, rel=1e-12)
    u = write("u.json", {"u": hermite(((2,), 0.5))})
    assert main(["ig", "check-model", "--p", u]) == EXIT_DIVERGED


def test_jsonable_nonfinite():
    doc = jsonable({"a": math.inf, "b": [-math.inf, math.nan], "c": 1.5})
    assert doc == {"a": "inf", "b": ["-inf", "nan"], "c": 1.5}
    json.dumps(doc, allow_nan=False)


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "orlicz-gauss" in capsys.readouterr().out
