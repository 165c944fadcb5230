import json
import subprocess
import sys
from pathlib import Path

import mpmath
import pytest

from cyclosums.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_ti_constant(capsys):
    code, out, _ = run(capsys, "eval", "--kind", "R", "--exps", "", "--q", "2", "--x", "1")
    assert code == 0
    d = json.loads(out)
    assert set(d) == {"spec", "value", "err", "certified", "terms_used", "seconds"}
    mpmath.mp.dps = 45
    assert abs(mpmath.mpf(d["value"]["re"]) - mpmath.pi ** 2 / 2) < mpmath.mpf(10) ** -38


def test_eval_cmsv(capsys):
    code, out, _ = run(capsys, "eval", "--kind", "CMSV", "--exps", "2", "--roots", "1")
    assert code == 0
    mpmath.mp.dps = 45
    assert abs(mpmath.mpf(json.loads(out)["value"]["re"]) - mpmath.pi ** 2 / 12) < mpmath.mpf(10) ** -38


@pytest.mark.parametrize("argv,needle", [
    (("eval", "--kind", "R", "--exps", "", "--q", "1", "--x", "1"), "(q,x)=(1,1) diverges"),
    (("check", "--theorem", "T31", "--p", "1", "--q", "1", "--x", "0/1", "--y", "0/1"), "(q,xy)"),
    (("eval", "--kind", "S", "--exps", "a", "--q", "2"), "integers"),
    (("check", "--theorem", "T99"), "unknown theorem"),
    (("eval", "--kind", "S", "--exps", "1", "--roots", "1/2", "--q", "2", "--digits", "3"), "digits"),
    (("check", "--theorem", "closure", "--rational", "poles=[(2,2)]"), "collides"),
])
def test_invalid_input_exit_2(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert needle in err


def test_check_pass_and_fields(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "T31", "--p", "1", "--q", "2", "--x", "1/2",
                       "--y", "1/2", "--digits", "40")
    d = json.loads(out)
    assert code == 0 and d["pass"]
    assert set(d) >= {"theorem", "params", "lhs", "rhs", "residual", "pass", "terms_used", "seconds"}


def test_check_closure(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "closure", "--kernel", "H", "--p", "1",
                       "--rational", "poles=[(1/2,2)]", "--nmax", "200")
    d = json.loads(out)
    assert code == 0 and d["pass"]
    assert d["residual_doubled"] < d["residual"] <= 1e-3


def test_check_printed_variant_fails(capsys):
    argv = ["check", "--theorem", "T63b", "--p", "2,1", "--roots", "1/4,1/2", "--x", "1/3",
            "--rational", "poles=[(0,2),(1/4,2)]", "--digits", "30", "--tol", "1e-20"]
    assert run(capsys, *argv)[0] == 0
    assert run(capsys, *argv, "--printed")[0] == 1


def test_split_check(capsys):
    code, out, _ = run(capsys, "check", "--theorem", "SPLIT_R", "--k", "1,2", "--roots", "1/2,1/3",
                       "--branch", "1")
    assert code == 0 and json.loads(out)["params"]["branch"] == 1


def test_kernel_commands(capsys):
    code, out, _ = run(capsys, "kernel", "--fn", "phi", "--p", "2", "--s", "1/3", "--x", "1/2")
    assert code == 0 and json.loads(out)["value"]["re"].startswith("8.5636594207477353767983454832546")
    code, out, _ = run(capsys, "kernel", "--expand=-3/2", "--which", "Phi", "--x", "1/3", "--trunc", "3")
    d = json.loads(out)
    assert code == 0 and d["lowest_order"] == 0 and len(d["coefficients"]) == 3
    code, out, _ = run(capsys, "kernel", "--expand", "2", "--which", "phi_p", "--p", "2", "--x", "1/2")
    assert code == 0 and json.loads(out)["lowest_order"] == 0
    assert run(capsys, "kernel", "--fn", "Phi", "--s", "2")[0] == 2


def test_suite_shipped_examples(capsys, tmp_path):
    out_json, out_csv = tmp_path / "r.json", tmp_path / "r.csv"
    code, out, _ = run(capsys, "suite", str(ROOT / "suites" / "paper_examples.json"), "--out",
                       str(out_json), "--csv", str(out_csv))
    rep = json.loads(out_json.read_text())
    assert code == 0
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == len(rep["cases"])
    assert set(rep["summary"]) == {"total", "passed", "failed", "max_residual", "wall_seconds"}
    assert len(out_csv.read_text().splitlines()) == rep["summary"]["total"] + 1


def test_suite_grid_small(capsys):
    code, out, _ = run(capsys, "suite", str(ROOT / "suites" / "grid_small.json"))
    assert code == 0
    assert json.loads(out)["summary"]["passed"] > 50


@pytest.mark.parametrize("cfg", [{"cases": []}, {"nope": 1}, {"cases": [{"theorem": "T31", "exps": [1, 1],
                                                                          "roots": ["1/2", "1/2"]}]},
                                 {"cases": [{"theorem": "T31", "grid": {"p": [1], "q": [1], "max_order": 1}}]}])
def test_suite_config_errors(capsys, tmp_path, cfg):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out.json"
    code, stdout, _ = run(capsys, "suite", str(path), "--out", str(out))
    assert code == 2 and stdout == "" and not out.exists()


def test_suite_failing_case_exit_1(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"digits": 30, "tol": 1e-20, "cases": [
        {"theorem": "T31", "exps": [1, 2], "roots": ["1/2", "1/3"]},
        {"theorem": "T63a", "ps": [1, 2], "roots": ["1/2", "1/3"], "x": "1/3",
         "rational": "poles=[(-1/2,1),(1/4,2)]", "printed": True}]}))
    code, out, _ = run(capsys, "suite", str(path))
    rep = json.loads(out)
    assert code == 1 and rep["summary"]["passed"] == 1 and rep["summary"]["failed"] == 1


def _strip_seconds(obj):
    if isinstance(obj, dict):
        return {k: _strip_seconds(v) for k, v in obj.items() if k not in ("seconds", "wall_seconds")}
    if isinstance(obj, list):
        return [_strip_seconds(v) for v in obj]
    return obj


def test_deterministic_and_parallel(capsys):
    path = str(ROOT / "suites" / "paper_examples.json")
    _, a, _ = run(capsys, "suite", path)
    _, b, _ = run(capsys, "suite", path, "--jobs", "2")
    assert _strip_seconds(json.loads(a)) == _strip_seconds(json.loads(b))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cyclosums", "eval", "--kind", "S", "--exps", "1",
                          "--roots", "1", "--q", "2", "--x", "1", "--digits", "20"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"]["re"].startswith("2.4041138063191885707")
