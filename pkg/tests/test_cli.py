import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from mudom.cli import RunConfig, main, run
from mudom.errors import InvalidArgumentError
from mudom.io import (
    decode_matrix,
    decode_point,
    encode_matrix,
    encode_point,
    matrix_from_csv,
    matrix_to_csv,
)
from mudom.selftest import selftest

SCHEMA = json.loads((Path(__file__).parents[1] / "reports" / "schema" / "report.v1.json").read_text())


def call(argv, capsys):
    code = main(argv)
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, SCHEMA)
    return code, report


def test_table(capsys):
    code, rep = call(["table", "--blocks", "2,1"], capsys)
    assert code == 0
    assert rep["result"]["N"] == 5
    assert rep["result"]["alphas"] == [[1, 0], [2, 0], [0, 1], [1, 1], [2, 1]]
    assert set(rep["versions"]) == {"mudom", "numpy", "scipy", "python"}


def test_member_exit_codes(capsys):
    assert call(["member", "--blocks", "2", "--point", "[[0,0],[0,0]]"], capsys)[0] == 0
    code, rep = call(["member", "--blocks", "1,1", "--point", "[[0,0],[0,0],[2,0]]"], capsys)
    assert code == 1 and rep["result"]["status"] == "Outside"
    code, rep = call(["member", "--blocks", "1,1", "--point", "[[0,0],[0,0],[1,0]]"], capsys)
    assert code == 2 and rep["result"]["status"] == "Boundary"
    code, _ = call(["closure", "--blocks", "1,1", "--point", "[[0,0],[0,0],[1,0]]"], capsys)
    assert code == 0


def test_errors(capsys, tmp_path):
    code, rep = call(["member", "--blocks", "0,1", "--point", "[[0,0]]"], capsys)
    assert code == 10 and rep["error"]["type"] == "InvalidSpecError"
    code, rep = call(["member", "--blocks", "2", "--point", "[[0,0]]"], capsys)
    assert code == 11
    code, rep = call(["member", "--blocks", "2", "--point", str(tmp_path / "missing.json")], capsys)
    assert code == 13
    code, rep = call(["member", "--blocks", "2", "--point", "[[0,0],[0,0]]", "--tol", "-1"], capsys)
    assert code == 11
    code, rep = call(["separate", "--blocks", "1,1", "--point", "[[0,0],[0,0],[0.5,0]]"], capsys)
    assert code == 11


def test_point_file_and_out(capsys, tmp_path):
    pt = tmp_path / "p.json"
    pt.write_text(json.dumps({"point": [[0.8, 0], [0.15, 0]]}))
    out = tmp_path / "r.json"
    code, rep = call(["member", "--blocks", "2", "--point", str(pt), "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text()) == rep


def test_report_round_trip(capsys):
    _, rep = call(["mink", "--blocks", "1,1", "--point", "[[0,0],[0.5,0],[0,0]]", "--tol", "1e-6"], capsys)
    cfg = RunConfig.from_json(rep["config"])
    code, again = run(cfg)
    assert again["result"] == rep["result"]
    assert abs(rep["result"]["value"] - 0.5) < 1e-6


def test_mu_pi_embed(capsys, tmp_path):
    A = [[[0.5, 0], [0.3, 0]], [[0.1, 0], [0.4, 0]]]
    code, rep = call(["mu", "--blocks", "1,1", "--matrix", json.dumps(A), "--certify", "--tol", "1e-2"], capsys)
    r = rep["result"]
    assert r["lower"] <= r["upper"] + 1e-12
    assert r["certified"]["lo"] - 1e-9 <= r["lower"] <= r["certified"]["hi"] + 1e-9
    csv_path = tmp_path / "a.csv"
    csv_path.write_text(matrix_to_csv(decode_matrix(A)))
    code, rep = call(["pi", "--blocks", "1,1", "--matrix", str(csv_path)], capsys)
    x = decode_point(rep["result"]["x"])
    np.testing.assert_allclose(x, [0.5, 0.4, 0.5 * 0.4 - 0.03])
    code, rep = call(["embed", "--blocks", "1,1", "--point", "[[1,0],[2,0],[3,0]]"], capsys)
    assert rep["result"]["m"] == [1, 3] and rep["result"]["M"] == 4


def test_sample_thread_independent(capsys):
    base = ["sample", "--blocks", "2,1", "--count", "300", "--seed", "9"]
    _, one = call(base + ["--threads", "1"], capsys)
    _, four = call(base + ["--threads", "4"], capsys)
    assert one["result"] == four["result"]
    assert set(one["result"]["statuses"]) == {"Inside"}


def test_separate_penta_probe(capsys, tmp_path):
    code, rep = call(["separate", "--blocks", "1,1", "--point", "[[0,0],[0,0],[2,0]]"], capsys)
    assert code == 0 and rep["result"]["value_at_x0"] < 1e-12
    code, rep = call(["penta", "--point", "[[1,0],[0,0],[0,0]]", "--mink"], capsys)
    assert abs(rep["result"]["value"] - 1) < 1e-6
    code, rep = call(["penta", "--point", "[[2,0],[0,0],[0,0]]"], capsys)
    assert code == 1
    csv_path = tmp_path / "sec.csv"
    code, rep = call(["probe", "--mode", "section", "--ball-dim", "2", "--basepoint", "[[0,0],[0,0]]",
                      "--direction", "[[1,0],[0,0]]", "--raster", "32", "--csv", str(csv_path)], capsys)
    assert rep["result"]["components"] == 1 and rep["result"]["holes"] == 0
    assert csv_path.read_text().startswith("lam_re,lam_im,status")
    code, rep = call(["probe", "--mode", "separator", "--blocks", "1,1", "--point", "[[0,0],[0,0],[2,0]]",
                      "--samples", "500"], capsys)
    assert code == 0 and rep["result"]["report"]["passed"]
    code, rep = call(["probe", "--mode", "psh", "--blocks", "2", "--matrix", "[[[1,0],[2,0]],[[0,0],[0.5,0]]]",
                      "--matrix-b", "[[[0,0],[1,0]],[[1,0],[0,0]]]"], capsys)
    assert rep["result"]["passed"]


def test_selftest_command(capsys):
    code = main(["selftest", "--seed", "3"])
    out = capsys.readouterr()
    rep = json.loads(out.out)
    assert code == 0 and rep["result"]["ok"]
    assert "det_identity" in out.err


def test_selftest_determinism_and_canary():
    strip = lambda r: {k: (v["passed"], v["failed"]) for k, v in r["suites"].items()}
    a, b = selftest(5), selftest(5)
    assert strip(a) == strip(b) and a["ok"]
    bad = selftest(5, canary=True)
    assert not bad["ok"] and bad["suites"]["det_identity"]["failed"] > 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mudom", "table", "--blocks", "1,1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["N"] == 3


def test_io_round_trips(rng):
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    np.testing.assert_array_equal(decode_matrix(json.loads(json.dumps(encode_matrix(A)))), A)
    np.testing.assert_array_equal(matrix_from_csv(matrix_to_csv(A)), A)
    x = A[0]
    np.testing.assert_array_equal(decode_point(json.loads(json.dumps(encode_point(x)))), x)
    with pytest.raises(InvalidArgumentError):
        decode_point([[1, 2, 3]])
    with pytest.raises(InvalidArgumentError):
        decode_matrix([[[1, 0]], [[1, 0], [2, 0]]])
    with pytest.raises(InvalidArgumentError):
        matrix_from_csv("1,2,3\n")
