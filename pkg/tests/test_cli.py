import csv
import io
import json
import math
import subprocess
import sys

import pytest

from zigzag_ising.cli import RunConfig, build_parser, config_from_args, run


def _run(argv):
    buf = io.StringIO()
    code = run(argv, stdout=buf)
    return code, buf.getvalue()


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_magnetization_example():
    code, out = _run(["magnetization", "--theta-const", "0.7853981633974483", "--m-max", "4"])
    assert code == 0
    rows = _rows(out)
    assert rows[0][:2] == ["m", "M"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4"]
    assert float(rows[1][1]) == pytest.approx(8 / (3 * math.pi), abs=1e-7)


def test_exact_critical_example():
    code, out = _run(["exact-critical", "--n-max", "3"])
    assert code == 0
    rows = _rows(out)
    head = rows[0]
    r1 = dict(zip(head, rows[1]))
    r2 = dict(zip(head, rows[2]))
    assert len(rows) == 4
    assert float(r1["D"]) == pytest.approx(2 / math.pi, rel=1e-15)
    assert float(r2["D"]) == pytest.approx(16 / (3 * math.pi**2), rel=1e-15)
    assert float(r1["M"]) == pytest.approx(8 / (3 * math.pi), rel=1e-15)


def test_crosscheck_wetting_example(tmp_path):
    stem = str(tmp_path / "wet")
    code = run(["crosscheck", "--suite", "wetting", "--q", "0.5", "--r", "0.3", "--m-max", "4",
                "--out", stem])
    assert code == 0
    rows = _rows(open(stem + ".csv").read())
    assert len(rows) == 5 and all(r[-1] == "true" for r in rows[1:])
    side = json.load(open(stem + ".json"))
    assert side["schema"] == 1 and side["status"] == 0
    assert side["diagnostics"]["worst"] <= 1e-5
    assert side["config"]["params"]["q"] == 0.5


def test_crosscheck_failure_is_exit_4():
    assert _run(["crosscheck", "--suite", "exact", "--m-max", "2", "--tol", "1e-300"])[0] == 4


@pytest.mark.parametrize("argv", [
    ["magnetization", "--theta-const", "0.5", "--m-max", "3", "--method", "all"],
    ["homogeneous", "--theta-h", "0.5", "--theta-v", "0.4", "--m-max", "20"],
    ["critical-chain", "--theta", "0.6", "--n-max", "8"],
    ["wetting", "--q", "0.5", "--r", "0.3", "--m-max", "3"],
    ["ids", "--block", "0.7853981633974483,0.7853981633974483", "--periods", "64"],
    ["sembedding", "--block", "0.5235987755982988,1.0471975511965976"],
    ["oracle", "--theta-const", "0.5235987755982988", "--H", "4,6", "--W", "10"],
])
def test_subcommands_run_and_are_byte_identical(argv, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert run(argv + ["--out", a]) == 0
    assert run(argv + ["--out", b]) == 0
    assert open(a + ".csv", "rb").read() == open(b + ".csv", "rb").read()
    ja, jb = json.load(open(a + ".json")), json.load(open(b + ".json"))
    assert ja["schema"] == 1
    ja["config"].pop("out"), jb["config"].pop("out")
    assert ja == jb
    assert b"\r" not in open(a + ".csv", "rb").read()


def test_full_precision_numbers():
    _, out = _run(["exact-critical", "--n-max", "2"])
    head, *rows = _rows(out)
    v = rows[0][head.index("D")]
    assert float(v) == 2 / math.pi
    assert len(v.replace(".", "").lstrip("0")) == 17


def test_json_format():
    code, out = _run(["exact-critical", "--n-max", "2", "--format", "json"])
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and len(doc["rows"]) == 2


def test_svg_written(tmp_path):
    stem = str(tmp_path / "s")
    assert run(["sembedding", "--block", "0.7853981633974483,0.7853981633974483", "--svg",
                "--out", stem]) == 0
    assert open(stem + ".svg").read().startswith("<svg")


def test_x_parametrization_matches_radians():
    th = 0.6
    x = math.tan(th / 2)
    _, a = _run(["magnetization", "--theta-const", repr(th), "--m-max", "2"])
    _, b = _run(["magnetization", "--theta-const", repr(x), "--x", "--m-max", "2"])
    ra, rb = _rows(a), _rows(b)
    assert float(ra[2][1]) == pytest.approx(float(rb[2][1]), rel=1e-12)


def test_exit_codes():
    assert _run(["magnetization", "--theta-const", "2.0"])[0] == 2
    assert _run(["magnetization", "--theta-const", "0.7853981633974483", "--m-max", "2",
                 "--tol", "1e-16"])[0] == 3
    assert _run(["sembedding", "--block", "0.5,0.5"])[0] == 2
    assert _run(["magnetization", "--theta-const", "0.5", "--bogus"])[0] == 1
    assert _run(["nosuch"])[0] == 1


def test_usage_error_on_stderr():
    p = subprocess.run([sys.executable, "-m", "zigzag_ising", "magnetization", "--nope"],
                       capture_output=True, text=True)
    assert p.returncode == 1 and p.stdout == "" and "error" in p.stderr


def test_threads_env(monkeypatch):
    monkeypatch.setenv("ZZI_THREADS", "zero")
    assert _run(["exact-critical", "--n-max", "1"])[0] == 1
    monkeypatch.setenv("ZZI_THREADS", "1")
    assert _run(["exact-critical", "--n-max", "1"])[0] == 0


def test_config_round_trip():
    args = build_parser().parse_args(["magnetization", "--thetas", "0.3,0.4", "--tail", "0.5",
                                      "--m-max", "2"])
    cfg = config_from_args(args)
    again = RunConfig.from_canonical(json.loads(cfg.dumps()))
    assert again.dumps() == cfg.dumps()
