import csv
import io
import json
import subprocess
import sys

import pytest

from polyspace.cli import dispatch


def run(*argv):
    out = io.StringIO()
    code = dispatch(list(argv), out)
    return code, out.getvalue()


def test_betti_planar_pentagon():
    code, text = run("betti", "--space", "planar", "--lengths", "1,1,1,1,1")
    assert code == 0
    assert "1,8,1" in text


def test_betti_spatial_json():
    code, text = run("betti", "--space", "spatial", "--lengths", "1,1,1,1,1", "--format", "json")
    assert code == 0
    assert json.loads(text) == {"space": "spatial", "n": 5, "betti": [1, 0, 5, 0, 1]}


def test_volume_r0():
    code, text = run("volume", "r0", "--p", "2", "--q", "3")
    assert code == 0
    assert text.split()[0] == "5/16"


@pytest.mark.parametrize(
    "argv, exact",
    [
        (["volume", "vj", "--n", "8", "--p", "2"], "1/16"),
        (["volume", "frustum", "--p", "1", "--q", "2", "--x", "1/3"], "4/9"),
        (["volume", "lambda", "--n", "20", "--p", "1"], "5/131072"),
    ],
)
def test_volume_json(argv, exact):
    code, text = run(*argv, "--format", "json")
    assert code == 0
    assert json.loads(text)["exact"] == exact


def test_volume_gamma_csv():
    code, text = run("volume", "gamma", "--n", "8", "--p", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0
    assert rows[0] == ["bound", "exact", "decimal"]
    assert rows[2][:2] == ["union", "0"]


def test_chambers_enumerate(tmp_path):
    path = tmp_path / "codes.json"
    code, text = run("chambers", "enumerate", "--n", "5", "--out", str(path))
    assert code == 0
    assert text.splitlines()[0] == "7 orbits"
    data = json.loads(path.read_text())
    assert data["count"] == 7 and len(data["orbits"]) == 7


def test_chambers_code():
    code, text = run("chambers", "code", "--lengths", "1,2,3,3.5")
    assert (code, text.strip()) == (0, "{{1,4}}")


def test_sample_and_experiment_text():
    code, text = run("sample", "--n", "4", "--count", "3", "--seed", "5")
    assert code == 0 and len(text.splitlines()) == 3
    code, text = run("experiment", "run", "--n", "8", "--p", "1", "--samples", "2000", "--seed", "3")
    assert code == 0 and "theory 7" in text


def test_experiment_total_and_kn():
    code, text = run("experiment", "total", "--n", "5", "--samples", "500", "--format", "json")
    assert code == 0 and json.loads(text)["bound"] == 10
    code, text = run("experiment", "kn", "--n", "2", "--samples", "5000", "--format", "csv")
    assert code == 0 and text.startswith("n,k_n,stderr")


def test_scan_and_report_csv():
    argv = ["--n-from", "6", "--n-to", "8", "--samples", "1000", "--p", "1", "--seed", "9"]
    code, text = run("experiment", "scan", *argv)
    assert code == 0
    assert text.splitlines()[0] == "n,estimate,stderr,theory,abs_dev"
    code, text = run("report", *argv)
    assert code == 0
    assert text.splitlines()[0] == "n,abs_dev,stderr,log10_abs_dev"
    assert len(text.splitlines()) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["betti", "--space", "spatial", "--lengths", "1,1,1,1"],  # on a wall
        ["betti", "--lengths", "1,-1,2"],
        ["volume", "frustum", "--p", "1", "--q", "1", "--x", "2"],
        ["chambers", "enumerate", "--n", "12"],
        ["experiment", "run", "--n", "6", "--p", "5", "--samples", "10"],
    ],
)
def test_domain_errors_exit_1(argv, capsys):
    code, _ = run(*argv, "--format", "text")
    assert code == 1
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nonsense"],
        ["betti"],
        ["betti", "--lengths", "1,1,1", "--bogus"],
        ["volume", "r0", "--p", "2"],
        ["chambers", "enumerate"],
        ["betti", "--lengths", "1,1,1", "--format", "xml"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_byte_identical_output(fmt, tmp_path):
    argv = ["experiment", "run", "--n", "9", "--p", "1", "--samples", "3000", "--seed", "11",
            "--shards", "3", "--format", fmt]
    first = run(*argv)
    second = run(*argv)
    assert first == second
    assert first[0] == 0


def test_manifest_results_independent_of_shards(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["experiment", "run", "--n", "9", "--p", "1", "--samples", "2000", "--seed", "4"]
    assert run(*base, "--out", str(a))[0] == 0
    assert run(*base, "--shards", "4", "--out", str(b))[0] == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    for key in ("mean", "mean_exact", "variance", "stderr", "rejected"):
        assert da["results"][key] == db["results"][key]
    assert set(da) == set(db)


@pytest.mark.parametrize(
    "argv",
    [
        ["betti", "--lengths", "3,4,5,6"],
        ["volume", "r0", "--p", "3", "--q", "4"],
        ["chambers", "code", "--lengths", "1,2,3,3.5"],
        ["sample", "--n", "5", "--count", "2"],
    ],
)
@pytest.mark.parametrize("fmt", ["text", "json", "csv"])
def test_every_subcommand_honours_format(argv, fmt):
    code, text = run(*argv, "--format", fmt)
    assert code == 0 and text
    if fmt == "json":
        json.loads(text)
    if fmt == "csv":
        assert len(list(csv.reader(io.StringIO(text)))) >= 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polyspace", "volume", "r0", "--p", "1", "--q", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("1/8")
