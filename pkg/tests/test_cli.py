import json

import pytest

from twowell import __version__
from twowell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--gamma", "0", "--lambda", "0", "--M", "4")
    data = json.loads(out)
    assert code == 0
    assert data["levels"][:3] == pytest.approx([-4.0, -2.0, 0.0])


def test_meanfield(capsys):
    code, out, _ = run(capsys, "meanfield", "--lambda", "2.5")
    assert code == 0 and json.loads(out)["phase"] == "degenerate"


def test_thermo_and_exit_codes(capsys):
    code, out, _ = run(capsys, "thermo", "--gamma", "0", "--lambda", "0", "--mu", "-2")
    assert code == 0
    assert json.loads(out)["m_mean"] == pytest.approx(0.6343724, rel=1e-6)
    code, _, err = run(capsys, "thermo", "--lambda", "1", "--mu", "0")
    assert code == 3 and "diverges" in err
    code, _, _ = run(capsys, "thermo", "--lambda", "1", "--mu", "-3", "--beta", "-1")
    assert code == 2
    code, _, _ = run(capsys, "spectrum", "--lambda", "1", "--M", "0")
    assert code == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["thermo", "--lambda", "x", "--mu", "-2"])
    assert exc.value.code == 2


def test_boundary(capsys):
    code, out, _ = run(capsys, "boundary", "--lambda", "1", "--mu", "-2.2", "--mu-d", "-3")
    data = json.loads(out)
    assert code == 0 and data["case"] == "case1"
    assert data["divergence_point"]["case"] == "case2"
    code, _, _ = run(capsys, "boundary", "--mu-d", "-1")
    assert code == 3


def test_saddle(capsys):
    code, out, _ = run(capsys, "saddle", "--lambda", "1", "--mu", "-2.2")
    data = json.loads(out)
    assert code == 0 and data["subcase"] == "S1"
    assert data["f_star"] == pytest.approx(-0.285786, abs=1e-6)


def test_scan_is_deterministic_and_fit_reads_it(tmp_path, capsys):
    args = ["scan", "--path", "fixed-lambda", "--mu-d", "-2", "--start", "0.3", "--end", "0.05",
            "--points", "5"]
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header.startswith(f"# twowell {__version__} scan") and "--mu-d=-2.0" in header
    capsys.readouterr()
    code, out, _ = run(capsys, "fit", "--input", str(a), "--field", "m_mean")
    assert code == 0 and json.loads(out)["slope"] == pytest.approx(-1.0, abs=0.15)


def test_scan_json_to_stdout(capsys):
    code, out, _ = run(capsys, "scan", "--points", "2", "--start", "0.3", "--end", "0.2",
                       "--format", "json")
    assert code == 0 and len(json.loads(out)) == 2


def test_io_failure_exit_4(tmp_path, capsys):
    code, _, err = run(capsys, "scan", "--points", "2", "--start", "0.3", "--end", "0.2",
                       "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 4 and err
    code, _, _ = run(capsys, "fit", "--input", str(tmp_path / "nope.csv"))
    assert code == 4
