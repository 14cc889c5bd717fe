import subprocess
import sys
from pathlib import Path

import pytest

from polymergas.cli import main

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"
SYSTEMS = {"path3": "mu1", "k5": "mu10", "single": "mu1"}


def run(args, capsys):
    status = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return status, out, err


def golden_args(command, name):
    args = [command, "--system", DATA / f"{name}.sys"]
    if command == "z":
        args += ["--activities", DATA / "ones.w"]
    else:
        args += ["--mu", DATA / f"{SYSTEMS[name]}.mu"]
    return args


@pytest.mark.parametrize("command", ["z", "radii", "verify"])
@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_golden_reports(command, name, capsys):
    first = run(golden_args(command, name), capsys)
    second = run(golden_args(command, name), capsys)
    assert first == second
    status, out, _ = first
    assert status == 0
    assert out == (GOLDEN / f"{command}_{name}.txt").read_text(encoding="utf-8")


def test_z_examples(capsys):
    status, out, _ = run(["z", "--family", "path:3"], capsys)
    assert status == 0 and "\nZ = 5\n" in out
    status, out, _ = run(["z", "--family", "complete:3"], capsys)
    assert "\nZ = 4\n" in out


def test_z_empty_lambda(tmp_path, capsys):
    lam = tmp_path / "empty.lambda"
    lam.write_text("lambda\n")
    status, out, _ = run(["z", "--family", "path:3", "--lambda", lam], capsys)
    assert status == 0 and "\nZ = 1\n" in out


def test_z_cap_is_usage_error(capsys):
    status, _, err = run(["z", "--family", "edgeless:6", "--cap", "5"], capsys)
    assert status == 2 and "z_recursive" in err


def test_radii_examples(capsys):
    _, out, _ = run(["radii", "--family", "complete:5", "--mu", "uniform:10"], capsys)
    assert "FP 10/51 " in out and "D 10/161051 " in out
    _, out, _ = run(["radii", "--family", "edgeless:1", "--mu", "uniform:1"], capsys)
    assert "FP 1/2 (0.5) D 1/2 (0.5)" in out
    _, out, _ = run(["radii", "--family", "path:3", "--mu", "uniform:1"], capsys)
    assert "1 1 1 FP 1/5 (0.2)" in out


def test_radii_optimized(capsys):
    status, out, _ = run(["radii", "--family", "complete:5", "--mu-hi", "2"], capsys)
    assert status == 0
    assert "optimum dobrushin: mu = 1/4 (0.25), radius = 256/3125 (0.08192)" in out
    assert "optimum fp: mu = 2 (2)" in out and "monotone at grid boundary" in out


def test_radii_subset_gas_reports_cap(capsys):
    _, out, _ = run(["radii", "--subsetgas", "space:3,maxsize:2", "--mu", "uniform:1/10"], capsys)
    assert "truncation: polymer size cap 2" in out


def test_verify_path3(capsys):
    status, out, _ = run(["verify", "--family", "path:3"], capsys)
    assert status == 0
    assert "proposition: 12/12 pass, 0 fail, 0 skip" in out


def test_verify_hypothesis_skip_is_not_failure(tmp_path, capsys):
    status, out, _ = run(["verify", "--family", "complete:3", "--f", "1"], capsys)
    assert status == 0
    status, _, err = run(["verify", "--family", "complete:3", "--f", "3/2"], capsys)
    assert status == 2 and "--f" in err


def test_verify_verbose_lines(capsys):
    _, out, _ = run(["verify", "--family", "edgeless:1", "--verbose"], capsys)
    assert "CHECK theorem_log n=1 pass x=0 f=1 abs_theta=0.69314718056" in out


def test_mayer_convergence(capsys):
    status, out, _ = run(["mayer", "--family", "edgeless:1", "--activities", "uniform:1/5",
                          "--order", "20"], capsys)
    assert status == 0
    last = out.strip().splitlines()[-1].split()
    assert last[0] == "20" and float(last[2]) < 1e-9


def test_pressure_commands(tmp_path, capsys):
    status, out, _ = run(["pressure", "--subsetgas", "space:1,maxsize:1", "--mu", "uniform:1"], capsys)
    assert status == 0 and "pressure_bound: 1/1 pass" in out
    status, out, _ = run(["pressure", "--subsetgas", str(DATA / "path4.gas"), "--mu", "uniform:3/10"], capsys)
    assert status == 0 and "K(truncated)=9/10" in out
    lam = tmp_path / "sites"
    lam.write_text("lambda 0 1\n")
    status, out, _ = run(["pressure", "--subsetgas", "space:4,maxsize:2,edges:path",
                          "--mu", "uniform:3/10", "--lambda", lam], capsys)
    assert status == 0 and "sites: {0,1}" in out


def test_usage_errors(tmp_path, capsys):
    assert run(["z"], capsys)[0] == 2
    assert run(["z", "--family", "path:3", "--system", "x"], capsys)[0] == 2
    assert run(["z", "--family", "star:3"], capsys)[0] == 2
    assert run(["z", "--system", tmp_path / "missing.sys"], capsys)[0] == 2
    bad = tmp_path / "bad.sys"
    bad.write_text("polymers 2\nincompat 0 5\n")
    status, _, err = run(["z", "--system", bad], capsys)
    assert status == 2 and "line 2" in err
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.txt"
    status, out, _ = run(["z", "--family", "path:3", "--out", target], capsys)
    assert status == 0 and out == ""
    assert "Z = 5" in target.read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polymergas", "z", "--family", "path:2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "Z = 3" in proc.stdout
