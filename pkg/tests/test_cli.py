import json
import subprocess
import sys

import numpy as np
import pytest
from skimage import data

from rapidlab.appbench import write_pgm
from rapidlab.cli import main
from rapidlab.rapidscheme import builtin_path, load_scheme


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_derive(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(capsys, "derive", "--scheme", "RAPID-5-mul", "--out", str(out))[0] == 0
    s = load_scheme(out)
    assert len(s.coefficients) == 5 and len(s.grid) == 16
    first = out.read_bytes()
    run(capsys, "derive", "--scheme", "RAPID-5-mul", "--out", str(out))
    assert out.read_bytes() == first == builtin_path("RAPID-5-mul").read_bytes()
    code, text, _ = run(capsys, "derive", "--scheme", "RAPID-9-div")
    assert code == 0 and len(json.loads(text)["coefficients"]) == 9


def test_derive_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["derive", "--scheme", "RAPID-7-mul"])
    assert e.value.code == 2
    code, _, err = run(capsys, "derive", "--scheme", "RAPID-3-mul", "--out", str(tmp_path / "no" / "x.json"))
    assert code == 3 and "cannot write" in err


def test_characterize_csv(capsys):
    code, out, _ = run(capsys, "characterize", "--unit", "mitchell-mul", "--width", "8", "--exhaustive")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0] == "unit,width,scheme,mode,samples,seed,are_pct,pre_pct,bias_pct,excluded_zero,excluded_invalid"
    assert abs(float(lines[1].split(",")[6]) - 3.77) < 0.3


def test_characterize_monte_carlo_deterministic(capsys):
    argv = ["characterize", "--unit", "rapid-mul", "--scheme", "RAPID-3-mul", "--width", "16",
            "--monte-carlo", "300000", "--seed", "1", "--format", "json"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv, "--threads", "2")[1]
    assert a == b
    assert json.loads(a)[0]["seed"] == 1


def test_characterize_sweep_and_scheme_file(tmp_path, capsys):
    code, out, _ = run(capsys, "characterize", "--unit", "rapid-div", "--width", "4", "--exhaustive",
                       "--scheme", "RAPID-3-div", "--scheme", str(builtin_path("RAPID-9-div")))
    assert code == 0 and len(out.splitlines()) == 3


@pytest.mark.parametrize("argv, code", [
    (["--unit", "mitchell-mul", "--width", "32", "--exhaustive"], 3),
    (["--unit", "mitchell-mul", "--width", "12", "--exhaustive"], 2),
    (["--unit", "mitchell-mul", "--exhaustive", "--seed", "3"], 2),
    (["--unit", "mitchell-mul", "--monte-carlo", "10"], 2),
    (["--unit", "mitchell-mul", "--scheme", "RAPID-3-mul", "--exhaustive"], 2),
    (["--unit", "rapid-mul", "--scheme", "/nonexistent.json", "--exhaustive"], 3),
])
def test_characterize_errors(argv, code, capsys):
    assert run(capsys, "characterize", *argv)[0] == code


def test_pipeline_single_pair(tmp_path, capsys):
    src = tmp_path / "p.csv"
    src.write_text("a,b\n58,18\n")
    code, out, err = run(capsys, "pipeline", "--unit", "mitchell-mul", "--stages", "3", "--input", str(src), "--check")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert [r for r in rows if r[4] == "1"] == [["3", "", "", "992", "1"]]
    assert "equivalent" in err


def test_pipeline_random_check(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, _, err = run(capsys, "pipeline", "--unit", "rapid-div", "--width", "8", "--stages", "4",
                       "--monte-carlo", "1000", "--seed", "5", "--check", "--out", str(out))
    assert code == 0 and "equivalent (1000 pairs" in err
    assert len(out.read_text().splitlines()) == 1 + 1000 + 4


def test_pipeline_empty_and_bad_input(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    code, out, _ = run(capsys, "pipeline", "--input", str(empty), "--check")
    assert code == 0 and out.splitlines() == ["cycle,in_a,in_b,out,valid"]
    bad = tmp_path / "b.csv"
    bad.write_text("1,2\n3\n")
    assert run(capsys, "pipeline", "--input", str(bad))[0] == 3
    ovf = tmp_path / "o.csv"
    ovf.write_text("250,3\n")
    assert run(capsys, "pipeline", "--unit", "mitchell-div", "--width", "4", "--input", str(ovf))[0] == 3
    assert run(capsys, "pipeline")[0] == 2


def test_bench_jpeg(tmp_path, capsys):
    path = tmp_path / "coins.pgm"
    write_pgm(path, data.coins())
    code, out, _ = run(capsys, "bench-jpeg", str(path), "--profile", "exact", "--profile", "rapid")
    rows = json.loads(out)
    assert code == 0 and [r["profile"] for r in rows] == ["exact", "RAPID-10-mul+RAPID-9-div"]
    assert rows[0]["psnr_db"] == rows[0]["baseline_psnr_db"]
    assert rows[1]["psnr_db"] <= rows[1]["baseline_psnr_db"]
    assert run(capsys, "bench-jpeg", str(tmp_path / "missing.pgm"))[0] == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rapidlab", "characterize", "--unit", "mitchell-div",
                        "--width", "4", "--exhaustive"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("unit,width")
    assert np.isclose(float(r.stdout.splitlines()[1].split(",")[6]), 3.96, atol=0.01)
