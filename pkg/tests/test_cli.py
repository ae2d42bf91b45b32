import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from mixediga.harness.cli import ENV_OUTPUT_DIR, main
from mixediga.harness.emit import read_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def test_converge_to_stdout():
    code, text = run(["converge", "--dim", "1", "--p", "1", "--N", "4,8", "--rules", "gauss", "--eigen-indices", "1"])
    assert code == 0
    header, rows = read_csv(text)
    assert header[0] == "p" and len(rows) == 3
    assert rows[-1][1] is None and rows[-1][-1] == pytest.approx(2, abs=0.1)


def test_spectrum_and_dispersion():
    code, text = run(["spectrum", "--operator", "laplace", "--p", "1", "--N", "4", "--rules", "gauss"])
    assert code == 0
    _, rows = read_csv(text)
    assert rows[0][8] == pytest.approx(5.24e-2, abs=5e-5)
    code, text = run(["dispersion", "--p", "1,2", "--rules", "gauss,optimal"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [round(float(r["exponent"])) for r in rows] == [4, 6, 6, 8]


def test_blend_search_config_file(tmp_path):
    code, _ = run(["blend-search", "--config", str(CONFIGS / "table1.cfg"), "--p", "1,2", "--output-dir", str(tmp_path)])
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "table1.csv").open()))
    assert len(rows) == 4
    assert max(float(r["abs_error"]) for r in rows) < 1e-6


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "study.cfg"
    cfg.write_text("operator = laplace\ndim = 1\np_list = 3\nN_list = 4, 8\nrules = gauss\neigen_indices = 1\n")
    code, text = run(["converge", "--config", str(cfg), "--p", "1"])
    assert code == 0
    _, rows = read_csv(text)
    assert {r[0] for r in rows} == {1} and rows[0][4] == "laplace"


def test_env_var_and_flag_precedence(tmp_path, monkeypatch):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(env_dir))
    args = ["converge", "--dim", "1", "--p", "1", "--N", "4,8", "--rules", "gauss", "--eigen-indices", "1",
            "--outputs", "r.csv,r.json,r.svg"]
    assert run(args)[0] == 0
    assert sorted(p.name for p in env_dir.iterdir()) == ["r.csv", "r.json", "r.svg"]
    assert json.loads((env_dir / "r.json").read_text())["kind"] == "convergence"
    assert run(args + ["--output-dir", str(flag_dir)])[0] == 0
    assert (flag_dir / "r.csv").exists()


@pytest.mark.parametrize("argv", [
    ["converge", "--dim", "7"],
    ["converge", "--N", "8,4"],
    ["converge", "--operator", "heat"],
    ["converge", "--rules", "optimal", "--p", "6"],
    ["converge", "--config", "/nonexistent/study.cfg"],
    ["spectrum"],  # needs a single (p, N)
    ["converge", "--outputs", "out.xlsx"],
])
def test_config_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_unknown_key_in_file_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("dimension = 2\n")
    assert run(["converge", "--config", str(cfg)])[0] == 2


def test_numerical_failure_exits_3():
    code, _ = run(["converge", "--dim", "1", "--p", "1", "--N", "4,8", "--rules", "blend:gauss-lobatto:100"])
    assert code == 3


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mixediga", "converge", "--dim", "1", "--p", "1", "--N", "4,8",
                           "--rules", "gauss", "--eigen-indices", "1"], capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.startswith("p,N,rule,dim,operator,j,lambda_h,lambda_exact,rel_error,rate")
    proc = subprocess.run([sys.executable, "-m", "mixediga", "converge", "--dim", "9"], capture_output=True, text=True)
    assert proc.returncode == 2 and "dim" in proc.stderr


def test_tables_subcommand(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path))
    code, text = run(["tables"])
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "table1.csv" in names
    for n in (2, 3, 4, 5):
        assert f"table{n}.csv" in names and f"table{n}.json" in names
        assert f"table{n}_j1.svg" in names
    assert text.count("table 1:") == 8
