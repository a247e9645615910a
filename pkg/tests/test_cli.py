import csv
import json
import math
import subprocess
import sys

import pytest

from conftest import PUBLISHED_ROOTS
from deltabound.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_TOLERANCE, format_float, load_config, main

LINEAR = """
mode = "dimensionless"
kind = "linear"

[model]
u0 = 1.0
gamma = 10.0
a = 0.0
"""

PHYSICAL = """
mode = "physical"
kind = "linear"

[physical]
m = {m}
hbar = {hbar}
B = {B}
U0 = {U0}
UL = {UL}
A = 0.0
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_solve_dimensionless(tmp_path, capsys):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = read_csv(tmp_path / "o" / "spectrum.csv")
    assert rows[0] == ["j", "delta", "epsilon", "alpha", "residual"]
    deltas = [float(r[1]) for r in rows[1:]]
    assert len(deltas) == 7
    assert max(abs(d - p) for d, p in zip(deltas, PUBLISHED_ROOTS)) < 1e-6
    meta = json.loads((tmp_path / "o" / "spectrum.json").read_text())
    assert meta["physical"] is None
    assert meta["dimensionless"]["u0"] == 1.0 and meta["dimensionless"]["gamma"] == 10.0
    assert "7 bound state(s)" in capsys.readouterr().out


def test_solve_physical_unit_scale(tmp_path):
    phys = write(tmp_path, "p.toml", PHYSICAL.format(m=1.0, hbar=1.0, B=0.5, U0=1.0, UL=5.0))
    dim = write(tmp_path, "d.toml", LINEAR)
    assert main(["solve", "--config", phys, "--out", str(tmp_path / "p")]) == EXIT_OK
    assert main(["solve", "--config", dim, "--out", str(tmp_path / "d")]) == EXIT_OK
    prow, drow = read_csv(tmp_path / "p" / "spectrum.csv"), read_csv(tmp_path / "d" / "spectrum.csv")
    assert prow[0][-1] == "E_physical"
    assert [r[:5] for r in prow] == drow
    for r in prow[1:]:
        assert float(r[5]) == float(r[2])  # L = 1: E = eps
    pm = json.loads((tmp_path / "p" / "spectrum.json").read_text())
    dm = json.loads((tmp_path / "d" / "spectrum.json").read_text())
    assert pm["dimensionless"] == dm["dimensionless"]
    assert pm["physical"]["L"] == 1.0


def test_two_physical_configs_identical_dimensionless_sections(tmp_path):
    a = write(tmp_path, "a.toml", PHYSICAL.format(m=1.0, hbar=1.0, B=0.5, U0=1.0, UL=5.0))
    b = write(tmp_path, "b.toml", PHYSICAL.format(m=4.0, hbar=2.0, B=0.0625, U0=0.5, UL=1.25))
    assert main(["solve", "--config", a, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["solve", "--config", b, "--out", str(tmp_path / "b")]) == EXIT_OK
    ja = json.loads((tmp_path / "a" / "spectrum.json").read_text())
    jb = json.loads((tmp_path / "b" / "spectrum.json").read_text())
    dump = lambda d: json.dumps(d, sort_keys=True, indent=2).encode()
    assert dump(ja["dimensionless"]) == dump(jb["dimensionless"])
    assert ja["physical"]["L"] == 1.0 and jb["physical"]["L"] == 2.0
    ca, cb = read_csv(tmp_path / "a" / "spectrum.csv"), read_csv(tmp_path / "b" / "spectrum.csv")
    assert [r[:5] for r in ca] == [r[:5] for r in cb]
    # E = hbar^2 eps / (m L^2) = eps / 4 for the second set
    for ra, rb in zip(ca[1:], cb[1:]):
        assert float(rb[5]) == pytest.approx(float(ra[5]) / 4, rel=1e-14)


def test_deterministic_outputs(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    for cmd in ("solve", "figure", "compare", "reduce"):
        outs = []
        for k in range(2):
            d = tmp_path / f"{cmd}{k}"
            main([cmd, "--config", cfg, "--out", str(d), "--param", "output.samples=200"])
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        assert outs[0] == outs[1] and outs[0]


def test_flags_override_file(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o"), "--param", "model.gamma=5"]) == EXIT_OK
    meta = json.loads((tmp_path / "o" / "spectrum.json").read_text())
    assert meta["dimensionless"]["gamma"] == 5.0
    c = load_config(cfg, ["output.dir='x'"], out="y")
    assert c.output["dir"] == "y"


def test_config_hash_ignores_output_dir(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    assert load_config(cfg, out="a").sha256 == load_config(cfg, out="b").sha256
    assert load_config(cfg).sha256 != load_config(cfg, ["model.u0=2"]).sha256


def test_figure_default_cases(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    assert main(["figure", "--config", cfg, "--out", str(tmp_path / "f"), "--param", "output.samples=300"]) == 0
    counts = {}
    for label in "abcdef":
        rows = read_csv(tmp_path / "f" / f"figure_{label}.csv")
        assert rows[0] == ["delta", "lhs", "rhs", "is_pole_gap"] and len(rows) == 301
        meta = json.loads((tmp_path / "f" / f"figure_{label}.json").read_text())
        counts[meta["u0"], meta["gamma"]] = len(meta["intersections"])
    for g in (5.0, 10.0):
        assert counts[-1.0, g] >= counts[0.0, g] >= counts[1.0, g]
    for u in (-1.0, 0.0, 1.0):
        assert counts[u, 10.0] >= counts[u, 5.0]
    assert counts[0.0, 5.0] >= 1 and counts[0.0, 10.0] >= 1


def test_figure_two_samples_and_custom_case(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR + "\n[figure]\ncases = [[1.0, 10.0]]\n")
    assert main(["figure", "--config", cfg, "--out", str(tmp_path / "f"), "--param", "output.samples=2"]) == 0
    rows = read_csv(tmp_path / "f" / "figure_case_1.csv")
    assert len(rows) == 3
    meta = json.loads((tmp_path / "f" / "figure_case_1.json").read_text())
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    roots = json.loads((tmp_path / "s" / "spectrum.json").read_text())["dimensionless"]["roots"]
    assert [m["delta"] for m in meta["intersections"]] == roots


@pytest.mark.parametrize("extra", [
    [],
    ["--param", 'kind="parabolic"'],
    ["--param", 'kind="exponential"', "--param", "model.b=1"],
])
def test_compare_passes(tmp_path, extra):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "c")] + extra) == EXIT_OK
    meta = json.loads((tmp_path / "c" / "compare.json").read_text())
    assert meta["passed"] and meta["max_abs_diff"] < 1e-4
    rows = read_csv(tmp_path / "c" / "compare.csv")
    assert all(r[-1] == "pass" for r in rows[1:])


def test_compare_tolerance_failure(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    code = main(["compare", "--config", cfg, "--out", str(tmp_path / "c"),
                 "--param", "oracle.tolerance=1e-9", "--param", "oracle.h=0.01"])
    assert code == EXIT_TOLERANCE


def test_reduce_physical(tmp_path, capsys):
    cfg = write(tmp_path, "p.toml", PHYSICAL.format(m=1.0, hbar=1.0, B=0.0625, U0=0.5, UL=1.25))
    assert main(["reduce", "--config", cfg, "--out", str(tmp_path / "r")]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["dimensionless"] == {"kind": "linear", "u0": 1.0, "gamma": 10.0, "a": 0.0, "b": None}
    assert report["physical"]["L"] == 2.0
    assert (tmp_path / "r" / "reduce.json").exists()


@pytest.mark.parametrize("text, params", [
    (LINEAR + "gama = 3\n", []),
    (LINEAR.replace("u0 = 1.0", "u0 = \"one\""), []),
    ("mode = \"dimensionless\"\n[model]\nu0 = 1.0\n", []),
    (LINEAR, ["model.u0"]),
    (LINEAR, ['kind="cubic"']),
    (LINEAR, ['solver.method="bessel-closed-form"']),
    (LINEAR, ["solver.delta_max=-20"]),
    (LINEAR, ["oracle.h=0"]),
    ("mode = \"physical\"\n[physical]\nm = 1.0\n", []),
    (PHYSICAL.format(m=-1.0, hbar=1.0, B=0.5, U0=1.0, UL=5.0), []),
    ("mode = [1,\n", []),
])
def test_config_errors(tmp_path, capsys, text, params):
    cfg = write(tmp_path, "bad.toml", text)
    args = ["solve", "--config", cfg, "--out", str(tmp_path / "o")]
    for p in params:
        args += ["--param", p]
    assert main(args) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_toml_error_reports_position(tmp_path, capsys):
    cfg = write(tmp_path, "bad.toml", 'mode = "dimensionless"\nkind = linear\n')
    assert main(["solve", "--config", cfg]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.toml")]) == EXIT_CONFIG


def test_solver_error_exit_code(tmp_path, capsys):
    # closed-form Bessel evaluator with an order beyond its supported range
    args = ["solve", "--out", str(tmp_path / "o"), "--param", 'kind="exponential"', "--param", "model.u0=-11",
            "--param", "model.gamma=10", "--param", "model.b=1",
            "--param", 'solver.method="bessel-closed-form"']
    assert main(args) == EXIT_SOLVER
    assert "solver error" in capsys.readouterr().err


def test_format_float():
    assert format_float(0.0) == "0"
    assert format_float(-2.136182405997903) == "-2.1361824059979"
    assert format_float(1e-4) == "1.00000000000000e-04"
    assert format_float(2.5e6) == "2.50000000000000e+06"
    assert format_float(123456.789) == "123456.789"
    assert format_float(math.inf) == "inf"


def test_console_entry_point(tmp_path):
    cfg = write(tmp_path, "lin.toml", LINEAR)
    proc = subprocess.run([sys.executable, "-m", "deltabound", "reduce", "--config", cfg,
                           "--out", str(tmp_path / "r")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dimensionless"]["gamma"] == 10.0
