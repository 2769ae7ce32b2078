import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from lzkz import cli, sweep
from lzkz.validate import CHECKS

TINY_MAP = ["--axis", "eps_lz0:101:102:1", "--axis", "nu:800:900:1", "--tol", "1e-7"]


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_single_trapezoid(capsys):
    code, out, _ = run_cli(capsys, "single", "--eps0", "40", "--eps-end", "-40", "--ramp-time", "1", "--hold-time", "0.5")
    assert code == 0
    d = json.loads(out)
    for key in ("p_excited", "p_paper_formula", "p_transfer_matrix", "phi", "nu_crossings"):
        assert d[key] is not None
    assert all(math.isfinite(v) for v in d["nu_crossings"])
    assert d["nu_crossings"] == pytest.approx([80.0, 80.0])
    assert d["p_excited_lindblad"] is None


def test_single_matches_library(capsys):
    code, out, _ = run_cli(capsys, "single", "--eps0", "40", "--eps-end", "-40", "--ramp-time", "1", "--hold-time", "0.5")
    from lzkz.model import QubitParams
    from lzkz.pulse import make_double_passage

    row = sweep.single_shot(make_double_passage(40, -40, 1, 0.5), QubitParams(10.3), 1e-8)
    assert json.loads(out)["p_excited"] == row["p_excited_numeric"]


def test_single_without_crossing(capsys):
    code, out, _ = run_cli(capsys, "single", "--breakpoints", "0:50,10:50")
    assert code == 0
    d = json.loads(out)
    assert d["p_excited"] < 1e-20
    assert d["phi"] is None and d["nu_crossings"] == []


def test_single_with_dephasing(capsys):
    code, out, _ = run_cli(
        capsys, "single", "--eps0", "40", "--eps-end", "-40", "--ramp-time", "1", "--hold-time", "0.5", "--gamma-phi", "0.5"
    )
    assert code == 0
    assert 0 <= json.loads(out)["p_excited_lindblad"] <= 1


@pytest.mark.parametrize(
    "argv",
    [
        ["single", "--eps0", "40", "--ramp-time", "1"],
        ["single", "--eps0", "40", "--eps-end", "10", "--ramp-time", "1"],
        ["single", "--breakpoints", "0:1,oops"],
        ["map", "--axis", "nu:1:2"],
        ["map", "--qubit.delta", "abc"],
        ["kz-curve", "--tol", "1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "usage:" in err


def test_unknown_config_keys_listed(capsys, tmp_path):
    cfg = sweep.default_map_config().to_dict()
    cfg["pulse"]["hieght"] = 1
    cfg["extra"] = 2
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, _, err = run_cli(capsys, "map", "--config", str(path), "--out", str(tmp_path))
    assert code == 2
    assert "pulse.hieght" in err and "extra" in err


def test_kind_mismatch_is_config_error(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(sweep.default_kz_config().to_json())
    assert run_cli(capsys, "map", "--config", str(path))[0] == 2


def test_map_one_point_and_render(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "map", *TINY_MAP, "--out", str(tmp_path), "--render")
    assert code == 0
    lines = (tmp_path / "lzs_map.csv").read_text().splitlines()
    assert len(lines) == 2
    svg = (tmp_path / "lzs_map.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


def test_render_range_matches_csv(capsys, tmp_path):
    argv = ["map", "--axis", "eps_lz0:100:104:5", "--axis", "nu:500:900:2:log", "--tol", "1e-7"]
    assert run_cli(capsys, *argv, "--out", str(tmp_path), "--render")[0] == 0
    res = sweep.load(tmp_path / "lzs_map.csv")
    p = res.column("p_excited_numeric")
    svg = (tmp_path / "lzs_map.svg").read_text()
    m = re.search(r"column=([\w.]+) vmin=([-+\w.]+) vmax=([-+\w.]+)", svg)
    assert m.group(1) == "p_excited_numeric"
    assert float(m.group(2)) == pytest.approx(p.min(), rel=1e-11)
    assert float(m.group(3)) == pytest.approx(p.max(), rel=1e-11)


def test_map_rerun_identical_bytes(capsys, tmp_path):
    argv = ["map", "--axis", "eps_lz0:100:104:4", "--axis", "nu:500:900:2", "--tol", "1e-7",
            "--readout.noise_sigma", "0.01", "--seed", "99"]
    run_cli(capsys, *argv, "--out", str(tmp_path / "a"), "--workers", "1")
    run_cli(capsys, *argv, "--out", str(tmp_path / "b"), "--workers", "4")
    assert (tmp_path / "a" / "lzs_map.csv").read_bytes() == (tmp_path / "b" / "lzs_map.csv").read_bytes()


def test_map_json_output(capsys, tmp_path):
    assert run_cli(capsys, "map", *TINY_MAP, "--out", str(tmp_path), "--format", "json")[0] == 0
    d = json.loads((tmp_path / "lzs_map.json").read_text())
    assert d["metadata"]["config"]["kind"] == "lzs_map"
    assert len(d["rows"]) == 1


def test_kz_curve_rows_and_alpha(capsys, tmp_path):
    grid = ["--axis", "x:0.1:1.2:5:log"]
    assert run_cli(capsys, "kz-curve", *grid, "--out", str(tmp_path / "a"), "--render")[0] == 0
    assert run_cli(capsys, "kz-curve", *grid, "--out", str(tmp_path / "b"), "--alpha", "2.5")[0] == 0
    lines = (tmp_path / "a" / "kz_curve.csv").read_text().splitlines()
    data = [ln for ln in lines[1:] if not ln.startswith("#")]
    fits = [ln for ln in lines if ln.startswith("#fit,")]
    assert len(data) == 5 and len(fits) == 1
    a = sweep.load(tmp_path / "a" / "kz_curve.csv")
    b = sweep.load(tmp_path / "b" / "kz_curve.csv")
    assert np.all(np.diff(a.column("rho_numeric")) <= 0)
    assert np.array_equal(a.column("rho_numeric"), b.column("rho_numeric"))
    assert not np.allclose(a.column("rho_theory"), b.column("rho_theory"))
    assert (tmp_path / "a" / "kz_curve.svg").exists()


def test_fit_alpha_command(capsys, tmp_path):
    run_cli(capsys, "kz-curve", "--axis", "x:0.1:1.2:6:log", "--out", str(tmp_path))
    res = sweep.load(tmp_path / "kz_curve.csv")
    code, out, _ = run_cli(capsys, "fit-alpha", str(tmp_path / "kz_curve.csv"))
    assert code == 0
    d = json.loads(out)
    assert d["points"] == 6
    assert d["alpha_hat"] == pytest.approx(res.summary["alpha_hat"], rel=1e-9)


def test_fit_alpha_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "fit-alpha", str(tmp_path / "nope.csv"))
    assert code == 1
    assert "nope.csv" in err


def test_validate(capsys):
    code, out, _ = run_cli(capsys, "validate")
    assert code == 0
    names = [ln.split()[0] for ln in out.splitlines() if ln.strip()]
    assert sorted(names) == sorted(CHECKS)
    assert all("PASS" in ln for ln in out.splitlines())


def test_validate_negative_control(capsys):
    code, out, _ = run_cli(capsys, "validate", "--tol", "1")
    assert code == 1
    line = next(ln for ln in out.splitlines() if ln.startswith("lz_formula_match"))
    assert "FAIL" in line
    assert len(out.splitlines()) == len(CHECKS)


def test_entry_point_module():
    proc = subprocess.run([sys.executable, "-m", "lzkz.cli", "validate"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
