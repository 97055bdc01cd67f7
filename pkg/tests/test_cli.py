import json
import math
from pathlib import Path

import pytest

from smallscatter.cli import main, read_table

TOY = """\
v = 34400
f = 1000
n_target = -1+0.001i
b = 4
p_side = 2
c_side = 4
formulations = ORI, RED, IE
"""


def write_cfg(tmp_path, text=TOY, name="toy.cfg", **extra):
    body = text + "".join(f"{k} = {v}\n" for k, v in extra.items())
    p = tmp_path / name
    p.write_text(body)
    return p


def test_run_artifacts(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["run", str(cfg), "-o", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    for form in ("ORI", "RED", "IE"):
        assert {f"{form}_report.json", f"{form}_grid.csv", f"{form}_slice.csv", f"{form}_solution.npy"} <= names
    assert {"diff_ORI-RED.csv", "diff_RED-IE.csv", "diff_ORI-IE.csv", "MANIFEST.txt", "config.txt"} <= names
    h = json.loads((out / "ORI_report.json").read_text())["config_hash"]
    for p in out.glob("*.csv"):
        assert p.read_text().startswith(f"# config_hash={h}")
    pts, vals = read_table(out / "RED_grid.csv")
    assert pts.shape == (125, 3) and vals.shape == (125,)
    assert "FAILED" not in (out / "MANIFEST.txt").read_text()


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(cfg), "-o", str(a)]) == 0
    assert main(["run", str(cfg), "-o", str(b)]) == 0
    for p in a.iterdir():
        if p.name == "MANIFEST.txt":
            continue  # carries wall time
        assert p.read_bytes() == (b / p.name).read_bytes(), p.name


def test_empty_formulations(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TOY.replace("formulations = ORI, RED, IE", "formulations = "))
    assert main(["run", str(cfg), "-o", str(tmp_path / "o")]) == 2
    assert "formulations" in capsys.readouterr().err


def test_inconsistent_k(tmp_path, capsys):
    cfg = write_cfg(tmp_path, k=0.2)
    assert main(["run", str(cfg), "-o", str(tmp_path / "o")]) == 2
    assert "k:" in capsys.readouterr().err


def test_non_cube_M(tmp_path, capsys):
    cfg = write_cfg(tmp_path, TOY.replace("b = 4", "M = 999999"))
    assert main(["run", str(cfg), "-o", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "970299" in err and "1000000" in err


def test_unknown_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, colour="blue")
    assert main(["run", str(cfg)]) == 2
    assert "colour" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 4


def test_unwritable_output(tmp_path):
    cfg = write_cfg(tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(cfg), "-o", str(blocker / "sub")]) == 4


def test_non_convergence(tmp_path):
    cfg = write_cfg(
        tmp_path, TOY.replace("n_target = -1+0.001i", "h = -3000-100i\nforce = yes"),
        tol="1e-14", max_iter=1, formulations="ORI",
    )
    out = tmp_path / "o"
    assert main(["run", str(cfg), "-o", str(out)]) == 3
    assert "FAILED" in (out / "MANIFEST.txt").read_text()


def test_design_reference(tmp_path, capsys):
    cfg = write_cfg(tmp_path, output_dir=tmp_path / "d")
    assert main(["design", str(cfg), "--n=-1+0.001i"]) == 0
    out = capsys.readouterr().out
    assert "h=2.65481E-09+i5.30961E-06" in out
    assert (tmp_path / "d" / "design.txt").exists()


def test_design_background_gives_zero(tmp_path, capsys):
    cfg = write_cfg(tmp_path, output_dir=tmp_path / "d")
    assert main(["design", str(cfg), "--n", "1"]) == 0
    assert "h=0.00000E+00+i0.00000E+00" in capsys.readouterr().out


def test_design_k_only(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "k = 1\nb = 2\n", output_dir=tmp_path / "d")
    assert main(["design", str(cfg), "--n", "2"]) == 0
    out = capsys.readouterr().out
    line = next(s for s in out.splitlines() if s.startswith("h_exact="))
    assert float(line.split("=")[1].split("+")[0]) == pytest.approx(-3 / (4 * math.pi), rel=1e-14)


def test_compare_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "o"
    assert main(["run", str(cfg), "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["compare", str(out / "RED_grid.csv"), str(out / "RED_grid.csv"), "--partition", "5"]) == 0
    assert "metric=0.0000" in capsys.readouterr().out
    assert main(["compare", str(out / "ORI_grid.csv"), str(out / "IE_grid.csv"), "--partition", "5"]) == 0
    assert main(["compare", str(out / "ORI_grid.csv"), str(tmp_path / "missing.csv"), "--partition", "5"]) == 4


def test_module_entry(tmp_path):
    import subprocess
    import sys

    cfg = write_cfg(tmp_path, output_dir=tmp_path / "d")
    r = subprocess.run([sys.executable, "-m", "smallscatter", "design", str(cfg), "--n=-1+0.001i"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "h=" in r.stdout
