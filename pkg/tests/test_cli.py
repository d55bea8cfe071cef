import copy
import json

import numpy as np
import pytest
import yaml

from dqc_sim.cli import main
from dqc_sim.config import bundled_config


def small_config(tmp_path, name="dimer", n=12, **changes):
    data = yaml.safe_load(bundled_config(name).read_text())
    data["job"]["omega2_cm1"]["count"] = n
    data["job"]["omega3_cm1"]["count"] = n
    for section, values in changes.items():
        data[section].update(values)
    path = tmp_path / f"{name}.cfg"
    path.write_text(yaml.safe_dump(data, sort_keys=False))
    return path


def test_spectrum_writes_outputs(tmp_path, capsys):
    cfg = small_config(tmp_path)
    out = tmp_path / "out"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out), "--render"]) == 0
    for name in ("spectrum_real.csv", "spectrum_imag.csv", "spectrum_magnitude.csv", "metadata.json",
                 "diagnostics.json", "spectrum.png"):
        assert (out / name).exists()
    mag = np.loadtxt(out / "spectrum_magnitude.csv", delimiter=",")
    assert mag.shape == (12, 12) and mag.max() == 1.0
    assert "N_e=2 N_f=3" in capsys.readouterr().out


def test_no_normalize(tmp_path):
    cfg = small_config(tmp_path)
    out = tmp_path / "raw"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out), "--no-normalize"]) == 0
    meta = json.loads((out / "metadata.json").read_text())["metadata"]
    mag = np.loadtxt(out / "spectrum_magnitude.csv", delimiter=",")
    assert not meta["normalized"] and mag.max() == meta["raw_peak_magnitude"]


def test_validation_error_exit_code(tmp_path, capsys):
    data = yaml.safe_load(bundled_config("trimer").read_text())
    data["source"]["pump_width_fs"] = -1.0
    path = tmp_path / "bad.cfg"
    path.write_text(yaml.safe_dump(data))
    assert main(["spectrum", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "source.pump_width_fs" in capsys.readouterr().err


def test_missing_config_exit_code(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "none.cfg")]) == 2


def test_bad_threads_exit_code(tmp_path):
    assert main(["spectrum", "--config", str(small_config(tmp_path)), "--threads", "0"]) == 2


def test_runtime_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    cfg = small_config(tmp_path)
    assert main(["spectrum", "--config", str(cfg), "--out", str(blocker / "sub")]) == 1
    assert "runtime error" in capsys.readouterr().err


def test_unresolvable_state_reference_is_validation_error(tmp_path):
    cfg = small_config(tmp_path, "trimer", source={"center1_cm1": "e9"})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_validate_prints_canonical(tmp_path, capsys):
    assert main(["validate", "--config", str(bundled_config("dimer"))]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# config OK: 2 sites, sha256=")
    body = yaml.safe_load(out.split("\n", 1)[1])
    assert body["aggregate"]["site_energies_cm1"] == [15000.0, 15300.0]


def test_diagonalize(tmp_path, capsys):
    assert main(["diagonalize", "--config", str(bundled_config("lhcii_template")), "--out", str(tmp_path)]) == 0
    assert "N_s=14 N_e=14 N_f=105 (overtone 14, combination 91)" in capsys.readouterr().out
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert len(diag["top_dip_ge"]) == 10


def test_overtone_variant_flag(tmp_path, capsys):
    assert main(["validate", "--config", str(bundled_config("dimer")), "--overtone-variant", "weak"]) == 0
    assert "-15.0" in capsys.readouterr().out
    assert main(["validate", "--config", str(bundled_config("dimer")), "--overtone-variant", "nope"]) == 2


def test_jsa_command(tmp_path, capsys):
    assert main(["jsa", "--config", str(bundled_config("trimer")), "--out", str(tmp_path)]) == 0
    sv = np.loadtxt(tmp_path / "jsa_singular_values.csv")
    assert sv.shape == (20,) and np.all(np.diff(sv) <= 0)
    jsi = np.loadtxt(tmp_path / "jsi.csv", delimiter=",")
    assert jsi.shape == (128, 128) and np.all(jsi >= 0)
    assert "Schmidt number" in capsys.readouterr().out
    assert main(["jsa", "--config", str(bundled_config("dimer")), "--out", str(tmp_path)]) == 2


def test_thread_count_does_not_change_bytes(tmp_path):
    cfg = small_config(tmp_path, "trimer", n=40)
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"t{threads}"
        assert main(["spectrum", "--config", str(cfg), "--out", str(out), "--threads", str(threads)]) == 0
        outs.append(out)
    for name in ("spectrum_real.csv", "spectrum_imag.csv", "spectrum_magnitude.csv", "metadata.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
