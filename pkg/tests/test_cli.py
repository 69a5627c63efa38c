import json
import os

import numpy as np
import pytest

import scenbox as sb
from scenbox.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    main,
    read_dataset_csv,
    write_dataset_csv,
)


def run_cli(*argv):
    return main(list(argv))


def test_generate_shapes_and_determinism(tmp_path):
    out = tmp_path / "d.csv"
    assert run_cli("generate", "--dgp", "dgp3", "--n", "400", "--sampler", "lhs",
                   "--seed", "1", "--out", str(out)) == EXIT_OK
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 401
    assert lines[0] == "x1,x2,x3,x4,x5,y"
    assert all(len(ln.split(",")) == 6 for ln in lines)
    first = out.read_bytes()
    run_cli("generate", "--dgp", "dgp3", "--n", "400", "--sampler", "lhs",
            "--seed", "1", "--out", str(out))
    assert out.read_bytes() == first


def test_generate_dsgc_within_ranges(tmp_path):
    out = tmp_path / "g.csv"
    assert run_cli("generate", "--dgp", "dsgc", "--n", "200", "--sampler", "halton",
                   "--out", str(out)) == EXIT_OK
    data = read_dataset_csv(out, sb.get_dgp("dsgc").input_box)
    x = data.x.points
    lo = np.array([0.05] * 4 + [0.5] * 4 + [1.0] * 4)
    hi = np.array([1.0] * 4 + [5.0] * 4 + [4.0] * 4)
    assert np.all(x >= lo) and np.all(x <= hi)


def test_dataset_csv_roundtrip_is_lossless(tmp_path):
    pm = sb.uniform_sample(50, sb.HyperBox.unit(3), seed=9)
    y = (np.random.default_rng(0).random(50) < 0.5).astype(float)
    data = sb.Dataset(pm, y)
    path = tmp_path / "rt.csv"
    write_dataset_csv(path, data)
    back = read_dataset_csv(path, sb.HyperBox.unit(3))
    assert np.array_equal(back.x.points, pm.points)
    assert np.array_equal(back.y, y)


def test_env_seed_overrides(tmp_path, monkeypatch):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    run_cli("generate", "--dgp", "dgp3", "--n", "50", "--seed", "1", "--out", str(out_a))
    monkeypatch.setenv("SDRE_SEED", "2")
    run_cli("generate", "--dgp", "dgp3", "--n", "50", "--seed", "1", "--out", str(out_b))
    assert out_a.read_bytes() != out_b.read_bytes()


def test_discover_outputs(tmp_path):
    data_path = tmp_path / "d.csv"
    run_cli("generate", "--dgp", "dgp3", "--n", "400", "--seed", "3", "--out", str(data_path))
    out_dir = tmp_path / "run"
    assert run_cli("discover", "--data", str(data_path), "--method", "O",
                   "--dgp", "dgp3", "--out-dir", str(out_dir)) == EXIT_OK
    traj = (out_dir / "trajectory.csv").read_text().strip().split("\n")
    assert traj[0] == "box_index,coverage,density,n_train,n_val"
    assert traj[1].split(",")[1] == "1.0"
    assert (out_dir / "boxes.txt").exists()
    svg = (out_dir / "trajectory.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert set(manifest["files"]) == {"boxes.txt", "trajectory.csv", "trajectory.svg"}


def test_discover_unknown_method_lists_valid(tmp_path, capsys):
    data_path = tmp_path / "d.csv"
    run_cli("generate", "--dgp", "dgp3", "--n", "100", "--seed", "3", "--out", str(data_path))
    code = run_cli("discover", "--data", str(data_path), "--method", "X",
                   "--out-dir", str(tmp_path / "x"))
    assert code == EXIT_CONFIG
    err = capsys.readouterr().err
    for m in ("B", "B.all", "O", "O.p", "RF.l", "RF.p"):
        assert m in err


def test_discover_rf_with_small_k_on_dsgc(tmp_path):
    data_path = tmp_path / "dsgc.csv"
    run_cli("generate", "--dgp", "dsgc", "--n", "400", "--sampler", "halton",
            "--out", str(data_path))
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"K": 200, "n_trees": 100}))
    out_dir = tmp_path / "rf"
    assert run_cli("discover", "--data", str(data_path), "--method", "RF.p",
                   "--dgp", "dsgc", "--config", str(cfg_path),
                   "--out-dir", str(out_dir)) == EXIT_OK
    assert (out_dir / "boxes.txt").exists()


def test_malformed_csv_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2,y\n0.1,0.2,1\n0.3,oops,0\n")
    code = run_cli("discover", "--data", str(bad), "--method", "O",
                   "--out-dir", str(tmp_path / "o"))
    assert code == EXIT_DATA
    assert "line 3" in capsys.readouterr().err


def test_unknown_config_field_named(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dgps": ["dgp3"], "alpa": 0.05}))
    code = run_cli("benchmark", "--config", str(cfg), "--out-dir", str(tmp_path / "b"))
    assert code == EXIT_CONFIG
    assert "alpa" in capsys.readouterr().err


def test_benchmark_files_defaults_and_rerun(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "dgps": ["dgp3"], "methods": ["O"], "sizes": [200], "reps": 2,
        "test_size": 1500,
    }))
    out_dir = tmp_path / "bench"
    assert run_cli("benchmark", "--config", str(cfg), "--out-dir", str(out_dir),
                   "--jobs", "1") == EXIT_OK
    for name in ("auc.csv", "density.csv", "interp.csv", "consistency.csv", "errors.csv"):
        assert (out_dir / name).exists()
    auc_lines = (out_dir / "auc.csv").read_text().strip().split("\n")
    assert len(auc_lines) == 5  # header + dgp row + avg + #1 + #2
    manifest = json.loads((out_dir / "manifest.json").read_text())
    echoed = manifest["config"]
    assert echoed["alpha"] == 0.05 and echoed["minpts"] == 20
    assert echoed["T"] == 50 and echoed["K"] == 100_000

    # rerunning straight from the manifest reproduces the metric files
    first = {p.name: p.read_bytes() for p in out_dir.iterdir() if p.suffix == ".csv"}
    out_dir2 = tmp_path / "bench2"
    assert run_cli("benchmark", "--config", str(out_dir / "manifest.json"),
                   "--out-dir", str(out_dir2), "--jobs", "1") == EXIT_OK
    for name, blob in first.items():
        if name != "errors.csv":
            assert (out_dir2 / name).read_bytes() == blob


def test_mse_command_smoke(tmp_path):
    out_dir = tmp_path / "mse"
    assert run_cli("mse", "--dgp", "dgp3", "--box", "3:0.95:1", "--n", "150",
                   "--k", "1000", "--reps-outer", "4", "--reps-inner", "3",
                   "--out-dir", str(out_dir)) == EXIT_OK
    text = (out_dir / "mse.csv").read_text().strip().split("\n")
    assert text[0] == "mu_gt,mse_o,mse_am,mse_am_literal,n,k"
    assert len(text) == 2


def test_mse_bad_box_spec(tmp_path, capsys):
    code = run_cli("mse", "--dgp", "dgp3", "--box", "nonsense",
                   "--out-dir", str(tmp_path / "m"))
    assert code == EXIT_CONFIG
    assert "dim:lower:upper" in capsys.readouterr().err
