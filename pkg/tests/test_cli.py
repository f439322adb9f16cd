import csv
import os

import numpy as np
import pytest

from rcdtscreen.cli import main
from rcdtscreen.image import GrayImage, load_image, save_image

from conftest import gaussian_blob


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["phantom"])  # missing required --out
    assert exc.value.code == 1


def test_unknown_command_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_data_error_exits_2(tmp_path, capsys):
    code, _, err = run_cli(["preprocess", "--in", str(tmp_path / "nope"),
                            "--out", str(tmp_path / "out")], capsys)
    assert code == 2
    assert "preprocess" in err


def test_phantom_preprocess_simulate_chain(tmp_path, capsys):
    raw = tmp_path / "raw"
    code, out, _ = run_cli(["phantom", "--seed", "2", "--controls", "2",
                            "--cancers", "1", "--size", "64",
                            "--out", str(raw)], capsys)
    assert code == 0 and "3 cases" in out
    assert (raw / "manifest.csv").is_file()
    assert (raw / "case_0000_left_cc.png").is_file()

    pre = tmp_path / "pre"
    code, _, _ = run_cli(["preprocess", "--in", str(raw), "--out", str(pre),
                          "--width", "40", "--height", "64"], capsys)
    assert code == 0
    img = load_image(pre / "case_0001_right_mlo.png")
    assert (img.width, img.height) == (40, 64)

    sims = tmp_path / "sims"
    code, out, _ = run_cli(["simulate", "--in", str(pre), "--out", str(sims),
                            "--sigma", "1.0"], capsys)
    assert code == 0 and "6 simulated" in out
    assert (sims / "case_0002_cc_sim.png").is_file()


def test_rcdt_and_fuse_commands(tmp_path, capsys):
    a = GrayImage(gaussian_blob(48, 22, 24))
    b = GrayImage(gaussian_blob(48, 26, 24))
    pa, pb = tmp_path / "a.png", tmp_path / "b.png"
    save_image(a, pa)
    save_image(b, pb)

    out = tmp_path / "rc"
    code, _, _ = run_cli(["rcdt", "--template", str(pa), "--target", str(pb),
                          "--n-theta", "30", "--out", str(out),
                          "--dump-sinograms"], capsys)
    assert code == 0
    assert (out / "rcdt_vis.png").is_file()
    assert (out / "template_sino.png").is_file()
    assert (out / "rcdt_sino.png.txt").is_file()

    fused = tmp_path / "fused.png"
    code, _, _ = run_cli(["fuse", "--a", str(pa), "--b", str(pb),
                          "--out", str(fused)], capsys)
    assert code == 0
    assert load_image(fused).data.shape == (48, 48)


def write_feature_csv(path, rng, n_cases=8, windows=3):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "label", "f0", "f1"])
        for i in range(n_cases):
            label = "cancer" if i % 2 else "control"
            shift = 1.5 if i % 2 else 0.0
            for _ in range(windows):
                writer.writerow([f"case_{i:04d}", label,
                                 rng.normal(shift), rng.normal(shift)])


def test_train_score_evaluate_compare_chain(tmp_path, capsys):
    rng = np.random.default_rng(0)
    feats = tmp_path / "features.csv"
    write_feature_csv(feats, rng)

    model = tmp_path / "model.txt"
    code, out, _ = run_cli(["train", "--features", str(feats),
                            "--model", str(model), "--epochs", "200"], capsys)
    assert code == 0 and model.is_file()

    scores = tmp_path / "case_scores.csv"
    code, _, _ = run_cli(["score", "--features", str(feats),
                          "--model", str(model), "--out", str(scores)], capsys)
    assert code == 0
    with open(scores) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert all(0.0 <= float(r["score"]) <= 1.0 for r in rows)

    # build a three-arm score table from the single-arm scores
    table = tmp_path / "scores.csv"
    with open(table, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "label", "score_real", "score_sim",
                         "score_fused"])
        for r in rows:
            label = "positive" if r["label"] == "cancer" else "negative"
            writer.writerow([r["case_id"], label, r["score"], r["score"],
                             r["score"]])

    ev = tmp_path / "eval"
    code, out, _ = run_cli(["evaluate", "--scores", str(table),
                            "--out", str(ev)], capsys)
    assert code == 0 and "auc" in out
    assert (ev / "roc_curves.png").is_file()
    assert (ev / "report.txt").is_file()

    cmp_out = tmp_path / "compare.txt"
    code, out, _ = run_cli(["compare", "--scores", str(table),
                            "--out", str(cmp_out)], capsys)
    assert code == 0
    # identical arms: zero difference, p = 1
    assert "auc_diff = 0.0000" in out and "p = 1" in out
    assert cmp_out.read_text() == out


def test_run_command_tiny(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code, out, _ = run_cli([
        "run", "--seed", "3", "--out", str(out_dir), "--jobs", "1",
        "--set", "n_controls=4", "--set", "n_cancers=3",
        "--set", "phantom_size=64", "--set", "work_w=40",
        "--set", "work_h=64", "--set", "n_theta=24",
        "--set", "class_w=20", "--set", "class_h=32",
        "--set", "window=16", "--set", "stride_x=4", "--set", "stride_y=8",
        "--set", "clahe_tiles_x=4", "--set", "clahe_tiles_y=4",
        "--set", "epochs=50", "--set", "folds=2",
    ], capsys)
    assert code == 0
    assert "fused: auc" in out and "fused_vs_real" in out
    assert (out_dir / "scores.csv").is_file()
    assert (out_dir / "MANIFEST").read_text().startswith("status = complete")


def test_run_bad_set_exits_2(tmp_path, capsys):
    code, _, err = run_cli(["run", "--set", "bogus", "--out",
                            str(tmp_path / "x")], capsys)
    assert code == 2
    assert "KEY=VALUE" in err
