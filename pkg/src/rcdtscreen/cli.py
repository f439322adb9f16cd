"""Command-line driver. Exit codes: 0 success, 1 usage error, 2 data
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import classify, evaluate
from .config import load_config
from .errors import InvalidParams, PipelineError, UnreadableFile
from .fusion import fuse_green_magenta
from .image import load_image, save_image
from .phantom import PhantomParams, VIEWS, generate_cohort, load_cohort, save_cohort
from .preprocess import crop_resize_to, segment_breast, standardize_orientation
from .rcdt import dump_sinogram, forward_rcdt_from_sinos, visualize_rcdt
from .radon import radon
from .simulate import SimulatorSpec, simulate_contralateral


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rcdtscreen",
                     description="Bilateral transform-space asymmetry screening")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", parents=[], help="generate a synthetic cohort")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--controls", type=int, default=10)
    p.add_argument("--cancers", type=int, default=5)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--lesion-contrast", type=float, default=0.14)
    p.add_argument("--out", required=True)

    p = sub.add_parser("preprocess", help="segment, crop, resize, orient a cohort")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=120)
    p.add_argument("--height", type=int, default=192)

    p = sub.add_parser("simulate", help="simulate contralateral images for a cohort")
    p.add_argument("--in", dest="in_dir", required=True,
                   help="preprocessed cohort directory (with manifest.csv)")
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=["mirror", "external"], default="mirror")
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--external-dir", default=None)

    p = sub.add_parser("rcdt", help="transform one template/target image pair")
    p.add_argument("--template", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-theta", type=int, default=180)
    p.add_argument("--dump-sinograms", action="store_true")

    p = sub.add_parser("fuse", help="green-magenta fuse two grayscale images")
    p.add_argument("--a", required=True, help="first input (green channel)")
    p.add_argument("--b", required=True, help="second input (magenta channels)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train the logistic baseline on a feature CSV")
    p.add_argument("--features", required=True,
                   help="CSV: case_id,label,f0,... one row per window")
    p.add_argument("--model", required=True)
    p.add_argument("--lr", type=float, default=0.3)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--l2", type=float, default=1e-3)

    p = sub.add_parser("score", help="median-window case scores from a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="ROC report + figure from a score table")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("compare", help="paired AUC comparisons from a score table")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", default=None, help="optional output file (default stdout)")

    p = sub.add_parser("run", help="full seeded three-arm experiment")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key")
    return parser


def _read_feature_csv(path):
    if not os.path.isfile(path):
        raise UnreadableFile(f"no such file: {path}")
    ids, labels, rows = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["case_id", "label"]:
            raise InvalidParams("feature CSV must start with case_id,label columns")
        names = tuple(header[2:])
        for row in reader:
            ids.append(row[0])
            labels.append(row[1])
            rows.append([float(v) for v in row[2:]])
    if not rows:
        raise InvalidParams("feature CSV has no rows")
    return ids, labels, np.array(rows), names


def _cmd_phantom(args):
    params = PhantomParams(size=args.size, lesion_contrast=args.lesion_contrast)
    cases = generate_cohort(args.seed, args.controls, args.cancers, params)
    save_cohort(cases, args.out)
    print(f"wrote {len(cases)} cases to {args.out}")


def _cmd_preprocess(args):
    cases = load_cohort(args.in_dir)
    os.makedirs(args.out, exist_ok=True)
    import shutil
    shutil.copy(os.path.join(args.in_dir, "manifest.csv"),
                os.path.join(args.out, "manifest.csv"))
    for case in cases:
        for key, img in case.images.items():
            side = key.split("_")[0]
            pre = crop_resize_to(img, segment_breast(img), args.width, args.height)
            pre = standardize_orientation(pre, side)
            save_image(pre, os.path.join(args.out, f"{case.case_id}_{key}.png"))
    print(f"preprocessed {len(cases)} cases into {args.out}")


def _cmd_simulate(args):
    spec = SimulatorSpec(kind=args.kind, smoothing_sigma=args.sigma,
                         external_dir=args.external_dir)
    os.makedirs(args.out, exist_ok=True)
    n = 0
    with open(os.path.join(args.in_dir, "manifest.csv"), newline="") as fh:
        for row in csv.DictReader(fh):
            input_side = ("left" if row["label"] == "control"
                          else {"left": "right", "right": "left"}[row["cancer_side"]])
            for view in VIEWS:
                img = load_image(os.path.join(
                    args.in_dir, f"{row['case_id']}_{input_side}_{view}.png"))
                sim = simulate_contralateral(img, spec, row["case_id"], view)
                save_image(sim, os.path.join(
                    args.out, f"{row['case_id']}_{view}_sim.png"))
                n += 1
    print(f"wrote {n} simulated images to {args.out}")


def _cmd_rcdt(args):
    template = load_image(args.template)
    target = load_image(args.target)
    os.makedirs(args.out, exist_ok=True)
    sino_tpl = radon(template, args.n_theta)
    sino_tgt = radon(target, args.n_theta)
    rc = forward_rcdt_from_sinos(sino_tpl, sino_tgt)
    vis = visualize_rcdt(rc, template.width, template.height)
    save_image(vis, os.path.join(args.out, "rcdt_vis.png"))
    if args.dump_sinograms:
        dump_sinogram(sino_tpl.values, sino_tpl.t_grid, sino_tpl.theta_grid,
                      os.path.join(args.out, "template_sino.png"))
        dump_sinogram(rc.values, rc.t_grid, rc.theta_grid,
                      os.path.join(args.out, "rcdt_sino.png"))
    print(f"wrote transform outputs to {args.out}")


def _cmd_fuse(args):
    fused = fuse_green_magenta(load_image(args.a), load_image(args.b))
    save_image(fused, args.out, bit_depth=8)
    print(f"wrote {args.out}")


def _cmd_train(args):
    _, labels, x, names = _read_feature_csv(args.features)
    y = [1 if lbl in ("1", "positive", "cancer") else 0 for lbl in labels]
    model = classify.train_logistic(x, y, lr=args.lr, epochs=args.epochs,
                                    l2=args.l2, feature_names=names or None)
    classify.save_model(model, args.model)
    print(f"trained on {len(y)} windows, final loss {model.final_loss:.6f}; "
          f"wrote {args.model}")


def _cmd_score(args):
    model = classify.load_model(args.model)
    ids, labels, x, _ = _read_feature_csv(args.features)
    by_case = {}
    for cid, lbl, row in zip(ids, labels, x):
        by_case.setdefault(cid, (lbl, []))[1].append(row)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "label", "score"])
        for cid, (lbl, rows) in by_case.items():
            writer.writerow([cid, lbl, repr(classify.score_case(model, [rows]))])
    print(f"scored {len(by_case)} cases into {args.out}")


def _cmd_evaluate(args):
    table = evaluate.ScoreTable.from_csv(args.scores)
    os.makedirs(args.out, exist_ok=True)
    labels = table.labels()
    rocs = {arm: evaluate.roc_auc(table.scores(arm), labels)
            for arm in ("real", "sim", "fused")}
    report = evaluate.format_roc_report(rocs)
    with open(os.path.join(args.out, "report.txt"), "w") as fh:
        fh.write(report)
    for arm, res in rocs.items():
        evaluate.write_roc_curve_csv(res, os.path.join(args.out, f"roc_{arm}.csv"))
    from .report import plot_roc_curves
    plot_roc_curves(rocs, os.path.join(args.out, "roc_curves.png"))
    print(report, end="")


def _cmd_compare(args):
    table = evaluate.ScoreTable.from_csv(args.scores)
    labels = table.labels()
    lines = []
    for name, a, b in (("fused_vs_real", "fused", "real"),
                       ("fused_vs_sim", "fused", "sim")):
        diff, ci, p = evaluate.delong_compare(table.scores(a), table.scores(b),
                                              labels)
        lines.append(f"{name}: auc_diff = {diff:.4f}, "
                     f"ci95 = [{ci[0]:.4f}, {ci[1]:.4f}], p = {p:.4g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text, end="")


def _cmd_run(args):
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise InvalidParams(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    config = load_config(args.config, overrides)
    from .pipeline import run_experiment
    result = run_experiment(config)
    for arm, res in result["rocs"].items():
        print(f"{arm}: auc = {res.auc:.4f}, "
              f"ci95 = [{res.ci95[0]:.4f}, {res.ci95[1]:.4f}]")
    for name, (diff, ci, p) in result["comparisons"].items():
        print(f"{name}: diff = {diff:.4f}, ci95 = [{ci[0]:.4f}, {ci[1]:.4f}], "
              f"p = {p:.4g}")
    print(f"artifacts in {result['out_dir']}")


_COMMANDS = {
    "phantom": _cmd_phantom,
    "preprocess": _cmd_preprocess,
    "simulate": _cmd_simulate,
    "rcdt": _cmd_rcdt,
    "fuse": _cmd_fuse,
    "train": _cmd_train,
    "score": _cmd_score,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"rcdtscreen {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
