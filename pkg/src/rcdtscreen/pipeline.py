"""End-to-end experiment driver: cohort -> preprocess -> simulate ->
transform/visualize/fuse -> stratified K-fold train/score of the three
arms -> ROC reports, paired comparisons, and stage figures.
"""

from __future__ import annotations

import multiprocessing
import os

import numpy as np

from .classify import (extract_windows, image_window_features, rgb_feature_names,
                       save_model, score_case, train_logistic, GRAY_FEATURE_NAMES)
from .config import PipelineConfig, save_config
from .evaluate import (RocResult, ScoreTable, delong_compare, format_roc_report,
                       roc_auc, write_roc_curve_csv)
from .fusion import fuse_green_magenta
from .image import GrayImage, resize_bicubic, save_image
from .phantom import CaseRecord, generate_cohort, save_cohort
from .preprocess import clahe, crop_resize_to, segment_breast, standardize_orientation
from .rcdt import forward_rcdt_from_sinos, visualize_rcdt
from .radon import radon
from .simulate import simulate_contralateral

ARMS = ("real", "sim", "fused")

_OPPOSITE = {"left": "right", "right": "left"}


def _prep(img, side, config):
    mask = segment_breast(img)
    pre = crop_resize_to(img, mask, config.work_w, config.work_h)
    return standardize_orientation(pre, side)


def process_case(case: CaseRecord, config: PipelineConfig, keep_stages: bool = False):
    """Per-case feature blocks for the three arms (pure; parallel-safe).

    Returns (case_id, label, {arm: [per-view feature matrix, ...]}) and,
    when keep_stages is set, a dict of intermediate images for figures.
    """
    spec = config.simulator_spec()
    tiles = (config.clahe_tiles_x, config.clahe_tiles_y)
    template_side = case.cancer_side if case.label == "cancer" else "left"
    sim_input_side = _OPPOSITE[template_side]
    sim_output_side = template_side

    feats = {arm: [] for arm in ARMS}
    stages = {}
    for view in ("cc", "mlo"):
        pre = {side: _prep(case.images[f"{side}_{view}"], side, config)
               for side in ("left", "right")}
        sim_raw = simulate_contralateral(pre[sim_input_side], spec,
                                         case.case_id, view)
        sim_target = standardize_orientation(sim_raw, sim_output_side)
        template = pre[template_side]
        real_target = pre[_OPPOSITE[template_side]]

        sino_tpl = radon(template, config.n_theta)
        channels = {}
        for arm, target in (("real", real_target), ("sim", sim_target)):
            rc = forward_rcdt_from_sinos(sino_tpl, radon(target, config.n_theta))
            vis = visualize_rcdt(rc, config.work_w, config.work_h)
            enhanced = clahe(vis, config.clahe_clip, tiles)
            channels[arm] = resize_bicubic(enhanced, config.class_w, config.class_h)
        fused = fuse_green_magenta(channels["real"], channels["sim"])

        grid = extract_windows(channels["real"], config.window,
                               config.stride_x, config.stride_y)
        feats["real"].append(image_window_features(channels["real"], grid))
        feats["sim"].append(image_window_features(channels["sim"], grid))
        feats["fused"].append(image_window_features(fused, grid))

        if keep_stages:
            stages[view] = {
                "template": template,
                "real_target": real_target,
                "sim_target": sim_target,
                "vis_real": channels["real"],
                "vis_sim": channels["sim"],
                "fused": fused,
            }
    return case.case_id, case.label, feats, stages


def _process_star(args):
    case, config = args
    cid, label, feats, _ = process_case(case, config)
    return cid, label, feats


def stratified_folds(labels, n_folds: int, seed: int):
    """Disjoint, exhaustive, class-stratified fold assignment per case."""
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels)
    fold = np.empty(len(labels), dtype=int)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        fold[idx] = np.arange(len(idx)) % n_folds
    return fold


def run_experiment(config: PipelineConfig, out_dir=None) -> dict:
    """Run the seeded three-arm experiment; returns the per-arm RocResults
    and comparison rows, with all artifacts written under out_dir.
    """
    out_dir = os.fspath(out_dir if out_dir is not None else config.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def emit(relpath):
        written.append(relpath)
        return os.path.join(out_dir, relpath)

    try:
        result = _run(config, out_dir, emit)
    except BaseException:
        _write_manifest(out_dir, written, "partial")
        raise
    _write_manifest(out_dir, written, "complete")
    return result


def _run(config: PipelineConfig, out_dir, emit) -> dict:
    save_config(config, emit("config.txt"))
    cases = generate_cohort(config.seed, config.n_controls, config.n_cancers,
                            config.phantom_params())
    if config.save_cohort_images:
        cohort_dir = os.path.join(out_dir, "cohort")
        save_cohort(cases, cohort_dir)
        emit(os.path.join("cohort", "manifest.csv"))

    work = [(case, config) for case in cases]
    if config.jobs > 1 and len(cases) > 1:
        with multiprocessing.Pool(config.jobs) as pool:
            processed = pool.map(_process_star, work, chunksize=1)
    else:
        processed = [_process_star(item) for item in work]

    _write_stage_samples(cases, config, out_dir, emit)

    case_ids = [cid for cid, _, _ in processed]
    labels = np.array([1 if lbl == "cancer" else 0 for _, lbl, _ in processed])
    fold = stratified_folds(labels, config.folds, config.seed)

    names = {"real": GRAY_FEATURE_NAMES, "sim": GRAY_FEATURE_NAMES,
             "fused": rgb_feature_names()}
    case_scores = {arm: np.zeros(len(cases)) for arm in ARMS}
    models = {}
    for f in range(config.folds):
        train_idx = np.flatnonzero(fold != f)
        test_idx = np.flatnonzero(fold == f)
        for arm in ARMS:
            x = np.vstack([blk for i in train_idx for blk in processed[i][2][arm]])
            y = np.concatenate([
                np.full(sum(len(blk) for blk in processed[i][2][arm]), labels[i])
                for i in train_idx])
            model = train_logistic(x, y, lr=config.lr, epochs=config.epochs,
                                   l2=config.l2, feature_names=names[arm])
            models[arm] = model
            for i in test_idx:
                case_scores[arm][i] = score_case(model, processed[i][2][arm])

    models_dir = os.path.join(out_dir, "models")
    os.makedirs(models_dir, exist_ok=True)
    for arm, model in models.items():
        save_model(model, emit(os.path.join("models", f"{arm}.txt")))

    rows = tuple(
        (case_ids[i], "positive" if labels[i] else "negative",
         case_scores["real"][i], case_scores["sim"][i], case_scores["fused"][i])
        for i in range(len(cases)))
    table = ScoreTable(rows=rows)
    table.to_csv(emit("scores.csv"))

    rocs = {arm: roc_auc(case_scores[arm], labels) for arm in ARMS}
    for arm in ARMS:
        write_roc_curve_csv(rocs[arm], emit(f"roc_{arm}.csv"))
    comparisons = {
        "fused_vs_real": delong_compare(case_scores["fused"], case_scores["real"],
                                        labels),
        "fused_vs_sim": delong_compare(case_scores["fused"], case_scores["sim"],
                                       labels),
    }
    with open(emit("report.txt"), "w") as fh:
        fh.write(format_roc_report(rocs))
        for name, (diff, ci, p) in comparisons.items():
            fh.write(f"{name}: auc_diff = {diff:.4f}, "
                     f"ci95 = [{ci[0]:.4f}, {ci[1]:.4f}], p = {p:.4g}\n")

    from .report import plot_roc_curves
    plot_roc_curves(rocs, emit("roc_curves.png"))
    return {"rocs": rocs, "comparisons": comparisons, "table": table,
            "out_dir": out_dir}


def _write_stage_samples(cases, config, out_dir, emit) -> None:
    """Stage-by-stage PNGs for the first control and first cancer case."""
    samples_dir = os.path.join(out_dir, "samples")
    os.makedirs(samples_dir, exist_ok=True)
    picked = {}
    for case in cases:
        picked.setdefault(case.label, case)
    for label, case in picked.items():
        _, _, _, stages = process_case(case, config, keep_stages=True)
        for view, imgs in stages.items():
            for stage, img in imgs.items():
                name = f"{label}_{view}_{stage}.png"
                data = img.data
                if isinstance(img, GrayImage):
                    img = GrayImage(np.clip(data, 0.0, 1.0))
                save_image(img, emit(os.path.join("samples", name)), bit_depth=8)


def _write_manifest(out_dir, written, status: str) -> None:
    with open(os.path.join(out_dir, "MANIFEST"), "w") as fh:
        fh.write(f"status = {status}\n")
        for rel in written:
            fh.write(rel + "\n")
