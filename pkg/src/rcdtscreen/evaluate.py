"""ROC/AUC with DeLong variance and paired tests, similarity surrogates,
and the median-midpoint operating threshold.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (EmptyInput, GridMismatch, InvalidParams, LengthMismatch,
                     SingleClass, UnreadableFile, ZeroVariance)
from .image import GrayImage


@dataclass(frozen=True)
class RocResult:
    auc: float
    variance: float
    ci95: tuple
    curve: tuple  # ((fpr, tpr), ...) from (0, 0) to (1, 1)


@dataclass(frozen=True)
class ScoreTable:
    """Per-case scores of the three arms; rows are
    (case_id, label, score_real, score_sim, score_fused).
    """

    rows: tuple

    def __post_init__(self):
        ids = [r[0] for r in self.rows]
        if len(set(ids)) != len(ids):
            raise InvalidParams("duplicate case_ids in score table")
        for r in self.rows:
            if r[1] not in ("positive", "negative"):
                raise InvalidParams(f"bad label {r[1]!r} for case {r[0]}")
            if not all(0.0 <= s <= 1.0 for s in r[2:5]):
                raise InvalidParams(f"score out of [0, 1] for case {r[0]}")

    def labels(self) -> np.ndarray:
        return np.array([1 if r[1] == "positive" else 0 for r in self.rows])

    def scores(self, arm: str) -> np.ndarray:
        idx = {"real": 2, "sim": 3, "fused": 4}[arm]
        return np.array([r[idx] for r in self.rows])

    def to_csv(self, path) -> None:
        with open(os.fspath(path), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["case_id", "label", "score_real", "score_sim",
                             "score_fused"])
            for cid, label, a, b, c in self.rows:
                writer.writerow([cid, label, repr(float(a)), repr(float(b)),
                                 repr(float(c))])

    @classmethod
    def from_csv(cls, path) -> "ScoreTable":
        if not os.path.isfile(os.fspath(path)):
            raise UnreadableFile(f"no such file: {path}")
        rows = []
        with open(os.fspath(path), newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append((row["case_id"], row["label"],
                             float(row["score_real"]), float(row["score_sim"]),
                             float(row["score_fused"])))
        return cls(rows=tuple(rows))


def _split(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise SingleClass("both classes must be present")
    return pos, neg


def _structural_components(pos, neg):
    """Placement values: per-positive and per-negative means of the
    pairwise comparison kernel (ties count 0.5).
    """
    psi = (pos[:, None] > neg[None, :]) + 0.5 * (pos[:, None] == neg[None, :])
    return psi.mean(axis=1), psi.mean(axis=0)


def _delong_variance(v10, v01):
    s10 = v10.var(ddof=1) if len(v10) > 1 else 0.0
    s01 = v01.var(ddof=1) if len(v01) > 1 else 0.0
    return s10 / len(v10) + s01 / len(v01)


def _roc_curve(pos, neg):
    scores = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    order = np.argsort(-scores, kind="stable")
    scores, labels = scores[order], labels[order]
    tps = np.cumsum(labels)
    fps = np.cumsum(1 - labels)
    # collapse tied thresholds
    distinct = np.nonzero(np.diff(scores))[0]
    idx = np.r_[distinct, len(scores) - 1]
    fpr = np.r_[0.0, fps[idx] / len(neg)]
    tpr = np.r_[0.0, tps[idx] / len(pos)]
    return tuple((float(f), float(t)) for f, t in zip(fpr, tpr))


def roc_auc(scores, labels) -> RocResult:
    """AUC as the Mann-Whitney statistic (ties 0.5) with variance and a
    95% CI from the structural-component estimator, clamped to [0, 1].
    """
    pos, neg = _split(scores, labels)
    v10, v01 = _structural_components(pos, neg)
    auc = float(v10.mean())
    var = float(_delong_variance(v10, v01))
    half = 1.96 * math.sqrt(max(var, 0.0))
    ci = (max(auc - half, 0.0), min(auc + half, 1.0))
    return RocResult(auc=auc, variance=var, ci95=ci, curve=_roc_curve(pos, neg))


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def delong_compare(scores_a, scores_b, labels):
    """Two-sided z-test on the paired AUC difference using the covariance
    of the structural components; returns (auc_diff, (lo, hi), p_value).
    """
    scores_a = np.asarray(scores_a, dtype=np.float64)
    scores_b = np.asarray(scores_b, dtype=np.float64)
    if len(scores_a) != len(scores_b):
        raise LengthMismatch("paired score vectors differ in length")
    pos_a, neg_a = _split(scores_a, labels)
    pos_b, neg_b = _split(scores_b, labels)
    v10a, v01a = _structural_components(pos_a, neg_a)
    v10b, v01b = _structural_components(pos_b, neg_b)
    diff = float(v10a.mean() - v10b.mean())
    m, n = len(pos_a), len(neg_a)
    cov10 = np.cov(v10a, v10b, ddof=1)[0, 1] if m > 1 else 0.0
    cov01 = np.cov(v01a, v01b, ddof=1)[0, 1] if n > 1 else 0.0
    var = (_delong_variance(v10a, v01a) + _delong_variance(v10b, v01b)
           - 2.0 * (cov10 / m + cov01 / n))
    var = max(float(var), 0.0)
    if var == 0.0:
        p = 1.0 if diff == 0.0 else 0.0
        return diff, (diff, diff), p
    se = math.sqrt(var)
    p = 2.0 * _norm_sf(abs(diff) / se)
    return diff, (diff - 1.96 * se, diff + 1.96 * se), min(p, 1.0)


def similarity(a: GrayImage, b: GrayImage):
    """(mean squared error, Pearson correlation over all pixels)."""
    if a.data.shape != b.data.shape:
        raise GridMismatch("similarity inputs have different dimensions")
    mse = float(np.mean((a.data - b.data) ** 2))
    da = a.data - a.data.mean()
    db = b.data - b.data.mean()
    denom = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    if denom == 0.0:
        raise ZeroVariance("correlation undefined for a constant image")
    return mse, float((da * db).sum()) / denom


def midpoint_threshold(pos_scores, neg_scores) -> float:
    """Operating point halfway between the two class score medians."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise EmptyInput("both score sets must be nonempty")
    return float((np.median(pos) + np.median(neg)) / 2.0)


def write_roc_curve_csv(result: RocResult, path) -> None:
    with open(os.fspath(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        for f, t in result.curve:
            writer.writerow([repr(f), repr(t)])


def format_roc_report(results: dict) -> str:
    """Plain-text report block: one line per arm with AUC, variance, CI."""
    lines = []
    for arm, res in results.items():
        lines.append(
            f"{arm}: auc = {res.auc:.4f}, variance = {res.variance:.6g}, "
            f"ci95 = [{res.ci95[0]:.4f}, {res.ci95[1]:.4f}]")
    return "\n".join(lines) + "\n"
