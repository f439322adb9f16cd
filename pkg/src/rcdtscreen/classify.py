"""Sliding-window scoring over hand-rolled statistical features and a
full-batch logistic-regression baseline.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, EmptyInput, InvalidParams, SingleClass,
                     UnreadableFile, WindowTooLarge)
from .image import GrayImage, RgbImage

GRAY_FEATURE_NAMES = (
    "mean", "std", "skew", "kurtosis", "p95", "p99",
    "energy_above_p90", "grad_mag_mean",
)


def rgb_feature_names() -> tuple:
    names = []
    for ch in ("r", "g", "b"):
        names += [f"{ch}_{n}" for n in GRAY_FEATURE_NAMES]
    return tuple(names) + ("discord_mean", "discord_max")


@dataclass(frozen=True)
class WindowGrid:
    window: int
    stride_x: int
    stride_y: int
    positions: tuple  # (x, y) top-left corners, row-major


def extract_windows(img, window: int, stride_x: int, stride_y: int) -> WindowGrid:
    """Enumerate top-left corners x = 0, stride_x, ... while the window
    fits, likewise for y; row-major order.
    """
    if stride_x < 1 or stride_y < 1 or window < 1:
        raise InvalidParams("window and strides must be >= 1")
    h, w = img.data.shape[:2]
    if window > w or window > h:
        raise WindowTooLarge(f"window {window} exceeds image {w}x{h}")
    xs = range(0, w - window + 1, stride_x)
    ys = range(0, h - window + 1, stride_y)
    positions = tuple((x, y) for y in ys for x in xs)
    return WindowGrid(window=window, stride_x=stride_x, stride_y=stride_y,
                      positions=positions)


def _channel_features(c: np.ndarray) -> list:
    mean = c.mean()
    std = c.std()
    if std < 1e-12:  # constant window up to float noise
        std = 0.0
    if std > 0:
        z = (c - mean) / std
        skew = float((z ** 3).mean())
        kurt = float((z ** 4).mean() - 3.0)
    else:
        skew = kurt = 0.0
    p90, p95, p99 = np.percentile(c, [90.0, 95.0, 99.0])
    energy = float(c[c > p90].sum())
    gy, gx = np.gradient(c)
    grad = float(np.hypot(gx, gy).mean())
    return [float(mean), float(std), skew, kurt, float(p95), float(p99),
            energy, grad]


def window_features(window) -> np.ndarray:
    """Per-channel summary statistics; fused RGB windows additionally get
    mean and max of the |G - R| discordance channel.
    """
    if isinstance(window, GrayImage):
        return np.array(_channel_features(window.data))
    if isinstance(window, RgbImage):
        feats = []
        for ch in range(3):
            feats += _channel_features(window.data[:, :, ch])
        d = np.abs(window.data[:, :, 1] - window.data[:, :, 0])
        feats += [float(d.mean()), float(d.max())]
        return np.array(feats)
    raise InvalidParams(f"cannot featurize {type(window).__name__}")


def crop_window(img, pos: tuple, window: int):
    x, y = pos
    data = img.data[y:y + window, x:x + window]
    return RgbImage(data) if data.ndim == 3 else GrayImage(data)


def image_window_features(img, grid: WindowGrid) -> np.ndarray:
    """Feature matrix, one row per grid window."""
    return np.array([window_features(crop_window(img, pos, grid.window))
                     for pos in grid.positions])


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    feature_mean: np.ndarray
    feature_std: np.ndarray
    feature_names: tuple
    lr: float = 0.0
    epochs: int = 0
    l2: float = 0.0
    final_loss: float = float("nan")
    loss_history: tuple = field(default_factory=tuple, repr=False)


def loss_and_grad(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray,
                  l2: float):
    """Mean cross-entropy with an L2 penalty on the weights (bias exempt)
    and its analytic gradient.
    """
    z = x @ weights + bias
    p = 1.0 / (1.0 + np.exp(-z))
    eps = 1e-12
    loss = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    loss += 0.5 * l2 * np.dot(weights, weights)
    resid = p - y
    grad_w = x.T @ resid / len(y) + l2 * weights
    grad_b = resid.mean()
    return float(loss), grad_w, float(grad_b)


def train_logistic(features, labels, lr: float = 0.5, epochs: int = 300,
                   l2: float = 1e-3, feature_names: tuple | None = None) -> LogisticModel:
    """Full-batch gradient descent on standardized features."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise EmptyInput("no training data")
    if x.ndim != 2 or len(x) != len(y):
        raise DimensionMismatch(f"features {x.shape} do not match {len(y)} labels")
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass("training data contains a single class")

    mean = x.mean(axis=0)
    std = np.maximum(x.std(axis=0), 1e-12)
    xs = (x - mean) / std
    w = np.zeros(x.shape[1])
    b = 0.0
    losses = []
    for _ in range(epochs):
        loss, gw, gb = loss_and_grad(w, b, xs, y, l2)
        losses.append(loss)
        w -= lr * gw
        b -= lr * gb
    final, _, _ = loss_and_grad(w, b, xs, y, l2)
    losses.append(final)
    names = feature_names or tuple(f"f{i}" for i in range(x.shape[1]))
    if len(names) != x.shape[1]:
        raise DimensionMismatch("feature_names length does not match features")
    return LogisticModel(weights=w, bias=b, feature_mean=mean, feature_std=std,
                         feature_names=tuple(names), lr=lr, epochs=epochs, l2=l2,
                         final_loss=final, loss_history=tuple(losses))


def predict_proba(model: LogisticModel, features) -> np.ndarray:
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if x.shape[1] != len(model.weights):
        raise DimensionMismatch(
            f"{x.shape[1]} features, model expects {len(model.weights)}")
    xs = (x - model.feature_mean) / model.feature_std
    return 1.0 / (1.0 + np.exp(-(xs @ model.weights + model.bias)))


def score_case(model: LogisticModel, feature_blocks) -> float:
    """Median sigmoid score over all windows pooled across the case's
    views (even counts average the middle two).
    """
    blocks = [np.atleast_2d(b) for b in feature_blocks if np.asarray(b).size]
    if not blocks:
        raise EmptyInput("no windows to score")
    scores = predict_proba(model, np.vstack(blocks))
    return float(np.median(scores))


def save_model(model: LogisticModel, path) -> None:
    """Plain-text persistence: names, standardization stats, weights, bias."""
    def fmt(arr):
        return ",".join(repr(float(v)) for v in arr)

    with open(os.fspath(path), "w") as fh:
        fh.write("feature_names = " + ",".join(model.feature_names) + "\n")
        fh.write("feature_mean = " + fmt(model.feature_mean) + "\n")
        fh.write("feature_std = " + fmt(model.feature_std) + "\n")
        fh.write("weights = " + fmt(model.weights) + "\n")
        fh.write(f"bias = {model.bias!r}\n")
        fh.write(f"lr = {model.lr!r}\n")
        fh.write(f"epochs = {model.epochs}\n")
        fh.write(f"l2 = {model.l2!r}\n")
        fh.write(f"final_loss = {model.final_loss!r}\n")


def load_model(path) -> LogisticModel:
    fields = {}
    try:
        with open(os.fspath(path)) as fh:
            for line in fh:
                key, _, value = line.partition("=")
                fields[key.strip()] = value.strip()
    except OSError as exc:
        raise UnreadableFile(str(exc)) from exc

    def arr(key):
        return np.array([float(v) for v in fields[key].split(",")])

    return LogisticModel(
        weights=arr("weights"),
        bias=float(fields["bias"]),
        feature_mean=arr("feature_mean"),
        feature_std=arr("feature_std"),
        feature_names=tuple(fields["feature_names"].split(",")),
        lr=float(fields.get("lr", 0.0)),
        epochs=int(fields.get("epochs", 0)),
        l2=float(fields.get("l2", 0.0)),
        final_loss=float(fields.get("final_loss", "nan")),
    )
