"""Pipeline configuration: plain-text ``key = value`` files with defaults
for every key, validated against the stage preconditions at load.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import InvalidParams, UnreadableFile
from .phantom import PhantomParams
from .simulate import SimulatorSpec


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 1
    n_controls: int = 100
    n_cancers: int = 50

    # phantom cohort
    phantom_size: int = 256
    texture_correlation: float = 0.9
    lesion_contrast: float = 0.2
    lesion_radius: float = 14.0
    lesion_jitter: float = 6.0
    noise_sigma: float = 0.02

    # geometry of the transform stage (5:8 aspect like a mammogram frame)
    work_w: int = 120
    work_h: int = 192
    n_theta: int = 96

    # contrast enhancement
    clahe_clip: float = 0.01
    clahe_tiles_x: int = 8
    clahe_tiles_y: int = 8

    # classification stage
    class_w: int = 60
    class_h: int = 96
    window: int = 48
    stride_x: int = 6
    stride_y: int = 12
    lr: float = 0.3
    epochs: int = 400
    l2: float = 1e-3
    folds: int = 5

    # simulator
    sim_kind: str = "mirror"
    sim_sigma: float = 0.5
    sim_external_dir: str = ""

    jobs: int = 4
    save_cohort_images: bool = False
    out_dir: str = "out"

    def __post_init__(self):
        if self.n_controls < 0 or self.n_cancers < 0:
            raise InvalidParams("case counts must be >= 0")
        if self.work_w < 2 or self.work_h < 2 or self.class_w < 2 or self.class_h < 2:
            raise InvalidParams("working and classification sizes must be >= 2")
        if self.n_theta < 2:
            raise InvalidParams("n_theta must be >= 2")
        if self.folds < 2:
            raise InvalidParams("folds must be >= 2")
        if self.jobs < 1:
            raise InvalidParams("jobs must be >= 1")
        if self.window > self.class_w or self.window > self.class_h:
            raise InvalidParams("window does not fit the classification size")
        # construct the sub-specs so their own validation runs
        self.phantom_params()
        self.simulator_spec()

    def phantom_params(self) -> PhantomParams:
        return PhantomParams(size=self.phantom_size,
                             texture_correlation=self.texture_correlation,
                             lesion_contrast=self.lesion_contrast,
                             lesion_radius=self.lesion_radius,
                             lesion_jitter=self.lesion_jitter,
                             noise_sigma=self.noise_sigma)

    def simulator_spec(self) -> SimulatorSpec:
        return SimulatorSpec(kind=self.sim_kind,
                             smoothing_sigma=self.sim_sigma,
                             external_dir=self.sim_external_dir or None)


_FIELDS = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    default = getattr(PipelineConfig, name)
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise InvalidParams(f"{name}: expected a boolean, got {raw!r}")
    try:
        return type(default)(raw)
    except ValueError as exc:
        raise InvalidParams(f"{name}: {exc}") from exc


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    """Build a config from an optional file plus key=value overrides."""
    values = {}
    if path is not None:
        path = os.fspath(path)
        if not os.path.isfile(path):
            raise UnreadableFile(f"no such config file: {path}")
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidParams(f"{path}:{lineno}: expected 'key = value'")
                key, _, raw = line.partition("=")
                key, raw = key.strip(), raw.strip()
                if key not in _FIELDS:
                    raise InvalidParams(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, raw)
    for key, raw in (overrides or {}).items():
        if key not in _FIELDS:
            raise InvalidParams(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    return PipelineConfig(**values)


def save_config(config: PipelineConfig, path) -> None:
    with open(os.fspath(path), "w") as fh:
        for f in fields(PipelineConfig):
            fh.write(f"{f.name} = {getattr(config, f.name)}\n")
