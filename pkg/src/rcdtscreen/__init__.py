"""Bilateral transform-space asymmetry screening pipeline."""

from .image import GrayImage, RgbImage, flip, load_image, resize_bicubic, save_image
from .radon import Sinogram, iradon, radon
from .rcdt import (RcdtImage, WarpField, compute_warp, forward_rcdt,
                   forward_rcdt_from_sinos, inverse_rcdt, visualize_rcdt)
from .fusion import fuse_green_magenta
from .phantom import CaseRecord, PhantomParams, generate_case, generate_cohort
from .simulate import SimulatorSpec, simulate_contralateral
from .evaluate import RocResult, ScoreTable, delong_compare, midpoint_threshold, roc_auc, similarity
from .config import PipelineConfig, load_config
from .pipeline import run_experiment

__version__ = "0.1.0"
