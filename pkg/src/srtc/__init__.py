"""Smooth robust tensor completion.

Recover a partially observed video tensor and split it into a low
multilinear-rank background and a TV-smooth foreground.
"""

__version__ = "0.1.0"

from .admm import AdmmConfig, solve_s_subproblem
from .data import Blob, SceneSpec, apply_missing, read_tensor, synth_scene, write_tensor
from .metrics import foreground_mask, frame_metrics, prf, psnr, ssim
from .tenpam import SolveResult, SolverConfig, SolveTrace, default_ranks, objective, run

__all__ = [
    "AdmmConfig",
    "Blob",
    "SceneSpec",
    "SolveResult",
    "SolveTrace",
    "SolverConfig",
    "apply_missing",
    "default_ranks",
    "foreground_mask",
    "frame_metrics",
    "objective",
    "prf",
    "psnr",
    "read_tensor",
    "run",
    "solve_s_subproblem",
    "ssim",
    "synth_scene",
    "write_tensor",
]
