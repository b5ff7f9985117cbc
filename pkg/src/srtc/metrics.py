"""Evaluation indices: PSNR, SSIM, precision/recall/F-measure and the
relative change/error used as convergence diagnostics."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .tensor import fro_norm

PSNR_CAP = 200.0
SSIM_SIGMA = 1.5
SSIM_TRUNCATE = 3.5  # radius int(3.5 * 1.5 + 0.5) = 5, an 11x11 window
SSIM_WIN = 11
K1, K2 = 0.01, 0.03


def _pair(ref, est):
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if ref.shape != est.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {est.shape}")
    return ref, est


def psnr(ref, est, peak=255.0):
    """``10 log10(peak^2 / MSE)``, capped at 200 dB for identical inputs."""
    ref, est = _pair(ref, est)
    if not peak > 0:
        raise ValueError(f"peak must be positive, got {peak}")
    mse = float(np.mean((ref - est) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(peak**2 / mse))


def ssim(ref, est, data_range=255.0):
    """Single-scale SSIM with a Gaussian window (sigma 1.5, 11x11).

    Local statistics use population (biased) moments; the map is averaged
    over the interior where the window fits entirely inside the frame.
    """
    ref, est = _pair(ref, est)
    if ref.ndim != 2:
        raise ValueError(f"expected a 2-D frame, got shape {ref.shape}")
    if min(ref.shape) < SSIM_WIN:
        raise ValueError(f"frame {ref.shape} smaller than the {SSIM_WIN}x{SSIM_WIN} window")
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2

    def blur(a):
        return gaussian_filter(a, SSIM_SIGMA, mode="reflect", truncate=SSIM_TRUNCATE)

    mx, my = blur(ref), blur(est)
    vx = blur(ref * ref) - mx * mx
    vy = blur(est * est) - my * my
    cxy = blur(ref * est) - mx * my
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    pad = (SSIM_WIN - 1) // 2
    return float(np.mean((num / den)[pad:-pad, pad:-pad]))


@dataclass
class FrameMetrics:
    psnr: np.ndarray
    ssim: np.ndarray

    @property
    def mean_psnr(self):
        return float(np.mean(self.psnr))

    @property
    def mean_ssim(self):
        return float(np.mean(self.ssim))


def frame_metrics(ref, est):
    """PSNR and SSIM of every frame ``[:, :, t]`` of two videos."""
    ref, est = _pair(ref, est)
    if ref.ndim != 3:
        raise ValueError(f"expected (H, W, T) videos, got shape {ref.shape}")
    t = ref.shape[2]
    return FrameMetrics(
        psnr=np.array([psnr(ref[:, :, k], est[:, :, k]) for k in range(t)]),
        ssim=np.array([ssim(ref[:, :, k], est[:, :, k]) for k in range(t)]),
    )


def _ratio(num, den):
    return num / den if den else 0.0


def prf(pred, truth):
    """Precision, recall and F-measure of a binary detection; 0/0 counts as 0."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    return p, r, _ratio(2 * p * r, p + r)


def otsu_threshold(values):
    """Exact Otsu threshold of a sample.

    Every split between consecutive distinct values is scored by the
    between-class variance ``w0 w1 (m0 - m1)^2``; the largest value of the
    lower class at the best split (first one on ties) is returned, so
    ``values > t`` selects the upper class.
    """
    v, counts = np.unique(np.asarray(values, dtype=np.float64).ravel(), return_counts=True)
    if v.size < 2:
        raise ValueError("Otsu threshold needs at least two distinct values")
    n = counts.sum()
    c0 = np.cumsum(counts)[:-1]
    s0 = np.cumsum(v * counts)[:-1]
    total = float(np.dot(v, counts))
    w0 = c0 / n
    m0 = s0 / c0
    m1 = (total - s0) / (n - c0)
    between = w0 * (1.0 - w0) * (m0 - m1) ** 2
    return float(v[int(np.argmax(between))])


def foreground_mask(s, policy="otsu", tau=None):
    """Binarize ``|s|``.

    ``policy="otsu"`` thresholds at the Otsu level of all ``|s|`` values of
    the video; ``policy="fixed"`` uses `tau`. Entries strictly above the
    threshold are foreground.
    """
    a = np.abs(np.asarray(s, dtype=np.float64))
    if policy == "fixed":
        if tau is None:
            raise ValueError("fixed policy needs tau")
        return a > tau
    if policy != "otsu":
        raise ValueError(f"unknown threshold policy {policy!r}")
    if a.size == 0 or a.max() == a.min():
        return np.zeros(a.shape, dtype=bool)
    return a > otsu_threshold(a)


def rel_change(a_k, a_prev):
    """``||a_k - a_prev||_F / max(1, ||a_prev||_F)``."""
    a_k, a_prev = _pair(a_k, a_prev)
    return fro_norm(a_k - a_prev) / max(1.0, fro_norm(a_prev))


def rel_err(a_k, a_star):
    """``||a_k - a_star||_F / max(1, ||a_star||_F)``."""
    a_k, a_star = _pair(a_k, a_star)
    return fro_norm(a_k - a_star) / max(1.0, fro_norm(a_star))
