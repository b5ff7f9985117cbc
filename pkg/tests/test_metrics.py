import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skimage.metrics import structural_similarity

from srtc.metrics import (
    PSNR_CAP,
    foreground_mask,
    frame_metrics,
    otsu_threshold,
    prf,
    psnr,
    rel_change,
    rel_err,
    ssim,
)


def _gradient_frame(rng, h=24, w=20):
    rows, cols = np.mgrid[0:h, 0:w]
    base = 40 + 6 * rows + 3 * cols + 20 * np.sin(cols / 3.0)
    return np.clip(base + 5 * rng.standard_normal((h, w)), 0, 255)


def _ssim_oracle(a, b):
    return structural_similarity(
        a, b, data_range=255.0, gaussian_weights=True, sigma=1.5,
        use_sample_covariance=False,
    )


# --- psnr ------------------------------------------------------------------------

def test_psnr_identical_is_capped(rng):
    a = rng.uniform(0, 255, (8, 8))
    assert psnr(a, a) == PSNR_CAP == 200.0


def test_psnr_uniform_255_error():
    assert psnr(np.zeros((4, 5)), np.full((4, 5), 255.0)) == pytest.approx(0.0, abs=1e-12)


def test_psnr_unit_mse():
    a = np.zeros((6, 6))
    b = np.where(np.indices((6, 6)).sum(axis=0) % 2 == 0, 1.0, -1.0)
    assert psnr(a, b) == pytest.approx(48.1308036, abs=1e-6)
    assert psnr(a, b) == pytest.approx(10 * math.log10(65025.0), rel=1e-14)


def test_psnr_monotone_in_mse(rng):
    a = rng.uniform(0, 255, (10, 10))
    noise = rng.standard_normal((10, 10))
    vals = [psnr(a, a + t * noise) for t in (0.1, 0.5, 1.0, 4.0, 20.0)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_psnr_errors():
    with pytest.raises(ValueError):
        psnr(np.zeros((3, 3)), np.zeros((3, 4)))
    with pytest.raises(ValueError):
        psnr(np.zeros((3, 3)), np.ones((3, 3)), peak=0.0)


# --- ssim ------------------------------------------------------------------------

def test_ssim_identical(rng):
    a = _gradient_frame(rng)
    assert ssim(a, a) == 1.0


def test_ssim_matches_reference(rng):
    a = _gradient_frame(rng)
    for sigma in (1.0, 8.0, 30.0):
        b = np.clip(a + sigma * rng.standard_normal(a.shape), 0, 255)
        assert ssim(a, b) == pytest.approx(_ssim_oracle(a, b), abs=1e-12)


def test_ssim_inverted_is_low(rng):
    a = _gradient_frame(rng)
    val = ssim(a, 255.0 - a)
    assert val < 0.5
    assert val == pytest.approx(_ssim_oracle(a, 255.0 - a), abs=1e-12)


def test_ssim_constant_frames_closed_form():
    a = np.full((16, 16), 100.0)
    b = np.full((16, 16), 150.0)
    c1 = (0.01 * 255) ** 2
    # zero variances make the contrast/structure factor exactly 1
    expected = (2 * 100 * 150 + c1) / (100**2 + 150**2 + c1)
    assert ssim(a, b) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=20)
@given(seed=st.integers(0, 2**32 - 1))
def test_ssim_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 255, (12, 13))
    b = rng.uniform(0, 255, (12, 13))
    assert abs(ssim(a, b) - ssim(b, a)) < 1e-12
    assert -1.0 <= ssim(a, b) <= 1.0


def test_ssim_errors():
    with pytest.raises(ValueError, match="window"):
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))
    with pytest.raises(ValueError, match="2-D"):
        ssim(np.zeros((12, 12, 2)), np.zeros((12, 12, 2)))


def test_frame_metrics(rng):
    ref = rng.uniform(0, 255, (12, 12, 3))
    est = ref.copy()
    est[:, :, 1] += 1.0
    fm = frame_metrics(ref, est)
    assert fm.psnr.shape == fm.ssim.shape == (3,)
    assert fm.psnr[0] == 200.0 and fm.psnr[1] == pytest.approx(48.1308036, abs=1e-6)
    assert fm.mean_psnr == pytest.approx(np.mean(fm.psnr))
    assert fm.ssim[2] == 1.0
    with pytest.raises(ValueError):
        frame_metrics(ref[:, :, 0], est[:, :, 0])


# --- prf -------------------------------------------------------------------------

def test_prf_perfect():
    truth = np.zeros((4, 4, 2), bool)
    truth[1:3, 1:3, :] = True
    assert prf(truth, truth) == (1.0, 1.0, 1.0)


def test_prf_empty_prediction():
    truth = np.zeros(10, bool)
    truth[:3] = True
    assert prf(np.zeros(10, bool), truth) == (0.0, 0.0, 0.0)


def test_prf_hand_counts():
    truth = np.zeros(20, bool)
    pred = np.zeros(20, bool)
    truth[:10] = True
    pred[:8] = True       # TP = 8
    pred[10:12] = True    # FP = 2, FN = 2
    p, r, f = prf(pred, truth)
    assert (p, r) == (0.8, 0.8)
    assert f == pytest.approx(0.8, rel=1e-15)


@settings(max_examples=30)
@given(seed=st.integers(0, 2**32 - 1))
def test_prf_harmonic_mean(seed):
    rng = np.random.default_rng(seed)
    pred = rng.random(50) < 0.4
    truth = rng.random(50) < 0.4
    p, r, f = prf(pred, truth)
    if p + r > 0:
        assert f == pytest.approx(2 * p * r / (p + r))
    assert 0 <= min(p, r, f) and max(p, r, f) <= 1


def test_prf_shape_mismatch():
    with pytest.raises(ValueError):
        prf(np.zeros(3, bool), np.zeros(4, bool))


# --- foreground_mask -------------------------------------------------------------

def _otsu_brute(values):
    """Exhaustive between-class-variance search over split points of sorted values."""
    v = np.sort(values.ravel())
    best, thr = -1.0, None
    for i in range(1, v.size):
        if v[i] == v[i - 1]:
            continue
        lo, hi = v[:i], v[i:]
        w0, w1 = lo.size / v.size, hi.size / v.size
        between = w0 * w1 * (lo.mean() - hi.mean()) ** 2
        if between > best:
            best, thr = between, v[i - 1]
    return values > thr


def test_mask_of_zero_is_empty():
    assert not foreground_mask(np.zeros((3, 3, 2))).any()


def test_otsu_two_clusters(rng):
    s = np.zeros((6, 6, 3))
    s[2:4, 2:4, :] = 100.0
    s += 0.5 * rng.standard_normal(s.shape)
    mask = foreground_mask(s)
    truth = np.zeros(s.shape, bool)
    truth[2:4, 2:4, :] = True
    assert np.array_equal(mask, truth)
    assert np.array_equal(mask, _otsu_brute(np.abs(s)))


@settings(max_examples=30)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 60))
def test_otsu_matches_exhaustive_search(seed, n):
    rng = np.random.default_rng(seed)
    values = np.round(rng.gamma(2.0, 10.0, n), 1)
    if np.unique(values).size < 2:
        return
    assert np.array_equal(values > otsu_threshold(values), _otsu_brute(values))


def test_otsu_needs_two_values():
    with pytest.raises(ValueError):
        otsu_threshold(np.ones(5))


def test_otsu_uses_magnitude():
    s = np.zeros((4, 4, 2))
    s[0, 0, 0] = -90.0
    s[1, 1, 1] = 90.0
    mask = foreground_mask(s)
    assert mask[0, 0, 0] and mask[1, 1, 1] and mask.sum() == 2


def test_fixed_policy():
    s = np.array([5.0, -50.0, 50.0, -5.0]).reshape(2, 2, 1)
    mask = foreground_mask(s, policy="fixed", tau=10.0)
    assert mask.ravel().tolist() == [False, True, True, False]


def test_mask_policy_errors():
    with pytest.raises(ValueError):
        foreground_mask(np.zeros((2, 2, 2)), policy="fixed")
    with pytest.raises(ValueError):
        foreground_mask(np.zeros((2, 2, 2)), policy="median")


# --- relative change / error -----------------------------------------------------

def test_rel_change_examples(rng):
    a = rng.standard_normal((3, 3, 2))
    assert rel_change(a, a) == 0.0
    b = np.zeros((2, 2, 1))
    b[0, 0, 0] = 0.5
    assert rel_change(b, np.zeros_like(b)) == 0.5
    prev = np.zeros((2, 2, 1))
    prev[0, 0, 0] = 2.0
    cur = prev.copy()
    cur[1, 1, 0] = 1.0
    assert rel_change(cur, prev) == 0.5
    assert rel_err(cur, prev) == 0.5


def test_rel_change_shape_mismatch():
    with pytest.raises(ValueError):
        rel_change(np.zeros((2, 2, 2)), np.zeros((2, 2, 3)))
