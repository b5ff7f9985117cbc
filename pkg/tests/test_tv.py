import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from srtc.tv import (
    DiffField,
    diff_adjoint,
    diff_apply,
    diff_kernel_spectrum,
    solve_s_step,
    spectral_denominator,
    tv1_norm,
)

dims_st = st.tuples(*(st.integers(1, 5) for _ in range(3)))
finite = st.floats(-1e3, 1e3, allow_nan=False)


def dense_diff(dims):
    h, w, t = dims
    n = h * w * t
    idx = lambda i, j, k: i + h * j + h * w * k
    rows = []
    for ax in range(3):
        d = np.zeros((n, n))
        for p in itertools.product(range(h), range(w), range(t)):
            q = list(p)
            q[ax] = (q[ax] + 1) % dims[ax]
            d[idx(*p), idx(*q)] += 1.0
            d[idx(*p), idx(*p)] -= 1.0
        rows.append(d)
    return np.vstack(rows)


def test_constant_has_no_differences():
    for comp in diff_apply(np.full((3, 4, 2), 5.0)):
        assert np.all(comp == 0.0)


def test_two_point_periodic():
    s = np.array([0.0, 1.0]).reshape(2, 1, 1)
    np.testing.assert_array_equal(diff_apply(s).fh.ravel(), [1.0, -1.0])


def test_diff_matches_loop(rng):
    s = rng.standard_normal((4, 3, 5))
    d = diff_apply(s)
    for i, j, k in itertools.product(range(4), range(3), range(5)):
        assert d.fh[i, j, k] == s[(i + 1) % 4, j, k] - s[i, j, k]
        assert d.fv[i, j, k] == s[i, (j + 1) % 3, k] - s[i, j, k]
        assert d.ft[i, j, k] == s[i, j, (k + 1) % 5] - s[i, j, k]


def test_adjoint_zero_and_constant():
    assert np.all(diff_adjoint(DiffField.zeros((3, 3, 3))) == 0.0)
    assert np.all(diff_adjoint(diff_apply(np.full((3, 3, 3), 2.0))) == 0.0)


def test_adjoint_identity_3x3x3(rng):
    for _ in range(50):
        s = rng.standard_normal((3, 3, 3))
        f = DiffField(*(rng.standard_normal((3, 3, 3)) for _ in range(3)))
        assert diff_apply(s).inner(f) == pytest.approx(float(np.sum(s * diff_adjoint(f))), rel=1e-10)


def test_adjoint_dense_oracle(rng):
    dims = (3, 2, 4)
    d = dense_diff(dims)
    f = DiffField(*(rng.standard_normal(dims) for _ in range(3)))
    stacked = np.concatenate([c.ravel(order="F") for c in f])
    np.testing.assert_allclose(diff_adjoint(f).ravel(order="F"), d.T @ stacked, atol=1e-12)


def test_tv_constant_and_spike():
    assert tv1_norm(np.full((3, 3, 3), 4.0)) == 0.0
    s = np.zeros((3, 4, 2))
    s[1, 2, 0] = 1.0
    assert tv1_norm(s) == 6.0


def test_tv_definition(rng):
    s = rng.standard_normal((4, 3, 2))
    expected = sum(np.abs(c).sum() for c in diff_apply(s))
    assert tv1_norm(s) == pytest.approx(expected, rel=1e-14)


@given(dims=dims_st, data=st.data())
def test_tv_homogeneous_and_shift_invariant(dims, data):
    s = data.draw(arrays(np.float64, dims, elements=finite))
    a = data.draw(st.floats(-10, 10))
    c = data.draw(st.floats(-100, 100))
    base = tv1_norm(s)
    assert tv1_norm(a * s) == pytest.approx(abs(a) * base, rel=1e-9, abs=1e-7)
    assert tv1_norm(s + c) == pytest.approx(base, rel=1e-9, abs=1e-7)


def test_denominator_beta_zero():
    assert np.all(spectral_denominator((3, 2, 2), 0.0) == 2.0)


def test_denominator_two_point():
    np.testing.assert_allclose(spectral_denominator((2, 1, 1), 1.0).ravel(), [2.0, 6.0], atol=1e-15)


def test_spectrum_explicit_kernel(rng):
    dims = (5, 3, 4)
    total = np.zeros(dims)
    for ax in range(3):
        kern = np.zeros(dims)
        kern[0, 0, 0] = -1.0
        idx = [0, 0, 0]
        idx[ax] = -1 % dims[ax]
        kern[tuple(idx)] += 1.0
        total += np.abs(np.fft.fftn(kern)) ** 2
    np.testing.assert_allclose(diff_kernel_spectrum(dims), total, atol=1e-10)


def test_denominator_rejects_negative_beta():
    with pytest.raises(ValueError):
        spectral_denominator((2, 2, 2), -1.0)


def test_solve_beta_zero(rng):
    rhs = rng.standard_normal((3, 2, 2))
    np.testing.assert_allclose(solve_s_step(rhs, spectral_denominator(rhs.shape, 0.0)), rhs / 2, atol=1e-14)


def test_solve_constant_rhs():
    rhs = np.full((3, 3, 2), 4.0)
    np.testing.assert_allclose(solve_s_step(rhs, spectral_denominator(rhs.shape, 3.0)), 2.0, atol=1e-14)


def test_solve_dense(rng):
    dims = (3, 3, 2)
    rhs = rng.standard_normal(dims)
    d = dense_diff(dims)
    dense = np.linalg.solve(2 * np.eye(d.shape[1]) + 0.7 * d.T @ d, rhs.ravel(order="F"))
    fast = solve_s_step(rhs, spectral_denominator(dims, 0.7)).ravel(order="F")
    np.testing.assert_allclose(fast, dense, atol=1e-8)


def test_solve_shape_mismatch():
    with pytest.raises(ValueError):
        solve_s_step(np.zeros((2, 2, 2)), np.ones((2, 2, 3)))


def test_difffield_algebra(rng):
    a = DiffField(*(rng.standard_normal((2, 2, 2)) for _ in range(3)))
    b = DiffField(*(rng.standard_normal((2, 2, 2)) for _ in range(3)))
    stacked = lambda f: np.concatenate([c.ravel() for c in f])
    assert (a - b).norm() == pytest.approx(np.linalg.norm(stacked(a) - stacked(b)))
    assert a.inner(b) == pytest.approx(stacked(a) @ stacked(b))
    np.testing.assert_allclose(stacked((a + b).scale(2.0)), 2 * (stacked(a) + stacked(b)))
