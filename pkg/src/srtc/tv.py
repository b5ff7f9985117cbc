"""Periodic forward differences, their adjoint, the anisotropic TV norm and
the FFT solver for ``(2 I + beta D^T D) s = rhs``."""

from typing import NamedTuple

import numpy as np


class DiffField(NamedTuple):
    """Horizontal, vertical and temporal difference components, unstacked."""

    fh: np.ndarray
    fv: np.ndarray
    ft: np.ndarray

    def __add__(self, other):
        return DiffField(*(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        return DiffField(*(a - b for a, b in zip(self, other)))

    def scale(self, c):
        return DiffField(*(c * a for a in self))

    def inner(self, other):
        return float(sum(np.dot(a.ravel(), b.ravel()) for a, b in zip(self, other)))

    def norm(self):
        """Euclidean norm of the stacked ``3*H*W*T`` vector."""
        return float(np.sqrt(sum(np.dot(a.ravel(), a.ravel()) for a in self)))

    @classmethod
    def zeros(cls, dims):
        return cls(np.zeros(dims), np.zeros(dims), np.zeros(dims))


def diff_apply(s):
    """Forward differences with wraparound along each of the three axes.

    ``fh[x, y, t] = s[x+1, y, t] - s[x, y, t]`` and likewise for the other
    axes, indices taken modulo the axis length. A length-1 axis gives zeros.
    """
    s = np.asarray(s, dtype=np.float64)
    return DiffField(*(np.roll(s, -1, axis=ax) - s for ax in range(3)))


def diff_adjoint(f):
    """``D^T f``: negated backward differences, summed over the components."""
    out = None
    for ax, g in enumerate(f):
        g = np.asarray(g, dtype=np.float64)
        term = np.roll(g, 1, axis=ax) - g
        out = term if out is None else out + term
    return out


def tv1_norm(s):
    """Anisotropic TV: sum of absolute forward differences over all axes."""
    return float(sum(np.abs(d).sum() for d in diff_apply(s)))


def diff_kernel_spectrum(dims):
    """``|fftn(D_h)|^2 + |fftn(D_v)|^2 + |fftn(D_t)|^2`` on the frequency grid."""
    total = np.zeros(dims)
    for ax, size in enumerate(dims):
        k = np.arange(size)
        lam = 2.0 - 2.0 * np.cos(2.0 * np.pi * k / size)
        shape = [1, 1, 1]
        shape[ax] = size
        total = total + lam.reshape(shape)
    return total


def spectral_denominator(dims, beta):
    """``2 + beta * (|fftn(D_h)|^2 + |fftn(D_v)|^2 + |fftn(D_t)|^2)``."""
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    dims = tuple(int(d) for d in dims)
    return 2.0 + beta * diff_kernel_spectrum(dims)


def solve_s_step(rhs, denom):
    """Solve ``(2 I + beta D^T D) vec(s) = vec(rhs)`` in the Fourier domain."""
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape != np.shape(denom):
        raise ValueError(f"shape mismatch: {rhs.shape} vs {np.shape(denom)}")
    return np.real(np.fft.ifftn(np.fft.fftn(rhs) / denom))
