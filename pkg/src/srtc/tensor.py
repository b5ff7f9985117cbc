"""Dense third-order tensor primitives.

Tensors are plain ``numpy.ndarray`` objects of shape ``(H, W, T)`` and dtype
float64. The vectorization ``vec(x)`` used throughout the package is the
column-major flattening (first index varies fastest), i.e.
``x.ravel(order="F")``. Mode-n unfoldings follow the Kolda-Bader
convention, so that for ``x = c x1 U1 x2 U2 x3 U3``::

    unfold(x, n) == U[n] @ unfold(c, n) @ kron(U[N], ..., U[n+1], U[n-1], ..., U[1]).T

Modes are numbered 1, 2, 3 as in the mathematical literature.
"""

import numpy as np

MODES = (1, 2, 3)


def _check_mode(n):
    if n not in MODES:
        raise ValueError(f"mode must be one of 1, 2, 3, got {n!r}")
    return n - 1


def as_tensor(x):
    """Return `x` as a float64 order-3 array, rejecting non-finite data."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("tensor contains NaN or Inf entries")
    return x


def vec(x):
    """Column-major vectorization (first index fastest)."""
    return np.asarray(x).ravel(order="F")


def unvec(v, dims):
    """Inverse of :func:`vec`."""
    return np.reshape(v, dims, order="F")


def unfold(x, n):
    """Mode-`n` unfolding ``X_(n)`` of shape ``I_n x prod(other dims)``."""
    ax = _check_mode(n)
    x = np.asarray(x)
    if x.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got shape {x.shape}")
    return np.reshape(np.moveaxis(x, ax, 0), (x.shape[ax], -1), order="F")


def fold(m, n, dims):
    """Inverse of :func:`unfold` for a tensor of shape `dims`."""
    ax = _check_mode(n)
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ValueError(f"dims must have length 3, got {dims}")
    m = np.asarray(m)
    rest = int(np.prod(dims)) // dims[ax] if dims[ax] else 0
    if m.ndim != 2 or m.shape != (dims[ax], rest):
        raise ValueError(
            f"matrix of shape {m.shape} cannot be folded along mode {n} "
            f"into dims {dims}"
        )
    moved = (dims[ax],) + tuple(d for i, d in enumerate(dims) if i != ax)
    return np.moveaxis(np.reshape(m, moved, order="F"), 0, ax)


def mode_mul(x, u, n):
    """Mode-`n` product ``x x_n u``; `u` has shape ``(J, I_n)``."""
    ax = _check_mode(n)
    x = np.asarray(x)
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[1] != x.shape[ax]:
        raise ValueError(
            f"matrix of shape {u.shape} incompatible with mode {n} "
            f"of tensor shape {x.shape}"
        )
    y = np.tensordot(u, x, axes=(1, ax))
    return np.moveaxis(y, 0, ax)


def multi_mode_mul(x, mats, transpose=False, skip=None):
    """Apply a mode product for every mode, optionally transposing each matrix.

    `skip` names one mode (1-3) to leave untouched.
    """
    for n, u in zip(MODES, mats):
        if n == skip:
            continue
        x = mode_mul(x, u.T if transpose else u, n)
    return x


def multi_project(x, factors):
    """Multilinear projection ``x x1 U1 U1^T x2 U2 U2^T x3 U3 U3^T``.

    The projectors are never formed: each mode applies ``U^T`` then ``U``.
    """
    x = np.asarray(x)
    for n, u in zip(MODES, factors):
        if u.shape[0] != x.shape[n - 1]:
            raise ValueError(
                f"factor {n} has {u.shape[0]} rows, tensor mode has "
                f"{x.shape[n - 1]}"
            )
        x = mode_mul(mode_mul(x, u.T, n), u, n)
    return x


def inner(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.dot(x.ravel(), y.ravel()))


def fro_norm(x):
    return float(np.sqrt(inner(x, x)))
