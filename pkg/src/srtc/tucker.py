"""Tucker-model pieces: HOSVD initialization, closed-form core, the
trace-maximization factor update and Procrustes alignment of factors."""

import numpy as np

from .tensor import MODES, fro_norm, mode_mul, multi_mode_mul, unfold


def check_factors(factors, dims=None):
    """Validate a factor triple and return it as a tuple of float arrays."""
    if len(factors) != 3:
        raise ValueError(f"expected 3 factor matrices, got {len(factors)}")
    factors = tuple(np.asarray(u, dtype=np.float64) for u in factors)
    for n, u in zip(MODES, factors):
        if u.ndim != 2 or u.shape[1] < 1 or u.shape[1] > u.shape[0]:
            raise ValueError(f"factor {n} has invalid shape {u.shape}")
        if dims is not None and u.shape[0] != dims[n - 1]:
            raise ValueError(
                f"factor {n} has {u.shape[0]} rows but mode {n} has size {dims[n - 1]}"
            )
    return factors


def ranks_of(factors):
    return tuple(u.shape[1] for u in factors)


def orthonormality_error(u):
    """``||U^T U - I||_F``."""
    return float(np.linalg.norm(u.T @ u - np.eye(u.shape[1])))


def projector_distance(u, v):
    """``||U U^T - V V^T||_F`` computed without forming either projector."""
    # ||UU^T - VV^T||^2 = ||U - V V^T U||^2 + ||V - U U^T V||^2 for orthonormal U, V;
    # the residual form avoids the cancellation in r_u + r_v - 2 ||U^T V||^2
    ru = u - v @ (v.T @ u)
    rv = v - u @ (u.T @ v)
    return float(np.sqrt(np.sum(ru * ru) + np.sum(rv * rv)))


def top_eigvectors(phi, r):
    """Eigenvectors of the `r` algebraically largest eigenvalues of `phi`.

    Columns are ordered by decreasing eigenvalue. Each column is signed so
    that its largest-magnitude entry is positive (first such entry on ties).
    """
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {phi.shape}")
    size = phi.shape[0]
    if not 1 <= r <= size:
        raise ValueError(f"rank {r} outside [1, {size}]")
    if not np.all(np.isfinite(phi)):
        raise np.linalg.LinAlgError("non-finite entries in eigenproblem")
    sym = 0.5 * (phi + phi.T)
    _, vecs = np.linalg.eigh(sym)
    u = vecs[:, ::-1][:, :r].copy()
    pivot = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivot, np.arange(r)])
    signs[signs == 0] = 1.0
    return u * signs


def hosvd_init(x, ranks):
    """Truncated HOSVD of `x`.

    Returns ``(factors, core)`` where ``factors[n]`` holds the leading
    left singular vectors of the mode-n unfolding (obtained as the top
    eigenvectors of ``X_(n) X_(n)^T``) and ``core = x x1 U1^T x2 U2^T x3 U3^T``.
    """
    x = np.asarray(x, dtype=np.float64)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != 3:
        raise ValueError(f"expected 3 ranks, got {ranks}")
    for n, r in zip(MODES, ranks):
        if not 1 <= r <= x.shape[n - 1]:
            raise ValueError(
                f"rank {r} for mode {n} must lie in [1, {x.shape[n - 1]}]"
            )
    factors = []
    for n, r in zip(MODES, ranks):
        xn = unfold(x, n)
        factors.append(top_eigvectors(xn @ xn.T, r))
    factors = tuple(factors)
    return factors, multi_mode_mul(x, factors, transpose=True)


def reconstruct(core, factors):
    """``core x1 U1 x2 U2 x3 U3``."""
    return multi_mode_mul(core, factors)


def core_from(x, s, factors):
    """Optimal core for fixed factors: ``(x - s) x1 U1^T x2 U2^T x3 U3^T``."""
    x = np.asarray(x)
    s = np.asarray(s)
    if x.shape != s.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {s.shape}")
    factors = check_factors(factors, x.shape)
    return multi_mode_mul(x - s, factors, transpose=True)


def tucker_objective(x, s, core, factors, lam, tv):
    """Objective with an explicit core: ``||x - s - [core; U]||_F^2 + lam * tv``.

    `tv` is the already-evaluated TV norm of `s`.
    """
    resid = np.asarray(x) - np.asarray(s) - reconstruct(core, factors)
    return fro_norm(resid) ** 2 + lam * tv


def build_psi(n, x, s, factors):
    """``Psi = (X_(n) - S_(n)) U_Psi U_Psi^T (X_(n) - S_(n))^T``.

    ``U_Psi`` is the Kronecker product of the factors of the other two modes.
    It is applied implicitly through mode products, so the caller controls
    which (updated or previous) factors are passed for each mode.
    """
    x = np.asarray(x)
    s = np.asarray(s)
    if x.shape != s.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {s.shape}")
    factors = check_factors(factors, x.shape)
    y = x - s
    for m, u in zip(MODES, factors):
        if m != n:
            y = mode_mul(y, u.T, m)
    yn = unfold(y, n)
    psi = yn @ yn.T
    return 0.5 * (psi + psi.T)


def build_phi(psi, u_prev, rho):
    """``Phi = Psi - 2 rho (I - U_prev U_prev^T)``."""
    psi = np.asarray(psi, dtype=np.float64)
    u_prev = np.asarray(u_prev, dtype=np.float64)
    if psi.ndim != 2 or psi.shape[0] != psi.shape[1] or u_prev.shape[0] != psi.shape[0]:
        raise ValueError(
            f"incompatible shapes: psi {psi.shape}, u_prev {u_prev.shape}"
        )
    eye = np.eye(psi.shape[0])
    return psi - 2.0 * rho * (eye - u_prev @ u_prev.T)


def procrustes_align(u_k, u_star):
    """Rotate `u_k` within its column space to best match `u_star`.

    With ``u_k^T u_star = W diag(sigma) V^T`` the optimal orthogonal gauge is
    ``D = W V^T`` and the returned matrix is ``u_k @ D``.
    """
    u_k = np.asarray(u_k, dtype=np.float64)
    u_star = np.asarray(u_star, dtype=np.float64)
    if u_k.shape != u_star.shape:
        raise ValueError(f"shape mismatch: {u_k.shape} vs {u_star.shape}")
    w, _, vt = np.linalg.svd(u_k.T @ u_star)
    return u_k @ (w @ vt)


def random_orthonormal(rows, cols, rng):
    """A random column-orthonormal ``rows x cols`` matrix (Haar-distributed)."""
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))

