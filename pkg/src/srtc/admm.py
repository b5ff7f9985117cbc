"""ADMM solver for the TV-regularized foreground subproblem.

For fixed factors the foreground update minimizes::

    ||x_k - s - P(x_k - s_k)||_F^2 + lam * TV(s) + rho * ||s - s_k||_F^2

where ``P`` is the multilinear projection onto the factor subspaces. Up to a
constant and the factor ``1 + rho`` this equals
``||s - e||_F^2 + lam / (1 + rho) * ||D s||_1`` with ``e`` from
:func:`compute_e`, which is split as ``f = D s`` and solved by ADMM with
an adaptively increased penalty.
"""

import math
from dataclasses import dataclass

import numpy as np

from .tensor import fro_norm, multi_project
from .tv import DiffField, diff_adjoint, diff_apply, solve_s_step, spectral_denominator, tv1_norm


@dataclass(frozen=True)
class AdmmConfig:
    gamma: float = 1.1
    c1: float = 1.15
    c2: float = 0.95
    tol: float = 1e-6
    max_iter: int = 100

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.c1 > 1:
            raise ValueError(f"c1 must exceed 1, got {self.c1}")
        if not 0 < self.c2 < 1:
            raise ValueError(f"c2 must lie in (0, 1), got {self.c2}")
        if not self.tol >= 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


@dataclass
class AdmmState:
    s: np.ndarray
    f: DiffField
    lambda_f: DiffField
    beta_f: float
    err_prev: float = math.inf


@dataclass
class AdmmInfo:
    """Diagnostics from one call of :func:`solve_s_subproblem`."""

    iterations: int
    primal_residual: float
    beta_f: float
    objective_start: float
    objective_end: float
    fallback: bool


def soft_threshold(a, tau):
    """``sign(a) * max(|a| - tau, 0)`` elementwise."""
    return np.sign(a) * np.maximum(np.abs(a) - tau, 0.0)


def compute_e(x_k, s_k, factors, rho):
    """Center of the quadratic part: ``(x_k - P(x_k - s_k) + rho s_k) / (1 + rho)``."""
    x_k = np.asarray(x_k, dtype=np.float64)
    s_k = np.asarray(s_k, dtype=np.float64)
    if x_k.shape != s_k.shape:
        raise ValueError(f"shape mismatch: {x_k.shape} vs {s_k.shape}")
    return (x_k - multi_project(x_k - s_k, factors) + rho * s_k) / (1.0 + rho)


def f_step(s, lambda_f, beta_f, lam, rho):
    tau = lam / ((1.0 + rho) * beta_f)
    ds = diff_apply(s)
    return DiffField(*(soft_threshold(d + m / beta_f, tau) for d, m in zip(ds, lambda_f)))


def s_step(e, f, lambda_f, beta_f, denom):
    """Minimize the augmented Lagrangian over ``s`` for fixed ``f`` and multipliers."""
    rhs = 2.0 * np.asarray(e) + diff_adjoint(f.scale(beta_f) - lambda_f)
    return solve_s_step(rhs, denom)


def multiplier_and_beta_update(state, s_new, f_new, cfg):
    """Dual ascent on the multipliers and the adaptive penalty rule.

    The penalty grows by ``c1`` whenever the constraint residual failed to
    shrink by at least the factor ``c2`` since the previous sweep.
    """
    resid = f_new - diff_apply(s_new)
    err = resid.norm()
    lambda_f = state.lambda_f - resid.scale(cfg.gamma * state.beta_f)
    beta_f = state.beta_f * cfg.c1 if err >= cfg.c2 * state.err_prev else state.beta_f
    return AdmmState(s=s_new, f=f_new, lambda_f=lambda_f, beta_f=beta_f, err_prev=err)


def initial_beta(x_k):
    return 10.0 / max(float(np.mean(np.abs(x_k))), 1e-6)


def s_subproblem_objective(x_k, s, s_k, factors, lam, rho):
    """Value of the proximal foreground subproblem at ``s``."""
    fit = np.asarray(x_k) - s - multi_project(np.asarray(x_k) - s_k, factors)
    return fro_norm(fit) ** 2 + lam * tv1_norm(s) + rho * fro_norm(s - s_k) ** 2


def _reduced_objective(s, e, mu):
    return fro_norm(s - e) ** 2 + mu * tv1_norm(s)


def admm_tv(e, s0, lam, rho, beta0, cfg=AdmmConfig()):
    """Run ADMM on ``min ||s - e||^2 + lam / (1 + rho) ||D s||_1`` from `s0`.

    Returns the final state and the number of sweeps performed.
    """
    e = np.asarray(e, dtype=np.float64)
    dims = e.shape
    state = AdmmState(
        s=np.array(s0, dtype=np.float64),
        f=DiffField.zeros(dims),
        lambda_f=DiffField.zeros(dims),
        beta_f=beta0,
    )
    denoms = {}
    sweeps = 0
    while sweeps < cfg.max_iter:
        if state.beta_f not in denoms:
            denoms[state.beta_f] = spectral_denominator(dims, state.beta_f)
        f_new = f_step(state.s, state.lambda_f, state.beta_f, lam, rho)
        s_new = s_step(e, f_new, state.lambda_f, state.beta_f, denoms[state.beta_f])
        if not np.all(np.isfinite(s_new)):
            raise FloatingPointError("non-finite iterate in ADMM foreground solve")
        change = fro_norm(s_new - state.s) / max(1.0, fro_norm(state.s))
        state = multiplier_and_beta_update(state, s_new, f_new, cfg)
        sweeps += 1
        if change <= cfg.tol:
            break
    return state, sweeps


def solve_s_subproblem(x_k, s_k, factors, lam, rho, cfg=AdmmConfig(), full_output=False):
    """Approximately minimize the proximal foreground subproblem by ADMM.

    The iteration is warm-started at `s_k` with zero multipliers and a
    penalty of ``10 / mean(|x_k|)``. If the inexact ADMM result does not
    improve on `s_k`, `s_k` itself is returned, so the subproblem objective
    never increases.

    Returns the new foreground, plus an :class:`AdmmInfo` when
    `full_output` is true.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    s_k = np.asarray(s_k, dtype=np.float64)
    e = compute_e(x_k, s_k, factors, rho)
    mu = lam / (1.0 + rho)
    state, sweeps = admm_tv(e, s_k, lam, rho, initial_beta(x_k), cfg)
    s = state.s
    obj_start = _reduced_objective(s_k, e, mu)
    obj_end = _reduced_objective(s, e, mu)
    fallback = obj_end > obj_start
    if fallback:
        s = s_k.copy()
        obj_end = obj_start
    if not full_output:
        return s
    info = AdmmInfo(
        iterations=sweeps,
        primal_residual=(state.f - diff_apply(state.s)).norm(),
        beta_f=state.beta_f,
        objective_start=obj_start,
        objective_end=obj_end,
        fallback=fallback,
    )
    return s, info

