"""Proximal alternating minimization for smooth robust tensor completion.

The model recovers a video ``x`` (agreeing with the observations on the
mask) and splits it as ``x = l + s`` with ``l`` low multilinear rank and
``s`` smooth in the anisotropic TV sense, by minimizing::

    ||(x - s) - P_U(x - s)||_F^2 + lam * TV(s)

over orthonormal factors ``U``, the foreground ``s`` and the unobserved
entries of ``x``. Each block is updated with a proximal term of weight
``rho``; the factor updates are closed-form eigenproblems, the foreground
update is solved by ADMM and the completion step is closed-form.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .admm import AdmmConfig, solve_s_subproblem
from .metrics import rel_change
from .tensor import MODES, as_tensor, fro_norm, multi_project
from .tucker import build_phi, build_psi, check_factors, hosvd_init, projector_distance, top_eigvectors
from .tv import tv1_norm


def default_ranks(dims):
    """``(ceil(0.8 H), ceil(0.8 W), 1)``."""
    h, w, _ = dims
    return (math.ceil(0.8 * h), math.ceil(0.8 * w), 1)


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.5
    rho: float = 0.001
    ranks: tuple = None
    outer_tol: float = 1e-6
    outer_max_iter: int = 50
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    scale: float = 255.0
    seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.outer_max_iter < 1:
            raise ValueError(f"outer_max_iter must be at least 1, got {self.outer_max_iter}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if not self.outer_tol >= 0:
            raise ValueError(f"outer_tol must be nonnegative, got {self.outer_tol}")
        if self.ranks is not None:
            ranks = tuple(int(r) for r in self.ranks)
            if len(ranks) != 3 or min(ranks) < 1:
                raise ValueError(f"ranks must be three positive integers, got {self.ranks}")
            object.__setattr__(self, "ranks", ranks)

    def resolve_ranks(self, dims):
        ranks = default_ranks(dims) if self.ranks is None else self.ranks
        for n, (r, d) in enumerate(zip(ranks, dims), start=1):
            if r > d:
                raise ValueError(f"rank {r} for mode {n} exceeds dimension {d}")
        return ranks


TRACE_FIELDS = (
    "objective",
    "relchg_x",
    "relchg_s",
    "relchg_l",
    "relchg_u1",
    "relchg_u2",
    "relchg_u3",
    "literal_fit_criterion",
    "inner_iters",
    "elapsed_seconds",
)


@dataclass
class SolveTrace:
    """Per-iteration diagnostics; entry ``k`` describes outer iteration ``k + 1``."""

    initial_objective: float = math.nan
    objective: list = field(default_factory=list)
    relchg_x: list = field(default_factory=list)
    relchg_s: list = field(default_factory=list)
    relchg_l: list = field(default_factory=list)
    relchg_u1: list = field(default_factory=list)
    relchg_u2: list = field(default_factory=list)
    relchg_u3: list = field(default_factory=list)
    literal_fit_criterion: list = field(default_factory=list)
    inner_iters: list = field(default_factory=list)
    elapsed_seconds: list = field(default_factory=list)

    def __len__(self):
        return len(self.objective)

    def append(self, **row):
        for name in TRACE_FIELDS:
            getattr(self, name).append(row[name])

    def rows(self):
        for k in range(len(self)):
            yield {name: getattr(self, name)[k] for name in TRACE_FIELDS}


@dataclass
class SolveResult:
    x: np.ndarray
    s: np.ndarray
    l: np.ndarray
    factors: tuple
    trace: SolveTrace
    converged: bool


def objective(factors, s, x, lam):
    """``||(x - s) - P_U(x - s)||_F^2 + lam * TV(s)``."""
    r = np.asarray(x) - np.asarray(s)
    return fro_norm(r - multi_project(r, factors)) ** 2 + lam * tv1_norm(s)


def update_factors(x_k, s_k, factors, rho):
    """One sweep of proximal factor updates, modes 1, 2, 3 in order.

    Mode ``n`` sees the already-updated factors of modes ``< n``.
    """
    new = list(factors)
    for n in MODES:
        psi = build_psi(n, x_k, s_k, new)
        phi = build_phi(psi, factors[n - 1], rho)
        new[n - 1] = top_eigvectors(phi, factors[n - 1].shape[1])
    return tuple(new)


def update_x(x_k, s_next, factors_next, f, mask, rho):
    """Closed-form completion step.

    Observed entries are copied from `f`; unobserved entries become
    ``(s + P_U(x_k - s) + rho x_k) / (1 + rho)``.
    """
    x_k = np.asarray(x_k, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if x_k.shape != mask.shape or np.shape(f) != mask.shape or np.shape(s_next) != mask.shape:
        raise ValueError("x, s, f and mask must share one shape")
    fitted = s_next + multi_project(x_k - s_next, factors_next)
    return np.where(mask, f, (fitted + rho * x_k) / (1.0 + rho))


def _literal_fit(x, f, mask):
    return fro_norm(np.where(mask, x - f, 0.0)) / max(1.0, fro_norm(np.where(mask, f, 0.0)))


def run(f, mask, cfg=SolverConfig(), init_factors=None, callback=None):
    """Solve the completion/separation problem for observed data `f`.

    Parameters
    ----------
    f : ndarray (H, W, T)
        Observed video; values off the mask are ignored.
    mask : bool ndarray (H, W, T)
        True where `f` is observed.
    cfg : SolverConfig
    init_factors : tuple of 3 ndarrays, optional
        Overrides the truncated-HOSVD initial factors.
    callback : callable, optional
        Called as ``callback(k, x, s, factors)`` after every outer iteration.

    The solver works on ``f / cfg.scale`` (8-bit video maps to [0, 1]) and
    scales the returned tensors back (observed entries of ``x`` are copied
    from `f` exactly); objective values in the trace and the
    tensors passed to `callback` are in the normalized units. The loop
    stops once the relative changes of ``x``, ``s`` and ``l`` all drop to
    ``cfg.outer_tol``, or after ``cfg.outer_max_iter`` iterations.
    """
    f = as_tensor(f)
    mask = np.asarray(mask)
    if mask.shape != f.shape:
        raise ValueError(f"mask shape {mask.shape} differs from data shape {f.shape}")
    mask = mask.astype(bool)
    if not mask.any():
        raise ValueError("mask has no observed entries")
    ranks = cfg.resolve_ranks(f.shape)

    f_raw = f
    f = np.where(mask, f / cfg.scale, 0.0)
    x = f.copy()
    if init_factors is None:
        factors, _ = hosvd_init(x, ranks)
    else:
        factors = check_factors(init_factors, f.shape)
        if tuple(u.shape[1] for u in factors) != ranks:
            raise ValueError(f"initial factor ranks differ from configured ranks {ranks}")
    l = multi_project(x, factors)
    s = x - l

    trace = SolveTrace(initial_objective=objective(factors, s, x, cfg.lam))
    converged = False
    start = time.perf_counter()
    for k in range(1, cfg.outer_max_iter + 1):
        new_factors = update_factors(x, s, factors, cfg.rho)
        new_s, info = solve_s_subproblem(
            x, s, new_factors, cfg.lam, cfg.rho, cfg.admm, full_output=True
        )
        new_x = update_x(x, new_s, new_factors, f, mask, cfg.rho)
        new_l = multi_project(new_x - new_s, new_factors)

        relchg = (rel_change(new_x, x), rel_change(new_s, s), rel_change(new_l, l))
        relchg_u = [
            projector_distance(u, v) / max(1.0, math.sqrt(v.shape[1]))
            for u, v in zip(new_factors, factors)
        ]
        trace.append(
            objective=objective(new_factors, new_s, new_x, cfg.lam),
            relchg_x=relchg[0],
            relchg_s=relchg[1],
            relchg_l=relchg[2],
            relchg_u1=relchg_u[0],
            relchg_u2=relchg_u[1],
            relchg_u3=relchg_u[2],
            literal_fit_criterion=_literal_fit(new_x, f, mask),
            inner_iters=info.iterations,
            elapsed_seconds=time.perf_counter() - start,
        )
        x, s, l, factors = new_x, new_s, new_l, new_factors
        if callback is not None:
            callback(k, x, s, factors)
        if max(relchg) <= cfg.outer_tol:
            converged = True
            break

    c = cfg.scale
    # observed entries come back bit-exact rather than through the rescaling
    x = np.where(mask, f_raw, c * x)
    return SolveResult(x=x, s=c * s, l=c * l, factors=factors, trace=trace, converged=converged)
