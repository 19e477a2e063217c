"""Entropy-regularized optimal transport solvers.

The plain solver scales a Gibbs kernel exp(-C/eta) with a fixed number of
alternating column/row normalizations; the proximal variant solves the
KL-penalized linearized step that structure refinement needs.  Both end on
a row normalization, so row marginals of every returned coupling are exact
to machine precision, and both switch to log-domain arithmetic when the
kernel underflows rather than ever returning NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

_UNDERFLOW = 1e-300


class InfeasibleCouplingError(ValueError):
    """Raised when a reference coupling cannot satisfy the marginals."""


@dataclass(frozen=True)
class Marginals:
    """Strictly positive row/column mass vectors, each summing to one."""

    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=np.float64))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=np.float64))
        for name, vec in (("mu", self.mu), ("nu", self.nu)):
            if vec.ndim != 1 or len(vec) < 1:
                raise ValueError(f"{name} must be a non-empty vector")
            if (vec <= 0).any():
                raise ValueError(f"{name} entries must be strictly positive")
            if abs(vec.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1 (got {vec.sum()!r})")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.mu), len(self.nu)


def uniform_marginals(m: int, n: int) -> Marginals:
    """Uniform mass 1/m over rows and 1/n over columns."""
    if m < 1 or n < 1:
        raise ValueError("marginal sizes must be >= 1")
    return Marginals(np.full(m, 1.0 / m), np.full(n, 1.0 / n))


def wd_objective(cost: np.ndarray, pi: np.ndarray) -> float:
    """Linear transport objective <cost, pi>, accumulated in float64."""
    cost = np.asarray(cost)
    pi = np.asarray(pi)
    if cost.shape != pi.shape:
        raise ValueError(f"shape mismatch: cost {cost.shape} vs coupling {pi.shape}")
    return float(np.einsum("ij,ij->", cost, pi, dtype=np.float64))


def _finish_rows(pi: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Final row normalization; row sums match mu at machine precision."""
    rows = pi.sum(axis=1)
    return pi * (mu / rows)[:, None]


def _scaled_rounds(K: np.ndarray, marg: Marginals, iters: int) -> np.ndarray | None:
    """Kernel-scaling rounds; None signals the caller to use the log domain."""
    u = np.ones(len(marg.mu))
    v = np.ones(len(marg.nu))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(iters):
            v = marg.nu / (K.T @ u)
            u = marg.mu / (K @ v)
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            return None
        pi = (u[:, None] * K) * v[None, :]
        rows = pi.sum(axis=1)
        if not np.isfinite(pi).all() or (rows < _UNDERFLOW).any():
            return None
    return _finish_rows(pi, marg.mu)


def _log_rounds(logK: np.ndarray, marg: Marginals, iters: int) -> np.ndarray:
    """Log-sum-exp rounds on log-kernel entries (finite or -inf)."""
    log_mu = np.log(marg.mu)
    log_nu = np.log(marg.nu)
    f = np.zeros(len(marg.mu))
    g = np.zeros(len(marg.nu))
    for _ in range(iters):
        g = log_nu - logsumexp(logK + f[:, None], axis=0)
        f = log_mu - logsumexp(logK + g[None, :], axis=1)
    pi = np.exp(f[:, None] + logK + g[None, :])
    return _finish_rows(pi, marg.mu)


def sinkhorn(cost: np.ndarray, marg: Marginals, eta: float = 0.1, iters: int = 10) -> np.ndarray:
    """Approximately solve min <cost, pi> + eta * sum(pi log pi) over couplings.

    Runs exactly ``iters`` column-then-row normalization rounds of the Gibbs
    kernel exp(-cost/eta); the iteration count is the convergence control, so
    runtime is deterministic.  Output rows sum to mu exactly (last operation
    is a row normalization); column sums converge with the iteration count.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if cost.shape != marg.shape:
        raise ValueError(f"cost shape {cost.shape} does not match marginals {marg.shape}")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix must be finite")

    logK = -cost / eta
    with np.errstate(over="ignore"):
        K = np.exp(logK)
    if K.sum(axis=1).min() >= _UNDERFLOW and K.sum(axis=0).min() >= _UNDERFLOW:
        pi = _scaled_rounds(K, marg, iters)
        if pi is not None:
            return pi
    return _log_rounds(logK, marg, iters)


def sinkhorn_prox(grad: np.ndarray, pi_ref: np.ndarray, beta: float,
                  marg: Marginals, iters: int = 10) -> np.ndarray:
    """Solve argmin <grad, pi> + (1/beta) * KL(pi || pi_ref) over couplings.

    Equivalent to Sinkhorn on the kernel pi_ref * exp(-beta * grad), so
    entries where pi_ref is zero stay zero.  A pi_ref row or column with no
    mass at all cannot meet its marginal and raises.
    """
    grad = np.asarray(grad, dtype=np.float64)
    pi_ref = np.asarray(pi_ref, dtype=np.float64)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if grad.shape != pi_ref.shape or grad.shape != marg.shape:
        raise ValueError("gradient, reference coupling, and marginals must agree in shape")
    if not np.isfinite(grad).all():
        raise ValueError("gradient must be finite")
    if (pi_ref.sum(axis=1) < _UNDERFLOW).any() or (pi_ref.sum(axis=0) < _UNDERFLOW).any():
        raise InfeasibleCouplingError("reference coupling has an empty row or column")

    with np.errstate(over="ignore"):
        K = pi_ref * np.exp(-beta * grad)
    if (np.isfinite(K).all()
            and K.sum(axis=1).min() >= _UNDERFLOW
            and K.sum(axis=0).min() >= _UNDERFLOW):
        pi = _scaled_rounds(K, marg, iters)
        if pi is not None:
            return pi
    with np.errstate(divide="ignore"):
        logK = np.log(pi_ref) - beta * grad
    return _log_rounds(logK, marg, iters)
