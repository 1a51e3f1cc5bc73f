"""Three-state resource Markov game.

States are ordered (Rich, Poor, Collapsed). Each player's stationary policy
is a vector of per-state cooperation probabilities. Scoring is analytic:
build the joint-action transition matrix, run power iteration for the
stationary distribution, and weight the stage payoffs by it. All functions
accept batches of policies along leading axes.
"""
from __future__ import annotations

import numpy as np

STATE_NAMES = ("rich", "poor", "collapsed")
RICH, POOR, COLLAPSED = 0, 1, 2

# Row player's stage payoffs, rows/cols ordered (C, D).
STAGE_MATRICES = np.array(
    [
        [[4.0, 0.0], [5.0, 1.0]],    # Rich
        [[2.0, 0.0], [3.0, 0.5]],    # Poor
        [[0.5, -0.5], [1.0, 0.0]],   # Collapsed
    ]
)

DEFAULT_TREMBLE = 0.01
POWER_ITERS = 50


def tremble(p: np.ndarray, eps: float = DEFAULT_TREMBLE) -> np.ndarray:
    """Trembling-hand perturbation toward the 50/50 action mix."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("tremble rate must be in [0, 1]")
    return (1.0 - eps) * np.asarray(p, float) + eps / 2.0


def build_transition(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Joint-action-induced transition matrix, shape (..., 3, 3).

    Rich degrades to Poor only under double defection; Poor recovers to Rich
    with probability 0.8 under double cooperation and collapses under double
    defection; Collapsed recovers to Poor with probability 0.2 under double
    cooperation. Rows sum to 1 by construction.
    """
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    m = np.zeros(p.shape[:-1] + (3, 3))
    dd_rich = (1.0 - p[..., RICH]) * (1.0 - q[..., RICH])
    m[..., 0, 1] = dd_rich
    m[..., 0, 0] = 1.0 - dd_rich
    cc_poor = p[..., POOR] * q[..., POOR]
    dd_poor = (1.0 - p[..., POOR]) * (1.0 - q[..., POOR])
    m[..., 1, 0] = 0.8 * cc_poor
    m[..., 1, 2] = dd_poor
    m[..., 1, 1] = 1.0 - 0.8 * cc_poor - dd_poor
    cc_coll = p[..., COLLAPSED] * q[..., COLLAPSED]
    m[..., 2, 1] = 0.2 * cc_coll
    m[..., 2, 2] = 1.0 - 0.2 * cc_coll
    return m


def stationary_distribution(m: np.ndarray, iters: int = POWER_ITERS) -> np.ndarray:
    """Power iteration from the uniform distribution, shape (..., 3)."""
    m = np.asarray(m, float)
    mu = np.full(m.shape[:-2] + (3,), 1.0 / 3.0)
    for _ in range(iters):
        mu = np.einsum("...i,...ij->...j", mu, m)
    return mu


def stationary_residual(m: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """L1 distance between mu and one more transition step; convergence check."""
    return np.abs(np.einsum("...i,...ij->...j", mu, m) - mu).sum(axis=-1)


def stage_payoffs(state: int, p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Expected stage payoffs in one state; symmetric game, so r2(p,q) = r1(q,p)."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    a = STAGE_MATRICES[state]
    pi_p = np.stack([p[..., state], 1.0 - p[..., state]], axis=-1)
    pi_q = np.stack([q[..., state], 1.0 - q[..., state]], axis=-1)
    r1 = np.einsum("...i,ij,...j->...", pi_p, a, pi_q)
    r2 = np.einsum("...i,ij,...j->...", pi_q, a, pi_p)
    return r1, r2


def score(
    p: np.ndarray,
    q: np.ndarray,
    eps: float = DEFAULT_TREMBLE,
    iters: int = POWER_ITERS,
) -> tuple[np.ndarray, np.ndarray]:
    """Stationary-weighted expected stage payoffs (J1, J2) for a policy pair.

    Trembling is applied here, at evaluation time; the stored policies stay
    un-perturbed. Accepts batched policies broadcast against each other.
    """
    pt = tremble(p, eps)
    qt = tremble(q, eps)
    pt, qt = np.broadcast_arrays(pt, qt)
    m = build_transition(pt, qt)
    mu = stationary_distribution(m, iters=iters)
    j1 = np.zeros(mu.shape[:-1])
    j2 = np.zeros(mu.shape[:-1])
    for s in range(3):
        r1, r2 = stage_payoffs(s, pt, qt)
        j1 = j1 + mu[..., s] * r1
        j2 = j2 + mu[..., s] * r2
    if j1.ndim == 0:
        return float(j1), float(j2)
    return j1, j2
