"""Comparison algorithms over the shared game adapters.

PureNES strips the governance layer from the distribution regime; the
classical baselines are fictitious play (best response to empirical
opponent frequencies) and optimistic gradient ascent with Euclidean simplex
projection. Both classical methods have a corner-policy / finite-difference
variant for the Markov resource game.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .envs import MarkovEnv, MatrixEnv
from .nes import SearchDistribution, aec_step, entropy_of_params, mean_update, nes_gradient, sample_batch


# ---------------------------------------------------------------------------
# PureNES (governance ablation)


@dataclass(frozen=True)
class PureNesParams:
    population: int = 20
    eta_theta: float = 0.3
    antithetic: bool = True
    extragradient: bool = False


def pure_nes_generation(p1, p2, env, params: PureNesParams, rng: np.random.Generator) -> tuple[dict, dict]:
    """Synchronous step: each candidate scored by mean payoff vs the opponent batch."""
    players = (p1, p2)
    n = params.population
    batches = [sample_batch(pl.dist, n, params.antithetic, rng) for pl in players]
    cand_pols = [env.policies(batches[i].candidates(players[i].dist)) for i in range(2)]

    all_fits = [env.payoff_block(cand_pols[i], cand_pols[1 - i], players[i].role).mean(axis=1)
                for i in range(2)]
    grads = [nes_gradient(all_fits[i], batches[i], players[i].dist.sigma) for i in range(2)]

    if params.extragradient:
        # Coupled prediction-correction against the opponent's predicted cloud.
        preds = [np.clip(players[i].dist.theta + params.eta_theta * grads[i], 0.0, 1.0) for i in range(2)]
        fresh = [sample_batch(SearchDistribution(preds[i], players[i].dist.sigma),
                              n, params.antithetic, rng) for i in range(2)]
        fresh_pols = [env.policies(preds[i][None, :] + players[i].dist.sigma * fresh[i].eps)
                      for i in range(2)]
        for i, pl in enumerate(players):
            f2 = env.payoff_block(fresh_pols[i], fresh_pols[1 - i], pl.role).mean(axis=1)
            grads[i] = nes_gradient(f2, fresh[i], pl.dist.sigma)

    records = []
    for i, pl in enumerate(players):
        fits = all_fits[i]
        new_dist = mean_update(pl.dist, grads[i], params.eta_theta)
        pl.aec, new_sigma = aec_step(pl.aec, float(fits.mean()), entropy_of_params(new_dist.theta),
                                     new_dist.sigma)
        pl.dist = SearchDistribution(new_dist.theta, new_sigma)
        records.append({
            "sigma": pl.dist.sigma,
            "f_mean": float(fits.mean()),
            "policy": env.policies(pl.dist.theta),
        })
    return records[0], records[1]


def generation_cost_pure_nes(params: PureNesParams) -> int:
    n = params.population
    per_player = n * n
    if params.extragradient:
        per_player *= 2
    return 2 * per_player


# ---------------------------------------------------------------------------
# Fictitious play


@dataclass
class FpState:
    counts_p1: np.ndarray
    counts_p2: np.ndarray
    t: int = 0

    @property
    def strategy_p1(self) -> np.ndarray:
        return self.counts_p1 / self.counts_p1.sum()

    @property
    def strategy_p2(self) -> np.ndarray:
        return self.counts_p2 / self.counts_p2.sum()


def fp_init(n_actions: int) -> FpState:
    # Unit pseudo-counts keep the first best response well-defined.
    return FpState(counts_p1=np.ones(n_actions), counts_p2=np.ones(n_actions))


def fp_step(state: FpState, env) -> FpState:
    """Both players best-respond (lowest index wins ties) to empirical frequencies."""
    if isinstance(env, MatrixEnv):
        eye = np.eye(env.dim)
        u1 = env.payoff_block(eye, state.strategy_p2[None, :], 0).ravel()
        u2 = env.payoff_block(eye, state.strategy_p1[None, :], 1).ravel()
    else:
        corners = markov_corner_policies()
        u1 = env.payoff_block(corners, corners, 0) @ state.strategy_p2
        u2 = env.payoff_block(corners, corners, 1) @ state.strategy_p1
    a1 = int(np.argmax(u1))
    a2 = int(np.argmax(u2))
    counts_p1 = state.counts_p1.copy()
    counts_p2 = state.counts_p2.copy()
    counts_p1[a1] += 1
    counts_p2[a2] += 1
    return FpState(counts_p1=counts_p1, counts_p2=counts_p2, t=state.t + 1)


def markov_corner_policies() -> np.ndarray:
    """The 8 deterministic per-state cooperation policies."""
    return np.array(list(itertools.product((0.0, 1.0), repeat=3)))


def fp_step_cost(env) -> int:
    if isinstance(env, MatrixEnv):
        return 2 * env.dim
    return 2 * 64  # 8 corner policies, all pairs, per player


# ---------------------------------------------------------------------------
# Optimistic gradient descent-ascent


@dataclass(frozen=True)
class OgdaState:
    x: np.ndarray
    y: np.ndarray
    prev_grad_x: np.ndarray
    prev_grad_y: np.ndarray
    eta: float


def ogda_init(x: np.ndarray, y: np.ndarray, eta: float) -> OgdaState:
    if eta <= 0:
        raise ValueError("eta must be positive")
    return OgdaState(x=np.asarray(x, float), y=np.asarray(y, float),
                     prev_grad_x=np.zeros_like(x, dtype=float),
                     prev_grad_y=np.zeros_like(y, dtype=float), eta=eta)


def simplex_projection(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    v = np.asarray(v, float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u - css / np.arange(1, v.size + 1) > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def ogda_step(state: OgdaState, env, fd_step: float = 1e-3) -> OgdaState:
    """Simultaneous optimistic ascent on each player's own payoff."""
    if isinstance(env, MatrixEnv):
        eye = np.eye(env.dim)
        grad_x = env.payoff_block(eye, state.y[None, :], 0).ravel()
        grad_y = env.payoff_block(eye, state.x[None, :], 1).ravel()
        x = simplex_projection(state.x + state.eta * (2.0 * grad_x - state.prev_grad_x))
        y = simplex_projection(state.y + state.eta * (2.0 * grad_y - state.prev_grad_y))
    else:
        grad_x = _markov_fd_grad(env, state.x, state.y, 0, fd_step)
        grad_y = _markov_fd_grad(env, state.y, state.x, 1, fd_step)
        x = np.clip(state.x + state.eta * (2.0 * grad_x - state.prev_grad_x), 0.0, 1.0)
        y = np.clip(state.y + state.eta * (2.0 * grad_y - state.prev_grad_y), 0.0, 1.0)
    return replace(state, x=x, y=y, prev_grad_x=grad_x, prev_grad_y=grad_y)


def _markov_fd_grad(env: MarkovEnv, own: np.ndarray, opp: np.ndarray, role: int, h: float) -> np.ndarray:
    grad = np.zeros_like(own)
    for i in range(own.size):
        hi = own.copy()
        lo = own.copy()
        hi[i] += h
        lo[i] -= h
        up = env.payoff_block(hi[None, :], opp[None, :], role)[0, 0]
        dn = env.payoff_block(lo[None, :], opp[None, :], role)[0, 0]
        grad[i] = (up - dn) / (2.0 * h)
    return grad


def ogda_step_cost(env) -> int:
    if isinstance(env, MatrixEnv):
        return 2 * env.dim
    return 2 * 6  # central differences over 3 policy parameters per player
