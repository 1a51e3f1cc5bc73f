"""Evaluation adapters bridging search parameters to game payoffs.

Each adapter maps raw parameter vectors to policies, evaluates payoff
blocks for batches of policies, and charges every scalar payoff query to a
shared counter so budget accounting is uniform across algorithms.
"""
from __future__ import annotations

import numpy as np

from . import markov
from .games import MatrixGame, make_battle_of_sexes, make_rps, make_stag_hunt, params_to_strategy


class EvalCounter:
    """Counts scalar payoff queries (one bilinear form or one Markov score = 1)."""

    def __init__(self):
        self.count = 0

    def charge(self, n: int):
        self.count += int(n)


class MatrixEnv:
    """Two-player matrix game adapter; policies live on the simplex."""

    kind = "matrix"

    def __init__(self, game: MatrixGame, counter: EvalCounter | None = None):
        self.game = game
        self.counter = counter or EvalCounter()

    @property
    def dim(self) -> int:
        return self.game.dim

    def policies(self, thetas: np.ndarray) -> np.ndarray:
        return params_to_strategy(thetas)

    def _own_matrix(self, role: int) -> np.ndarray:
        # Payoff matrix from the acting player's perspective: rows index the
        # acting player's actions, columns the opponent's.
        return self.game.payoff_p1 if role == 0 else self.game.payoff_p2.T

    def payoff_block(self, pols: np.ndarray, opp_pols: np.ndarray, role: int) -> np.ndarray:
        """All-pairs payoffs, shape (m, n), from the acting player's side."""
        pols = np.atleast_2d(pols)
        opp_pols = np.atleast_2d(opp_pols)
        self.counter.charge(pols.shape[0] * opp_pols.shape[0])
        return pols @ self._own_matrix(role) @ opp_pols.T

    def payoff_pairs(self, pols: np.ndarray, opp_pols: np.ndarray, role: int) -> np.ndarray:
        """Row-wise payoffs: pols (m, d) vs opp_pols (m, k, d) -> (m, k)."""
        self.counter.charge(opp_pols.shape[0] * opp_pols.shape[1])
        return np.einsum("md,de,mke->mk", pols, self._own_matrix(role), opp_pols)

    def kl_target(self, role: int) -> np.ndarray | None:
        if self.game.nash_target is None:
            return None
        return self.game.nash_target[role]


class MarkovEnv:
    """Resource Markov game adapter; policies are per-state cooperation rates."""

    kind = "markov"
    dim = 3

    def __init__(self, eps: float = markov.DEFAULT_TREMBLE, power_iters: int = markov.POWER_ITERS,
                 counter: EvalCounter | None = None):
        self.eps = eps
        self.power_iters = power_iters
        self.counter = counter or EvalCounter()

    def policies(self, thetas: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(thetas, float), 0.0, 1.0)

    def payoff_block(self, pols: np.ndarray, opp_pols: np.ndarray, role: int) -> np.ndarray:
        pols = np.atleast_2d(pols)
        opp_pols = np.atleast_2d(opp_pols)
        self.counter.charge(pols.shape[0] * opp_pols.shape[0])
        j1, _ = markov.score(pols[:, None, :], opp_pols[None, :, :], eps=self.eps, iters=self.power_iters)
        return j1

    def payoff_pairs(self, pols: np.ndarray, opp_pols: np.ndarray, role: int) -> np.ndarray:
        self.counter.charge(opp_pols.shape[0] * opp_pols.shape[1])
        j1, _ = markov.score(pols[:, None, :], opp_pols, eps=self.eps, iters=self.power_iters)
        return j1

    def kl_target(self, role: int) -> None:
        return None


GAME_IDS = ("rps", "stag_hunt", "battle_of_sexes", "markov_resource")


def make_env(game_cfg: dict, counter: EvalCounter | None = None):
    """Builds an adapter from the config "game" section."""
    gid = game_cfg.get("id", "rps")
    if gid == "rps":
        d = int(game_cfg.get("d", 3))
        default_bw = (d - 1) // 2 if d < 100 else 5
        bandwidth = int(game_cfg.get("bandwidth") or default_bw)
        return MatrixEnv(make_rps(d, bandwidth), counter)
    if gid == "stag_hunt":
        return MatrixEnv(make_stag_hunt(), counter)
    if gid == "battle_of_sexes":
        return MatrixEnv(
            make_battle_of_sexes(
                payoff_p1=game_cfg.get("payoff_p1"),
                payoff_p2=game_cfg.get("payoff_p2"),
                target_action=int(game_cfg.get("target_action", 0)),
            ),
            counter,
        )
    if gid == "markov_resource":
        return MarkovEnv(
            eps=float(game_cfg.get("markov_eps", markov.DEFAULT_TREMBLE)),
            power_iters=int(game_cfg.get("power_iters", markov.POWER_ITERS)),
            counter=counter,
        )
    raise ValueError(f"unknown game id {gid!r}; known: {GAME_IDS}")
