"""Matrix-form two-player games and the parameter-to-simplex policy mapping.

Conventions: player 1 chooses a row, player 2 a column. ``payoff_p1[i, j]``
is player 1's payoff for the pure profile (i, j); ``payoff_p2[i, j]`` is
player 2's payoff for the same profile, so both expected payoffs are the
bilinear forms x' P y over the two mixed strategies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIMPLEX_ATOL = 1e-9
CLIP_FLOOR = 1e-6


def validate_strategy(p: np.ndarray, atol: float = SIMPLEX_ATOL) -> np.ndarray:
    """Checks a vector lies on the probability simplex; returns it as float64."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("mixed strategy must be a vector of length >= 2")
    if np.any(p < -atol):
        raise ValueError("mixed strategy has negative entries")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"mixed strategy sums to {p.sum()}, not 1")
    return p


@dataclass(frozen=True)
class MatrixGame:
    payoff_p1: np.ndarray
    payoff_p2: np.ndarray
    is_zero_sum: bool = False
    nash_target: tuple[np.ndarray, np.ndarray] | None = None
    name: str = ""

    @property
    def dim(self) -> int:
        return self.payoff_p1.shape[0]

    def __post_init__(self):
        a, b = self.payoff_p1, self.payoff_p2
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("payoff matrices must be square and same shape")
        if self.is_zero_sum and np.max(np.abs(a + b)) > 1e-12:
            raise ValueError("zero-sum flag set but payoffs do not cancel")


@dataclass(frozen=True)
class PayoffBounds:
    u_min: float
    u_max: float
    eps: float = 1e-9

    def __post_init__(self):
        if self.u_min > self.u_max:
            raise ValueError("u_min must not exceed u_max")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


def make_rps(d: int = 3, bandwidth: int = 1) -> MatrixGame:
    """Banded circulant rock-paper-scissors over d actions.

    Action i loses to the next ``bandwidth`` actions cyclically above it and
    beats the ``bandwidth`` below, so for d=3, bandwidth=1 row 0 is
    (0, -1, +1): Rock loses to Paper and beats Scissors. The matrix is
    anti-symmetric and the uniform strategy is the unique Nash target.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("d must be odd and >= 3")
    if not 1 <= bandwidth <= (d - 1) // 2:
        raise ValueError("bandwidth must be in [1, (d-1)/2]")
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    fwd = (j - i) % d   # opponent action is "above" ours cyclically
    bwd = (i - j) % d
    a = np.where((fwd >= 1) & (fwd <= bandwidth), -1.0, 0.0)
    a += np.where((bwd >= 1) & (bwd <= bandwidth), 1.0, 0.0)
    uniform = np.full(d, 1.0 / d)
    return MatrixGame(
        payoff_p1=a,
        payoff_p2=-a,       # symmetric zero-sum: -A == A' here
        is_zero_sum=True,
        nash_target=(uniform, uniform.copy()),
        name=f"rps{d}",
    )


def make_stag_hunt() -> MatrixGame:
    """2x2 Stag Hunt, actions (Stag, Hare); mutual Stag is the payoff-dominant equilibrium."""
    p1 = np.array([[5.0, 0.0], [3.0, 2.0]])
    stag = np.array([1.0, 0.0])
    return MatrixGame(
        payoff_p1=p1,
        payoff_p2=p1.T.copy(),
        nash_target=(stag, stag.copy()),
        name="stag_hunt",
    )


def make_battle_of_sexes(
    payoff_p1: np.ndarray | None = None,
    payoff_p2: np.ndarray | None = None,
    target_action: int = 0,
) -> MatrixGame:
    """2x2 asymmetric coordination game; payoffs overridable via config."""
    p1 = np.array([[2.0, 0.0], [0.0, 1.0]]) if payoff_p1 is None else np.asarray(payoff_p1, float)
    p2 = np.array([[1.0, 0.0], [0.0, 2.0]]) if payoff_p2 is None else np.asarray(payoff_p2, float)
    target = np.zeros(2)
    target[target_action] = 1.0
    return MatrixGame(
        payoff_p1=p1,
        payoff_p2=p2,
        nash_target=(target, target.copy()),
        name="battle_of_sexes",
    )


def expected_payoff(game: MatrixGame, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.shape != (game.dim,) or y.shape != (game.dim,):
        raise ValueError("strategy dimension does not match the game")
    return float(x @ game.payoff_p1 @ y), float(x @ game.payoff_p2 @ y)


def normalize_payoff(u: float, bounds: PayoffBounds) -> float:
    """Affine rescale to [0, 1]; analysis/visualization paths only."""
    return (u - bounds.u_min) / (bounds.u_max - bounds.u_min + bounds.eps)


def params_to_strategy(theta: np.ndarray) -> np.ndarray:
    """Clip-and-normalize mapping from raw parameters to the simplex.

    Works on a single vector or a batch along the last axis. The clip floor
    guarantees strictly positive entries for arbitrary real input.
    """
    theta = np.asarray(theta, dtype=float)
    clipped = np.clip(theta, CLIP_FLOOR, 1.0)
    return clipped / clipped.sum(axis=-1, keepdims=True)
