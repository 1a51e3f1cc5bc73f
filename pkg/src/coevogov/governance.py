"""Dual-fitness shaping and marker bookkeeping.

The gate weight alpha blends an individual's score against a persistent
reference opponent (base fitness) with its mean score against a sampled
slice of the live opponent pool (generalize fitness). Marker bookkeeping
covers the consecutive-success timing gate, opponent persistence counters,
the bounded FIFO elite archive, and the archive rollback step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DwamParams:
    omega: float = 0.9   # anchoring weight while below threshold
    s: float = 100.0     # transition sharpness of the gate

    def __post_init__(self):
        if not 0.5 < self.omega < 1.0:
            raise ValueError("omega must be in (0.5, 1)")
        if self.s <= 0:
            raise ValueError("s must be positive")


def dwam_alpha(b_hat, g_hat, l: float, params: DwamParams):
    """Gate weight in [0.5, omega]; vectorized over candidate arrays.

    Below threshold (beta < 0) the weight stays pinned at omega. Above it,
    the weight decays from omega toward 0.5 at a rate set by the
    generalization deficit delta = max(0, l - g_hat).
    """
    b = np.asarray(b_hat, float)
    g = np.asarray(g_hat, float)
    beta = b - l
    delta = np.maximum(0.0, l - g)
    decayed = params.omega - (params.omega - 0.5) * (1.0 - np.exp(-params.s * delta * np.maximum(beta, 0.0)))
    out = np.where(beta < 0.0, params.omega, decayed)
    return float(out) if out.ndim == 0 else out


def dwam_alpha_d1(b_hat, g_hat, l: float, params: DwamParams):
    """d(alpha)/d(beta) with the deficit delta held fixed; 0 on the flat branch."""
    b = np.asarray(b_hat, float)
    g = np.asarray(g_hat, float)
    beta = b - l
    delta = np.maximum(0.0, l - g)
    d1 = -(params.omega - 0.5) * params.s * delta * np.exp(-params.s * delta * np.maximum(beta, 0.0))
    out = np.where(beta < 0.0, 0.0, d1)
    return float(out) if out.ndim == 0 else out


def dwam_alpha_d2(b_hat, g_hat, l: float, params: DwamParams):
    """Second derivative of the gate in beta, delta held fixed."""
    b = np.asarray(b_hat, float)
    g = np.asarray(g_hat, float)
    beta = b - l
    delta = np.maximum(0.0, l - g)
    d2 = (params.omega - 0.5) * (params.s * delta) ** 2 * np.exp(-params.s * delta * np.maximum(beta, 0.0))
    out = np.where(beta < 0.0, 0.0, d2)
    return float(out) if out.ndim == 0 else out


def composite_fitness(b_hat, g_hat, alpha):
    return alpha * np.asarray(b_hat, float) + (1.0 - np.asarray(alpha, float)) * np.asarray(g_hat, float)


def update_keep_counts(prev_pop_ids, cur_pop_ids, counts: dict[int, int]) -> dict[int, int]:
    """Consecutive-survival counters: survivors increment, newcomers start at 1."""
    prev = set(prev_pop_ids)
    out: dict[int, int] = {}
    for i in cur_pop_ids:
        out[i] = counts.get(i, 0) + 1 if i in prev else 1
    return out


def buffer_tick(f_stat: float, l: float, buffer_count: int) -> int:
    """Consecutive-success counter: increments while the fitness statistic clears l."""
    return buffer_count + 1 if f_stat > l else 0


class NoEligibleCandidate(Exception):
    """Raised when no opponent satisfies the persistence threshold."""


def select_marker(candidates) -> int:
    """Lexicographic argmax over (keep_count, fitness); first seen wins exact ties."""
    best_id = None
    best_keep = -math.inf
    best_fit = -math.inf
    for cid, keep, fit in candidates:
        if keep > best_keep or (keep == best_keep and fit > best_fit):
            best_id, best_keep, best_fit = cid, keep, fit
    if best_id is None:
        raise NoEligibleCandidate("no eligible marker candidate")
    return best_id


def update_horizon_from_elimination(theta_rate: float) -> int:
    """Persistence horizon matched to the population refresh period, ceil(1/rate)."""
    if not 0.0 < theta_rate <= 1.0:
        raise ValueError("elimination rate must be in (0, 1]")
    return math.ceil(1.0 / theta_rate)


@dataclass
class MarkerState:
    """Per-player published marker plus its bounded FIFO elite archive."""

    marker: np.ndarray
    capacity: int = 10
    horizon: int = 5                      # consecutive successes before a rollback
    archive: list = field(default_factory=list)
    buffer_count: int = 0                 # generic timing-gate counter
    rollback_count: int = 0

    def __post_init__(self):
        if self.capacity < 0 or self.horizon < 1:
            raise ValueError("capacity must be >= 0 and horizon >= 1")


def archive_push(state: MarkerState, elite: np.ndarray) -> MarkerState:
    """Appends an elite; evicts the oldest entry past capacity."""
    if state.capacity > 0:
        state.archive.append(np.array(elite, float))
        if len(state.archive) > state.capacity:
            state.archive.pop(0)
    return state


def rollback_step(state: MarkerState, f_max: float, l: float, rng: np.random.Generator) -> MarkerState:
    """Archive rollback: after `horizon` consecutive clears of l, republish a
    uniformly sampled archive element as the marker."""
    state.rollback_count = buffer_tick(f_max, l, state.rollback_count)
    if state.rollback_count >= state.horizon and state.archive:
        state.marker = np.array(state.archive[int(rng.integers(len(state.archive)))], float)
        state.rollback_count = 0
    return state
