"""Isotropic-Gaussian search-distribution actuator.

Score-function gradient over antithetic perturbations, a fixed-rate mean
update with an optional extragradient (prediction-correction) step, and a
progress-gated, entropy-driven controller for the exploration scale sigma.
No Adam, no cumulative step-size adaptation: sigma smoothing is the only
adaptive element.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .games import params_to_strategy


@dataclass
class SearchDistribution:
    theta: np.ndarray
    sigma: float

    def __post_init__(self):
        self.theta = np.asarray(self.theta, float)
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass
class AecState:
    f_ema: float = 0.0
    initialized: bool = False
    alpha_ema: float = 0.1
    sigma_min: float = 0.01
    sigma_mid: float = 0.1
    sigma_max: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.alpha_ema <= 1.0:
            raise ValueError("alpha_ema must be in (0, 1]")
        if not 0.0 < self.sigma_min <= self.sigma_mid <= self.sigma_max:
            raise ValueError("need 0 < sigma_min <= sigma_mid <= sigma_max")


@dataclass(frozen=True)
class PerturbationBatch:
    eps: np.ndarray      # (n, d) standard-normal draws
    antithetic: bool

    def candidates(self, dist: SearchDistribution) -> np.ndarray:
        return dist.theta[None, :] + dist.sigma * self.eps


def sample_batch(dist: SearchDistribution, n: int, antithetic: bool, rng: np.random.Generator) -> PerturbationBatch:
    if n < 2:
        raise ValueError("batch size must be >= 2")
    if antithetic:
        if n % 2 != 0:
            raise ValueError("antithetic sampling needs an even batch size")
        half = rng.standard_normal((n // 2, dist.theta.size))
        eps = np.concatenate([half, -half], axis=0)
    else:
        eps = rng.standard_normal((n, dist.theta.size))
    return PerturbationBatch(eps=eps, antithetic=antithetic)


def nes_gradient(fs: np.ndarray, batch: PerturbationBatch, sigma: float, paired: bool = False) -> np.ndarray:
    """Score-function estimate g = (1/(N sigma)) sum f_j eps_j.

    Antithetic batches are always reduced in the mirrored-pair form
    (f+ - f-) eps / (N sigma): algebraically identical, and it cancels the
    mirrored draws exactly so constant fitness yields a gradient of 0.0.
    """
    fs = np.asarray(fs, float)
    n = batch.eps.shape[0]
    if fs.shape != (n,):
        raise ValueError("fitness vector length must match the batch")
    if paired and not batch.antithetic:
        raise ValueError("paired form requires an antithetic batch")
    if batch.antithetic:
        half = n // 2
        return (fs[:half] - fs[half:]) @ batch.eps[:half] / (n * sigma)
    return fs @ batch.eps / (n * sigma)


def mean_update(
    dist: SearchDistribution,
    g: np.ndarray,
    eta_theta: float,
    extragradient: bool = False,
    eval_fn=None,
) -> SearchDistribution:
    """theta += eta*g, or predict-then-correct when extragradient is on.

    eval_fn(theta_pred) must return a fresh gradient estimate at the
    predicted mean; the committed step uses that corrected gradient from
    the original mean.
    """
    if eta_theta <= 0:
        raise ValueError("eta_theta must be positive")
    if extragradient:
        if eval_fn is None:
            raise ValueError("extragradient update needs an eval_fn")
        theta_pred = dist.theta + eta_theta * np.asarray(g, float)
        g = eval_fn(theta_pred)
    # Box projection to [0, 1]^d. The clip-and-normalize strategy map makes
    # negative components gradient-dead, so an unbounded mean can saturate
    # far past the boundary and freeze there; every simplex point is still
    # reachable from inside the box.
    theta = np.clip(dist.theta + eta_theta * np.asarray(g, float), 0.0, 1.0)
    return replace(dist, theta=theta)


def policy_entropy_normalized(p: np.ndarray) -> float:
    """Shannon entropy of a simplex vector over its maximum log(d)."""
    p = np.clip(np.asarray(p, float), 1e-12, 1.0)
    h = -float(np.sum(p * np.log(p)))
    return h / np.log(p.size)


def aec_step(aec: AecState, mu_f: float, h_norm: float, sigma: float) -> tuple[AecState, float]:
    """Progress-gated sigma adaptation.

    On fitness progress (mu_f above the pre-update EMA baseline) the target
    anneals to sigma_min; on stagnation the target depends on policy
    entropy: wide exploration below 0.5 normalized entropy, moderate above.
    Sigma moves 10% of the way to the target each call. The EMA baseline
    initializes to the first observed mu_f, so the gate is off at first.
    """
    if not aec.initialized:
        progressed = False
        new_ema = mu_f
    else:
        progressed = mu_f > aec.f_ema
        new_ema = (1.0 - aec.alpha_ema) * aec.f_ema + aec.alpha_ema * mu_f
    if progressed:
        sigma_tar = aec.sigma_min
    elif h_norm < 0.5:
        sigma_tar = aec.sigma_max
    else:
        sigma_tar = aec.sigma_mid
    new_state = replace(aec, f_ema=new_ema, initialized=True)
    return new_state, 0.9 * sigma + 0.1 * sigma_tar


def entropy_of_params(theta: np.ndarray) -> float:
    """Normalized entropy of the clipped-and-normalized parameter vector."""
    return policy_entropy_normalized(params_to_strategy(theta))
