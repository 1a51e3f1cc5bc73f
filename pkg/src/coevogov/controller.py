"""Scalar threshold controller.

Adapts the gate threshold l by a preconditioned gradient step on a smooth
control loss with three terms: a gate-occupancy term (mean alpha vs a
target), a dissipation term built from a divergence proxy with an adaptive
negative target, and an inertia-weighted anchor pulling l toward the mean
base fitness. The preconditioner is the variance of the base-generalize gap
plus a floor, so steps shrink when population statistics are noisy.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ControllerParams:
    w_a: float = 1.0
    w_d: float = 1.0
    w_anchor_base: float = 0.5
    alpha_target: float = 0.7
    kappa: float = 0.1
    tau: float = 0.05
    eta_l: float = 0.01
    gamma_max: float = 10.0
    k_gamma: float = 1.05
    delta_stable: float = 1e-3


@dataclass(frozen=True)
class ControllerState:
    l: float = 0.0
    gamma: float = 1.0
    prev_delta_l: float = 0.0
    prev_prev_delta_l: float = 0.0


@dataclass(frozen=True)
class ControllerInputs:
    b_hats: np.ndarray
    g_hats: np.ndarray
    alphas: np.ndarray
    alpha_d1s: np.ndarray
    alpha_d2s: np.ndarray


@dataclass(frozen=True)
class ControllerDiagnostics:
    a_val: float
    l_anchor: float
    d_val: float
    eps_val: float
    loss: float
    grad: float
    fim: float
    w_anchor_eff: float


def compute_a(alphas, alpha_target: float) -> float:
    alphas = np.asarray(alphas, float)
    if alphas.size == 0:
        raise ValueError("empty alpha vector")
    return float(alphas.mean() - alpha_target)


def divergence_proxy(b_hats, g_hats, alpha_d1s) -> float:
    """Gap-norm-scaled mean signed gate slope; negative means dissipative."""
    r = np.asarray(b_hats, float) - np.asarray(g_hats, float)
    return float(np.linalg.norm(r) * np.mean(np.sign(r) * np.asarray(alpha_d1s, float)))


def divergence_grad(b_hats, g_hats, alpha_d2s) -> float:
    """d(divergence proxy)/dl via the gate curvature."""
    r = np.asarray(b_hats, float) - np.asarray(g_hats, float)
    return float(-np.linalg.norm(r) * np.mean(np.sign(r) * np.asarray(alpha_d2s, float)))


def eps_target(d_val: float, kappa: float) -> float:
    """Adaptive negative target -kappa*|D|; enforces a sign preference, not a magnitude."""
    return -kappa * abs(d_val)


def fim_proxy(b_hats, g_hats, tau: float) -> float:
    """Population variance of the base-generalize gap plus tau^2 (always > 0)."""
    r = np.asarray(b_hats, float) - np.asarray(g_hats, float)
    return float(r.var()) + tau * tau


def control_loss_and_grad(
    state: ControllerState,
    params: ControllerParams,
    inputs: ControllerInputs,
    w_anchor_eff: float,
) -> tuple[float, float, ControllerDiagnostics]:
    """Loss and its analytic gradient in l.

    The gate derivatives are taken in the gate input beta with the deficit
    delta held fixed; the chain rule d(beta)/dl = -1 is applied here. The
    adaptive target contributes d(eps)/dl = -kappa*sign(D)*dD/dl, with the
    kink at D = 0 resolved to 0.
    """
    a_val = compute_a(inputs.alphas, params.alpha_target)
    da_dl = -float(np.mean(inputs.alpha_d1s))
    d_val = divergence_proxy(inputs.b_hats, inputs.g_hats, inputs.alpha_d1s)
    dd_dl = divergence_grad(inputs.b_hats, inputs.g_hats, inputs.alpha_d2s)
    eps_val = eps_target(d_val, params.kappa)
    deps_dl = -params.kappa * np.sign(d_val) * dd_dl
    l_anchor = float(np.mean(inputs.b_hats))
    resid = d_val - eps_val
    anchor_gap = state.l - l_anchor
    # float64 arithmetic: a runaway l must surface as inf, not an exception
    loss = (np.float64(params.w_a) * np.float64(a_val) ** 2
            + np.float64(params.w_d) * np.float64(resid) ** 2
            + np.float64(w_anchor_eff) * np.float64(anchor_gap) ** 2)
    grad = (
        2.0 * params.w_a * a_val * da_dl
        + 2.0 * params.w_d * resid * (dd_dl - deps_dl)
        + 2.0 * w_anchor_eff * anchor_gap
    )
    fim = fim_proxy(inputs.b_hats, inputs.g_hats, params.tau)
    diag = ControllerDiagnostics(
        a_val=a_val,
        l_anchor=l_anchor,
        d_val=d_val,
        eps_val=eps_val,
        loss=float(loss),
        grad=float(grad),
        fim=fim,
        w_anchor_eff=w_anchor_eff,
    )
    return float(loss), float(grad), diag


def inertia_update(state: ControllerState, params: ControllerParams, new_delta_l: float) -> float:
    """Inertia builds up while consecutive step sizes are steady, resets otherwise."""
    if abs(abs(new_delta_l) - abs(state.prev_delta_l)) <= params.delta_stable:
        return min(params.gamma_max, state.gamma * params.k_gamma)
    return 1.0


def controller_step(
    state: ControllerState,
    params: ControllerParams,
    inputs: ControllerInputs,
) -> tuple[ControllerState, ControllerDiagnostics]:
    w_anchor_eff = params.w_anchor_base * state.gamma
    _, grad, diag = control_loss_and_grad(state, params, inputs, w_anchor_eff)
    delta_l = -params.eta_l * grad / diag.fim
    new_gamma = inertia_update(state, params, delta_l)
    new_state = replace(
        state,
        l=state.l + delta_l,
        gamma=new_gamma,
        prev_delta_l=delta_l,
        prev_prev_delta_l=state.prev_delta_l,
    )
    return new_state, diag
