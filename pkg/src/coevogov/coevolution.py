"""Two coevolution regimes sharing the governance stack.

The distribution regime runs two search-distribution players through a
synchronous per-generation step: dual-fitness evaluation against the
opponent's published marker and a sampled slice of the opponent's fresh
candidate batch, a score-function mean update, sigma adaptation, elite
archiving, archive rollback, and a threshold-controller step per player.

The population regime is a two-population GA over simplex individuals with
arithmetic crossover, Gaussian mutation, worst-fraction elimination, and
marker selection gated by persistence and consecutive-success counters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerInputs, ControllerParams, ControllerState, controller_step
from .games import params_to_strategy
from .governance import (
    DwamParams,
    MarkerState,
    NoEligibleCandidate,
    archive_push,
    buffer_tick,
    composite_fitness,
    dwam_alpha,
    dwam_alpha_d1,
    dwam_alpha_d2,
    rollback_step,
    select_marker,
    update_keep_counts,
)
from .nes import AecState, SearchDistribution, aec_step, entropy_of_params, mean_update, nes_gradient, sample_batch


def sample_opponents(pool_size: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """k = ceil(rho * pool_size) distinct uniform indices, resampled per call."""
    if pool_size < 1:
        raise ValueError("opponent pool is empty")
    k = math.ceil(rho * pool_size)
    return rng.choice(pool_size, size=k, replace=False)


def _sample_opponent_rows(n_rows: int, pool_size: int, rho: float, rng: np.random.Generator,
                          mirrored: bool = False) -> np.ndarray:
    """Independent k-subsets for each of n_rows evaluees, shape (n_rows, k).

    With `mirrored`, row j + n/2 reuses row j's subset so an antithetic
    candidate pair faces the same opponents; the subset sampling noise then
    cancels exactly in the paired gradient estimator instead of setting a
    noise floor near an equilibrium.
    """
    k = math.ceil(rho * pool_size)
    if mirrored:
        if n_rows % 2 != 0:
            raise ValueError("mirrored subsets need an even row count")
        half = np.argsort(rng.random((n_rows // 2, pool_size)), axis=1)[:, :k]
        return np.concatenate([half, half], axis=0)
    return np.argsort(rng.random((n_rows, pool_size)), axis=1)[:, :k]


def eval_base(candidate_pol: np.ndarray, opponent_marker_pol: np.ndarray, env, role: int) -> float:
    """Raw payoff of one candidate against the opponent-published marker."""
    return float(env.payoff_block(candidate_pol[None, :], opponent_marker_pol[None, :], role)[0, 0])


def eval_gen(candidate_pol: np.ndarray, opponent_pool: np.ndarray, rho: float, env, role: int,
             rng: np.random.Generator) -> float:
    """Mean raw payoff against a freshly sampled opponent subset."""
    idx = sample_opponents(opponent_pool.shape[0], rho, rng)
    return float(env.payoff_block(candidate_pol[None, :], opponent_pool[idx], role).mean())


@dataclass
class PlayerRuntime:
    dist: SearchDistribution
    aec: AecState
    marker_state: MarkerState
    controller: ControllerState
    role: int


@dataclass(frozen=True)
class MgmENesParams:
    population: int = 20
    eta_theta: float = 0.3
    antithetic: bool = True
    extragradient: bool = False
    rho: float = 0.25
    dwam: DwamParams = field(default_factory=DwamParams)
    controller: ControllerParams = field(default_factory=ControllerParams)


def mgm_e_nes_generation(p1: PlayerRuntime, p2: PlayerRuntime, env, params: MgmENesParams,
                         rng: np.random.Generator) -> tuple[dict, dict]:
    """One synchronous double-sided generation; returns per-player diagnostics.

    Both players evaluate against the opponent's pre-update marker and
    candidate batch, then commit their updates, so the step is symmetric
    and order-independent.
    """
    players = (p1, p2)
    n = params.population
    batches = [sample_batch(pl.dist, n, params.antithetic, rng) for pl in players]
    cand_thetas = [batches[i].candidates(players[i].dist) for i in range(2)]
    cand_pols = [env.policies(cand_thetas[i]) for i in range(2)]
    marker_pols = [env.policies(pl.marker_state.marker) for pl in players]

    evals = []
    for i, pl in enumerate(players):
        opp = 1 - i
        b_hats = env.payoff_block(cand_pols[i], marker_pols[opp][None, :], pl.role).ravel()
        idx = _sample_opponent_rows(n, n, params.rho, rng, mirrored=params.antithetic)
        g_hats = env.payoff_pairs(cand_pols[i], cand_pols[opp][idx], pl.role).mean(axis=1)
        l = pl.controller.l
        alphas = dwam_alpha(b_hats, g_hats, l, params.dwam)
        fits = composite_fitness(b_hats, g_hats, alphas)
        evals.append((b_hats, g_hats, alphas, fits))

    grads = [nes_gradient(evals[i][3], batches[i], players[i].dist.sigma) for i in range(2)]

    if params.extragradient:
        # Coupled prediction-correction: both players predict, then each
        # re-estimates its gradient at the predicted mean against the
        # opponent's PREDICTED candidate cloud (markers stay old). The
        # stale-opponent variant gives no rotation damping.
        preds = [np.clip(players[i].dist.theta + params.eta_theta * grads[i], 0.0, 1.0) for i in range(2)]
        fresh = [sample_batch(SearchDistribution(preds[i], players[i].dist.sigma),
                              n, params.antithetic, rng) for i in range(2)]
        fresh_pols = [env.policies(preds[i][None, :] + players[i].dist.sigma * fresh[i].eps)
                      for i in range(2)]
        for i, pl in enumerate(players):
            l = pl.controller.l
            b2 = env.payoff_block(fresh_pols[i], marker_pols[1 - i][None, :], pl.role).ravel()
            idx2 = _sample_opponent_rows(n, n, params.rho, rng, mirrored=params.antithetic)
            g2 = env.payoff_pairs(fresh_pols[i], fresh_pols[1 - i][idx2], pl.role).mean(axis=1)
            a2 = dwam_alpha(b2, g2, l, params.dwam)
            grads[i] = nes_gradient(composite_fitness(b2, g2, a2), fresh[i], pl.dist.sigma)

    records = []
    for i, pl in enumerate(players):
        opp = 1 - i
        b_hats, g_hats, alphas, fits = evals[i]
        l = pl.controller.l
        new_dist = mean_update(pl.dist, grads[i], params.eta_theta)
        mu_f = float(fits.mean())
        pl.aec, new_sigma = aec_step(pl.aec, mu_f, entropy_of_params(new_dist.theta), new_dist.sigma)
        pl.dist = SearchDistribution(new_dist.theta, new_sigma)

        # Elite archiving: best generalizer among candidates clearing l.
        cleared = np.flatnonzero(fits > l)
        if cleared.size:
            elite = cleared[np.argmax(g_hats[cleared])]
            archive_push(pl.marker_state, cand_thetas[i][elite])

        # Marker generalization diagnostic (logged only, still budgeted).
        idx_m = sample_opponents(n, params.rho, rng)
        g_marker = float(env.payoff_block(marker_pols[i][None, :], cand_pols[opp][idx_m], pl.role).mean())

        f_max = float(fits.max())
        rollback_step(pl.marker_state, f_max, l, rng)
        inputs = ControllerInputs(
            b_hats=b_hats,
            g_hats=g_hats,
            alphas=np.asarray(alphas, float),
            alpha_d1s=np.asarray(dwam_alpha_d1(b_hats, g_hats, l, params.dwam), float),
            alpha_d2s=np.asarray(dwam_alpha_d2(b_hats, g_hats, l, params.dwam), float),
        )
        pl.controller, diag = controller_step(pl.controller, params.controller, inputs)

        records.append({
            "l": pl.controller.l,
            "sigma": pl.dist.sigma,
            "alpha_mean": float(np.mean(alphas)),
            "f_mean": mu_f,
            "f_max": f_max,
            "g_marker": g_marker,
            "d_proxy": diag.d_val,
            "fim": diag.fim,
            "gamma": pl.controller.gamma,
            "policy": env.policies(pl.dist.theta),
        })
    return records[0], records[1]


def generation_cost_mgm_e_nes(params: MgmENesParams) -> int:
    """Payoff queries per synchronous generation (both players)."""
    n = params.population
    k = math.ceil(params.rho * n)
    per_player = n * (1 + k) + k  # candidates + marker diagnostic
    if params.extragradient:
        per_player += n * (1 + k)
    return 2 * per_player


# ---------------------------------------------------------------------------
# Population-GA regime


@dataclass(frozen=True)
class GaParams:
    population: int = 100
    elim_rate: float = 0.2
    mutation_sigma: float = 0.05
    mutation_rate: float = 0.1
    crossover_rate: float = 1.0
    rho: float = 0.25
    l_u: float = -0.005
    keepcount_threshold: int = 5
    buffercount_threshold: int = 5
    hof_capacity: int = 20
    mode: str = "mgm"  # mgm | baseline_a | baseline_b
    dwam: DwamParams = field(default_factory=DwamParams)


@dataclass
class PopulationRuntime:
    strategies: np.ndarray            # (N, d) simplex rows
    ids: np.ndarray                   # (N,) unique ints
    next_id: int
    keep_counts: dict = field(default_factory=dict)
    marker_strategy: np.ndarray | None = None   # snapshot of an opponent individual
    marker_id: int | None = None
    buffer_count: int = 0
    hall_of_fame: list = field(default_factory=list)
    role: int = 0


def init_population(n: int, d: int, rng: np.random.Generator, role: int = 0) -> PopulationRuntime:
    strategies = rng.dirichlet(np.ones(d), size=n)
    ids = np.arange(n)
    keep = {int(i): 1 for i in ids}
    return PopulationRuntime(strategies=strategies, ids=ids, next_id=n, keep_counts=keep, role=role)


def _evaluate_population(pop: PopulationRuntime, opp: PopulationRuntime, env, params: GaParams,
                         rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (fitness, base, gen) vectors under the configured regime."""
    pols = env.policies(pop.strategies)
    opp_pols = env.policies(opp.strategies)
    idx = _sample_opponent_rows(len(pols), len(opp_pols), params.rho, rng)
    g_hats = env.payoff_pairs(pols, opp_pols[idx], pop.role).mean(axis=1)
    if params.mode == "mgm":
        b_hats = env.payoff_block(pols, pop.marker_strategy[None, :], pop.role).ravel()
        alphas = dwam_alpha(b_hats, g_hats, params.l_u, params.dwam)
        return composite_fitness(b_hats, g_hats, alphas), b_hats, g_hats
    if params.mode == "baseline_b" and pop.hall_of_fame:
        hof = env.policies(np.asarray(pop.hall_of_fame))
        hof_score = env.payoff_block(pols, hof, pop.role).mean(axis=1)
        return 0.5 * (g_hats + hof_score), g_hats, g_hats
    return g_hats, g_hats, g_hats


def _reproduce(pop: PopulationRuntime, fits: np.ndarray, params: GaParams,
               rng: np.random.Generator) -> PopulationRuntime:
    """Eliminate the worst fraction, refill by blend crossover + mutation."""
    n = len(pop.ids)
    n_out = math.ceil(params.elim_rate * n)
    order = np.argsort(-fits, kind="stable")
    survivors = order[: n - n_out]
    surv_strats = pop.strategies[survivors]
    surv_ids = pop.ids[survivors]

    parents = rng.integers(len(survivors), size=(n_out, 2))
    children = surv_strats[parents[:, 0]].copy()
    do_cross = rng.random(n_out) < params.crossover_rate
    blend = rng.random((n_out, 1))
    crossed = blend * surv_strats[parents[:, 0]] + (1.0 - blend) * surv_strats[parents[:, 1]]
    children[do_cross] = crossed[do_cross]
    do_mut = rng.random(n_out) < params.mutation_rate
    noise = rng.normal(0.0, params.mutation_sigma, size=children.shape)
    children[do_mut] += noise[do_mut]
    children = params_to_strategy(children)

    new_ids = np.arange(pop.next_id, pop.next_id + n_out)
    prev_ids = pop.ids
    pop.strategies = np.concatenate([surv_strats, children], axis=0)
    pop.ids = np.concatenate([surv_ids, new_ids])
    pop.next_id += n_out
    pop.keep_counts = update_keep_counts(prev_ids.tolist(), pop.ids.tolist(), pop.keep_counts)
    return pop


def _update_marker(pop: PopulationRuntime, opp: PopulationRuntime, fits_own: np.ndarray,
                   fits_opp: np.ndarray, opp_prev_ids: np.ndarray, params: GaParams) -> None:
    """Timing gate on own 75th-percentile fitness; pick from persistent opponents."""
    f75 = float(np.percentile(fits_own, 75))
    pop.buffer_count = buffer_tick(f75, params.l_u, pop.buffer_count)
    if pop.buffer_count < params.buffercount_threshold:
        return
    fit_by_id = {int(i): float(f) for i, f in zip(opp_prev_ids, fits_opp)}
    candidates = []
    for pos, cid in enumerate(opp.ids.tolist()):
        keep = opp.keep_counts.get(int(cid), 0)
        if keep >= params.keepcount_threshold and int(cid) in fit_by_id:
            candidates.append((pos, keep, fit_by_id[int(cid)]))
    try:
        pos = select_marker(candidates)
    except NoEligibleCandidate:
        return
    pop.marker_strategy = opp.strategies[pos].copy()
    pop.marker_id = int(opp.ids[pos])
    pop.buffer_count = 0


def ga_generation(pop_a: PopulationRuntime, pop_b: PopulationRuntime, env, params: GaParams,
                  rng: np.random.Generator) -> tuple[dict, dict]:
    """One synchronous generation of the two-population GA."""
    fits_a, base_a, gen_a = _evaluate_population(pop_a, pop_b, env, params, rng)
    fits_b, base_b, gen_b = _evaluate_population(pop_b, pop_a, env, params, rng)
    prev_ids_a, prev_ids_b = pop_a.ids.copy(), pop_b.ids.copy()

    if params.mode == "baseline_b":
        for pop, fits in ((pop_a, fits_a), (pop_b, fits_b)):
            pop.hall_of_fame.append(pop.strategies[int(np.argmax(fits))].copy())
            if len(pop.hall_of_fame) > params.hof_capacity:
                pop.hall_of_fame.pop(0)

    _reproduce(pop_a, fits_a, params, rng)
    _reproduce(pop_b, fits_b, params, rng)

    if params.mode == "mgm":
        _update_marker(pop_a, pop_b, fits_a, fits_b, prev_ids_b, params)
        _update_marker(pop_b, pop_a, fits_b, fits_a, prev_ids_a, params)

    def record(pop, fits, base, gen):
        return {
            "mean_strategy": pop.strategies.mean(axis=0),
            "f_mean": float(fits.mean()),
            "alpha_mean": float(np.mean(dwam_alpha(base, gen, params.l_u, params.dwam)))
            if params.mode == "mgm" else float("nan"),
            "l": params.l_u if params.mode == "mgm" else float("nan"),
        }

    return record(pop_a, fits_a, base_a, gen_a), record(pop_b, fits_b, base_b, gen_b)


def generation_cost_ga(params: GaParams, generation_index: int = 0) -> int:
    """Payoff queries per generation (both populations)."""
    n = params.population
    k = math.ceil(params.rho * n)
    if params.mode == "mgm":
        per_pop = n * (1 + k)
    elif params.mode == "baseline_b":
        hof = min(generation_index, params.hof_capacity)
        per_pop = n * k + n * hof
    else:
        per_pop = n * k
    return 2 * per_pop
