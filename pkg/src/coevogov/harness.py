"""Multi-seed experiment runner with payoff-query budget accounting.

One payoff query is one bilinear-form evaluation (matrix games) or one
stationary-weighted score (Markov game); every algorithm draws from the
same budget through the shared adapter counter. Each seed runs its own
generator, so seeds are order- and schedule-independent.
"""
from __future__ import annotations

import json
import multiprocessing
from pathlib import Path

import numpy as np

from . import baselines, coevolution, metrics
from .config import player_section, run_id, validate_config
from .controller import ControllerParams, ControllerState
from .coevolution import GaParams, MgmENesParams, PlayerRuntime, PopulationRuntime
from .envs import EvalCounter, MarkovEnv, MatrixEnv, make_env
from .governance import DwamParams, MarkerState
from .metrics import GenerationRecord
from .nes import AecState, SearchDistribution


def initial_theta_sigma(cfg: dict) -> float:
    ts = cfg["init"].get("theta_sigma")
    if ts is not None:
        return float(ts)
    game = cfg["game"]
    if game.get("id") == "rps" and int(game.get("d", 3)) == 3:
        return 0.5
    return 0.15


def _aec_state(cfg: dict, player: int) -> AecState:
    sec = player_section(cfg, "aec", player)
    return AecState(alpha_ema=sec["alpha_ema"], sigma_min=sec["sigma_min"],
                    sigma_mid=sec["sigma_mid"], sigma_max=sec["sigma_max"])


def _controller_params(cfg: dict) -> ControllerParams:
    c = cfg["controller"]
    return ControllerParams(w_a=c["w_a"], w_d=c["w_d"], w_anchor_base=c["w_anchor_base"],
                            alpha_target=c["alpha_target"], kappa=c["kappa"], tau=c["tau"],
                            eta_l=c["eta_l"], gamma_max=c["gamma_max"], k_gamma=c["k_gamma"],
                            delta_stable=c["delta_stable"])


def _mgm_params(cfg: dict) -> MgmENesParams:
    nes = cfg["nes"]
    return MgmENesParams(population=int(nes["population"]), eta_theta=float(nes["eta_theta"]),
                         antithetic=bool(nes["antithetic"]), extragradient=bool(nes["extragradient"]),
                         rho=float(cfg["coevo"]["rho"]),
                         dwam=DwamParams(omega=cfg["dwam"]["omega"], s=cfg["dwam"]["s"]),
                         controller=_controller_params(cfg))


def _ga_params(cfg: dict, mode: str) -> GaParams:
    ga = cfg["ga"]
    return GaParams(population=int(ga["population"]), elim_rate=float(ga["elim_rate"]),
                    mutation_sigma=float(ga["mutation_sigma"]), mutation_rate=float(ga["mutation_rate"]),
                    crossover_rate=float(ga["crossover_rate"]), rho=float(cfg["coevo"]["rho"]),
                    l_u=float(ga["l_u"]),
                    keepcount_threshold=int(cfg["marker"]["keepcount_threshold"]),
                    buffercount_threshold=int(cfg["marker"]["buffercount_threshold"]),
                    hof_capacity=int(ga["hof_capacity"]),
                    mode=mode,
                    dwam=DwamParams(omega=cfg["dwam"]["omega"], s=cfg["dwam"]["s"]))


def _init_players(cfg: dict, env, rng: np.random.Generator) -> list[PlayerRuntime]:
    ts = initial_theta_sigma(cfg)
    players = []
    for i in (1, 2):
        theta = rng.normal(0.0, ts, env.dim)
        nes_sec = player_section(cfg, "nes", i)
        ctrl_sec = player_section(cfg, "controller", i)
        marker = MarkerState(marker=theta.copy(),
                             capacity=int(cfg["marker"]["archive_capacity"]),
                             horizon=int(cfg["marker"]["rollback_horizon"]))
        players.append(PlayerRuntime(
            dist=SearchDistribution(theta, float(nes_sec["sigma_init"])),
            aec=_aec_state(cfg, i),
            marker_state=marker,
            controller=ControllerState(l=float(ctrl_sec["l_init"])),
            role=i - 1,
        ))
    return players


def _kl_or_none(env, policy: np.ndarray, role: int) -> float | None:
    target = env.kl_target(role)
    if target is None:
        return None
    return metrics.kl_divergence(policy, target)


def _coop_fields(env, pol1: np.ndarray, pol2: np.ndarray) -> dict:
    if not isinstance(env, MarkovEnv):
        return {}
    mean_pol = 0.5 * (pol1 + pol2)
    return {"coop_rich": float(mean_pol[0]), "coop_poor": float(mean_pol[1]),
            "coop_collapsed": float(mean_pol[2])}


def _dist_record(env, gen: int, evals: int, pol1, pol2, extra: dict | None = None) -> GenerationRecord:
    extra = extra or {}
    return GenerationRecord(
        generation=gen, evals_used=evals,
        kl_p1=_kl_or_none(env, pol1, 0), kl_p2=_kl_or_none(env, pol2, 1),
        strategy_p1=np.asarray(pol1, float), strategy_p2=np.asarray(pol2, float),
        **_coop_fields(env, np.asarray(pol1, float), np.asarray(pol2, float)),
        **extra,
    )


def run_seed(cfg: dict, seed: int) -> list[GenerationRecord]:
    """Runs one seed to budget exhaustion and returns its record stream."""
    validate_config(cfg)
    counter = EvalCounter()
    env = make_env(cfg["game"], counter)
    rng = np.random.default_rng(seed)
    algorithm = cfg["algorithm"]
    budget = int(cfg["eval_budget"])
    log_every = int(cfg["log_every"])

    if algorithm in ("mgm_e_nes", "pure_nes"):
        return _run_distribution(cfg, env, counter, rng, algorithm, budget, log_every)
    if algorithm in ("pop_mgm", "pop_baseline_a", "pop_baseline_b"):
        mode = {"pop_mgm": "mgm", "pop_baseline_a": "baseline_a", "pop_baseline_b": "baseline_b"}[algorithm]
        return _run_population(cfg, env, counter, rng, mode, budget, log_every)
    if algorithm == "fp":
        return _run_fp(cfg, env, counter, rng, budget, log_every)
    if algorithm == "ogda":
        return _run_ogda(cfg, env, counter, rng, budget, log_every)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _budget_loop(budget, log_every, counter, cost_fn, step_fn, record_fn, records):
    gen = 0
    last_logged = 0
    while counter.count + cost_fn(gen) <= budget:
        gen += 1
        out = step_fn()
        if gen % log_every == 0:
            records.append(record_fn(gen, out))
            last_logged = gen
    if gen > 0 and last_logged != gen:
        records.append(record_fn(gen, out))
    return records


def _run_distribution(cfg, env, counter, rng, algorithm, budget, log_every):
    players = _init_players(cfg, env, rng)
    mgm = algorithm == "mgm_e_nes"
    if mgm:
        params = _mgm_params(cfg)
        cost = lambda g: coevolution.generation_cost_mgm_e_nes(params)
        step = lambda: coevolution.mgm_e_nes_generation(players[0], players[1], env, params, rng)
    else:
        nes_sec = cfg["nes"]
        params = baselines.PureNesParams(population=int(nes_sec["population"]),
                                         eta_theta=float(nes_sec["eta_theta"]),
                                         antithetic=bool(nes_sec["antithetic"]),
                                         extragradient=bool(nes_sec["extragradient"]))
        cost = lambda g: baselines.generation_cost_pure_nes(params)
        step = lambda: baselines.pure_nes_generation(players[0], players[1], env, params, rng)

    def record(gen, out):
        r1, r2 = out
        extra = {"sigma_p1": r1["sigma"], "sigma_p2": r2["sigma"]}
        if mgm:
            extra.update({
                "l_p1": r1["l"], "l_p2": r2["l"],
                "alpha_mean": 0.5 * (r1["alpha_mean"] + r2["alpha_mean"]),
                "d_proxy": 0.5 * (r1["d_proxy"] + r2["d_proxy"]),
                "fim": 0.5 * (r1["fim"] + r2["fim"]),
                "gamma": 0.5 * (r1["gamma"] + r2["gamma"]),
            })
        return _dist_record(env, gen, counter.count, r1["policy"], r2["policy"], extra)

    pol0 = [env.policies(p.dist.theta) for p in players]
    init_extra = {"sigma_p1": players[0].dist.sigma, "sigma_p2": players[1].dist.sigma}
    if mgm:
        init_extra.update({"l_p1": players[0].controller.l, "l_p2": players[1].controller.l})
    records = [_dist_record(env, 0, 0, pol0[0], pol0[1], init_extra)]
    return _budget_loop(budget, log_every, counter, cost, step, record, records)


def _run_population(cfg, env, counter, rng, mode, budget, log_every):
    params = _ga_params(cfg, mode)
    n = params.population
    pop_a = coevolution.init_population(n, env.dim, rng, role=0)
    pop_b = coevolution.init_population(n, env.dim, rng, role=1)
    if mode == "mgm":
        # Initial markers: a random snapshot of the opposing population.
        ia, ib = int(rng.integers(n)), int(rng.integers(n))
        pop_a.marker_strategy = pop_b.strategies[ib].copy()
        pop_a.marker_id = int(pop_b.ids[ib])
        pop_b.marker_strategy = pop_a.strategies[ia].copy()
        pop_b.marker_id = int(pop_a.ids[ia])

    def record(gen, out):
        ra, rb = out
        sa, sb = ra["mean_strategy"], rb["mean_strategy"]
        extra = {}
        if mode == "mgm":
            extra = {"l_p1": ra["l"], "l_p2": rb["l"],
                     "alpha_mean": 0.5 * (ra["alpha_mean"] + rb["alpha_mean"])}
        return _dist_record(env, gen, counter.count, sa, sb, extra)

    sa0 = pop_a.strategies.mean(axis=0)
    sb0 = pop_b.strategies.mean(axis=0)
    records = [_dist_record(env, 0, 0, sa0, sb0)]
    cost = lambda g: coevolution.generation_cost_ga(params, g)
    step = lambda: coevolution.ga_generation(pop_a, pop_b, env, params, rng)
    return _budget_loop(budget, log_every, counter, cost, step, record, records)


def _fp_policies(env, state):
    if isinstance(env, MatrixEnv):
        return state.strategy_p1, state.strategy_p2
    corners = baselines.markov_corner_policies()
    return state.strategy_p1 @ corners, state.strategy_p2 @ corners


def _run_fp(cfg, env, counter, rng, budget, log_every):
    n_actions = env.dim if isinstance(env, MatrixEnv) else 8
    state = baselines.fp_init(n_actions)
    holder = {"state": state}

    def step():
        holder["state"] = baselines.fp_step(holder["state"], env)
        return holder["state"]

    def record(gen, out):
        p1, p2 = _fp_policies(env, out)
        return _dist_record(env, gen, counter.count, p1, p2)

    p1, p2 = _fp_policies(env, state)
    records = [_dist_record(env, 0, 0, p1, p2)]
    cost = lambda g: baselines.fp_step_cost(env)
    return _budget_loop(budget, log_every, counter, cost, step, record, records)


def _run_ogda(cfg, env, counter, rng, budget, log_every):
    ts = initial_theta_sigma(cfg)
    theta1 = rng.normal(0.0, ts, env.dim)
    theta2 = rng.normal(0.0, ts, env.dim)
    state = baselines.ogda_init(env.policies(theta1), env.policies(theta2), float(cfg["ogda"]["eta"]))
    holder = {"state": state}
    fd = float(cfg["ogda"]["fd_step"])

    def step():
        holder["state"] = baselines.ogda_step(holder["state"], env, fd_step=fd)
        return holder["state"]

    def record(gen, out):
        return _dist_record(env, gen, counter.count, out.x, out.y)

    records = [_dist_record(env, 0, 0, state.x, state.y)]
    cost = lambda g: baselines.ogda_step_cost(env)
    return _budget_loop(budget, log_every, counter, cost, step, record, records)


# ---------------------------------------------------------------------------
# Multi-seed driver and file layout


def _run_seed_json(args: tuple[str, int]) -> tuple[int, str]:
    cfg_json, seed = args
    records = run_seed(json.loads(cfg_json), seed)
    return seed, metrics.records_to_csv(records)


def run_experiment(cfg: dict, seeds: list[int], parallelism: int = 1) -> dict[int, str]:
    """Runs all seeds; returns {seed: csv_text}. Results are schedule-independent."""
    if not seeds:
        raise ValueError("need at least one seed")
    jobs = [(json.dumps(cfg), int(s)) for s in seeds]
    if parallelism > 1 and len(jobs) > 1:
        with multiprocessing.Pool(parallelism) as pool:
            results = pool.map(_run_seed_json, jobs)
    else:
        results = [_run_seed_json(j) for j in jobs]
    return dict(results)


def write_run(outdir: str | Path, cfg: dict, csv_by_seed: dict[int, str]) -> Path:
    """Writes seed CSVs, aggregate.csv, and the config snapshot under a run id."""
    rid = run_id(cfg, list(csv_by_seed))
    run_dir = Path(outdir) / rid
    run_dir.mkdir(parents=True, exist_ok=True)
    for seed, text in csv_by_seed.items():
        (run_dir / f"seed_{seed}.csv").write_text(text)
    streams = [metrics.parse_csv(text) for _, text in sorted(csv_by_seed.items())]
    agg = metrics.aggregate(streams)
    (run_dir / "aggregate.csv").write_text(metrics.aggregate_to_csv(agg))
    snapshot = {"config": cfg, "seeds": sorted(csv_by_seed)}
    (run_dir / "config.json").write_text(json.dumps(snapshot, indent=2, sort_keys=True))
    return run_dir
