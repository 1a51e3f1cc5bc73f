"""Run configuration: defaults, JSON files, dotted-path overrides, run ids."""
from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

ALGORITHMS = ("mgm_e_nes", "pure_nes", "fp", "ogda", "pop_mgm", "pop_baseline_a", "pop_baseline_b")


def default_config() -> dict:
    return {
        "game": {"id": "rps", "d": 3, "bandwidth": None, "markov_eps": 0.01, "power_iters": 50,
                 "payoff_p1": None, "payoff_p2": None, "target_action": 0},
        "algorithm": "mgm_e_nes",
        "eval_budget": 32000,
        "log_every": 10,
        "init": {"theta_sigma": None},  # None -> 0.5 for 3-D RPS, 0.15 otherwise
        "nes": {"population": 50, "eta_theta": 0.3, "sigma_init": 0.15,
                "antithetic": True, "extragradient": False},
        "aec": {"alpha_ema": 0.1, "sigma_min": 0.01, "sigma_mid": 0.1, "sigma_max": 0.3},
        "dwam": {"omega": 0.9, "s": 100.0},
        "marker": {"archive_capacity": 10, "rollback_horizon": 5,
                   "keepcount_threshold": 5, "buffercount_threshold": 5},
        "controller": {"w_a": 1.0, "w_d": 1.0, "w_anchor_base": 0.5, "alpha_target": 0.7,
                       "kappa": 0.1, "tau": 0.05, "eta_l": 0.01, "gamma_max": 10.0,
                       "k_gamma": 1.05, "delta_stable": 1e-3, "l_init": 0.0},
        "coevo": {"rho": 0.25},
        "ga": {"population": 100, "elim_rate": 0.2, "mutation_sigma": 0.05, "mutation_rate": 0.1,
               "crossover_rate": 1.0, "l_u": -0.005, "hof_capacity": 20},
        "ogda": {"eta": 0.05, "fd_step": 1e-3},
        "dep": {"grad_tol": 1e-3, "window": 20},
        "player1": {},
        "player2": {},
    }


# Per-game tuned settings. Only the NES learning rate, exploration schedule,
# sampling ratio, and controller weights vary; everything else is shared.
# The three coordination games (stag_hunt, battle_of_sexes, markov_resource)
# deliberately share one preset: no task-specific retuning between them.
_COORDINATION_PRESET = {
    "nes": {"population": 20, "eta_theta": 0.2, "sigma_init": 2.0},
    "aec": {"sigma_min": 0.05, "sigma_mid": 0.2, "sigma_max": 0.5},
    "coevo": {"rho": 0.25},
    "controller": {"w_a": 1.0, "w_d": 0.1, "tau": 0.3, "eta_l": 0.04, "gamma_max": 1.0},
}

GAME_PRESETS: dict[str, dict] = {
    "rps": {
        "game": {"id": "rps", "d": 3},
        "nes": {"population": 8, "eta_theta": 0.0122, "sigma_init": 0.3},
        "aec": {"sigma_min": 0.005, "sigma_mid": 0.15, "sigma_max": 0.5},
        "coevo": {"rho": 0.25},
        "controller": {"w_a": 0.5, "w_d": 0.1, "tau": 0.3, "eta_l": 0.04, "gamma_max": 1.0},
    },
    "stag_hunt": {"game": {"id": "stag_hunt"}, **copy.deepcopy(_COORDINATION_PRESET)},
    "battle_of_sexes": {"game": {"id": "battle_of_sexes"}, **copy.deepcopy(_COORDINATION_PRESET)},
    "markov_resource": {"game": {"id": "markov_resource"}, **copy.deepcopy(_COORDINATION_PRESET)},
}


def preset_config(game_id: str) -> dict:
    """Defaults merged with the tuned per-game preset."""
    if game_id not in GAME_PRESETS:
        raise ValueError(f"no preset for game {game_id!r}; known: {sorted(GAME_PRESETS)}")
    return deep_merge(default_config(), GAME_PRESETS[game_id])


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path: str | Path | None = None, overrides: list[str] | None = None,
                preset: str | None = None) -> dict:
    cfg = preset_config(preset) if preset is not None else default_config()
    if path is not None:
        with open(path) as f:
            cfg = deep_merge(cfg, json.load(f))
    for item in overrides or []:
        key, _, raw = item.partition("=")
        if not _:
            raise ValueError(f"override {item!r} must look like key=value")
        set_dotted(cfg, key.strip(), parse_value(raw.strip()))
    validate_config(cfg)
    return cfg


def parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def set_dotted(cfg: dict, key: str, value) -> None:
    parts = key.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value


def get_dotted(cfg: dict, key: str, default=None):
    node = cfg
    for p in key.split("."):
        if not isinstance(node, dict) or p not in node:
            return default
        node = node[p]
    return node


def validate_config(cfg: dict) -> None:
    if cfg.get("algorithm") not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}")
    if not isinstance(cfg.get("eval_budget"), (int, float)) or cfg["eval_budget"] <= 0:
        raise ValueError("eval_budget must be positive")
    if cfg.get("log_every", 1) < 1:
        raise ValueError("log_every must be >= 1")
    rho = get_dotted(cfg, "coevo.rho")
    if not 0.0 < rho <= 1.0:
        raise ValueError("coevo.rho must be in (0, 1]")


def player_section(cfg: dict, section: str, player: int) -> dict:
    """Section dict with per-player overrides (player1.* / player2.*) applied."""
    base = cfg.get(section, {})
    override = cfg.get(f"player{player}", {}).get(section, {})
    return deep_merge(base, override)


def run_id(cfg: dict, seeds: list[int]) -> str:
    """Content hash of the config and seed set; stable across dict ordering."""
    payload = json.dumps({"config": cfg, "seeds": sorted(seeds)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]
