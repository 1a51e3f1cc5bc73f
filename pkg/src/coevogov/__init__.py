"""Governed coevolutionary optimization in two-player games.

A dual-fitness governance layer (anchored base fitness, sampled
generalization fitness, an adaptive gate between them, and a
threshold controller) wrapped around black-box search, with matrix
and Markov benchmark games, classical baselines, and a budgeted
multi-seed experiment harness.
"""

__version__ = "0.1.0"

from .config import default_config, load_config
from .harness import run_experiment, run_seed, write_run

__all__ = ["default_config", "load_config", "run_experiment", "run_seed", "write_run", "__version__"]
