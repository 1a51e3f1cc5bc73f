"""Publication-style figures from coevogov run CSVs.

Every script reads only the documented CSV schema (seed_*.csv and
aggregate.csv written by the experiment harness); there is no in-process
coupling to the experiment code. Each plot emits a PNG plus an
exported-series text file carrying the exact numbers that were drawn, for
regression checks without image diffing.
"""

__all__ = ["io", "kl_bands", "coop_panels", "profile_heatmap", "simplex_trajectory"]
