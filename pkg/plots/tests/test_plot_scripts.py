import numpy as np
import pytest

from coevoplots import coop_panels, kl_bands, profile_heatmap, simplex_trajectory
from coevoplots.io import export_series, read_csv_columns, read_series, series_path

SEED_HEADER = ("generation,evals_used,kl_p1,kl_p2,l_p1,l_p2,alpha_mean,"
               "sigma_p1,sigma_p2,d_proxy,fim,gamma,coop_rich,coop_poor,"
               "coop_collapsed,strategy_p1,strategy_p2")


def _seed_csv(path, strategies, kls=None, coops=None):
    """Minimal schema-conforming seed CSV; one row per entry."""
    rows = [SEED_HEADER]
    for i, s in enumerate(strategies):
        kl = "" if kls is None else repr(float(kls[i]))
        coop = ("", "", "")
        if coops is not None:
            coop = tuple(repr(float(c)) for c in coops[i])
        strat = ";".join(repr(float(x)) for x in s)
        rows.append(f"{i},{i * 10},{kl},{kl},,,,,,,,,"
                    f"{coop[0]},{coop[1]},{coop[2]},{strat},{strat}")
    path.write_text("\n".join(rows) + "\n")
    return path


def _agg_csv(path, cols):
    names = list(cols)
    rows = [",".join(names)]
    for i in range(len(cols[names[0]])):
        rows.append(",".join(repr(float(cols[n][i]))
                             if n not in ("generation", "evals_used")
                             else str(cols[n][i]) for n in names))
    path.write_text("\n".join(rows) + "\n")
    return path


def _single_seed_agg(path, kl):
    # aggregate of one stream: all band stats collapse onto the mean
    cols = {"generation": list(range(len(kl))),
            "evals_used": [10 * i for i in range(len(kl))]}
    for stat in ("mean", "p5", "p25", "p75", "p95"):
        cols[f"kl_p1_{stat}"] = list(kl)
    return _agg_csv(path, cols)


def test_series_roundtrip(tmp_path):
    out = tmp_path / "x.png"
    data = {"a": [1.0, None, 0.1 + 0.2], "b": [5.0, 6.0, 7.0]}
    export_series(out, data)
    back = read_series(series_path(out))
    assert back == data


def test_kl_bands_single_seed_zero_width(tmp_path):
    kl = [0.9, 0.4, 0.2, 0.05]
    agg = _single_seed_agg(tmp_path / "aggregate.csv", kl)
    out = tmp_path / "kl.png"
    assert kl_bands.main(["--input", str(agg), "--output", str(out)]) == 0
    assert out.exists()
    s = read_series(series_path(out))
    assert s["run0:kl_p1_p25"] == s["run0:kl_p1_p75"] == kl
    # monotone-decreasing input stays monotone in the drawn series
    assert np.all(np.diff(s["run0:kl_p1_mean"]) < 0)


def test_kl_bands_overlay_and_labels(tmp_path):
    a = _single_seed_agg(tmp_path / "a.csv", [0.9, 0.1])
    b = _single_seed_agg(tmp_path / "b.csv", [0.8, 0.2, 0.1])
    out = tmp_path / "kl.png"
    rc = kl_bands.main(["--input", str(a), "--input", str(b),
                        "--label", "mgm", "--label", "fp",
                        "--output", str(out)])
    assert rc == 0
    s = read_series(series_path(out))
    assert s["mgm:kl_p1_mean"] == [0.9, 0.1, None]  # padded to longest
    assert s["fp:kl_p1_mean"] == [0.8, 0.2, 0.1]


def test_kl_bands_missing_column_message(tmp_path, capsys):
    path = tmp_path / "agg.csv"
    _agg_csv(path, {"generation": [0], "evals_used": [0]})
    rc = kl_bands.main(["--input", str(path), "--output", str(tmp_path / "o.png")])
    assert rc == 1
    assert "kl_p1_mean" in capsys.readouterr().err


def test_kl_bands_missing_file(tmp_path, capsys):
    rc = kl_bands.main(["--input", str(tmp_path / "nope.csv"),
                        "--output", str(tmp_path / "o.png")])
    assert rc == 1
    assert "not found" in capsys.readouterr().err


def test_coop_panels_constant_input(tmp_path):
    cols = {"generation": [0, 1, 2], "evals_used": [0, 200, 400]}
    for state, v in (("coop_rich", 0.7), ("coop_poor", 0.7), ("coop_collapsed", 0.7)):
        for stat in ("mean", "p5", "p25", "p75", "p95"):
            cols[f"{state}_{stat}"] = [v, v, v]
    agg = _agg_csv(tmp_path / "aggregate.csv", cols)
    out = tmp_path / "coop.png"
    assert coop_panels.main(["--input", str(agg), "--output", str(out)]) == 0
    s = read_series(series_path(out))
    assert s["coop_poor_mean"] == [0.7, 0.7, 0.7]        # flat at the constant
    assert s["budget_pct"][0] == 0.0 and s["budget_pct"][-1] == 100.0


def test_coop_panels_missing_column(tmp_path, capsys):
    agg = _single_seed_agg(tmp_path / "aggregate.csv", [0.5])
    rc = coop_panels.main(["--input", str(agg), "--output", str(tmp_path / "o.png")])
    assert rc == 1
    assert "coop_rich_mean" in capsys.readouterr().err


def test_profile_heatmap_single_hot_cell(tmp_path):
    paths = [_seed_csv(tmp_path / f"seed_{i}.csv",
                       [np.array([0.5, 0.5]), np.array([1.0, 0.0])])
             for i in range(6)]
    out = tmp_path / "heat.png"
    argv = []
    for p in paths:
        argv += ["--input", str(p)]
    assert profile_heatmap.main(argv + ["--output", str(out), "--bins", "10"]) == 0
    s = read_series(series_path(out))
    assert s["p1"] == [1.0] * 6 and s["p2"] == [1.0] * 6
    hist, _, _ = np.histogram2d(s["p1"], s["p2"], bins=10, range=[[0, 1], [0, 1]])
    assert np.count_nonzero(hist) == 1 and hist.max() == 6


def test_profile_heatmap_action_out_of_range(tmp_path, capsys):
    p = _seed_csv(tmp_path / "seed_0.csv", [np.array([1.0, 0.0])])
    rc = profile_heatmap.main(["--input", str(p), "--output",
                               str(tmp_path / "o.png"), "--action", "5"])
    assert rc == 1
    assert "out of range" in capsys.readouterr().err


def test_simplex_uniform_is_centroid(tmp_path):
    u = np.full(3, 1.0 / 3.0)
    p = _seed_csv(tmp_path / "seed_0.csv", [u, u, u])
    out = tmp_path / "simplex.png"
    assert simplex_trajectory.main(["--input", str(p), "--output", str(out)]) == 0
    s = read_series(series_path(out))
    assert np.allclose(s["run0:x"], 0.5)
    assert np.allclose(s["run0:y"], np.sqrt(3.0) / 6.0)


def test_simplex_rejects_non_3d(tmp_path, capsys):
    p = _seed_csv(tmp_path / "seed_0.csv", [np.full(4, 0.25)])
    rc = simplex_trajectory.main(["--input", str(p),
                                  "--output", str(tmp_path / "o.png")])
    assert rc == 1
    assert "d=4" in capsys.readouterr().err


def test_scripts_deterministic_series(tmp_path):
    agg = _single_seed_agg(tmp_path / "aggregate.csv", [0.9, 0.4, 0.1])
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    kl_bands.main(["--input", str(agg), "--output", str(out1)])
    kl_bands.main(["--input", str(agg), "--output", str(out2)])
    assert series_path(out1).read_bytes() == series_path(out2).read_bytes()


def test_read_csv_columns_strategy_parsing(tmp_path):
    p = _seed_csv(tmp_path / "seed_0.csv", [np.array([0.25, 0.75])], kls=[0.5])
    cols = read_csv_columns(p)
    assert np.array_equal(cols["strategy_p1"][0], [0.25, 0.75])
    assert cols["kl_p1"] == [0.5]
    assert cols["l_p1"] == [None]
