import numpy as np
import pytest

from coevogov import metrics
from coevogov.metrics import (
    CSV_COLUMNS,
    GenerationRecord,
    aggregate,
    aggregate_to_csv,
    kl_divergence,
    kl_reduction,
    mean_strategy,
    parse_csv,
    records_to_csv,
)


def test_kl_self_is_zero():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = rng.dirichlet(np.ones(4))
        assert kl_divergence(p, p) == 0.0


def test_kl_pure_vs_uniform():
    pure = np.array([1.0, 0.0, 0.0])
    uniform = np.full(3, 1 / 3)
    assert kl_divergence(pure, uniform) == pytest.approx(np.log(3.0), abs=1e-9)


def test_kl_nonnegative_and_shape_check():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = rng.dirichlet(np.ones(3))
        q = rng.dirichlet(np.ones(3))
        assert kl_divergence(p, q) >= 0.0
    with pytest.raises(ValueError):
        kl_divergence(np.ones(3) / 3, np.ones(4) / 4)


def test_kl_floor_handles_zeros():
    assert np.isfinite(kl_divergence(np.array([1.0, 0.0]), np.array([0.0, 1.0])))


def test_mean_strategy():
    out = mean_strategy([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
    assert np.allclose(out, [0.5, 0.5])
    with pytest.raises(ValueError):
        mean_strategy([])


def test_csv_header_is_pinned():
    text = records_to_csv([])
    assert text.splitlines()[0] == (
        "generation,evals_used,kl_p1,kl_p2,l_p1,l_p2,alpha_mean,sigma_p1,sigma_p2,"
        "d_proxy,fim,gamma,coop_rich,coop_poor,coop_collapsed,strategy_p1,strategy_p2"
    )


def test_csv_roundtrip_bit_exact():
    rng = np.random.default_rng(2)
    records = [
        GenerationRecord(
            generation=g,
            evals_used=g * 100,
            kl_p1=float(rng.random()),
            kl_p2=float(rng.random()),
            l_p1=float(rng.normal()),
            sigma_p1=float(rng.random()),
            strategy_p1=rng.dirichlet(np.ones(3)),
            strategy_p2=rng.dirichlet(np.ones(3)),
        )
        for g in range(5)
    ]
    cols = parse_csv(records_to_csv(records))
    for i, r in enumerate(records):
        assert cols["generation"][i] == r.generation
        assert cols["kl_p1"][i] == r.kl_p1            # repr round-trip, no loss
        assert cols["l_p1"][i] == r.l_p1
        assert cols["l_p2"][i] is None                # absent -> empty -> None
        assert np.array_equal(cols["strategy_p1"][i], r.strategy_p1)


def test_nan_serializes_as_empty():
    r = GenerationRecord(generation=0, evals_used=0, kl_p1=float("nan"))
    row = r.to_row()
    assert row[CSV_COLUMNS.index("kl_p1")] == ""


def test_aggregate_single_stream_zero_width_bands():
    stream = {"generation": [0, 1], "evals_used": [0, 10],
              "kl_p1": [0.5, 0.25], "kl_p2": [None, None]}
    agg = aggregate([stream])
    assert agg["kl_p1_mean"] == [0.5, 0.25]
    assert agg["kl_p1_p5"] == agg["kl_p1_p95"] == [0.5, 0.25]
    assert "kl_p2_mean" not in agg  # all-empty column skipped


def test_aggregate_percentiles():
    streams = [{"generation": [0], "evals_used": [0], "kl_p1": [float(v)]}
               for v in range(1, 5)]
    agg = aggregate(streams)
    assert agg["kl_p1_mean"] == [2.5]
    assert agg["kl_p1_p25"] == [pytest.approx(1.75)]
    assert agg["kl_p1_p75"] == [pytest.approx(3.25)]


def test_aggregate_misaligned_grids_rejected():
    a = {"generation": [0, 1], "evals_used": [0, 1], "kl_p1": [1.0, 2.0]}
    b = {"generation": [0, 2], "evals_used": [0, 1], "kl_p1": [1.0, 2.0]}
    with pytest.raises(ValueError):
        aggregate([a, b])
    with pytest.raises(ValueError):
        aggregate([])


def test_aggregate_csv_roundtrip():
    stream = {"generation": [0, 1], "evals_used": [0, 10], "kl_p1": [0.5, 0.25]}
    agg = aggregate([stream])
    text = aggregate_to_csv(agg)
    cols = parse_csv(text)
    assert cols["kl_p1_mean"] == [0.5, 0.25]


def test_kl_reduction():
    assert kl_reduction([1.0, 0.5, 0.2]) == pytest.approx(-0.8)
    assert kl_reduction([None, 1.0, None, 3.0]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        kl_reduction([None, None])
