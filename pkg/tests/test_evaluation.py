import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from spectral_coarsen.coarsening import Partition
from spectral_coarsen.errors import BadConfig, SizeMismatch
from spectral_coarsen.evaluation import (
    CSV_COLUMNS,
    RecoveryRow,
    cell_seed,
    nmi,
    recovery_experiment,
    rows_to_csv,
    rows_to_json,
    table_grid,
)
from spectral_coarsen.sbm import SBMConfig


def test_nmi_examples():
    assert nmi([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0)
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-15)
    assert nmi([0, 0, 1, 1], [0, 0, 0, 0]) == 0.0
    assert nmi([0, 0, 0], [5, 5, 5]) == 1.0
    assert nmi(Partition([1, 1, 0]), [7, 7, 3]) == pytest.approx(1.0)
    with pytest.raises(SizeMismatch):
        nmi([0, 1], [0, 1, 1])


labels = st.lists(st.integers(0, 4), min_size=1, max_size=40)


@settings(max_examples=150, deadline=None)
@given(data=st.data(), a=labels)
def test_nmi_matches_sklearn(data, a):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    ours = nmi(a, b)
    ref = normalized_mutual_info_score(a, b, average_method="arithmetic")
    assert ours == pytest.approx(ref, abs=1e-10)
    assert ours == pytest.approx(nmi(b, a), abs=1e-12)
    assert 0.0 <= ours <= 1.0


def test_cell_seed_is_stable_and_distinct():
    assert cell_seed(0, 1, 2) == cell_seed(0, 1, 2)
    seeds = {cell_seed(b, c, r) for b in range(2) for c in range(3) for r in range(3)}
    assert len(seeds) == 18


def test_perfect_recovery():
    grid = [SBMConfig("associative", 1.0, 0.0, (5,) * 4)]
    rows = recovery_experiment(grid, ["sgc", "sc"], repeats=3)
    assert [r.method for r in rows] == ["sgc", "sc"]
    for r in rows:
        assert r.mean_nmi == pytest.approx(1.0) and r.std_nmi == pytest.approx(0.0, abs=1e-12)
        assert r.seeds == 3


def test_no_signal_scores_low():
    flat = recovery_experiment([SBMConfig("associative", 0.3, 0.3, (10,) * 6)], ["sc"], repeats=4)
    signal = recovery_experiment([SBMConfig("associative", 0.6, 0.05, (10,) * 6)], ["sc"], repeats=4)
    assert flat[0].mean_nmi < 0.3
    assert signal[0].mean_nmi > flat[0].mean_nmi + 0.4


def test_failed_cell_becomes_nan():
    # p = q = 0 cannot avoid isolated nodes, so sampling fails for the cell
    grid = [SBMConfig("associative", 0.0, 0.0, (3, 3)), SBMConfig("associative", 1.0, 0.0, (3, 3))]
    rows = recovery_experiment(grid, ["em"], repeats=2)
    assert math.isnan(rows[0].mean_nmi) and math.isnan(rows[0].std_nmi)
    assert rows[1].mean_nmi == pytest.approx(1.0)
    assert rows_to_json(rows)[0]["mean_nmi"] is None


def test_bad_arguments():
    grid = [SBMConfig("associative", 1.0, 0.0, (3, 3))]
    with pytest.raises(BadConfig):
        recovery_experiment(grid, ["metis"], repeats=1)
    with pytest.raises(BadConfig):
        recovery_experiment(grid, ["em"], repeats=0)


def test_parallel_matches_serial():
    grid = table_grid(24, 4)[:2]
    serial = recovery_experiment(grid, ["em", "sc"], repeats=2, base_seed=5)
    parallel = recovery_experiment(grid, ["em", "sc"], repeats=2, base_seed=5, jobs=2)
    assert serial == parallel


def test_table_grid_order():
    grid = table_grid()
    assert len(grid) == 9
    assert [(c.kind, c.p, c.q) for c in grid[:3]] == [
        ("associative", 0.2, 0.01), ("dissortative", 0.2, 0.01), ("mixed", 0.2, 0.01)
    ]
    assert all(c.block_sizes == (20,) * 10 for c in grid)


def test_csv_and_json():
    rows = [RecoveryRow("mixed", 0.5, 0.1, "sgc", 0.75, 0.01, 10),
            RecoveryRow("mixed", 0.5, 0.1, "em", math.nan, math.nan, 10)]
    lines = rows_to_csv(rows).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "mixed,0.5,0.1,sgc,0.75,0.01,10"
    assert lines[2] == "mixed,0.5,0.1,em,nan,nan,10"
    data = rows_to_json(rows)
    json.dumps(data, allow_nan=False)
    assert data[0] == {"kind": "mixed", "p": 0.5, "q": 0.1, "method": "sgc",
                       "mean_nmi": 0.75, "std_nmi": 0.01, "seeds": 10}
