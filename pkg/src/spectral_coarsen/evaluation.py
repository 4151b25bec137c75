"""Partition agreement (NMI) and the SBM block-recovery harness."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .algorithms import METHODS, run_method
from .coarsening import Partition
from .errors import BadConfig, SizeMismatch
from .kmeans import KMeansConfig
from .sbm import SBMConfig, sample_sbm

log = logging.getLogger(__name__)

TABLE_SETTINGS = ((0.2, 0.01), (0.5, 0.1), (0.8, 0.3))
CSV_COLUMNS = ("kind", "p", "q", "method", "mean_nmi", "std_nmi", "seeds")


def _labels(p) -> np.ndarray:
    return p.assignment if isinstance(p, Partition) else np.asarray(p)


def _entropy(counts: np.ndarray, total: int) -> float:
    prob = counts[counts > 0] / total
    return float(-np.sum(prob * np.log(prob)))


def nmi(p1, p2) -> float:
    """Mutual information normalized by the mean of the two entropies (natural log).

    Two single-block partitions score 1; if exactly one side is a single
    block the mutual information is 0 and so is the score.
    """
    a, b = _labels(p1), _labels(p2)
    if a.size != b.size:
        raise SizeMismatch(f"partitions cover {a.size} and {b.size} nodes")
    N = a.size
    _, a = np.unique(a, return_inverse=True)
    _, b = np.unique(b, return_inverse=True)
    joint = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(joint, (a, b), 1.0)
    ha = _entropy(joint.sum(axis=1), N)
    hb = _entropy(joint.sum(axis=0), N)
    if ha + hb == 0.0:
        return 1.0
    pj = joint / N
    pa = pj.sum(axis=1)[:, None]
    pb = pj.sum(axis=0)[None, :]
    nz = pj > 0
    mi = float(np.sum(pj[nz] * np.log(pj[nz] / (pa @ pb)[nz])))
    return float(min(max(mi / (0.5 * (ha + hb)), 0.0), 1.0))


@dataclass(frozen=True)
class RecoveryRow:
    kind: str
    p: float
    q: float
    method: str
    mean_nmi: float
    std_nmi: float
    seeds: int


def cell_seed(base_seed: int, config_index: int, repeat: int) -> int:
    """Independent 64-bit seed for one grid cell repeat."""
    ss = np.random.SeedSequence([base_seed, config_index, repeat])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_cell(args) -> tuple[int, str, list[float] | None]:
    index, cfg, method, repeats, base_seed, mgc_self_loops = args
    scores = []
    try:
        for r in range(repeats):
            seed = cell_seed(base_seed, index, r)
            g, truth = sample_sbm(replace(cfg, seed=seed))
            result = run_method(method, g, cfg.blocks, KMeansConfig(seed=seed), mgc_self_loops)
            scores.append(nmi(result.partition, truth))
    except Exception as exc:  # one failed cell must not abort the grid
        log.warning("cell %d/%s failed: %s", index, method, exc)
        return index, method, None
    return index, method, scores


def recovery_experiment(
    grid: list[SBMConfig],
    methods: list[str],
    repeats: int,
    base_seed: int = 0,
    jobs: int = 1,
    mgc_self_loops: bool = True,
) -> list[RecoveryRow]:
    """Mean/std NMI of each method's recovered partition against the SBM blocks.

    Each cell coarsens to ``n = number of blocks``. Rows come out in grid
    order, then method order; failed cells carry NaN scores.
    """
    if repeats < 1:
        raise BadConfig("repeats must be >= 1")
    methods = [m.lower() for m in methods]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise BadConfig(f"unknown method(s): {', '.join(unknown)}")
    tasks = [(i, cfg, m, repeats, base_seed, mgc_self_loops) for i, cfg in enumerate(grid) for m in methods]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, tasks))
    else:
        outcomes = [_run_cell(t) for t in tasks]
    by_key = {(i, m): scores for i, m, scores in outcomes}
    rows = []
    for i, cfg in enumerate(grid):
        for m in methods:
            scores = by_key[(i, m)]
            if scores is None:
                mean = std = math.nan
            else:
                mean, std = float(np.mean(scores)), float(np.std(scores))
            rows.append(RecoveryRow(cfg.kind, cfg.p, cfg.q, m, mean, std, repeats))
    return rows


def table_grid(N: int = 200, K: int = 10) -> list[SBMConfig]:
    """The nine (p, q) x kind settings of the block-recovery table."""
    return [
        SBMConfig.equal(kind, p, q, N, K)
        for p, q in TABLE_SETTINGS
        for kind in ("associative", "dissortative", "mixed")
    ]


def rows_to_csv(rows: list[RecoveryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([r.kind, repr(r.p), repr(r.q), r.method, repr(r.mean_nmi), repr(r.std_nmi), r.seeds])
    return buf.getvalue()


def rows_to_json(rows: list[RecoveryRow]) -> list[dict]:
    out = []
    for r in rows:
        d = asdict(r)
        for key in ("mean_nmi", "std_nmi"):
            if math.isnan(d[key]):
                d[key] = None
        out.append(d)
    return out
