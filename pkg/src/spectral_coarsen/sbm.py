"""Stochastic block model sampling for block-recovery experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coarsening import Partition
from .errors import BadConfig, DegenerateSample, IsolatedNode
from .graph import Graph

KINDS = ("associative", "dissortative", "mixed")
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class SBMConfig:
    kind: str
    p: float
    q: float
    block_sizes: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(int(b) for b in self.block_sizes))
        if self.kind not in KINDS:
            raise BadConfig(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.p <= 1.0):
            raise BadConfig("p and q must be probabilities")
        if self.kind != "mixed" and self.q > self.p:
            raise BadConfig("expected q <= p")
        if not self.block_sizes or min(self.block_sizes) < 1:
            raise BadConfig("block sizes must be positive")
        if not 0 <= self.seed < 2**64:
            raise BadConfig("seed must be a 64-bit unsigned integer")

    @property
    def node_count(self) -> int:
        return sum(self.block_sizes)

    @property
    def blocks(self) -> int:
        return len(self.block_sizes)

    @classmethod
    def equal(cls, kind: str, p: float, q: float, N: int, K: int, seed: int = 0) -> "SBMConfig":
        if K < 1 or N % K:
            raise BadConfig(f"N={N} is not divisible into {K} equal blocks")
        return cls(kind, p, q, (N // K,) * K, seed)


def build_block_matrix(cfg: SBMConfig) -> np.ndarray:
    K = cfg.blocks
    if cfg.kind == "associative":
        b = np.full((K, K), cfg.q)
        np.fill_diagonal(b, cfg.p)
    elif cfg.kind == "dissortative":
        b = np.full((K, K), cfg.p)
        np.fill_diagonal(b, cfg.q)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
        coin = rng.random((K, K)) < 0.5
        upper = np.where(coin, cfg.p, cfg.q)
        b = np.triu(upper) + np.triu(upper, k=1).T
    return b


def sample_sbm(cfg: SBMConfig) -> tuple[Graph, Partition]:
    """Draw a unit-weight simple graph and its ground-truth block partition.

    Samples with isolated nodes are redrawn from the next edge stream, up
    to ``MAX_ATTEMPTS`` times.
    """
    b = build_block_matrix(cfg)
    block = np.repeat(np.arange(cfg.blocks), cfg.block_sizes)
    N = block.size
    prob = b[block][:, block]
    iu, ju = np.triu_indices(N, k=1)
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1, attempt)))
        keep = rng.random(iu.size) < prob[iu, ju]
        w = np.zeros((N, N))
        w[iu[keep], ju[keep]] = 1.0
        w += w.T
        try:
            g = Graph.from_matrix(w)
        except IsolatedNode:
            continue
        return g, Partition(block)
    raise DegenerateSample(f"isolated nodes remained after {MAX_ATTEMPTS} draws")
