"""Node rankings: walk-count statistics and the priority orders built on them.

A ranking assigns every node a distinct integer priority; smaller means
selected earlier.  The two weight-aware rules score node v as

    degree rule:  w(v) = x_v / [(A + I)^k 1]_v
    weight rule:  w(v) = x_v / [(A + I)^k x]_v

with binary adjacency A, and order nodes by decreasing w(v) (node id
breaks ties).  Scores are compared as (score, id) pairs, never via
float perturbation, so rankings are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._propagate import neighbor_reduce, worker_pool
from .graph import Graph, NodeWeights

__all__ = [
    "Ranking",
    "WalkVector",
    "load_scores",
    "rank_by_degree_rule",
    "rank_by_weight_rule",
    "rank_static",
    "resolve_ranking",
    "walk_counts",
]

STATIC_KINDS = ("node_id", "random", "constant", "external")
RANKING_SPECS = ("kdeg", "kweight", "id", "random", "const")


@dataclass(frozen=True)
class Ranking:
    """Injective node priorities: `rank` is a permutation of 0..n-1."""

    rank: np.ndarray

    def __post_init__(self):
        rank = np.asarray(self.rank, dtype=np.int64)
        rank.setflags(write=False)
        object.__setattr__(self, "rank", rank)

    @property
    def n(self) -> int:
        return self.rank.size

    def validate(self, n: int) -> None:
        if self.rank.shape != (n,):
            raise ValueError(f"ranking covers {self.rank.size} nodes, graph has {n}")
        if n and not np.array_equal(np.bincount(self.rank, minlength=n),
                                    np.ones(n, dtype=np.int64)):
            raise ValueError("ranking must be a permutation of 0..n-1")

    @classmethod
    def from_scores(cls, scores) -> "Ranking":
        """Rank ascending by (score, node id); smaller key selected first."""
        scores = np.asarray(scores, dtype=np.float64)
        order = np.lexsort((np.arange(scores.size), scores))
        rank = np.empty(scores.size, dtype=np.int64)
        rank[order] = np.arange(scores.size)
        return cls(rank)


@dataclass(frozen=True)
class WalkVector:
    """Entries of (A + I)^k applied to a positive node-weight vector."""

    values: np.ndarray
    k: int

    def __post_init__(self):
        self.values.setflags(write=False)


def walk_counts(g: Graph, weights, k: int, workers: int = 1) -> WalkVector:
    """Compute (A + I)^k x by k rounds of inclusive neighborhood sums.

    The power graph is never materialized; k = 0 returns x unchanged.
    """
    if k < 0:
        raise ValueError("walk_counts requires k >= 0")
    x = NodeWeights.coerce(weights, g.n)
    vec = x.values.copy()
    with worker_pool(workers) as pool:
        for _ in range(k):
            vec = neighbor_reduce(g, vec, "sum", 0.0, workers, pool)
    return WalkVector(values=vec, k=k)


def rank_by_degree_rule(g: Graph, weights, k: int, workers: int = 1) -> Ranking:
    """Rank by decreasing x_v / [(A + I)^k 1]_v."""
    x = NodeWeights.coerce(weights, g.n)
    walk = walk_counts(g, NodeWeights.ones(g.n), k, workers)
    return Ranking.from_scores(-(x.values / walk.values))


def rank_by_weight_rule(g: Graph, weights, k: int, workers: int = 1) -> Ranking:
    """Rank by decreasing x_v / [(A + I)^k x]_v."""
    x = NodeWeights.coerce(weights, g.n)
    walk = walk_counts(g, x, k, workers)
    return Ranking.from_scores(-(x.values / walk.values))


def rank_static(n: int, kind: str = "node_id", seed=0, scores=None) -> Ranking:
    """Graph-independent rankings.

    node_id ranks by ascending id; random draws a seeded permutation;
    constant degenerates to the id tie-break; external ranks by
    decreasing caller-provided score (ids break ties).
    """
    if kind not in STATIC_KINDS:
        raise ValueError(f"unknown static ranking kind {kind!r}")
    if kind == "node_id":
        return Ranking(np.arange(n, dtype=np.int64))
    if kind == "random":
        rng = np.random.default_rng(seed)
        return Ranking(rng.permutation(n).astype(np.int64))
    if kind == "constant":
        return Ranking.from_scores(np.zeros(n))
    if scores is None:
        raise ValueError("external ranking requires scores")
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (n,):
        raise ValueError(f"expected {n} scores, got {scores.shape}")
    return Ranking.from_scores(-scores)


def load_scores(path) -> np.ndarray:
    """Read one real score per line; '#'/'%' comments and blanks skipped."""
    values = []
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}, line {lineno}: not a real number: {line!r}") from None
    return np.array(values, dtype=np.float64)


def resolve_ranking(g: Graph, spec, k: int | None = None, weights=None,
                    seed=0, workers: int = 1) -> Ranking:
    """Turn a ranking spec into a Ranking.

    `spec` may already be a Ranking (validated and returned), or one of
    'kdeg', 'kweight', 'id', 'random', 'const'.  The two rule specs need
    k >= 1; `weights` defaults to all-ones.
    """
    if isinstance(spec, Ranking):
        spec.validate(g.n)
        return spec
    if spec not in RANKING_SPECS:
        raise ValueError(f"unknown ranking spec {spec!r}")
    if spec in ("kdeg", "kweight"):
        if k is None or k < 1:
            raise ValueError(f"ranking {spec!r} requires k >= 1")
        x = NodeWeights.ones(g.n) if weights is None else NodeWeights.coerce(weights, g.n)
        if spec == "kdeg":
            return rank_by_degree_rule(g, x, k, workers)
        return rank_by_weight_rule(g, x, k, workers)
    if spec == "id":
        return rank_static(g.n, "node_id")
    if spec == "random":
        return rank_static(g.n, "random", seed=seed)
    return rank_static(g.n, "constant")
