"""One realisation of the k-cut process, by records or by direct cutting.

The record engine gives every node k exponential holding times; the r-th
alarm G_{r,v} is their cumulative sum, and v is an r-record iff G_{r,v} is
strictly below the smallest k-th alarm among its proper ancestors (ties,
which only floating point can produce, count as "not a record").
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .graphgen import RootedGraph, RootedTree, depth_profile
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .specfun import record_probs


@dataclass(frozen=True)
class CutConfig:
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise DomainError("k must be a positive integer")


@dataclass(frozen=True)
class RecordCounts:
    per_order: np.ndarray  # per_order[r-1] = K_r

    @property
    def total(self) -> int:
        return int(self.per_order.sum())

    @property
    def k(self) -> int:
        return int(self.per_order.size)


def alarm_clocks(n: int, k: int, stream: np.random.Generator) -> np.ndarray:
    """(n, k) array of G_{r,v}: cumulative sums of k unit exponentials per node."""
    return np.cumsum(stream.standard_exponential((n, k)), axis=1)


def simulate_records(t: RootedTree, cfg: CutConfig, stream: np.random.Generator) -> RecordCounts:
    clocks = alarm_clocks(t.n, cfg.k, stream)
    return RecordCounts(_kernels.record_counts(t.parent, clocks))


def simulate_direct(g: RootedGraph | RootedTree, cfg: CutConfig, stream: np.random.Generator) -> int:
    """Total cuts of the literal procedure: cut a uniform node of the root's
    component, delete it after its k-th cut, stop when the root is deleted."""
    if isinstance(g, RootedTree):
        g = g.as_graph()
    indptr, indices = g.csr
    uniforms = stream.random(cfg.k * g.n)
    return int(_kernels.direct_cuts(indptr, indices, g.root, cfg.k, uniforms))


def simulate_complete_graph(n: int, cfg: CutConfig, stream: np.random.Generator) -> int:
    """K(K_n) in O(nk): the root dies at a Gamma(k) time Y, and each other node
    has received min(Poisson(Y), k) cuts by then."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    y = stream.standard_exponential(cfg.k).sum()
    if n == 1:
        return cfg.k
    others = np.minimum(stream.poisson(y, size=int(n) - 1), cfg.k)
    return int(cfg.k + others.sum())


def expected_records_given_tree(
    t: RootedTree, cfg: CutConfig, r: int, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """E[K_r | tree] = sum over depths d of (#nodes at depth d) * P(r-record at depth d)."""
    if not 1 <= r <= cfg.k:
        raise DomainError("r must satisfy 1 <= r <= k")
    counts = depth_profile(t).counts
    probs = record_probs(r, cfg.k, np.arange(counts.size), quad)
    return float(np.dot(counts, probs))


def expected_total_given_tree(t: RootedTree, cfg: CutConfig, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return sum(expected_records_given_tree(t, cfg, r, quad) for r in range(1, cfg.k + 1))
