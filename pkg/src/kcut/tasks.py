"""Picklable replica tasks for :func:`kcut.mcstats.run_replicas`.

Each task is called with the replica's stream and returns a float or a
1-d array of floats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graphgen
from .cutsim import (
    CutConfig,
    expected_records_given_tree,
    simulate_complete_graph,
    simulate_direct,
    simulate_records,
)
from .graphgen import RootedGraph, RootedTree
from .limitdist import LimitSamplerConfig, sample_bk, sample_star_limit


@dataclass(frozen=True)
class RecordsTask:
    """Record engine on a fixed tree; returns the total, or [K_1..K_k] if per_order."""

    tree: RootedTree
    k: int
    per_order: bool = False

    def __call__(self, stream):
        counts = simulate_records(self.tree, CutConfig(self.k), stream).per_order
        return counts.astype(float) if self.per_order else float(counts.sum())


@dataclass(frozen=True)
class DirectTask:
    graph: RootedGraph
    k: int

    def __call__(self, stream):
        return float(simulate_direct(self.graph, CutConfig(self.k), stream))


@dataclass(frozen=True)
class CompleteGraphTask:
    n: int
    k: int

    def __call__(self, stream):
        return float(simulate_complete_graph(self.n, CutConfig(self.k), stream))


@dataclass(frozen=True)
class RandomTreeTask:
    """Draw a random tree, then one record-engine realisation on it.

    Returns ``[K_1..K_k (simulated), E[K_1|T]..E[K_k|T] (exact)]``; the
    exact block is omitted when ``exact`` is false.
    """

    family: str  # "rrt" or "gw"
    n: int
    k: int
    offspring: str = "poisson1"
    exact: bool = True

    def tree(self, stream) -> RootedTree:
        if self.family == "rrt":
            return graphgen.random_recursive(self.n, stream)
        if self.family == "gw":
            return graphgen.gw_conditioned(self.n, stream, self.offspring)
        raise ValueError(f"unknown random family {self.family!r}")

    def __call__(self, stream):
        t = self.tree(stream)
        cfg = CutConfig(self.k)
        sim = simulate_records(t, cfg, stream).per_order.astype(float)
        if not self.exact:
            return sim
        exact = [expected_records_given_tree(t, cfg, r) for r in range(1, self.k + 1)]
        return np.concatenate([sim, exact])


@dataclass(frozen=True)
class BkTask:
    cfg: LimitSamplerConfig

    def __call__(self, stream):
        return sample_bk(self.cfg, stream).value


@dataclass(frozen=True)
class StarLimitTask:
    k: int

    def __call__(self, stream):
        return sample_star_limit(self.k, stream)
