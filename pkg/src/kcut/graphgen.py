"""Rooted trees and graphs used throughout: deterministic families and random ones.

Trees are parent arrays with the root at index 0 and ``parent[v] < v`` for
every other node, so any forward scan visits parents before children.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import DomainError, SamplingError

MAX_NODES = 2 ** 40
COMPLETE_GRAPH_MAX = 10 ** 4
GW_MAX_N = 5000
GW_MAX_ATTEMPTS = 10 ** 7

OFFSPRING = {"poisson1": 0, "geom-half": 1, "binary02": 2}
OFFSPRING_SIGMA = {"poisson1": 1.0, "geom-half": math.sqrt(2.0), "binary02": 1.0}


@dataclass(frozen=True, eq=False)
class RootedTree:
    parent: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.parent, dtype=np.int64)
        if p.ndim != 1 or p.size < 1:
            raise DomainError("a tree needs at least one node")
        if p[0] != -1:
            raise DomainError("node 0 must be the root (parent -1)")
        if p.size > 1:
            idx = np.arange(1, p.size)
            if np.any(p[1:] < 0) or np.any(p[1:] >= idx):
                raise DomainError("parent[v] must satisfy 0 <= parent[v] < v for v >= 1")
        p.setflags(write=False)
        object.__setattr__(self, "parent", p)

    @property
    def n(self) -> int:
        return int(self.parent.size)

    @cached_property
    def depth(self) -> np.ndarray:
        d = _kernels.depths(self.parent)
        d.setflags(write=False)
        return d

    @classmethod
    def from_parents(cls, parents) -> "RootedTree":
        """Build from an arbitrary parent list (one ``None``/-1 root), relabelling
        nodes in breadth-first order so the ``parent[v] < v`` invariant holds."""
        raw = [-1 if p is None else int(p) for p in parents]
        roots = [v for v, p in enumerate(raw) if p < 0]
        if len(roots) != 1:
            raise DomainError("exactly one root required")
        children: list[list[int]] = [[] for _ in raw]
        for v, p in enumerate(raw):
            if p >= 0:
                if p >= len(raw):
                    raise DomainError("parent index out of range")
                children[p].append(v)
        order = [roots[0]]
        head = 0
        while head < len(order):
            order.extend(children[order[head]])
            head += 1
        if len(order) != len(raw):
            raise DomainError("parent array contains a cycle or unreachable nodes")
        label = {old: new for new, old in enumerate(order)}
        new_parent = [-1] * len(raw)
        for old in order[1:]:
            new_parent[label[old]] = label[raw[old]]
        return cls(np.array(new_parent))

    def as_graph(self) -> "RootedGraph":
        v = np.arange(1, self.n)
        return RootedGraph(np.stack([self.parent[1:], v], axis=1), root=0, n=self.n)

    def dump(self) -> str:
        """One ``index parent depth`` line per node."""
        return "".join(f"{v} {p} {d}\n" for v, (p, d) in
                       enumerate(zip(self.parent.tolist(), self.depth.tolist())))

    def canonical(self) -> str:
        """Isomorphism-invariant encoding (sorted nested parentheses)."""
        children: list[list[int]] = [[] for _ in range(self.n)]
        for v in range(1, self.n):
            children[self.parent[v]].append(v)
        code = [""] * self.n
        for v in range(self.n - 1, -1, -1):
            code[v] = "(" + "".join(sorted(code[c] for c in children[v])) + ")"
        return code[0]


@dataclass(frozen=True, eq=False)
class RootedGraph:
    edges: np.ndarray
    root: int = 0
    n: int = field(default=0)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        n = int(self.n) if self.n else (int(e.max()) + 1 if e.size else 1)
        if n < 1 or not (0 <= self.root < n):
            raise DomainError("root must be a node index")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise DomainError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise DomainError("self-loops are not allowed")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "n", n)
        if self._component_size() != n:
            raise DomainError("graph must be connected")

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        e = self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.argsort(src, kind="stable")
        indices = dst[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        return np.cumsum(indptr), np.ascontiguousarray(indices)

    def _component_size(self) -> int:
        indptr, indices = self.csr
        seen = np.zeros(self.n, dtype=bool)
        seen[self.root] = True
        stack = [self.root]
        while stack:
            v = stack.pop()
            for w in indices[indptr[v]:indptr[v + 1]]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        return int(seen.sum())


@dataclass(frozen=True)
class DepthProfile:
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def height(self) -> int:
        return self.counts.size - 1


def _check_n(n, minimum=1):
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")
    if n > MAX_NODES:
        raise DomainError("tree too large for the node-index range")
    return int(n)


def path(n: int) -> RootedTree:
    n = _check_n(n)
    return RootedTree(np.arange(-1, n - 1))


def star(n: int) -> RootedTree:
    n = _check_n(n)
    p = np.zeros(n, dtype=np.int64)
    p[0] = -1
    return RootedTree(p)


def complete_binary(m: int) -> RootedTree:
    """Complete binary tree of height m, heap-labelled (children of v: 2v+1, 2v+2)."""
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise DomainError("m must be a nonnegative integer")
    if m + 1 > 40:
        raise DomainError("complete_binary size overflows the node-index range")
    n = 2 ** (m + 1) - 1
    p = (np.arange(n) - 1) // 2
    p[0] = -1
    return RootedTree(p)


def curtain(ell: int, n: int) -> RootedTree:
    """Root joined to ell paths; the first ell-1 have ceil((n-1)/ell) nodes and
    the last one takes the rest."""
    if int(ell) != ell or ell < 2:
        raise DomainError("ell must be an integer >= 2")
    n = _check_n(n, ell + 1)
    seg = -(-(n - 1) // ell)
    last = n - 1 - (ell - 1) * seg
    if last < 1:
        raise DomainError(f"curtain({ell}, {n}) leaves no nodes for the last path")
    lengths = [seg] * (ell - 1) + [last]
    return RootedTree(_paths_from_root(lengths))


def _paths_from_root(lengths):
    parent = [-1]
    for length in lengths:
        start = len(parent)
        parent.append(0)
        parent.extend(range(start, start + length - 1))
    return np.array(parent)


def complete_graph(n: int, max_n: int = COMPLETE_GRAPH_MAX) -> RootedGraph:
    n = _check_n(n)
    if n > max_n:
        raise DomainError(f"complete_graph limited to {max_n} nodes")
    i, j = np.triu_indices(n, k=1)
    return RootedGraph(np.stack([i, j], axis=1), root=0, n=n)


def random_recursive(n: int, stream: np.random.Generator) -> RootedTree:
    """Node j attaches to a uniform earlier node."""
    n = _check_n(n)
    p = np.empty(n, dtype=np.int64)
    p[0] = -1
    if n > 1:
        p[1:] = stream.integers(0, np.arange(1, n))
    return RootedTree(p)


def gw_conditioned(
    n: int,
    stream: np.random.Generator,
    offspring: str = "poisson1",
    max_n: int = GW_MAX_N,
    max_attempts: int = GW_MAX_ATTEMPTS,
) -> RootedTree:
    """Galton-Watson tree conditioned on exactly n nodes, by rejection."""
    n = _check_n(n)
    if offspring not in OFFSPRING:
        raise DomainError(f"offspring must be one of {sorted(OFFSPRING)}")
    if n > max_n:
        raise DomainError(f"gw_conditioned limited to n <= {max_n}")
    parent, attempts = _kernels.gw_rejection(stream, n, OFFSPRING[offspring], max_attempts)
    if attempts < 0:
        raise SamplingError(f"no tree of size {n} after {max_attempts} attempts")
    return RootedTree(parent)


def depth_profile(t: RootedTree) -> DepthProfile:
    return DepthProfile(np.bincount(t.depth))


def all_rooted_trees(n: int) -> Iterator[RootedTree]:
    """Every rooted unlabelled tree on n nodes, one representative each."""
    n = _check_n(n)
    seen: dict[str, RootedTree] = {}

    def grow(parents):
        if len(parents) == n:
            t = RootedTree(np.array(parents))
            seen.setdefault(t.canonical(), t)
            return
        for p in range(len(parents)):
            grow(parents + [p])

    grow([-1])
    yield from seen.values()
