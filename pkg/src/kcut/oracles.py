"""Brute-force and quadrature oracles.

Nothing here calls into the simulators: the state-space recursion and the
permutation enumeration work from the cutting rule itself, and the integrals
are evaluated with scipy's QUADPACK wrappers rather than the package's own
Gauss-Kronrod code.
"""
from __future__ import annotations

import math
import sys
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy import integrate

from . import specfun
from .errors import DomainError, NumericalError
from .graphgen import RootedGraph, RootedTree
from .quadrature import DEFAULT_QUAD, QuadratureSpec

DP_STATE_CAP = 10 ** 7
PERM_MAX_N = 8

_GONE = -1


def _adjacency(g: RootedGraph | RootedTree) -> tuple[list[list[int]], int]:
    if isinstance(g, RootedTree):
        g = g.as_graph()
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for a, b in g.edges.tolist():
        adj[a].append(b)
        adj[b].append(a)
    return adj, g.root


def dp_exact(g: RootedGraph | RootedTree, k: int, exact: bool = False):
    """Exact expected number of cuts by recursion over cut-count vectors.

    A state records the cut count of each node still in the root's component;
    deleted nodes and nodes cut off from the root share one sentinel value,
    which merges states that differ only outside the live component. With
    ``exact=True`` the answer is a :class:`fractions.Fraction`.
    """
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    adj, root = _adjacency(g)
    n = len(adj)
    if (k + 1) ** n > DP_STATE_CAP:
        raise DomainError(f"(k+1)^n = {(k + 1) ** n} exceeds the state cap {DP_STATE_CAP}")
    one = Fraction(1) if exact else 1.0

    def live_component(counts):
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen and counts[w] != _GONE:
                    seen.add(w)
                    stack.append(w)
        return seen

    memo: dict[tuple, object] = {}

    def value(state):
        hit = memo.get(state)
        if hit is not None:
            return hit
        live = [v for v in range(n) if state[v] != _GONE]
        acc = 0 * one
        for v in live:
            if v == root and state[v] + 1 == k:
                continue  # the root's k-th cut ends the process
            nxt = list(state)
            nxt[v] += 1
            if nxt[v] == k:
                nxt[v] = _GONE
                comp = live_component(nxt)
                nxt = [c if u in comp else _GONE for u, c in enumerate(nxt)]
            acc += value(tuple(nxt))
        out = one + acc / len(live)
        memo[state] = out
        return out

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * n * k + 1000))
    try:
        return value(tuple([0] * n))
    finally:
        sys.setrecursionlimit(limit)


def perm_records(n: int, exact: bool = False):
    """Mean number of strict running minima over all n! permutations."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if n > PERM_MAX_N:
        raise DomainError(f"perm_records enumerates n! permutations; n <= {PERM_MAX_N}")
    total = 0
    count = 0
    for perm in permutations(range(n)):
        low = n
        for x in perm:
            if x < low:
                total += 1
                low = x
        count += 1
    mean = Fraction(total, count)
    return mean if exact else float(mean)


def exact_path_mean(n: int, k: int, r: int, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E[K_r(P_n)]: the path's i-th node has i proper ancestors."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not 1 <= r <= k:
        raise DomainError("r must satisfy 1 <= r <= k")
    return float(specfun.record_probs(r, k, np.arange(int(n)), quad).sum())


def _check_quad(value, err, what, rel):
    if not math.isfinite(value) or err > rel * abs(value) + 1e-300:
        raise NumericalError(f"{what}: estimate {value!r} with error {err!r}")
    return value


def quad_xi_2d(k: int, a: float, b: float, rel_tol: float = 1e-8) -> float:
    """Nested quadrature of the double integral over {x >= y >= 0} of
    exp(-a x^k/k! - b y^k/k!)."""
    if int(k) != k or k < 2:
        raise DomainError("k must be an integer >= 2")
    if not (a > 0 and b > 0):
        raise DomainError("a and b must be positive")
    kf = math.factorial(k)
    cut = math.log(1e16) + 5.0
    x_max = (kf * cut / a) ** (1 / k)
    y_max = min(x_max, (kf * cut / (a + b)) ** (1 / k))

    def inner(y):
        v, _ = integrate.quad(lambda x: math.exp(-a * x ** k / kf), y, max(x_max, y),
                              epsabs=0.0, epsrel=1e-12, limit=200)
        return v * math.exp(-b * y ** k / kf)

    val, err = integrate.quad(inner, 0.0, y_max, epsabs=0.0, epsrel=1e-11, limit=200)
    return _check_quad(val, err, "quad_xi_2d", rel_tol)


def quad_lambda(k: int, rel_tol: float = 1e-7) -> float:
    """Integral of xi_k(s, t) over the triangle s, t >= 0, s + t <= 1.

    With s = u^k, t = v^k the integrand xi(u^k, v^k) k^2 (uv)^(k-1) is
    bounded near both axes, so plain adaptive quadrature converges.
    """
    if int(k) != k or k < 2:
        raise DomainError("k must be an integer >= 2")
    k = int(k)

    def f(v, u):
        if u == 0.0 or v == 0.0:
            return 0.0
        return float(specfun.xi(k, u ** k, v ** k)) * k * k * (u * v) ** (k - 1)

    val, err = integrate.dblquad(f, 0.0, 1.0, 0.0, lambda u: (1.0 - u ** k) ** (1.0 / k),
                                 epsabs=0.0, epsrel=1e-10)
    return _check_quad(val, err, "quad_lambda", rel_tol)


def quad_hyper_cot(k: int, rel_tol: float = 1e-8) -> float:
    """Integral over w in [0, inf) of (w+1)^(2/k-2) F(2/k, 1/k; 1+1/k; -w).

    The integrand decays like w^(1/k-2); on [1, inf) the change of variables
    w = s^(-k/(k-1)) turns this tail into a bounded integrand on (0, 1].
    """
    if int(k) != k or k < 3:
        raise DomainError("k must be an integer >= 3")
    a, b, c = 2.0 / k, 1.0 / k, 1.0 + 1.0 / k

    def g(w):
        return (w + 1.0) ** (a - 2.0) * float(specfun.hyper2f1(a, b, c, -w))

    q = k / (k - 1.0)

    def tail(s):
        w = s ** (-q)
        return g(w) * q * s ** (-q - 1.0)

    head, e1 = integrate.quad(g, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    rest, e2 = integrate.quad(tail, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return _check_quad(head + rest, e1 + e2, "quad_hyper_cot", rel_tol)
