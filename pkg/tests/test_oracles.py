import math
from fractions import Fraction

import numpy as np
import pytest

from kcut import graphgen as gg
from kcut import oracles
from kcut import specfun as sf
from kcut.errors import DomainError


def test_dp_examples():
    assert oracles.dp_exact(gg.path(1), 2) == 2.0
    assert oracles.dp_exact(gg.path(2), 1) == 1.5
    assert oracles.dp_exact(gg.star(3), 1) == 2.0


def test_dp_path_harmonic():
    for n in range(1, 7):
        assert oracles.dp_exact(gg.path(n), 1, exact=True) == sum(Fraction(1, i) for i in range(1, n + 1))


def test_dp_star_k1():
    # 1 + (n-1)/2: each leaf is cut before the root with probability 1/2
    for n in range(1, 7):
        assert oracles.dp_exact(gg.star(n), 1, exact=True) == 1 + Fraction(n - 1, 2)


def test_dp_path2_k2_hand():
    # root gives 2 records; the leaf is a 1-record w.p. 3/4 and a 2-record w.p. 1/2
    assert oracles.dp_exact(gg.path(2), 2, exact=True) == Fraction(13, 4)


def test_dp_matches_records_formula_on_trees():
    # for trees the process is equivalent to counting records
    for n in range(1, 6):
        for t in gg.all_rooted_trees(n):
            for k in (1, 2):
                counts = np.bincount(t.depth)
                expect = sum(float(np.dot(counts, sf.record_probs(r, k, np.arange(counts.size))))
                             for r in range(1, k + 1))
                assert oracles.dp_exact(t, k) == pytest.approx(expect, rel=1e-9)


def _relabel(t, perm):
    # perm maps old non-root labels onto new ones, root fixed
    full = [0] + list(perm)
    parent = [None] * t.n
    for v in range(1, t.n):
        parent[full[v]] = full[int(t.parent[v])]
    return parent


@pytest.mark.parametrize("n", [3, 4])
def test_dp_relabel_invariant(n):
    from itertools import permutations
    for t in gg.all_rooted_trees(n):
        base = oracles.dp_exact(t, 2, exact=True)
        for perm in permutations(range(1, n)):
            parent = _relabel(t, perm)
            edges = [(p, v) for v, p in enumerate(parent) if p is not None]
            g = gg.RootedGraph(np.array(edges), root=0, n=n)
            assert oracles.dp_exact(g, 2, exact=True) == base


def test_dp_complete_graph_small():
    # K_2 is the path on 2 nodes
    assert oracles.dp_exact(gg.complete_graph(2), 1) == 1.5
    tri = oracles.dp_exact(gg.complete_graph(3), 1, exact=True)
    # the first cut hits the root w.p. 1/3; otherwise one edge K_2 remains
    assert tri == 1 + Fraction(2, 3) * Fraction(3, 2)


def test_dp_cap():
    with pytest.raises(DomainError):
        oracles.dp_exact(gg.path(20), 2)


def test_perm_records():
    assert oracles.perm_records(1) == 1
    assert oracles.perm_records(3, exact=True) == Fraction(11, 6)
    assert oracles.perm_records(4, exact=True) == Fraction(25, 12)
    with pytest.raises(DomainError):
        oracles.perm_records(9)


def test_exact_path_mean():
    assert oracles.exact_path_mean(1, 3, 2) == 1.0
    assert oracles.exact_path_mean(3, 1, 1) == pytest.approx(11 / 6, rel=1e-12)
    for n in range(1, 9):
        for k in (1, 2, 3):
            assert oracles.exact_path_mean(n, k, k) == pytest.approx(oracles.perm_records(n), abs=1e-10)
    ratio = oracles.exact_path_mean(10 ** 4, 2, 1) / 100
    assert abs(ratio / math.sqrt(2 * math.pi) - 1) < 0.03


def test_quad_xi_2d():
    assert oracles.quad_xi_2d(2, 1, 1) == pytest.approx(math.pi / 4, rel=1e-9)
    assert oracles.quad_xi_2d(2, 1, 3) == pytest.approx(math.pi / (3 * math.sqrt(3)), rel=1e-9)
    assert oracles.quad_xi_2d(3, 1, 1) == pytest.approx(sf.xi(3, 1, 1), rel=1e-6)
    with pytest.raises(DomainError):
        oracles.quad_xi_2d(2, 0.0, 1.0)


def test_quad_lambda():
    assert oracles.quad_lambda(2) == pytest.approx(math.pi ** 2 / 4, rel=1e-6)
    assert oracles.quad_lambda(3) == pytest.approx(2.0274644407075755, rel=1e-7)
    assert oracles.quad_lambda(4) == pytest.approx(sf.lambda_const(4), rel=1e-7)


def test_quad_hyper_cot():
    assert oracles.quad_hyper_cot(3) == pytest.approx(math.pi / math.sqrt(3), rel=1e-8)
    assert oracles.quad_hyper_cot(4) == pytest.approx(math.pi / 2, rel=1e-8)
    assert oracles.quad_hyper_cot(6) == pytest.approx(math.pi * math.sqrt(3) / 4, rel=1e-8)
    with pytest.raises(DomainError):
        oracles.quad_hyper_cot(2)


def test_oracles_do_not_import_simulators():
    import ast
    tree = ast.parse(open(oracles.__file__).read())
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            names.add(node.module or "")
            names.update(a.name for a in node.names)
        elif isinstance(node, ast.Import):
            names.update(a.name for a in node.names)
    assert not {"cutsim", "_kernels", "tasks", "limitdist"} & names
