import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcut import specfun as sf
from kcut.errors import DomainError
from kcut.limitdist import (
    LimitSamplerConfig,
    bk_path,
    histogram,
    sample_bk,
    sample_star_limit,
    truncation_sensitivity,
    write_histogram_csv,
)
from kcut.mcstats import derive_stream


class Forced:
    def __init__(self, u, e):
        self.u, self.e = u, e

    def random(self, size):
        return np.full(size, self.u)

    def standard_exponential(self, size):
        return np.full(size, self.e)


def test_config_invariants():
    LimitSamplerConfig(2)
    for kwargs in ({"k": 1}, {"k": 2, "term_tol": 0.0}, {"k": 2, "patience": 0},
                   {"k": 2, "patience": 10, "p_cap": 5}):
        with pytest.raises(DomainError):
            LimitSamplerConfig(**kwargs)


def test_forced_zero_exponential():
    s, path = bk_path(LimitSamplerConfig(2, p_cap=1, patience=1), Forced(0.5, 0.0))
    assert path.s_pow[0] == 0.0 and path.b[0] == 0.0 and s.value == 0.0


def test_forced_half_and_one():
    s, path = bk_path(LimitSamplerConfig(2, p_cap=2, patience=1), Forced(0.5, 1.0))
    assert math.sqrt(path.s_pow[0]) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert path.b[0] == pytest.approx(0.5 * math.sqrt(2), rel=1e-15)
    assert math.sqrt(path.s_pow[1]) == pytest.approx(math.sqrt(3), rel=1e-15)
    assert path.b[1] == pytest.approx(0.5 * math.sqrt(0.5) * math.sqrt(3), rel=1e-15)
    assert s.hit_cap and s.terms == 2


@settings(max_examples=30)
@given(st.integers(2, 7), st.integers(0, 2 ** 40))
def test_recursion_literal_on_recorded_paths(k, seed):
    s, p = bk_path(LimitSamplerConfig(k), derive_stream(seed, 0))
    kf = math.factorial(k)
    carry = p.s_pow - kf * p.e
    assert carry[0] == 0.0
    assert np.allclose(carry[1:], p.u[:-1] * p.s_pow[:-1], rtol=1e-12, atol=0)
    assert np.all(p.b >= 0) and s.value >= 0
    assert s.value == pytest.approx(p.b.sum(), rel=1e-12)


def test_p_cap_one_is_first_term():
    cfg = LimitSamplerConfig(2, p_cap=1, patience=1)
    xs = np.array([sample_bk(cfg, derive_stream(3, i)).value for i in range(4000)])
    # E[B_1] = E[1-U] E[S_1] = 1/2 * sqrt(2) Gamma(3/2)
    assert xs.mean() == pytest.approx(0.5 * math.sqrt(2) * math.gamma(1.5), rel=0.05)
    assert xs.mean() < sf.eta(2, 1)


def test_stopping_prefix_consistency():
    a = sample_bk(LimitSamplerConfig(3, p_cap=400), derive_stream(8, 0))
    b = sample_bk(LimitSamplerConfig(3, p_cap=800), derive_stream(8, 0))
    assert a.value == b.value and not a.hit_cap


def test_bk_moments_k2():
    rng = derive_stream(21, 0)
    x = np.array([sample_bk(LimitSamplerConfig(2), rng).value for _ in range(20000)])
    assert x.mean() == pytest.approx(math.sqrt(2 * math.pi), rel=0.02)
    assert np.mean(x ** 2) == pytest.approx(sf.gamma_const(2), rel=0.04)
    assert np.unique(x).size == x.size


def test_star_limit_k1_uniform():
    rng = derive_stream(5, 0)
    x = np.array([sample_star_limit(1, rng) for _ in range(20000)])
    assert x.mean() == pytest.approx(0.5, abs=0.01)
    assert x.var() == pytest.approx(1 / 12, abs=0.003)
    assert 0 <= x.min() and x.max() <= 1


def test_star_limit_forced_zero():
    assert sample_star_limit(2, Forced(0.0, 0.0)) == 0.0
    with pytest.raises(DomainError):
        sample_star_limit(0, Forced(0.0, 0.0))


def test_truncation_report():
    rep = truncation_sensitivity(LimitSamplerConfig(2, term_tol=1e-6, patience=5, p_cap=200), 2000,
                                 derive_stream(1, 0))
    assert rep.rel_mean_shift < 1e-3 and rep.cap_hit_fraction < 0.01
    rep1 = truncation_sensitivity(LimitSamplerConfig(2, p_cap=1, patience=1), 500, derive_stream(1, 0))
    assert rep1.cap_hit_fraction == 1.0 and rep1.mean_at_cap <= rep1.mean_at_double_cap


def test_histogram_and_csv(tmp_path):
    x = np.random.default_rng(0).normal(size=5000)
    edges, counts, overlay = histogram(x, 20)
    assert counts.sum() == 5000 and edges.size == 21
    assert overlay.sum() == pytest.approx(5000, rel=0.01)
    out = tmp_path / "h.csv"
    write_histogram_csv(out, edges, counts, overlay)
    lines = out.read_text().splitlines()
    assert lines[0] == "bin_left,bin_right,count,normal_overlay" and len(lines) == 21
    with pytest.raises(DomainError):
        histogram([1.0], 3)
