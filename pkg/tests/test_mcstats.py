import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kcut import mcstats as ms
from kcut.tasks import BkTask, RecordsTask
from kcut.limitdist import LimitSamplerConfig
from kcut import graphgen as gg


def test_splitmix_reference():
    # reference outputs of the published splitmix64 generator seeded at 0
    assert ms.splitmix64(0) == 0xE220A8397B1DCDAF
    assert ms.splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_cursor_matches_fresh_streams():
    cur = ms._StreamCursor(77)
    for i in (0, 1, 9, 2 ** 64 + 5):
        assert np.array_equal(cur.at(i).random(11), ms.derive_stream(77, i).random(11))
        assert np.array_equal(cur.at(i).standard_exponential(5), ms.derive_stream(77, i).standard_exponential(5))


def test_streams_differ():
    a = ms.derive_stream(1, 0).random(4)
    assert not np.array_equal(a, ms.derive_stream(1, 1).random(4))
    assert not np.array_equal(a, ms.derive_stream(2, 0).random(4))


def _draw(stream):
    return float(stream.random())


def test_run_replicas_contract():
    one = ms.run_replicas(_draw, 1, 5)
    assert one[0] == ms.derive_stream(5, 0).random()
    a = ms.run_replicas(_draw, 50, 5)
    assert np.array_equal(a, ms.run_replicas(_draw, 50, 5))
    assert np.array_equal(a, ms.run_replicas(_draw, 50, 5, workers=2, chunk=7))
    assert np.array_equal(a[:20], ms.run_replicas(_draw, 20, 5))


def test_run_replicas_vector_tasks():
    t = RecordsTask(gg.path(30), 2, per_order=True)
    x = ms.run_replicas(t, 10, 1)
    assert x.shape == (10, 2)
    y = ms.run_replicas(BkTask(LimitSamplerConfig(2)), 4, 1, workers=2)
    assert np.array_equal(y, ms.run_replicas(BkTask(LimitSamplerConfig(2)), 4, 1))


def _fail_on_three(stream):
    if stream.bit_generator.state["state"]["counter"][2] == 3:
        raise RuntimeError("boom")
    return 0.0


def test_replica_error_carries_index():
    with pytest.raises(ms.ReplicaError) as info:
        ms.run_replicas(_fail_on_three, 6, 0)
    assert info.value.index == 3
    with pytest.raises(ValueError):
        ms.run_replicas(_draw, 0, 0)


def test_summarize_examples():
    s = ms.summarize([1, 1, 1])
    assert s.mean == 1 and s.variance == 0
    s = ms.summarize([0, 2])
    assert s.mean == 1 and s.variance == 2
    s = ms.summarize([1, 2, 3, 4])
    assert s.mean == 2.5 and s.variance == pytest.approx(5 / 3, rel=1e-15)
    assert s.raw_moments[0] == s.mean
    assert s.raw_moments[1] == pytest.approx(7.5)
    assert s.se_mean == pytest.approx(math.sqrt(5 / 3 / 4))
    with pytest.raises(ValueError):
        ms.summarize([1.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=300))
def test_summarize_matches_two_pass(xs):
    x = np.array(xs)
    s = ms.summarize(x)
    assert s.mean == pytest.approx(x.mean(), rel=1e-12, abs=1e-9)
    assert s.variance == pytest.approx(x.var(ddof=1), rel=1e-10, abs=1e-6)
    assert s.variance >= 0
    for p in (1, 2, 3, 4):
        assert s.raw_moments[p - 1] == pytest.approx(np.mean(x ** p), rel=1e-9, abs=1e-6 * max(1, np.abs(x).max()) ** p)


def test_summarize_large_blockwise():
    x = np.random.default_rng(3).normal(1e3, 1.0, size=200_001)
    s = ms.summarize(x)
    assert s.mean == pytest.approx(x.mean(), rel=1e-13)
    assert s.variance == pytest.approx(x.var(ddof=1), rel=1e-10)


def test_moment():
    assert ms.moment([2.0], 3) == 8
    assert ms.moment([1.0, 3.0], 2) == 5


def test_ecdf():
    f = ms.Ecdf([3.0, 1.0, 2.0, 2.0])
    assert f.n == 4 and f.sorted_samples.tolist() == [1, 2, 2, 3]
    assert f(0.5) == 0 and f(1.0) == 0.25 and f(2.0) == 0.75 and f(10) == 1.0
    with pytest.raises(ValueError):
        ms.Ecdf([])


def test_ks_examples():
    E = ms.Ecdf
    assert ms.ks_distance(E([1, 2, 3]), E([1, 2, 3])) == 0
    assert ms.ks_distance(E([0]), E([1])) == 1.0
    assert ms.ks_distance(E([0, 1]), E([0.5, 1])) == 0.5


def test_dominance_examples():
    E = ms.Ecdf
    assert ms.dominance_margin(E([1, 2]), E([1, 2])) == 0
    assert ms.dominance_margin(E([1, 2]), E([3, 4])) == 0
    assert ms.dominance_margin(E([3, 4]), E([1, 2])) == 1.0


samples = st.lists(st.integers(-20, 20).map(float), min_size=1, max_size=40)


@given(samples, samples, samples)
def test_ks_symmetric_triangle(a, b, c):
    A, B, C = ms.Ecdf(a), ms.Ecdf(b), ms.Ecdf(c)
    assert ms.ks_distance(A, B) == ms.ks_distance(B, A)
    assert ms.ks_distance(A, C) <= ms.ks_distance(A, B) + ms.ks_distance(B, C) + 1e-15
    assert 0 <= ms.dominance_margin(A, B) <= ms.ks_distance(A, B)


def test_ks_null_band():
    assert ms.ks_null_band(10 ** 4, 10 ** 4) == pytest.approx(1.6276 * math.sqrt(2e-4), rel=1e-3)


def test_io_roundtrip(tmp_path):
    x = np.array([0.1, 1e-300, 3.0, -2.5])
    p = tmp_path / "s.csv"
    ms.write_samples_csv(p, x)
    assert p.read_text().splitlines()[0] == "value"
    assert np.array_equal(ms.read_samples_csv(p), x)
    j = tmp_path / "s.json"
    ms.write_summary_json(j, ms.summarize(x), family="path")
    d = json.loads(j.read_text())
    assert set(d) == {"n", "mean", "variance", "se_mean", "moments", "family"}
