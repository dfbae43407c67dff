"""Replica orchestration, deterministic streams and sample statistics.

Stream derivation
-----------------
Replica ``i`` of a run seeded with ``seed`` draws from a Philox-4x64 counter
generator whose 128-bit key is ``(splitmix64(seed), splitmix64(seed ^ C))``
with ``C = 0x9E3779B97F4A7C15``, and whose 256-bit counter starts at
``(0, 0, i mod 2^64, i >> 64)``. Philox increments the low counter words,
so every replica owns a disjoint block of 2^128 outputs and the stream of
replica ``i`` does not depend on how replicas are scheduled.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_key(seed: int) -> np.ndarray:
    s = int(seed) & _MASK64
    return np.array([splitmix64(s), splitmix64(s ^ _GOLDEN)], dtype=np.uint64)


def _counter(index: int) -> np.ndarray:
    i = int(index)
    if i < 0 or i >> 128:
        raise ValueError("replica index must fit in 128 bits")
    return np.array([0, 0, i & _MASK64, (i >> 64) & _MASK64], dtype=np.uint64)


def derive_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replica ``index`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(counter=_counter(index), key=stream_key(seed)))


class _StreamCursor:
    """Re-points one Philox bit generator at successive replica counters.

    Building a Philox object costs ~10us, resetting its state ~1us; for tiny
    tasks that difference dominates. The generator handed out for replica i
    is only valid until the next call to :meth:`at`.
    """

    def __init__(self, seed: int):
        self._bitgen = np.random.Philox(key=stream_key(seed))
        self._state = self._bitgen.state
        self._key = stream_key(seed)

    def at(self, index: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"] = _counter(index)
        st["state"]["key"] = self._key
        st["buffer"] = np.zeros(4, dtype=np.uint64)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return np.random.Generator(self._bitgen)


class ReplicaError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"replica {index} failed: {cause!r}")
        self.index = index


def _run_range(task, seed, start, stop):
    cursor = _StreamCursor(seed)
    out = []
    for i in range(start, stop):
        try:
            out.append(task(cursor.at(i)))
        except Exception as exc:  # noqa: BLE001 - re-raised with the replica index
            raise ReplicaError(i, exc) from exc
    return out


def default_workers() -> int:
    return os.cpu_count() or 1


def run_replicas(
    task: Callable[[np.random.Generator], float | np.ndarray],
    n_reps: int,
    seed: int,
    workers: int = 1,
    chunk: int | None = None,
) -> np.ndarray:
    """Run ``task(stream)`` for replicas 0..n_reps-1; results in replica order.

    ``task`` must be picklable when ``workers > 1``. Scalar results give a
    1-d array, vector results a 2-d array with one row per replica.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    if workers <= 1 or n_reps == 1:
        rows = _run_range(task, seed, 0, n_reps)
    else:
        step = chunk or max(1, math.ceil(n_reps / (4 * workers)))
        bounds = [(s, min(s + step, n_reps)) for s in range(0, n_reps, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_range, task, seed, a, b) for a, b in bounds]
            rows = [x for f in futures for x in f.result()]
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    variance: float
    raw_moments: tuple[float, float, float, float]
    se_mean: float

    def to_json(self) -> dict:
        d = asdict(self)
        d["moments"] = list(d.pop("raw_moments"))
        return d


def summarize(samples: Sequence[float]) -> SampleSummary:
    """Welford-style mean/variance (blockwise, merged with Chan's update);
    raw moments up to order 4 from centred sums about the final mean."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise ValueError("variance undefined for fewer than two samples")
    count, mean, m2 = 0, 0.0, 0.0
    for block in np.array_split(x, max(1, n // 65536)):
        nb = block.size
        mb = float(block.mean())
        m2b = float(((block - mb) ** 2).sum())
        total = count + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * count * nb / total
        count = total
    var = m2 / (n - 1)
    c = x - mean
    c2, c3, c4 = (c ** 2).mean(), (c ** 3).mean(), (c ** 4).mean()
    raw = (
        mean,
        c2 + mean ** 2,
        c3 + 3 * mean * c2 + mean ** 3,
        c4 + 4 * mean * c3 + 6 * mean ** 2 * c2 + mean ** 4,
    )
    return SampleSummary(n, mean, var, tuple(float(v) for v in raw), math.sqrt(var / n))


def moment(samples: Sequence[float], p: int) -> float:
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    return float(np.mean(x ** p))


# ---------------------------------------------------------------------------
# Empirical distribution functions
# ---------------------------------------------------------------------------

class Ecdf:
    """Right-continuous empirical CDF of a sample."""

    def __init__(self, samples: Sequence[float]):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise ValueError("an ECDF needs at least one sample")
        self.sorted_samples = x

    @property
    def n(self) -> int:
        return self.sorted_samples.size

    def __call__(self, t):
        return np.searchsorted(self.sorted_samples, t, side="right") / self.n


def _step_differences(a: Ecdf, b: Ecdf) -> np.ndarray:
    # Both step functions only jump at sample points; F_b - F_a evaluated at
    # every jump location covers every value the difference takes.
    grid = np.union1d(a.sorted_samples, b.sorted_samples)
    return b(grid) - a(grid)


def ks_distance(a: Ecdf, b: Ecdf) -> float:
    """sup_x |F_a(x) - F_b(x)|."""
    return float(np.max(np.abs(_step_differences(a, b))))


def dominance_margin(a: Ecdf, b: Ecdf) -> float:
    """max_x (F_b(x) - F_a(x)), clipped below at 0.

    ``a`` is the side claimed to be stochastically smaller (its CDF on top);
    a margin <= eps means F_a >= F_b - eps everywhere.
    """
    return max(0.0, float(np.max(_step_differences(a, b))))


def ks_null_band(n_a: int, n_b: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sided two-sample KS critical value at level alpha."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

def write_samples_csv(path: str | Path, samples: Sequence[float]) -> None:
    x = np.asarray(samples, dtype=float).ravel()
    with open(path, "w", newline="\n") as fh:
        fh.write("value\n")
        fh.writelines(f"{v!r}\n" for v in x.tolist())


def read_samples_csv(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "value":
            raise ValueError(f"unexpected header {header!r}")
        return np.array([float(line) for line in fh if line.strip()])


def write_summary_json(path: str | Path, summary: SampleSummary, **extra) -> None:
    payload = {**summary.to_json(), **extra}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
