"""Samplers for the limit law B_k of K(P_n)/n^{1-1/k} and for the complete-graph limit.

B_k = sum_p B_p with

    S_p^k = U_{p-1} S_{p-1}^k + k! E_p        (S_1^k = k! E_1)
    B_p   = (1 - U_p) * (U_1 ... U_{p-1})^{1-1/k} * S_p

for i.i.d. U_j ~ Unif[0,1), E_j ~ Exp(1). The series is truncated once
``patience`` consecutive terms each fall below ``term_tol`` times the running
sum, or at ``p_cap`` terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError
from .specfun import star_conditional_mean

_BLOCK = 16


@dataclass(frozen=True)
class LimitSamplerConfig:
    k: int
    term_tol: float = 1e-9
    patience: int = 8
    p_cap: int = 400

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise DomainError("k must be an integer >= 2")
        if not self.term_tol > 0:
            raise DomainError("term_tol must be positive")
        if not 1 <= self.patience <= self.p_cap:
            raise DomainError("need 1 <= patience <= p_cap")


class BkSample(NamedTuple):
    value: float
    terms: int
    hit_cap: bool  # truncation warning: p_cap reached before the patience rule fired


class BkPath(NamedTuple):
    u: np.ndarray
    e: np.ndarray
    s_pow: np.ndarray  # S_p^k
    b: np.ndarray


def _draws(stream):
    while True:
        u = stream.random(_BLOCK)
        e = stream.standard_exponential(_BLOCK)
        yield from zip(u.tolist(), e.tolist())


def _run(cfg: LimitSamplerConfig, stream, keep_path: bool):
    k = cfg.k
    kfact = math.factorial(k)
    inv_k = 1.0 / k
    expo = 1.0 - inv_k
    carry = 0.0
    prev_u = 0.0
    log_prefix = 0.0
    total = 0.0
    streak = 0
    path = [] if keep_path else None
    p = 0
    hit_cap = False
    for u, e in _draws(stream):
        p += 1
        carry = prev_u * carry + kfact * e
        term = (1.0 - u) * math.exp(expo * log_prefix) * carry ** inv_k
        total += term
        if path is not None:
            path.append((u, e, carry, term))
        streak = streak + 1 if term < cfg.term_tol * total else 0
        if streak >= cfg.patience:
            break
        if p >= cfg.p_cap:
            hit_cap = True
            break
        log_prefix += math.log(u) if u > 0.0 else -math.inf
        prev_u = u
    return BkSample(total, p, hit_cap), path


def sample_bk(cfg: LimitSamplerConfig, stream) -> BkSample:
    """One truncated draw of B_k.

    ``stream`` needs ``random(size)`` and ``standard_exponential(size)``;
    draws are taken in fixed-size blocks, so two configs that differ only in
    their stopping rule consume identical prefixes of the same stream.
    """
    return _run(cfg, stream, keep_path=False)[0]


def bk_path(cfg: LimitSamplerConfig, stream) -> tuple[BkSample, BkPath]:
    """Like :func:`sample_bk` but also returns every (U_p, E_p, S_p^k, B_p)."""
    sample, rows = _run(cfg, stream, keep_path=True)
    u, e, s_pow, b = (np.array(col) for col in zip(*rows))
    return sample, BkPath(u, e, s_pow, b)


def sample_star_limit(k: int, stream) -> float:
    """E[min(Poisson(Y), k) | Y] with Y ~ Gamma(k): one draw of lim K(K_n)/n."""
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    y = float(stream.standard_exponential(int(k)).sum())
    return float(star_conditional_mean(int(k), y))


@dataclass(frozen=True)
class TruncationReport:
    n_samples: int
    p_cap: int
    mean_at_cap: float
    mean_at_double_cap: float
    mean_abs_diff: float
    rel_mean_shift: float
    cap_hit_fraction: float
    mean_terms: float


def truncation_sensitivity(cfg: LimitSamplerConfig, n_samples: int,
                           stream: np.random.Generator) -> TruncationReport:
    """Replay each draw with p_cap and 2*p_cap from the same stream state."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    doubled = replace(cfg, p_cap=2 * cfg.p_cap)
    bitgen = stream.bit_generator
    a = np.empty(n_samples)
    b = np.empty(n_samples)
    hits = 0
    terms = 0
    for i in range(n_samples):
        state = bitgen.state
        sa = sample_bk(cfg, stream)
        bitgen.state = state
        sb = sample_bk(doubled, stream)
        a[i], b[i] = sa.value, sb.value
        hits += sa.hit_cap
        terms += sa.terms
    mb = float(b.mean())
    return TruncationReport(
        n_samples=n_samples,
        p_cap=cfg.p_cap,
        mean_at_cap=float(a.mean()),
        mean_at_double_cap=mb,
        mean_abs_diff=float(np.abs(a - b).mean()),
        rel_mean_shift=abs(float(a.mean()) - mb) / mb if mb else 0.0,
        cap_hit_fraction=hits / n_samples,
        mean_terms=terms / n_samples,
    )


def histogram(samples: Sequence[float], bins: int = 60):
    """Bin edges, counts, and the expected counts under a normal law with the
    sample's mean and variance."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2 or bins < 1:
        raise DomainError("need at least two samples and one bin")
    counts, edges = np.histogram(x, bins=bins)
    mu, sd = float(x.mean()), float(x.std(ddof=1))
    cdf = np.array([0.5 * (1 + math.erf((t - mu) / (sd * math.sqrt(2)))) for t in edges])
    overlay = x.size * np.diff(cdf)
    return edges, counts, overlay


def write_histogram_csv(path: str | Path, edges, counts, overlay) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("bin_left,bin_right,count,normal_overlay\n")
        for lo, hi, c, o in zip(edges[:-1], edges[1:], counts, overlay):
            fh.write(f"{lo!r},{hi!r},{int(c)},{float(o)!r}\n")
