"""Closed-form constants, record probabilities and the special functions behind them.

Everything here is deterministic and pure. Integer-shape incomplete gamma
values use the finite Poisson sum, so the record-probability layer carries
no series-truncation error of its own.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import DomainError, NumericalError
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate, integrate_batch

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "reg_upper_gamma",
    "log_reg_upper_gamma",
    "record_prob",
    "record_probs",
    "eta",
    "lambda_const",
    "gamma_const",
    "var_const",
    "rho",
    "zeta",
    "hyper2f1",
    "xi",
    "xi_polar",
    "star_conditional_mean",
    "star_limit_mean",
    "asym_mean_path",
    "asym_mean_binary",
    "asym_mean_rrt",
    "asym_mean_gw",
]


def _finite(*values):
    for v in values:
        arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"non-finite argument: {v!r}")


def _pos_int(name, v, minimum=1):
    if isinstance(v, bool) or int(v) != v or v < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {v!r}")
    return int(v)


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Incomplete gamma with integer shape
# ---------------------------------------------------------------------------

def reg_upper_gamma(k: int, x: ArrayLike) -> ArrayLike:
    """Q(k, x) = P(Gamma(k) > x) = exp(-x) * sum_{j<k} x^j / j!."""
    k = _pos_int("k", k)
    _finite(x)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("x must be nonnegative")
    with np.errstate(divide="ignore"):
        logx = np.log(xa)
    total = np.exp(-xa)
    for j in range(1, k):
        total = total + np.exp(-xa + j * logx - math.lgamma(j + 1))
    return _scalar_or_array(x, np.clip(total, 0.0, 1.0))


def _log_lower_series(k, x):
    # log P(k, x) for 0 <= x < 1 via x^k e^{-x}/k! * sum_m x^m / ((k+1)...(k+m)).
    term = np.ones_like(x)
    acc = np.ones_like(x)
    m = 1
    while True:
        term = term * x / (k + m)
        acc = acc + term
        if np.all(term <= 1e-17 * acc) or m > 200:
            break
        m += 1
    with np.errstate(divide="ignore"):
        return -x + k * np.log(x) - math.lgamma(k + 1) + np.log(acc)


def log_reg_upper_gamma(k: int, x: ArrayLike) -> ArrayLike:
    """log Q(k, x), accurate also where Q is close to one (small x)."""
    k = _pos_int("k", k)
    xa = np.asarray(x, dtype=float)
    out = np.empty_like(xa)
    small = xa < 1.0
    if np.any(small):
        xs = xa[small]
        out[small] = np.log1p(-np.exp(_log_lower_series(k, xs)))
    if np.any(~small):
        xl = xa[~small]
        terms = np.stack([-xl + j * np.log(xl) - math.lgamma(j + 1) for j in range(k)])
        top = terms.max(axis=0)
        out[~small] = top + np.log(np.exp(terms - top).sum(axis=0))
    return _scalar_or_array(x, out)


# ---------------------------------------------------------------------------
# Record probabilities
# ---------------------------------------------------------------------------

_TAIL_EXPONENT = 60.0
_CHUNK = 4096


def _bisect_increasing(g, target, lo, hi, iters=80):
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = g(mid) >= target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return hi


def _record_cutoff(r, k, d):
    # Beyond X = min(x1, x2) the integrand's mass is below e^{-60}: x1 makes
    # Q(k,x)^d <= e^{-60}, x2 makes the Gamma(r) tail <= e^{-60}.
    x2 = float(_bisect_increasing(lambda x: -log_reg_upper_gamma(r, x), _TAIL_EXPONENT,
                                  0.0, 10.0 * _TAIL_EXPONENT + 10.0 * r))
    x1 = _bisect_increasing(lambda x: -d * log_reg_upper_gamma(k, x), _TAIL_EXPONENT,
                            np.zeros_like(d), np.full_like(d, x2))
    return np.minimum(x1, x2)


def record_probs(r: int, k: int, d: np.ndarray, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Vectorised :func:`record_prob` over an array of ancestor counts ``d``."""
    k = _pos_int("k", k)
    r = _pos_int("r", r)
    if r > k:
        raise DomainError("r must satisfy 1 <= r <= k")
    d = np.asarray(d)
    if d.size and (np.any(d < 0) or np.any(d != np.floor(d))):
        raise DomainError("d must be a nonnegative integer")
    d = d.astype(float)
    out = np.ones(d.shape)
    flat_d = d.ravel()
    flat_out = out.ravel()
    todo = np.flatnonzero(flat_d > 0)
    lg_r = math.lgamma(r)
    for start in range(0, todo.size, _CHUNK):
        idx = todo[start:start + _CHUNK]
        dd = flat_d[idx]
        upper = _record_cutoff(r, k, dd)

        def f(x, owner, dd=dd):
            logq = log_reg_upper_gamma(k, x)
            with np.errstate(divide="ignore"):
                log_dens = (r - 1) * np.log(x) - x - lg_r if r > 1 else -x
            return np.exp(log_dens + dd[owner][:, None] * logq)

        vals, _ = integrate_batch(f, np.zeros_like(dd), upper, quad, initial_panels=8)
        flat_out[idx] = np.clip(vals, 0.0, 1.0)
    return out.reshape(d.shape)


def record_prob(r: int, k: int, d: int, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Probability that a node with ``d`` proper ancestors is an r-record.

    Equals the integral over x of the Gamma(r) density times Q(k, x)^d.
    """
    d_int = _pos_int("d", d, minimum=0)
    return float(record_probs(r, k, np.array([d_int]), quad)[0])


# ---------------------------------------------------------------------------
# Moment constants
# ---------------------------------------------------------------------------

def _lfact(k):
    return math.lgamma(k + 1)


def eta(k: int, r: int) -> float:
    """Leading coefficient of E[K_r] on a path, for 1 <= r < k."""
    k = _pos_int("k", k, 2)
    r = _pos_int("r", r)
    if r >= k:
        raise DomainError("eta is defined only for r < k (r = k grows like log n)")
    return math.exp(r / k * _lfact(k) + math.lgamma(r / k) - math.lgamma(r)) / (k - r)


def lambda_const(k: int) -> float:
    k = _pos_int("k", k, 2)
    if k == 2:
        return math.pi ** 2 / 4
    return (math.pi / math.tan(math.pi / k) * math.gamma(2 / k)
            * math.exp(2 / k * _lfact(k)) / (2 * (k - 2) * (k - 1)))


def gamma_const(k: int) -> float:
    """Second-moment coefficient: E[K_1^2] ~ gamma_const(k) n^{2-2/k}."""
    k = _pos_int("k", k, 2)
    return math.gamma(2 / k) * math.exp(2 / k * _lfact(k)) / (k - 1) + 2 * lambda_const(k)


def var_const(k: int) -> float:
    k = _pos_int("k", k, 2)
    return gamma_const(k) - eta(k, 1) ** 2


def rho(k: int, ell: int) -> float:
    """Upper bound on the limsup of the ell-th moment of K_1 / n^{1-1/k}."""
    k = _pos_int("k", k, 2)
    ell = _pos_int("ell", ell)
    base = math.pi * math.exp(_lfact(k) / k) / (k * math.sin(math.pi / k))
    return math.exp(math.lgamma(ell + 1) - math.lgamma(ell + 1 - ell / k) + ell * math.log(base))


def zeta(k: int, ell: int) -> float:
    """Dirichlet (beta) integral of prod x_j^{-1/k} over the unit simplex."""
    k = _pos_int("k", k, 2)
    ell = _pos_int("ell", ell)
    return math.exp(ell * math.lgamma((k - 1) / k) - math.lgamma(1 + ell - ell / k))


# ---------------------------------------------------------------------------
# Gauss hypergeometric function on the real line z < 1
# ---------------------------------------------------------------------------

_SERIES_EPS = 1e-17


def _rgamma(x):
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _near_int(x):
    return abs(x - round(x)) < 1e-12


def _series(a, b, c, z, max_terms):
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    acc = np.ones_like(z)
    for n in range(max_terms):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1))) * z
        acc = acc + term
        if np.all(np.abs(term) <= _SERIES_EPS * np.abs(acc)):
            return acc
    raise NumericalError(f"2F1 series did not converge in {max_terms} terms")


def hyper2f1(a: float, b: float, c: float, z: ArrayLike, max_terms: int = 20000) -> ArrayLike:
    """Gauss hypergeometric function F(a, b; c; z) for real z < 1.

    Regions: the power series for |z| <= 1/2; Pfaff's transformation onto
    z/(z-1) for -2 <= z < -1/2; the 1/z connection formula for z < -2
    (needs a - b non-integer); the 1 - z connection formula for 1/2 < z < 1
    (falls back to the slow direct series when c - a - b is an integer).
    """
    _finite(a, b, c, z)
    if c <= 0 and c == math.floor(c):
        raise DomainError("c must not be a nonpositive integer")
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(za >= 1):
        raise DomainError("supported range is z < 1")
    out = np.empty_like(za)

    direct = np.abs(za) <= 0.5
    if np.any(direct):
        out[direct] = _series(a, b, c, za[direct], max_terms)

    pfaff = (za < -0.5) & (za >= -2.0)
    if np.any(pfaff):
        zp = za[pfaff]
        out[pfaff] = (1 - zp) ** (-a) * _series(a, c - b, c, zp / (zp - 1), max_terms)

    far = za < -2.0
    if np.any(far):
        if _near_int(a - b):
            raise DomainError("a - b integer: 1/z connection formula unavailable")
        zf = za[far]
        w = 1.0 / zf
        c1 = math.gamma(c) * math.gamma(b - a) * _rgamma(b) * _rgamma(c - a)
        c2 = math.gamma(c) * math.gamma(a - b) * _rgamma(a) * _rgamma(c - b)
        t1 = c1 * (-zf) ** (-a) * _series(a, a - c + 1, a - b + 1, w, max_terms) if c1 else 0.0
        t2 = c2 * (-zf) ** (-b) * _series(b, b - c + 1, b - a + 1, w, max_terms) if c2 else 0.0
        out[far] = t1 + t2

    near_one = za > 0.5
    if np.any(near_one):
        zn = za[near_one]
        s = c - a - b
        if _near_int(s):
            out[near_one] = _series(a, b, c, zn, max_terms)
        else:
            w = 1 - zn
            c1 = math.gamma(c) * math.gamma(s) * _rgamma(c - a) * _rgamma(c - b)
            c2 = math.gamma(c) * math.gamma(-s) * _rgamma(a) * _rgamma(b)
            out[near_one] = (c1 * _series(a, b, 1 - s, w, max_terms)
                             + c2 * w ** s * _series(c - a, c - b, 1 + s, w, max_terms))

    return float(out[0]) if np.ndim(z) == 0 else out


def xi(k: int, a: ArrayLike, b: ArrayLike, quad: QuadratureSpec = DEFAULT_QUAD) -> ArrayLike:
    """Double-exponential integral over {x >= y >= 0} of exp(-a x^k/k! - b y^k/k!).

    Evaluated in closed form through F(2/k, 1/k; 1 + 1/k; -b/a); if the
    hypergeometric evaluation fails the one-dimensional polar form is used.
    """
    k = _pos_int("k", k, 2)
    _finite(a, b)
    aa, bb = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any(aa <= 0) or np.any(bb <= 0):
        raise DomainError("a and b must be positive")
    pref = math.gamma(2 / k) / k * np.exp(2 / k * (_lfact(k) - np.log(aa)))
    try:
        f = hyper2f1(2 / k, 1 / k, 1 + 1 / k, -(bb / aa))
        out = pref * f
    except NumericalError:
        out = np.vectorize(lambda s, t: xi_polar(k, s, t, quad))(aa, bb)
    return float(out) if np.ndim(out) == 0 else out


def xi_polar(k: int, a: float, b: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """xi via its polar reduction, integrated on [0, 1] after u = t^k.

    k * int_0^1 (1 + (b/a) t^k)^{-2/k} dt times Gamma(2/k)/k^2 (k!/a)^{2/k}.
    """
    k = _pos_int("k", k, 2)
    if a <= 0 or b <= 0:
        raise DomainError("a and b must be positive")
    ratio = b / a
    # the integrand drops from 1 near t ~ ratio^{-1/k}; put a panel edge there
    knee = min(1.0, ratio ** (-1.0 / k))
    g = lambda t: (1.0 + ratio * t ** k) ** (-2.0 / k)
    body = integrate(g, 0.0, knee, quad, initial_panels=4)
    if knee < 1.0:
        body += integrate(g, knee, 1.0, quad, initial_panels=16)
    return math.gamma(2 / k) / k * math.exp(2 / k * (_lfact(k) - math.log(a))) * body


# ---------------------------------------------------------------------------
# Star / complete graph
# ---------------------------------------------------------------------------

def star_conditional_mean(k: int, y: ArrayLike) -> ArrayLike:
    """E[min(Z, k)] for Z ~ Poisson(y): sum_{i=1}^k P(Z >= i)."""
    k = _pos_int("k", k)
    _finite(y)
    if np.any(np.asarray(y) < 0):
        raise DomainError("y must be nonnegative")
    total = sum(1.0 - np.asarray(reg_upper_gamma(i, y)) for i in range(1, k + 1))
    return _scalar_or_array(y, np.asarray(total, dtype=float))


def star_limit_mean(k: int) -> float:
    """Limit of E[K(complete graph on n nodes)] / n: k (1 - C(2k, k) / 4^k)."""
    k = _pos_int("k", k)
    return k * (1.0 - math.comb(2 * k, k) / 4.0 ** k)


# ---------------------------------------------------------------------------
# Leading-order predictions for tree families
# ---------------------------------------------------------------------------

def _depth_coef(k, r):
    return math.exp(r / k * _lfact(k) + math.lgamma(r / k) - math.lgamma(r)) / k


def _check_kr(k, r):
    k = _pos_int("k", k)
    r = _pos_int("r", r)
    if r > k:
        raise DomainError("r must satisfy 1 <= r <= k")
    return k, r


def asym_mean_path(k: int, r: int, n: float) -> float:
    k, r = _check_kr(k, r)
    if n < 2:
        raise DomainError("n must be >= 2")
    if r == k:
        return math.log(n)
    return eta(k, r) * n ** (1 - r / k)


def asym_mean_binary(k: int, r: int, m: int) -> float:
    """Complete binary tree of height m (2^{m+1} - 1 nodes)."""
    k, r = _check_kr(k, r)
    m = _pos_int("m", m)
    return _depth_coef(k, r) * 2.0 ** (m + 1) / m ** (r / k)


def asym_mean_rrt(k: int, r: int, n: float) -> float:
    k, r = _check_kr(k, r)
    if n <= 1:
        raise DomainError("n must be > 1")
    return _depth_coef(k, r) * n / math.log(n) ** (r / k)


def asym_mean_gw(k: int, r: int, sigma: float, n: float) -> float:
    """Conditioned Galton-Watson tree with offspring variance sigma^2."""
    k, r = _check_kr(k, r)
    if not sigma > 0 or n < 1:
        raise DomainError("sigma must be positive and n >= 1")
    coef = _depth_coef(k, r) * math.gamma(1 - r / (2 * k)) * (sigma / math.sqrt(2)) ** (r / k)
    return coef * n ** (1 - r / (2 * k))
