"""Programmatic acceptance checks, grouped into suites.

Each check returns a :class:`CriterionResult` holding the measured values it
judged. Measured values depend only on the base seed, never on the worker
count, so the JSON emitted for a suite is byte-identical across ``workers``.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import graphgen, mcstats, oracles
from . import specfun as sf
from .cutsim import CutConfig, expected_total_given_tree
from .limitdist import LimitSamplerConfig, truncation_sensitivity
from .tasks import (
    BkTask,
    CompleteGraphTask,
    DirectTask,
    RandomTreeTask,
    RecordsTask,
    StarLimitTask,
)

SUITES: dict[str, tuple[int, ...]] = {
    "specfun": (1,),
    "oracle-small": (2,),
    "limit": (6, 7),
    "families": (3, 4, 5, 8, 9, 10),
    "all": tuple(range(1, 11)),
}

PATH_N = 2 ** 16
PATH_REPS_K2 = 5000  # the first 2000 of these are the mean-check sample
PATH_REPS_K3 = 2000
MOMENT_REPS = 2000


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    measured: dict
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items() if not isinstance(v, (list, dict)))
        return f"[{status}] criterion {self.cid} ({self.name}): {vals}"

    def to_json(self) -> dict:
        return {"id": self.cid, "name": self.name, "passed": self.passed,
                "measured": self.measured, "notes": self.notes}


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _subseed(seed: int, *tags: int) -> int:
    s = int(seed) & ((1 << 64) - 1)
    for t in tags:
        s = mcstats.splitmix64(s ^ mcstats.splitmix64(t))
    return s


class Session:
    """Shared state for one suite run: seed, worker count and a sample cache
    so criteria that judge the same experiment reuse one set of replicas."""

    def __init__(self, seed: int, workers: int = 1):
        self.seed = int(seed)
        self.workers = int(workers)
        self._cache: dict[str, np.ndarray] = {}

    def replicas(self, label: str, task, n_reps: int, *tags: int) -> np.ndarray:
        key = f"{label}|{n_reps}|{tags}"
        if key not in self._cache:
            self._cache[key] = mcstats.run_replicas(task, n_reps, _subseed(self.seed, *tags),
                                                    workers=self.workers)
        return self._cache[key]

    def stream(self, *tags: int) -> np.random.Generator:
        return mcstats.derive_stream(_subseed(self.seed, *tags), 0)

    def path_totals(self, k: int) -> np.ndarray:
        reps = PATH_REPS_K2 if k == 2 else PATH_REPS_K3
        return self.replicas(f"path{PATH_N}k{k}", RecordsTask(graphgen.path(PATH_N), k),
                             reps, 100, k)


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# 1. special-function identities
# ---------------------------------------------------------------------------

def check_specfun(s: Session) -> CriterionResult:
    m = {}
    lam = max(_rel(oracles.quad_lambda(k), sf.lambda_const(k)) for k in range(2, 7))
    grid = np.geomspace(0.1, 10.0, 5)
    xi_err = 0.0
    for k in (2, 3, 4):
        for a in grid:
            for b in grid:
                xi_err = max(xi_err, _rel(oracles.quad_xi_2d(k, a, b), float(sf.xi(k, a, b))))
    cot = max(_rel(oracles.quad_hyper_cot(k), math.pi / math.tan(math.pi / k) / (k - 2))
              for k in (3, 4, 5))
    rho_eta = max(abs(sf.rho(k, 1) - sf.eta(k, 1)) for k in range(2, 9))
    m.update(lambda_max_rel_err=lam, xi_max_rel_err=xi_err, hyper_cot_max_rel_err=cot,
             rho_eta_max_abs_diff=rho_eta)
    ok = lam < 1e-6 and xi_err < 1e-6 and cot < 1e-6 and rho_eta < 1e-12
    return CriterionResult(1, "special-function identities", ok, m)


# ---------------------------------------------------------------------------
# 2. small-instance oracle equivalence
# ---------------------------------------------------------------------------

SMALL_REPS = 10 ** 5


def check_oracle_small(s: Session) -> CriterionResult:
    worst = 0.0
    cases = 0
    failures = []
    for n in range(1, 6):
        for ti, t in enumerate(graphgen.all_rooted_trees(n)):
            for k in (1, 2):
                exact = oracles.dp_exact(t, k)
                for eng, task in (("records", RecordsTask(t, k)), ("direct", DirectTask(t.as_graph(), k))):
                    x = s.replicas(f"small-{eng}-{t.canonical()}-{k}", task, SMALL_REPS, 200, n, ti, k,
                                   0 if eng == "records" else 1)
                    summ = mcstats.summarize(x)
                    z = abs(summ.mean - exact) / summ.se_mean if summ.se_mean > 0 else (
                        0.0 if summ.mean == exact else math.inf)
                    worst = max(worst, z)
                    cases += 1
                    if z >= 3:
                        failures.append(f"{eng} {t.canonical()} k={k}: z={z:.3f}")
    harmonic = all(oracles.dp_exact(graphgen.path(n), 1, exact=True) ==
                   sum(Fraction(1, i) for i in range(1, n + 1)) for n in range(1, 7))
    perm_err = max(abs(oracles.exact_path_mean(n, k, k) - oracles.perm_records(n))
                   for n in range(1, 8) for k in (1, 2, 3))
    m = {"engine_cases": cases, "max_abs_z": worst, "dp_path_harmonic_exact": harmonic,
         "path_vs_perm_max_abs_err": perm_err}
    ok = not failures and harmonic and perm_err < 1e-10
    return CriterionResult(2, "small-instance oracle equivalence", ok, m, failures)


# ---------------------------------------------------------------------------
# 3-5. path: mean, variance, moment bracket
# ---------------------------------------------------------------------------

def check_path_mean(s: Session) -> CriterionResult:
    x = s.path_totals(2)[:2000]
    summ = mcstats.summarize(x)
    root_n = math.sqrt(PATH_N)
    target = math.sqrt(2 * math.pi)
    k1 = oracles.exact_path_mean(PATH_N, 2, 1)
    k2 = oracles.exact_path_mean(PATH_N, 2, 2)
    exact_total = k1 + k2
    mc_rel = _rel(summ.mean / root_n, target)
    exact_k1_rel = _rel(k1 / root_n, target)
    z = abs(summ.mean - exact_total) / summ.se_mean
    m = {"mc_mean_over_sqrt_n": summ.mean / root_n, "mc_rel_err": mc_rel,
         "exact_K1_over_sqrt_n": k1 / root_n, "exact_K1_rel_err": exact_k1_rel,
         "exact_K1_abs_err": abs(k1 / root_n - target),
         "exact_total": exact_total, "mc_vs_exact_z": z}
    notes = ["K_1 tolerance read as relative (0.02 * sqrt(2 pi)); absolute gap also reported"]
    ok = mc_rel < 0.03 and exact_k1_rel < 0.02 and z < 3
    return CriterionResult(3, "path mean, k=2", ok, m, notes)


VAR_CONST_K2 = 0.6514797


def check_path_variance(s: Session) -> CriterionResult:
    x = s.path_totals(2)
    summ = mcstats.summarize(x)
    ratio = summ.variance / PATH_N
    m = {"var_over_n": ratio, "stated_constant": VAR_CONST_K2,
         "closed_form_constant": sf.var_const(2), "rel_err": _rel(ratio, VAR_CONST_K2)}
    return CriterionResult(4, "path variance, k=2", abs(ratio - VAR_CONST_K2) < 0.10 * VAR_CONST_K2, m)


def check_moment_bracket(s: Session) -> CriterionResult:
    m = {}
    ok = True
    failures = []
    for k in (2, 3):
        y = s.path_totals(k)[:MOMENT_REPS] / PATH_N ** (1 - 1 / k)
        for ell in (1, 2, 3):
            p = y ** ell
            est = float(p.mean())
            se = float(p.std(ddof=1) / math.sqrt(p.size))
            lo, hi = sf.eta(k, 1) ** ell - 3 * se, sf.rho(k, ell) + 3 * se
            inside = lo <= est <= hi
            m[f"k{k}_l{ell}_moment"] = est
            m[f"k{k}_l{ell}_lower"] = lo
            m[f"k{k}_l{ell}_upper"] = hi
            if not inside:
                ok = False
                failures.append(f"k={k} l={ell}: {est:.5f} outside [{lo:.5f}, {hi:.5f}]")
    return CriterionResult(5, "moment bracket on paths", ok, m, failures)


# ---------------------------------------------------------------------------
# 6-7. limit law
# ---------------------------------------------------------------------------

LIMIT_PATH_N = 2 ** 17
LIMIT_PATH_REPS = 10 ** 4
BK_SAMPLES = 10 ** 5


def check_limit_law(s: Session) -> CriterionResult:
    paths = s.replicas("limit-path", RecordsTask(graphgen.path(LIMIT_PATH_N), 2),
                       LIMIT_PATH_REPS, 600) / math.sqrt(LIMIT_PATH_N)
    bk = s.replicas("bk2", BkTask(LimitSamplerConfig(2)), BK_SAMPLES, 601)
    ks = mcstats.ks_distance(mcstats.Ecdf(paths), mcstats.Ecdf(bk))
    mean_rel = _rel(float(bk.mean()), sf.eta(2, 1))
    m2_rel = _rel(mcstats.moment(bk, 2), sf.gamma_const(2))
    m = {"ks_distance": ks, "bk_mean": float(bk.mean()), "bk_mean_rel_err": mean_rel,
         "bk_second_moment": mcstats.moment(bk, 2), "bk_second_moment_rel_err": m2_rel,
         "bk_distinct_values": int(np.unique(bk).size)}
    return CriterionResult(6, "path totals vs limit sampler", ks < 0.05 and mean_rel < 0.02 and m2_rel < 0.04, m)


TRUNC_SAMPLES = 10 ** 4


def check_truncation(s: Session) -> CriterionResult:
    m = {}
    ok = True
    for k in (2, 5):
        rep = truncation_sensitivity(LimitSamplerConfig(k), TRUNC_SAMPLES, s.stream(700, k))
        m[f"k{k}_rel_mean_shift"] = rep.rel_mean_shift
        m[f"k{k}_cap_hit_fraction"] = rep.cap_hit_fraction
        m[f"k{k}_mean_terms"] = rep.mean_terms
        ok &= rep.rel_mean_shift < 1e-3 and rep.cap_hit_fraction < 0.01
    return CriterionResult(7, "truncation insensitivity", ok, m)


# ---------------------------------------------------------------------------
# 8. path is easiest to cut; complete graph
# ---------------------------------------------------------------------------

DOM_N = 50
DOM_REPS = 10 ** 4
COMPLETE_N = 10 ** 4
COMPLETE_REPS = 10 ** 4
STAR_SAMPLES = 10 ** 5


def check_bounds(s: Session) -> CriterionResult:
    m = {}
    notes = []
    path_tot = s.replicas("dom-path", RecordsTask(graphgen.path(DOM_N), 2), DOM_REPS, 800)
    band = mcstats.ks_null_band(DOM_REPS, DOM_REPS, 0.01)
    margins = []
    for j in range(5):
        t = graphgen.random_recursive(DOM_N, s.stream(801, j))
        other = s.replicas(f"dom-rrt{j}", RecordsTask(t, 2), DOM_REPS, 802, j)
        margins.append(mcstats.dominance_margin(mcstats.Ecdf(path_tot), mcstats.Ecdf(other)))
    m["ks_band_99"] = band
    m["max_dominance_margin"] = max(margins)
    ok = max(margins) < band
    for k in (1, 2):
        x = s.replicas(f"complete{k}", CompleteGraphTask(COMPLETE_N, k), COMPLETE_REPS, 810, k)
        lim = sf.star_limit_mean(k)
        star = s.replicas(f"starlim{k}", StarLimitTask(k), STAR_SAMPLES, 811, k)
        m[f"k{k}_complete_mean_over_n"] = float(x.mean()) / COMPLETE_N
        m[f"k{k}_star_limit_mean"] = lim
        m[f"k{k}_complete_rel_err"] = _rel(float(x.mean()) / COMPLETE_N, lim)
        m[f"k{k}_sampler_mean"] = float(star.mean())
        m[f"k{k}_sampler_rel_err"] = _rel(float(star.mean()), lim)
        ok &= m[f"k{k}_complete_rel_err"] < 0.02 and m[f"k{k}_sampler_rel_err"] < 0.02
    notes.append(f"complete graph: {COMPLETE_REPS} replicas per k")
    return CriterionResult(8, "path dominance and complete graph", ok, m, notes)


# ---------------------------------------------------------------------------
# 9. tree families
# ---------------------------------------------------------------------------

BIN_M = 14
BIN_REPS = 500
RRT_NS = (10 ** 3, 10 ** 4, 10 ** 5)
RRT_TREES = 200
GW_N = 200
GW_TREES = 2000


def check_families(s: Session) -> CriterionResult:
    m = {}
    cfg = CutConfig(2)
    ok = True
    # (a) complete binary tree
    tree = graphgen.complete_binary(BIN_M)
    x = s.replicas("binary", RecordsTask(tree, 2), BIN_REPS, 900)
    summ = mcstats.summarize(x)
    exact = expected_total_given_tree(tree, cfg)
    pred = sum(sf.asym_mean_binary(2, r, BIN_M) for r in (1, 2))
    m["binary_z"] = abs(summ.mean - exact) / summ.se_mean
    m["binary_ratio_to_asym"] = exact / pred
    ok &= m["binary_z"] < 3 and abs(m["binary_ratio_to_asym"] - 1) < 0.25
    # (b) random recursive trees
    ratios = []
    for n in RRT_NS:
        y = s.replicas(f"rrt{n}", RandomTreeTask("rrt", n, 2), RRT_TREES, 901, n)
        sim, est = y[:, :2].sum(axis=1), y[:, 2:].sum(axis=1)
        ratios.append(float(est.mean()) / sum(sf.asym_mean_rrt(2, r, n) for r in (1, 2)))
        m[f"rrt{n}_ratio_to_asym"] = ratios[-1]
        if n == RRT_NS[-1]:
            d = sim - est
            m["rrt_estimator_mean"] = float(est.mean())
            m["rrt_direct_mean"] = float(sim.mean())
            m["rrt_paired_z"] = abs(float(d.mean())) / (float(d.std(ddof=1)) / math.sqrt(d.size))
            ok &= m["rrt_paired_z"] < 3 and abs(ratios[-1] - 1) < 0.25
    gaps = [abs(r - 1) for r in ratios]
    m["rrt_monotone_toward_one"] = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok &= m["rrt_monotone_toward_one"]
    # (c) conditioned Galton-Watson, Poisson(1)
    y = s.replicas("gw", RandomTreeTask("gw", GW_N, 2), GW_TREES, 902)
    m["gw_K2_over_sqrt_n"] = float(y[:, 1].mean()) / math.sqrt(GW_N)
    m["gw_estimator_K2_over_sqrt_n"] = float(y[:, 3].mean()) / math.sqrt(GW_N)
    m["gw_target"] = math.sqrt(math.pi / 2)
    m["gw_rel_err"] = _rel(m["gw_K2_over_sqrt_n"], m["gw_target"])
    ok &= m["gw_rel_err"] < 0.15
    return CriterionResult(9, "tree families", ok, m)


# ---------------------------------------------------------------------------
# 10. curtain
# ---------------------------------------------------------------------------

CURTAIN_ELL = 3
CURTAIN_N = 3 * 2 ** 14 + 1
CURTAIN_REPS = 2000


def check_curtain(s: Session) -> CriterionResult:
    k = 2
    t = graphgen.curtain(CURTAIN_ELL, CURTAIN_N)
    x = s.replicas("curtain", RecordsTask(t, k), CURTAIN_REPS, 1000)
    scale = (CURTAIN_N / CURTAIN_ELL) ** (1 - 1 / k)
    ratio = float(x.mean()) / scale
    target = CURTAIN_ELL * sf.eta(k, 1)
    m = {"mean_over_scale": ratio, "target": target, "rel_err": _rel(ratio, target)}
    notes = ["normalising by (n/ell)^(1-1/k); the alternative exponent 1/k coincides with it at k=2"]
    return CriterionResult(10, "curtain", m["rel_err"] < 0.05, m, notes)


CHECKS: dict[int, Callable[[Session], CriterionResult]] = {
    1: check_specfun, 2: check_oracle_small, 3: check_path_mean, 4: check_path_variance,
    5: check_moment_bracket, 6: check_limit_law, 7: check_truncation, 8: check_bounds,
    9: check_families, 10: check_curtain,
}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> str:
        payload = {"suite": self.suite, "seed": self.seed, "passed": self.passed,
                   "criteria": [r.to_json() for r in self.results]}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run_suite(suite: str, seed: int, workers: int = 1, log: Callable[[str], None] | None = None,
              session: Session | None = None) -> SuiteReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    session = session or Session(seed, workers)
    results = []
    for cid in SUITES[suite]:
        t0 = time.perf_counter()
        res = CHECKS[cid](session)
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if log:
            log(f"{res.line()} [{res.seconds:.1f}s]")
            for note in res.notes:
                log(f"    note: {note}")
    return SuiteReport(suite, int(seed), results)


def write_report(path: str | Path, report: SuiteReport) -> None:
    Path(path).write_text(report.to_json())
