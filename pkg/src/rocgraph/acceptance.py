"""Acceptance criteria with pinned seeds and tolerances.

Each criterion is a function returning a :class:`CriterionResult`; the
``verify`` subcommand and ``tests/test_acceptance.py`` both run them from
:data:`CRITERIA`.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import analysis as an
from . import generators as gen
from .graph import build_graph, write_edge_list
from .motifs import (
    brute_force_cycles,
    count_four_cycles,
    count_triangles,
    dense_adjacency,
    enumerate_cycles,
    motif_stats,
)
from .rng import replication_seed, substream

BASE_SEED = 20180101


@dataclass
class CriterionResult:
    name: str
    passed: bool
    measured: str
    target: str
    tolerance: str
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        out = (f"[{flag}] {self.name}: measured {self.measured}; target {self.target}; "
               f"tolerance {self.tolerance} ({self.seconds:.1f}s)")
        if self.detail:
            out += f"\n        {self.detail}"
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# -- 1 ---------------------------------------------------------------------

REFERENCE_CC = {"er": 0.00270, "roc_q0.2": 0.06266, "roc_q0.1": 0.01595}


def clustering_reproduction(replications: int = 100) -> CriterionResult:
    n = 10_000
    runs = {
        "er": lambda seed: gen.gen_er(n, 0.0025, seed),
        "roc_q0.2": lambda seed: gen.gen_roc(gen.RocParams(n, 25, 30, 0.2), seed)[0],
        "roc_q0.1": lambda seed: gen.gen_roc(gen.RocParams(n, 25, 30, 0.1), seed)[0],
    }
    measured, ok = {}, True
    for i, (key, make) in enumerate(runs.items()):
        seeds = [replication_seed(BASE_SEED + 1000 * i, r) for r in range(replications)]
        mean = an.mean_clustering([make(s) for s in seeds])
        measured[key] = mean
        ok &= _rel(mean, REFERENCE_CC[key]) <= 0.10
    fmt = lambda d: ", ".join(f"{k}={v:.5f}" for k, v in d.items())
    return CriterionResult("clustering-reproduction", ok, fmt(measured), fmt(REFERENCE_CC), "+-10% relative")


# -- 2, 3 ------------------------------------------------------------------

RATIO_PARAMS = gen.RocParams(100_000, 20, 50, 0.3)


@lru_cache(maxsize=1)
def _ratio_runs(replications: int = 20) -> tuple[tuple[float, float], ...]:
    out = []
    for r in range(replications):
        g, _ = gen.gen_roc(RATIO_PARAMS, replication_seed(BASE_SEED + 2, r))
        st = motif_stats(g)
        out.append((st.r3, st.r4))
    return tuple(out)


def triangle_ratio() -> CriterionResult:
    target = an.predict_roc_stats(RATIO_PARAMS).r3_pred
    mean = float(np.mean([r3 for r3, _ in _ratio_runs()]))
    return CriterionResult("triangle-ratio", _rel(mean, target) <= 0.05, f"mean r3 = {mean:.4f}",
                           f"s q^2 / 3 = {target:.4f}", "5% relative")


def four_cycle_ratio() -> CriterionResult:
    target = an.predict_roc_stats(RATIO_PARAMS).r4_pred
    mean = float(np.mean([r4 for _, r4 in _ratio_runs()]))
    return CriterionResult("four-cycle-ratio", _rel(mean, target) <= 0.08, f"mean r4 = {mean:.4f}",
                           f"s^2 q^3 / 4 = {target:.4f}", "8% relative")


# -- 4 ---------------------------------------------------------------------

def fit_roundtrip(count: int = 1000) -> CriterionResult:
    g = substream(BASE_SEED, 4)
    worst = 0.0
    r3s = 10 ** g.uniform(-3, 3, count)
    r4s = 9 * r3s ** 2 / 4 * (1 + g.exponential(2.0, count))
    for r3, r4 in zip(r3s, r4s):
        fit = an.fit_roc(float(r3), float(r4))
        if fit.regime != "exact":
            worst = math.inf
            break
        p3, p4 = an.predict_ratios(fit.s, fit.q)
        worst = max(worst, _rel(p3, r3), _rel(p4, r4))
    infeasible = an.fit_roc(3, 10).regime == "infeasible"
    # approximate regime: r4 in [3 r3 (3 r3 - 1) / 4, 9 r3^2 / 4)
    a3 = 10 ** g.uniform(-2, 3, count)
    lo = np.maximum(0.0, 3 * a3 * (3 * a3 - 1) / 4)
    hi = 9 * a3 ** 2 / 4
    a4 = lo + (hi - lo) * g.random(count)
    approx_ok = True
    for r3, r4 in zip(a3, a4):
        fit = an.fit_roc(float(r3), float(r4))
        approx_ok &= fit.regime == "approximate" and abs(fit.r4_achieved - r4) <= fit.r4_error_bound
    ok = worst <= 1e-12 and infeasible and approx_ok
    return CriterionResult(
        "fit-roundtrip", ok,
        f"max rel err {worst:.2e}; (3,10) infeasible={infeasible}; approx bound holds={approx_ok}",
        "exact round trip, infeasible, error <= 3 r3 / 4", "1e-12 relative",
    )


# -- 5 ---------------------------------------------------------------------

def _all_small_graphs(max_n: int = 5):
    for n in range(1, max_n + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            yield build_graph(n, [p for b, p in enumerate(pairs) if mask >> b & 1])


def _random_small_graphs(count: int = 500, max_n: int = 9):
    g = substream(BASE_SEED, 5)
    for _ in range(count):
        n = int(g.integers(1, max_n + 1))
        p = g.random()
        pairs = [pr for pr in itertools.combinations(range(n), 2) if g.random() < p]
        yield build_graph(n, pairs)


def motif_oracle() -> CriterionResult:
    checked = mismatches = 0
    for graph in itertools.chain(_all_small_graphs(), _random_small_graphs()):
        checked += 1
        if (count_triangles(graph) != brute_force_cycles(graph, 3)
                or count_four_cycles(graph) != brute_force_cycles(graph, 4)):
            mismatches += 1
    return CriterionResult("motif-oracle", mismatches == 0, f"{mismatches} mismatches in {checked} graphs",
                           "0 mismatches", "exact")


# -- 6 ---------------------------------------------------------------------

def hypercube_fixture() -> CriterionResult:
    bad = []
    for dim in range(2, 11):
        h = gen.gen_hypercube(dim)
        closed = math.comb(dim, 2) * 2 ** (dim - 2)
        fast = count_four_cycles(h)
        if fast != closed:
            bad.append(f"dim {dim}: {fast} != {closed}")
        if dim <= 4 and enumerate_cycles(dense_adjacency(h), 4) != closed:
            bad.append(f"dim {dim}: brute force disagrees")
    return CriterionResult("hypercube", not bad, "; ".join(bad) or "all dims 2..10 match",
                           "C4 = C(dim,2) 2^(dim-2)", "exact")


# -- 7 ---------------------------------------------------------------------

def just_add_triangles(replications: int = 50) -> CriterionResult:
    n = 10_000
    worst = 0.0
    for t in (100, 1_000, 10_000):
        for r in range(replications):
            g = gen.gen_just_add_triangles(n, t, replication_seed(BASE_SEED + 7 * t, r))
            worst = max(worst, count_triangles(g) / g.m)
    return CriterionResult("just-add-triangles", worst <= 2 / 3, f"max C3/m = {worst:.5f}", "<= 2/3",
                           "every run")


# -- 8 ---------------------------------------------------------------------

def random_block_matrix(g: np.random.Generator) -> tuple[np.ndarray, float]:
    """Random symmetric matrix with entries in [0, 1]; half of the draws are low rank."""
    n = int(g.integers(5, 201))
    if g.random() < 0.5:
        k = int(g.integers(1, min(n, 12) + 1))
        labels = g.integers(0, k, n)
        P = g.random((k, k))
        P = (P + P.T) / 2
        M = P[labels][:, labels]
    else:
        M = g.random((n, n))
        M = (M + M.T) / 2
    d = float(g.uniform(1, 20))
    rows = M.sum(axis=1).max()
    if rows > d:
        M = M * (d / rows)
    return M, d


def block_model_trace(count: int = 100) -> CriterionResult:
    g = substream(BASE_SEED, 8)
    bound_ok = eig_ok = True
    worst_eig = 0.0
    for _ in range(count):
        M, d = random_block_matrix(g)
        res = an.block_model_cycle_bound(gen.BlockModelSpec(M), 4)
        # rank-1 constant-row-sum instances attain equality; allow for rounding
        bound_ok &= res.d_max <= d * (1 + 1e-12) and res.trace <= res.bound * (1 + 1e-12)
        lam = np.linalg.eigvalsh(M)
        ref = float(np.sum(lam ** 4))
        err = _rel(res.trace, ref)
        worst_eig = max(worst_eig, err)
        eig_ok &= err <= 1e-8
    return CriterionResult("block-model-trace", bound_ok and eig_ok,
                           f"bound holds={bound_ok}; max |tr - sum lambda^4| rel = {worst_eig:.2e}",
                           "Tr(M^4) <= rank d^4", "eigen cross-check 1e-8 relative")


# -- 9 ---------------------------------------------------------------------

DROC_N, DROC_S, DROC_Q = 20_000, 100, 0.5


def droc_targets() -> np.ndarray:
    raw = gen.sample_power_law(DROC_N, 2.5, BASE_SEED + 9)
    return gen.cap_targets(raw, DROC_S, DROC_Q)


def droc_degree_means(replications: int = 200) -> tuple[gen.DrocSpec, np.ndarray]:
    spec = gen.DrocSpec(DROC_N, droc_targets(), DROC_S, DROC_Q)
    total = np.zeros(DROC_N)
    for r in range(replications):
        g, _ = gen.gen_droc(spec, replication_seed(BASE_SEED + 90, r))
        total += g.degrees
    return spec, total / replications


def droc_checked_vertices(targets: np.ndarray) -> np.ndarray:
    top = np.argsort(-targets, kind="stable")[:20]
    rest = np.setdiff1d(np.arange(targets.size), top)
    rnd = substream(BASE_SEED, 9).choice(rest, size=20, replace=False)
    return np.concatenate([top, np.sort(rnd)])


def droc_expected_degree(replications: int = 200) -> CriterionResult:
    spec, means = droc_degree_means(replications)
    idx = droc_checked_vertices(spec.targets)
    expected = spec.targets[idx] * spec.s / (spec.s - 1)
    rel = np.abs(means[idx] / expected - 1)
    fails = int(np.count_nonzero(rel > 0.05))
    return CriterionResult(
        "droc-expected-degree", fails == 0,
        f"{fails}/40 vertices outside; max rel dev {rel.max():.3f}, median {np.median(rel):.3f}",
        "mean degree = t_i s/(s-1)", "5% relative per vertex",
        detail=("per-vertex sampling error over this many seeds is of the same order as the "
                "tolerance" if fails else ""),
    )


# -- 10 --------------------------------------------------------------------

PROFILE_PARAMS = gen.RocParams(100_000, 40, 30, 0.2)


def degree_clustering(replications: int = 20) -> CriterionResult:
    graphs = (gen.gen_roc(PROFILE_PARAMS, replication_seed(BASE_SEED + 10, r))[0]
              for r in range(replications))
    rows = an.degree_cc_profile(graphs, PROFILE_PARAMS, min_count=200)
    devs = [(_rel(row.mean_cc, row.predicted), row) for row in rows]
    worst, wrow = max(devs, key=lambda x: x[0])
    return CriterionResult(
        "degree-clustering", bool(rows) and worst <= 0.25,
        f"{len(rows)} bins (r >= 12, >= 200 samples); worst rel dev {worst:.3f} at r in [{wrow.r_lo}, {wrow.r_hi}]",
        "mean C(v | deg r) = s q^2 / r", "25% relative per bin",
    )


# -- 11 --------------------------------------------------------------------

CONNECT_PARAMS = gen.RocParams(100_000, 25, 30, 0.2)


def connectivity(replications: int = 20) -> CriterionResult:
    rep = an.connectivity_report(CONNECT_PARAMS, c=0.0, eps=0.5)
    no_iso_comm = with_iso_vertices = 0
    for r in range(replications):
        g, log = gen.gen_roc(CONNECT_PARAMS, replication_seed(BASE_SEED + 11, r))
        _, iso = an.community_graph(log)
        no_iso_comm += iso == 0
        with_iso_vertices += bool(np.any(g.degrees == 0))
    ok = (rep.community_isolation_ok and not rep.isolated_lower_ok
          and no_iso_comm == replications and with_iso_vertices >= 18 * replications // 20)
    return CriterionResult(
        "connectivity", ok,
        (f"community condition={rep.community_isolation_ok}, runs without isolated communities "
         f"{no_iso_comm}/{replications}; lower vertex inequality={rep.isolated_lower_ok}, runs with "
         f"isolated vertices {with_iso_vertices}/{replications}"),
        "condition holds, 20/20 clean; isolated vertices in >= 18/20", "counts",
    )


# -- 12 --------------------------------------------------------------------

def _determinism_cases():
    targets = gen.cap_targets(gen.sample_power_law(5_000, 2.5, 3), 50, 0.5)
    yield "roc", lambda seed, th: gen.gen_roc(gen.RocParams(20_000, 25, 30, 0.2), seed, threads=th)[0]
    yield "roc-fixed", lambda seed, th: gen.gen_roc_fixed(gen.RocParams(6_000, 24, 30, 0.2), seed, threads=th)[0]
    yield "droc", lambda seed, th: gen.gen_droc(gen.DrocSpec(5_000, targets, 50, 0.5), seed, threads=th)[0]
    yield "er", lambda seed, th: gen.gen_er(5_000, 0.004, seed)


def determinism(perturb: bool = False) -> CriterionResult:
    seed = BASE_SEED + 12
    diverged = []
    for name, make in _determinism_cases():
        outs = [write_edge_list(make(seed, 1)) for _ in range(3)]
        outs.append(write_edge_list(make(seed + 1 if perturb else seed, 4)))
        if any(o != outs[0] for o in outs[1:]):
            diverged.append(name)
    return CriterionResult("determinism", not diverged,
                           "diverged: " + ", ".join(diverged) if diverged else "all byte-identical",
                           "identical bytes over 3 runs and threads {1, 4}", "exact")


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "clustering-reproduction": clustering_reproduction,
    "triangle-ratio": triangle_ratio,
    "four-cycle-ratio": four_cycle_ratio,
    "fit-roundtrip": fit_roundtrip,
    "motif-oracle": motif_oracle,
    "hypercube": hypercube_fixture,
    "just-add-triangles": just_add_triangles,
    "block-model-trace": block_model_trace,
    "droc-expected-degree": droc_expected_degree,
    "degree-clustering": degree_clustering,
    "connectivity": connectivity,
    "determinism": determinism,
}


def run_criterion(name: str, **kwargs) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[name](**kwargs)
    res.seconds = time.perf_counter() - t0
    return res
