"""Closed-form ROC/DROC predictions, the (r3, r4) fitter and structural reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.stats import binom

from .generators import BlockModelSpec, CommunityLog, DrocSpec, RocParams
from .graph import Graph, from_codes
from .motifs import local_clustering

DROC_CT_MAX = 6.2

WARN_TRIANGLE = "d^2 >= n: triangle-ratio regime d = o(sqrt n) violated"
WARN_FOUR_CYCLE = "d^3 >= n: four-cycle-ratio regime d = o(n^(1/3)) violated"
WARN_CLUSTERING = "s*q >= d: clustering regime s*q = o(d) violated"
WARN_SMALL_S = "s < 2: communities too small for the asymptotic theory"


class FitRangeError(ValueError):
    """The pinned parameter admits no valid solution; ``feasible`` is the pin interval."""

    def __init__(self, message: str, feasible: tuple[float, float]):
        super().__init__(f"{message}; feasible pin interval {feasible}")
        self.feasible = feasible


@dataclass(frozen=True)
class Prediction:
    r3_pred: float
    r4_pred: float
    cc_pred: float
    regime_warnings: list[str] = field(default_factory=list)
    cc_exact_series: float | None = None

    def to_json_dict(self) -> dict:
        return asdict(self)


def predict_ratios(s: float, q: float) -> tuple[float, float]:
    """Limiting triangle- and four-cycle-to-edge ratios ``(s q^2 / 3, s^2 q^3 / 4)``."""
    return s * q * q / 3.0, s * s * q ** 3 / 4.0


def exact_series_cc(params: RocParams) -> float:
    """Binomial mixture over the number k of communities holding a vertex of
    ``s(s-1) q^3 k / (s q k + 2 - 2q)^2``, k = 1..rounds."""
    s, q = params.s, params.q
    K = params.rounds
    k = np.arange(1, K + 1, dtype=np.float64)
    pmf = binom.pmf(k, K, s / params.n)
    terms = s * (s - 1) * q ** 3 * k / (s * q * k + 2 - 2 * q) ** 2
    return float(np.sum(pmf * terms))


def predict_roc_stats(params: RocParams, exact_series: bool = False) -> Prediction:
    n, d, s, q = params.n, params.d, params.s, params.q
    r3, r4 = predict_ratios(s, q)
    warnings = []
    if d * d >= n:
        warnings.append(WARN_TRIANGLE)
    if d ** 3 >= n:
        warnings.append(WARN_FOUR_CYCLE)
    if s * q >= d:
        warnings.append(WARN_CLUSTERING)
    return Prediction(
        r3_pred=r3,
        r4_pred=r4,
        cc_pred=s * q * q / d,
        regime_warnings=warnings,
        cc_exact_series=exact_series_cc(params) if exact_series else None,
    )


@dataclass(frozen=True)
class FitResult:
    regime: str  # "exact" | "approximate" | "infeasible"
    s: float | None
    q: float | None
    r3: float
    r4: float
    r4_achieved: float | None
    r4_error_bound: float | None
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return asdict(self)


def fit_roc(r3: float, r4: float) -> FitResult:
    """Invert the ratio laws.

    exact:        9 r3^2 <= 4 r4, s = 16 r4^2 / (27 r3^3), q = 9 r3^2 / (4 r4)
    approximate:  3 r3 (3 r3 - 1) <= 4 r4 < 9 r3^2, q = 1, s = 3 r3 (r4 off by <= 3 r3 / 4)
    infeasible:   4 r4 < 3 r3 (3 r3 - 1), no graph has these ratios
    """
    if not r3 > 0:
        raise ValueError(
            f"r3 must be positive (got {r3}); a triangle-free target is matched by plain "
            "Erdos-Renyi graphs, whose ratios vanish"
        )
    if not r4 >= 0:
        raise ValueError(f"r4 must be nonnegative, got {r4}")
    if 9 * r3 * r3 <= 4 * r4:
        s = 16 * r4 * r4 / (27 * r3 ** 3)
        q = 9 * r3 * r3 / (4 * r4)
        return FitResult("exact", s, q, r3, r4, r4, 0.0, [WARN_SMALL_S] if s < 2 else [])
    if 3 * r3 * (3 * r3 - 1) <= 4 * r4:
        s = 3 * r3
        return FitResult("approximate", s, 1.0, r3, r4, 9 * r3 * r3 / 4, 3 * r3 / 4,
                         [WARN_SMALL_S] if s < 2 else [])
    return FitResult("infeasible", None, None, r3, r4, None, None)


@dataclass(frozen=True)
class ClusteringFit:
    d: float
    s: float
    q: float
    target_cc: float

    def to_json_dict(self) -> dict:
        return asdict(self)


def fit_roc_clustering(d: float, target_cc: float, s: float | None = None,
                       q: float | None = None) -> ClusteringFit:
    """Solve ``s q^2 = target_cc * d`` for whichever of s, q is not pinned."""
    if (s is None) == (q is None):
        raise ValueError("pin exactly one of s or q")
    if not 0 < target_cc < 1:
        raise ValueError(f"target clustering must lie in (0, 1), got {target_cc}")
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    prod = target_cc * d
    if s is not None:
        if s < 2:
            raise ValueError(f"pinned s must be at least 2, got {s}")
        q_fit = math.sqrt(prod / s)
        if q_fit > 1:
            raise FitRangeError(f"q = {q_fit:.6g} exceeds 1 for s = {s}", (max(2.0, prod), math.inf))
        return ClusteringFit(d, float(s), q_fit, target_cc)
    if not 0 < q <= 1:
        raise ValueError(f"pinned q must lie in (0, 1], got {q}")
    s_fit = prod / (q * q)
    if s_fit < 2:
        raise FitRangeError(f"s = {s_fit:.6g} is below 2 for q = {q}",
                            (0.0, min(1.0, math.sqrt(prod / 2))))
    return ClusteringFit(d, s_fit, float(q), target_cc)


@dataclass(frozen=True)
class ConnectivityReport:
    n: int
    d: float
    s: float
    q: float
    c: float
    eps: float
    isolated_lower_ok: bool  # (s-1) q (ln n + c) <= d
    isolated_upper_ok: bool  # d <= (s-1) q e^{sq} (1 - eps)
    expected_isolated_bound: float  # e^{-c} / (1 - eps)
    community_isolation_ok: bool  # d / q > ln(n d / (s^2 q))
    degree_lt2_ok: bool  # d > s q ln(n d / s)

    @property
    def isolated_vertex_band(self) -> tuple[bool, bool]:
        return self.isolated_lower_ok, self.isolated_upper_ok

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["isolated_vertex_band"] = list(self.isolated_vertex_band)
        return out


def connectivity_report(params: RocParams, c: float = 0.0, eps: float = 0.5) -> ConnectivityReport:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    n, d, s, q = params.n, params.d, params.s, params.q
    return ConnectivityReport(
        n=n, d=d, s=s, q=q, c=c, eps=eps,
        isolated_lower_ok=(s - 1) * q * (math.log(n) + c) <= d,
        isolated_upper_ok=d <= (s - 1) * q * math.exp(s * q) * (1 - eps),
        expected_isolated_bound=math.exp(-c) / (1 - eps),
        community_isolation_ok=d / q > math.log(n * d / (s * s * q)),
        degree_lt2_ok=d > s * q * math.log(n * d / s),
    )


def community_graph(log: CommunityLog, n: int | None = None) -> tuple[Graph, int]:
    """Graph on communities, adjacent when they share a vertex; also the isolated count."""
    n = log.n if n is None else n
    K = len(log)
    if K == 0:
        return from_codes(0, np.empty(0, dtype=np.int64)), 0
    sizes = log.sizes()
    rows = np.repeat(np.arange(K, dtype=np.int64), sizes)
    cols = np.concatenate(log.communities).astype(np.int64) if sizes.sum() else np.empty(0, np.int64)
    if cols.size and (cols.min() < 0 or cols.max() >= n):
        raise IndexError(f"community log has a vertex outside [0, {n})")
    B = csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(K, n))
    C = (B @ B.T).tocoo()
    keep = C.row < C.col
    g = from_codes(K, C.row[keep].astype(np.int64) * K + C.col[keep])
    return g, int(np.count_nonzero(g.degrees == 0))


@dataclass(frozen=True)
class BlockModelBound:
    k: int
    trace: float  # Tr(M^k), upper bound on expected k-cycles
    rank: int
    d_max: float
    bound: float  # rank(M) * d_max^k

    def to_json_dict(self) -> dict:
        return asdict(self)


def matrix_rank(M: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Rank by Gaussian elimination with partial pivoting; pivots below
    ``rel_tol * max|M|`` count as zero."""
    A = np.array(M, dtype=np.float64)
    if A.size == 0:
        return 0
    tol = rel_tol * np.abs(A).max()
    if tol == 0:
        return 0
    rows, cols = A.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        piv = rank + int(np.argmax(np.abs(A[rank:, col])))
        if abs(A[piv, col]) <= tol:
            continue
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        below = A[rank + 1:, col] / A[rank, col]
        A[rank + 1:, col:] -= np.outer(below, A[rank, col:])
        rank += 1
    return rank


def block_model_cycle_bound(spec: BlockModelSpec, k: int = 4) -> BlockModelBound:
    if k < 3:
        raise ValueError(f"cycle length must be at least 3, got {k}")
    M = spec.M
    P = M.copy()
    for _ in range(k - 1):
        P = P @ M
    d_max = float(M.sum(axis=1).max()) if M.size else 0.0
    r = matrix_rank(M)
    return BlockModelBound(k, float(np.trace(P)), r, d_max, r * d_max ** k)


@dataclass(frozen=True)
class ProfileRow:
    r_lo: int
    r_hi: int  # inclusive
    count: int
    mean_cc: float
    predicted: float


def degree_bins(max_degree: int, width: int = 1, linear_max: int = 50,
                log_ratio: float = 1.1) -> list[tuple[int, int]]:
    """Width-``width`` bins up to ``linear_max``, then geometric bins of ratio ``log_ratio``."""
    bins = []
    lo = 0
    while lo <= min(linear_max, max_degree):
        hi = min(lo + width - 1, linear_max)
        bins.append((lo, hi))
        lo = hi + 1
    while lo <= max_degree:
        hi = max(lo, int(math.floor(lo * log_ratio)))
        bins.append((lo, hi))
        lo = hi + 1
    return bins


def degree_cc_profile(graphs: Graph | Iterable[Graph], params: RocParams | None = None,
                      width: int = 1, linear_max: int = 50, log_ratio: float = 1.1,
                      min_count: int = 1) -> list[ProfileRow]:
    """Mean clustering per degree bin, pooled over ``graphs``.

    With ``params`` the rows start at ``r >= 2 s q`` and carry the predicted
    ``s q^2 / r`` averaged over the bin's vertices; without, ``predicted`` is NaN.
    """
    if isinstance(graphs, Graph):
        graphs = [graphs]
    degs, ccs = [], []
    for g in graphs:
        cc = local_clustering(g)
        ok = ~np.isnan(cc)
        degs.append(g.degrees[ok])
        ccs.append(cc[ok])
    if not degs:
        return []
    deg = np.concatenate(degs)
    cc = np.concatenate(ccs)
    if deg.size == 0:
        return []
    r_min = 2
    if params is not None:
        r_min = max(r_min, int(math.ceil(2 * params.s * params.q - 1e-12)))
    rows = []
    for lo, hi in degree_bins(int(deg.max()), width, linear_max, log_ratio):
        if hi < r_min:
            continue
        lo = max(lo, r_min)
        sel = (deg >= lo) & (deg <= hi)
        cnt = int(sel.sum())
        if cnt < max(1, min_count):
            continue
        pred = float(np.mean(params.s * params.q ** 2 / deg[sel])) if params is not None else math.nan
        rows.append(ProfileRow(lo, hi, cnt, float(cc[sel].mean()), pred))
    return rows


@dataclass(frozen=True)
class DrocCcPrediction:
    lo: float
    hi: float

    def to_json_dict(self) -> dict:
        return asdict(self)


def droc_predict_cc(spec: DrocSpec, t: float) -> DrocCcPrediction:
    """Interval of ``(sum t(u)^2)^2 / (d^3 n^2 s) * ((1 - e^-t)^2 q^2 + c_t q^3)`` over c_t in [0, 6.2]."""
    if not t > 0:
        raise ValueError(f"target degree must be positive, got {t}")
    tt = spec.targets
    pref = float(np.dot(tt, tt)) ** 2 / (spec.d ** 3 * spec.n ** 2 * spec.s)
    base = (1 - math.exp(-t)) ** 2 * spec.q ** 2
    return DrocCcPrediction(pref * base, pref * (base + DROC_CT_MAX * spec.q ** 3))


def mean_clustering(graphs: Sequence[Graph]) -> float:
    """Mean over graphs of the average clustering of degree >= 2 vertices."""
    vals = []
    for g in graphs:
        cc = local_clustering(g)
        vals.append(np.nanmean(cc) if np.any(~np.isnan(cc)) else np.nan)
    return float(np.nanmean(vals))


__all__ = [
    "Prediction", "FitResult", "ClusteringFit", "ConnectivityReport", "BlockModelBound",
    "ProfileRow", "DrocCcPrediction", "FitRangeError",
    "predict_ratios", "predict_roc_stats", "exact_series_cc", "fit_roc", "fit_roc_clustering",
    "connectivity_report", "community_graph", "block_model_cycle_bound", "matrix_rank",
    "degree_cc_profile", "degree_bins", "droc_predict_cc", "mean_clustering",
]
