"""Exact triangle / four-cycle counts and clustering coefficients.

The fast counters orient the graph by degree rank (degree, then index) and
run compiled kernels over the CSR arrays; each kernel is split over vertex
chunks so it can run on several threads while keeping integer totals exact.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .graph import Graph

BRUTE_FORCE_MAX_N = 12

# numba falls back to another threading layer when the system TBB is too old
warnings.filterwarnings("ignore", message=".*TBB threading layer.*")


@njit(cache=True)
def _tri_chunk(lo, hi, optr, oind, n, per_vertex):
    mark = np.zeros(n, dtype=np.bool_)
    total = 0
    for u in range(lo, hi):
        for a in range(optr[u], optr[u + 1]):
            mark[oind[a]] = True
        for a in range(optr[u], optr[u + 1]):
            v = oind[a]
            for b in range(optr[v], optr[v + 1]):
                w = oind[b]
                if mark[w]:
                    total += 1
                    per_vertex[u] += 1
                    per_vertex[v] += 1
                    per_vertex[w] += 1
        for a in range(optr[u], optr[u + 1]):
            mark[oind[a]] = False
    return total


@njit(parallel=True, cache=True)
def _tri_parallel(optr, oind, n, nchunks):
    # per-chunk per-vertex arrays keep the reduction free of races
    pv = np.zeros((nchunks, n), dtype=np.int64)
    totals = np.zeros(nchunks, dtype=np.int64)
    step = (n + nchunks - 1) // nchunks
    for c in prange(nchunks):
        lo = c * step
        hi = min(n, lo + step)
        if lo < hi:
            totals[c] = _tri_chunk(lo, hi, optr, oind, n, pv[c])
    return totals.sum(), pv.sum(axis=0)


@njit(cache=True)
def _c4_chunk(lo, hi, indptr, indices, rank, order):
    n = rank.size
    cnt = np.zeros(n, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    total = 0
    for pos in range(lo, hi):
        v = order[pos]
        rv = rank[v]
        nt = 0
        for a in range(indptr[v], indptr[v + 1]):
            u = indices[a]
            if rank[u] >= rv:
                continue
            for b in range(indptr[u], indptr[u + 1]):
                w = indices[b]
                if rank[w] >= rv:
                    continue
                if cnt[w] == 0:
                    touched[nt] = w
                    nt += 1
                cnt[w] += 1
        for i in range(nt):
            w = touched[i]
            c = cnt[w]
            total += c * (c - 1) // 2
            cnt[w] = 0
    return total


@njit(parallel=True, cache=True)
def _c4_parallel(indptr, indices, rank, order, nchunks):
    n = rank.size
    totals = np.zeros(nchunks, dtype=np.int64)
    step = (n + nchunks - 1) // nchunks
    for c in prange(nchunks):
        lo = c * step
        hi = min(n, lo + step)
        if lo < hi:
            totals[c] = _c4_chunk(lo, hi, indptr, indices, rank, order)
    return totals.sum()


def _degree_rank(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((np.arange(g.n), g.degrees)).astype(np.int64)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n, dtype=np.int64)
    return rank, order


def _oriented(g: Graph, rank: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Out-adjacency keeping only arcs toward higher rank."""
    e = g.edges
    if e.shape[0] == 0:
        return np.zeros(g.n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    u, v = e[:, 0], e[:, 1]
    flip = rank[u] > rank[v]
    src = np.where(flip, v, u)
    dst = np.where(flip, u, v)
    order = np.argsort(src, kind="stable")
    optr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.n), out=optr[1:])
    return optr, np.ascontiguousarray(dst[order])


def _chunks(threads: int | None) -> int:
    threads = numba.get_num_threads() if threads is None else max(1, int(threads))
    return max(1, threads)


def _set_threads(threads: int | None) -> None:
    if threads is not None:
        numba.set_num_threads(min(max(1, int(threads)), numba.config.NUMBA_NUM_THREADS))


def count_triangles(g: Graph, per_vertex: bool = False, threads: int | None = None):
    """Number of triangles; with ``per_vertex`` also the count through each vertex."""
    if g.m == 0:
        return (0, np.zeros(g.n, dtype=np.int64)) if per_vertex else 0
    rank, _ = _degree_rank(g)
    optr, oind = _oriented(g, rank)
    _set_threads(threads)
    total, pv = _tri_parallel(optr, oind, g.n, _chunks(threads))
    total = int(total)
    return (total, pv) if per_vertex else total


def count_four_cycles(g: Graph, threads: int | None = None) -> int:
    """Number of (not necessarily induced) 4-cycles, each counted once.

    Every cycle is found from its highest-ranked vertex ``v`` through the
    wedges ``v - u - w`` with ``u, w`` ranked below ``v``; a pair ``(v, w)``
    with c such wedges closes C(c, 2) cycles.
    """
    if g.m < 4:
        return 0
    rank, order = _degree_rank(g)
    _set_threads(threads)
    return int(_c4_parallel(g.indptr, g.indices, rank, order, _chunks(threads)))


def local_clustering(g: Graph, v: int | None = None, triangles: np.ndarray | None = None):
    """Clustering coefficient of ``v`` (or of every vertex when ``v`` is None).

    Undefined values (degree < 2) are NaN in the array form and None for a
    single vertex.
    """
    if triangles is None:
        _, triangles = count_triangles(g, per_vertex=True)
    deg = g.degrees.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = np.where(deg >= 2, triangles / (deg * (deg - 1) / 2), np.nan)
    if v is None:
        return cc
    val = cc[v]
    return None if np.isnan(val) else float(val)


@dataclass(frozen=True)
class MotifStats:
    n: int
    m: int
    c3: int
    c4: int
    r3: float | None
    r4: float | None
    avg_clustering: float | None
    clustering_defined: int
    degree_histogram: dict[int, int]
    per_vertex_triangles: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "c3": self.c3,
            "c4": self.c4,
            "r3": self.r3,
            "r4": self.r4,
            "avg_clustering": self.avg_clustering,
            "degree_histogram": [[k, v] for k, v in sorted(self.degree_histogram.items())],
        }


def motif_stats(g: Graph, keep_per_vertex: bool = False, threads: int | None = None) -> MotifStats:
    c3, tri = count_triangles(g, per_vertex=True, threads=threads)
    c4 = count_four_cycles(g, threads=threads)
    cc = local_clustering(g, triangles=tri)
    defined = cc[~np.isnan(cc)]
    hist_vals = np.bincount(g.degrees) if g.n else np.zeros(0, dtype=np.int64)
    hist = {int(k): int(c) for k, c in enumerate(hist_vals) if c}
    m = g.m
    return MotifStats(
        n=g.n,
        m=m,
        c3=c3,
        c4=c4,
        r3=c3 / m if m else None,
        r4=c4 / m if m else None,
        avg_clustering=float(defined.mean()) if defined.size else None,
        clustering_defined=int(defined.size),
        degree_histogram=hist,
        per_vertex_triangles=tri if keep_per_vertex else None,
    )


def enumerate_cycles(adj: np.ndarray, k: int) -> int:
    """Exhaustive k-cycle count (k in {3, 4}) over vertex subsets of a dense adjacency."""
    count = 0
    for sub in itertools.combinations(range(adj.shape[0]), k):
        if k == 3:
            a, b, c = sub
            count += adj[a, b] and adj[b, c] and adj[a, c]
        else:
            a, b, c, d = sub
            # the three distinct Hamiltonian cycles on {a, b, c, d}
            for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
                count += adj[w, x] and adj[x, y] and adj[y, z] and adj[z, w]
    return int(count)


def dense_adjacency(g: Graph) -> np.ndarray:
    adj = np.zeros((g.n, g.n), dtype=bool)
    if g.m:
        adj[g.edges[:, 0], g.edges[:, 1]] = True
        adj |= adj.T
    return adj


def brute_force_cycles(g: Graph, k: int) -> int:
    """Exhaustive count of k-cycles (k in {3, 4}) for graphs with at most 12 vertices."""
    if k not in (3, 4):
        raise ValueError(f"only 3- and 4-cycles are supported, got k={k}")
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n={g.n}")
    return enumerate_cycles(dense_adjacency(g), k)


def four_cycles_from_codegrees(g: Graph) -> int:
    """(1/2) * sum over unordered pairs of C(codegree, 2), via a dense A^2 (small graphs)."""
    A = dense_adjacency(g).astype(np.int64)
    C = A @ A
    iu = np.triu_indices(g.n, 1)
    cd = C[iu]
    return int((cd * (cd - 1) // 2).sum() // 2)
