"""Seeded samplers for ROC, DROC and the baseline/fixture graphs.

All samplers are pure functions of ``(parameters, seed)``. Round-based
models draw round ``r`` from the substream keyed ``(seed, r)`` (see
:mod:`rocgraph.rng`), so the output does not depend on ``threads``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import zeta

from . import rng as _rng
from .graph import Graph, from_codes, empty_graph


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ROC_THREADS", "1")))
    except ValueError:
        return 1


def _round_count(x: float) -> int:
    return max(1, int(round(x)))


@dataclass(frozen=True)
class RocParams:
    n: int
    d: float
    s: float
    q: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not self.d > 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 0 < self.q <= 1:
            raise ValueError(f"q must lie in (0, 1], got {self.q}")
        if not 2 <= self.s <= self.n:
            raise ValueError(f"s must lie in [2, n={self.n}], got {self.s}")

    @property
    def rounds(self) -> int:
        """Number of communities, ``dn / (q s (s-1))`` rounded to nearest (at least 1)."""
        return _round_count(self.d * self.n / (self.q * self.s * (self.s - 1)))


@dataclass(frozen=True, eq=False)
class DrocSpec:
    n: int
    targets: np.ndarray
    s: float
    q: float
    d: float = field(init=False)

    def __post_init__(self):
        t = np.asarray(self.targets, dtype=np.float64)
        if t.ndim != 1 or t.size != self.n:
            raise ValueError(f"need exactly n={self.n} targets, got shape {t.shape}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not np.all(t > 0):
            i = int(np.argmin(t > 0))
            raise ValueError(f"target degree at index {i} is not positive: {t[i]}")
        if not 0 < self.q <= 1:
            raise ValueError(f"q must lie in (0, 1], got {self.q}")
        if not 2 <= self.s <= self.n:
            raise ValueError(f"s must lie in [2, n={self.n}], got {self.s}")
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)
        d = float(t.mean())
        object.__setattr__(self, "d", d)
        limit = self.s * d / self.q
        i = int(np.argmax(t))
        if t[i] ** 2 > limit * (1 + 1e-12):
            raise ValueError(
                f"target at index {i} violates max t^2 <= s*d/q: {t[i]}^2 = {t[i] ** 2:.6g} > {limit:.6g}"
            )

    @property
    def rounds(self) -> int:
        return _round_count(self.n / ((self.s - 1) * self.q))


@dataclass(frozen=True, eq=False)
class CommunityLog:
    """Vertex sets of the generated communities, in round order."""

    n: int
    communities: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.communities)

    def sizes(self) -> np.ndarray:
        return np.array([c.size for c in self.communities], dtype=np.int64)

    def to_bytes(self) -> bytes:
        lines = [f"communities {len(self.communities)}\n"]
        lines.extend(" ".join(map(str, c.tolist())) + "\n" for c in self.communities)
        return "".join(lines).encode("ascii")

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "CommunityLog":
        lines = data.decode("ascii").split("\n")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "communities":
            raise ValueError("line 1: expected 'communities K' header")
        k = int(head[1])
        body = lines[1:1 + k]
        if len(body) != k:
            raise ValueError(f"header declares {k} communities, found {len(body)}")
        comms = []
        for i, line in enumerate(body, start=2):
            c = np.array([int(x) for x in line.split()], dtype=np.int64)
            if c.size and (c.min() < 0 or c.max() >= n):
                raise ValueError(f"line {i}: vertex index outside [0, {n})")
            comms.append(c)
        return cls(n, tuple(comms))


@dataclass(frozen=True, eq=False)
class BlockModelSpec:
    M: np.ndarray

    def __post_init__(self):
        M = np.array(self.M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"M must be square, got shape {M.shape}")
        if not np.array_equal(M, M.T):
            raise ValueError("M must be symmetric")
        if M.size and (M.min() < 0 or M.max() > 1):
            raise ValueError("entries of M must lie in [0, 1]")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return int(self.M.shape[0])


# ---------------------------------------------------------------------------
# round machinery

def decode_pairs(k: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Map row-major indices of the strict upper triangle of an m x m matrix to (i, j)."""
    k = np.asarray(k, dtype=np.int64)
    if k.size == 0:
        return k.copy(), k.copy()
    # float estimate of the row, then exact integer correction
    disc = np.sqrt((2 * m - 1) ** 2 - 8.0 * k)
    i = np.floor(((2 * m - 1) - disc) / 2).astype(np.int64)
    i = np.clip(i, 0, m - 2)
    row_start = i * (2 * m - i - 1) // 2
    over = row_start > k
    while over.any():
        i[over] -= 1
        row_start = i * (2 * m - i - 1) // 2
        over = row_start > k
    nxt = (i + 1) * (2 * m - i - 2) // 2
    under = nxt <= k
    while under.any():
        i[under] += 1
        row_start = i * (2 * m - i - 1) // 2
        nxt = (i + 1) * (2 * m - i - 2) // 2
        under = nxt <= k
    j = k - row_start + i + 1
    return i, j


@lru_cache(maxsize=512)
def _triu(k: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(k, 1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def _bernoulli_pairs(rng: np.random.Generator, members: np.ndarray, q: float) -> np.ndarray:
    """Codes-ready (u, v) endpoints of a G(|members|, q) sample on sorted ``members``."""
    k = members.size
    npairs = k * (k - 1) // 2
    if npairs == 0 or q <= 0:
        return np.empty((2, 0), dtype=np.int64)
    if q >= 1:
        chosen = np.arange(npairs, dtype=np.int64)
    else:
        count = int(rng.binomial(npairs, q))
        chosen = np.sort(rng.choice(npairs, size=count, replace=False))
    if k <= 256:
        ti, tj = _triu(k)
        i, j = ti[chosen], tj[chosen]
    else:
        i, j = decode_pairs(chosen, k)
    return np.stack([members[i], members[j]])


def _bernoulli_members(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """Each vertex independently with probability p; sorted indices."""
    size = int(rng.binomial(n, p))
    return np.sort(rng.choice(n, size=size, replace=False))


def _run_rounds(fn: Callable[[int], np.ndarray], count: int, threads: int | None) -> list:
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or count < 2:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count), chunksize=64))


def _union(n: int, parts: Sequence[np.ndarray]) -> Graph:
    if not parts:
        return empty_graph(n)
    uv = np.concatenate(parts, axis=1) if len(parts) > 1 else parts[0]
    return from_codes(n, uv[0] * n + uv[1])


# ---------------------------------------------------------------------------
# generators

def gen_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p)."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    seed = _rng.check_seed(seed)
    r = _rng.substream(seed, _rng.TAG_MAIN)
    return _union(n, [_bernoulli_pairs(r, np.arange(n, dtype=np.int64), p)])


def gen_roc(params: RocParams, seed: int, threads: int | None = None) -> tuple[Graph, CommunityLog]:
    """ROC(n, d, s, q): union of ``params.rounds`` Bernoulli(s/n) communities with G(., q) inside."""
    seed = _rng.check_seed(seed)
    n, q = params.n, params.q
    p_member = params.s / n

    def one_round(r: int):
        g = _rng.substream(seed, r)
        members = _bernoulli_members(g, n, p_member)
        return members, _bernoulli_pairs(g, members, q)

    out = _run_rounds(one_round, params.rounds, threads)
    log = CommunityLog(n, tuple(m for m, _ in out))
    return _union(n, [e for _, e in out]), log


def _fixed_assignment(n: int, k_v: int, s: int, seed: int, max_retries: int = 100) -> list[np.ndarray]:
    slots = np.repeat(np.arange(n, dtype=np.int64), k_v)
    g = _rng.substream(seed, _rng.TAG_ASSIGN)
    g.shuffle(slots)
    n_groups = slots.size // s
    starts = np.arange(n_groups + 1) * s
    starts[-1] = slots.size  # remainder merged into the last community

    def bad_groups():
        bad = []
        for c in range(n_groups):
            grp = slots[starts[c]:starts[c + 1]]
            if np.unique(grp).size != grp.size:
                bad.append(c)
        return bad

    group_of = np.repeat(np.arange(n_groups), np.diff(starts))
    bad = bad_groups()
    attempt = 0
    while bad:
        if attempt >= max_retries:
            raise RuntimeError(
                f"could not place every vertex in distinct communities after {max_retries} repair passes"
            )
        attempt += 1
        # swap each repeated slot with a random slot elsewhere that clashes with neither group
        for c in bad:
            lo, hi = starts[c], starts[c + 1]
            _, first = np.unique(slots[lo:hi], return_index=True)
            for p in np.setdiff1d(np.arange(lo, hi), first + lo):
                here = set(slots[lo:hi].tolist())
                for p2 in g.permutation(slots.size):
                    c2 = group_of[p2]
                    if c2 == c or slots[p2] in here:
                        continue
                    if slots[p] in slots[starts[c2]:starts[c2 + 1]]:
                        continue
                    slots[p], slots[p2] = slots[p2], slots[p]
                    break
        bad = bad_groups()
    return [np.sort(slots[starts[c]:starts[c + 1]]) for c in range(n_groups)]


def gen_roc_fixed(params: RocParams, seed: int, threads: int | None = None) -> tuple[Graph, CommunityLog]:
    """ROC variant where every vertex sits in exactly ``d/(sq)`` communities of size ``s``.

    Membership slots are shuffled and cut into consecutive groups of ``s``; a
    short final group is merged into the previous community.
    """
    seed = _rng.check_seed(seed)
    n, s, q = params.n, params.s, params.q
    if abs(s - round(s)) > 1e-9:
        raise ValueError(f"fixed-membership ROC needs an integral community size, got s={s}")
    s = int(round(s))
    ratio = params.d / (s * q)
    k_v = int(round(ratio))
    if k_v < 1 or abs(ratio - k_v) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"d/(s*q) = {ratio:.6g} is not a positive integer (communities per vertex)")
    if n * k_v < s:
        raise ValueError(f"n*k_v = {n * k_v} membership slots cannot fill one community of size {s}")
    comms = _fixed_assignment(n, k_v, s, seed)

    def one_round(r: int):
        return _bernoulli_pairs(_rng.substream(seed, r), comms[r], q)

    parts = _run_rounds(one_round, len(comms), threads)
    return _union(n, parts), CommunityLog(n, tuple(comms))


def gen_droc(spec: DrocSpec, seed: int, threads: int | None = None) -> tuple[Graph, CommunityLog]:
    """DROC(n, D, s, q): pair (i, j) inside a community kept with probability q t_i t_j / (s d)."""
    seed = _rng.check_seed(seed)
    n = spec.n
    t = spec.targets
    p_member = spec.s / n
    scale = spec.q / (spec.s * spec.d)

    def one_round(r: int):
        g = _rng.substream(seed, r)
        members = _bernoulli_members(g, n, p_member)
        k = members.size
        if k < 2:
            return members, np.empty((2, 0), dtype=np.int64)
        i, j = np.triu_indices(k, 1)
        tm = t[members]
        keep = g.random(i.size) < scale * tm[i] * tm[j]
        return members, np.stack([members[i[keep]], members[j[keep]]])

    out = _run_rounds(one_round, spec.rounds, threads)
    return _union(n, [e for _, e in out]), CommunityLog(n, tuple(m for m, _ in out))


def cap_targets(targets: np.ndarray, s: float, q: float) -> np.ndarray:
    """Clip targets until ``max t^2 <= s * mean(t) / q`` holds."""
    t = np.asarray(targets, dtype=np.float64).copy()
    for _ in range(1000):
        cap = math.sqrt(s * t.mean() / q)
        if t.max() <= cap:
            return t
        np.minimum(t, cap * (1 - 1e-12), out=t)
    raise RuntimeError("target capping did not converge")


_ZETA_TABLE = 1 << 14


def _zeta_survival(gamma: float, k: np.ndarray | int) -> np.ndarray:
    """P(X > k) for X ~ Zeta(gamma), via the Hurwitz zeta function."""
    return zeta(gamma, np.asarray(k, dtype=np.float64) + 1) / zeta(gamma, 1)


def sample_power_law(n: int, gamma: float, seed: int) -> np.ndarray:
    """n iid draws with P(t = k) = k^-gamma / zeta(gamma), k >= 1.

    Inverse CDF: a survival table covers k <= 2^14; the rare draws beyond it
    are resolved by bisection on the Hurwitz zeta tail, so no mass is truncated.
    """
    if not gamma > 2:
        raise ValueError(f"power-law exponent must exceed 2 for a finite mean, got {gamma}")
    seed = _rng.check_seed(seed)
    g = _rng.substream(seed, _rng.TAG_TARGETS)
    w = 1.0 - g.random(n)  # uniform on (0, 1]
    sf = _zeta_survival(gamma, np.arange(1, _ZETA_TABLE + 1))
    # X = min{k >= 1 : P(X > k) <= w}
    out = np.searchsorted(-sf, -w, side="left").astype(np.int64) + 1
    for i in np.flatnonzero(out > _ZETA_TABLE):
        lo, hi = _ZETA_TABLE, 2 * _ZETA_TABLE
        while _zeta_survival(gamma, hi) > w[i] and hi < (1 << 62):
            lo, hi = hi, 2 * hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _zeta_survival(gamma, mid) <= w[i]:
                hi = mid
            else:
                lo = mid
        out[i] = hi
    return out


def gen_just_add_triangles(n: int, t: int, seed: int) -> Graph:
    """Union of t triangles, each on three distinct uniformly chosen vertices."""
    if n < 3:
        raise ValueError(f"need at least 3 vertices, got n={n}")
    if t < 1:
        raise ValueError(f"need at least one triangle, got t={t}")
    g = _rng.substream(_rng.check_seed(seed), _rng.TAG_MAIN)
    tri = g.integers(0, n, size=(t, 3))
    while True:
        dup = (tri[:, 0] == tri[:, 1]) | (tri[:, 0] == tri[:, 2]) | (tri[:, 1] == tri[:, 2])
        if not dup.any():
            break
        tri[dup] = g.integers(0, n, size=(int(dup.sum()), 3))
    tri.sort(axis=1)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    codes = np.concatenate([a * n + b, a * n + c, b * n + c])
    return from_codes(n, codes)


def gen_block_model(spec: BlockModelSpec, seed: int) -> Graph:
    """Each pair i < j independently with probability M[i, j]; row i uses substream i."""
    seed = _rng.check_seed(seed)
    n = spec.n
    M = spec.M
    parts = []
    for i in range(n - 1):
        row = M[i, i + 1:]
        hit = np.flatnonzero(_rng.substream(seed, i).random(row.size) < row)
        if hit.size:
            parts.append(np.stack([np.full(hit.size, i, dtype=np.int64), hit + i + 1]))
    return _union(n, parts)


def gen_hypercube(dim: int) -> Graph:
    if not 1 <= dim <= 24:
        raise ValueError(f"hypercube dimension must lie in [1, 24], got {dim}")
    n = 1 << dim
    u = np.arange(n, dtype=np.int64)
    parts = []
    for b in range(dim):
        lo = u[(u >> b) & 1 == 0]
        parts.append(lo * n + (lo | (1 << b)))
    return from_codes(n, np.concatenate(parts))
