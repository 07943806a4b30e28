"""Immutable simple undirected graphs stored as sorted CSR adjacency."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc


class EdgeListParseError(ValueError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``indptr``/``indices`` form a CSR adjacency in which every row is sorted
    and every edge appears in both directions. Arrays are read-only.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    _edges: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return int(self._edges.shape[0])

    @property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of ``(u, v)`` with ``u < v``, lexicographically sorted."""
        return self._edges

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._edges, other._edges)

    def __hash__(self) -> int:
        return hash((self.n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def to_scipy(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def from_codes(n: int, codes: np.ndarray) -> Graph:
    """Build a graph from pair codes ``u * n + v`` with ``u < v`` (duplicates allowed)."""
    codes = np.unique(np.asarray(codes, dtype=np.int64))
    u = codes // n
    v = codes - u * n
    edges = np.empty((codes.size, 2), dtype=np.int64)
    edges[:, 0] = u
    edges[:, 1] = v
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    indices = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(n, _readonly(indptr), _readonly(indices), _readonly(edges))


def build_graph(n: int, edge_list: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a graph from vertex pairs; order, orientation and repeats are irrelevant.

    Raises IndexError for indices outside ``[0, n)`` and ValueError for self-loops.
    """
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    arr = np.asarray(edge_list if isinstance(edge_list, np.ndarray) else list(edge_list),
                     dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edge list must be a sequence of vertex pairs")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        i = int(np.argmax(bad.any(axis=1)))
        raise IndexError(f"edge {i} {tuple(arr[i])} has an index outside [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        i = int(np.argmax(loops))
        raise ValueError(f"self-loop at vertex {arr[i, 0]} (edge {i})")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    return from_codes(n, lo * n + hi)


def empty_graph(n: int) -> Graph:
    return from_codes(n, np.empty(0, dtype=np.int64))


def codegree(g: Graph, u: int, v: int) -> int:
    """Number of common neighbours of two distinct vertices."""
    if u == v:
        raise ValueError("codegree needs two distinct vertices")
    for x in (u, v):
        if not 0 <= x < g.n:
            raise IndexError(f"vertex {x} outside [0, {g.n})")
    return int(np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True).size)


def connected_components(g: Graph) -> np.ndarray:
    """Component label per vertex, labels numbered ``0..k-1``."""
    if g.n == 0:
        return np.empty(0, dtype=np.int64)
    _, labels = _cc(g.to_scipy(), directed=False)
    return labels.astype(np.int64)


def write_edge_list(g: Graph) -> bytes:
    lines = [f"{g.n} {g.m}\n"]
    lines.extend(f"{u} {v}\n" for u, v in g.edges.tolist())
    return "".join(lines).encode("ascii")


def read_edge_list(data: bytes | str) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines format; ``#`` lines are comments."""
    if isinstance(data, bytes):
        try:
            data = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise EdgeListParseError(data[:exc.start].count(b"\n") + 1, "non-ASCII byte") from exc
    header = None
    header_line = 1
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.rstrip("\r").strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, f"expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer field in {raw!r}") from None
        if header is None:
            if a < 0 or b < 0:
                raise EdgeListParseError(lineno, "negative header value")
            header, header_line = (a, b), lineno
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise EdgeListParseError(lineno, f"index out of range for n={n}: {a} {b}")
        if a == b:
            raise EdgeListParseError(lineno, f"self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise EdgeListParseError(lineno, f"duplicate edge {key[0]} {key[1]}")
        seen.add(key)
        pairs.append(key)
    if header is None:
        raise EdgeListParseError(1, "missing 'n m' header")
    n, m = header
    if len(pairs) != m:
        raise EdgeListParseError(header_line, f"header declares {m} edges, found {len(pairs)}")
    return build_graph(n, pairs)
