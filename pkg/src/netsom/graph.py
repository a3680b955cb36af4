"""Undirected simple graphs with sorted CSR adjacency and edge-list file I/O."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable

import numpy as np

_HEADER_RE = re.compile(r"#\s*nodes:\s*(\d+)\s*$")


class Graph:
    """Immutable undirected simple graph over node ids 0..n-1.

    Adjacency is kept in CSR form (``indptr``, ``indices``) with each
    neighbor row sorted ascending, so neighbor iteration is deterministic.
    Construct via :func:`build_graph` or :func:`load_edge_list`; instances
    must not be mutated after construction.
    """

    __slots__ = ("n", "indptr", "indices", "degrees", "_nbr_lists")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.degrees = np.diff(indptr).astype(np.int64)
        self._nbr_lists: list[list[int]] | None = None
        indptr.setflags(write=False)
        indices.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return self.indices.size // 2

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.num_edges / self.n if self.n else 0.0

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node i (read-only view)."""
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_lists(self) -> list[list[int]]:
        """Adjacency as plain Python lists; built once and cached."""
        if self._nbr_lists is None:
            idx = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._nbr_lists = [idx[ptr[i]:ptr[i + 1]] for i in range(self.n)]
        return self._nbr_lists

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) int array with u < v, lexicographically sorted."""
        row = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = self.indices > row
        return np.column_stack([row[keep], self.indices[keep].astype(np.int64)])

    def directed_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Both orientations of every edge as (sources, targets) arrays."""
        row = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        return row, self.indices.astype(np.int64)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            nxt = _gather_neighbors(self.indptr, self.indices, frontier)
            nxt = nxt[~seen[nxt]]
            if nxt.size == 0:
                break
            seen[nxt] = True
            frontier = np.unique(nxt)
        return bool(seen.all())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):  # identity hash; graphs are compared with == explicitly
        return id(self)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


def _gather_neighbors(indptr: np.ndarray, indices: np.ndarray,
                      nodes: np.ndarray) -> np.ndarray:
    """Concatenated neighbor ids of ``nodes`` without a Python-level loop."""
    counts = (indptr[nodes + 1] - indptr[nodes]).astype(np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    cum = np.cumsum(counts)
    flat = np.arange(total, dtype=np.int64)
    flat += np.repeat(indptr[nodes].astype(np.int64) - (cum - counts), counts)
    return indices[flat]


def build_graph(node_count: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a Graph from unordered id pairs.

    Duplicate edges (in either orientation) collapse to a single edge.
    Self-loops and out-of-range ids raise ValueError.
    """
    n = int(node_count)
    if n < 0:
        raise ValueError("node_count must be nonnegative")
    e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValueError("edges must be pairs of node ids")
    if e.size:
        if e.min() < 0 or e.max() >= n:
            bad = e[(e < 0).any(axis=1) | (e >= n).any(axis=1)][0]
            raise ValueError(f"edge ({bad[0]}, {bad[1]}) has id out of range [0, {n})")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            raise ValueError(f"self-loop on node {e[loops][0][0]} is not allowed")
    both = np.concatenate([e, e[:, ::-1]]) if e.size else e
    keys = np.unique(both[:, 0] * n + both[:, 1]) if both.size else np.empty(0, np.int64)
    src = keys // n if keys.size else keys
    dst = keys % n if keys.size else keys
    indptr = np.zeros(n + 1, dtype=np.int64)
    if src.size:
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(n, indptr, dst.astype(np.int32))


def load_edge_list(path: str | Path) -> Graph:
    """Read a whitespace-separated "u v" edge list.

    Lines starting with "#" are comments; a "# nodes: N" header fixes the
    node count (otherwise 1 + max id is used). CRLF line endings accepted.
    """
    path = Path(path)
    header_n: int | None = None
    pairs: list[tuple[int, int]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _HEADER_RE.match(line)
                if m:
                    header_n = int(m.group(1))
                continue
            toks = line.split()
            if len(toks) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(toks[0]), int(toks[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer token in {line!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id in {line!r}")
            pairs.append((u, v))
    if not pairs and header_n is None:
        raise ValueError(f"{path}: empty edge list with no '# nodes: N' header")
    n = header_n if header_n is not None else 1 + max(max(u, v) for u, v in pairs)
    return build_graph(n, pairs)


def save_edge_list(graph: Graph, path: str | Path) -> None:
    """Write the canonical edge-list form: node-count header, one "u v" per line."""
    Path(path).write_bytes(edge_list_bytes(graph))


def edge_list_bytes(graph: Graph) -> bytes:
    """Canonical serialized form (UTF-8, LF); also used for content hashing."""
    lines = [f"# nodes: {graph.n}\n"]
    lines.extend(f"{u} {v}\n" for u, v in graph.edge_array())
    return "".join(lines).encode("utf-8")
