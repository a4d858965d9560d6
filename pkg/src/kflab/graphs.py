"""Simple-graph and multigraph containers plus the edge-list text format.

Graph is a canonicalized simple undirected graph: rows of its edge array
satisfy u < v and are sorted lexicographically, so equal graphs serialize
to identical bytes.  Multigraph keeps multiplicities and loop counts and
is what configuration projections feed into the stripping machinery.

Edge-list text format: first line "n m", then m lines "u v", 0-indexed,
u < v, sorted lexicographically.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import DomainError

__all__ = ["Graph", "Multigraph", "parse_edge_text", "format_edge_text"]


class Graph:
    """Immutable simple undirected graph with canonical edge order."""

    __slots__ = ("n", "edge_array", "_xadj", "_adjv", "_degrees")

    def __init__(self, n: int, edges, *, _canonical: bool = False):
        if n < 0:
            raise DomainError(f"vertex count must be >= 0, got {n}")
        self.n = int(n)
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("edges must be pairs")
        if not _canonical:
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise DomainError("edge endpoint out of range")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise DomainError("self-loops not allowed in a simple graph")
            arr = np.sort(arr, axis=1)
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            if len(arr) > 1:
                dup = np.all(arr[1:] == arr[:-1], axis=1)
                if dup.any():
                    raise DomainError("duplicate edges not allowed in a simple graph")
        self.edge_array = arr
        self._xadj = None
        self._adjv = None
        self._degrees = None

    @property
    def m(self) -> int:
        return len(self.edge_array)

    @property
    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            self._degrees = np.bincount(
                self.edge_array.ravel(), minlength=self.n
            ).astype(np.int64)
        return self._degrees

    def _build_csr(self) -> None:
        e = self.edge_array
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        self._adjv = dst[order]
        counts = np.bincount(src, minlength=self.n)
        self._xadj = np.concatenate([[0], np.cumsum(counts)])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of v (a view into the CSR arrays)."""
        if self._xadj is None:
            self._build_csr()
        return self._adjv[self._xadj[v] : self._xadj[v + 1]]

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def edge_tuples(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edge_array]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return i < len(nb) and nb[i] == v

    def induced_subgraph(self, keep: np.ndarray) -> tuple["Graph", np.ndarray]:
        """Subgraph on the kept vertices, compacted; returns (graph, old_ids).

        keep is a boolean mask over the current vertex ids; old_ids[i] is the
        original id of new vertex i (ascending, so relabeling is canonical).
        """
        keep = np.asarray(keep, dtype=bool)
        old_ids = np.flatnonzero(keep)
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[old_ids] = np.arange(len(old_ids))
        e = self.edge_array
        sel = keep[e[:, 0]] & keep[e[:, 1]]
        sub = new_id[e[sel]]
        return Graph(len(old_ids), sub, _canonical=True), old_ids

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_array.shape == other.edge_array.shape
            and bool(np.all(self.edge_array == other.edge_array))
        )

    def __hash__(self):  # pragma: no cover - graphs are not dict keys in hot paths
        return hash((self.n, self.edge_array.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class Multigraph:
    """Undirected multigraph: neighbor->multiplicity maps plus loop counts.

    A loop contributes 2 to its vertex's degree and never makes a vertex
    its own neighbor.
    """

    __slots__ = ("n", "adj", "loops")

    def __init__(self, n: int, adj: list[dict[int, int]], loops: list[int]):
        self.n = n
        self.adj = adj
        self.loops = loops

    @classmethod
    def from_graph(cls, g: Graph) -> "Multigraph":
        adj: list[dict[int, int]] = [dict() for _ in range(g.n)]
        for u, v in g.edge_array:
            adj[u][int(v)] = 1
            adj[v][int(u)] = 1
        return cls(g.n, adj, [0] * g.n)

    def degree(self, v: int) -> int:
        return sum(self.adj[v].values()) + 2 * self.loops[v]

    @property
    def degrees(self) -> np.ndarray:
        return np.array([self.degree(v) for v in range(self.n)], dtype=np.int64)

    def edge_instances(self) -> list[tuple[int, int]]:
        """Non-loop edges with multiplicity, canonical (u < v) and sorted."""
        out: list[tuple[int, int]] = []
        for u in range(self.n):
            for v, mult in sorted(self.adj[u].items()):
                if u < v:
                    out.extend([(u, v)] * mult)
        return out

    def loop_count(self) -> int:
        return sum(self.loops)

    def is_simple(self) -> bool:
        return self.loop_count() == 0 and all(
            m == 1 for a in self.adj for m in a.values()
        )

    def __repr__(self) -> str:
        m = sum(sum(a.values()) for a in self.adj) // 2 + self.loop_count()
        return f"Multigraph(n={self.n}, m={m})"


def format_edge_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edge_array)
    return "\n".join(lines) + "\n"


def parse_edge_text(text: str) -> Graph:
    rows = text.strip().split("\n") if text.strip() else []
    if not rows:
        raise DomainError("empty edge-list input")
    head = rows[0].split()
    if len(head) != 2:
        raise DomainError("first line must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise DomainError(f"bad header: {rows[0]!r}") from exc
    if m != len(rows) - 1:
        raise DomainError(f"header claims {m} edges, found {len(rows) - 1}")
    edges = np.empty((m, 2), dtype=np.int64)
    prev = (-1, -1)
    for i, row in enumerate(rows[1:]):
        parts = row.split()
        if len(parts) != 2:
            raise DomainError(f"bad edge line: {row!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < v < n):
            raise DomainError(f"edge ({u},{v}) violates 0 <= u < v < n")
        if (u, v) <= prev:
            raise DomainError("edges must be sorted lexicographically and unique")
        prev = (u, v)
        edges[i] = (u, v)
    return Graph(n, edges, _canonical=True)
