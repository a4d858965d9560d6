"""Maximum cardinality matching in general graphs.

Edmonds blossom contraction in its array form: one alternating BFS tree
per initially free vertex, blossoms contracted by rebasing their vertices
onto the stem vertex closest to the root.  A single pass over the free
vertices suffices for maximality, giving the usual O(V^3) worst case.

Two preprocessing steps cut most of the work on structured instances:

* degree-1 forcing: a vertex with a single neighbor can always be matched
  to it in some maximum matching, so the pair is committed and removed;
  this cascades until no degree-1 vertex remains,
* greedy seeding: a linear pass matching free neighbor pairs.

Both preserve the maximum cardinality exactly (the standard exchange
argument), so the blossom search only runs for the residual free vertices.
All per-search bookkeeping resets lazily through stamps, so a search costs
time proportional to the subgraph it explores, not to the whole graph.
"""

from collections import deque

import numpy as np

from .errors import DomainError

__all__ = ["maximum_matching", "matched_pairs", "perfect_matching_exists"]


def _build_adjacency(n: int, edges) -> list[list[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        u = int(u)
        v = int(v)
        if u == v:
            continue  # a loop can never be matched
        if not (0 <= u < n and 0 <= v < n):
            raise DomainError(f"edge ({u}, {v}) out of range for n = {n}")
        adj[u].add(v)
        adj[v].add(u)
    return [sorted(s) for s in adj]


def _force_degree_one(n, adj, mate, alive):
    """Commit every forced pair (some maximum matching contains the unique
    edge at a degree-1 vertex) and drop both endpoints; cascades."""
    deg = [len(a) for a in adj]
    queue = deque(v for v in range(n) if deg[v] == 1)
    while queue:
        v = queue.popleft()
        if not alive[v] or deg[v] != 1:
            continue
        w = next(u for u in adj[v] if alive[u])
        mate[v] = w
        mate[w] = v
        alive[v] = False
        alive[w] = False
        for u in adj[w]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] == 1:
                    queue.append(u)
        deg[v] = 0
        deg[w] = 0


def _greedy_seed(n, adj, mate, alive):
    for v in range(n):
        if alive[v] and mate[v] == -1:
            for u in adj[v]:
                if alive[u] and mate[u] == -1:
                    mate[v] = u
                    mate[u] = v
                    break


class _Blossom:
    """One-pass Edmonds search state over a fixed adjacency structure."""

    __slots__ = (
        "adj", "mate", "alive", "stamp", "bstamp",
        "used_at", "p_at", "p", "base_at", "base", "lca_at", "bloss_at",
        "touch_at", "touched",
    )

    def __init__(self, adj, mate, alive):
        n = len(adj)
        self.adj = adj
        self.mate = mate
        self.alive = alive
        self.stamp = 0
        self.bstamp = 0
        self.used_at = [0] * n
        self.p_at = [0] * n
        self.p = [-1] * n
        self.base_at = [0] * n
        self.base = list(range(n))
        self.lca_at = [0] * n
        self.bloss_at = [0] * n
        self.touch_at = [0] * n
        self.touched: list[int] = []

    # stamped accessors: state from older searches reads as pristine
    def _get_base(self, v):
        return self.base[v] if self.base_at[v] == self.stamp else v

    def _get_p(self, v):
        return self.p[v] if self.p_at[v] == self.stamp else -1

    def _touch(self, v):
        if self.touch_at[v] != self.stamp:
            self.touch_at[v] = self.stamp
            self.touched.append(v)

    def _lca(self, a, b):
        # walks use their own mark array: the a-side climb marks bases all
        # the way to the root, which must not read as blossom membership
        self.bstamp += 1
        stamp = self.bstamp
        mark = self.lca_at
        mate = self.mate
        while True:
            a = self._get_base(a)
            mark[a] = stamp
            if mate[a] == -1:
                break
            a = self._get_base(self._get_p(mate[a]))
        while True:
            b = self._get_base(b)
            if mark[b] == stamp:
                return b
            b = self._get_base(self._get_p(mate[b]))

    def _mark_path(self, v, b, child, bstamp):
        mate = self.mate
        while self._get_base(v) != b:
            self.bloss_at[self._get_base(v)] = bstamp
            self.bloss_at[self._get_base(mate[v])] = bstamp
            self.p[v] = child
            self.p_at[v] = self.stamp
            self._touch(v)
            child = mate[v]
            v = self._get_p(child)

    def search(self, root) -> bool:
        """Grow an alternating tree from a free root; augment if a free
        vertex is reached.  True iff the matching grew."""
        self.stamp += 1
        stamp = self.stamp
        self.touched = []
        adj = self.adj
        mate = self.mate
        alive = self.alive
        used_at = self.used_at
        used_at[root] = stamp
        self._touch(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if not alive[to]:
                    continue
                if self._get_base(v) == self._get_base(to) or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and self._get_p(mate[to]) != -1):
                    # to is outer: the edge closes an odd cycle (blossom)
                    cur_base = self._lca(v, to)
                    self.bstamp += 1
                    bstamp = self.bstamp
                    self._mark_path(v, cur_base, to, bstamp)
                    self._mark_path(to, cur_base, v, bstamp)
                    bloss_at = self.bloss_at
                    for i in list(self.touched):
                        if bloss_at[self._get_base(i)] == bstamp:
                            self.base[i] = cur_base
                            self.base_at[i] = stamp
                            if used_at[i] != stamp:
                                used_at[i] = stamp
                                self._touch(i)
                                queue.append(i)
                elif self._get_p(to) == -1:
                    self.p[to] = v
                    self.p_at[to] = stamp
                    self._touch(to)
                    if mate[to] == -1:
                        # augment: flip matched status back to the root
                        while to != -1:
                            pv = self._get_p(to)
                            ppv = mate[pv]
                            mate[to] = pv
                            mate[pv] = to
                            to = ppv
                        return True
                    w = mate[to]
                    used_at[w] = stamp
                    self._touch(w)
                    queue.append(w)
        return False


def maximum_matching(n: int, edges, seed_mate=None) -> np.ndarray:
    """Return a maximum matching as a mate array (-1 for exposed vertices).

    edges is any iterable of (u, v) pairs; duplicates and loops are
    ignored.  seed_mate, when given, must be a valid matching over the
    edges; it is grown, never torn down, so committed pairs stay matched.
    Deterministic: no randomness, ties broken by vertex id.
    """
    adj = _build_adjacency(n, edges)
    mate = [-1] * n
    alive = [True] * n
    if seed_mate is not None:
        if len(seed_mate) != n:
            raise DomainError("seed_mate length must equal n")
        for v in range(n):
            w = int(seed_mate[v])
            if w < 0:
                continue
            if w == v or int(seed_mate[w]) != v:
                raise DomainError("seed_mate is not a symmetric matching")
            if v not in adj[w]:
                raise DomainError("seed_mate uses a non-edge")
            mate[v] = w
    else:
        _force_degree_one(n, adj, mate, alive)
        _greedy_seed(n, adj, mate, alive)

    engine = _Blossom(adj, mate, alive)
    for root in range(n):
        if mate[root] == -1 and adj[root]:
            engine.search(root)
    return np.array(mate, dtype=np.int64)


def matched_pairs(mate) -> list[tuple[int, int]]:
    """Canonical (u < v) sorted edge list of a mate array."""
    return [(v, int(mate[v])) for v in range(len(mate)) if v < mate[v]]


def perfect_matching_exists(mate) -> bool:
    return len(mate) % 2 == 0 and all(int(w) >= 0 for w in mate)
