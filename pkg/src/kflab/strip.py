"""Queue-driven deletion on a k-core with class tracking and a potential trace.

Vertices are partitioned into W0 (initial degree exactly k), W1 (fell to
degree <= k later), and R (current degree > k).  A sticky rule system
decides queue membership:

  D1  initial degree > 2k
  D2  not in W0 and at least k/2 initial neighbors in W0
  D3  current degree < k
  D4  in R with at least two distinct W1 neighbors
  D5  in W1 with a neighbor that is W1, or R-and-flagged
  D6  flags never clear

Each iteration deletes the least-id queued vertex, moves R neighbors whose
degree fell to <= k into W1, and re-evaluates D3-D5 on the affected
neighborhood (D5 after all moves of the iteration).  The trace logs the
weighted queue potential X = A + k B + k^7 beta D per iteration.

Multigraph inputs: a loop adds 2 to its vertex's degree and never makes a
vertex its own neighbor; parallel edges count with multiplicity in degrees
and in the D2 threshold, while the W1-neighbor counts of D4/D5 are over
distinct vertices.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .graphs import Graph, Multigraph
from .randgraph import R, W0, W1

__all__ = [
    "StripState",
    "TraceRow",
    "StripTrace",
    "StripResult",
    "KReport",
    "strip_init",
    "strip_step",
    "run_strip",
    "potential",
    "verify_K",
    "enforce_parity",
    "check_state_invariants",
]

def default_beta(k: int) -> float:
    return math.exp(-k / 200.0)


class TraceRow(NamedTuple):
    iteration: int
    deleted: int  # vertex id, -1 for the initial row / no-op
    q_size: int
    w0: int
    w1: int
    r: int
    a: int
    b: int
    d: int
    x: float
    enqueued: int


@dataclass(frozen=True)
class StripTrace:
    rows: tuple[TraceRow, ...]

    CSV_HEADER = "iteration,deleted,q_size,w0,w1,r,A,B,D,X,enqueued"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            lines.append(
                f"{row.iteration},{row.deleted},{row.q_size},{row.w0},"
                f"{row.w1},{row.r},{row.a},{row.b},{row.d},{row.x:.10g},"
                f"{row.enqueued}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class KReport:
    k1: bool
    k2: bool
    k3: bool | None
    k4: bool


@dataclass(frozen=True)
class StripResult:
    K: Graph
    kept: np.ndarray  # input-space ids of the vertices of K (ascending)
    k_degrees: np.ndarray  # native-mode degrees of K's vertices
    k_multigraph: Multigraph | None
    halted_reason: str  # Q_empty | cap_reached
    trace: StripTrace
    iterations: int
    cap: int
    beta_eff: float
    k: int
    k4_action: str = "none"  # none | deleted | failed
    k4_vertex: int | None = None

    def summary_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "halted_reason": self.halted_reason,
                "iterations": self.iterations,
                "cap": self.cap,
                "beta_eff": self.beta_eff,
                "k_size": int(self.K.n),
                "k_edges": int(self.K.m),
                "k4_action": self.k4_action,
                "k4_vertex": self.k4_vertex,
            },
            separators=(",", ":"),
        )


class StripState:
    """Mutable engine state; single-owner, stepped by strip_step."""

    def __init__(
        self,
        core,
        k: int,
        cap_multiplier: float = 1.0,
        beta_override: float | None = None,
        ambient_n: int | None = None,
        debug: bool = False,
        debug_full_every: int | None = None,
    ):
        if k < 1:
            raise DomainError(f"strip needs k >= 1, got {k}")
        if isinstance(core, Multigraph):
            self.multigraph = True
            n = core.n
            self.adj = [list(core.adj[v].keys()) for v in range(n)]
            self.amult = [list(core.adj[v].values()) for v in range(n)]
            self.loops = np.asarray(core.loops, dtype=np.int64)
            deg = core.degrees.copy()
        elif isinstance(core, Graph):
            self.multigraph = False
            n = core.n
            self.adj = core.adjacency()
            self.amult = None
            self.loops = np.zeros(n, dtype=np.int64)
            deg = core.degrees.copy()
        else:
            raise DomainError(f"core must be a Graph or Multigraph, got {type(core)!r}")
        if n and int(deg.min()) < k:
            raise DomainError(
                f"strip requires minimum degree >= k={k}, found {int(deg.min())}"
            )

        self.k = k
        self.n = n
        self.ambient_n = int(ambient_n) if ambient_n is not None else n
        self.beta_eff = (
            float(beta_override) if beta_override is not None else default_beta(k)
        )
        if self.beta_eff <= 0:
            raise DomainError("beta must be positive")
        self.k7b = float(k) ** 7 * self.beta_eff
        self.cap = int(math.ceil(cap_multiplier * self.beta_eff * self.ambient_n))

        self.alive = np.ones(n, dtype=bool)
        self.deg = deg
        self.class_of = np.where(deg == k, W0, R).astype(np.int8)
        self.deg_w0 = self._initial_deg_w0()
        self.w1n = np.zeros(n, dtype=np.int64)  # distinct live W1 neighbors
        self.rqn = np.zeros(n, dtype=np.int64)  # distinct live R-in-Q neighbors
        self.deletable = np.zeros(n, dtype=bool)
        self.in_q = np.zeros(n, dtype=bool)
        self.heap: list[int] = []
        self.n_w0 = int(np.sum(self.class_of == W0))
        self.n_w1 = 0
        self.n_r = n - self.n_w0
        self.A = 0
        self.B = 0
        self.D = 0
        self.iteration = 0
        self.trace_rows: list[TraceRow] = []

        self.debug = debug
        if debug:
            self.d_w1 = np.zeros(n, dtype=np.int64)
            self.d_w1nq = np.zeros(n, dtype=np.int64)
            self.viol = np.zeros((n, 3), dtype=bool)
            self.va = self.vb = self.vc = 0
            if debug_full_every is None:
                debug_full_every = 1 if n <= 2000 else 200
            self.debug_full_every = max(1, debug_full_every)

        # D1 and D2 over the initial core; W1 is empty so no other rule fires
        d1 = deg > 2 * k
        d2 = (self.class_of != W0) & (2 * self.deg_w0 >= k)
        new = np.flatnonzero(d1 | d2)
        for v in new.tolist():
            self._enqueue(v)
        self._log_row(deleted=-1, enqueued=len(new))

    # ------------------------------------------------------------- internals

    def _initial_deg_w0(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        w0 = self.class_of == W0
        if self.multigraph:
            for v in range(self.n):
                for u, m in zip(self.adj[v], self.amult[v]):
                    if w0[u]:
                        out[v] += m
                if w0[v]:
                    out[v] += 2 * self.loops[v]
        else:
            for v in range(self.n):
                for u in self.adj[v]:
                    if w0[u]:
                        out[v] += 1
        return out

    def _live_neighbors(self, v: int):
        """(neighbor, multiplicity) over live distinct neighbors of v."""
        if self.multigraph:
            return [
                (u, m)
                for u, m in zip(self.adj[v], self.amult[v])
                if self.alive[u]
            ]
        return [(u, 1) for u in self.adj[v] if self.alive[u]]

    def _enqueue(self, v: int) -> None:
        self.deletable[v] = True
        self.in_q[v] = True
        heapq.heappush(self.heap, v)
        if self.class_of[v] == W0:
            self.A += int(self.deg_w0[v])
        else:
            self.B += int(self.deg_w0[v])
        self.D += int(self.deg[v] - self.deg_w0[v])
        if self.class_of[v] == R:
            for u, _ in self._live_neighbors(v):
                self.rqn[u] += 1
        if self.debug:
            if self.class_of[v] == W1:
                for u, _ in self._live_neighbors(v):
                    self.d_w1nq[u] -= 1
                    self._dbg_refresh(u)
            self._dbg_refresh(v)

    def _move_to_w1(self, u: int) -> None:
        self.class_of[u] = W1
        self.n_r -= 1
        self.n_w1 += 1
        queued = bool(self.in_q[u])
        for z, _ in self._live_neighbors(u):
            self.w1n[z] += 1
            if queued:
                self.rqn[z] -= 1
        if self.debug:
            for z, _ in self._live_neighbors(u):
                self.d_w1[z] += 1
                if not queued:
                    self.d_w1nq[z] += 1
                self._dbg_refresh(z)
            self._dbg_refresh(u)

    def _dbg_refresh(self, v: int) -> None:
        a = bool(self.alive[v])
        cls = self.class_of[v]
        new = (
            a and cls == W1 and self.d_w1nq[v] > 0,
            a and cls == R and self.in_q[v] and self.d_w1nq[v] > 0,
            a and cls == R and not self.in_q[v] and self.d_w1[v] > 1,
        )
        old = self.viol[v]
        self.va += int(new[0]) - int(old[0])
        self.vb += int(new[1]) - int(old[1])
        self.vc += int(new[2]) - int(old[2])
        self.viol[v] = new

    def _log_row(self, deleted: int, enqueued: int) -> None:
        # queued vertices leave the heap only when deleted, so the heap
        # length is exactly |Q|
        x = self.A + self.k * self.B + self.k7b * self.D
        self.trace_rows.append(
            TraceRow(
                iteration=self.iteration,
                deleted=deleted,
                q_size=len(self.heap),
                w0=self.n_w0,
                w1=self.n_w1,
                r=self.n_r,
                a=self.A,
                b=self.B,
                d=self.D,
                x=x,
                enqueued=enqueued,
            )
        )

    @property
    def q_empty(self) -> bool:
        return not self.heap

    def queue_ids(self) -> list[int]:
        return sorted(v for v in np.flatnonzero(self.in_q).tolist())


def strip_init(
    core,
    k: int,
    cap_multiplier: float = 1.0,
    beta_override: float | None = None,
    ambient_n: int | None = None,
    debug: bool = False,
) -> StripState:
    """Classify a k-core and seed the queue from the initial rules D1/D2."""
    return StripState(
        core,
        k,
        cap_multiplier=cap_multiplier,
        beta_override=beta_override,
        ambient_n=ambient_n,
        debug=debug,
    )


def strip_step(state: StripState) -> TraceRow:
    """Delete the least-id queued vertex and propagate rule re-evaluation.

    Returns the logged iteration row; a no-op row (deleted = -1, nothing
    mutated or logged) if the queue is empty.
    """
    s = state
    if s.debug:
        assert s.va == 0, "a W1 vertex has an unqueued W1 neighbor"
        assert s.vb == 0, "a queued R vertex has an unqueued W1 neighbor"
        assert s.vc == 0, "an unqueued R vertex has two W1 neighbors"
        if s.iteration % s.debug_full_every == 0:
            check_state_invariants(s)
    if not s.heap:
        return TraceRow(
            s.iteration, -1, 0, s.n_w0, s.n_w1, s.n_r, s.A, s.B, s.D,
            s.A + s.k * s.B + s.k7b * s.D, 0,
        )
    v = heapq.heappop(s.heap)
    s.iteration += 1
    v_cls = int(s.class_of[v])
    neighbors = s._live_neighbors(v)

    # 2a: remove v from the graph and the queue, with its potential share
    s.alive[v] = False
    s.in_q[v] = False
    if v_cls == W0:
        s.A -= int(s.deg_w0[v])
        s.n_w0 -= 1
    else:
        s.B -= int(s.deg_w0[v])
        if v_cls == W1:
            s.n_w1 -= 1
        else:
            s.n_r -= 1
    s.D -= int(s.deg[v] - s.deg_w0[v])

    for u, m in neighbors:
        s.deg[u] -= m
        if v_cls == W0:
            s.deg_w0[u] -= m
            if s.in_q[u]:
                if s.class_of[u] == W0:
                    s.A -= m
                else:
                    s.B -= m
        elif s.in_q[u]:
            s.D -= m
    if v_cls == W1:
        for u, _ in neighbors:
            s.w1n[u] -= 1
    elif v_cls == R:  # v was queued, so neighbors lose an R-in-queue neighbor
        for u, _ in neighbors:
            s.rqn[u] -= 1
    if s.debug:
        if v_cls == W1:
            for u, _ in neighbors:
                s.d_w1[u] -= 1
                s._dbg_refresh(u)
        s._dbg_refresh(v)

    # 2b: R neighbors whose degree fell to at most k move to W1
    movers = [u for u, _ in neighbors if s.class_of[u] == R and s.deg[u] <= s.k]
    for u in movers:
        s._move_to_w1(u)

    # 2c phase 1: D3 on the touched neighborhood, D5 on movers, D4/D5 around
    # movers; all conditions read the post-move state
    flagged: list[int] = []
    seen = set()

    def consider(w: int, condition: bool) -> None:
        if condition and not s.deletable[w] and w not in seen:
            seen.add(w)
            flagged.append(w)

    for u, _ in neighbors:
        consider(u, s.deg[u] < s.k)
    for u in movers:
        consider(u, s.w1n[u] >= 1 or s.rqn[u] >= 1)
        for z, _ in s._live_neighbors(u):
            cls = s.class_of[z]
            if cls == W1:
                consider(z, True)  # z gained the W1 neighbor u
            elif cls == R:
                consider(z, s.w1n[z] >= 2)
    for w in flagged:
        s._enqueue(w)

    # 2c phase 2: W1 neighbors of R vertices that just became deletable
    cascade: list[int] = []
    for z in flagged:
        if s.class_of[z] == R:
            for w, _ in s._live_neighbors(z):
                if s.class_of[w] == W1 and not s.deletable[w] and w not in seen:
                    seen.add(w)
                    cascade.append(w)
    for w in cascade:
        s._enqueue(w)

    enqueued = len(flagged) + len(cascade)
    if s.debug:
        assert enqueued <= 4 * s.k * s.k, (
            f"iteration {s.iteration}: {enqueued} enqueues exceed 4k^2"
        )
    s._log_row(deleted=v, enqueued=enqueued)
    return s.trace_rows[-1]


def potential(state: StripState) -> tuple[int, int, int, float]:
    """(A, B, D, X) of the current queue over the live graph."""
    s = state
    return s.A, s.B, s.D, s.A + s.k * s.B + s.k7b * s.D


def _finalize(state: StripState, halted_reason: str) -> StripResult:
    s = state
    if s.debug:
        check_state_invariants(s)
    keep = s.alive.copy()
    kept = np.flatnonzero(keep)
    k_degrees = s.deg[kept].copy()
    if s.multigraph:
        new_id = np.full(s.n, -1, dtype=np.int64)
        new_id[kept] = np.arange(len(kept))
        adj: list[dict[int, int]] = [dict() for _ in range(len(kept))]
        loops = [0] * len(kept)
        for old in kept.tolist():
            i = int(new_id[old])
            loops[i] = int(s.loops[old])
            for u, m in zip(s.adj[old], s.amult[old]):
                if keep[u]:
                    adj[i][int(new_id[u])] = m
        mg = Multigraph(len(kept), adj, loops)
        edges = sorted(set(mg.edge_instances()))
        K = Graph(
            len(kept),
            np.array(edges, dtype=np.int64).reshape(-1, 2),
            _canonical=True,
        )
    else:
        mg = None
        # rebuild from the original adjacency restricted to live vertices
        pairs = [
            (v, u)
            for v in kept.tolist()
            for u in s.adj[v]
            if v < u and keep[u]
        ]
        new_id = np.full(s.n, -1, dtype=np.int64)
        new_id[kept] = np.arange(len(kept))
        arr = (
            new_id[np.array(pairs, dtype=np.int64)]
            if pairs
            else np.empty((0, 2), dtype=np.int64)
        )
        K = Graph(len(kept), arr)
    return StripResult(
        K=K,
        kept=kept,
        k_degrees=k_degrees,
        k_multigraph=mg,
        halted_reason=halted_reason,
        trace=StripTrace(rows=tuple(s.trace_rows)),
        iterations=s.iteration,
        cap=s.cap,
        beta_eff=s.beta_eff,
        k=s.k,
    )


def run_strip(
    core,
    k: int,
    cap_multiplier: float = 1.0,
    beta_override: float | None = None,
    ambient_n: int | None = None,
    debug: bool = False,
) -> StripResult:
    """Iterate deletions until the queue empties or the iteration cap hits.

    The cap is ceil(cap_multiplier * beta * n) with n the ambient vertex
    count (defaulting to the core size) and beta = e^(-k/200) unless
    overridden.  Identical inputs give identical results, trace included.
    """
    state = strip_init(
        core,
        k,
        cap_multiplier=cap_multiplier,
        beta_override=beta_override,
        ambient_n=ambient_n,
        debug=debug,
    )
    while True:
        if state.q_empty:
            return _finalize(state, "Q_empty")
        if state.iteration >= state.cap:
            return _finalize(state, "cap_reached")
        strip_step(state)


def verify_K(K: Graph, k: int, ambient_n: int | None = None, degrees=None) -> KReport:
    """Check the target properties of a stripped remainder.

    K1: every degree in [k, 2k].  K2: every vertex of degree >= k+1 has at
    most floor(9k/10) neighbors of degree exactly k.  K3: |K| >= n/3 when
    the ambient n is supplied (None otherwise).  K4: k|K| even.  degrees
    overrides K.degrees for multigraph remainders (loops count twice).
    """
    deg = np.asarray(degrees, dtype=np.int64) if degrees is not None else K.degrees
    if len(deg) != K.n:
        raise DomainError("degrees must cover every vertex of K")
    if K.n == 0:
        k1 = True
        k2 = True
    else:
        k1 = bool(np.all((deg >= k) & (deg <= 2 * k)))
        low = deg == k
        low_nbrs = np.zeros(K.n, dtype=np.int64)
        if K.m:
            e = K.edge_array
            np.add.at(low_nbrs, e[:, 0], low[e[:, 1]])
            np.add.at(low_nbrs, e[:, 1], low[e[:, 0]])
        high = deg >= k + 1
        k2 = bool(np.all(low_nbrs[high] <= (9 * k) // 10))
    k3 = None if ambient_n is None else bool(K.n >= ambient_n / 3)
    k4 = (k * K.n) % 2 == 0
    return KReport(k1=k1, k2=k2, k3=k3, k4=k4)


def enforce_parity(result: StripResult, k: int) -> StripResult:
    """Delete one vertex to make k|K| even, if needed and possible.

    The vertex chosen is the least-id one with degree > k all of whose
    neighbors also have degree > k; removing it keeps every degree >= k.
    """
    if (k * result.K.n) % 2 == 0:
        return replace(result, k4_action="none", k4_vertex=None)
    deg = result.k_degrees
    mg = result.k_multigraph
    for v in range(result.K.n):
        if deg[v] <= k:
            continue
        nbrs = (
            list(mg.adj[v].keys()) if mg is not None else result.K.neighbors(v).tolist()
        )
        if all(deg[u] > k for u in nbrs):
            keep = np.ones(result.K.n, dtype=bool)
            keep[v] = False
            new_K, _ = result.K.induced_subgraph(keep)
            if mg is not None:
                adj = []
                loops = []
                new_id = np.full(result.K.n, -1, dtype=np.int64)
                new_id[np.flatnonzero(keep)] = np.arange(result.K.n - 1)
                for old in np.flatnonzero(keep).tolist():
                    adj.append(
                        {
                            int(new_id[u]): m
                            for u, m in mg.adj[old].items()
                            if keep[u]
                        }
                    )
                    loops.append(mg.loops[old])
                new_mg = Multigraph(result.K.n - 1, adj, loops)
                new_deg = new_mg.degrees
            else:
                new_mg = None
                new_deg = new_K.degrees
            return replace(
                result,
                K=new_K,
                kept=result.kept[keep],
                k_degrees=new_deg,
                k_multigraph=new_mg,
                k4_action="deleted",
                k4_vertex=int(result.kept[v]),
            )
    return replace(result, k4_action="failed", k4_vertex=None)


def check_state_invariants(state: StripState) -> None:
    """From-scratch recomputation of every maintained quantity; raises on
    any mismatch.  Cost O(n + m); used by debug runs and tests."""
    s = state
    deg = np.zeros(s.n, dtype=np.int64)
    deg_w0 = np.zeros(s.n, dtype=np.int64)
    w1n = np.zeros(s.n, dtype=np.int64)
    rqn = np.zeros(s.n, dtype=np.int64)
    w1_not_q = np.zeros(s.n, dtype=np.int64)
    for v in range(s.n):
        if not s.alive[v]:
            continue
        deg[v] += 2 * s.loops[v]
        if s.class_of[v] == W0:
            deg_w0[v] += 2 * s.loops[v]
        for u, m in s._live_neighbors(v):
            deg[v] += m
            if s.class_of[u] == W0:
                deg_w0[v] += m
            if s.class_of[u] == W1:
                w1n[v] += 1
                if not s.in_q[u]:
                    w1_not_q[v] += 1
            if s.class_of[u] == R and s.in_q[u]:
                rqn[v] += 1
    live = s.alive
    assert np.array_equal(deg[live], s.deg[live]), "degree bookkeeping drifted"
    assert np.array_equal(deg_w0[live], s.deg_w0[live]), "deg_w0 bookkeeping drifted"
    assert np.array_equal(w1n[live], s.w1n[live]), "W1-neighbor counts drifted"
    assert np.array_equal(rqn[live], s.rqn[live]), "R-in-Q neighbor counts drifted"

    cls = s.class_of
    assert np.all((cls[live] == R) == (deg[live] > s.k)), "R must be exactly degree > k"
    assert s.n_w0 == int(np.sum(live & (cls == W0)))
    assert s.n_w1 == int(np.sum(live & (cls == W1)))
    assert s.n_r == int(np.sum(live & (cls == R)))

    q = live & s.in_q
    A = int(np.sum(deg_w0[q & (cls == W0)]))
    B = int(np.sum(deg_w0[q & (cls != W0)]))
    D = int(np.sum((deg - deg_w0)[q]))
    assert (A, B, D) == (s.A, s.B, s.D), (
        f"potential drifted: scratch {(A, B, D)} vs tracked {(s.A, s.B, s.D)}"
    )

    # the three queue-closure properties at an iteration boundary
    for v in np.flatnonzero(live).tolist():
        if cls[v] == W1:
            assert w1_not_q[v] == 0, f"W1 vertex {v} keeps an unqueued W1 neighbor"
        elif cls[v] == R and s.in_q[v]:
            assert w1_not_q[v] == 0, f"queued R vertex {v} keeps an unqueued W1 neighbor"
        elif cls[v] == R:
            assert w1n[v] <= 1, f"unqueued R vertex {v} has two W1 neighbors"
