"""k-core extraction by peeling, plus first-iteration structure audits.

The peel is the classic worklist algorithm: repeatedly delete vertices of
degree below k.  The resulting vertex set is order-independent; the
recorded peel order is the deterministic worklist order of this
implementation.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graphs import Graph, format_edge_text

__all__ = [
    "CoreResult",
    "Lw0Part",
    "Lw0Report",
    "k_core",
    "audit_lw0",
]


@dataclass(frozen=True, eq=False)
class CoreResult:
    """Maximal induced subgraph of minimum degree >= k, with provenance.

    core is compacted; vertex_map[i] is the ambient id of core vertex i
    (ascending).  membership and peel_order use ambient ids.
    """

    core: Graph
    membership: np.ndarray
    peel_order: tuple[int, ...]
    vertex_map: np.ndarray
    ambient_n: int

    @property
    def size(self) -> int:
        return self.core.n

    @property
    def degree_histogram(self) -> dict[int, int]:
        if self.core.n == 0:
            return {}
        counts = np.bincount(self.core.degrees)
        return {d: int(c) for d, c in enumerate(counts) if c}

    def edge_text(self) -> str:
        return format_edge_text(self.core)

    def sidecar_json(self) -> str:
        return json.dumps(
            {
                "ambient_n": self.ambient_n,
                "membership": self.membership.astype(int).tolist(),
                "degree_histogram": {
                    str(d): c for d, c in sorted(self.degree_histogram.items())
                },
            },
            separators=(",", ":"),
        )


def k_core(g: Graph, k: int) -> CoreResult:
    """Peel to the maximal induced subgraph with minimum degree >= k."""
    if k < 1:
        raise DomainError(f"k_core needs k >= 1, got {k}")
    deg = g.degrees.copy()
    alive = np.ones(g.n, dtype=bool)
    adj = g.adjacency()
    queued = deg < k
    work = deque(np.flatnonzero(queued).tolist())
    peel_order: list[int] = []
    while work:
        v = work.popleft()
        alive[v] = False
        peel_order.append(v)
        for u in adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < k and not queued[u]:
                    queued[u] = True
                    work.append(u)
    core, old_ids = g.induced_subgraph(alive)
    return CoreResult(
        core=core,
        membership=alive,
        peel_order=tuple(peel_order),
        vertex_map=old_ids,
        ambient_n=g.n,
    )


# ----------------------------------------------------------------- lw0 audits

@dataclass(frozen=True)
class Lw0Part:
    """One measured quantity next to its reference line; never asserted."""

    label: str
    description: str
    measured: float
    lower: float | None
    upper: float | None
    ok: bool


@dataclass(frozen=True)
class Lw0Report:
    parts: tuple[Lw0Part, ...]

    def part(self, label: str) -> Lw0Part:
        for p in self.parts:
            if p.label == label:
                return p
        raise KeyError(label)

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "label": p.label,
                    "description": p.description,
                    "measured": p.measured,
                    "lower": p.lower,
                    "upper": p.upper,
                    "ok": p.ok,
                }
                for p in self.parts
            ],
            separators=(",", ":"),
        )


def audit_lw0(
    result: CoreResult, k: int, multigraph_degrees=None
) -> Lw0Report:
    """Measure the eight pre-deletion structure quantities against their
    large-k reference bounds (fractions of the ambient vertex count).

    W0 is the set of core vertices of degree exactly k, R the rest.  When
    multigraph_degrees is given (configuration mode: loops count twice) the
    classification and degree cutoffs use those degrees; edge counts are
    always over the simple core graph.
    """
    core = result.core
    n = float(result.ambient_n)
    if multigraph_degrees is not None:
        deg = np.asarray(multigraph_degrees, dtype=np.int64)
        if len(deg) != core.n:
            raise DomainError("multigraph_degrees must cover the core")
    else:
        deg = core.degrees
    w0 = deg == k

    if core.n:
        e = core.edge_array
        u_w0 = w0[e[:, 0]]
        v_w0 = w0[e[:, 1]]
        e_w0w0 = int(np.sum(u_w0 & v_w0))
        e_w0r = int(np.sum(u_w0 ^ v_w0))
        e_rr = int(np.sum(~u_w0 & ~v_w0))
        w0_nbrs = np.zeros(core.n, dtype=np.int64)
        np.add.at(w0_nbrs, e[:, 0], v_w0)
        np.add.at(w0_nbrs, e[:, 1], u_w0)
    else:
        e_w0w0 = e_w0r = e_rr = 0
        w0_nbrs = np.zeros(0, dtype=np.int64)

    heavy = deg > 2 * k
    heavy_total_degree = int(deg[heavy].sum())
    crowded = int(np.sum((deg <= 2 * k) & (2 * w0_nbrs >= k)))
    lonely_r = int(np.sum(~w0 & (w0_nbrs == 0)))

    parts = (
        Lw0Part(
            "a", "core size vs 0.99 n",
            float(core.n), 0.99 * n, None, core.n > 0.99 * n,
        ),
        Lw0Part(
            "b", "|W0| inside (0.99 n/k, 1.01 n/k)",
            float(np.sum(w0)), 0.99 * n / k, 1.01 * n / k,
            bool(0.99 * n / k < np.sum(w0) < 1.01 * n / k),
        ),
        Lw0Part(
            "c", "total degree of vertices of degree > 2k vs e^(-k/6) n",
            float(heavy_total_degree), None, math.exp(-k / 6) * n,
            heavy_total_degree <= math.exp(-k / 6) * n,
        ),
        Lw0Part(
            "d", "edges inside W0 vs n/(5k)",
            float(e_w0w0), n / (5 * k), None, e_w0w0 >= n / (5 * k),
        ),
        Lw0Part(
            "e", "edges between W0 and R vs n/2",
            float(e_w0r), n / 2, None, e_w0r >= n / 2,
        ),
        Lw0Part(
            "f", "edges inside R vs kn/3",
            float(e_rr), k * n / 3, None, e_rr >= k * n / 3,
        ),
        Lw0Part(
            "g",
            "vertices of degree <= 2k with >= k/2 neighbors in W0 "
            "vs e^(-k/3) n",
            float(crowded), None, math.exp(-k / 3) * n,
            crowded <= math.exp(-k / 3) * n,
        ),
        Lw0Part(
            "h", "R vertices with no W0 neighbor vs n/200",
            float(lonely_r), n / 200, None, lonely_r >= n / 200,
        ),
    )
    return Lw0Report(parts=parts)

