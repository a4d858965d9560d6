"""k-regular spanning subgraph search, verification, and diagnostics.

Tutte's f-factor theorem, specialized to constant k on graphs of minimum
degree >= k, says a k-factor exists iff for every disjoint S, T:

    k|S| + sum_{v in T, d(v) > k} (d(v) - k) >= q(S,T) + e(S,T)

where q(S,T) counts components Q of the rest with k|Q| and e(Q,T) of
different parity.  This module provides both routes to a verdict:

* brute_force_tutte enumerates all disjoint (S, T) pairs (3^n states,
  capped at n = 16) and returns a violating witness if one exists,
  optionally restricted to pairs with S all-high and every counted
  component containing a high vertex, which preserves the verdict;
* find_k_factor constructs a factor outright through the classical
  reduction to perfect matching (per vertex: one external node per edge
  end, d(v) - k slack nodes, complete bipartite between them), seeded by
  a forced-move greedy subgraph so the blossom engine only repairs the
  residual deficiency.

audit_properties measures the expansion-style properties P1-P6 that a
stripped remainder is expected to satisfy: exact subset enumeration up to
12 vertices, randomized search with greedy worsening beyond that, always
reported as margins rather than asserted.
"""

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError, KflabError
from .graphs import Graph, Multigraph
from .matching import matched_pairs, maximum_matching, perfect_matching_exists
from .rng import make_rng, spawn_seed

__all__ = [
    "TutteWitness",
    "FactorCertificate",
    "GadgetReduction",
    "tutte_q",
    "tutte_check",
    "brute_force_tutte",
    "gadget_reduce",
    "perfect_matching",
    "find_k_factor",
    "verify_k_factor",
    "PropertyResult",
    "PropertyReport",
    "audit_properties",
]

BRUTE_FORCE_CAP = 16


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class TutteWitness:
    """One evaluated (S, T) pair of the factor inequality."""

    S: tuple[int, ...]
    T: tuple[int, ...]
    q: int
    e_st: int
    lhs: int
    rhs: int
    violated: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "S": sorted(int(v) for v in self.S),
                "T": sorted(int(v) for v in self.T),
                "q": self.q,
                "e_st": self.e_st,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "violated": self.violated,
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class FactorCertificate:
    """A spanning k-regular edge subset with its per-vertex degrees."""

    k: int
    edges: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "k": self.k,
                "edges": [[int(u), int(v)] for u, v in sorted(self.edges)],
                "degrees": [int(d) for d in self.degrees],
            },
            separators=(",", ":"),
        )


def _check_sets(g: Graph, S, T) -> tuple[set[int], set[int]]:
    s = {int(v) for v in S}
    t = {int(v) for v in T}
    if s & t:
        raise DomainError(f"S and T overlap: {sorted(s & t)}")
    for v in s | t:
        if not 0 <= v < g.n:
            raise DomainError(f"vertex {v} out of range for n = {g.n}")
    return s, t


def _require_simple(g) -> Graph:
    if not isinstance(g, Graph):
        raise DomainError(f"expected a simple Graph, got {type(g).__name__}")
    return g


def tutte_q(g: Graph, k: int, S, T) -> int:
    """Count components Q of g minus (S u T) with k|Q| and e(Q,T) of
    different parity."""
    _require_simple(g)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    s, t = _check_sets(g, S, T)
    removed = s | t
    seen = [False] * g.n
    count = 0
    for start in range(g.n):
        if seen[start] or start in removed:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.neighbors(v):
                u = int(u)
                if not seen[u] and u not in removed:
                    seen[u] = True
                    stack.append(u)
        e_qt = sum(1 for v in comp for u in g.neighbors(v) if int(u) in t)
        if (k * len(comp)) % 2 != e_qt % 2:
            count += 1
    return count


def tutte_check(g: Graph, k: int, S, T, strong: bool = False) -> TutteWitness:
    """Evaluate the factor inequality for one (S, T) pair.

    With strong=True the left side drops to k|S| + |T_H| (the cruder form
    that implies the standard one); useful as a diagnostic of slack.
    """
    _require_simple(g)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    deg = g.degrees
    if g.n and int(deg.min()) < k:
        raise DomainError("tutte_check requires minimum degree >= k")
    s, t = _check_sets(g, S, T)
    q = tutte_q(g, k, s, t)
    e_st = sum(1 for u, v in g.edge_tuples()
               if (u in s and v in t) or (v in s and u in t))
    t_high = [v for v in t if int(deg[v]) >= k + 1]
    if strong:
        lhs = k * len(s) + len(t_high)
    else:
        lhs = k * len(s) + sum(int(deg[v]) - k for v in t_high)
    rhs = q + e_st
    return TutteWitness(
        S=tuple(sorted(s)),
        T=tuple(sorted(t)),
        q=q,
        e_st=e_st,
        lhs=lhs,
        rhs=rhs,
        violated=lhs < rhs,
    )


def brute_force_tutte(g: Graph, k: int, restrict_m1m2: bool = False):
    """Exhaust all disjoint (S, T) pairs; return the first violating
    witness in deterministic order, or None when the inequality always
    holds (equivalently: a k-factor exists).

    restrict_m1m2 skips pairs where S contains a degree-k vertex (M1) or
    where some component counted by q has no vertex of degree >= k+1 (M2);
    the existence verdict is unchanged.
    """
    _require_simple(g)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    n = g.n
    if n > BRUTE_FORCE_CAP:
        raise DomainError(f"brute force capped at n = {BRUTE_FORCE_CAP}, got {n}")
    deg = [int(d) for d in g.degrees]
    if n and min(deg) < k:
        raise DomainError("brute_force_tutte requires minimum degree >= k")

    adjmask = [0] * n
    for u, v in g.edge_tuples():
        adjmask[u] |= 1 << v
        adjmask[v] |= 1 << u
    high_mask = 0
    for v in range(n):
        if deg[v] >= k + 1:
            high_mask |= 1 << v
    full = (1 << n) - 1

    for u_mask in range(full + 1):
        w_mask = full ^ u_mask
        wbits = [v for v in range(n) if (w_mask >> v) & 1]
        w = len(wbits)
        # components of the untouched set, with the data the inner loop
        # needs: parity of k|Q|, the W-vertices with odd edge count into Q,
        # and whether Q has any high vertex (for M2)
        comps = []
        rest = u_mask
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                grow = 0
                f = frontier
                while f:
                    b = f & -f
                    grow |= adjmask[b.bit_length() - 1]
                    f ^= b
                frontier = grow & u_mask & ~comp
                comp |= frontier
            rest ^= comp
            kq_odd = (k * comp.bit_count()) & 1
            odd_w = 0
            for v in wbits:
                if (adjmask[v] & comp).bit_count() & 1:
                    odd_w |= 1 << v
            comps.append((kq_odd, odd_w, (comp & high_mask) == 0))

        # subset DP over T <= W on local indices; S = W minus T
        size = 1 << w
        vmask = [0] * size
        e_in = [0] * size
        th_sum = [0] * size
        for t_local in range(1, size):
            lb = t_local & -t_local
            i = lb.bit_length() - 1
            prev = t_local ^ lb
            v = wbits[i]
            vm = vmask[prev]
            vmask[t_local] = vm | (1 << v)
            e_in[t_local] = e_in[prev] + (adjmask[v] & vm).bit_count()
            th_sum[t_local] = th_sum[prev] + (deg[v] - k if deg[v] > k else 0)
        e_w = e_in[size - 1]

        for t_local in range(size):
            s_local = (size - 1) ^ t_local
            t_mask = vmask[t_local]
            s_mask = vmask[s_local]
            if restrict_m1m2 and s_mask & ~high_mask:
                continue  # M1: S must avoid degree-k vertices
            q = 0
            m2_fail = False
            for kq_odd, odd_w, all_low in comps:
                if ((odd_w & t_mask).bit_count() & 1) != kq_odd:
                    q += 1
                    if all_low:
                        m2_fail = True
            if restrict_m1m2 and m2_fail:
                continue
            e_st = e_w - e_in[t_local] - e_in[s_local]
            lhs = k * s_local.bit_count() + th_sum[t_local]
            rhs = q + e_st
            if lhs < rhs:
                return TutteWitness(
                    S=tuple(v for v in wbits if (s_mask >> v) & 1),
                    T=tuple(v for v in wbits if (t_mask >> v) & 1),
                    q=q,
                    e_st=e_st,
                    lhs=lhs,
                    rhs=rhs,
                    violated=True,
                )
    return None


# ----------------------------------------------------------- gadget route

@dataclass(frozen=True)
class GadgetReduction:
    """Perfect-matching encoding of the degree-k subgraph problem.

    Per host vertex v: one external node per incident edge end and
    d(v) - k slack nodes, completely joined; per host edge instance one
    external-external edge.  Perfect matchings biject with k-factors via
    the matched external-external pairs.
    """

    n_host: int
    k: int
    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    instances: tuple[tuple[int, int], ...]
    pair_edges: tuple[tuple[int, int], ...]
    base: tuple[int, ...]
    host_degrees: tuple[int, ...]


def _host_instances(g, allow_loops=False) -> tuple[int, list[tuple[int, int]], list[int]]:
    if isinstance(g, Graph):
        inst = [(int(u), int(v)) for u, v in g.edge_tuples()]
        deg = [int(d) for d in g.degrees]
        return g.n, inst, deg
    if isinstance(g, Multigraph):
        if g.loop_count() and not allow_loops:
            raise DomainError("loops cannot participate in a k-factor; "
                              "strip or reject them first")
        inst = [(int(u), int(v)) for u, v in g.edge_instances()]
        deg = [int(d) for d in g.degrees]
        return g.n, inst, deg
    raise DomainError(f"expected Graph or Multigraph, got {type(g).__name__}")


def gadget_reduce(g, k: int) -> GadgetReduction:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    n, instances, deg = _host_instances(g)
    for v in range(n):
        if deg[v] < k:
            raise InfeasibleError(
                f"vertex {v} has degree {deg[v]} < k = {k}: no k-factor"
            )
    base = [0] * n
    off = 0
    for v in range(n):
        base[v] = off
        off += 2 * deg[v] - k  # d(v) externals + d(v) - k slacks
    n_nodes = off

    edges: list[tuple[int, int]] = []
    pair_edges: list[tuple[int, int]] = []
    cursor = [0] * n
    for u, v in instances:
        eu = base[u] + cursor[u]
        ev = base[v] + cursor[v]
        cursor[u] += 1
        cursor[v] += 1
        pair_edges.append((eu, ev))
        edges.append((eu, ev))
    for v in range(n):
        d = deg[v]
        for ei in range(d):
            for si in range(d - k):
                edges.append((base[v] + ei, base[v] + d + si))
    return GadgetReduction(
        n_host=n,
        k=k,
        n_nodes=n_nodes,
        edges=tuple(edges),
        instances=tuple(instances),
        pair_edges=tuple(pair_edges),
        base=tuple(base),
        host_degrees=tuple(deg),
    )


def perfect_matching(n: int, edges):
    """Perfect matching of an arbitrary graph as a sorted pair list, or
    None when only smaller matchings exist."""
    mate = maximum_matching(n, edges)
    if not perfect_matching_exists(mate):
        return None
    return matched_pairs(mate)


def _greedy_degree_saturation(n, instances, k) -> list[bool]:
    """Forced-move greedy subgraph with all degrees <= k, aiming for = k.

    A vertex whose undecided incident edges barely cover its remaining
    requirement must take them all; otherwise edges are taken in input
    order.  Deterministic; linear in the instance count.
    """
    m = len(instances)
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for j, (u, v) in enumerate(instances):
        incident[u].append((j, v))
        incident[v].append((j, u))
    need = [k] * n
    rem = [len(inc) for inc in incident]
    chosen = [False] * m
    undecided = [True] * m
    forced = deque(v for v in range(n) if 0 < need[v] >= rem[v])

    def waste(v: int) -> None:
        for j, u in incident[v]:
            if undecided[j]:
                undecided[j] = False
                rem[v] -= 1
                rem[u] -= 1
                if 0 < need[u] >= rem[u]:
                    forced.append(u)

    def take(j: int, u: int, v: int) -> None:
        undecided[j] = False
        chosen[j] = True
        rem[u] -= 1
        rem[v] -= 1
        need[u] -= 1
        need[v] -= 1
        for w in (u, v):
            if need[w] == 0:
                waste(w)
            elif 0 < need[w] >= rem[w]:
                forced.append(w)

    cursor = 0
    while True:
        while forced:
            v = forced.popleft()
            if need[v] <= 0:
                continue
            for j, u in incident[v]:
                if undecided[j] and need[v] > 0 and need[u] > 0:
                    take(j, v, u)
        while cursor < m:
            u, v = instances[cursor]
            if undecided[cursor] and need[u] > 0 and need[v] > 0:
                break
            cursor += 1
        if cursor == m:
            break
        take(cursor, *instances[cursor])
    return chosen


def _seed_mate(gadget: GadgetReduction, chosen) -> list[int]:
    mate = [-1] * gadget.n_nodes
    for j, (eu, ev) in enumerate(gadget.pair_edges):
        if chosen[j]:
            mate[eu] = ev
            mate[ev] = eu
    for v in range(gadget.n_host):
        b = gadget.base[v]
        d = gadget.host_degrees[v]
        free_exts = [b + i for i in range(d) if mate[b + i] == -1]
        for offset, ext in enumerate(free_exts[: d - gadget.k]):
            slack = b + d + offset
            mate[ext] = slack
            mate[slack] = ext
    return mate


def find_k_factor(g, k: int):
    """Construct a k-factor, or return None when none exists.

    Immediate Nones: odd k * n (parity makes a factor impossible) and any
    vertex of degree < k.  Otherwise the gadget is built, seeded from the
    greedy subgraph, and completed by the matching engine; the resulting
    certificate is re-verified before it is returned.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    n, instances, deg = _host_instances(g)
    if (k * n) % 2 == 1:
        return None
    if any(d < k for d in deg):
        return None
    if n == 0:
        return FactorCertificate(k=k, edges=(), degrees=())

    gadget = gadget_reduce(g, k)
    chosen = _greedy_degree_saturation(n, instances, k)
    seed = _seed_mate(gadget, chosen)
    mate = maximum_matching(gadget.n_nodes, gadget.edges, seed_mate=seed)
    if not perfect_matching_exists(mate):
        return None
    factor = [
        gadget.instances[j]
        for j, (eu, ev) in enumerate(gadget.pair_edges)
        if mate[eu] == ev
    ]
    cert = FactorCertificate(
        k=k,
        edges=tuple(sorted(factor)),
        degrees=tuple(_instance_degrees(n, factor)),
    )
    if not verify_k_factor(g, cert.edges, k):
        raise KflabError("internal error: constructed factor failed verification")
    return cert


def _instance_degrees(n: int, instances) -> list[int]:
    deg = [0] * n
    for u, v in instances:
        deg[u] += 1
        deg[v] += 1
    return deg


def verify_k_factor(g, F, k: int) -> bool:
    """True iff F is a subset of g's edges giving every vertex exactly k.

    Loops in a multigraph host are simply not usable by F (they would add
    2 to one vertex), so they do not block verification.
    """
    try:
        n, instances, _ = _host_instances(g, allow_loops=True)
    except DomainError:
        return False
    canon = [(min(int(u), int(v)), max(int(u), int(v))) for u, v in F]
    if any(u == v for u, v in canon):
        return False
    avail: dict[tuple[int, int], int] = {}
    for u, v in instances:
        key = (min(u, v), max(u, v))
        avail[key] = avail.get(key, 0) + 1
    for e in canon:
        left = avail.get(e, 0)
        if left == 0:
            return False
        avail[e] = left - 1
    deg = _instance_degrees(n, canon) if n else []
    return all(d == k for d in deg)


# ------------------------------------------------------------ P1-P6 audits

@dataclass(frozen=True)
class PropertyResult:
    name: str
    mode: str  # exact | sampled | vacuous
    checked: int
    violations: int
    worst_margin: float | None
    witness: tuple[tuple[int, ...], ...] | None

    def to_json_dict(self):
        return {
            "name": self.name,
            "mode": self.mode,
            "checked": self.checked,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "witness": None
            if self.witness is None
            else [sorted(int(v) for v in part) for part in self.witness],
        }


@dataclass(frozen=True)
class PropertyReport:
    results: tuple[PropertyResult, ...]
    epsilon0: float
    gamma: float
    exhaustive: bool

    def result(self, name: str) -> PropertyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_clear(self) -> bool:
        return all(r.violations == 0 for r in self.results)

    def to_json(self) -> str:
        return json.dumps(
            {
                "epsilon0": self.epsilon0,
                "gamma": self.gamma,
                "exhaustive": self.exhaustive,
                "all_clear": self.all_clear,
                "results": [r.to_json_dict() for r in self.results],
            },
            separators=(",", ":"),
        )


EXACT_AUDIT_CAP = 12


def _p6_terms(k: int) -> tuple[float, float]:
    root = math.sqrt(k * math.log(k)) if k > 1 else 0.0
    return 0.75 * root, 0.875 * root


def _audit_exact(g: Graph, k, eps0, gamma) -> list[PropertyResult]:
    n = g.n
    deg = [int(d) for d in g.degrees]
    adjmask = [0] * n
    for u, v in g.edge_tuples():
        adjmask[u] |= 1 << v
        adjmask[v] |= 1 << u
    size = 1 << n
    e_in = [0] * size
    nbr = [0] * size
    dsum = [0] * size
    cnt = [0] * size
    for m in range(1, size):
        lb = m & -m
        v = lb.bit_length() - 1
        prev = m ^ lb
        e_in[m] = e_in[prev] + (adjmask[v] & prev).bit_count()
        nbr[m] = nbr[prev] | adjmask[v]
        dsum[m] = dsum[prev] + deg[v]
        cnt[m] = cnt[prev] + 1
    total_edges = e_in[size - 1]

    track: dict[str, list] = {
        name: [0, 0, None, None] for name in ("P1", "P2", "P3", "P4", "P5", "P6")
    }

    def record(name, margin, violated, witness):
        t = track[name]
        t[0] += 1
        t[1] += int(violated)
        if t[2] is None or margin < t[2]:
            t[2] = margin
            t[3] = witness
    p1_cap = 10.0 * eps0 * n
    p34_cap = eps0 * n
    p56_cut = eps0 * n / 10.0
    p5_floor = 9.0 * eps0 * n / 10.0
    c6a, c6b = _p6_terms(k)

    bits_cache = [tuple(v for v in range(n) if (m >> v) & 1) for m in range(size)]

    for y in range(1, size):
        ny = cnt[y]
        if ny <= p1_cap:
            margin = k * ny / 6000.0 - e_in[y]
            record("P1", margin, margin <= 0, (bits_cache[y],))
        if 2 * ny <= n:
            cut = total_edges - e_in[y] - e_in[(size - 1) ^ y]
            margin = cut - gamma * k * ny
            record("P2", margin, margin < 0, (bits_cache[y],))

    for x in range(1, size):
        nx = cnt[x]
        comp = (size - 1) ^ x
        y = comp
        while y:
            ny = cnt[y]
            e_xy = e_in[x | y] - e_in[x] - e_in[y]
            if 200 * nx >= ny and ny <= p34_cap:
                margin = 0.5 * gamma * k * nx - e_xy
                record("P3", margin, margin <= 0, (bits_cache[x], bits_cache[y]))
            if nx + ny <= p34_cap:
                common = (nbr[x] & y).bit_count()
                margin = (1 + 1 / 2000.0) * common + k * nx / 100.0 - e_xy
                record("P4", margin, margin <= 0, (bits_cache[x], bits_cache[y]))
            # (S, T) role: x plays S, y plays T
            if ny < p56_cut and nx > p5_floor:
                margin = 0.75 * k * nx - e_xy
                record("P5", margin, margin <= 0, (bits_cache[x], bits_cache[y]))
            if ny >= p56_cut:
                m1 = k * nx + c6a * ny - e_xy
                m2 = dsum[y] - (k + c6b) * ny
                margin = min(m1, m2)
                record("P6", margin, m1 < 0 or m2 <= 0,
                       (bits_cache[x], bits_cache[y]))
            y = (y - 1) & comp

    out = []
    for name, (checked, viol, worst, witness) in track.items():
        out.append(
            PropertyResult(
                name=name,
                mode="exact" if checked else "vacuous",
                checked=checked,
                violations=viol,
                worst_margin=None if worst is None else float(worst),
                witness=witness,
            )
        )
    return out


def _pair_stats(edge_arr, in_x, in_y):
    u = edge_arr[:, 0]
    v = edge_arr[:, 1]
    e_xy = int(np.sum((in_x[u] & in_y[v]) | (in_y[u] & in_x[v])))
    return e_xy


def _neighbors_in(edge_arr, in_x, n):
    nb = np.zeros(n, dtype=bool)
    u = edge_arr[:, 0]
    v = edge_arr[:, 1]
    nb[v[in_x[u]]] = True
    nb[u[in_x[v]]] = True
    return nb


def _audit_sampled(g: Graph, k, eps0, gamma, budget, seed) -> list[PropertyResult]:
    n = g.n
    deg = g.degrees.astype(np.float64)
    edge_arr = g.edge_array if g.m else np.zeros((0, 2), dtype=np.int64)
    c6a, c6b = _p6_terms(k)
    local_moves = 8
    draws = max(1, budget // (6 * (1 + local_moves)))

    p1_cap = int(10 * eps0 * n)
    p34_cap = int(eps0 * n)
    p6_floor = max(1, math.ceil(eps0 * n / 10))
    p5_cap = math.ceil(eps0 * n / 10) - 1  # |T| < eps0 n / 10
    p5_floor = int(9 * eps0 * n / 10) + 1  # |S| > 9 eps0 n / 10

    def e_between(in_x, in_y):
        if not len(edge_arr):
            return 0
        return _pair_stats(edge_arr, in_x, in_y)

    # each spec: eligibility over sizes, evaluator -> (margin, violated)
    def ok_p1(ny):
        return 1 <= ny <= p1_cap

    def eval_p1(in_y):
        ny = int(in_y.sum())
        e_y = int(np.sum(in_y[edge_arr[:, 0]] & in_y[edge_arr[:, 1]])) if len(edge_arr) else 0
        m = k * ny / 6000.0 - e_y
        return m, m <= 0

    def ok_p2(ny):
        return 1 <= ny and 2 * ny <= n

    def eval_p2(in_y):
        ny = int(in_y.sum())
        cut = e_between(in_y, ~in_y)
        m = cut - gamma * k * ny
        return m, m < 0

    def ok_p3(nx, ny):
        return nx >= 1 and ny >= 1 and 200 * nx >= ny and ny <= p34_cap

    def eval_p3(in_x, in_y):
        nx = int(in_x.sum())
        m = 0.5 * gamma * k * nx - e_between(in_x, in_y)
        return m, m <= 0

    def ok_p4(nx, ny):
        return nx >= 1 and ny >= 1 and nx + ny <= p34_cap

    def eval_p4(in_x, in_y):
        nx = int(in_x.sum())
        common = int(np.sum(_neighbors_in(edge_arr, in_x, n) & in_y)) if len(edge_arr) else 0
        m = (1 + 1 / 2000.0) * common + k * nx / 100.0 - e_between(in_x, in_y)
        return m, m <= 0

    def ok_p5(ns, nt):
        return ns >= p5_floor and 1 <= nt <= p5_cap

    def eval_p5(in_s, in_t):
        ns = int(in_s.sum())
        m = 0.75 * k * ns - e_between(in_s, in_t)
        return m, m <= 0

    def ok_p6(ns, nt):
        return nt >= p6_floor

    def eval_p6(in_s, in_t):
        ns = int(in_s.sum())
        nt = int(in_t.sum())
        m1 = k * ns + c6a * nt - e_between(in_s, in_t)
        m2 = float(deg[in_t].sum()) - (k + c6b) * nt
        return min(m1, m2), (m1 < 0 or m2 <= 0)

    # draw ranges: (x or y size low/high per part); eligibility re-filters
    specs = [
        ("P1", [(1, p1_cap)], ok_p1, eval_p1),
        ("P2", [(1, n // 2)], ok_p2, eval_p2),
        ("P3", [(1, n), (1, min(p34_cap, 200 * n))], ok_p3, eval_p3),
        ("P4", [(1, p34_cap), (1, p34_cap)], ok_p4, eval_p4),
        ("P5", [(p5_floor, n), (1, p5_cap)], ok_p5, eval_p5),
        ("P6", [(0, n), (p6_floor, n)], ok_p6, eval_p6),
    ]
    results = []
    for idx, (name, ranges, ok, ev) in enumerate(specs):
        rng = make_rng(spawn_seed(seed, "audit", idx))
        checked = 0
        viol = 0
        worst = None
        witness = None
        for _ in range(draws):
            sizes = [int(rng.integers(lo, hi + 1)) if hi >= lo else -1
                     for lo, hi in ranges]
            if any(s < 0 for s in sizes) or sum(sizes) > n or not ok(*sizes):
                continue
            perm = rng.permutation(n)
            state = []
            at = 0
            for s in sizes:
                part = np.zeros(n, dtype=bool)
                part[perm[at:at + s]] = True
                state.append(part)
                at += s
            m, bad = ev(*state)
            checked += 1
            for _ in range(local_moves):
                side = int(rng.integers(0, len(state)))
                part = state[side]
                v = int(rng.integers(0, n))
                if not part[v] and any(s[v] for s in state):
                    continue  # keep the parts disjoint
                part[v] = not part[v]
                new_sizes = [int(s.sum()) for s in state]
                if not ok(*new_sizes):
                    part[v] = not part[v]
                    continue
                m2, bad2 = ev(*state)
                checked += 1
                if m2 < m:
                    m, bad = m2, bad2
                else:
                    part[v] = not part[v]
            viol += int(bad)
            if worst is None or m < worst:
                worst = m
                witness = tuple(
                    tuple(int(i) for i in np.flatnonzero(s)) for s in state
                )
        results.append(
            PropertyResult(
                name=name,
                mode="sampled" if checked else "vacuous",
                checked=checked,
                violations=viol,
                worst_margin=None if worst is None else float(worst),
                witness=witness,
            )
        )
    return results


def audit_properties(
    K: Graph,
    k: int,
    epsilon0: float = 0.01,
    gamma: float = 0.1,
    sample_budget: int = 2000,
    seed: int = 0,
) -> PropertyReport:
    """Measure the expansion properties P1-P6 of a remainder graph.

    Up to 12 vertices every subset pair is enumerated, so a clean report
    is a proof; beyond that, sample_budget randomized draws with greedy
    local worsening only search for violations, and the report says so.
    Margins are slack against each property's bound: negative (or zero,
    for strict bounds) means violated.
    """
    _require_simple(K)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0 < epsilon0 <= 1 or not 0 < gamma <= 1:
        raise DomainError("epsilon0 and gamma must be in (0, 1]")
    if K.n <= EXACT_AUDIT_CAP:
        results = _audit_exact(K, k, epsilon0, gamma)
        exhaustive = True
    else:
        results = _audit_sampled(K, k, epsilon0, gamma, sample_budget, seed)
        exhaustive = False
    return PropertyReport(
        results=tuple(results),
        epsilon0=epsilon0,
        gamma=gamma,
        exhaustive=exhaustive,
    )
