"""Factor-existence tests: deficiency counting, brute-force search over
vertex-set pairs, the matching gadget, constructed certificates, and the
expansion-property audits.

Hand-checkable graphs (bowtie, small cycles, complete graphs) pin exact
witnesses and certificates; randomized runs cross-check the constructive
route against the exhaustive one and against a direct edge-subset search.
"""

import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kflab.errors import DomainError, InfeasibleError
from kflab.graphs import Graph, Multigraph
from kflab.kfactor import (
    BRUTE_FORCE_CAP,
    FactorCertificate,
    TutteWitness,
    audit_properties,
    brute_force_tutte,
    find_k_factor,
    gadget_reduce,
    perfect_matching,
    tutte_check,
    tutte_q,
    verify_k_factor,
)
from kflab.rng import make_rng

# two triangles sharing vertex 0: its only deg >= 2 obstruction is the cut
# vertex, which cannot serve both triangles in a 2-regular subgraph
BOWTIE = Graph(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)])
K4 = Graph(4, list(itertools.combinations(range(4), 2)))
K5 = Graph(5, list(itertools.combinations(range(5), 2)))
C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
C5 = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
P3 = Graph(3, [(0, 1), (1, 2)])


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Graph(n, edges)


def regular_subgraph_exists(g: Graph, k: int) -> bool:
    """Direct backtracking over edge subsets: keep or drop each edge,
    pruning on over/under-full vertices.  Independent of all library
    counting, usable up to a few dozen edges."""
    edges = list(g.edge_tuples())
    need = [k] * g.n
    # remcap[i] = how much degree vertex v can still gain from edges >= i
    remaining = [[0] * g.n for _ in range(len(edges) + 1)]
    for i in range(len(edges) - 1, -1, -1):
        u, v = edges[i]
        row = remaining[i + 1][:]
        row[u] += 1
        row[v] += 1
        remaining[i] = row

    def rec(i, need):
        if any(need[v] > remaining[i][v] for v in range(g.n)):
            return False
        if i == len(edges):
            return all(x == 0 for x in need)
        u, v = edges[i]
        if need[u] > 0 and need[v] > 0:
            need[u] -= 1
            need[v] -= 1
            if rec(i + 1, need):
                return True
            need[u] += 1
            need[v] += 1
        return rec(i + 1, need)

    return rec(0, need)


# ------------------------------------------------------------ tutte_q


def test_q_hand_values():
    assert tutte_q(BOWTIE, 2, {0}, {1}) == 1
    # P3 minus nothing: the lone component {1} has k|Q| = 1 vs e = 2
    assert tutte_q(P3, 1, set(), {0, 2}) == 1
    assert tutte_q(P3, 2, set(), {0, 2}) == 0
    # whole graph as one component: 5k odd iff k odd
    assert tutte_q(C5, 1, set(), set()) == 1
    assert tutte_q(C5, 2, set(), set()) == 0


def test_q_domain_errors():
    with pytest.raises(DomainError):
        tutte_q(C4, 2, {0}, {0})
    with pytest.raises(DomainError):
        tutte_q(C4, 2, {9}, set())
    with pytest.raises(DomainError):
        tutte_q(C4, 0, set(), set())


# --------------------------------------------------------- tutte_check


def test_check_bowtie_witness():
    w = tutte_check(BOWTIE, 2, {0}, {1, 2, 3, 4})
    assert w == TutteWitness(S=(0,), T=(1, 2, 3, 4), q=0, e_st=4,
                             lhs=2, rhs=4, violated=True)
    assert json.loads(w.to_json()) == {
        "S": [0], "T": [1, 2, 3, 4], "q": 0, "e_st": 4,
        "lhs": 2, "rhs": 4, "violated": True,
    }


def test_check_strong_form_smaller_lhs():
    weak = tutte_check(K5, 2, {0}, {1, 2, 3, 4})
    strong = tutte_check(K5, 2, {0}, {1, 2, 3, 4}, strong=True)
    # every T vertex has degree 4 = k + 2: surplus 2 each vs flat 1 each
    assert weak.lhs == 10 and not weak.violated
    assert strong.lhs == 6 and not strong.violated
    assert (weak.q, weak.e_st) == (strong.q, strong.e_st) == (0, 4)


def test_check_requires_min_degree():
    with pytest.raises(DomainError):
        tutte_check(P3, 2, set(), set())


def test_check_rejects_multigraph():
    mg = Multigraph(2, [{1: 2}, {0: 2}], [0, 0])
    with pytest.raises(DomainError):
        tutte_check(mg, 2, set(), set())


# ---------------------------------------------------- brute_force_tutte


def test_brute_hand_verdicts():
    assert brute_force_tutte(K4, 3) is None
    assert brute_force_tutte(K4, 2) is None
    assert brute_force_tutte(C5, 2) is None
    w = brute_force_tutte(BOWTIE, 2)
    assert w == TutteWitness(S=(0,), T=(1, 2, 3, 4), q=0, e_st=4,
                             lhs=2, rhs=4, violated=True)


def test_brute_parity_obstruction():
    # 5 vertices, k odd: the empty pair already fails (one odd component)
    w = brute_force_tutte(C5, 1)
    assert w == TutteWitness(S=(), T=(), q=1, e_st=0, lhs=0, rhs=1,
                             violated=True)


def test_brute_guards():
    big = Graph(BRUTE_FORCE_CAP + 1,
                [(i, (i + 1) % (BRUTE_FORCE_CAP + 1))
                 for i in range(BRUTE_FORCE_CAP + 1)])
    with pytest.raises(DomainError):
        brute_force_tutte(big, 2)
    with pytest.raises(DomainError):
        brute_force_tutte(P3, 2)
    with pytest.raises(DomainError):
        brute_force_tutte(C4, 0)


def test_brute_restricted_verdicts_agree():
    rng = make_rng(99)
    eligible = 0
    for _ in range(120):
        n = int(rng.integers(5, 9))
        k = int(rng.integers(1, 4))
        g = random_graph(rng, n, 0.35 + 0.45 * rng.random())
        if g.n and int(g.degrees.min()) < k:
            continue
        full = brute_force_tutte(g, k)
        restricted = brute_force_tutte(g, k, restrict_m1m2=True)
        assert (full is None) == (restricted is None)
        eligible += 1
    assert eligible > 40


# ------------------------------------------------------------- gadget


def test_gadget_counts_k4():
    gad = gadget_reduce(K4, 2)
    # 4 vertices, degree 3, k = 2: 3 externals + 1 slack each
    assert gad.n_nodes == 16
    assert gad.base == (0, 4, 8, 12)
    assert len(gad.pair_edges) == 6
    assert len(gad.edges) == 18  # 6 pair + 4 * (3 externals x 1 slack)
    assert gad.host_degrees == (3, 3, 3, 3)


def test_gadget_zero_slack_cycle():
    gad = gadget_reduce(C4, 2)
    assert gad.n_nodes == 8
    assert gad.base == (0, 2, 4, 6)
    # degree == k leaves no slack nodes: gadget is exactly the pair edges
    assert gad.edges == gad.pair_edges
    assert len(gad.edges) == 4


def test_gadget_errors():
    with pytest.raises(InfeasibleError):
        gadget_reduce(Graph(3, [(0, 1), (1, 2), (2, 0)]), 3)
    with pytest.raises(DomainError):
        gadget_reduce(Multigraph(1, [{}], [1]), 1)
    with pytest.raises(DomainError):
        gadget_reduce(C4, 0)


def count_perfect_matchings(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    used = [False] * n

    def rec():
        try:
            u = used.index(False)
        except ValueError:
            return 1
        used[u] = True
        total = 0
        for w in adj[u]:
            if not used[w]:
                used[w] = True
                total += rec()
                used[w] = False
        used[u] = False
        return total

    return rec()


def test_gadget_matchings_biject_with_factors():
    # K4 has exactly three 2-factors (its three hamilton cycles); with one
    # slack per vertex the slack assignment is forced, so the gadget has
    # exactly three perfect matchings
    gad = gadget_reduce(K4, 2)
    assert count_perfect_matchings(gad.n_nodes, gad.edges) == 3


# --------------------------------------------------- perfect_matching


def test_perfect_matching_wrapper():
    assert perfect_matching(2, [(0, 1)]) == [(0, 1)]
    assert perfect_matching(5, [(i, (i + 1) % 5) for i in range(5)]) is None
    petersen = ([(i, (i + 1) % 5) for i in range(5)]
                + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
                + [(i, i + 5) for i in range(5)])
    pm = perfect_matching(10, petersen)
    assert pm is not None and len(pm) == 5


# ------------------------------------------------------- find_k_factor


def test_factor_cycle_is_its_own():
    cert = find_k_factor(C4, 2)
    assert cert == FactorCertificate(
        k=2, edges=((0, 1), (0, 3), (1, 2), (2, 3)), degrees=(2, 2, 2, 2))
    assert json.loads(cert.to_json()) == {
        "k": 2,
        "edges": [[0, 1], [0, 3], [1, 2], [2, 3]],
        "degrees": [2, 2, 2, 2],
    }


def test_factor_forced_four_cycle():
    # K4 minus (0,1): using (2,3) would starve vertex 1, so the unique
    # 2-factor is the 4-cycle through the missing edge's endpoints
    k4e = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    cert = find_k_factor(k4e, 2)
    assert cert.edges == ((0, 2), (0, 3), (1, 2), (1, 3))


def test_factor_immediate_nones():
    assert find_k_factor(K5, 3) is None  # k * n odd
    assert find_k_factor(BOWTIE, 2) is None  # cut vertex obstruction
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert find_k_factor(star, 2) is None  # leaves have degree < k


def test_factor_empty_graph():
    cert = find_k_factor(Graph(0, []), 2)
    assert cert == FactorCertificate(k=2, edges=(), degrees=())


def test_factor_k4_both_ks():
    c3 = find_k_factor(K4, 3)
    assert c3.edges == tuple(sorted(itertools.combinations(range(4), 2)))
    c2 = find_k_factor(K4, 2)
    assert verify_k_factor(K4, c2.edges, 2)
    assert len(c2.edges) == 4


def test_factor_multigraph_parallel_edges():
    mg = Multigraph(2, [{1: 2}, {0: 2}], [0, 0])
    cert = find_k_factor(mg, 2)
    assert cert.edges == ((0, 1), (0, 1))
    assert cert.degrees == (2, 2)
    assert verify_k_factor(mg, cert.edges, 2)


def test_factor_rejects_loops():
    with pytest.raises(DomainError):
        find_k_factor(Multigraph(1, [{}], [1]), 2)


def test_factor_k_guard():
    with pytest.raises(DomainError):
        find_k_factor(C4, 0)


# ----------------------------------------------------- verify_k_factor


def test_verify_accepts_and_rejects():
    assert verify_k_factor(C4, [(0, 1), (1, 2), (2, 3), (3, 0)], 2)
    assert verify_k_factor(C4, [(1, 0), (2, 1), (3, 2), (0, 3)], 2)
    # triangle on K4 leaves vertex 3 at degree 0
    assert not verify_k_factor(K4, [(0, 1), (1, 2), (0, 2)], 2)
    # edge absent from the host
    assert not verify_k_factor(C4, [(0, 2), (1, 3), (0, 1), (2, 3)], 2)
    # one host edge used twice
    assert not verify_k_factor(C4, [(0, 1), (0, 1), (2, 3), (2, 3)], 2)
    # self-loops never belong to a factor
    assert not verify_k_factor(C4, [(0, 0), (1, 2), (2, 3), (3, 0)], 2)
    # wrong k
    assert not verify_k_factor(C4, [(0, 1), (1, 2), (2, 3), (3, 0)], 1)
    assert verify_k_factor(Graph(0, []), [], 3)


def test_verify_multigraph_multiplicity():
    mg = Multigraph(2, [{1: 2}, {0: 2}], [0, 0])
    assert verify_k_factor(mg, [(0, 1), (0, 1)], 2)
    assert not verify_k_factor(mg, [(0, 1), (0, 1), (0, 1)], 3)
    # loops in the host are ignorable, not disqualifying
    loopy = Multigraph(2, [{1: 1}, {0: 1}], [1, 0])
    assert verify_k_factor(loopy, [(0, 1)], 1)
    assert not verify_k_factor(loopy, [(0, 0)], 1)


# ---------------------------------------------------- route agreement


def test_constructive_matches_brute_existence():
    rng = make_rng(4242)
    eligible = 0
    for _ in range(200):
        n = int(rng.integers(4, 11))
        k = int(rng.integers(1, 5))
        g = random_graph(rng, n, 0.3 + 0.6 * rng.random())
        if g.n == 0 or int(g.degrees.min()) < k:
            continue
        witness = brute_force_tutte(g, k)
        cert = find_k_factor(g, k)
        assert (witness is None) == (cert is not None), (n, k)
        eligible += 1
    assert eligible > 60


def test_constructive_matches_edge_subset_search():
    rng = make_rng(777)
    for _ in range(60):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(1, 4))
        g = random_graph(rng, n, 0.4 + 0.4 * rng.random())
        cert = find_k_factor(g, k)
        assert (cert is not None) == regular_subgraph_exists(g, k), (n, k)


def test_certificates_always_verify():
    rng = make_rng(31337)
    found = 0
    for _ in range(150):
        n = int(rng.integers(2, 40))
        k = int(rng.integers(1, 5))
        g = random_graph(rng, n, 0.2 + 0.6 * rng.random())
        cert = find_k_factor(g, k)
        if cert is None:
            continue
        found += 1
        assert verify_k_factor(g, cert.edges, k)
        assert cert.degrees == (k,) * n
        assert list(cert.edges) == sorted(cert.edges)
        host = set(g.edge_tuples())
        assert all(e in host for e in cert.edges)
    assert found > 30


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 12), st.integers(1, 3), st.data())
def test_factor_certificate_property(n, k, data):
    pairs = list(itertools.combinations(range(n), 2))
    picks = data.draw(st.lists(st.sampled_from(pairs), unique=True,
                               max_size=len(pairs)))
    g = Graph(n, picks)
    cert = find_k_factor(g, k)
    if cert is not None:
        assert verify_k_factor(g, cert.edges, k)
        assert cert.degrees == (k,) * n
    elif g.n <= BRUTE_FORCE_CAP and g.n and int(g.degrees.min()) >= k:
        assert brute_force_tutte(g, k) is not None


# -------------------------------------------------------------- audits


def test_audit_empty_graph_vacuous():
    rep = audit_properties(Graph(0, []), 3)
    assert rep.all_clear and rep.exhaustive
    for r in rep.results:
        assert (r.mode, r.checked, r.violations) == ("vacuous", 0, 0)
        assert r.worst_margin is None


def test_audit_exact_complete_graph():
    K12 = Graph(12, list(itertools.combinations(range(12), 2)))
    rep = audit_properties(K12, 3, epsilon0=0.5, gamma=0.1)
    assert rep.exhaustive and not rep.all_clear
    p1 = rep.result("P1")
    # worst Y is everything: 3 * 12 / 6000 bound vs 66 internal edges
    assert (p1.mode, p1.checked, p1.violations) == ("exact", 4095, 4083)
    assert p1.worst_margin == pytest.approx(3 * 12 / 6000 - 66)
    assert p1.witness == (tuple(range(12)),)
    with pytest.raises(KeyError):
        rep.result("P9")


def test_audit_exact_cycle_degree_clause():
    # a 2-regular graph can never satisfy the degree-surplus clause: every
    # vertex sits exactly at k, so each (S, T) pair reports a violation
    C12 = Graph(12, [(i, (i + 1) % 12) for i in range(12)])
    rep = audit_properties(C12, 2, epsilon0=0.01, gamma=0.1)
    assert rep.exhaustive and not rep.all_clear
    for name, violations in (("P1", 0), ("P2", 0)):
        r = rep.result(name)
        assert r.mode == "exact" and r.violations == violations
    for name in ("P3", "P4", "P5"):
        assert rep.result(name).mode == "vacuous"
    p6 = rep.result("P6")
    # nonempty disjoint (S, T) pairs: 3^12 - 2 * 2^12 + 1
    assert p6.checked == 3 ** 12 - 2 ** 13 + 1 == 523250
    assert p6.violations == p6.checked
    # S nonempty caps |T| at 11; margin is the pure degree shortfall
    surplus = 0.875 * math.sqrt(2 * math.log(2))
    assert p6.worst_margin == pytest.approx(-surplus * 11)


def test_audit_sampled_deterministic():
    K40 = Graph(40, list(itertools.combinations(range(40), 2)))
    kw = dict(epsilon0=0.5, gamma=0.1, sample_budget=600)
    a = audit_properties(K40, 3, seed=5, **kw)
    b = audit_properties(K40, 3, seed=5, **kw)
    c = audit_properties(K40, 3, seed=6, **kw)
    assert a.to_json() == b.to_json()
    assert a.to_json() != c.to_json()
    assert not a.exhaustive
    assert all(r.mode == "sampled" for r in a.results)
    assert a.result("P1").violations > 0


def test_audit_guards():
    with pytest.raises(DomainError):
        audit_properties(C4, 0)
    with pytest.raises(DomainError):
        audit_properties(C4, 2, epsilon0=0.0)
    with pytest.raises(DomainError):
        audit_properties(C4, 2, gamma=1.5)
    with pytest.raises(DomainError):
        audit_properties(Multigraph(1, [{}], [0]), 1)


def test_audit_report_json_shape():
    rep = audit_properties(C4, 2, epsilon0=0.5, gamma=0.1)
    d = json.loads(rep.to_json())
    assert sorted(d.keys()) == [
        "all_clear", "epsilon0", "exhaustive", "gamma", "results"]
    assert len(d["results"]) == 6
    assert [r["name"] for r in d["results"]] == [
        "P1", "P2", "P3", "P4", "P5", "P6"]
    for r in d["results"]:
        assert sorted(r.keys()) == [
            "checked", "mode", "name", "violations", "witness",
            "worst_margin"]
