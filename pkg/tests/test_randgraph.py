"""Sampling layer tests: G(n,p), configurations, and the class re-sampler.

Oracles: brute-force enumeration of all pairings on up to 12 copies for
exact simple fractions and re-sampler supports, binomial moments for
edge counts, and hand-built configurations for split-degree extraction.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from kflab.errors import (
    DomainError,
    ExhaustionError,
    InfeasibleError,
    ParityError,
)
from kflab.graphs import Graph, format_edge_text, parse_edge_text
from kflab.randgraph import (
    R,
    W0,
    W1,
    Configuration,
    RWInfo,
    _decode_pair_index,
    gen_gnp,
    project_multigraph,
    rw_extract,
    sample_configuration,
    sample_from_rw,
    sample_simple_with_degrees,
    to_multigraph,
)
from kflab.rng import spawn_seed


def all_pairings(copies):
    """Yield every perfect matching on the given copy ids."""
    if not copies:
        yield []
        return
    a = copies[0]
    for i in range(1, len(copies)):
        b = copies[i]
        rest = copies[1:i] + copies[i + 1 :]
        for tail in all_pairings(rest):
            yield [(a, b)] + tail


def config_from_pairs(degrees, pairs):
    total = int(np.sum(degrees))
    mate = np.full(total, -1, dtype=np.int64)
    for a, b in pairs:
        mate[a], mate[b] = b, a
    return Configuration(degrees=np.asarray(degrees, dtype=np.int64), mate=mate)


# --------------------------------------------------------------------- gen_gnp

def test_gnp_zero_density_is_empty():
    for seed in (0, 1, 99):
        g = gen_gnp(5, 0.0, seed)
        assert g.n == 5 and g.m == 0


def test_gnp_full_density_is_complete():
    for seed in (0, 7, 123):
        g = gen_gnp(4, 4.0, seed)
        assert g.m == 6
        assert g.edge_tuples() == [
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
        ]


def test_gnp_rejects_bad_arguments():
    with pytest.raises(DomainError):
        gen_gnp(0, 1.0, 0)
    with pytest.raises(DomainError):
        gen_gnp(5, -0.1, 0)


def test_pair_index_decode_exhaustive():
    # the skip sampler stands on this decode; check every index directly
    for n in (2, 3, 5, 17, 40):
        expect = np.array(
            list(itertools.combinations(range(n), 2)), dtype=np.int64
        )
        got = _decode_pair_index(np.arange(len(expect)), n)
        assert np.array_equal(got, expect)


def test_pair_index_decode_row_boundaries_large_n():
    # float sqrt rounding must be fixed up exactly even at n = 10^6
    n = 10**6
    rng = np.random.default_rng(5)
    us = np.concatenate([[0, 1, n - 3, n - 2], rng.integers(0, n - 1, 50)])
    ts = []
    for u in us:
        start = u * (2 * n - u - 1) // 2
        ts.extend([start, start + (n - 1 - u) - 1])
    decoded = _decode_pair_index(np.array(sorted(set(ts))), n)
    for t, (u, v) in zip(sorted(set(ts)), decoded.tolist()):
        assert 0 <= u < v < n
        assert u * (2 * n - u - 1) // 2 + (v - u - 1) == t


def test_gnp_edge_count_near_binomial_mean():
    n, c = 10**5, 12.0
    g = gen_gnp(n, c, 7)
    p = c / n
    pairs = n * (n - 1) // 2
    mean = pairs * p
    sd = (pairs * p * (1 - p)) ** 0.5
    assert abs(g.m - mean) < 4 * sd


def test_gnp_deterministic_and_byte_stable():
    a = gen_gnp(500, 3.0, 42)
    b = gen_gnp(500, 3.0, 42)
    assert a == b
    assert format_edge_text(a) == format_edge_text(b)
    assert parse_edge_text(format_edge_text(a)) == a
    assert gen_gnp(500, 3.0, 43) != a


def test_gnp_outcome_distribution_uniform_chi2():
    # at n=4, p=1/2 all 64 labelled graphs are equally likely; a chi-square
    # over full outcomes checks pair independence, not just the marginals
    counts = np.zeros(64, dtype=np.int64)
    trials = 20000
    for s in range(trials):
        g = gen_gnp(4, 2.0, spawn_seed(8001, "gnp-dist", s))
        code = 0
        for u, v in g.edge_tuples():
            code |= 1 << (u * 4 + v)
        counts[hash_code(code)] += 1
    chi2 = float(np.sum((counts - trials / 64) ** 2 / (trials / 64)))
    p_value = stats.chi2.sf(chi2, df=63)
    assert p_value > 0.01


def hash_code(code: int) -> int:
    # compress the 16-bit adjacency code of a 4-vertex graph to 6 pair bits
    bits = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    out = 0
    for i, (u, v) in enumerate(bits):
        if code & (1 << (u * 4 + v)):
            out |= 1 << i
    return out


# -------------------------------------------------------------- configurations

def test_sample_configuration_single_pairing():
    cfg = sample_configuration([1, 1], 3)
    assert cfg.pairs() == [(0, 1)]
    g, loops, multis = project_multigraph(cfg)
    assert g.edge_tuples() == [(0, 1)] and loops == 0 and multis == 0


def test_sample_configuration_forced_loop():
    cfg = sample_configuration([2], 11)
    assert cfg.pairs() == [(0, 1)]
    g, loops, multis = project_multigraph(cfg)
    assert g.m == 0 and loops == 1 and multis == 0


def test_sample_configuration_odd_sum_raises():
    with pytest.raises(ParityError):
        sample_configuration([3, 3, 1], 0)


def test_configuration_validate_rejects_broken_pairings():
    degrees = np.array([2, 2], dtype=np.int64)
    bad = Configuration(degrees=degrees, mate=np.array([0, 1, 3, 2]))
    with pytest.raises(DomainError):
        bad.validate()  # fixed point at copy 0
    bad = Configuration(degrees=degrees, mate=np.array([1, 2, 3, 0]))
    with pytest.raises(DomainError):
        bad.validate()  # 4-cycle, not an involution
    bad = Configuration(degrees=degrees, mate=np.array([1, 0]))
    with pytest.raises(DomainError):
        bad.validate()  # does not cover all copies


def test_configuration_json_round_trip():
    cfg = sample_configuration([3, 2, 4, 1], 77)
    text = cfg.to_json()
    back = Configuration.from_json(text)
    assert np.array_equal(back.degrees, cfg.degrees)
    assert np.array_equal(back.mate, cfg.mate)
    assert back.to_json() == text
    with pytest.raises(DomainError):
        Configuration.from_json(
            '{"degrees":[1,1,1,1],"pairing":[[0,1],[1,2]]}'
        )


def test_projection_degree_conservation():
    rng = np.random.default_rng(21)
    for trial in range(50):
        degrees = rng.integers(0, 6, size=rng.integers(1, 8))
        if degrees.sum() % 2:
            degrees[0] += 1
        cfg = sample_configuration(degrees, spawn_seed(52, "proj", trial))
        mg = to_multigraph(cfg)
        assert mg.degrees.tolist() == degrees.tolist()
        g, loops, multis = project_multigraph(cfg)
        assert all(
            g.degrees[v] <= degrees[v] for v in range(len(degrees))
        )
        assert g.m + loops + multis == int(degrees.sum()) // 2
        assert mg.is_simple() == (loops == 0 and multis == 0)


def test_simple_fraction_matches_enumeration():
    # all 11!! = 10395 pairings of 12 copies, exactly 1296 project simple
    degrees = [3, 3, 3, 3]
    total = simple = 0
    for pairs in all_pairings(list(range(12))):
        _, loops, multis = project_multigraph(config_from_pairs(degrees, pairs))
        total += 1
        simple += loops == 0 and multis == 0
    assert total == 10395 and simple == 1296
    exact = simple / total
    trials = 20000
    hits = 0
    for s in range(trials):
        _, loops, multis = project_multigraph(
            sample_configuration(degrees, spawn_seed(9009, "simple", s))
        )
        hits += loops == 0 and multis == 0
    assert abs(hits / trials - exact) < 0.02


def test_pairing_uniform_on_four_single_copies():
    # three possible pairings, each must appear with frequency 1/3 +- 0.01
    trials = 10**5
    counts = {1: 0, 2: 0, 3: 0}
    for s in range(trials):
        cfg = sample_configuration([1, 1, 1, 1], spawn_seed(31, "uni", s))
        counts[int(cfg.mate[0])] += 1
    for mate0, cnt in counts.items():
        assert abs(cnt / trials - 1 / 3) < 0.01, (mate0, cnt / trials)


def test_sample_simple_first_try_and_exhaustion():
    cfg = sample_simple_with_degrees([1, 1], 5)
    assert cfg.attempts == 1
    with pytest.raises(ExhaustionError):
        sample_simple_with_degrees([2], 5, max_attempts=50)


def test_sample_simple_three_regular_attempt_rate():
    # acceptance probability for 3-regular tends to e^{-mu(mu+1)} with mu = 1,
    # so the mean attempt count over many runs sits well inside [1, 10]
    degrees = [3] * 100
    runs = 1000
    attempts = [
        sample_simple_with_degrees(degrees, spawn_seed(606, "3reg", r)).attempts
        for r in range(runs)
    ]
    mean = sum(attempts) / runs
    assert 1.0 <= mean <= 10.0, mean


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_configuration_involution_property(data):
    n = data.draw(st.integers(1, 8))
    degrees = data.draw(
        st.lists(st.integers(0, 5), min_size=n, max_size=n)
    )
    if sum(degrees) % 2:
        degrees[0] += 1
    seed = data.draw(st.integers(0, 2**63 - 1))
    cfg = sample_configuration(degrees, seed)
    cfg.validate()
    ids = np.arange(cfg.copy_count)
    assert np.array_equal(cfg.mate[cfg.mate], ids)
    assert not np.any(cfg.mate == ids)
    assert np.array_equal(
        sample_configuration(degrees, seed).mate, cfg.mate
    )


# ------------------------------------------------------------------ RW machinery

def test_rw_extract_all_w0():
    cfg = sample_configuration([2, 3, 3], 9)
    info = rw_extract(cfg, [W0, W0, W0])
    assert info.w1_pairs == ()
    assert info.splits == ((2, 0), (3, 0), (3, 0))


def test_rw_extract_without_w1_has_no_pinned_pairs():
    cfg = sample_configuration([2, 2, 4], 14)
    info = rw_extract(cfg, [W0, R, R])
    assert info.w1_pairs == ()
    for v in (1, 2):
        assert info.splits[v][1] == 0  # deg_W1 = 0 when W1 is empty


def test_rw_extract_hand_built_six_vertices():
    # copies: v0 {0,1}, v1 {2,3}, v2 {4,5}, v3 {6,7}, v4 {8,9}, v5 {10,11}
    # pairing: (0,2) W0-W0, (1,4) W0-W1, (3,8) W0-R,
    #          (5,6) W1-W1, (7,10) W1-R, (9,11) R-R
    classes = [W0, W0, W1, W1, R, R]
    cfg = config_from_pairs(
        [2] * 6, [(0, 2), (1, 4), (3, 8), (5, 6), (7, 10), (9, 11)]
    )
    cfg.validate()
    info = rw_extract(cfg, classes)
    assert info.splits == (
        (1, 1),        # v0: one partner in W0, one outside
        (1, 1),        # v1
        (1, 1, 0),     # v2: W0, W1, R partner counts
        (0, 1, 1),     # v3
        (1, 0, 1),     # v4
        (0, 1, 1),     # v5
    )
    assert info.w1_pairs == ((5, 6), (7, 10))
    assert info.degree_of(0) == 2 and list(info.degrees) == [2] * 6


def test_rw_extract_rejects_bad_classes():
    cfg = sample_configuration([1, 1], 0)
    with pytest.raises(DomainError):
        rw_extract(cfg, [W0])
    with pytest.raises(DomainError):
        rw_extract(cfg, [W0, 5])


def test_sample_from_rw_round_trip_small_instances():
    rng = np.random.default_rng(17)
    for trial in range(1000):
        n = int(rng.integers(2, 7))
        degrees = rng.integers(0, 5, size=n)
        if degrees.sum() % 2:
            degrees[0] += 1
        cfg = sample_configuration(degrees, spawn_seed(73, "rt-base", trial))
        classes = rng.integers(0, 3, size=n)
        info = rw_extract(cfg, classes)
        out = sample_from_rw(info, spawn_seed(73, "rt-draw", trial))
        assert rw_extract(out, classes) == info


def test_sample_from_rw_without_w1_is_plain_matching():
    # W1 empty and no outward degrees: steps 1, 2 and 5 are vacuous and the
    # draw reduces to a uniform matching inside the W0 pool
    info = RWInfo(
        classes=(W0, W0), splits=((2, 0), (2, 0)), w1_pairs=()
    )
    cfg = sample_from_rw(info, 4)
    cfg.validate()
    assert rw_extract(cfg, [W0, W0]) == info


def test_sample_from_rw_pins_listed_pairs_verbatim():
    base = sample_configuration([4, 4, 2, 2], 5)
    classes = [W0, R, R, W1]
    info = rw_extract(base, classes)
    assert info.w1_pairs  # instance chosen to have at least one pinned pair
    for s in range(25):
        out = sample_from_rw(info, s)
        for a, b in info.w1_pairs:
            assert out.mate[a] == b and out.mate[b] == a


def test_sample_from_rw_infeasible_inputs():
    with pytest.raises(InfeasibleError):
        # odd number of copies inside the W0 pool
        sample_from_rw(
            RWInfo(classes=(W0, W0), splits=((1, 0), (2, 0)), w1_pairs=()), 0
        )
    with pytest.raises(InfeasibleError):
        # one outward W0 copy but nothing designated toward W0
        sample_from_rw(
            RWInfo(classes=(W0, R), splits=((0, 1), (0, 0, 1)), w1_pairs=()), 0
        )
    with pytest.raises(InfeasibleError):
        # listed pair must join W1 to W1 u R
        sample_from_rw(
            RWInfo(
                classes=(W0, W1),
                splits=((0, 1), (1, 0, 0)),
                w1_pairs=((0, 1),),
            ),
            0,
        )
    with pytest.raises(InfeasibleError):
        # split degrees disagree with the pinned pair list
        sample_from_rw(
            RWInfo(
                classes=(W1, W1),
                splits=((0, 1, 0), (0, 0, 1)),
                w1_pairs=((0, 1),),
            ),
            0,
        )


def enumerate_support(degrees, classes, info):
    """Brute-force the set of pairings sharing the given split information."""
    total = int(np.sum(degrees))
    support = []
    for pairs in all_pairings(list(range(total))):
        cfg = config_from_pairs(degrees, pairs)
        if rw_extract(cfg, classes) == info:
            support.append(tuple(sorted((min(a, b), max(a, b)) for a, b in pairs)))
    return support


def test_sample_from_rw_uniform_over_support_chi2():
    # 4-vertex instance whose support has 144 pairings and exercises every
    # step: pinned pair, W0-internal and R-internal matchings, bipartite part
    degrees = [4, 4, 2, 2]
    classes = [W0, R, R, W1]
    base = sample_configuration(degrees, 5)
    info = rw_extract(base, classes)
    support = enumerate_support(degrees, classes, info)
    assert len(support) == 144
    index = {key: i for i, key in enumerate(support)}
    trials = 20000
    counts = np.zeros(len(support), dtype=np.int64)
    for s in range(trials):
        out = sample_from_rw(info, spawn_seed(555, "chi2", s))
        key = tuple(out.pairs())
        counts[index[key]] += 1  # KeyError here would mean leaving the support
    expected = trials / len(support)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    p_value = stats.chi2.sf(chi2, df=len(support) - 1)
    assert p_value > 0.01, (chi2, p_value)
