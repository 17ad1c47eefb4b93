from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasedsssp.graph import (
    GRAPH500_INITIATOR,
    EdgeListParseError,
    GenSpec,
    GraphSizeError,
    build_reverse,
    compute_minima,
    export_edge_list,
    from_edges,
    gen_kronecker,
    gen_uniform,
    kronecker_draw_count,
    kronecker_quadrants,
    load_edge_list,
)

from conftest import random_graph

SCALED = tuple(2.5 * x for x in GRAPH500_INITIATOR)


def edge_set(g):
    src, dst, cost = g.edges()
    return sorted(zip(src.tolist(), dst.tolist(), cost.tolist()))


# ---------------------------------------------------------------- structure


def test_from_edges_builds_valid_csr():
    g = from_edges(4, [2, 0, 2, 1], [3, 1, 0, 2], [0.5, 0.1, 0.2, 0.3])
    g.check()
    assert g.m == 4
    assert g.fwd_offsets.tolist() == [0, 1, 2, 4, 4]
    # edges of one source keep their input order
    assert g.out_edges(2)[0].tolist() == [3, 0]


@pytest.mark.parametrize(
    "src,dst,cost",
    [([0], [5], [1.0]), ([-1], [0], [1.0]), ([0], [1], [-0.5]), ([0], [1], [math.inf]), ([0, 1], [1], [1.0])],
)
def test_from_edges_rejects_bad_input(src, dst, cost):
    with pytest.raises(ValueError):
        from_edges(2, src, dst, cost)


def test_graph_arrays_are_read_only():
    g = from_edges(2, [0], [1], [1.0])
    with pytest.raises(ValueError):
        g.fwd_costs[0] = 2.0


# ---------------------------------------------------------------- uniform


def test_uniform_single_vertex_has_no_edges():
    assert gen_uniform(1, 0.5, seed=3).m == 0


def test_uniform_complete_digraph():
    g = gen_uniform(50, 1.0, seed=0)
    assert g.m == 2450
    src, dst, _ = g.edges()
    assert not np.any(src == dst)
    assert len(set(zip(src.tolist(), dst.tolist()))) == 2450


def test_uniform_mean_edge_count_within_five_sigma():
    n, p, seeds = 100, 0.1010, 200
    counts = np.array([gen_uniform(n, p, seed=s).m for s in range(seeds)])
    mean = n * (n - 1) * p
    sigma = math.sqrt(n * (n - 1) * p * (1 - p) / seeds)
    assert abs(counts.mean() - mean) < 5 * sigma


def test_uniform_has_no_self_loops_or_duplicates():
    g = gen_uniform(300, 0.05, seed=9)
    src, dst, cost = g.edges()
    assert not np.any(src == dst)
    assert len(set(zip(src.tolist(), dst.tolist()))) == g.m
    assert cost.min() >= 0.0 and cost.max() < 1.0


def test_uniform_pairs_are_uniform_over_targets():
    # every target should be hit about equally often across many seeds
    hits = np.zeros(20)
    for s in range(300):
        g = gen_uniform(20, 0.2, seed=s)
        hits += np.bincount(g.fwd_targets, minlength=20)
    expected = 300 * 19 * 0.2
    chi2 = float(np.sum((hits - expected) ** 2 / expected))
    assert chi2 < 50  # 19 dof, far beyond the 0.999 quantile (~43.8)


def test_uniform_is_deterministic():
    a, b = gen_uniform(200, 0.05, seed=77), gen_uniform(200, 0.05, seed=77)
    assert edge_set(a) == edge_set(b)
    assert edge_set(a) != edge_set(gen_uniform(200, 0.05, seed=78))


def test_uniform_rejects_bad_probability():
    with pytest.raises(ValueError):
        gen_uniform(10, 1.5, seed=0)


# ---------------------------------------------------------------- kronecker


def test_kronecker_draw_counts():
    assert kronecker_draw_count(SCALED, 2) == 6
    assert kronecker_draw_count((0.25, 0.25, 0.25, 0.25), 10) == 1


def test_kronecker_k2_has_at_most_six_edges():
    for seed in range(20):
        g = gen_kronecker(SCALED, 2, seed)
        assert g.n == 4
        assert g.m <= 6


def test_kronecker_quadrant_frequencies_match_initiator():
    rng = np.random.default_rng(2024)
    draws = kronecker_draw_count(SCALED, 1)
    quads = np.concatenate([kronecker_quadrants(SCALED, 1, draws, rng).ravel() for _ in range(1000)])
    freq = np.bincount(quads, minlength=4) / quads.size
    assert np.allclose(freq, GRAPH500_INITIATOR, atol=0.02)
    expected = quads.size * np.array(GRAPH500_INITIATOR)
    chi2 = float(np.sum((np.bincount(quads, minlength=4) - expected) ** 2 / expected))
    assert chi2 < 16.27  # 3 dof, 0.999 quantile


def test_kronecker_edges_have_no_loops_or_duplicates():
    g = gen_kronecker(SCALED, 10, seed=5)
    assert g.n == 1024
    src, dst, _ = g.edges()
    assert not np.any(src == dst)
    assert len(set(zip(src.tolist(), dst.tolist()))) == g.m
    assert g.m <= kronecker_draw_count(SCALED, 10)


def test_kronecker_skews_towards_low_ids():
    g = gen_kronecker(SCALED, 10, seed=1)
    deg = g.out_degree()
    assert deg[:512].sum() > 2 * deg[512:].sum()


def test_kronecker_size_guard():
    with pytest.raises(GraphSizeError):
        gen_kronecker(SCALED, 32, seed=0)
    with pytest.raises(ValueError):
        gen_kronecker((0.5, 0.5, 0.0, 0.5), 3, seed=0)


# ---------------------------------------------------------------- file I/O


def test_load_symmetrize_doubles(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n1 2\n")
    g = load_edge_list(f, symmetrize=True)
    assert g.m == 4
    pairs = set(zip(*[a.tolist() for a in g.edges()[:2]]))
    assert pairs == {(0, 1), (1, 0), (1, 2), (2, 1)}


def test_load_compacts_ids(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# comment\n5 9\n")
    g = load_edge_list(f, symmetrize=False)
    assert (g.n, g.m) == (2, 1)
    assert g.fwd_targets.tolist() == [1]


def test_load_empty_file(tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("# nothing here\n")
    g = load_edge_list(f)
    assert (g.n, g.m) == (0, 0)


def test_load_reports_line_number(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("0 1\n# ok\n1 x\n")
    with pytest.raises(EdgeListParseError) as err:
        load_edge_list(f)
    assert err.value.lineno == 3


def test_keep_weights_requires_cost_column(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1 0.5\n1 2\n")
    with pytest.raises(EdgeListParseError):
        load_edge_list(f, weight_mode="keep")


def test_road_network_style_file_doubles_edges(tmp_path):
    rng = np.random.default_rng(0)
    lines = [f"{a}\t{b}" for a, b in rng.integers(0, 10_000, size=(500, 2)) if a != b]
    f = tmp_path / "road.txt"
    f.write_text("# Directed graph\n# FromNodeId\tToNodeId\n" + "\n".join(lines) + "\n")
    g = load_edge_list(f, symmetrize=True)
    assert g.m == 2 * len(lines)


def test_export_reload_round_trip(tmp_path):
    g = gen_uniform(100, 0.1, seed=1)
    f = tmp_path / "g.txt"
    export_edge_list(g, f)
    h = load_edge_list(f, weight_mode="keep", relabel=False)
    assert h.n == g.n
    assert np.array_equal(h.fwd_offsets, g.fwd_offsets)
    assert np.array_equal(h.fwd_targets, g.fwd_targets)
    assert np.array_equal(h.fwd_costs, g.fwd_costs)


def test_random_weights_are_seeded(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n1 2\n2 0\n")
    a, b = load_edge_list(f, seed=4), load_edge_list(f, seed=4)
    assert np.array_equal(a.fwd_costs, b.fwd_costs)
    assert not np.array_equal(a.fwd_costs, load_edge_list(f, seed=5).fwd_costs)


# ---------------------------------------------------------------- reverse and minima


def test_reverse_of_single_edge():
    g = build_reverse(from_edges(2, [0], [1], [0.25]))
    src, cost = g.in_edges(1)
    assert src.tolist() == [0] and cost.tolist() == [0.25]
    assert g.in_edges(0)[0].size == 0


def test_reverse_of_empty_graph():
    g = build_reverse(from_edges(3, [], [], []))
    assert g.rev_offsets.tolist() == [0, 0, 0, 0]
    assert g.rev_sources.size == 0


def test_reverse_is_idempotent():
    g = build_reverse(gen_uniform(50, 0.1, seed=2))
    assert build_reverse(g) is g


def test_reverse_equals_brute_force_transpose():
    g = build_reverse(gen_uniform(200, 0.05, seed=11))
    brute = sorted((v, u, c) for u, v, c in edge_set(g))
    rev = []
    for v in range(g.n):
        src, cost = g.in_edges(v)
        rev.extend((v, int(u), float(c)) for u, c in zip(src, cost))
    assert sorted(rev) == brute
    # rev_edge points back at the matching forward edge
    fsrc = g.sources()
    assert np.array_equal(fsrc[g.rev_edge], g.rev_sources)
    assert np.array_equal(g.fwd_costs[g.rev_edge], g.rev_costs)


def test_minima_small_cases():
    g = from_edges(3, [0, 0], [1, 2], [0.7, 0.3])
    mins = compute_minima(g)
    assert mins.min_out[0] == 0.3
    assert mins.min_in.tolist() == [math.inf, 0.7, 0.3]
    iso = compute_minima(from_edges(2, [], [], []))
    assert np.all(np.isinf(iso.min_out)) and np.all(np.isinf(iso.min_in))


def brute_minima(g):
    mo = np.full(g.n, np.inf)
    mi = np.full(g.n, np.inf)
    for u, v, c in edge_set(g):
        mo[u] = min(mo[u], c)
        mi[v] = min(mi[v], c)
    return mo, mi


def test_minima_equal_brute_force_on_uniform_graph():
    g = gen_uniform(500, 0.02, seed=8)
    mo, mi = brute_minima(g)
    mins = compute_minima(g)
    assert np.array_equal(mins.min_out, mo)
    assert np.array_equal(mins.min_in, mi)


@given(n=st.integers(1, 60), m=st.integers(0, 300), seed=st.integers(0, 2**32 - 1))
def test_minima_property(n, m, seed):
    g = random_graph(n, m, seed)
    g.check()
    mo, mi = brute_minima(g)
    mins = compute_minima(g)
    assert np.array_equal(mins.min_out, mo)
    assert np.array_equal(mins.min_in, mi)
    assert np.array_equal(np.isinf(mins.min_out), g.out_degree() == 0)


@given(n=st.integers(1, 40), m=st.integers(0, 200), seed=st.integers(0, 2**32 - 1))
def test_export_round_trip_property(tmp_path_factory, n, m, seed):
    g = random_graph(n, m, seed)
    f = tmp_path_factory.mktemp("rt") / "g.txt"
    export_edge_list(g, f)
    h = load_edge_list(f, weight_mode="keep", relabel=False)
    assert edge_set(h) == edge_set(g)


# ---------------------------------------------------------------- GenSpec


def test_genspec_validation():
    with pytest.raises(ValueError):
        GenSpec("uniform", n=100, p=1.5).validate()
    with pytest.raises(ValueError):
        GenSpec("kronecker", k=0).validate()
    with pytest.raises(GraphSizeError):
        GenSpec("kronecker", k=40).validate()
    with pytest.raises(ValueError):
        GenSpec("file").validate()
    with pytest.raises(ValueError):
        GenSpec("torus", n=3).validate()


def test_genspec_builds_deterministically():
    spec = GenSpec("kronecker", k=7, seed=3)
    a, b = spec.build(), spec.build()
    assert a.n == 128
    assert edge_set(a) == edge_set(b)
    assert spec.with_seed(4).seed == 4
