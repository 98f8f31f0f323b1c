import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palab import kernels
from palab.coloring import (
    chromatic_number,
    extend_coloring,
    greedy_by_ordering,
    is_bipartite,
    is_k_colorable,
    is_proper,
    recursive_coloring,
    verify_h_lower_bound,
)
from palab.digraph import OrderedDigraph, max_out_degree
from palab.errors import ParameterError
from palab.model import PAParams, as_ordered_digraph, generate
from palab.witness import build_h, build_sn, h0

from conftest import brute_chromatic, random_ordered


def _cycle(n):
    return OrderedDigraph(n, [(j + 1, j) for j in range(n - 1)] + [(n - 1, 0)])


def _complete(n):
    return OrderedDigraph(n, [(a, b) for a in range(n) for b in range(a)])


def test_greedy_examples():
    c = greedy_by_ordering(h0())
    assert c.proper and c.num_colors <= 3
    assert greedy_by_ordering(OrderedDigraph(5)).num_colors == 1
    g = as_ordered_digraph(generate(PAParams(3, -1, 2000, 0)))
    c = greedy_by_ordering(g)
    assert c.proper and c.num_colors <= 4


@pytest.mark.skipif("cython" not in kernels.available(), reason="compiled kernels not built")
def test_greedy_backends_agree():
    g = as_ordered_digraph(generate(PAParams(4, -2, 3000, 1)))
    a = greedy_by_ordering(g, backend="cython").colors
    b = greedy_by_ordering(g, backend="python").colors
    assert np.array_equal(a, b)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 25), p=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_greedy_bound_property(n, p, seed):
    g = random_ordered(np.random.default_rng(seed), n, p)
    c = greedy_by_ordering(g)
    assert c.proper
    assert c.num_colors <= max_out_degree(g) + 1
    assert c.num_colors == len(set(c.colors.tolist()))


def test_bipartite_examples():
    r = is_bipartite(_cycle(7))
    assert not r.bipartite and len(r.odd_cycle) == 7
    assert is_bipartite(OrderedDigraph(1)).bipartite
    tree = as_ordered_digraph(generate(PAParams(1, -0.5, 300, 2)))
    assert is_bipartite(tree).bipartite


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 20), p=st.floats(0, 0.6), seed=st.integers(0, 2**32 - 1))
def test_bipartite_certificates(n, p, seed):
    g = random_ordered(np.random.default_rng(seed), n, p)
    r = is_bipartite(g)
    adj = [set(a) for a in g.undirected_adjacency()]
    if r.bipartite:
        assert is_proper(g, r.sides)
    else:
        cyc = r.odd_cycle
        assert len(cyc) % 2 == 1 and len(set(cyc)) == len(cyc)
        assert all(cyc[(i + 1) % len(cyc)] in adj[cyc[i]] for i in range(len(cyc)))


def test_k_colorable_examples():
    c7 = _cycle(7)
    assert is_k_colorable(c7, 2).status == "no"
    r = is_k_colorable(c7, 3)
    assert r.status == "yes" and r.coloring.proper and r.coloring.num_colors <= 3
    with pytest.raises(ParameterError):
        is_k_colorable(c7, 0)


def test_h1_is_4_not_3_colourable():
    h1 = build_h(1)
    r4 = is_k_colorable(h1, 4)
    assert r4.status == "yes" and r4.coloring.proper
    r3 = is_k_colorable(h1, 3)
    assert r3.status == "no"


def test_budget_gives_inconclusive():
    h1 = build_h(1)
    r = is_k_colorable(h1, 3, budget=10)
    assert r.status == "inconclusive" and r.coloring is None
    c = chromatic_number(h1, budget=10)
    assert not c.exact and c.lower <= 4 <= c.upper


def test_budget_is_deterministic():
    h1 = build_h(1)
    assert is_k_colorable(h1, 3).nodes == is_k_colorable(h1, 3).nodes


def test_chromatic_examples():
    assert chromatic_number(build_sn(h0(), 5)).chi == 3
    assert chromatic_number(OrderedDigraph(1)).chi == 1
    assert chromatic_number(build_h(1)).chi == 4
    assert chromatic_number(_complete(6)).chi == 6
    assert chromatic_number(OrderedDigraph(0)).chi == 0


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 8), p=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_chromatic_matches_brute_force(n, p, seed):
    g = random_ordered(np.random.default_rng(seed), n, p)
    r = chromatic_number(g)
    assert r.chi == brute_chromatic(n, g.edges())
    assert r.coloring.proper and r.coloring.num_colors == r.chi


def test_recursive_colouring():
    c = recursive_coloring(1)
    assert c.proper and c.num_colors == 4
    assert recursive_coloring(0).num_colors == 3


def test_lower_bound_verifier():
    assert verify_h_lower_bound(0).verified
    rep = verify_h_lower_bound(1)
    assert rep.verified and len(rep.steps) == 2
    assert "2187" in rep.steps[0][2]
    assert not verify_h_lower_bound(0, base_cycle=6).verified
    assert not verify_h_lower_bound(1, base_cycle=6, mode="direct").verified
    assert verify_h_lower_bound(5, mode="inductive").verified
    with pytest.raises(ParameterError):
        verify_h_lower_bound(2, mode="direct")


def test_colourings_extend_over_cherries():
    h = h0()
    col = is_k_colorable(h, 3).coloring.colors
    s = build_sn(h, 4)
    partial = np.zeros(s.n, dtype=np.int64)
    partial[:7] = col
    ext = extend_coloring(s, partial, 3)
    assert ext is not None and ext.proper and ext.num_colors <= 3
    assert np.array_equal(ext.colors[:7], col)
