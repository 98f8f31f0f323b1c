import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palab.digraph import (
    OrderedDigraph,
    disjoint_union,
    max_out_degree,
    orderings_agree,
    parse_digraph,
    validate,
    write_digraph,
)
from palab.errors import OrderingError, ParameterError
from palab.witness import build_sn, h0

from conftest import random_ordered


def test_validate_examples():
    assert validate(h0()).ok
    bad = OrderedDigraph(2, [(0, 1)], check=False)  # source ranked before target
    rep = validate(bad)
    assert not rep.ok and rep.edge == (0, 1)
    assert validate(OrderedDigraph(3, [], rank=[2, 0, 1])).ok


def test_construction_rejects_bad_orderings():
    with pytest.raises(OrderingError):
        OrderedDigraph(2, [(0, 1)])
    with pytest.raises(OrderingError):
        OrderedDigraph(3, [], rank=[0, 0, 1])
    with pytest.raises(OrderingError):
        OrderedDigraph(2, [(1, 1)])
    with pytest.raises(ParameterError):
        OrderedDigraph(2, [(2, 0)])


def test_parallel_edges_become_weights():
    g = OrderedDigraph(3, [(1, 0), (1, 0), (2, 0), (2, 1)])
    assert g.num_edges == 3
    assert dict(zip(g.edges(), g.weights.tolist())) == {(1, 0): 2, (2, 0): 1, (2, 1): 1}


def test_degrees_and_csr():
    g = OrderedDigraph(4, [(3, 0), (3, 1), (2, 1), (1, 0)])
    assert g.out_degree.tolist() == [0, 1, 1, 2]
    assert g.in_degree.tolist() == [2, 2, 0, 0]
    ptr, idx, _ = g.out_csr
    assert idx[ptr[3]:ptr[4]].tolist() == [0, 1]
    assert g.has_edge(3, 1) and not g.has_edge(1, 3)
    assert g.undirected_adjacency()[1] == [0, 2, 3]


def test_orderings_agree_examples():
    g = h0()
    assert orderings_agree(g, g, {v: v for v in range(7)})
    a = OrderedDigraph(2, [(1, 0)])
    b = OrderedDigraph(2, [], rank=[1, 0])
    assert not orderings_agree(a, b, {0: 0, 1: 1})
    with pytest.raises(ParameterError):
        orderings_agree(a, a, {0: 0, 1: 0})


def test_orderings_agree_on_two_copies_of_a_cherried_triangle():
    # S_1(triangle) twice, glued along u1, u4, w; ranks as a 1..6 list per copy
    # copy 1: (u4, u2, u1, w, v1, v3); copy 2: (u4, u3, u1, w, v2, v4)
    names1 = ["u4", "u2", "u1", "w", "v1", "v3"]
    names2 = ["u4", "u3", "u1", "w", "v2", "v4"]
    g1 = OrderedDigraph(6, [], rank=list(range(6)))
    g2 = OrderedDigraph(6, [], rank=list(range(6)))
    shared = {names1.index(x): names2.index(x) for x in ("u1", "u4", "w")}
    assert orderings_agree(g1, g2, shared)
    # the union ordering u_i -> 5 - i, w -> 5, v_i -> i + 5 restricts to both
    union = {"u1": 4, "u2": 3, "u3": 2, "u4": 1, "w": 5, "v1": 6, "v2": 7, "v3": 8, "v4": 9}
    hat = OrderedDigraph(9, [], rank=[union[x] - 1 for x in sorted(union)])
    order = sorted(union)
    assert orderings_agree(g1, hat, {i: order.index(x) for i, x in enumerate(names1)})
    assert orderings_agree(g2, hat, {i: order.index(x) for i, x in enumerate(names2)})


def test_agreement_does_not_imply_equal_ranks():
    # same relative order, different absolute ranks: agreement holds, equality does not
    a = OrderedDigraph(3, [], rank=[0, 1, 2])
    b = OrderedDigraph(3, [], rank=[0, 1, 2])
    shared = {0: 1, 2: 2}
    assert orderings_agree(a, b, shared)
    assert a.rank[0] != b.rank[1]
    # and the reverse correspondence breaks agreement
    assert not orderings_agree(a, b, {0: 2, 2: 1})


def test_max_out_degree_examples():
    assert max_out_degree(h0()) == 2
    s = build_sn(h0(), 2)
    assert set(s.out_degree[7:].tolist()) == {2}
    assert max_out_degree(OrderedDigraph(0)) == 0


def test_text_round_trip_with_sigma():
    g = OrderedDigraph(4, [(0, 2), (0, 2), (3, 2), (1, 0)], rank=[2, 3, 0, 1])
    buf = io.StringIO()
    write_digraph(g, buf)
    assert "sigma" in buf.getvalue()
    assert parse_digraph(buf.getvalue().splitlines()) == g


def test_parse_errors():
    with pytest.raises(ParameterError):
        parse_digraph(["pa m=1"])
    with pytest.raises(ParameterError):
        parse_digraph(["digraph n=2", "sigma 1"])
    with pytest.raises(OrderingError):
        parse_digraph(["digraph n=2", "1 2"])


def test_disjoint_union_stacks_ranks():
    u = disjoint_union([h0(), h0()])
    assert u.n == 14 and u.num_edges == 14
    assert validate(u).ok
    assert u.rank[7] == 7


def test_relabel_by_rank_is_isomorphic():
    g = OrderedDigraph(3, [(0, 2), (1, 0), (1, 2)], rank=[1, 2, 0])
    r = g.relabel_by_rank()
    assert r.is_identity_ordered()
    assert r.edge_set() == {(1, 0), (2, 1), (2, 0)}


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 12), p=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_random_ordered_properties(n, p, seed):
    g = random_ordered(np.random.default_rng(seed), n, p, weights=True)
    assert validate(g).ok
    assert g.out_degree.sum() == g.in_degree.sum() == g.num_edges
    buf = io.StringIO()
    write_digraph(g, buf)
    assert parse_digraph(buf.getvalue().splitlines()) == g
    ident = {v: v for v in range(n)}
    assert orderings_agree(g, g, ident)
    r = g.relabel_by_rank()
    assert validate(r).ok and r.num_edges == g.num_edges
