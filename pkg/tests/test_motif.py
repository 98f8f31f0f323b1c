from fractions import Fraction as F
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palab.digraph import OrderedDigraph
from palab.errors import AssumptionError, ParameterError
from palab.motif import (
    Tau,
    analyze_union,
    beta,
    c7_overlaps,
    d_and_maximisers,
    dn_closed_form,
    nested_integral_closed_form,
    overcount_factor,
    overlap_term_ratio,
    paley_zygmund,
    predicted_scaling,
    union_catalog,
    variance_exponents,
)
from palab.witness import build_sn, cherry_id, h0

from conftest import random_ordered

T = F(5, 2)
EDGE = OrderedDigraph(2, [(1, 0)])
TRIANGLE = OrderedDigraph(3, [(1, 0), (2, 0), (2, 1)])


def oracle_D(g, tau):
    """Directly from the definition, vertex by vertex in rank order."""
    order = np.argsort(g.rank).tolist()
    dout, din = g.out_degree.tolist(), g.in_degree.tolist()
    gains = [1 - (tau - 2) / (tau - 1) * dout[v] - din[v] / (tau - 1) for v in order]
    sums = [sum(gains[s:], F(0)) for s in range(g.n + 1)]
    best = max(sums)
    return best, tuple(s for s, x in enumerate(sums) if x == best), sums


def test_tau():
    assert Tau.from_model(2, -1).value == T
    with pytest.raises(ParameterError):
        Tau(3)
    with pytest.raises(ParameterError):
        Tau(F(2))
    t = Tau(T)
    assert t.out_weight == F(1, 3) and t.cherry_gain == F(1, 3) and t.integral_base == 3


def test_beta_examples():
    assert beta(2, 0, T) == F(-2, 3) == -2 * (T - 2) / (T - 1)
    assert beta(0, 0, F(9, 4)) == 0
    assert beta(1, 1, T) == -1
    with pytest.raises(ParameterError):
        beta(1, 0, F(7, 2))
    with pytest.raises(ParameterError):
        beta(-1, 0, T)


def test_d_examples():
    a = d_and_maximisers(EDGE, T)
    assert (a.D, a.maximisers, a.r) == (1, (0,), 1)
    assert a.suffix_sums == [1, F(2, 3), 0]
    a = d_and_maximisers(TRIANGLE, T)
    assert a.D == F(1, 3) == (3 - T) / (T - 1)
    assert a.maximisers == (1, 2) and a.r == 2
    a = d_and_maximisers(build_sn(h0(), 5), T)
    assert a.D == 35 and a.maximisers == (7,)


def test_analysis_json():
    js = d_and_maximisers(TRIANGLE, T).to_json()
    assert js["D"] == "1/3" and js["maximisers"] == [1, 2] and js["r"] == 2
    assert js["beta"]["0"] == F(-4, 3).__str__()


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(1, 15),
    p=st.floats(0, 1),
    seed=st.integers(0, 2**32 - 1),
    tau=st.fractions(min_value=F(201, 100), max_value=F(299, 100), max_denominator=200),
)
def test_d_matches_definition(n, p, seed, tau):
    g = random_ordered(np.random.default_rng(seed), n, p)
    a = d_and_maximisers(g, tau)
    D, maxs, sums = oracle_D(g, tau)
    assert a.D == D and a.maximisers == maxs and a.suffix_sums == sums
    assert a.suffix_sums[-1] == 0 and a.r >= 1
    order = np.argsort(g.rank).tolist()
    b = a.beta
    for s in range(n):
        assert a.suffix_sums[s] - a.suffix_sums[s + 1] == 1 + b[order[s]]


def test_dn_examples():
    assert dn_closed_form(7, 5, T) == 35
    assert dn_closed_form(7, 0, F(9, 4)) == 0
    assert dn_closed_form(7, 6, T) == 42 == d_and_maximisers(build_sn(h0(), 6), T).D
    with pytest.raises(ParameterError):
        dn_closed_form(1, 3, T)


@pytest.mark.parametrize("tau", [F(9, 4), T, F(11, 4)])
@pytest.mark.parametrize("n", range(2, 9))
def test_unique_maximiser_of_cherried_c7(n, tau):
    a = d_and_maximisers(build_sn(h0(), n), tau)
    assert a.maximisers == (7,)
    assert a.D == dn_closed_form(7, n, tau)


def test_nested_integral_examples():
    assert nested_integral_closed_form(0, F(11, 4)) == 1
    assert nested_integral_closed_form(2, T) == F(9, 2)
    assert nested_integral_closed_form(3, T) == F(9, 2)
    with pytest.raises(ParameterError):
        nested_integral_closed_form(-1, T)


def test_predicted_scaling_examples():
    assert predicted_scaling(EDGE, T) == (1, 0)
    assert predicted_scaling(TRIANGLE, T) == (F(1, 3), 1)
    assert predicted_scaling(build_sn(h0(), 5), T, m=2) == (35, 0)
    with pytest.raises(ParameterError):
        predicted_scaling(OrderedDigraph(3, [(2, 0), (2, 1)]), T, m=1)


def test_paley_zygmund_examples():
    assert paley_zygmund(1, 1) == 1
    assert paley_zygmund(2, 8) == F(1, 2)
    assert paley_zygmund(3, 10) == F(9, 10)
    assert paley_zygmund(2.0, 8.0) == 0.5
    with pytest.raises(ParameterError):
        paley_zygmund(3, 8)
    with pytest.raises(ParameterError):
        paley_zygmund(0, 1)


def test_union_sharing_one_vertex():
    u = analyze_union(h0(), h0(), {3: 3}, 5, T)
    assert u.D_hat == 70 == 2 * u.D_n
    assert u.equality_with_2Dn and u.maximisers == (13,) and u.s_hat == 13
    assert u.type_counts == (210, 0, 0) and u.characterization_holds


def test_union_fully_coincident_with_all_cherries_shared():
    h = h0()
    shared = [(c, c) for c in range(7, 7 + 21 * 5)]
    u = analyze_union(h, h, {v: v for v in range(7)}, 5, T, shared_cherries=shared)
    # the union is S_5(H_0) itself
    assert u.union.n == 112
    assert u.D_hat == 35 < 2 * u.D_n
    assert not u.equality_with_2Dn and u.type_counts == (0, 105, 0)


def test_union_with_a_shared_cherry_loses_equality():
    h = h0()
    c = cherry_id(h, 5, 0, 0)  # first cherry on the pair (v1, v2)
    u = analyze_union(h, h, {0: 0, 1: 1}, 5, T, shared_cherries=[(c, c)])
    assert u.bound_holds and not u.equality_with_2Dn
    assert u.type_counts[1] == 1 and u.characterization_holds


def test_union_with_a_type_three_vertex():
    h = h0()
    c = cherry_id(h, 5, 0, 0)
    u = analyze_union(h, h, {0: 0}, 5, T, cherry_vertices=[(6, c)])
    assert u.type_counts[2] == 1 and u.D_hat < 2 * u.D_n


def test_union_preconditions():
    h = h0()
    with pytest.raises(ParameterError):
        analyze_union(h, h, {3: 3}, 4, T)
    with pytest.raises(AssumptionError):
        analyze_union(h, h, {0: 1, 1: 0}, 5, T)
    with pytest.raises(ParameterError):
        analyze_union(h, h, {0: 0, 1: 0}, 5, T)


def test_overcount_factor():
    assert overcount_factor(7, 12, 5) == comb(10, 5) == 252
    u = analyze_union(h0(), h0(), {0: 0, 6: 6}, 5, T)
    assert u.s_hat == 12 and u.overcount_factor == 252


def test_overlap_configurations():
    ov = list(c7_overlaps())
    assert len(ov) == sum(comb(7, k) ** 2 for k in range(1, 8)) == 3431


def test_catalog_bound_and_equality_set():
    cat = union_catalog(5, T)
    assert all(c.analysis.bound_holds for c in cat)
    eq = {c.overlap for c in cat if c.analysis.equality_with_2Dn}
    construction = {c.overlap for c in cat if c.extremal_construction}
    assert eq == construction and len(eq) == 3431
    assert all(c.analysis.characterization_holds for c in cat)
    assert all(c.analysis.maximisers == (c.analysis.s_hat,) for c in cat if c.extremal_construction)


def test_variance_exponent_signs():
    s = 7
    for s_hat in range(s + 1, 2 * s):
        assert variance_exponents(s, s_hat)[0] < 0
    rate, root_power = variance_exponents(s, s)
    assert rate == 0 and root_power == 1 + s * (5 - s) // 2 == -6


@pytest.mark.parametrize("s_hat", [7, 9, 13])
def test_overlap_ratio_follows_its_exponents(s_hat):
    # ratio / (2**(a n) sqrt(n)**b) should settle to a constant
    a, b = variance_exponents(7, s_hat)
    norm = [float(overlap_term_ratio(7, s_hat, n) / F(2) ** (a * n)) / n ** (b / 2) for n in (200, 400, 800)]
    assert abs(norm[2] / norm[1] - 1) < abs(norm[1] / norm[0] - 1) + 1e-12
    assert abs(norm[2] / norm[1] - 1) < 0.05


def test_overlap_ratio_decreases():
    for s_hat in (7, 8, 13):
        r = [overlap_term_ratio(7, s_hat, n) for n in range(1, 7)]
        assert all(b < a for a, b in zip(r[2:], r[3:]))
