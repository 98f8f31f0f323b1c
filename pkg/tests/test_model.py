import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palab import kernels
from palab.errors import ParameterError
from palab.model import (
    PAGraph,
    PAParams,
    as_ordered_digraph,
    attachment_distribution,
    generate,
    parse_pa,
    read_graph,
    to_fraction,
    write_pa,
)


def test_params_validation():
    with pytest.raises(ParameterError):
        PAParams(0, 0, 5)
    with pytest.raises(ParameterError):
        PAParams(2, -2, 5)
    with pytest.raises(ParameterError):
        PAParams(2, 0, 0)
    with pytest.raises(ParameterError):
        PAParams(2, 0, 5, seed=-1)
    with pytest.raises(ParameterError):
        PAParams(2, 0, 5, seed=2**64)
    p = PAParams(2, "-1/2", 10, 3)
    assert p.delta == Fraction(-1, 2)
    assert p.tau == Fraction(11, 4)


def test_tau_range_matches_delta_sign():
    assert 2 < PAParams(3, Fraction(-3, 2), 5).tau < 3
    assert PAParams(3, 0, 5).tau == 3
    assert PAParams(3, 1, 5).tau > 3


def test_to_fraction():
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction(-1) == -1
    assert to_fraction(0.5) == Fraction(1, 2)
    with pytest.raises(ParameterError):
        to_fraction("abc")


def test_small_cases():
    g1 = generate(PAParams(3, -1, 1, 0))
    assert g1.num_edges == 0 and g1.degrees.tolist() == [0]
    g2 = generate(PAParams(3, -1, 2, 0))
    assert g2.edges() == [(1, 0)] * 3
    assert g2.degrees.tolist() == [3, 3]


def test_pa2_is_deterministic():
    a = generate(PAParams(2, -1, 2, 1))
    b = generate(PAParams(2, -1, 2, 99))
    assert a.edges() == b.edges()


def test_same_seed_same_graph():
    p = PAParams(2, -1, 500, 42)
    assert generate(p) == generate(p)
    assert generate(p) != generate(p.with_seed(43))


@settings(max_examples=40, deadline=None)
@given(
    m=st.integers(1, 4),
    delta=st.fractions(min_value=Fraction(-39, 10), max_value=3, max_denominator=50).filter(lambda d: d != 0),
    t=st.integers(1, 200),
    seed=st.integers(0, 2**64 - 1),
)
def test_structure_invariants(m, delta, t, seed):
    if delta <= -m:
        delta = Fraction(-m + 1, 2) if m > 1 else Fraction(-1, 2)
    g = generate(PAParams(m, delta, t, seed))
    assert g.num_edges == (m * (t - 1) if t >= 2 else 0)
    assert np.all(g.sources > g.targets)
    out = g.out_degrees
    assert out[0] == 0 and np.all(out[1:] == m)
    assert g.degrees.sum() == 2 * g.num_edges
    assert np.array_equal(g.degrees, np.bincount(g.sources, minlength=t) + np.bincount(g.targets, minlength=t))


@pytest.mark.skipif("cython" not in kernels.available(), reason="compiled kernels not built")
@pytest.mark.parametrize("delta", [-1, 0, 2, Fraction(1, 3), Fraction(-3, 2), Fraction(-19, 10)])
def test_backends_identical(delta):
    p = PAParams(2, delta, 3000, 11)
    assert generate(p, backend="cython") == generate(p, backend="python")


def test_block_size_does_not_change_stream():
    k = kernels.get_backend("python")
    from palab.seeding import make_rng

    a = k.pa_edges(2, -1.0, 300, make_rng(5), 7)
    b = k.pa_edges(2, -1.0, 300, make_rng(5), 4096)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_attachment_distribution_exact():
    # PA_2: two vertices with degree m each
    pa2 = generate(PAParams(2, -1, 2, 0))
    p = attachment_distribution(pa2, 1, exact=True)
    # denominator 2m(t-2) + (t-1)delta + j - 1 at t=3, j=1: 4 - 2 = 2
    assert p == [Fraction(1, 2), Fraction(1, 2)]
    p2 = attachment_distribution(pa2, 2, placed=[0], exact=True)
    assert p2 == [Fraction(2, 3), Fraction(1, 3)]
    assert sum(p2) == 1


@pytest.mark.parametrize("m,delta", [(1, Fraction(-1, 2)), (2, -1), (3, 2), (2, Fraction(5, 3))])
def test_attachment_distribution_sums_to_one(m, delta):
    g = generate(PAParams(m, delta, 30, 4))
    for j in range(1, m + 1):
        placed = list(range(j - 1))
        assert sum(attachment_distribution(g, j, placed, exact=True)) == 1


def test_attachment_distribution_errors():
    g = generate(PAParams(2, -1, 5, 0))
    with pytest.raises(ParameterError):
        attachment_distribution(g, 3)
    with pytest.raises(ParameterError):
        attachment_distribution(g, 2, placed=[])
    with pytest.raises(ParameterError):
        attachment_distribution(generate(PAParams(2, -1, 1, 0)), 1)


def test_text_round_trip(tmp_path):
    g = generate(PAParams(3, Fraction(-4, 3), 40, 8))
    buf = io.StringIO()
    write_pa(g, buf)
    back = parse_pa(buf.getvalue().splitlines())
    assert back == g
    assert np.array_equal(back.degrees, g.degrees)
    path = tmp_path / "g.txt"
    path.write_text(buf.getvalue())
    d = read_graph(path)
    assert d == as_ordered_digraph(g)


def test_parse_rejects_bad_files():
    with pytest.raises(ParameterError):
        parse_pa(["digraph n=3"])
    with pytest.raises(ParameterError):
        parse_pa(["pa m=1 delta=0/1 t=3 seed=0", "2 1"])
    with pytest.raises(ParameterError):
        parse_pa(["pa m=1 delta=0/1 t=3 seed=0", "1 2", "3 1"])


def test_projection_collapses_parallel_edges():
    g = generate(PAParams(2, -1, 2, 0))
    d = as_ordered_digraph(g)
    assert d.num_edges == 1 and d.weights.tolist() == [2]


def test_degrees_are_readonly():
    g = generate(PAParams(2, -1, 10, 0))
    assert isinstance(g, PAGraph)
    with pytest.raises(ValueError):
        g.degrees[0] = 5
