"""Witness digraphs: H_0 (an oriented 7-cycle), the recursive family H_i, and cherry augmentation S_n.

H_i glues ``i+2`` rank-stacked copies of H_{i-1} and adds one apex per
cross-copy ``(i+2)``-tuple, joined to every vertex of its tuple. Apexes are
ranked after all copies, in lexicographic order of their tuples' ranks.

S_n(H) adds, for each unordered pair of H-vertices, ``n`` new vertices with
out-edges to both. They are ranked after H, pairs in lexicographic rank order
then copy index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .digraph import OrderedDigraph, disjoint_union
from .errors import FeasibilityError, ParameterError

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class WitnessStats:
    i: int
    n: int
    h_vertices: int
    h_edges: int
    vertex_count: int
    edge_count: int
    chromatic_number_claimed: int


def h_size(i: int) -> tuple[int, int]:
    """Exact ``(|V(H_i)|, |E(H_i)|)``."""
    if i < 0:
        raise ParameterError("level must be >= 0")
    v, e = 7, 7
    for level in range(1, i + 1):
        k = level + 2
        apex = v**k
        v, e = k * v + apex, k * e + k * apex
    return v, e


def witness_stats(i: int, n: int = 0) -> WitnessStats:
    """Sizes of H_i and S_n(H_i) without building them; works for any level."""
    if n < 0:
        raise ParameterError("cherry count must be >= 0")
    v, e = h_size(i)
    pairs = comb(v, 2)
    return WitnessStats(i, n, v, e, v + pairs * n, e + 2 * pairs * n, i + 3)


def h0() -> OrderedDigraph:
    """The oriented 7-cycle v_{j+1} -> v_j (j = 1..6) plus v_7 -> v_1, ranked by index."""
    edges = [(j + 1, j) for j in range(6)] + [(6, 0)]
    return OrderedDigraph(7, edges)


def build_h(i: int, cap: int = DEFAULT_CAP) -> OrderedDigraph:
    if i < 0:
        raise ParameterError("level must be >= 0")
    v, _ = h_size(i)
    if v > cap:
        raise FeasibilityError(f"H_{i} would have {v} vertices, above the cap of {cap}", v)
    g = h0()
    for level in range(1, i + 1):
        g = _next_level(g, level)
    return g


def _next_level(prev: OrderedDigraph, level: int) -> OrderedDigraph:
    k = level + 2
    s = prev.n
    base = disjoint_union([prev] * k)
    # copy j's vertices in rank order; tuples are produced in lexicographic rank order
    per_copy = [prev.by_rank + j * s for j in range(k)]
    tuples = np.array(list(itertools.product(*[c.tolist() for c in per_copy])), dtype=np.int64)
    n_apex = len(tuples)
    apex_ids = np.arange(k * s, k * s + n_apex, dtype=np.int64)
    apex_edges = np.column_stack([np.repeat(apex_ids, k), tuples.reshape(-1)])
    edges = np.concatenate([np.column_stack([base.src, base.dst]), apex_edges])
    rank = np.concatenate([base.rank, apex_ids])
    return OrderedDigraph(k * s + n_apex, edges, rank)


def cherry_pairs(h: OrderedDigraph) -> list[tuple[int, int]]:
    """Unordered vertex pairs of ``h`` as (older, younger), in lexicographic rank order."""
    order = h.by_rank.tolist()
    return [(order[a], order[b]) for a, b in itertools.combinations(range(h.n), 2)]


def cherry_id(h: OrderedDigraph, n: int, pair_index: int, copy: int) -> int:
    """Vertex id in ``build_sn(h, n)`` of cherry ``copy`` on the ``pair_index``-th pair."""
    return h.n + pair_index * n + copy


def build_sn(h: OrderedDigraph, n: int, cap: int = DEFAULT_CAP) -> OrderedDigraph:
    if n < 0:
        raise ParameterError("cherry count must be >= 0")
    s = h.n
    total = s + comb(s, 2) * n
    if total > cap:
        raise FeasibilityError(f"S_{n} would have {total} vertices, above the cap of {cap}", total)
    if n == 0:
        return h
    order = h.by_rank
    a_idx, b_idx = np.triu_indices(s, k=1)  # row-major = lexicographic
    a = np.repeat(order[a_idx], n)
    b = np.repeat(order[b_idx], n)
    new = np.arange(s, total, dtype=np.int64)
    edges = np.concatenate(
        [np.column_stack([h.src, h.dst]), np.column_stack([new, a]), np.column_stack([new, b])]
    )
    weights = np.concatenate([h.weights, np.ones(2 * len(new), dtype=np.int64)])
    rank = np.concatenate([h.rank, new])
    return OrderedDigraph(total, edges, rank, weights)
