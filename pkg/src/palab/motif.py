"""Exact motif-scaling analytics.

For an ordered digraph each vertex gets the exponent

    beta(v) = -(tau-2)/(tau-1) * d_out(v) - 1/(tau-1) * d_in(v)

and ``D`` is the largest suffix sum of ``1 + beta`` taken over the vertices in
rank order. All arithmetic is exact: with ``tau = p/q`` every ``1 + beta`` is
an integer over the common denominator ``p - q``, so suffix sums and argmax
ties are decided on integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Mapping

import numpy as np

from .digraph import OrderedDigraph, max_out_degree, orderings_agree
from .errors import AssumptionError, ParameterError
from .model import to_fraction
from .witness import build_sn, h0


@dataclass(frozen=True)
class Tau:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", to_fraction(self.value))
        if not 2 < self.value < 3:
            raise ParameterError(f"tau must lie in (2, 3), got {self.value}")

    @classmethod
    def of(cls, x) -> "Tau":
        return x if isinstance(x, Tau) else cls(to_fraction(x))

    @classmethod
    def from_model(cls, m: int, delta) -> "Tau":
        return cls(3 + to_fraction(delta) / m)

    @property
    def out_weight(self) -> Fraction:
        return (self.value - 2) / (self.value - 1)

    @property
    def in_weight(self) -> Fraction:
        return 1 / (self.value - 1)

    @property
    def cherry_gain(self) -> Fraction:
        """``1 + beta`` of a vertex with two out-edges and nothing else: (3-tau)/(tau-1)."""
        return (3 - self.value) / (self.value - 1)

    @property
    def integral_base(self) -> Fraction:
        """(tau-1)/(3-tau), the integral of w**(-2(tau-2)/(tau-1)) over (0, 1]."""
        return (self.value - 1) / (3 - self.value)

    def _ints(self):
        p, q = self.value.numerator, self.value.denominator
        # (1 + beta) * (p - q) = (p - q) - (p - 2q) d_out - q d_in
        return p - q, p - 2 * q, q


def beta(d_out: int, d_in: int, tau) -> Fraction:
    tau = Tau.of(tau)
    if d_out < 0 or d_in < 0:
        raise ParameterError("degrees must be non-negative")
    return -tau.out_weight * d_out - tau.in_weight * d_in


@dataclass(frozen=True)
class MotifAnalysis:
    """``D`` and its maximisers for one ordered digraph.

    ``gain_num[i]`` and ``suffix_num[s]`` are numerators over ``denominator``:
    ``gain_num[i]`` is ``1 + beta`` of the vertex of rank ``i`` (0-based) and
    ``suffix_num[s]`` the sum over ranks ``>= s`` (so index ``n`` is 0).
    """

    tau: Tau
    denominator: int
    gain_num: tuple[int, ...] = field(repr=False)
    suffix_num: tuple[int, ...] = field(repr=False)
    D: Fraction
    maximisers: tuple[int, ...]
    vertex_by_rank: tuple[int, ...] = field(repr=False)

    @property
    def r(self) -> int:
        return len(self.maximisers)

    @property
    def suffix_sums(self) -> list[Fraction]:
        return [Fraction(x, self.denominator) for x in self.suffix_num]

    @property
    def beta(self) -> dict[int, Fraction]:
        """``beta`` per vertex id."""
        return {v: Fraction(g, self.denominator) - 1 for v, g in zip(self.vertex_by_rank, self.gain_num)}

    def to_json(self) -> dict:
        return {
            "tau": str(self.tau.value),
            "D": str(self.D),
            "maximisers": list(self.maximisers),
            "r": self.r,
            "beta": {str(v): str(b) for v, b in self.beta.items()},
            "suffix_sums": [str(x) for x in self.suffix_sums],
        }


def d_and_maximisers(g: OrderedDigraph, tau) -> MotifAnalysis:
    tau = Tau.of(tau)
    den, a, b = tau._ints()
    order = g.by_rank.tolist()
    dout = g.out_degree.tolist()
    din = g.in_degree.tolist()
    gains = [den - a * dout[v] - b * din[v] for v in order]
    suffix = list(itertools.accumulate(reversed(gains), initial=0))[::-1]
    best = max(suffix)
    maxs = tuple(s for s, x in enumerate(suffix) if x == best)
    return MotifAnalysis(tau, den, tuple(gains), tuple(suffix), Fraction(best, den), maxs, tuple(order))


def dn_closed_form(s: int, n: int, tau) -> Fraction:
    """D of S_n(H) for a weakly connected H on ``s`` vertices: C(s,2) n (3-tau)/(tau-1)."""
    if s < 2 or n < 0:
        raise ParameterError("need s >= 2 and n >= 0")
    return comb(s, 2) * n * Tau.of(tau).cherry_gain


def nested_integral_closed_form(k: int, tau) -> Fraction:
    """Value of the ``k``-fold ordered integral of w**(-2(tau-2)/(tau-1)) over 0 < w_1 < ... < w_k < 1."""
    if k < 0:
        raise ParameterError("k must be >= 0")
    return Tau.of(tau).integral_base ** k / factorial(k)


def predicted_scaling(g: OrderedDigraph, tau, m: int | None = None) -> tuple[Fraction, int]:
    """``(D, r - 1)``: expected copies grow like t**D log(t)**(r-1)."""
    if m is not None and max_out_degree(g) > m:
        raise ParameterError(f"motif has out-degree {max_out_degree(g)} > m = {m}; it is not attainable")
    a = d_and_maximisers(g, tau)
    return a.D, a.r - 1


def paley_zygmund(mean, second_moment) -> Fraction | float:
    """Lower bound mean**2 / E[Z**2] on P(Z > 0)."""
    if mean <= 0:
        raise ParameterError("mean must be positive")
    if second_moment < mean * mean:
        raise ParameterError("second moment is smaller than the squared mean")
    if isinstance(mean, (int, Fraction)) and isinstance(second_moment, (int, Fraction)):
        return Fraction(mean) ** 2 / Fraction(second_moment)
    return mean * mean / second_moment


# unions of two witness copies -----------------------------------------------

@dataclass(frozen=True)
class UnionAnalysis:
    D_hat: Fraction
    D_n: Fraction
    s_hat: int
    maximisers: tuple[int, ...]
    equality_with_2Dn: bool
    bound_holds: bool
    type_counts: tuple[int, int, int]
    overcount_factor: int
    union: OrderedDigraph = field(repr=False)

    @property
    def characterization_holds(self) -> bool:
        """Equality exactly when every degree-two vertex is of type one."""
        only_type_one = self.type_counts[1] == 0 and self.type_counts[2] == 0
        return self.equality_with_2Dn == only_type_one


def overcount_factor(s: int, s_hat: int, n: int) -> int:
    """binom(2n, n) ** binom(2s - s_hat, 2)."""
    return comb(2 * n, n) ** comb(2 * s - s_hat, 2)


def analyze_union(
    h_prime: OrderedDigraph,
    h_second: OrderedDigraph,
    overlap: Mapping[int, int],
    n: int,
    tau,
    shared_cherries=(),
    cherry_vertices=(),
) -> UnionAnalysis:
    """Analyse S_n(h_prime) u S_n(h_second) glued along the given identifications.

    ``overlap`` maps vertices of ``h_second`` to vertices of ``h_prime``.
    ``shared_cherries`` holds ``(cherry of S_n(h_second), cherry of S_n(h_prime))``
    id pairs for cherry vertices common to both copies, ``cherry_vertices``
    holds ``(vertex of h_second, cherry of S_n(h_prime))`` pairs where an
    H''-vertex coincides with a cherry of the first copy.

    Raises :class:`AssumptionError` if the two orderings disagree or no
    ordering of the union puts every degree-two vertex after every vertex that
    has degree two in one copy but at least three in the union.
    """
    if n < 5:
        raise ParameterError("the union analysis needs n >= 5 so that low-degree vertices lie outside H' u H''")
    if h_prime.n != h_second.n:
        raise ParameterError("the two copies must have the same number of vertices")
    tau = Tau.of(tau)
    s = h_prime.n
    s1 = _cached_sn(h_prime, n)
    s2 = s1 if h_second is h_prime else _cached_sn(h_second, n)
    phi: dict[int, int] = {}
    for a, b in overlap.items():
        if not (0 <= a < s and 0 <= b < s):
            raise ParameterError("overlap must map H''-vertices to H'-vertices")
        phi[int(a)] = int(b)
    for c2, c1 in shared_cherries:
        if not (c2 >= s and c1 >= s):
            raise ParameterError("shared cherries must be cherry vertices of both copies")
        phi[int(c2)] = int(c1)
    for x, c1 in cherry_vertices:
        if not (x < s and c1 >= s):
            raise ParameterError("cherry_vertices pairs an H''-vertex with a cherry of the first copy")
        phi[int(x)] = int(c1)
    if len(set(phi.values())) != len(phi):
        raise ParameterError("identifications are not injective")
    if not orderings_agree(s2, s1, phi):
        raise AssumptionError("the orderings of the two copies disagree on their common vertices")

    n1 = s1.n
    fresh = [v for v in range(s2.n) if v not in phi]
    to_union = dict(phi)
    to_union.update({v: n1 + i for i, v in enumerate(fresh)})
    N = n1 + len(fresh)
    m2 = np.array([to_union[v] for v in range(s2.n)], dtype=np.int64)
    e = np.concatenate(
        [np.column_stack([s1.src, s1.dst]), np.column_stack([m2[s2.src], m2[s2.dst]])]
    )
    # a common edge appears once (multiplicity 1), hence unit weights after deduplication
    key = np.unique(e[:, 0] * N + e[:, 1])
    e = np.column_stack(np.divmod(key, N))
    if np.any(e[:, 0] == e[:, 1]):
        raise AssumptionError("identification creates a self-loop")

    deg = np.bincount(e[:, 0], minlength=N) + np.bincount(e[:, 1], minlength=N)
    h_part = set(range(s)) | {int(m2[v]) for v in range(s)}
    cherry1 = set(range(s, n1))
    cherry2 = {int(m2[v]) for v in range(s, s2.n)}
    low = cherry1 | cherry2  # degree two in one of the copies
    type1 = (cherry1 ^ cherry2) - h_part
    type2 = (cherry1 & cherry2) - h_part
    type3 = low & h_part
    deg2_union = {v for v in low if deg[v] == 2}
    late_needed = {v for v in low if deg[v] >= 3}

    # ordering of the union: both copies' orders, edge orientation, and the degree-two constraint
    # node N is a barrier between the two groups of the degree-two constraint
    succ: list[list[int]] = [[] for _ in range(N + 1)]
    for chain in (s1.by_rank.tolist(), [int(m2[v]) for v in s2.by_rank.tolist()]):
        for x, y in zip(chain, chain[1:]):
            succ[x].append(y)
    for u, v in e.tolist():
        succ[v].append(u)
    for w in late_needed:
        succ[w].append(N)
    succ[N].extend(deg2_union)
    rank = _linear_extension(succ, N, s1, m2)
    if rank is None:
        raise AssumptionError("no ordering of the union agrees with both copies and ranks degree-two vertices last")
    union = OrderedDigraph(N, e, rank)
    res = d_and_maximisers(union, tau)
    d_n = dn_closed_form(s, n, tau)
    s_hat = len(h_part)
    return UnionAnalysis(
        res.D,
        d_n,
        s_hat,
        res.maximisers,
        res.D == 2 * d_n,
        res.D <= 2 * d_n,
        (len(type1), len(type2), len(type3)),
        overcount_factor(s, s_hat, n),
        union,
    )


def _linear_extension(succ, N, s1, m2):
    import heapq

    indeg = [0] * (N + 1)
    for ys in succ:
        for y in ys:
            indeg[y] += 1
    # tie-break: first copy's rank, then the second copy's rank
    key: list = [(-1, -1)] * (N + 1)
    r1 = s1.rank.tolist()
    for v in range(s1.n):
        key[v] = (r1[v], 0)
    n1 = s1.n
    for v2, u in enumerate(m2.tolist()):
        if u >= n1:
            key[u] = (v2 + 0.5, 1)
    heap = [(key[v], v) for v in range(N + 1) if indeg[v] == 0]
    heapq.heapify(heap)
    rank = [0] * N
    r = 0
    done = 0
    while heap:
        _, v = heapq.heappop(heap)
        done += 1
        if v < N:
            rank[v] = r
            r += 1
        for y in succ[v]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, (key[y], y))
    return rank if done == N + 1 else None


_SN_CACHE: dict = {}


def _cached_sn(h: OrderedDigraph, n: int) -> OrderedDigraph:
    key = (h.n, h.src.tobytes(), h.dst.tobytes(), h.rank.tobytes(), h.weights.tobytes(), n)
    g = _SN_CACHE.get(key)
    if g is None:
        if len(_SN_CACHE) > 64:
            _SN_CACHE.clear()
        g = _SN_CACHE[key] = build_sn(h, n)
    return g


@dataclass(frozen=True)
class CatalogEntry:
    overlap: tuple[tuple[int, int], ...]  # (H''-vertex, H'-vertex) pairs
    variant: str
    analysis: UnionAnalysis

    @property
    def extremal_construction(self) -> bool:
        return self.variant == "disjoint-cherries"


def c7_overlaps():
    """Every order-agreeing identification of 1..7 vertices between two copies of H_0.

    Agreement forces the map from the chosen H''-vertices to the chosen
    H'-vertices to be increasing in rank, so there are C(7,k)**2 choices for
    overlap size ``k``.
    """
    for k in range(1, 8):
        for a in itertools.combinations(range(7), k):
            for b in itertools.combinations(range(7), k):
                yield tuple(zip(b, a))


def union_catalog(n: int, tau) -> list[CatalogEntry]:
    """Unions of two S_n(H_0) copies over all overlaps of their H_0 parts.

    For each overlap the catalog holds the union with disjoint cherries (the
    equality construction) and, where the overlap permits, variants with a
    shared cherry on a common pair, all cherries of common pairs shared, a
    cherry shared across two different pairs, and an H''-vertex coinciding
    with a cherry of the first copy.
    """
    h = h0()
    s = h.n
    pairs = {p: i for i, p in enumerate(itertools.combinations(range(s), 2))}  # identity ranks in H_0

    def cid(a, b, copy):
        a, b = min(a, b), max(a, b)
        return s + pairs[(a, b)] * n + copy

    out = []
    for ov in c7_overlaps():
        overlap = dict(ov)
        shared = sorted(overlap)  # H''-vertices in the overlap
        variants: list[tuple[str, dict]] = [("disjoint-cherries", {})]
        if len(shared) >= 2:
            x, y = shared[0], shared[1]
            variants.append(("one-shared-cherry", {"shared_cherries": [(cid(x, y, 0), cid(overlap[x], overlap[y], 0))]}))
            allsh = [
                (cid(x, y, c), cid(overlap[x], overlap[y], c))
                for x, y in itertools.combinations(shared, 2)
                for c in range(n)
            ]
            variants.append(("all-common-pairs-shared", {"shared_cherries": allsh}))
        x = shared[0]
        others2 = [v for v in range(s) if v not in overlap]
        others1 = [v for v in range(s) if v not in overlap.values()]
        if others2 and others1:
            y2, y1 = others2[0], others1[0]
            variants.append(("cross-pair-cherry", {"shared_cherries": [(cid(x, y2, 0), cid(overlap[x], y1, 0))]}))
        if s - 1 not in overlap:
            variants.append(("cherry-is-H-vertex", {"cherry_vertices": [(s - 1, cid(0, 1, 0))]}))
        for name, kw in variants:
            try:
                res = analyze_union(h, h, overlap, n, tau, **kw)
            except AssumptionError:
                continue
            out.append(CatalogEntry(ov, name, res))
    return out


def overlap_term_ratio(s: int, s_hat: int, n: int) -> Fraction:
    """Exact ratio of one overlapping-pair term in the variance bound to the squared single-copy term.

    binom(2n,n)**binom(k,2) * n**k * (C(s,2)n)!**2 / (2 C(s,2) n)!  with k = 2s - s_hat.
    """
    k = 2 * s - s_hat
    c = comb(s, 2) * n
    return Fraction(comb(2 * n, n) ** comb(k, 2) * n**k * factorial(c) ** 2, factorial(2 * c))


def variance_exponents(s: int, s_hat: int) -> tuple[int, int]:
    """Growth of overlap_term_ratio in n: it behaves like 2**(a n) * sqrt(n)**b up to a constant.

    Returns ``(a, b) = (2 C(k,2) - 2 C(s,2), 2k + 1 - C(k,2))`` with ``k = 2s - s_hat``.
    """
    k = 2 * s - s_hat
    return 2 * comb(k, 2) - 2 * comb(s, 2), 2 * k + 1 - comb(k, 2)
