"""Colouring of ordered digraphs (orientation and multiplicity are ignored).

The greedy colouring by ordering gives the ``max out-degree + 1`` upper
bound. Exact answers come from a DSATUR backtracking search with a node
budget; when the budget runs out the answer is ``inconclusive`` and
:func:`chromatic_number` reports a bracket.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .digraph import OrderedDigraph, max_out_degree
from .errors import ParameterError
from .witness import _next_level, build_h, h0


@dataclass(frozen=True)
class Coloring:
    colors: np.ndarray  # positive ints, one per vertex
    num_colors: int
    proper: bool


def is_proper(g: OrderedDigraph, colors) -> bool:
    c = np.asarray(colors)
    return bool(np.all(c[g.src] != c[g.dst]))


def make_coloring(g: OrderedDigraph, colors) -> Coloring:
    c = np.asarray(colors, dtype=np.int64)
    return Coloring(c, int(len(np.unique(c))), is_proper(g, c))


def greedy_by_ordering(g: OrderedDigraph, backend: str | None = None) -> Coloring:
    """Colour in increasing rank; each vertex takes the least colour unused by its out-neighbours."""
    ptr, idx, _ = g.out_csr
    colors = kernels.get_backend(backend).greedy_colors(g.n, ptr, idx, g.by_rank)
    return make_coloring(g, colors)


# bipartiteness ------------------------------------------------------------

@dataclass(frozen=True)
class BipartiteResult:
    bipartite: bool
    sides: np.ndarray | None = None  # 0/1 per vertex when bipartite
    odd_cycle: list[int] | None = None  # vertex sequence of an odd cycle otherwise

    def __bool__(self) -> bool:
        return self.bipartite


def is_bipartite(g: OrderedDigraph) -> BipartiteResult:
    """BFS 2-colouring of the undirected version, with an odd cycle as certificate on failure."""
    adj = g.undirected_adjacency()
    side = [-1] * g.n
    parent = [-1] * g.n
    depth = [0] * g.n
    for root in range(g.n):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if side[u] < 0:
                    side[u] = 1 - side[v]
                    parent[u] = v
                    depth[u] = depth[v] + 1
                    queue.append(u)
                elif side[u] == side[v]:
                    return BipartiteResult(False, odd_cycle=_cycle_through(u, v, parent, depth))
    return BipartiteResult(True, sides=np.array(side, dtype=np.int64))


def _cycle_through(u, v, parent, depth):
    left, right = [u], [v]
    while depth[u] > depth[v]:
        u = parent[u]
        left.append(u)
    while depth[v] > depth[u]:
        v = parent[v]
        right.append(v)
    while u != v:
        u, v = parent[u], parent[v]
        left.append(u)
        right.append(v)
    right.pop()  # common ancestor appears once
    return left + right[::-1]


# exact k-colourability ------------------------------------------------------

@dataclass
class ColorabilityResult:
    status: str  # "yes" | "no" | "inconclusive"
    coloring: Coloring | None = None
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.status == "yes"


def greedy_clique(adj: list[list[int]], vertices=None) -> list[int]:
    """A maximal clique grown from the highest-degree vertex (lowest id on ties)."""
    verts = list(range(len(adj))) if vertices is None else list(vertices)
    if not verts:
        return []
    allowed = set(verts)
    deg = {v: sum(1 for u in adj[v] if u in allowed) for v in verts}
    start = min(verts, key=lambda v: (-deg[v], v))
    clique = [start]
    cand = [u for u in adj[start] if u in allowed]
    cand.sort(key=lambda v: (-deg[v], v))
    for u in cand:
        nb = set(adj[u])
        if all(w in nb for w in clique):
            clique.append(u)
    return clique


def _peel(adj, k):
    """Repeatedly remove vertices of degree < k; returns (core vertex set, removal order)."""
    n = len(adj)
    deg = [len(a) for a in adj]
    alive = [True] * n
    order = []
    stack = [v for v in range(n) if deg[v] < k]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        order.append(v)
        for u in adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] == k - 1:
                    stack.append(u)
    return [v for v in range(n) if alive[v]], order


def _least_free(adj, colors, v):
    used = {colors[u] for u in adj[v]}
    c = 1
    while c in used:
        c += 1
    return c


def is_k_colorable(g: OrderedDigraph, k: int, budget: int | None = None) -> ColorabilityResult:
    """Decide k-colourability.

    Vertices of degree < k are peeled off first (they can always be coloured
    last). The remaining core is searched by DSATUR: pick the uncoloured
    vertex with the most distinct neighbour colours (lowest id on ties), try
    colours in increasing order, never opening more than one new colour. The
    first clique found is pre-coloured ``1..q`` to break colour symmetry.
    ``budget`` caps the number of colour assignments tried.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    adj = g.undirected_adjacency()
    n = g.n
    colors = [0] * n
    core, removed = _peel(adj, k)
    nodes = 0
    if core:
        local = {v: i for i, v in enumerate(core)}
        cadj = [[local[u] for u in adj[v] if u in local] for v in core]
        clique = greedy_clique(cadj)
        if len(clique) > k:
            return ColorabilityResult("no", nodes=0)
        status, ccolors, nodes = _dsatur(cadj, k, clique, budget)
        if status != "yes":
            return ColorabilityResult(status, nodes=nodes)
        for v, c in zip(core, ccolors):
            colors[v] = c
    for v in reversed(removed):
        colors[v] = _least_free(adj, colors, v)
    col = make_coloring(g, colors)
    assert col.proper and (n == 0 or max(colors) <= k)
    return ColorabilityResult("yes", col, nodes)


def _dsatur(adj, k, clique, budget):
    n = len(adj)
    colors = [0] * n
    cnt = [[0] * (k + 2) for _ in range(n)]
    sat = [0] * n
    heap = [(0, v) for v in range(n)]
    push, top, pop = heapq.heappush, (lambda: heap[0]), heapq.heappop

    def assign(v, c):
        colors[v] = c
        for u in adj[v]:
            cu = cnt[u]
            if cu[c] == 0:
                sat[u] += 1
                if colors[u] == 0:
                    push(heap, (-sat[u], u))
            cu[c] += 1

    def unassign(v, c):
        colors[v] = 0
        for u in adj[v]:
            cu = cnt[u]
            cu[c] -= 1
            if cu[c] == 0:
                sat[u] -= 1
                if colors[u] == 0:
                    push(heap, (-sat[u], u))
        push(heap, (-sat[v], v))

    def select():
        while heap:
            s, v = top()
            if colors[v] == 0 and -s == sat[v]:
                return v
            pop(heap)
        return -1

    for i, v in enumerate(clique):
        assign(v, i + 1)
    maxc = len(clique)
    nodes = 0
    v = select()
    if v < 0:
        return "yes", colors, nodes
    stack = [[v, 0, maxc]]
    while stack:
        frame = stack[-1]
        v, c, before = frame
        if c:
            unassign(v, c)
        limit = min(k, before + 1)
        cv = cnt[v]
        c += 1
        while c <= limit and cv[c]:
            c += 1
        if c > limit:
            stack.pop()
            continue
        nodes += 1
        if budget is not None and nodes > budget:
            return "inconclusive", None, nodes - 1
        assign(v, c)
        frame[1] = c
        w = select()
        if w < 0:
            return "yes", colors, nodes
        stack.append([w, 0, max(before, c)])
    return "no", None, nodes


# chromatic number -----------------------------------------------------------

@dataclass
class ChromaticResult:
    chi: int | None
    lower: int
    upper: int
    coloring: Coloring | None
    nodes_expanded: int = 0
    certificate: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.chi is not None


def chromatic_number(g: OrderedDigraph, budget: int | None = None, lower_bound: int | None = None) -> ChromaticResult:
    """Exact chromatic number where the node budget allows, otherwise a ``[lower, upper]`` bracket.

    The bracket starts at (clique size, greedy colours) and is narrowed by a
    binary search over :func:`is_k_colorable`. ``lower_bound`` lets a caller
    supply an independently proven lower bound.
    """
    if g.n == 0:
        return ChromaticResult(0, 0, 0, make_coloring(g, []))
    best = greedy_by_ordering(g)
    upper = best.num_colors
    if g.num_edges == 0:
        return ChromaticResult(1, 1, 1, best)
    adj = g.undirected_adjacency()
    lower = max(2, len(greedy_clique(adj)), lower_bound or 0)
    if lower <= 2 and upper > 2:
        bip = is_bipartite(g)
        if bip:
            best = make_coloring(g, bip.sides + 1)
            upper = 2
        else:
            lower = 3
    nodes = 0
    lo, hi = lower, upper
    conclusive = True
    while lo < hi:
        mid = (lo + hi) // 2
        remaining = None if budget is None else budget - nodes
        if remaining is not None and remaining <= 0:
            conclusive = False
            break
        res = is_k_colorable(g, mid, remaining)
        nodes += res.nodes
        if res.status == "yes":
            best = res.coloring
            hi = best.num_colors
        elif res.status == "no":
            lo = mid + 1
        else:
            # cannot settle mid; try to tighten from above only
            conclusive = False
            if mid + 1 >= hi:
                break
            lo_probe = mid + 1
            while lo_probe < hi:
                remaining = None if budget is None else budget - nodes
                if remaining is not None and remaining <= 0:
                    break
                r2 = is_k_colorable(g, hi - 1, remaining)
                nodes += r2.nodes
                if r2.status != "yes":
                    break
                best = r2.coloring
                hi = best.num_colors
            break
    if conclusive and lo == hi:
        return ChromaticResult(hi, hi, hi, best, nodes)
    return ChromaticResult(None, lo, hi, best, nodes)


def extend_coloring(g: OrderedDigraph, colors, k: int) -> Coloring | None:
    """Extend a partial colouring (0 = uncoloured) greedily in rank order using at most ``k`` colours."""
    adj = g.undirected_adjacency()
    col = [int(c) for c in colors]
    for v in g.by_rank.tolist():
        if col[v] == 0:
            col[v] = _least_free(adj, col, v)
            if col[v] > k:
                return None
    return make_coloring(g, col)


def recursive_coloring(i: int) -> Coloring:
    """The ``(i+3)``-colouring of H_i used for the upper bound: copies recursively, apexes in a fresh colour."""
    g = build_h(i)
    return make_coloring(g, _recursive_colors(i))


def _recursive_colors(i):
    if i == 0:
        return greedy_by_ordering(h0()).colors.tolist()
    inner = _recursive_colors(i - 1)
    s = len(inner)
    k = i + 2
    return inner * k + [i + 3] * (s**k)


# structural lower bound for H_i ---------------------------------------------

@dataclass
class LowerBoundReport:
    level: int
    verified: bool
    steps: list[tuple[str, bool, str]]

    def __bool__(self) -> bool:
        return self.verified


def _cycle(length: int) -> OrderedDigraph:
    edges = [(j + 1, j) for j in range(length - 1)] + [(length - 1, 0)]
    return OrderedDigraph(length, edges)


def _proper_colorings(g: OrderedDigraph, k: int) -> list[tuple[int, ...]]:
    """All proper colourings with colours 1..k, by brute force over k**n assignments."""
    src, dst = g.src.tolist(), g.dst.tolist()
    edges = list(zip(src, dst))
    return [a for a in itertools.product(range(1, k + 1), repeat=g.n) if all(a[u] != a[v] for u, v in edges)]


def _hall_rainbow(color_sets: list[set[int]]) -> bool:
    """Is there a choice of one distinct colour per copy (a rainbow tuple)? Simple augmenting-path matching."""
    match: dict[int, int] = {}

    def augment(j, seen):
        for c in color_sets[j]:
            if c in seen:
                continue
            seen.add(c)
            if c not in match or augment(match[c], seen):
                match[c] = j
                return True
        return False

    return all(augment(j, set()) for j in range(len(color_sets)))


def verify_h_lower_bound(i: int, base_cycle: int = 7, mode: str = "auto") -> LowerBoundReport:
    """Check that H_i admits no proper ``(i+2)``-colouring.

    Base: scan all ``3**L`` colourings of the base cycle and confirm every
    proper one uses all three colours. Step to level ``l``: each of the
    ``l+2`` copies, properly coloured with ``l+2`` colours, shows every colour,
    so a rainbow tuple exists; its apex is adjacent to ``l+2`` distinct colours
    and needs a new one. ``mode="direct"`` (``i <= 1``) checks the apex
    coverage on the explicitly built graph; ``mode="inductive"`` checks the
    rainbow implication abstractly for every level up to ``i``.
    """
    if i < 0:
        raise ParameterError("level must be >= 0")
    if mode == "auto":
        mode = "direct" if i <= 1 else "inductive"
    if mode == "direct" and i > 1:
        raise ParameterError("direct verification is only feasible for i <= 1")
    steps = []
    base = h0() if base_cycle == 7 else _cycle(base_cycle)
    proper3 = _proper_colorings(base, 3)
    surjective = all(len(set(a)) == 3 for a in proper3)
    steps.append(
        (
            "base",
            surjective,
            f"{3 ** base.n} assignments of C_{base.n} scanned; {len(proper3)} proper 3-colourings; "
            f"{sum(len(set(a)) < 3 for a in proper3)} use fewer than 3 colours",
        )
    )
    ok = surjective
    if i >= 1 and ok:
        if mode == "direct":
            g = _next_level(base, 1) if base_cycle != 7 else build_h(1)
            s = base.n
            # apex neighbourhoods must cover the full product of the three copies
            apex = np.arange(3 * s, g.n)
            ptr, idx, _ = g.out_csr
            tuples = {tuple(sorted(idx[ptr[a]:ptr[a + 1]].tolist())) for a in apex.tolist()}
            full = {tuple(sorted(t)) for t in itertools.product(range(s), range(s, 2 * s), range(2 * s, 3 * s))}
            covered = tuples == full
            # whatever colour sets the three copies realise, a rainbow triple must exist
            realised = {frozenset(a) for a in proper3}
            rainbow = all(_hall_rainbow(list(combo)) for combo in itertools.combinations_with_replacement(realised, 3))
            passed = covered and rainbow
            steps.append(
                (
                    "level 1",
                    passed,
                    f"{len(tuples)} apexes cover all {s ** 3} cross-copy triples: {covered}; "
                    f"rainbow triple forced for all {len(realised)} realised colour sets: {rainbow}",
                )
            )
            ok = passed
        else:
            for level in range(1, i + 1):
                k = level + 2
                # induction hypothesis: every proper k-colouring of a copy shows all k colours
                passed = _hall_rainbow([set(range(1, k + 1)) for _ in range(k)])
                steps.append((f"level {level}", passed, f"rainbow {k}-tuple forced; apex needs colour {k + 1}"))
                if not passed:
                    ok = False
                    break
    return LowerBoundReport(i, ok, steps)
