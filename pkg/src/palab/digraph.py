"""Ordered digraphs.

An :class:`OrderedDigraph` is a simple digraph on vertices ``0..n-1`` with a
rank array (the ordering) such that every edge points from a higher rank to a
lower rank, i.e. from a younger vertex to an older one. Parallel edges are
collapsed on construction and their count kept as an edge weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import OrderingError, ParameterError


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = "ok"
    edge: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class OrderedDigraph:
    """Immutable ordered digraph.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of (source, target) or array of shape (E, 2)
        Directed edges. Repeats are merged and counted in ``weights``.
    rank : sequence of int, optional
        0-based rank of each vertex; defaults to the identity.
    weights : sequence of int, optional
        Multiplicity of each listed edge (default 1 each).
    check : bool
        Raise :class:`OrderingError` unless :func:`validate` passes.
    """

    def __init__(self, n, edges=(), rank=None, weights=None, check=True):
        n = int(n)
        if n < 0:
            raise ParameterError("vertex count must be non-negative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        w = np.ones(len(e), dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
        if len(w) != len(e):
            raise ParameterError("weights must match edges")
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise ParameterError("edge endpoint out of range")
        if len(e):
            key = e[:, 0] * max(n, 1) + e[:, 1]
            uniq, inv = np.unique(key, return_inverse=True)
            w = np.bincount(inv, weights=w, minlength=len(uniq)).astype(np.int64)
            src, dst = np.divmod(uniq, max(n, 1))
        else:
            src = dst = np.zeros(0, dtype=np.int64)
            w = np.zeros(0, dtype=np.int64)
        r = np.arange(n, dtype=np.int64) if rank is None else np.asarray(rank, dtype=np.int64).copy()
        self.n = n
        self.src = _readonly(src.astype(np.int64))
        self.dst = _readonly(dst.astype(np.int64))
        self.weights = _readonly(w)
        self.rank = _readonly(r)
        if check:
            rep = validate(self)
            if not rep.ok:
                raise OrderingError(rep.message)

    # basic queries -------------------------------------------------------
    @property
    def num_edges(self) -> int:
        return len(self.src)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    @cached_property
    def out_degree(self) -> np.ndarray:
        return _readonly(np.bincount(self.src, minlength=self.n).astype(np.int64))

    @cached_property
    def in_degree(self) -> np.ndarray:
        return _readonly(np.bincount(self.dst, minlength=self.n).astype(np.int64))

    @cached_property
    def degree(self) -> np.ndarray:
        """Degree in the simple undirected version (an edge in both directions counts once)."""
        return _readonly(np.array([len(a) for a in self.undirected_adjacency()], dtype=np.int64))

    @cached_property
    def by_rank(self) -> np.ndarray:
        """Vertices listed in increasing rank."""
        return _readonly(np.argsort(self.rank, kind="stable").astype(np.int64))

    def has_edge(self, u: int, v: int) -> bool:
        ptr, idx, _ = self.out_csr
        lo, hi = ptr[u], ptr[u + 1]
        i = lo + np.searchsorted(idx[lo:hi], v)
        return bool(i < hi and idx[i] == v)

    @cached_property
    def out_csr(self):
        """``(ptr, idx, w)`` with out-neighbours of each vertex sorted by id."""
        return _csr(self.n, self.src, self.dst, self.weights)

    @cached_property
    def in_csr(self):
        return _csr(self.n, self.dst, self.src, self.weights)

    def undirected_adjacency(self) -> list[list[int]]:
        return self._undirected

    @cached_property
    def _undirected(self) -> list[list[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in zip(self.src.tolist(), self.dst.tolist()):
            adj[u].add(v)
            adj[v].add(u)
        return [sorted(a) for a in adj]

    def is_identity_ordered(self) -> bool:
        return bool(np.array_equal(self.rank, np.arange(self.n)))

    def relabel_by_rank(self) -> "OrderedDigraph":
        """Isomorphic copy whose vertex ids are the ranks."""
        if self.is_identity_ordered():
            return self
        r = self.rank
        return OrderedDigraph(self.n, np.column_stack([r[self.src], r[self.dst]]), weights=self.weights, check=False)

    def weakly_connected(self) -> bool:
        if self.n == 0:
            return True
        adj = self.undirected_adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    def __repr__(self) -> str:
        return f"OrderedDigraph(n={self.n}, edges={self.num_edges})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrderedDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.rank, other.rank)
        )

    __hash__ = None  # type: ignore[assignment]


def _csr(n, a, b, w):
    order = np.lexsort((b, a))
    a, b, w = a[order], b[order], w[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=n), out=ptr[1:])
    return _readonly(ptr), _readonly(np.ascontiguousarray(b)), _readonly(np.ascontiguousarray(w))


def validate(g: OrderedDigraph) -> ValidationReport:
    """Check that ranks are a bijection onto ``0..n-1`` and every edge goes from higher to lower rank."""
    r = g.rank
    if len(r) != g.n or not np.array_equal(np.sort(r), np.arange(g.n)):
        return ValidationReport(False, "ordering is not a bijection onto the ranks 0..n-1")
    bad = np.nonzero(r[g.src] <= r[g.dst])[0]
    if len(bad):
        u, v = int(g.src[bad[0]]), int(g.dst[bad[0]])
        if u == v:
            msg = f"self-loop at vertex {u}"
        else:
            msg = f"edge {u}->{v} has rank {int(r[u])} <= rank {int(r[v])}"
        return ValidationReport(False, msg, (u, v))
    return ValidationReport(True)


def orderings_agree(g1: OrderedDigraph, g2: OrderedDigraph, shared: Mapping[int, int]) -> bool:
    """True iff the two orderings induce the same relative order on the shared vertices.

    ``shared`` maps vertices of ``g1`` to the corresponding vertices of ``g2``.
    """
    items = list(shared.items())
    if len({b for _, b in items}) != len(items):
        raise ParameterError("vertex correspondence is not injective")
    if not items:
        return True
    a = np.fromiter((x for x, _ in items), dtype=np.int64, count=len(items))
    b = np.fromiter((y for _, y in items), dtype=np.int64, count=len(items))
    r2 = g2.rank[b][np.argsort(g1.rank[a], kind="stable")]
    return bool(np.all(np.diff(r2) > 0))


def max_out_degree(g: OrderedDigraph) -> int:
    return int(g.out_degree.max()) if g.n else 0


def disjoint_union(graphs: Iterable[OrderedDigraph]) -> OrderedDigraph:
    """Disjoint union with the rank blocks stacked in the given order."""
    graphs = list(graphs)
    n = 0
    edges, weights, ranks = [], [], []
    for g in graphs:
        edges.append(np.column_stack([g.src + n, g.dst + n]))
        weights.append(g.weights)
        ranks.append(g.rank + n)
        n += g.n
    if not graphs:
        return OrderedDigraph(0)
    return OrderedDigraph(n, np.concatenate(edges), np.concatenate(ranks), np.concatenate(weights), check=False)


# text format ------------------------------------------------------------

def write_digraph(g: OrderedDigraph, fh) -> None:
    """Write ``digraph n=<n>``, a ``sigma`` line of 1-based ranks, then ``src tgt [w]`` lines (1-based)."""
    fh.write(f"digraph n={g.n}\n")
    if not g.is_identity_ordered():
        fh.write("sigma " + " ".join(str(int(x) + 1) for x in g.rank) + "\n")
    for u, v, w in zip(g.src.tolist(), g.dst.tolist(), g.weights.tolist()):
        fh.write(f"{u + 1} {v + 1}\n" if w == 1 else f"{u + 1} {v + 1} {w}\n")


def parse_digraph(lines: Iterable[str]) -> OrderedDigraph:
    it = (ln.strip() for ln in lines)
    it = (ln for ln in it if ln and not ln.startswith("#"))
    header = next(it, None)
    if header is None or not header.startswith("digraph"):
        raise ParameterError("missing 'digraph n=<int>' header")
    fields = dict(tok.split("=", 1) for tok in header.split()[1:])
    try:
        n = int(fields["n"])
    except (KeyError, ValueError):
        raise ParameterError(f"bad digraph header: {header!r}") from None
    rank = None
    edges, weights = [], []
    for ln in it:
        if ln.startswith("sigma"):
            rank = [int(x) - 1 for x in ln.split()[1:]]
            if len(rank) != n:
                raise ParameterError("sigma line must list n ranks")
            continue
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise ParameterError(f"bad edge line: {ln!r}")
        edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
        weights.append(int(parts[2]) if len(parts) == 3 else 1)
    return OrderedDigraph(n, edges, rank=rank, weights=weights)
