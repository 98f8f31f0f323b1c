"""The preferential-attachment graph PA_t(m, delta).

PA_1 is a single vertex. PA_2 is two vertices joined by ``m`` parallel
edges. For ``t >= 3`` vertex ``v_t`` arrives with ``m`` edges placed one at a
time; the ``j``-th edge lands on old vertex ``v_i`` with probability

    (d(v_i) + delta) / (2m(t-2) + (t-1)delta + j - 1)

where ``d`` counts the ``j-1`` edges of ``v_t`` already placed. Edges point
from the young endpoint to the old one.

Internally vertices are 0-based birth indices (vertex ``k`` is ``v_{k+1}``);
the text format uses 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .digraph import OrderedDigraph
from .errors import ParameterError
from .seeding import check_seed, make_rng


def to_fraction(x) -> Fraction:
    """Parse ``"p/q"``, an int, a float or a Fraction into an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ParameterError(f"not a rational number: {x!r}") from None
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    raise ParameterError(f"not a rational number: {x!r}")


@dataclass(frozen=True)
class PAParams:
    m: int
    delta: Fraction
    t: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "delta", to_fraction(self.delta))
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.t, (int, np.integer)) or self.t < 1:
            raise ParameterError(f"t must be a positive integer, got {self.t!r}")
        if self.delta <= -self.m:
            raise ParameterError(f"delta must exceed -m = {-self.m}, got {self.delta}")
        try:
            check_seed(self.seed)
        except ValueError as exc:
            raise ParameterError(str(exc)) from None
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def tau(self) -> Fraction:
        return 3 + self.delta / self.m

    def with_t(self, t: int) -> "PAParams":
        return PAParams(self.m, self.delta, t, self.seed)

    def with_seed(self, seed: int) -> "PAParams":
        return PAParams(self.m, self.delta, self.t, seed)


@dataclass(frozen=True, eq=False)
class PAGraph:
    """A realised PA multigraph.

    ``sources[e] -> targets[e]`` is the ``e``-th edge in creation order;
    ``degrees[v]`` is the total degree of vertex ``v``.
    """

    params: PAParams
    sources: np.ndarray
    targets: np.ndarray
    degrees: np.ndarray = field(repr=False)

    def __post_init__(self):
        for a in (self.sources, self.targets, self.degrees):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.params.t

    @property
    def num_edges(self) -> int:
        return len(self.sources)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.sources.tolist(), self.targets.tolist()))

    @property
    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.sources, minlength=self.n)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.n)

    def __eq__(self, other):
        if not isinstance(other, PAGraph):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.sources, other.sources)
            and np.array_equal(self.targets, other.targets)
        )


def generate(params: PAParams, backend: str | None = None) -> PAGraph:
    """Sample PA_t(m, delta) with the seed in ``params``.

    For ``delta < 0`` each edge draws a uniform endpoint stub (probability
    proportional to degree) and accepts it with probability ``(d + delta)/d``;
    every candidate has ``d >= m`` so the acceptance rate is at least
    ``(m + delta)/m``. For ``delta > 0`` the weight is split into a
    degree-proportional part and a uniform part.
    """
    k = kernels.get_backend(backend)
    rng = make_rng(params.seed)
    block = min(4096, 4 * params.m * params.t + 16)
    src, tgt, deg = k.pa_edges(params.m, float(params.delta), params.t, rng, block)
    return PAGraph(params, src, tgt, deg)


def attachment_distribution(prefix: PAGraph, j: int, placed: Sequence[int] = (), exact: bool = False):
    """Exact attachment probabilities for the ``j``-th edge of the next vertex.

    ``prefix`` is PA_{t-1}; ``placed`` lists the (0-based) targets of the
    ``j-1`` edges of ``v_t`` already placed. Returns a vector over the old
    vertices ``0..t-2`` (Fractions if ``exact`` else floats).
    """
    m, delta = prefix.params.m, prefix.params.delta
    if not 1 <= j <= m:
        raise ParameterError(f"edge index j must lie in [1, {m}], got {j}")
    if len(placed) != j - 1:
        raise ParameterError(f"expected {j - 1} already-placed targets, got {len(placed)}")
    old = prefix.n
    t = old + 1
    if t < 3:
        raise ParameterError("attachment probabilities are defined from t = 3 on")
    deg = [int(d) for d in prefix.degrees]
    for c in placed:
        if not 0 <= c < old:
            raise ParameterError(f"placed target {c} is not an old vertex")
        deg[c] += 1
    denom = 2 * m * (t - 2) + (t - 1) * delta + j - 1
    probs = [(Fraction(d) + delta) / denom for d in deg]
    if exact:
        return probs
    return np.array([float(p) for p in probs])


def as_ordered_digraph(g: PAGraph) -> OrderedDigraph:
    """Simple projection with multiplicities as weights; the ordering is birth order."""
    e = np.column_stack([g.sources, g.targets])
    return OrderedDigraph(g.n, e, weights=None, check=False)


# text format ------------------------------------------------------------

def write_pa(g: PAGraph, fh) -> None:
    p = g.params
    fh.write(f"pa m={p.m} delta={p.delta.numerator}/{p.delta.denominator} t={p.t} seed={p.seed}\n")
    for u, v in zip(g.sources.tolist(), g.targets.tolist()):
        fh.write(f"{u + 1} {v + 1}\n")


def parse_pa(lines) -> PAGraph:
    it = (ln.strip() for ln in lines)
    it = (ln for ln in it if ln and not ln.startswith("#"))
    header = next(it, None)
    if header is None or not header.startswith("pa "):
        raise ParameterError("missing 'pa m=.. delta=.. t=.. seed=..' header")
    try:
        f = dict(tok.split("=", 1) for tok in header.split()[1:])
        params = PAParams(int(f["m"]), to_fraction(f["delta"]), int(f["t"]), int(f["seed"]))
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"bad pa header {header!r}: {exc}") from None
    src, tgt = [], []
    for ln in it:
        a, b = ln.split()
        src.append(int(a) - 1)
        tgt.append(int(b) - 1)
    src_a = np.array(src, dtype=np.int64)
    tgt_a = np.array(tgt, dtype=np.int64)
    expected = params.m * (params.t - 1) if params.t >= 2 else 0
    if len(src_a) != expected:
        raise ParameterError(f"expected {expected} edges, file has {len(src_a)}")
    if len(src_a) and (np.any(src_a <= tgt_a) or tgt_a.min() < 0 or src_a.max() >= params.t):
        raise ParameterError("edges must point from a younger to an older vertex")
    deg = np.bincount(src_a, minlength=params.t) + np.bincount(tgt_a, minlength=params.t)
    return PAGraph(params, src_a, tgt_a, deg.astype(np.int64))


def read_graph(path):
    """Read either file format: PA graphs become their ordered-digraph projection."""
    with open(path) as fh:
        lines = fh.readlines()
    first = next((ln for ln in lines if ln.strip() and not ln.startswith("#")), "")
    if first.startswith("pa "):
        return as_ordered_digraph(parse_pa(lines))
    from .digraph import parse_digraph

    return parse_digraph(lines)
