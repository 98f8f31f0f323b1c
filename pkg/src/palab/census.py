"""Order-respecting motif counts in PA graphs.

An embedding of a motif ``(G, sigma)`` into a host ``(X, rho)`` is an
injective vertex map ``f`` that sends every motif edge ``u -> v`` to a host
edge ``f(u) -> f(v)`` and satisfies ``sigma(u) < sigma(v) => rho(f(u)) < rho(f(v))``.
Parallel host edges count once unless ``weighted`` is set, in which case each
embedding is weighted by the product of the multiplicities of its image edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._parallel import parallel_map
from .digraph import OrderedDigraph
from .errors import BudgetExceeded, ParameterError
from .model import PAParams, as_ordered_digraph, generate, to_fraction
from .motif import Tau, paley_zygmund, predicted_scaling
from .seeding import derive_seed
from .witness import h0

MAX_MOTIF = 8

BUILTIN = {
    "edge": lambda: OrderedDigraph(2, [(1, 0)]),
    "cherry": lambda: OrderedDigraph(3, [(2, 0), (2, 1)]),
    "triangle": lambda: OrderedDigraph(3, [(1, 0), (2, 0), (2, 1)]),
    "c7": h0,
}


def builtin_motif(name: str) -> OrderedDigraph:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ParameterError(f"unknown builtin motif {name!r}; choose from {sorted(BUILTIN)}") from None


@dataclass(frozen=True)
class Plan:
    """Search order for one motif; step ``i`` places motif vertex ``order[i]``.

    Step ``i > 0`` draws candidates from the out-list (``anchor_dir`` 0) or
    in-list (1) of the image of step ``anchor[i]``. Extra edges to earlier
    steps are listed in ``check_*`` (dir 0: earlier -> new, 1: new -> earlier).
    ``lo_step``/``hi_step`` name the placed steps with the nearest lower and
    higher motif rank (-1 if none); requiring the image to fall strictly
    between their images enforces order agreement and injectivity at once.
    """

    size: int
    order: tuple[int, ...]
    root_lo: int
    root_hi: int
    anchor: list[int]
    anchor_dir: list[int]
    check_ptr: list[int]
    check_step: list[int]
    check_dir: list[int]
    lo_step: list[int]
    hi_step: list[int]
    min_out: list[int]
    min_in: list[int]
    in_expansions: int = 0


def _check_motif(motif: OrderedDigraph) -> OrderedDigraph:
    if motif.n < 1:
        raise ParameterError("motif must have at least one vertex")
    if motif.n > MAX_MOTIF:
        raise ParameterError(f"motif has {motif.n} vertices; exact counting is limited to {MAX_MOTIF}")
    if not motif.weakly_connected():
        raise ParameterError("motif must be weakly connected")
    return motif.relabel_by_rank()


def _greedy_order(motif: OrderedDigraph, root: int):
    k = motif.n
    outs = [set() for _ in range(k)]
    ins = [set() for _ in range(k)]
    for u, v in motif.edges():
        outs[u].add(v)
        ins[v].add(u)
    order = [root]
    placed = {root}
    step_of = {root: 0}
    anchors, dirs = [-1], [0]
    n_in = 0
    while len(order) < k:
        best = None
        for v in range(k):
            if v in placed:
                continue
            via_out = [step_of[u] for u in ins[v] if u in placed]  # placed u -> v: v in u's out-list
            via_in = [step_of[u] for u in outs[v] if u in placed]
            if not via_out and not via_in:
                continue
            links = len(via_out) + len(via_in)
            # out-expansions branch at most m ways; in-expansions can hit hubs
            score = (0 if via_out else 1, -links, -v)
            if best is None or score < best[0]:
                a, d = (min(via_out), 0) if via_out else (min(via_in), 1)
                best = (score, v, a, d)
        _, v, a, d = best
        n_in += d
        step_of[v] = len(order)
        order.append(v)
        placed.add(v)
        anchors.append(a)
        dirs.append(d)
    return order, anchors, dirs, n_in


def make_plan(motif: OrderedDigraph) -> Plan:
    """Search plan for a rank-labelled motif (vertex ids equal ranks)."""
    k = motif.n
    best = None
    for root in range(k - 1, -1, -1):  # ties go to the younger root
        cand = _greedy_order(motif, root)
        if best is None or cand[3] < best[3]:
            best = cand
    order, anchors, dirs, n_in = best
    outs = [set() for _ in range(k)]
    for u, v in motif.edges():
        outs[u].add(v)
    check_ptr, check_step, check_dir = [0, 0], [], []
    lo_step, hi_step = [-1], [-1]
    for i in range(1, k):
        v = order[i]
        a_vertex = order[anchors[i]]
        for j in range(i):
            u = order[j]
            if u == a_vertex:
                continue
            if v in outs[u]:
                check_step.append(j)
                check_dir.append(0)
            elif u in outs[v]:
                check_step.append(j)
                check_dir.append(1)
        check_ptr.append(len(check_step))
        lower = [j for j in range(i) if order[j] < v]
        upper = [j for j in range(i) if order[j] > v]
        lo_step.append(max(lower, key=lambda j: order[j]) if lower else -1)
        hi_step.append(min(upper, key=lambda j: order[j]) if upper else -1)
    dout = motif.out_degree.tolist()
    din = motif.in_degree.tolist()
    root = order[0]
    return Plan(
        size=k,
        order=tuple(order),
        root_lo=root,
        root_hi=-1,  # filled per host
        anchor=anchors,
        anchor_dir=dirs,
        check_ptr=check_ptr,
        check_step=check_step,
        check_dir=check_dir,
        lo_step=lo_step,
        hi_step=hi_step,
        min_out=[dout[v] for v in order],
        min_in=[din[v] for v in order],
        in_expansions=n_in,
    )


def _host_arrays(host: OrderedDigraph):
    h = host.relabel_by_rank()
    optr, oidx, ow = h.out_csr
    iptr, iidx, iw = h.in_csr
    return (h.n, optr, oidx, ow, iptr, iidx, iw)


def count_embeddings(host, motif: OrderedDigraph, budget: int | None = None, weighted: bool = False, backend=None) -> int:
    """Number of order-respecting embeddings of ``motif`` in ``host``.

    ``host`` is an :class:`OrderedDigraph` or a PA graph (birth order).
    ``budget`` caps the number of partial maps extended; when it runs out
    :class:`BudgetExceeded` is raised with the partial count attached.
    """
    if not isinstance(host, OrderedDigraph):
        host = as_ordered_digraph(host)
    m = _check_motif(motif)
    if budget is not None and budget < 0:
        raise ParameterError("budget must be non-negative")
    k = m.n
    if host.n < k:
        return 0
    plan = make_plan(m)
    root = plan.order[0]
    plan = Plan(**{**plan.__dict__, "root_lo": root, "root_hi": host.n - k + root})
    arrays = _host_arrays(host)
    kern = kernels.get_backend(backend)
    b = -1 if budget is None else int(budget)
    try:
        count, nodes, complete = kern.count_embeddings(arrays, plan, b, bool(weighted))
    except OverflowError:  # compiled counter is 64-bit; Python ints are not
        count, nodes, complete = kernels.get_backend("python").count_embeddings(arrays, plan, b, bool(weighted))
    if not complete:
        raise BudgetExceeded(f"embedding search exceeded {budget} nodes", partial=count, nodes=nodes)
    return int(count)


# experiments -------------------------------------------------------------

@dataclass(frozen=True)
class SeriesPoint:
    t: int
    mean: float
    std_error: float
    replicas: int


@dataclass(frozen=True)
class CensusResult:
    motif: str
    m: int
    delta: str
    seed: int
    counts: list[tuple[int, int, int]] = field(repr=False)  # (t, replica, count)
    series: list[SeriesPoint]
    fitted_slope: float
    predicted: tuple[str, int]

    def summary(self) -> dict:
        return {
            "motif": self.motif,
            "m": self.m,
            "delta": self.delta,
            "seed": self.seed,
            "fitted_slope": self.fitted_slope,
            "predicted_D": self.predicted[0],
            "predicted_log_power": self.predicted[1],
            "series": [p.__dict__ for p in self.series],
        }


def fit_slope(ts, means, log_power: int = 0) -> float:
    """OLS slope of log(mean / log(t)**log_power) against log(t)."""
    ts = np.asarray(ts, dtype=float)
    means = np.asarray(means, dtype=float)
    if len(ts) < 5:
        raise ParameterError("slope fits need at least 5 grid points")
    if np.any(ts <= 1) or np.any(means <= 0):
        raise ParameterError("slope fits need t > 1 and positive mean counts")
    x = np.log(ts)
    y = np.log(means) - log_power * np.log(x)
    return float(np.polyfit(x, y, 1)[0])


def _one_count(job):
    motif, m, delta, t, sd, weighted, backend = job
    g = generate(PAParams(m, delta, t, sd), backend=backend)
    return count_embeddings(as_ordered_digraph(g), motif, weighted=weighted, backend=backend)


def _replica_counts(motif, m, delta, t, seeds, weighted, backend, workers=1):
    return parallel_map(_one_count, [(motif, m, delta, t, sd, weighted, backend) for sd in seeds], workers)


def check_scaling_args(motif: OrderedDigraph, m, delta, ts, replicas):
    """Validate a scaling run; returns ``(delta, ts, D, log_power)``."""
    delta = to_fraction(delta)
    ts = [int(t) for t in ts]
    if len(ts) < 5:
        raise ParameterError("the slope fit needs at least 5 grid points")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ParameterError("t grid must be strictly increasing")
    if replicas < 1:
        raise ParameterError("replicas must be >= 1")
    D, logp = predicted_scaling(_check_motif(motif), Tau.from_model(m, delta), m=m)
    if D <= 0:
        raise ParameterError(f"predicted exponent D = {D} is not positive; counts do not grow")
    return delta, ts, D, logp


def scaling_experiment(
    motif,
    m: int,
    delta,
    ts,
    replicas: int,
    seed: int = 0,
    weighted: bool = False,
    backend=None,
    name: str | None = None,
    workers: int = 1,
) -> CensusResult:
    """Mean motif counts across a grid of ``t`` and the fitted growth exponent.

    Replica ``r`` at size ``t`` uses seed ``derive_seed(seed, t, r)``.
    """
    if isinstance(motif, str):
        name = name or motif
        motif = builtin_motif(motif)
    delta, ts, D, logp = check_scaling_args(motif, m, delta, ts, replicas)
    counts, series = [], []
    for t in ts:
        c = _replica_counts(motif, m, delta, t, [derive_seed(seed, t, r) for r in range(replicas)], weighted, backend, workers)
        counts.extend((t, r, x) for r, x in enumerate(c))
        arr = np.array(c, dtype=float)
        se = float(arr.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else float("nan")
        series.append(SeriesPoint(t, float(arr.mean()), se, replicas))
    slope = fit_slope(ts, [p.mean for p in series], logp)
    return CensusResult(
        name or "custom", m, str(delta), seed, counts, series, slope, (str(D), logp)
    )


@dataclass(frozen=True)
class MomentProbe:
    mean: float
    second_moment: float
    pz_bound: float | None  # None when every replica counted zero
    hit_frequency: float
    hit_std_error: float
    replicas: int

    @property
    def consistent(self) -> bool:
        """hit frequency >= PZ bound - 3 standard errors (vacuous when the bound is undefined)."""
        if self.pz_bound is None:
            return True
        return self.hit_frequency >= self.pz_bound - 3 * self.hit_std_error


def second_moment_probe(
    motif, params: PAParams, replicas: int, seed: int | None = None, backend=None, workers: int = 1
) -> MomentProbe:
    """Monte Carlo E[N], E[N^2], their Paley-Zygmund bound and the empirical P(N > 0)."""
    if isinstance(motif, str):
        motif = builtin_motif(motif)
    if replicas < 30:
        raise ParameterError("second-moment probes need at least 30 replicas")
    seed = params.seed if seed is None else seed
    c = np.array(
        _replica_counts(motif, params.m, params.delta, params.t,
                        [derive_seed(seed, params.t, r) for r in range(replicas)], False, backend, workers),
        dtype=float,
    )
    mean = float(c.mean())
    m2 = float((c * c).mean())
    hit = float(np.mean(c > 0))
    se = math.sqrt(hit * (1 - hit) / replicas)
    pz = None
    if mean > 0:
        pz = float(paley_zygmund(mean, max(m2, mean * mean)))
    return MomentProbe(mean, m2, pz, hit, se, replicas)
