"""Seeded experiments, their manifests, and replay.

Each run writes a JSON manifest before its outputs. The manifest hash covers
the experiment kind, parameters, seed and tool version (not the timestamp),
and every CSV output starts with a comment line naming its schema and that
hash. After the outputs are written their SHA-256 digests are added to the
manifest, which is what :func:`replay` compares against.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from ._parallel import parallel_map
from .census import builtin_motif, check_scaling_args, scaling_experiment
from .coloring import (
    chromatic_number,
    greedy_by_ordering,
    greedy_clique,
    is_bipartite,
    is_k_colorable,
    recursive_coloring,
    verify_h_lower_bound,
)
from .digraph import max_out_degree, parse_digraph
from .errors import ParameterError
from .model import PAParams, as_ordered_digraph, generate, to_fraction
from .motif import Tau, d_and_maximisers, dn_closed_form
from .seeding import check_seed, derive_seed
from .witness import build_h, build_sn, h0, witness_stats

MANIFEST_VERSION = 1
SCHEMAS = {"chi-experiment": "chi/1", "census": "census/1", "degree-tail": "tail/1"}


class ManifestError(ParameterError):
    """A manifest is malformed, tampered with, or from an incompatible version."""


# chromatic-number experiment ------------------------------------------------

@dataclass(frozen=True)
class ChiRow:
    t: int
    replica: int
    greedy_colors: int
    greedy_ok: bool
    status: str  # "yes" (chi = m+1), "no" (chi <= m) or "inconclusive"
    chi_lower: int
    chi_upper: int
    nodes: int


@dataclass(frozen=True)
class ChiSummary:
    t: int
    replicas: int
    decided: int
    fraction: float  # of decided samples with chi = m+1
    std_error: float
    greedy_pass: float


@dataclass
class ChiExperiment:
    m: int
    delta: Fraction
    seed: int
    rows: list[ChiRow]
    summary: list[ChiSummary]

    @property
    def greedy_always_ok(self) -> bool:
        return all(r.greedy_ok for r in self.rows)


def _chi_replica(job) -> ChiRow:
    m, delta, t, r, sd, budget, backend = job
    g = as_ordered_digraph(generate(PAParams(m, delta, t, sd), backend=backend))
    gc = greedy_by_ordering(g, backend=backend)
    ok = gc.proper and gc.num_colors <= m + 1
    if m == 2:
        # greedy gives chi <= 3, so chi = 3 exactly when an odd cycle exists
        odd = not is_bipartite(g).bipartite
        chi = 3 if odd else (2 if g.num_edges else 1)
        return ChiRow(t, r, gc.num_colors, ok, "yes" if odd else "no", chi, chi, 0)
    res = is_k_colorable(g, m, budget)
    clique = len(greedy_clique(g.undirected_adjacency()))
    if res.status == "no":
        return ChiRow(t, r, gc.num_colors, ok, "yes", m + 1, m + 1, res.nodes)
    if res.status == "yes":
        return ChiRow(t, r, gc.num_colors, ok, "no", min(clique, res.coloring.num_colors), res.coloring.num_colors, res.nodes)
    return ChiRow(t, r, gc.num_colors, ok, "inconclusive", clique, min(gc.num_colors, m + 1), res.nodes)


def _check_chi_args(m, delta, ts, replicas):
    if m == 1:
        raise ParameterError("m = 1 gives a tree, whose chromatic number is 2; nothing to measure")
    if m < 1:
        raise ParameterError("m must be >= 2")
    delta = to_fraction(delta)
    if not -m < delta < 0:
        raise ParameterError(f"delta must lie in (-m, 0) = ({-m}, 0), got {delta}")
    ts = [int(t) for t in ts]
    if not ts or any(t < 2 for t in ts):
        raise ParameterError("t values must be >= 2")
    if replicas < 1:
        raise ParameterError("replicas must be >= 1")
    return delta, ts


def chi_experiment(m: int, delta, ts, replicas: int, seed: int = 0, budget: int = 10**6, workers: int = 1, backend=None) -> ChiExperiment:
    """Fraction of samples of PA_t(m, delta) with chromatic number m+1 across a grid of t.

    m = 2 is decided exactly by bipartiteness; m >= 3 by refuting
    m-colourability within ``budget`` search nodes per sample.
    """
    delta, ts = _check_chi_args(m, delta, ts, replicas)
    check_seed(seed)
    jobs = [(m, delta, t, r, derive_seed(seed, t, r), budget, backend) for t in ts for r in range(replicas)]
    rows = parallel_map(_chi_replica, jobs, workers)
    summary = []
    for t in ts:
        rs = [x for x in rows if x.t == t]
        dec = [x for x in rs if x.status != "inconclusive"]
        p = sum(x.status == "yes" for x in dec) / len(dec) if dec else float("nan")
        se = math.sqrt(p * (1 - p) / len(dec)) if dec else float("nan")
        summary.append(ChiSummary(t, len(rs), len(dec), p, se, sum(x.greedy_ok for x in rs) / len(rs)))
    return ChiExperiment(m, delta, seed, rows, summary)


# degree tail -----------------------------------------------------------------

@dataclass(frozen=True)
class TailResult:
    tau: Fraction
    tau_hat: float
    ks: np.ndarray = field(repr=False)
    ccdf: np.ndarray = field(repr=False)


def _check_tail_args(m, delta, t, replicas, seed, kmin, kmax) -> PAParams:
    if not 1 <= kmin < kmax:
        raise ParameterError("need 1 <= kmin < kmax")
    if replicas < 1:
        raise ParameterError("replicas must be >= 1")
    return PAParams(m, delta, t, seed)


def degree_tail(m: int, delta, t: int, replicas: int, seed: int = 0, kmin: int = 20, kmax: int = 200, backend=None) -> TailResult:
    """Estimate tau from the slope of the pooled degree ccdf over ``[kmin, kmax]``.

    P(d >= k) decays like k**(1 - tau), so ``tau_hat = 1 - slope``.
    """
    params = _check_tail_args(m, delta, t, replicas, seed, kmin, kmax)
    degs = np.concatenate(
        [generate(params.with_seed(derive_seed(seed, t, r)), backend=backend).degrees for r in range(replicas)]
    )
    ks = np.arange(kmin, kmax + 1)
    counts = np.bincount(degs, minlength=kmax + 2)
    tail = np.cumsum(counts[::-1])[::-1]  # tail[k] = #{d >= k}
    ccdf = tail[ks] / len(degs)
    if np.any(ccdf <= 0):
        raise ParameterError(f"no vertex reaches degree {kmax}; lower kmax or raise t")
    slope = float(np.polyfit(np.log(ks), np.log(ccdf), 1)[0])
    return TailResult(params.tau, 1 - slope, ks, ccdf)


# witness pipeline ------------------------------------------------------------

@dataclass
class WitnessReport:
    m: int
    symbolic: bool
    steps: list[tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.steps)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "symbolic": self.symbolic,
            "passed": self.passed,
            "steps": [{"step": s, "passed": ok, "detail": d} for s, ok, d in self.steps],
        }


def witness_pipeline(m: int, n: int = 5, tau="5/2", cap: int = 10**6) -> WitnessReport:
    """Check the chain from H_{m-2} to a chromatic-number-(m+1) witness S_n(H_{m-2}).

    Explicit for m in {2, 3}; larger m only reports sizes and the claimed value.
    """
    if m < 2:
        raise ParameterError("witness digraphs exist for m >= 2")
    if n < 1:
        raise ParameterError("n must be >= 1")
    tau = Tau.of(tau)
    i = m - 2
    steps: list[tuple[str, bool, str]] = []
    if m >= 4:
        st = witness_stats(i, n)
        steps.append(
            (
                "sizes",
                True,
                f"|V(H_{i})| = {st.h_vertices}, |E(H_{i})| = {st.h_edges}; "
                f"|V(S_{n}(H_{i}))| = {st.vertex_count}, |E| = {st.edge_count}; claimed chi = {st.chromatic_number_claimed}",
            )
        )
        steps.append(("D_n", True, f"D_{n} = {dn_closed_form(st.h_vertices, n, tau)} at tau = {tau.value}"))
        return WitnessReport(m, True, steps)

    h = h0() if i == 0 else build_h(i, cap)
    steps.append((f"build H_{i}", True, f"{h.n} vertices, {h.num_edges} edges"))
    lb = verify_h_lower_bound(i)
    steps.append((f"H_{i} not {m}-colourable", lb.verified, "; ".join(f"{s}: {d}" for s, _, d in lb.steps)))
    if i == 0:
        up = is_k_colorable(h, m + 1)
        steps.append((f"H_{i} is {m + 1}-colourable", up.status == "yes", f"DSATUR, {up.nodes} nodes"))
    else:
        col = recursive_coloring(i)
        steps.append(
            (f"H_{i} is {m + 1}-colourable", col.proper and col.num_colors <= m + 1, f"recursive colouring with {col.num_colors} colours")
        )
    s = build_sn(h, n, cap)
    steps.append((f"build S_{n}(H_{i})", True, f"{s.n} vertices, {s.num_edges} edges"))
    g = greedy_by_ordering(s)
    steps.append(("greedy bound", g.proper and g.num_colors <= max_out_degree(s) + 1 <= m + 1,
                  f"greedy used {g.num_colors} colours, max out-degree {max_out_degree(s)}"))
    if s.n <= 2000:
        chi = chromatic_number(s)
        steps.append((f"chi(S_{n}(H_{i})) = {m + 1}", chi.chi == m + 1, f"exact solver: chi = {chi.chi}"))
    else:
        # S_n(H) contains H, so chi >= chi(H) = m+1; greedy gives the matching upper bound
        steps.append(
            (f"chi(S_{n}(H_{i})) = {m + 1}", lb.verified and g.num_colors <= m + 1,
             f"lower bound {m + 1} from the H_{i} subgraph, upper bound {g.num_colors} from greedy")
        )
    a = d_and_maximisers(s, tau)
    closed = dn_closed_form(h.n, n, tau)
    steps.append(("unique maximiser", a.maximisers == (h.n,), f"maximisers {list(a.maximisers)}"))
    steps.append(("D_n closed form", a.D == closed, f"D = {a.D}, closed form {closed} at tau = {tau.value}"))
    return WitnessReport(m, False, steps)


# manifests -------------------------------------------------------------------

def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def manifest_hash(kind: str, params: dict, seed: int, version: str) -> str:
    return hashlib.sha256(_canonical({"kind": kind, "params": params, "seed": seed, "version": version}).encode()).hexdigest()


def _csv(header: str, columns: list[str], rows) -> bytes:
    buf = io.StringIO()
    buf.write(header + "\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    return buf.getvalue().encode()


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _run_chi(params, seed, header):
    res = chi_experiment(params["m"], params["delta"], params["t"], params["replicas"], seed, params.get("budget", 10**6))
    rows = _csv(header, ["t", "replica", "greedy_colors", "greedy_ok", "status", "chi_lower", "chi_upper", "nodes"],
                ((r.t, r.replica, r.greedy_colors, r.greedy_ok, r.status, r.chi_lower, r.chi_upper, r.nodes) for r in res.rows))
    summ = _csv(header, ["t", "replicas", "decided", "fraction", "std_error", "greedy_pass"],
                ((s.t, s.replicas, s.decided, s.fraction, s.std_error, s.greedy_pass) for s in res.summary))
    return {"chi_samples.csv": rows, "chi_summary.csv": summ}, res


def _load_motif(source: str):
    if source.startswith("builtin:"):
        return builtin_motif(source.split(":", 1)[1]), source.split(":", 1)[1]
    if source in ("edge", "cherry", "triangle", "c7"):
        return builtin_motif(source), source
    with open(source) as fh:
        return parse_digraph(fh), os.path.basename(source)


def _run_census(params, seed, header):
    motif, name = _load_motif(params["motif"])
    res = scaling_experiment(motif, params["m"], params["delta"], params["t"], params["replicas"], seed, name=name)
    counts = _csv(header, ["t", "replica", "count"], res.counts)
    summary = res.summary()
    summary["manifest"] = header.split("manifest=")[1]
    return {"census_counts.csv": counts, "census_summary.json": (json.dumps(summary, indent=2, sort_keys=True) + "\n").encode()}, res


def _run_tail(params, seed, header):
    res = degree_tail(params["m"], params["delta"], params["t"], params["replicas"], seed, params.get("kmin", 20), params.get("kmax", 200))
    body = _csv(header, ["k", "ccdf"], zip(res.ks.tolist(), res.ccdf.tolist()))
    body += f"# tau_hat={res.tau_hat!r} tau={res.tau}\n".encode()
    return {"degree_tail.csv": body}, res


RUNNERS = {"chi-experiment": _run_chi, "census": _run_census, "degree-tail": _run_tail}


def _validate(kind, params, seed):
    """Raise ParameterError for arguments the runner would reject, before anything is written."""
    try:
        if kind == "chi-experiment":
            _check_chi_args(params["m"], params["delta"], params["t"], params["replicas"])
        elif kind == "census":
            motif, _ = _load_motif(params["motif"])
            check_scaling_args(motif, params["m"], params["delta"], params["t"], params["replicas"])
        else:
            _check_tail_args(params["m"], params["delta"], params["t"], params["replicas"], seed,
                             params.get("kmin", 20), params.get("kmax", 200))
    except KeyError as exc:
        raise ParameterError(f"{kind} needs parameter {exc.args[0]!r}") from None
    except OSError as exc:
        raise ParameterError(str(exc)) from None


def _normalise(kind, params):
    p = dict(params)
    if "delta" in p:
        p["delta"] = str(to_fraction(p["delta"]))
    if "t" in p:
        p["t"] = [int(x) for x in p["t"]] if isinstance(p["t"], (list, tuple)) else int(p["t"])
    return p


def _produce(kind, params, seed):
    if kind not in RUNNERS:
        raise ManifestError(f"unknown experiment kind {kind!r}")
    h = manifest_hash(kind, params, seed, __version__)
    header = f"# schema={SCHEMAS[kind]} manifest={h}"
    files, result = RUNNERS[kind](params, seed, header)
    return h, files, result


def run_experiment(kind: str, params: dict, seed: int, out_dir: str):
    """Run ``kind`` and write ``manifest.json`` plus its outputs into ``out_dir``.

    Returns ``(manifest dict, result object)``.
    """
    if kind not in RUNNERS:
        raise ParameterError(f"unknown experiment kind {kind!r}")
    params = _normalise(kind, params)
    check_seed(seed)
    _validate(kind, params, seed)
    os.makedirs(out_dir, exist_ok=True)
    h = manifest_hash(kind, params, seed, __version__)
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "kind": kind,
        "params": params,
        "seed": seed,
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "hash": h,
        "outputs": {},
    }
    mpath = os.path.join(out_dir, "manifest.json")
    _write_json(mpath, manifest)  # manifest first, outputs after
    _, files, result = _produce(kind, params, seed)
    for name, data in files.items():
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(data)
        manifest["outputs"][name] = hashlib.sha256(data).hexdigest()
    _write_json(mpath, manifest)
    return manifest, result


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: str) -> dict:
    try:
        with open(path) as fh:
            man = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from None
    required = {"manifest_version", "kind", "params", "seed", "version", "hash", "outputs"}
    if not isinstance(man, dict) or not required <= set(man):
        raise ManifestError(f"manifest {path} lacks fields {sorted(required - set(man or {}))}")
    if man["manifest_version"] != MANIFEST_VERSION:
        raise ManifestError(f"manifest format {man['manifest_version']} is not supported (expected {MANIFEST_VERSION})")
    if man["version"] != __version__:
        raise ManifestError(f"manifest was written by version {man['version']}, this is {__version__}")
    if man["kind"] not in RUNNERS:
        raise ManifestError(f"unknown experiment kind {man['kind']!r}")
    if not isinstance(man["params"], dict) or not isinstance(man["outputs"], dict):
        raise ManifestError("manifest params and outputs must be objects")
    try:
        check_seed(man["seed"])
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"bad seed in manifest: {exc}") from None
    return man


@dataclass
class ReplayReport:
    identical: bool
    files: dict  # name -> (recorded sha256, replayed sha256)
    hash_matches: bool = True  # False when the manifest was edited after the run


def replay(path: str, out_dir: str | None = None) -> ReplayReport:
    """Re-run a manifest and compare every output against its recorded digest.

    An edited manifest (for example a changed seed) still replays; its
    outputs then differ from the recorded digests and ``hash_matches`` is false.
    """
    man = load_manifest(path)
    hash_ok = manifest_hash(man["kind"], man["params"], man["seed"], man["version"]) == man["hash"]
    try:
        _, files, _ = _produce(man["kind"], man["params"], man["seed"])
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"manifest parameters are incomplete: {exc}") from None
    report = {}
    for name, data in files.items():
        report[name] = (man["outputs"].get(name), hashlib.sha256(data).hexdigest())
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, name), "wb") as fh:
                fh.write(data)
    same = set(report) == set(man["outputs"]) and all(a == b for a, b in report.values())
    return ReplayReport(same and hash_ok, report, hash_ok)
