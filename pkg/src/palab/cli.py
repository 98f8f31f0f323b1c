"""Command-line entry point.

Exit codes: 0 success, 1 parameter error, 2 budget-inconclusive result,
3 internal assertion failure (including a failed verification or replay).

``--config FILE`` reads ``key=value`` lines (``#`` starts a comment) that
become defaults for the chosen subcommand; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import AssumptionError, BudgetExceeded, FeasibilityError, OrderingError, ParameterError

EXIT_OK, EXIT_PARAM, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3


class _Inconclusive(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ParameterError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _int_list(s):
    if isinstance(s, (list, tuple)):
        return [int(x) for x in s]
    return [int(float(x)) for x in str(s).replace(" ", "").split(",") if x]


# subcommand handlers ----------------------------------------------------------

def cmd_generate(args):
    from .digraph import write_digraph
    from .model import PAParams, as_ordered_digraph, generate, write_pa

    _need(args, "m", "delta", "t")
    g = generate(PAParams(args.m, args.delta, args.t, args.seed), backend=args.backend)
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.format == "digraph":
            write_digraph(as_ordered_digraph(g), fh)
        else:
            write_pa(g, fh)
    finally:
        if args.out:
            fh.close()


def cmd_witness(args):
    from .digraph import write_digraph
    from .experiments import witness_pipeline
    from .witness import build_h, build_sn, witness_stats

    if args.action == "build":
        _need(args, "i")
        g = build_sn(build_h(args.i, args.cap), args.n, args.cap)
        fh = open(args.out, "w") if args.out else sys.stdout
        try:
            write_digraph(g, fh)
        finally:
            if args.out:
                fh.close()
    elif args.action == "stats":
        _need(args, "i")
        _emit(witness_stats(args.i, args.n).__dict__)
    else:
        _need(args, "m")
        rep = witness_pipeline(args.m, args.n, args.tau)
        _emit(rep.to_json())
        if not rep.passed:
            raise AssertionError("witness pipeline step failed")


def cmd_color(args):
    from .coloring import chromatic_number, greedy_by_ordering, is_bipartite, is_k_colorable
    from .model import read_graph

    _need(args, "graph")
    g = read_graph(args.graph)
    out: dict = {"mode": args.mode, "vertices": g.n}
    if args.mode == "greedy":
        c = greedy_by_ordering(g)
        out.update(chi_upper=c.num_colors, proper=c.proper, colors=c.colors.tolist(), nodes_expanded=0)
    elif args.mode == "bipartite":
        b = is_bipartite(g)
        out["bipartite"] = b.bipartite
        out["certificate"] = {"sides": b.sides.tolist()} if b.bipartite else {"odd_cycle": b.odd_cycle}
    elif args.k is not None:
        r = is_k_colorable(g, args.k, args.budget)
        out.update(k=args.k, status=r.status, nodes_expanded=r.nodes)
        if r.coloring is not None:
            out["colors"] = r.coloring.colors.tolist()
        _emit(out)
        if r.status == "inconclusive":
            raise _Inconclusive
        return
    else:
        r = chromatic_number(g, args.budget)
        out.update(nodes_expanded=r.nodes_expanded, colors=r.coloring.colors.tolist() if r.coloring else None)
        if r.exact:
            out["chi"] = r.chi
        else:
            out["bracket"] = [r.lower, r.upper]
        _emit(out)
        if not r.exact:
            raise _Inconclusive
        return
    _emit(out)


def cmd_motif(args):
    from collections import Counter

    from .model import read_graph
    from .motif import d_and_maximisers, union_catalog

    if args.action == "analyze":
        _need(args, "graph", "tau")
        _emit(d_and_maximisers(read_graph(args.graph), args.tau).to_json())
    else:
        _need(args, "tau")
        cat = union_catalog(args.n, args.tau)
        eq = [c for c in cat if c.analysis.equality_with_2Dn]
        ok = all(c.analysis.bound_holds for c in cat) and all(c.extremal_construction for c in eq)
        _emit(
            {
                "n": args.n,
                "tau": str(args.tau),
                "unions": len(cat),
                "equality": len(eq),
                "bound_holds": all(c.analysis.bound_holds for c in cat),
                "equality_only_on_construction": all(c.extremal_construction for c in eq),
                "by_variant": dict(Counter(c.variant for c in cat)),
            }
        )
        if not ok:
            raise AssertionError("union catalog violates the D_hat <= 2 D_n characterization")


def _census_grid(args):
    if args.t is not None:
        return _int_list(args.t)
    _need(args, "tmin", "tmax")
    if args.tmin < 2 or args.tmax <= args.tmin:
        raise ParameterError("need 2 <= tmin < tmax")
    grid = np.unique(np.round(np.geomspace(args.tmin, args.tmax, args.points)).astype(int))
    return grid.tolist()


def cmd_census(args):
    from .census import second_moment_probe
    from .experiments import _load_motif, run_experiment
    from .model import PAParams

    _need(args, "motif", "m", "delta")
    if args.action == "run":
        params = {
            "motif": args.motif,
            "m": args.m,
            "delta": args.delta,
            "t": _census_grid(args),
            "replicas": args.replicas,
        }
        man, res = run_experiment("census", params, args.seed, args.out_dir)
        _emit({**res.summary(), "manifest": os.path.join(args.out_dir, "manifest.json")})
    else:
        _need(args, "t")
        motif, _ = _load_motif(args.motif)
        t = _int_list(args.t)
        if len(t) != 1:
            raise ParameterError("probe takes a single --t")
        p = second_moment_probe(motif, PAParams(args.m, args.delta, t[0], args.seed), args.replicas)
        _emit({**p.__dict__, "consistent": p.consistent, "bound": p.pz_bound if p.pz_bound is not None else "bound undefined"})


def cmd_chi(args):
    from .experiments import run_experiment

    _need(args, "m", "delta", "t")
    params = {"m": args.m, "delta": args.delta, "t": _int_list(args.t), "replicas": args.replicas, "budget": args.budget}
    man, res = run_experiment("chi-experiment", params, args.seed, args.out_dir)
    _emit(
        {
            "manifest": os.path.join(args.out_dir, "manifest.json"),
            "greedy_always_ok": res.greedy_always_ok,
            "summary": [s.__dict__ for s in res.summary],
        }
    )
    if not res.greedy_always_ok:
        raise AssertionError("greedy colouring exceeded m+1 colours")
    if any(s.decided < s.replicas for s in res.summary):
        raise _Inconclusive


def cmd_tail(args):
    from .experiments import run_experiment

    _need(args, "m", "delta", "t")
    params = {"m": args.m, "delta": args.delta, "t": int(args.t), "replicas": args.replicas, "kmin": args.kmin, "kmax": args.kmax}
    man, res = run_experiment("degree-tail", params, args.seed, args.out_dir)
    _emit({"tau": str(res.tau), "tau_hat": res.tau_hat, "manifest": os.path.join(args.out_dir, "manifest.json")})


def cmd_replay(args):
    from .experiments import replay

    _need(args, "manifest")
    rep = replay(args.manifest, args.out_dir)
    _emit({"identical": rep.identical, "hash_matches": rep.hash_matches, "files": rep.files})
    if not rep.identical:
        raise AssertionError("replayed outputs differ from the recorded ones")


# parser -------------------------------------------------------------------------

def _fraction(s):
    from .model import to_fraction

    return to_fraction(s)


def build_parser():
    p = _ArgParser(prog="palab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"palab {__version__}")
    p.add_argument("--config", help="key=value file supplying defaults")
    sub = p.add_subparsers(dest="command", parser_class=_ArgParser)
    leaves = {}

    g = sub.add_parser("generate", help="sample PA_t(m, delta)")
    g.add_argument("--m", type=int)
    g.add_argument("--delta", type=_fraction)
    g.add_argument("--t", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=["pa", "digraph"], default="pa")
    g.add_argument("--backend", choices=["cython", "python"])
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)
    leaves["generate"] = g

    w = sub.add_parser("witness", help="witness digraphs H_i and S_n(H_i)")
    wsub = w.add_subparsers(dest="action", parser_class=_ArgParser, required=True)
    wb = wsub.add_parser("build")
    wb.add_argument("--i", type=int)
    wb.add_argument("--n", type=int, default=0)
    wb.add_argument("--cap", type=int, default=10**6)
    wb.add_argument("--out")
    ws = wsub.add_parser("stats")
    ws.add_argument("--i", type=int)
    ws.add_argument("--n", type=int, default=0)
    wp = wsub.add_parser("pipeline")
    wp.add_argument("--m", type=int)
    wp.add_argument("--n", type=int, default=5)
    wp.add_argument("--tau", type=_fraction, default=Fraction(5, 2))
    for x in (wb, ws, wp):
        x.set_defaults(func=cmd_witness)
    leaves.update({"witness build": wb, "witness stats": ws, "witness pipeline": wp})

    c = sub.add_parser("color", help="colour a graph file")
    c.add_argument("--graph")
    c.add_argument("--mode", choices=["greedy", "exact", "bipartite"], default="exact")
    c.add_argument("--k", type=int)
    c.add_argument("--budget", type=int)
    c.set_defaults(func=cmd_color)
    leaves["color"] = c

    mo = sub.add_parser("motif", help="exact motif analytics")
    msub = mo.add_subparsers(dest="action", parser_class=_ArgParser, required=True)
    ma = msub.add_parser("analyze")
    ma.add_argument("--graph")
    ma.add_argument("--tau", type=_fraction)
    mc = msub.add_parser("catalog")
    mc.add_argument("--n", type=int, default=5)
    mc.add_argument("--tau", type=_fraction, default=Fraction(5, 2))
    for x in (ma, mc):
        x.set_defaults(func=cmd_motif)
    leaves.update({"motif analyze": ma, "motif catalog": mc})

    ce = sub.add_parser("census", help="motif counts in PA graphs")
    csub = ce.add_subparsers(dest="action", parser_class=_ArgParser, required=True)
    cr = csub.add_parser("run")
    cpr = csub.add_parser("probe")
    for x in (cr, cpr):
        x.add_argument("--motif", help="digraph file or builtin:edge|cherry|triangle|c7")
        x.add_argument("--m", type=int)
        x.add_argument("--delta", type=_fraction)
        x.add_argument("--t", help="comma-separated t values")
        x.add_argument("--replicas", type=int, default=50)
        x.add_argument("--seed", type=int, default=0)
        x.set_defaults(func=cmd_census)
    cr.add_argument("--tmin", type=int)
    cr.add_argument("--tmax", type=int)
    cr.add_argument("--points", type=int, default=5)
    cr.add_argument("--out-dir", default="census_out")
    leaves.update({"census run": cr, "census probe": cpr})

    ch = sub.add_parser("chi-experiment", help="chromatic number of PA samples across t")
    ch.add_argument("--m", type=int)
    ch.add_argument("--delta", type=_fraction)
    ch.add_argument("--t", help="comma-separated t values")
    ch.add_argument("--replicas", type=int, default=200)
    ch.add_argument("--seed", type=int, default=0)
    ch.add_argument("--budget", type=int, default=10**6)
    ch.add_argument("--out-dir", default="chi_out")
    ch.set_defaults(func=cmd_chi)
    leaves["chi-experiment"] = ch

    dt = sub.add_parser("degree-tail", help="fit the degree tail exponent")
    dt.add_argument("--m", type=int)
    dt.add_argument("--delta", type=_fraction)
    dt.add_argument("--t", type=int)
    dt.add_argument("--replicas", type=int, default=20)
    dt.add_argument("--seed", type=int, default=0)
    dt.add_argument("--kmin", type=int, default=20)
    dt.add_argument("--kmax", type=int, default=200)
    dt.add_argument("--out-dir", default="tail_out")
    dt.set_defaults(func=cmd_tail)
    leaves["degree-tail"] = dt

    r = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    r.add_argument("--manifest")
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_replay)
    leaves["replay"] = r
    for name, leaf in leaves.items():
        leaf.set_defaults(leaf=name)
    return p, leaves


def read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from None
    for no, ln in enumerate(lines, 1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise ParameterError(f"{path}:{no}: expected key=value")
        k, v = ln.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _apply_config(leaves, cfg):
    # string defaults go through each option's type only when that subcommand runs
    known = set()
    for name, parser in leaves.items():
        dests = {a.dest for a in parser._actions} - {"help", "func"}
        hits = {k: v for k, v in cfg.items() if k in dests}
        known.update(hits)
        parser.set_defaults(**hits)
    unknown = set(cfg) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {', '.join(sorted(unknown))}")


def _check_choices(leaf, args):
    for a in leaf._actions:
        if a.choices is not None and a.dest != "action" and getattr(args, a.dest, None) not in (None, *a.choices):
            raise ParameterError(f"--{a.dest.replace('_', '-')} must be one of {list(a.choices)}")


def _join_negative(argv):
    """Let ``--delta -1/2`` through: argparse would read ``-1/2`` as an option."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--") and "=" not in a and i + 1 < len(argv) and argv[i + 1][:1] == "-" and argv[i + 1][1:2].isdigit():
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser, leaves = build_parser()
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(leaves, read_config(known.config))
        args = parser.parse_args(_join_negative(argv))
        if not getattr(args, "func", None):
            parser.print_help(sys.stderr)
            return EXIT_PARAM
        _check_choices(leaves[args.leaf], args)
        args.func(args)
        return EXIT_OK
    except (ParameterError, OrderingError, FeasibilityError, AssumptionError, ValueError) as exc:
        print(f"palab: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"palab: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except BudgetExceeded as exc:
        print(f"palab: inconclusive: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except _Inconclusive:
        print("palab: inconclusive within the given budget", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"palab: assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
