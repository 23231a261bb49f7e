"""Command-line entry point ``rcw``.

Every sampling subcommand writes a per-node CSV (to ``--out`` or stdout) and
a JSON summary (to ``<out>.summary.json`` or stderr).  Runs are fully
determined by their arguments and ``--seed``.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import distributions as D
from .exceptions import ConfigError, RCWError
from .grid_sampler import GridSampler
from .netfile import as_ring_network, network_from_description, parse_network
from .oracle_stats import relative_error, write_node_csv
from .overlay import OverlaySampler, success_rate_experiment
from .ring_sampler import HopPolicy, RingSampler
from .topology import GridSpec, RingNetwork, build_grid
from .tree_sampler import TreeSampler

SCHEMA = "rcw-experiment/1"
DEFAULT_BETAS = (15, 30, 45, 60, 75, 90, 150, 180, 360)
TREE_COLUMNS = ("node", "expected_p", "empirical_p", "rel_error")
EXIT_USAGE = 2
EXIT_VALUE = 3


# -- inputs ---------------------------------------------------------------

def _read_numbers(path, what):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {what} file: {exc}") from None
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{what} file must hold whitespace-separated numbers") from None


def _load_net(args):
    if getattr(args, "radius", None) is not None:
        return build_grid(GridSpec(args.radius)), {"type": "grid"}
    if args.net is None:
        raise ConfigError("a network is required (--net FILE)")
    if isinstance(args.net, dict):
        desc = {k: " ".join(map(str, v)) if isinstance(v, list) else str(v)
                for k, v in args.net.items() if k not in ("edges", "weights")}
        edges = args.net.get("edges", [])
        weights = {int(k): float(v) for k, v in dict(args.net.get("weights", {})).items()}
        return network_from_description(desc, edges, weights), desc
    try:
        text = Path(args.net).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read network file: {exc}") from None
    header, edges, weights = parse_network(text)
    return network_from_description(header, edges, weights), header


def _ring_net(args):
    net, header = _load_net(args)
    return as_ring_network(net, header)


def _distribution(args, net):
    spec = args.dist
    if isinstance(spec, (list, tuple)):
        return D.explicit(np.asarray(spec, dtype=float))
    if spec.lower() in ("uni", "uniform", "pid"):
        return D.from_spec(spec, net, p0=args.p0)
    return D.explicit(np.asarray(_read_numbers(spec, "distribution"), dtype=float))


def _policy(args, net):
    if args.policy is None:
        return None
    values = args.policy if isinstance(args.policy, list) else _read_numbers(args.policy, "policy")
    if len(values) == 1 and net.radius > 2:
        return HopPolicy.constant(values[0], net.radius)
    return HopPolicy(tuple(values))


# -- outputs --------------------------------------------------------------

def _emit(args, write_csv, summary):
    body = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(fh)
        summary_path = args.summary or f"{args.out}.summary.json"
        Path(summary_path).write_text(body)
    else:
        write_csv(sys.stdout)
        sys.stderr.write(body)


def _sampling_summary(kind, args, report, hops, limit, law=None):
    out = {
        "sampler": kind,
        "samples": int(args.samples),
        "seed": int(args.seed),
        "n_nodes": int(len(report.counts)),
        "mean_rel_error": report.mean_rel_error,
        "max_rel_error": report.max_rel_error,
        "chi2": report.chi2,
        "p_value": report.p_value,
        "mean_hops": float(hops.mean()) if hops.size else 0.0,
        "max_hops": int(hops.max()) if hops.size else 0,
        "hop_limit": int(limit),
    }
    if law is not None:
        out["oracle_max_abs_diff"] = float(np.max(np.abs(law.p - report.expected_p)))
    return out


def _run_ring_like(args, kind, sampler, net, limit, extra=None):
    nodes, hops = sampler.sample(args.samples, random_state=args.seed, return_hops=True)
    counts = np.bincount(nodes, minlength=len(net.ring_of))
    target = sampler.target_probabilities()
    report = relative_error(counts, target, seed=args.seed)
    law = sampler.exact_law() if not getattr(args, "force", False) else None
    summary = _sampling_summary(kind, args, report, hops, limit, law)
    if law is None:
        summary["oracle_ring_visit_spread"] = float(
            sampler.exact_law(check=False).ring_visit_spread())
    summary.update(extra or {})
    _emit(args, lambda fh: write_node_csv(fh, report, ring_of=net.ring_of), summary)


# -- subcommands ----------------------------------------------------------

def cmd_tree(args):
    net, _ = _load_net(args)
    if isinstance(net, RingNetwork):
        net = net.to_network()
    est = TreeSampler(exclude_source=args.exclude_source, source=args.source).fit(net)
    nodes, hops = est.sample(args.samples, random_state=args.seed, return_hops=True)
    target = est.target_probabilities()
    report = relative_error(np.bincount(nodes, minlength=net.n_nodes), target, seed=args.seed)
    summary = _sampling_summary("tree-excl" if args.exclude_source else "tree", args, report,
                                hops, est.diameter_, est.exact_law())
    summary.update(aggregation_messages=int(est.n_messages_),
                   aggregation_rounds=int(est.n_rounds_), tree_diameter=int(est.diameter_))
    _emit(args, lambda fh: write_node_csv(fh, report, columns=TREE_COLUMNS), summary)


def cmd_grid(args):
    net = _ring_net(args)
    if net.coords is None:
        raise ConfigError("the grid sampler needs a grid network (type = grid or --radius)")
    est = GridSampler(_distribution(args, net)).fit(net)
    _run_ring_like(args, "grid", est, net, net.radius)


def cmd_rings(args):
    net = _ring_net(args)
    est = RingSampler(_distribution(args, net), mode=args.mode, policy=_policy(args, net),
                      force=args.force, source_stay=args.source_stay).fit(net)
    extra = {"mode": args.mode, "force": bool(args.force)}
    if est.policy_ is not None:
        extra["policy"] = [float(s) for s in est.policy_[1:net.radius]]
    _run_ring_like(args, f"rings-{args.mode}", est, net, net.radius, extra)


def cmd_overlay(args):
    net = _ring_net(args)
    est = OverlaySampler(_distribution(args, net), aap_seed=args.aap_seed).fit(net)
    extra = {"aap_seed": int(args.aap_seed), "aap_messages": int(est.overlay_.messages),
             "aap_rounds": int(est.overlay_.rounds)}
    _run_ring_like(args, "overlay", est, net, net.radius, extra)


def cmd_aap(args):
    rows = success_rate_experiment(args.beta, args.trials, seed=args.seed, rings=args.rings,
                                   per_ring=args.per_ring, diagnostics=not args.no_diagnostics)

    def write(fh):
        fh.write("beta,success_rate\n")
        for row in rows:
            fh.write(f"{row['beta']:g},{row['success_rate']!r}\n")

    summary = {"rings": args.rings, "per_ring": args.per_ring, "trials": args.trials,
               "seed": args.seed, "rows": rows}
    _emit(args, write, summary)


def cmd_oracle(args):
    kind = args.sampler
    if kind in ("tree", "tree-excl"):
        net, _ = _load_net(args)
        if isinstance(net, RingNetwork):
            net = net.to_network()
        est = TreeSampler(exclude_source=kind == "tree-excl", source=args.source).fit(net)
        law, target, ring_of = est.exact_law(), est.target_probabilities(), None
    else:
        net = _ring_net(args)
        dist = _distribution(args, net)
        if kind == "grid":
            est = GridSampler(dist).fit(net)
        elif kind in ("rings-d1", "rings-d2"):
            est = RingSampler(dist, mode=kind[-2:], policy=_policy(args, net), force=args.force,
                              source_stay=args.source_stay).fit(net)
        elif kind == "overlay":
            est = OverlaySampler(dist, aap_seed=args.aap_seed).fit(net)
        else:
            raise ConfigError(f"unknown sampler {kind!r}")
        law = est.exact_law(check=False) if kind.startswith("rings") else est.exact_law()
        target, ring_of = est.target_probabilities(), net.ring_of
    diff = np.abs(law.p - target)

    def write(fh):
        fh.write("node,ring,oracle_p,target_p,abs_diff\n")
        for x in range(len(target)):
            ring = "" if ring_of is None else str(int(ring_of[x]))
            fh.write(f"{x},{ring},{float(law.p[x])!r},{float(target[x])!r},{float(diff[x])!r}\n")

    summary = {"sampler": kind, "n_nodes": int(len(target)), "total": law.total,
               "max_abs_diff": float(diff.max())}
    if ring_of is not None:
        summary["max_ring_visit_spread"] = float(law.ring_visit_spread())
    _emit(args, write, summary)


COMMANDS = {"tree": cmd_tree, "grid": cmd_grid, "rings": cmd_rings, "aap": cmd_aap,
            "overlay-sample": cmd_overlay, "oracle": cmd_oracle}
CONFIG_SAMPLERS = {"tree": "tree", "tree-excl": "tree", "grid": "grid", "rings-d1": "rings",
                   "rings-d2": "rings", "overlay": "overlay-sample", "aap": "aap"}


def cmd_experiment(args):
    """Run a JSON experiment config through the matching subcommand."""
    path = Path(args.config)
    try:
        cfg = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if cfg.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}, got {cfg.get('schema')!r}")
    kind = cfg.get("sampler")
    if kind not in CONFIG_SAMPLERS:
        raise ConfigError(f"'sampler' must be one of {', '.join(CONFIG_SAMPLERS)}")
    base = path.parent

    def resolve(p):
        return None if p is None else str(base / p)

    parser = build_parser()
    ns = parser.parse_args([CONFIG_SAMPLERS[kind]] + (["--net", "-"] if kind != "aap" else []))
    if kind != "aap":
        net = cfg.get("network", {})
        ns.net = resolve(net["file"]) if "file" in net else net
        ns.samples = int(cfg.get("samples", ns.samples))
    if hasattr(ns, "dist"):
        dist = cfg.get("distribution", {"kind": "uniform"})
        ns.dist = dist.get("p") if dist.get("kind") == "explicit" else dist.get("kind", "uniform")
        ns.p0 = float(dist.get("p0", 0.0))
    ns.seed = int(cfg.get("seed", ns.seed))
    out = cfg.get("output", {})
    ns.out, ns.summary = resolve(out.get("csv")), resolve(out.get("summary"))
    options = dict(cfg.get("options", {}))
    if kind == "tree-excl":
        ns.exclude_source = True
    if kind.startswith("rings-"):
        ns.mode = kind[-2:]
    for key, value in options.items():
        attr = key.replace("-", "_")
        if not hasattr(ns, attr):
            raise ConfigError(f"option {key!r} does not apply to sampler {kind!r}")
        if attr == "policy" and isinstance(value, str):
            value = resolve(value)
        setattr(ns, attr, value)
    return ns.func(ns)


def _common(p, samples=True):
    p.add_argument("--seed", type=int, default=0, help="root random seed (default 0)")
    if samples:
        p.add_argument("--samples", type=int, default=100_000, help="number of walks")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--summary", help="summary JSON path (default <out>.summary.json)")


def _dist_args(p):
    p.add_argument("--dist", default="uni", help="uni, pid or a file with p_0 .. p_R")
    p.add_argument("--p0", type=float, default=0.0, help="source mass for pid")


def build_parser():
    parser = argparse.ArgumentParser(prog="rcw", description="Random centrifugal walk node sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tree", help="weight-proportional sampling on any connected network")
    p.add_argument("--net", required=True, help="network description file")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--exclude-source", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("grid", help="distance-based sampling on a diamond grid")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", type=int)
    g.add_argument("--net")
    _dist_args(p)
    _common(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("rings", help="distance-based sampling on concentric rings")
    p.add_argument("--net", required=True)
    p.add_argument("--mode", choices=("d1", "d2"), default="d1")
    p.add_argument("--policy", help="file with s_1 .. s_{R-1} (or one constant)")
    p.add_argument("--force", action="store_true",
                   help="sample without uniform connectivity, using true ring sizes")
    p.add_argument("--source-stay", action="store_true",
                   help="let the source select itself in d2 mode")
    _dist_args(p)
    _common(p)
    p.set_defaults(func=cmd_rings)

    p = sub.add_parser("aap", help="attachment point assignment success rates")
    p.add_argument("--rings", type=int, default=100)
    p.add_argument("--per-ring", type=int, default=100)
    p.add_argument("--beta", type=float, nargs="+", default=list(DEFAULT_BETAS))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--no-diagnostics", action="store_true",
                   help="skip the degree-condition and matching diagnostics")
    _common(p, samples=False)
    p.set_defaults(func=cmd_aap)

    p = sub.add_parser("overlay-sample", help="sampling over an attachment point overlay")
    p.add_argument("--net", required=True)
    p.add_argument("--aap-seed", type=int, default=0)
    _dist_args(p)
    _common(p)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("oracle", help="exact selection law of a sampler")
    p.add_argument("--sampler", required=True,
                   choices=("tree", "tree-excl", "grid", "rings-d1", "rings-d2", "overlay"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", type=int)
    g.add_argument("--net")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--policy")
    p.add_argument("--force", action="store_true")
    p.add_argument("--source-stay", action="store_true")
    p.add_argument("--aap-seed", type=int, default=0)
    _dist_args(p)
    _common(p, samples=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", help=f"run a JSON config (schema {SCHEMA})")
    p.add_argument("config")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except RCWError as exc:
        print(f"rcw: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"rcw: error: {exc}", file=sys.stderr)
        return EXIT_VALUE
    return 0


if __name__ == "__main__":
    sys.exit(main())
