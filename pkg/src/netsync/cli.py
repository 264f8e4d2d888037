"""Command-line interface.

    netsync generate   --config FILE --out FILE [--seed S]
    netsync fim        --topology FILE --config FILE --out FILE
                       [--variant absolute|relative|extended] [--format dense|coo]
    netsync bounds     --topology FILE --config FILE --out FILE
    netsync cdi        --topology FILE --config FILE --out FILE
                       [--method exact|series|walk] [--agent I] [--walks N] [--tol T] [--seed S]
    netsync lattice-cdi --config FILE --out FILE
    netsync simulate   --topology FILE --config FILE --out FILE [--trials N] [--seed S]
    netsync experiment ID --config FILE --out DIR [--seed S] [--jobs K]
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bound_report
from .cdi import cdi_exact, cdi_random_walk, cdi_series
from .config import (
    experiment_from_config,
    link_from_config,
    load_config,
    priors_from_config,
    topology_from_config,
)
from .errors import SynchronizabilityError
from .experiments import EXPERIMENT_IDS, run_experiment
from .fim import (
    build_absolute_fim,
    build_extended_fim,
    build_relative_fim,
    build_transition_matrix,
    write_matrix_csv,
)
from .lattice import infinite_lattice_cdi_asymptotic, infinite_lattice_cdi_numerical
from .simulate import map_mse_study
from .topology import read_topology_csv, write_topology_csv


def _cmd_generate(args) -> int:
    cfg = load_config(args.config)
    topo = topology_from_config(cfg, seed=args.seed)
    write_topology_csv(topo, args.out)
    print(f"wrote {topo.n_agents} agents, {topo.n_references} references -> {args.out}")
    return 0


def _cmd_fim(args) -> int:
    cfg = load_config(args.config)
    link = link_from_config(cfg)
    topo = read_topology_csv(args.topology)
    priors = priors_from_config(cfg, topo, link)
    if args.variant == "absolute":
        fim = build_absolute_fim(topo, priors, link)
    elif args.variant == "relative":
        fim = build_relative_fim(topo, link)
    else:
        fim = build_extended_fim(topo, priors, link)
    write_matrix_csv(fim, args.out, fmt=args.format)
    print(f"wrote {fim.variant} FIM ({fim.n}x{fim.n}, {args.format}) -> {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    link = link_from_config(cfg)
    topo = read_topology_csv(args.topology)
    priors = priors_from_config(cfg, topo, link)
    report = bound_report(topo, priors, link)
    with Path(args.out).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "aseb", "rseb", "methods", "max_method_deviation"])
        for i, s in enumerate(report.aseb):
            writer.writerow([i, repr(float(s)), "", "", ""])
        writer.writerow([
            "summary",
            "",
            "" if report.rseb is None else repr(report.rseb),
            "direct,cdi" + ("" if report.rseb is None else "|pseudo,z,rel-cdi"),
            repr(max(report.aseb_method_deviation, report.rseb_method_deviation or 0.0)),
        ])
    print(f"wrote bounds for {topo.n_agents} agents -> {args.out}")
    return 0


def _cmd_cdi(args) -> int:
    cfg = load_config(args.config)
    link = link_from_config(cfg)
    topo = read_topology_csv(args.topology)
    priors = priors_from_config(cfg, topo, link)
    rows: list[list] = []
    if args.method == "walk":
        agents = [args.agent] if args.agent is not None else range(topo.n_agents)
        for i in agents:
            rep = cdi_random_walk(topo, priors, int(i), n_walks=args.walks, seed=args.seed)
            rows.append([i, repr(float(rep.delta)), "walk", repr(rep.stderr), repr(rep.tail_bound)])
    else:
        transition = build_transition_matrix(build_absolute_fim(topo, priors, link))
        if args.method == "exact":
            delta = cdi_exact(transition)
            rows = [[i, repr(float(d)), "exact", "", ""] for i, d in enumerate(delta)]
        else:
            rep = cdi_series(transition, tol=args.tol)
            rows = [
                [i, repr(float(d)), "series", "", repr(rep.tail_bound)]
                for i, d in enumerate(rep.delta)
            ]
    with Path(args.out).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "delta", "method", "stderr", "tail_bound"])
        writer.writerows(rows)
    print(f"wrote CDI ({args.method}) -> {args.out}")
    return 0


def _cmd_lattice_cdi(args) -> int:
    cfg = load_config(args.config)
    section = "lattice-cdi"
    r_grid = cfg.get_floats(section, "r_max")
    np_grid = cfg.get_floats(section, "n_p")
    tol = cfg.get_float(section, "rel_err_tol", "1e-3")
    with Path(args.out).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r_max", "n_p", "method", "value", "truncation_n", "tail_bound"])
        for n_p in np_grid:
            for r in r_grid:
                res = infinite_lattice_cdi_numerical(r, n_p, rel_err_tol=tol)
                writer.writerow([r, n_p, "numerical", repr(res.value), res.truncation_n, repr(res.tail)])
                for form in ("full", "simplified"):
                    val = infinite_lattice_cdi_asymptotic(n_p, r_max=r, form=form)
                    writer.writerow([r, n_p, f"asymptotic-{form}", repr(val), "", ""])
    print(f"wrote infinite-lattice CDI grid -> {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    link = link_from_config(cfg)
    topo = read_topology_csv(args.topology)
    priors = priors_from_config(cfg, topo, link)
    study = map_mse_study(topo, priors, link, n_trials=args.trials, seed=args.seed)
    with Path(args.out).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "empirical_mse", "aseb", "ratio", "mse_stderr"])
        for i in range(topo.n_agents):
            writer.writerow([
                i,
                repr(float(study.mse[i])),
                repr(float(study.aseb[i])),
                repr(float(study.ratio[i])),
                repr(float(study.mse_stderr[i])),
            ])
        writer.writerow([
            "summary",
            repr(float(study.mse.mean())),
            repr(float(study.aseb.mean())),
            repr(float(study.mse.mean() / study.aseb.mean())),
            "",
        ])
    print(
        f"simulated {args.trials} trials on {topo.n_agents} agents; "
        f"max |ratio-1| = {float(np.max(np.abs(study.ratio - 1))):.4f} -> {args.out}"
    )
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    config = experiment_from_config(cfg, args.id, out_dir=args.out, seed=args.seed, jobs=args.jobs)
    result = run_experiment(args.id, config)
    print(f"experiment {args.id}: {len(result.rows)} rows -> {result.path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netsync",
        description="Performance limits for cooperative clock synchronization",
    )
    parser.add_argument("--version", action="version", version=f"netsync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a topology CSV from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("fim", help="dump an information matrix as CSV")
    p.add_argument("--topology", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--variant", choices=("absolute", "relative", "extended"), default="absolute")
    p.add_argument("--format", choices=("dense", "coo"), default="dense")
    p.set_defaults(func=_cmd_fim)

    p = sub.add_parser("bounds", help="per-agent bounds plus a summary row")
    p.add_argument("--topology", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("cdi", help="per-agent cooperative dilution intensity")
    p.add_argument("--topology", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=("exact", "series", "walk"), default="exact")
    p.add_argument("--agent", type=int, default=None)
    p.add_argument("--walks", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_cdi)

    p = sub.add_parser("lattice-cdi", help="infinite-lattice CDI over a parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_lattice_cdi)

    p = sub.add_parser("simulate", help="Monte Carlo bound-tightness study")
    p.add_argument("--topology", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("experiment", help="run a registered experiment")
    p.add_argument("id", choices=EXPERIMENT_IDS)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SynchronizabilityError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
