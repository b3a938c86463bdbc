"""Command-line interface for the experiment harness.

Subcommands: sweep, rank-table, theorem2, pentagon, audit, jg-rank.
Flags override config-file fields; --seed is mandatory for experiment
commands. Outputs records.csv and summary.json under --out.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (ExperimentConfig, cmd_consensus_sweep, cmd_jg_rank,
                          cmd_pentagon_demo, cmd_rank_table,
                          cmd_stability_audit, cmd_theorem2_probe)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--seed", type=int, help="master seed (required)")
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--margin", type=float)
    p.add_argument("--slack", type=float)
    p.add_argument("--edge-prob", type=float, dest="edge_prob")
    p.add_argument("--graph", choices=["random", "complete", "ring", "er"])
    p.add_argument("--symmetric", action="store_true", default=None)
    p.add_argument("--out", help="output directory for records.csv / summary.json")


def _build_config(args) -> ExperimentConfig:
    overrides = {k: getattr(args, k, None) for k in
                 ("seed", "trials", "n", "d", "margin", "slack", "edge_prob",
                  "graph", "symmetric", "out")}
    if args.config:
        return ExperimentConfig.from_json(args.config, **overrides)
    clean = {k: v for k, v in overrides.items() if v is not None}
    if "seed" not in clean:
        raise SystemExit("--seed is required (directly or via --config)")
    return ExperimentConfig(**clean)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spherecon",
        description="Sphere-consensus iteration experiments with seeded, "
                    "reproducible outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("sweep", "random-trial consensus sweep of the plain iteration"),
        ("rank-table", "rank distribution of descent-mode limits (symmetric)"),
        ("theorem2", "non-symmetric descent probe: limits stay rank one"),
        ("audit", "instability certificates at d>=3 fixed points"),
        ("jg-rank", "parametric Jacobian rank checks at fixed points"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
    sub.choices["audit"].add_argument("--count", type=int, default=100)
    sub.choices["jg-rank"].add_argument("--count", type=int, default=50)
    p_pent = sub.add_parser("pentagon", help="pentagon fixed-point demo")
    p_pent.add_argument("--out")

    args = parser.parse_args(argv)

    if args.command == "pentagon":
        report = cmd_pentagon_demo(out=args.out)
        print(json.dumps(report, indent=2))
        return 0

    cfg = _build_config(args)
    if args.command == "sweep":
        _, summary = cmd_consensus_sweep(cfg)
    elif args.command == "rank-table":
        cfg.symmetric = True
        _, summary = cmd_rank_table(cfg)
    elif args.command == "theorem2":
        cfg.symmetric = False
        _, summary = cmd_theorem2_probe(cfg)
    elif args.command == "audit":
        cfg.symmetric = True
        summary = cmd_stability_audit(cfg, count=args.count)
    elif args.command == "jg-rank":
        cfg.symmetric = True
        summary = cmd_jg_rank(cfg, count=args.count)
    else:  # pragma: no cover
        raise SystemExit(f"unknown command {args.command}")

    slim = {k: v for k, v in summary.items()
            if k not in ("details", "reports", "counterexamples", "errors")}
    print(json.dumps(slim, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
