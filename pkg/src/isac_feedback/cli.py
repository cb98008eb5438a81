"""Command-line interface.

Subcommands: design (run the designer once and dump matrix + trace),
fig2 / fig3 (Monte Carlo sweeps to CSV), trial (debug a single trial).
ISAC_FEEDBACK_SEED and ISAC_FEEDBACK_THREADS override the config seed and
worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import designer, harness
from .scenario import SystemConfig, make_grid, make_population
from .numerics import substream


def _load_cfg(path: str) -> SystemConfig:
    cfg = SystemConfig.load(path)
    seed_env = os.environ.get("ISAC_FEEDBACK_SEED")
    if seed_env is not None:
        cfg = dataclasses.replace(cfg, seed=int(seed_env))
    return cfg


def _threads() -> int:
    env = os.environ.get("ISAC_FEEDBACK_THREADS")
    if env is not None:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _int_list(text: str) -> list:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_design(args) -> int:
    cfg = _load_cfg(args.config)
    pop = make_population(cfg, substream(cfg.seed, args.trial_index, "population"))
    grid = make_grid(cfg)
    fb, trace = designer.design_feedback(cfg, pop, grid)
    doc = {
        "config": cfg.to_json_dict(),
        "config_hash": cfg.config_hash(),
        "codebook_seed": cfg.codebook_seed,
        "init_sign": cfg.init_sign,
        "trial_index": args.trial_index,
        "power_budget": fb.power_budget,
        "frobenius_sq": fb.frobenius_sq,
        "v_re": fb.v.real.tolist(),
        "v_im": fb.v.imag.tolist(),
        "trace": trace.to_records(),
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    print(f"wrote design to {args.out} "
          f"(final e_c={trace.steps[-1].e_c:.6g}, e_s={trace.steps[-1].e_s:.6g})")
    return 0


def cmd_fig2(args) -> int:
    cfg = _load_cfg(args.config)
    results = harness.run_fig2(cfg, _int_list(args.k_list), _int_list(args.l_list),
                               args.trials, n_threads=_threads())
    harness.write_fig2_csv(cfg, results, args.out)
    print(f"wrote {len(results)} rows to {args.out}")
    return 0


def cmd_fig3(args) -> int:
    cfg = _load_cfg(args.config)
    results = harness.run_fig3(cfg, _float_list(args.mu_list), _int_list(args.l_list),
                               args.trials, n_threads=_threads())
    harness.write_fig3_csv(cfg, results, args.out)
    print(f"wrote {len(results)} rows to {args.out}")
    return 0


def cmd_trial(args) -> int:
    cfg = _load_cfg(args.config)
    metrics = harness.run_trial(cfg, args.index, method=args.method)
    json.dump(metrics.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isac-feedback",
                                     description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the feedback design once, dump matrix and trace")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trial-index", type=int, default=0)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("fig2", help="proposed vs baseline detection error over (K, L)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k-list", default="25,50")
    p.add_argument("--l-list", default="16,32,64")
    p.add_argument("--trials", type=int, default=500)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="communication/sensing Pareto sweep over (mu, L)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mu-list", default="0,0.25,0.5,0.75,1")
    p.add_argument("--l-list", default="16,32,64")
    p.add_argument("--trials", type=int, default=500)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("trial", help="run and print a single trial")
    p.add_argument("--config", required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--method", choices=harness.METHODS, default="pgd")
    p.set_defaults(func=cmd_trial)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
