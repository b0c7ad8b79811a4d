"""Command-line entry point: experiment subcommands and output emission."""

from __future__ import annotations

import argparse
import dataclasses
import json
import pathlib
import sys

from .. import __version__
from .config import METHODS, ExperimentConfig, load_config
from .emit import emit, write_table
from .runners import run_heat, run_spde, run_toy

_SUBCOMMANDS = {
    "toy": "toy",
    "burgers": "burgers",
    "allen-cahn": "allen_cahn",
    "kdv": "kdv",
    "heat": "heat",
}


def _add_common_flags(p):
    p.add_argument("--config", type=str, default=None, help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--eps-os", dest="eps_os", type=float, default=None)
    p.add_argument("--eps-u", dest="eps_u", type=float, default=None)
    p.add_argument("--eps-l", dest="eps_l", type=float, default=None)
    p.add_argument("--method", type=str, default=None, choices=METHODS)
    p.add_argument("--out", dest="out_dir", type=str, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-final", dest="t_final", type=float, default=None)
    p.add_argument("--scheme", type=str, default=None, choices=("euler", "rk4"))
    p.add_argument("--decay", type=str, default=None, choices=("fast", "slow"))
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int, default=None)
    p.add_argument("--heat-nx", dest="heat_nx", type=int, default=None)
    p.add_argument("--heat-ny", dest="heat_ny", type=int, default=None)
    p.add_argument("--heat-dir", dest="heat_dir", type=str, default=None)
    p.add_argument("--paper-scale", dest="paper_scale", action="store_true", default=None)
    p.add_argument("--jsonl", action="store_true", help="also write metrics.jsonl")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curos",
        description="Cross-oversampled CUR experiments: rank sweeps, PDE runs, heat runs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        _add_common_flags(sub.add_parser(name))
    sub.add_parser("verify", help="run the built-in property checks")
    return parser


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg.experiment = _SUBCOMMANDS[args.command]
    field_names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key, value in vars(args).items():
        if key in field_names and value is not None:
            setattr(cfg, key, value)
    return cfg


def _write_outputs(cfg, result_records, singular_rows, mean_rows, jsonl):
    out = pathlib.Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit(result_records, "csv", out / "metrics.csv")
    if jsonl:
        emit(result_records, "jsonl", out / "metrics.jsonl")
    write_table(out / "singular_values.csv", ("t", "source", "index", "sigma"), singular_rows)
    write_table(out / "meanfield.csv", ("t", "coord", "mean", "std", "selected"), mean_rows)
    manifest = {
        "version": __version__,
        "config": dataclasses.asdict(cfg.resolved()),
    }
    (out / "run_manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        from .verify import run_verify

        failures = run_verify()
        return 1 if failures else 0

    cfg = _config_from_args(args)
    jsonl = bool(getattr(args, "jsonl", False))
    experiment = _SUBCOMMANDS[args.command]
    if experiment == "toy":
        records = run_toy(cfg)
        res = cfg.resolved()
        from ..models import ToySpec, toy_matrix
        import numpy as np

        sig = np.linalg.svd(
            toy_matrix(ToySpec(n=res.n, decay=res.decay, seed=res.seed)), compute_uv=False
        )
        singular_rows = [(0.0, "toy", i, float(v)) for i, v in enumerate(sig)]
        out = _write_outputs(cfg, records, singular_rows, [], jsonl)
    elif experiment == "heat":
        result = run_heat(cfg)
        out = _write_outputs(cfg, result.records, result.singular_rows, result.mean_rows, jsonl)
    else:
        result = run_spde(cfg)
        out = _write_outputs(cfg, result.records, result.singular_rows, result.mean_rows, jsonl)
    print(f"wrote {out}/metrics.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
