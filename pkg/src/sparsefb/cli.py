"""Command-line front end.

``sparsefb demo NAME`` runs one of the built-in benchmark plants,
``sparsefb solve PLANT_FILE`` runs a plant read from a matrix file and
``sparsefb rerun MANIFEST`` repeats a previous run from its manifest.

Every run writes into ``--out`` (default ``$SPARSEFB_OUT`` or
``sparsefb-out``): ``manifest.json``, ``plant.txt``, ``records.jsonl``,
``tradeoff.csv``, ``patterns/NNN.txt`` and ``gains/NNN.txt``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .admm import AdmmOptions
from .errors import PlantFileError, SparseFBError, SynthesisError
from .fileio import (atomic_write, format_matrices, format_pattern, format_plant,
                     format_records, format_tradeoff_csv, parse_plant)
from .model import CARDINALITY, SUM_OF_LOGS, WEIGHTED_L1, BlockPartition, PenaltySpec
from .path import PathOptions, run_path
from .problems import biochemical, mass_spring, random_network

log = logging.getLogger("sparsefb")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4

PENALTIES = {
    "wl1": (WEIGHTED_L1, False), "card": (CARDINALITY, False), "slog": (SUM_OF_LOGS, False),
    "blk-wl1": (WEIGHTED_L1, True), "blk-card": (CARDINALITY, True),
    "blk-slog": (SUM_OF_LOGS, True),
}

# size, seed, gamma grid (min, max, steps), penalty, optional ADMM iteration cap
DEMOS = {
    "mass-spring": dict(n=50, seed=None, grid=(1e-4, 1e-1, 50), penalty="wl1"),
    # ADMM converges linearly on this plant; the cap keeps a run near 15 min
    "network": dict(n=100, seed=0, grid=(1.0, 5.6, 4), penalty="wl1", max_iter=200),
    # logspace(-1, 1, 50) cut at gamma <= 4
    "biochem": dict(n=5, seed=None, grid=(0.1, 10 ** (-1 + 78 / 49), 40), penalty="blk-wl1"),
}


class UsageError(Exception):
    pass


def _parse_sizes(text):
    try:
        sizes = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad block sizes {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError(f"bad block sizes {text!r}")
    return sizes


def parse_blocks(text: str, shape) -> BlockPartition:
    """``RxC`` gives uniform ``R x C`` blocks; ``r1,r2,...xc1,c2,...`` lists
    the sizes explicitly."""
    if "x" not in text:
        raise UsageError("--blocks must look like ROWSxCOLS")
    rows, cols = (_parse_sizes(t) for t in text.split("x", 1))
    m, n = shape
    if len(rows) == 1 and rows[0] != m:
        if m % rows[0]:
            raise UsageError(f"row block size {rows[0]} does not divide {m}")
        rows = rows * (m // rows[0])
    if len(cols) == 1 and cols[0] != n:
        if n % cols[0]:
            raise UsageError(f"column block size {cols[0]} does not divide {n}")
        cols = cols * (n // cols[0])
    try:
        part = BlockPartition(rows, cols)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if part.shape != tuple(shape):
        raise UsageError(f"blocks cover {part.shape}, gain is {tuple(shape)}")
    return part


def _grid(args, default):
    if args.gamma is not None:
        vals = sorted({float(g) for g in args.gamma})
        if any(g < 0 for g in vals):
            raise UsageError("gamma values must be nonnegative")
        return [g for g in vals if g > 0]     # gamma = 0 is the base record
    lo, hi, steps = default
    lo = args.gamma_min if args.gamma_min is not None else lo
    hi = args.gamma_max if args.gamma_max is not None else hi
    steps = args.gamma_steps if args.gamma_steps is not None else steps
    if not (0 < lo <= hi) or steps < 1:
        raise UsageError("need 0 < gamma-min <= gamma-max and gamma-steps >= 1")
    if steps == 1:
        return [float(hi)]
    return [float(g) for g in np.logspace(np.log10(lo), np.log10(hi), steps)]


def build_manifest(args) -> dict:
    """Resolve command-line arguments into a complete, self-describing run
    configuration."""
    max_iter = args.max_iter
    if args.command == "demo":
        d = DEMOS[args.name]
        if max_iter is None:
            max_iter = d.get("max_iter")
        n = args.n if args.n is not None else d["n"]
        seed = args.seed if args.seed is not None else d["seed"]
        grid = _grid(args, d["grid"])
        penalty = args.penalty or d["penalty"]
        source = {"problem": args.name, "n": n, "seed": seed}
    else:
        text = Path(args.plant_file).read_text(encoding="utf-8")
        grid = _grid(args, (1e-4, 1e-1, 50))
        penalty = args.penalty or "wl1"
        source = {"plant_file": str(args.plant_file),
                  "plant_sha256": hashlib.sha256(text.encode()).hexdigest(),
                  "seed": args.seed}
    return {
        "tool": "sparsefb", "version": __version__, "command": args.command,
        "source": source, "penalty": penalty, "blocks": args.blocks,
        "epsilon_log": args.eps_log, "gamma_grid": grid, "rho": args.rho,
        "eps_stop": args.eps,
        "max_iter": max_iter if max_iter is not None else AdmmOptions.max_iter,
        "reweight": not args.no_reweight, "polish": not args.no_polish,
        "zero_tol": "1e-8 * max(1, max|G|); base record counts exact zeros",
    }


def _load_plant(manifest):
    src = manifest["source"]
    if manifest["command"] == "demo":
        name, n = src["problem"], src["n"]
        if name == "mass-spring":
            return mass_spring(n), None
        if name == "network":
            return random_network(n, seed=src["seed"]).plant, None
        if name == "biochem":
            return biochemical(n)
        raise UsageError(f"unknown demo {name!r}")
    text = Path(src["plant_file"]).read_text(encoding="utf-8")
    if "plant_sha256" in src and hashlib.sha256(text.encode()).hexdigest() != src["plant_sha256"]:
        raise UsageError(f"{src['plant_file']} changed since the manifest was written")
    return parse_plant(text), None


def execute(manifest, out_dir) -> int:
    plant, natural = _load_plant(manifest)
    if manifest["penalty"] not in PENALTIES:
        raise UsageError(f"unknown penalty {manifest['penalty']!r}")
    kind, blockwise = PENALTIES[manifest["penalty"]]
    if manifest["blocks"]:
        part = parse_blocks(manifest["blocks"], plant.gain_shape)
    else:
        part = natural
    if blockwise and part is None:
        raise UsageError(f"--penalty {manifest['penalty']} needs --blocks")
    try:
        spec = PenaltySpec(kind, partition=part if blockwise else None,
                           epsilon_log=manifest["epsilon_log"])
        aopts = AdmmOptions(rho=manifest["rho"], eps_stop=manifest["eps_stop"],
                            max_iter=manifest["max_iter"])
        popts = PathOptions(gamma_grid=manifest["gamma_grid"],
                            reweighting=manifest["reweight"], polish=manifest["polish"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def report(rec):
        log.info("gamma=%-10.4g nnz=%-6d J_id=%-12.6g J_pol=%-12.6g iters=%-5d %s",
                 rec.gamma, rec.nnz, rec.J_identified, rec.J_polished, rec.admm_iters, rec.status)

    result = run_path(plant, spec, popts, aopts, callback=report, report_partition=part)

    out = Path(out_dir)
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    atomic_write(out / "plant.txt", format_plant(plant))
    atomic_write(out / "records.jsonl", format_records(result))
    atomic_write(out / "tradeoff.csv", format_tradeoff_csv(result))
    for k, rec in enumerate(result.records):
        head = f"gamma = {rec.gamma!r}\nnnz = {rec.nnz}, nnz_blocks = {rec.nnz_blocks}"
        atomic_write(out / "patterns" / f"{k:03d}.txt",
                     "".join(f"# {ln}\n" for ln in head.splitlines())
                     + format_pattern(rec.mask, part))
        atomic_write(out / "gains" / f"{k:03d}.txt",
                     format_matrices({"F_identified": rec.F_identified,
                                      "F_polished": rec.F_polished}, head))
    last = result.records[-1]
    print(f"{len(result.records)} records written to {out}; "
          f"J_c = {result.J_c!r}; last gamma = {last.gamma!r}: nnz = {last.nnz}, "
          f"J_polished = {last.J_polished!r}")
    return EXIT_OK


def _add_run_flags(p):
    p.add_argument("--penalty", choices=sorted(PENALTIES))
    p.add_argument("--gamma", type=float, nargs="+", metavar="G",
                   help="explicit gamma values (0 means the Riccati base record only)")
    p.add_argument("--gamma-min", type=float)
    p.add_argument("--gamma-max", type=float)
    p.add_argument("--gamma-steps", type=int)
    p.add_argument("--rho", type=float, default=AdmmOptions.rho)
    p.add_argument("--eps", type=float, default=AdmmOptions.eps_stop, help="ADMM stopping tolerance")
    p.add_argument("--eps-log", type=float, default=0.1, help="sum-of-logs epsilon")
    p.add_argument("--max-iter", type=int,
                   help=f"ADMM iteration cap per gamma (default {AdmmOptions.max_iter})")
    p.add_argument("--no-reweight", action="store_true")
    p.add_argument("--no-polish", action="store_true")
    p.add_argument("--blocks", help="block partition ROWSxCOLS, sizes or comma lists")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=os.environ.get("SPARSEFB_OUT", "sparsefb-out"))
    p.add_argument("-v", "--verbose", action="store_true")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsefb", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    demo = sub.add_parser("demo", help="run a built-in benchmark")
    demo.add_argument("name", choices=sorted(DEMOS))
    demo.add_argument("--n", type=int, help="problem size")
    _add_run_flags(demo)
    solve = sub.add_parser("solve", help="run a plant read from a matrix file")
    solve.add_argument("plant_file")
    _add_run_flags(solve)
    rerun = sub.add_parser("rerun", help="repeat a run from its manifest")
    rerun.add_argument("manifest")
    rerun.add_argument("--out", default=os.environ.get("SPARSEFB_OUT", "sparsefb-out"))
    rerun.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        if args.command == "rerun":
            manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        else:
            manifest = build_manifest(args)
        return execute(manifest, args.out)
    except (UsageError, PlantFileError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"sparsefb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SynthesisError as exc:
        print(f"sparsefb: infeasible plant: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SparseFBError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"sparsefb: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
