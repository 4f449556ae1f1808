"""Command-line front end: ``snss simulate | estimate | varmap``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError

from . import coda
from .data import SpatialData
from .errors import ConfigError, DataError, NumericError
from .estimators import MethodSpec, fit, latent_scores
from .geometry import F0, Rect, parse_kernel, parse_partition
from .io import read_spatial_csv, write_csv
from .simulation import StudyConfig, load_config, run_study, write_study

log = logging.getLogger("snss")

EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _echo(path: Path, values: dict) -> None:
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")


def cmd_simulate(args) -> None:
    config = load_config(args.config) if args.config else StudyConfig()
    if args.reps is not None:
        config = StudyConfig(**{**config.__dict__, "reps": args.reps})
    if args.seed is not None:
        config = StudyConfig(**{**config.__dict__, "seed": args.seed})
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    rows = run_study(config, threads=args.threads)
    write_study(args.out, config, rows)
    n_fail = sum(r[8] is None for r in rows)
    log.info("wrote %d rows to %s (%d failed)", len(rows), args.out, n_fail)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _method_from_args(args) -> MethodSpec:
    kernels = [parse_kernel(k) for k in args.kernel]
    if args.method == "sjd" and not args.no_f0 and not any(isinstance(k, F0) for k in kernels):
        kernels.insert(0, F0())
    partition = None
    if args.method in ("sd", "jd", "sjd"):
        if args.partition is None:
            raise ConfigError(f"--partition is required for method {args.method}")
        partition = parse_partition(args.partition)
    return MethodSpec(args.method, partition, tuple(kernels))


def cmd_estimate(args) -> None:
    spec = _method_from_args(args)
    coords, values, names = read_spatial_csv(args.infile)
    contrast = None
    if args.coda:
        values, contrast = coda.ilr_pivot(values)
    data = SpatialData(coords, values)
    model = fit(spec, data, Rect.bounding(coords))
    scores = latent_scores(model, data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    p = scores.shape[1]
    write_csv(out / "latent.csv", ["x", "y", *[f"z{j + 1}" for j in range(p)]], np.column_stack([coords, scores]).tolist())
    if contrast is not None:
        loadings = coda.combined_loadings(model, contrast)
        write_csv(
            out / "loadings.csv",
            ["component", *[f"clr({n})" for n in names]],
            [[f"z{j + 1}", *loadings[j]] for j in range(p)],
        )
    config = {
        "in": str(args.infile),
        "method": spec.name,
        "partition": spec.partition_label,
        "kernels": spec.kernels_label,
        "coda": str(bool(args.coda)).lower(),
        "out": str(out),
    }
    meta = {
        "method": spec.label,
        "columns": names,
        "coda": bool(args.coda),
        "W": model.W,
        "T": model.T,
        "diagnostics": model.diagnostics,
        "config": config,
    }
    (out / "model.json").write_text(json.dumps(_jsonable(meta), indent=2) + "\n", encoding="utf-8")
    _echo(out / "config.resolved.txt", config)
    if not model.converged:
        log.warning("joint diagonalization did not converge")


def cmd_varmap(args) -> None:
    if not (args.grid_res > 0 and args.block > 0):
        raise ConfigError("--grid-res and --block must be positive")
    coords, values, names = read_spatial_csv(args.infile)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for j, name in enumerate(names):
        vm = coda.moving_block_variance(values[:, j], coords, args.grid_res, args.block)
        write_csv(out / f"varmap_{name}.csv", ["cell_x", "cell_y", "count", "variance"], vm.rows())
    _echo(out / "config.resolved.txt", {"in": str(args.infile), "grid_res": args.grid_res, "block": args.block, "out": str(out)})


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snss", description="Spatial non-stationary blind source separation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run the Monte-Carlo simulation study")
    sim.add_argument("--config", help="flat key = value config file")
    sim.add_argument("--reps", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", default="snss-sim")
    sim.add_argument("--threads", type=int, default=1)
    sim.set_defaults(func=cmd_simulate)

    est = sub.add_parser("estimate", help="estimate latent fields from a CSV file")
    est.add_argument("--in", dest="infile", required=True)
    est.add_argument("--method", required=True, choices=["sd", "jd", "sjd", "sbss", "fobi"])
    est.add_argument("--partition", help="halve-x | halve-y | grid:KxL")
    est.add_argument("--kernel", action="append", default=[], help="ball:R | ring:R1:R2 | gauss:R (repeatable)")
    est.add_argument("--no-f0", action="store_true", help="sjd: do not add the zero-lag kernel")
    est.add_argument("--coda", action="store_true", help="apply the pivot ilr transform first")
    est.add_argument("--out", default="snss-out")
    est.set_defaults(func=cmd_estimate)

    vm = sub.add_parser("varmap", help="moving-block variance maps of latent components")
    vm.add_argument("--in", dest="infile", required=True)
    vm.add_argument("--grid-res", type=float, default=1.0)
    vm.add_argument("--block", type=float, default=3.0)
    vm.add_argument("--out", default="snss-varmap")
    vm.set_defaults(func=cmd_varmap)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except (NumericError, LinAlgError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
