"""Command-line surface: dataset generation, discovery, metrics, benchmarks.

Subcommands
-----------
generate   sample a dataset from a registered DGP and write it as CSV
discover   run one discovery method on a dataset CSV; writes the box
           sequence, a trajectory CSV and a density-coverage SVG
benchmark  run the experiment grid from a JSON config; one CSV per metric
mse        run the mean-squared-error study for one DGP and box

Every output directory receives a manifest recording the resolved
configuration, seeds, tool version and per-file checksums; re-running a
command with the same inputs reproduces the outputs byte for byte.
Exit codes: 0 success, 2 configuration/usage error, 3 data error,
4 internal error.  The environment variable SDRE_SEED overrides the
base seed when set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .boxes import HyperBox, trajectory_to_csv
from .dgps import Dataset, evaluate, flip_noise, get_dgp
from .errors import ScenboxError
from .pipeline import (
    METHODS,
    METRICS,
    ExperimentConfig,
    discover,
    mse_experiment,
    run_benchmark,
    trajectory_on,
)
from .prim import BoxSequence, box_sequence_to_lines
from .sampling import PointMatrix, child_seed, halton_sample, lhs_sample, uniform_sample

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


class _ConfigError(Exception):
    pass


class _DataError(Exception):
    pass


# --------------------------------------------------------------------------
# dataset CSV
# --------------------------------------------------------------------------


def write_dataset_csv(path: Path, data: Dataset) -> None:
    dim = data.x.dim
    lines = [",".join([f"x{i + 1}" for i in range(dim)] + ["y"])]
    for row, label in zip(data.x.points, data.y):
        cells = [repr(float(v)) for v in row]
        cells.append(repr(int(label)) if float(label).is_integer() else repr(float(label)))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dataset_csv(path: Path, box: HyperBox | None = None) -> Dataset:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _DataError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise _DataError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[-1] != "y" or any(h != f"x{i + 1}" for i, h in enumerate(header[:-1])):
        raise _DataError(f"{path}: line 1: expected header x1,...,xD,y")
    dim = len(header) - 1
    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != dim + 1:
            raise _DataError(f"{path}: line {lineno}: expected {dim + 1} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells[:-1]])
            labels.append(float(cells[-1]))
        except ValueError as exc:
            raise _DataError(f"{path}: line {lineno}: {exc}") from exc
    pts = np.asarray(rows, dtype=float)
    if box is None:
        box = HyperBox(pts.min(axis=0), pts.max(axis=0))
    return Dataset(PointMatrix(pts, box), np.asarray(labels))


# --------------------------------------------------------------------------
# manifest and SVG helpers
# --------------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, config: dict, files: list[Path], timings: dict) -> Path:
    manifest = {
        "tool": "scenbox",
        "version": __version__,
        "config": config,
        "files": {p.name: _sha256(p) for p in sorted(files)},
        "timings": timings,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def trajectory_svg(points, width: int = 640, height: int = 480, margin: int = 50) -> str:
    """Minimal static polyline of density (y) against coverage (x)."""
    def sx(cov: float) -> float:
        return margin + cov * (width - 2 * margin)

    def sy(dens: float) -> float:
        return height - margin - dens * (height - 2 * margin)

    coords = " ".join(
        f"{sx(p.coverage):.2f},{sy(p.density):.2f}"
        for p in points
        if not math.isnan(p.density)
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="14">coverage</text>',
        f'<text x="14" y="{height // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 14 {height // 2})">density</text>',
        f'<polyline points="{coords}" fill="none" stroke="steelblue" stroke-width="1.5"/>',
    ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------

_CONFIG_FIELDS = {
    "methods", "alpha", "minpts", "max_iter", "beta", "T", "t", "K",
    "n_trees", "min_node", "mtry", "sizes", "reps", "noise_level",
    "test_size", "base_seed", "rf_validation",
}


def load_experiment_config(path: Path | None) -> tuple[ExperimentConfig, dict]:
    """Parse a JSON config (or a manifest with a ``config`` key).

    Unknown fields are rejected to prevent silent typos; omitted fields
    keep their canonical defaults.  Returns the config plus the extra
    benchmark-only fields (dgps list).
    """
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise _ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise _ConfigError(f"config is not valid JSON: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw and "tool" in raw:
        raw = raw["config"]  # rerun straight from a manifest
    if not isinstance(raw, dict):
        raise _ConfigError("config must be a JSON object")
    extras = {}
    fields = {}
    for key, value in raw.items():
        if key == "dgps":
            extras["dgps"] = list(value)
        elif key in ("command", "method", "data"):
            continue  # provenance fields written into manifests
        elif key in _CONFIG_FIELDS:
            fields[key] = value
        else:
            raise _ConfigError(f"unknown config field {key!r}")
    env_seed = os.environ.get("SDRE_SEED")
    if env_seed is not None:
        try:
            fields["base_seed"] = int(env_seed)
        except ValueError as exc:
            raise _ConfigError(f"SDRE_SEED must be an integer: {env_seed!r}") from exc
    try:
        cfg = ExperimentConfig(**fields)
    except (TypeError, ScenboxError) as exc:
        raise _ConfigError(str(exc)) from exc
    return cfg, extras


def _config_dict(cfg: ExperimentConfig, **extra) -> dict:
    out = asdict(cfg)
    out["methods"] = list(cfg.methods)
    out["sizes"] = list(cfg.sizes)
    out.update(extra)
    return out


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    spec = get_dgp(args.dgp)
    seed = int(os.environ.get("SDRE_SEED", args.seed))
    if args.sampler == "lhs":
        pts = lhs_sample(args.n, spec.input_box, child_seed(seed, "generate", spec.name))
    elif args.sampler == "uniform":
        pts = uniform_sample(args.n, spec.input_box, child_seed(seed, "generate", spec.name))
    else:
        pts = halton_sample(args.n, spec.input_box, skip=args.skip)
    labels = evaluate(spec, pts, child_seed(seed, "generate-labels", spec.name))
    if args.noise > 0:
        labels = flip_noise(labels, args.noise, child_seed(seed, "generate-noise", spec.name))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(out, Dataset(pts, labels))
    return EXIT_OK


def _cmd_discover(args) -> int:
    cfg, _ = load_experiment_config(Path(args.config) if args.config else None)
    if args.method not in METHODS:
        raise _ConfigError(f"unknown method {args.method!r}; valid: {', '.join(METHODS)}")
    if args.dgp:
        box0 = get_dgp(args.dgp).input_box
        data = read_dataset_csv(Path(args.data), box0)
    else:
        data = read_dataset_csv(Path(args.data))
        box0 = data.x.box
    t0 = time.time()
    result = discover(args.method, data, data, box0, cfg, seed=cfg.base_seed)
    eval_data = read_dataset_csv(Path(args.test_data), box0) if args.test_data else data
    traj = trajectory_on(result, eval_data)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(result, BoxSequence):
        lines = box_sequence_to_lines(result.boxes, result.val_means)
    else:
        lines = box_sequence_to_lines([cb.box for cb in result], [cb.density for cb in result])
    files = []
    boxes_path = out_dir / "boxes.txt"
    boxes_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    files.append(boxes_path)
    traj_path = out_dir / "trajectory.csv"
    traj_path.write_text(trajectory_to_csv(traj), encoding="utf-8")
    files.append(traj_path)
    svg_path = out_dir / "trajectory.svg"
    svg_path.write_text(trajectory_svg(traj), encoding="utf-8")
    files.append(svg_path)
    write_manifest(
        out_dir,
        _config_dict(cfg, command="discover", method=args.method, data=str(args.data)),
        files,
        {"seconds": round(time.time() - t0, 3)},
    )
    return EXIT_OK


def _metric_csv(result, metric: str) -> str:
    header = ["size", "dgp"] + list(result.methods)
    rows = [",".join(header)]
    for size in result.sizes:
        for dgp in result.dgps:
            cells = [f"{result.value(dgp, size, m, metric):.6g}" for m in result.methods]
            rows.append(",".join([str(size), dgp] + cells))
        avg = [f"{result.mean_over_dgps(size, m, metric):.6g}" for m in result.methods]
        rows.append(",".join([str(size), "avg"] + avg))
        tally = result.counts[(size, metric)]
        rows.append(",".join([str(size), "#1"] + [str(tally[m][0]) for m in result.methods]))
        rows.append(",".join([str(size), "#2"] + [str(tally[m][1]) for m in result.methods]))
    return "\n".join(rows) + "\n"


def _cmd_benchmark(args) -> int:
    cfg, extras = load_experiment_config(Path(args.config))
    dgps = extras.get("dgps")
    if not dgps:
        raise _ConfigError("config field 'dgps' (non-empty list) is required")
    t0 = time.time()
    result = run_benchmark(cfg, dgps, jobs=args.jobs)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for metric, fname in zip(METRICS, ("auc.csv", "density.csv", "interp.csv", "consistency.csv")):
        p = out_dir / fname
        p.write_text(_metric_csv(result, metric), encoding="utf-8")
        files.append(p)
    err_lines = ["dgp,size,method,error"]
    any_ok = False
    for (dgp, size, method), stats in sorted(result.cells.items()):
        any_ok = any_ok or stats.n_runs > 0
        for err in stats.errors:
            err_lines.append(f"{dgp},{size},{method},\"{err}\"")
    err_path = out_dir / "errors.csv"
    err_path.write_text("\n".join(err_lines) + "\n", encoding="utf-8")
    files.append(err_path)
    write_manifest(
        out_dir,
        _config_dict(cfg, command="benchmark", dgps=list(dgps)),
        files,
        {"seconds": round(time.time() - t0, 3)},
    )
    return EXIT_OK if any_ok else EXIT_INTERNAL


def _cmd_mse(args) -> int:
    spec = get_dgp(args.dgp)
    box0 = spec.input_box
    lower = box0.lower.copy()
    upper = box0.upper.copy()
    try:
        dim_str, lo_str, hi_str = args.box.split(":")
        dim = int(dim_str) - 1
        lower[dim], upper[dim] = float(lo_str), float(hi_str)
    except (ValueError, IndexError) as exc:
        raise _ConfigError(f"--box must be 'dim:lower:upper', got {args.box!r}") from exc
    seed = int(os.environ.get("SDRE_SEED", args.seed))
    t0 = time.time()
    report = mse_experiment(
        spec,
        HyperBox(lower, upper),
        N=args.n,
        K=args.k,
        reps_outer=args.reps_outer,
        reps_inner=args.reps_inner,
        seed=seed,
        probabilities=not args.labels,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "mse.csv"
    csv_path.write_text(
        "mu_gt,mse_o,mse_am,mse_am_literal,n,k\n"
        f"{report.mu_gt!r},{report.mse_o!r},{report.mse_am!r},"
        f"{report.mse_am_literal!r},{report.n},{report.k}\n",
        encoding="utf-8",
    )
    write_manifest(
        out_dir,
        {
            "command": "mse",
            "dgp": spec.name,
            "box": args.box,
            "N": args.n,
            "K": args.k,
            "reps_outer": args.reps_outer,
            "reps_inner": args.reps_inner,
            "base_seed": seed,
            "probabilities": not args.labels,
        },
        [csv_path],
        {"seconds": round(time.time() - t0, 3)},
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenbox", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"scenbox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a labeled dataset from a registered DGP")
    p.add_argument("--dgp", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sampler", choices=("lhs", "halton", "uniform"), default="lhs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip", type=int, default=0, help="halton skip offset")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("discover", help="run one discovery method on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--config", default=None, help="JSON config (defaults otherwise)")
    p.add_argument("--dgp", default=None, help="use this DGP's input box as the full box")
    p.add_argument("--test-data", default=None, help="evaluate the trajectory on this CSV")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("benchmark", help="run the benchmark grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("mse", help="mean-squared-error study for one DGP and box")
    p.add_argument("--dgp", required=True)
    p.add_argument("--box", required=True, help="restriction as 'dim:lower:upper' (1-based dim)")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--k", type=int, default=100_000)
    p.add_argument("--reps-outer", type=int, default=200)
    p.add_argument("--reps-inner", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels", action="store_true", help="use hard labels instead of probabilities")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_mse)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ScenboxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
