"""Command-line interface.

Subcommands:
    fixture   emit the 8-row gerrymander dataset and its parity classifier
    train     one training run: trace + trajectory + model
    audit     audit a saved model: heuristic / marginal / grid / exhaustive
    sweep     run a gamma sweep and pool the Pareto frontier
    frontier  pool existing trace files into a Pareto frontier CSV
    surface   discrimination surfaces at checkpoints along a training run
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

import numpy as np

from .auditor import audit_exhaustive, audit_grid, audit_heuristic, audit_marginal
from .dataset import (Dataset, PreprocessConfig, fixture_frame, load_csv,
                      make_gerrymander_fixture, parity_classifier)
from .fairness_metrics import MixtureClassifier, error_rate, expected_predictions
from .fictplay import FictPlayConfig, run_full
from .frontier import (FMT, SweepSpec, pareto_frontier, read_trace_points,
                       sweep, write_frontier, write_trace, write_trajectory)
from .marginal_baseline import run_marginal_full
from .modelio import load_model, save_model

AUDIT_MODES = ("heuristic", "marginal", "grid", "exhaustive", "all")


def _split_names(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def add_dataset_args(parser):
    parser.add_argument("--data", required=True, help="input CSV (header row, comma separated)")
    parser.add_argument("--config", help="INI file with a [dataset] section of the same keys")
    parser.add_argument("--protected", help="comma-separated protected column names")
    parser.add_argument("--categorical", help="comma-separated categorical column names")
    parser.add_argument("--label", help="label column (default: last column)")
    parser.add_argument("--positive-label", help="raw label value mapped to 1")
    parser.add_argument("--balance", action="store_true",
                        help="downsample the majority label class")
    parser.add_argument("--seed", type=int, default=0, help="balance downsampling seed")
    parser.add_argument("--scaling", choices=["minmax", "none"], default=None,
                        help="numeric column scaling (default minmax)")


def preprocess_config(args) -> PreprocessConfig:
    cfg = PreprocessConfig()
    if args.config:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ValueError(f"cannot read config file {args.config}")
        if not parser.has_section("dataset"):
            raise ValueError(f"{args.config}: missing [dataset] section")
        section = parser["dataset"]
        cfg.protected = _split_names(section.get("protected", ""))
        cfg.categorical = _split_names(section.get("categorical", ""))
        cfg.label = section.get("label", None)
        cfg.positive_label = section.get("positive_label", None)
        cfg.balance = section.getboolean("balance", False)
        cfg.seed = section.getint("seed", 0)
        cfg.scaling = section.get("scaling", "minmax")
    if args.protected is not None:
        cfg.protected = _split_names(args.protected)
    if args.categorical is not None:
        cfg.categorical = _split_names(args.categorical)
    if args.label is not None:
        cfg.label = args.label
    if args.positive_label is not None:
        cfg.positive_label = args.positive_label
    if args.balance:
        cfg.balance = True
        cfg.seed = args.seed
    if args.scaling is not None:
        cfg.scaling = args.scaling
    return cfg


def load_dataset(args) -> Dataset:
    data = load_csv(args.data, preprocess_config(args))
    print(f"loaded {args.data}: n={data.n} protected={data.d_protected} "
          f"unprotected={data.xp.shape[1]} positives={int(data.y.sum())}")
    return data


def add_run_args(parser, multi_gamma: bool):
    if multi_gamma:
        parser.add_argument("--gamma", type=float, action="append", required=True,
                            help="fairness slack (repeat for a sweep)")
    else:
        parser.add_argument("--gamma", type=float, required=True, help="fairness slack")
    parser.add_argument("--C", type=float, default=10.0, help="dual bound (default 10)")
    parser.add_argument("--iters", type=int, default=1000, help="number of rounds")
    parser.add_argument("--trace-every", type=int, default=0,
                        help="trace cadence (0 = auto)")
    parser.add_argument("--algo", choices=["subgroup", "marginal"], default="subgroup")


def _attr_indices(data: Dataset, value: str) -> tuple[int, int]:
    names = _split_names(value)
    if len(names) != 2:
        raise ValueError("--attrs needs exactly two protected columns")
    indices = []
    for name in names:
        if name in data.protected_names:
            indices.append(data.protected_names.index(name))
        else:
            indices.append(int(name))
    return indices[0], indices[1]


def cmd_fixture(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "gerrymander.csv")
    fixture_frame().to_csv(csv_path, index=False)
    model_path = os.path.join(args.out, "parity_model.txt")
    save_model(model_path, MixtureClassifier([parity_classifier()]))
    print(f"wrote {csv_path}")
    print(f"wrote {model_path} (load data with --protected race,gender --label label)")
    return 0


def cmd_train(args) -> int:
    data = load_dataset(args)
    config = FictPlayConfig(gamma=args.gamma, C=args.C, iters=args.iters,
                            trace_every=args.trace_every)
    if args.algo == "marginal":
        output = run_marginal_full(data, config)
    else:
        output = run_full(data, config)
    final = output.final_record
    print(f"final t={final.t} eps={FMT % final.eps_mix} gamma={FMT % final.gamma_mix} "
          f"auditor_zero={int(final.auditor_zero)}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        trace_path = os.path.join(args.out, "trace.csv")
        write_trace(trace_path, output, config)
        write_trajectory(os.path.join(args.out, "traj.csv"), output)
        save_model(os.path.join(args.out, "model.txt"), output.mixture, output.registry)
        print(f"wrote {args.out}/trace.csv, traj.csv, model.txt")
    return 0


def cmd_audit(args) -> int:
    data = load_dataset(args)
    mixture = load_model(args.model)
    p = expected_predictions(mixture, data)
    print(f"model {args.model}: {len(mixture.hypotheses)} hypotheses, "
          f"error={FMT % error_rate(p, data.y)}")

    reports = []
    if args.mode in ("heuristic", "all"):
        res = audit_heuristic(mixture, data, predictions=p)
        reports.append(("heuristic", res))
    if args.mode in ("marginal", "all"):
        res = audit_marginal(mixture, data, predictions=p)
        reports.append(("marginal", res))
    if args.mode in ("exhaustive", "all"):
        res = audit_exhaustive(mixture, data, predictions=p)
        reports.append(("exhaustive", res))
    for name, res in reports:
        print(f"{name}: {res.describe()}")

    if args.mode in ("grid", "all"):
        attrs = _attr_indices(data, args.attrs) if args.attrs else (0, 1)
        grid = audit_grid(mixture, data, attrs, predictions=p)
        t1, t2, vmax = grid.max_cell()
        frac = grid.fraction_above(args.threshold)
        print(f"grid[{grid.attr_names[0]},{grid.attr_names[1]}]: "
              f"max gamma_unfairness={FMT % vmax} at theta=({FMT % t1},{FMT % t2}); "
              f"{FMT % (100 * frac)}% of cells above {FMT % args.threshold}")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, "surface.csv")
            with open(path, "w", encoding="utf-8") as fh:
                for row in grid.csv_rows(FMT):
                    fh.write(row + "\n")
            print(f"wrote {path}")

    if args.out and reports:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "audit.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("mode,group,direction,alpha,fp_base,fp_group,beta,gamma_unfairness\n")
            for name, res in reports:
                group = res.group_label().replace(",", ";")
                fh.write(f"{name},{group},{res.direction},{FMT % res.alpha},"
                         f"{FMT % res.fp_base},{FMT % res.fp_group},"
                         f"{FMT % res.beta},{FMT % res.value}\n")
        print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    data = load_dataset(args)
    spec = SweepSpec(gammas=args.gamma, iters=args.iters, C=args.C,
                     trace_every=args.trace_every, algorithm=args.algo,
                     out_dir=args.out, workers=args.workers)
    result = sweep(data, spec)
    for gamma in spec.gammas:
        final = result.outputs[gamma].final_record
        print(f"gamma={FMT % gamma}: final eps={FMT % final.eps_mix} "
              f"gamma_t={FMT % final.gamma_mix}")
    print(f"frontier: {len(result.frontier)} undominated points")
    for path in result.files:
        print(f"wrote {path}")
    return 0


def cmd_frontier(args) -> int:
    points = []
    for path in args.traces:
        points.extend(read_trace_points(path, use_rich=args.use_rich))
    frontier = pareto_frontier(points)
    write_frontier(args.out, frontier)
    print(f"pooled {len(points)} points from {len(args.traces)} traces -> "
          f"{len(frontier)} undominated; wrote {args.out}")
    return 0


def cmd_surface(args) -> int:
    data = load_dataset(args)
    attrs = _attr_indices(data, args.attrs) if args.attrs else (0, 1)
    config = FictPlayConfig(gamma=args.gamma, C=args.C, iters=args.iters,
                            trace_every=args.trace_every)
    if args.algo == "marginal":
        output = run_marginal_full(data, config)
    else:
        output = run_full(data, config)

    total = len(output.mixture.hypotheses)
    if args.checkpoints:
        checkpoints = sorted({int(v) for v in _split_names(args.checkpoints)})
    else:
        marks = np.unique(np.geomspace(1, total, num=min(8, total)).astype(int)) - 1
        checkpoints = sorted(set(marks.tolist()))
    os.makedirs(args.out, exist_ok=True)

    summary_path = os.path.join(args.out, "surface_summary.csv")
    with open(summary_path, "w", encoding="utf-8") as summary:
        summary.write("t,max_gamma_unfairness,frac_above_threshold\n")
        for t in checkpoints:
            if not (0 <= t < total):
                raise ValueError(f"checkpoint {t} outside 0..{total - 1}")
            current = MixtureClassifier([output.mixture.hypotheses[t]])
            grid = audit_grid(current, data, attrs)
            path = os.path.join(args.out, f"surface_t{t}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                for row in grid.csv_rows(FMT):
                    fh.write(row + "\n")
            _, _, vmax = grid.max_cell()
            frac = grid.fraction_above(args.threshold)
            summary.write(f"{t},{FMT % vmax},{FMT % frac}\n")
            print(f"t={t}: max={FMT % vmax} frac>{FMT % args.threshold}={FMT % frac} -> {path}")
    print(f"wrote {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subfair",
        description="Train and audit linear classifiers under rich subgroup "
                    "false-positive fairness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="emit the gerrymander dataset and parity model")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("train", help="one training run")
    add_dataset_args(p)
    add_run_args(p, multi_gamma=False)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("audit", help="audit a saved model")
    add_dataset_args(p)
    p.add_argument("--model", required=True, help="model file from train/sweep/fixture")
    p.add_argument("--mode", choices=AUDIT_MODES, default="all")
    p.add_argument("--attrs", help="two protected columns for grid mode (names or indices)")
    p.add_argument("--threshold", type=float, default=0.02,
                   help="grid cell threshold for the reported fraction")
    p.add_argument("--out", help="output directory for CSV reports")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="gamma sweep with pooled Pareto frontier")
    add_dataset_args(p)
    add_run_args(p, multi_gamma=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel runs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("frontier", help="pool trace CSVs into a Pareto frontier")
    p.add_argument("traces", nargs="+", help="trace CSV files")
    p.add_argument("--out", required=True, help="output frontier CSV")
    p.add_argument("--use-rich", action="store_true",
                   help="pool the rich_gamma column of marginal traces")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("surface", help="discrimination surfaces along a run")
    add_dataset_args(p)
    add_run_args(p, multi_gamma=False)
    p.add_argument("--attrs", help="two protected columns (names or indices)")
    p.add_argument("--checkpoints", help="comma-separated iteration indices")
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_surface)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"subfair: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
