"""Gamma sweeps, Pareto frontier extraction, and artifact emission.

A sweep runs the chosen algorithm once per input gamma (sharing the common
trajectory prefix when run in-process), writes one trace / trajectory /
model file per run, pools every traced (error, violation) pair, and writes
the undominated frontier of the pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import isfinite

from .dataset import Dataset
from .fictplay import FictPlayConfig, RunOutput, run_full, run_shared
from .marginal_baseline import run_marginal_full, run_marginal_shared

FMT = "%.9g"  # all numeric output carries 9 significant digits

ALGORITHMS = ("subgroup", "marginal")


@dataclass
class ParetoPoint:
    """An achieved (error, violation) pair with its provenance."""

    eps: float
    gamma: float
    input_gamma: float
    t: int
    algo: str

    def __post_init__(self):
        if not (isfinite(self.eps) and isfinite(self.gamma)):
            raise ValueError("frontier coordinates must be finite")
        if self.eps < 0 or self.gamma < 0:
            raise ValueError("frontier coordinates must be nonnegative")


def pareto_frontier(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """The points not dominated in both coordinates by any other point.

    p dominates q iff p.eps <= q.eps and p.gamma <= q.gamma with at least one
    strict.  Exact duplicates collapse to the earliest-seen point.  Output is
    sorted by eps ascending (hence gamma strictly descending).
    """
    if not points:
        raise ValueError("cannot take the frontier of no points")
    unique: dict[tuple[float, float], ParetoPoint] = {}
    for p in points:
        unique.setdefault((p.eps, p.gamma), p)
    frontier = []
    best_gamma = float("inf")
    prev_eps = None
    for p in sorted(unique.values(), key=lambda q: (q.eps, q.gamma)):
        if p.eps == prev_eps:
            continue  # a smaller gamma at this eps already won
        prev_eps = p.eps
        if p.gamma < best_gamma:
            frontier.append(p)
            best_gamma = p.gamma
    return frontier


@dataclass
class SweepSpec:
    """A gamma sweep: which algorithm, which gammas, where to write."""

    gammas: list[float]
    iters: int
    C: float = 10.0
    trace_every: int = 0
    algorithm: str = "subgroup"
    out_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.gammas:
            raise ValueError("sweep needs at least one gamma")
        self.gammas = sorted(set(float(g) for g in self.gammas))
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def config_for(self, gamma: float) -> FictPlayConfig:
        return FictPlayConfig(gamma=gamma, C=self.C, iters=self.iters,
                              trace_every=self.trace_every)


@dataclass
class SweepResult:
    outputs: dict[float, RunOutput]
    frontier: list[ParetoPoint]
    files: list[str] = field(default_factory=list)


def _run_one(data: Dataset, spec: SweepSpec, gamma: float) -> RunOutput:
    config = spec.config_for(gamma)
    if spec.algorithm == "marginal":
        return run_marginal_full(data, config)
    return run_full(data, config)


def _worker(args):
    data, spec, gamma = args
    return gamma, _run_one(data, spec, gamma)


def collect_points(outputs: dict[float, RunOutput]) -> list[ParetoPoint]:
    points = []
    for gamma in sorted(outputs):
        run = outputs[gamma]
        for rec in run.records:
            points.append(ParetoPoint(eps=rec.eps_mix, gamma=rec.gamma_mix,
                                      input_gamma=gamma, t=rec.t, algo=run.algorithm))
    return points


def sweep(data: Dataset, spec: SweepSpec) -> SweepResult:
    """Run every gamma, emit per-run artifacts, and pool the frontier.

    With workers == 1 the runs share their common trajectory prefix; with
    more workers they run independently in separate processes.  Both modes
    produce identical outputs.
    """
    if spec.workers > 1:
        outputs = {}
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for gamma, result in pool.map(_worker, [(data, spec, g) for g in spec.gammas]):
                outputs[gamma] = result
    else:
        base = spec.config_for(spec.gammas[0])
        if spec.algorithm == "marginal":
            outputs = run_marginal_shared(data, base, spec.gammas)
        else:
            outputs = run_shared(data, base, spec.gammas)

    frontier = pareto_frontier(collect_points(outputs))
    files = []
    if spec.out_dir is not None:
        files = write_sweep_artifacts(outputs, frontier, spec)
    return SweepResult(outputs=outputs, frontier=frontier, files=files)


def gamma_tag(gamma: float) -> str:
    return FMT % gamma


def write_trace(path, run: RunOutput, config: FictPlayConfig):
    from .fictplay import TraceRecord

    with_rich = run.algorithm == "marginal"
    header = TraceRecord.CSV_HEADER + (",rich_gamma" if with_rich else "")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# subfair trace\n")
        fh.write(f"# algo={run.algorithm} gamma={FMT % run.input_gamma} "
                 f"C={FMT % config.C} iters={config.iters}\n")
        fh.write(header + "\n")
        for rec in run.records:
            fh.write(rec.csv_row(FMT, with_rich=with_rich) + "\n")


def write_trajectory(path, run: RunOutput):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,eps,gamma\n")
        for rec in run.records:
            fh.write(f"{rec.t},{FMT % rec.eps_mix},{FMT % rec.gamma_mix}\n")


def write_frontier(path, frontier: list[ParetoPoint]):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("eps,gamma,input_gamma,t,algo\n")
        for p in frontier:
            fh.write(f"{FMT % p.eps},{FMT % p.gamma},{FMT % p.input_gamma},"
                     f"{p.t},{p.algo}\n")


def write_sweep_artifacts(outputs: dict[float, RunOutput],
                          frontier: list[ParetoPoint], spec: SweepSpec) -> list[str]:
    from .modelio import save_model

    os.makedirs(spec.out_dir, exist_ok=True)
    files = []
    for gamma in sorted(outputs):
        run = outputs[gamma]
        tag = f"{spec.algorithm}_g{gamma_tag(gamma)}"
        trace_path = os.path.join(spec.out_dir, f"trace_{tag}.csv")
        traj_path = os.path.join(spec.out_dir, f"traj_{tag}.csv")
        model_path = os.path.join(spec.out_dir, f"model_{tag}.txt")
        write_trace(trace_path, run, spec.config_for(gamma))
        write_trajectory(traj_path, run)
        save_model(model_path, run.mixture, run.registry)
        files += [trace_path, traj_path, model_path]
    frontier_path = os.path.join(spec.out_dir, "frontier.csv")
    write_frontier(frontier_path, frontier)
    files.append(frontier_path)
    return files


def read_trace_points(path, use_rich: bool = False) -> list[ParetoPoint]:
    """Parse a trace CSV back into frontier points using its metadata header."""
    algo = "unknown"
    input_gamma = float("nan")
    points = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line.lstrip("# ").split():
                    if token.startswith("algo="):
                        algo = token.split("=", 1)[1]
                    elif token.startswith("gamma="):
                        input_gamma = float(token.split("=", 1)[1])
                continue
            if header is None:
                header = line.split(",")
                continue
            row = dict(zip(header, line.split(",")))
            gamma_col = "rich_gamma" if use_rich and "rich_gamma" in row else "gamma_mix"
            points.append(ParetoPoint(
                eps=float(row["eps_mix"]),
                gamma=float(row[gamma_col]),
                input_gamma=input_gamma,
                t=int(row["t"]),
                algo=algo,
            ))
    if not points:
        raise ValueError(f"{path}: no trace rows found")
    return points
