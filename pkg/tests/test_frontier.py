import filecmp
import os

import numpy as np
import pytest

from subfair.frontier import (ParetoPoint, SweepSpec, collect_points,
                              pareto_frontier, read_trace_points, sweep)

from conftest import planted_dataset


def point(eps, gamma, idx=0):
    return ParetoPoint(eps=eps, gamma=gamma, input_gamma=0.0, t=idx, algo="subgroup")


def pareto_oracle(points):
    """O(n^2) pairwise domination check with duplicate collapse."""
    kept = []
    for i, q in enumerate(points):
        dominated = False
        for j, p in enumerate(points):
            if (p.eps <= q.eps and p.gamma <= q.gamma
                    and (p.eps < q.eps or p.gamma < q.gamma)):
                dominated = True
                break
        if not dominated:
            kept.append(q)
    seen = {}
    for p in kept:
        seen.setdefault((p.eps, p.gamma), p)
    return sorted(seen.values(), key=lambda p: p.eps)


class TestParetoFrontier:
    def test_mutually_nondominating_all_retained(self):
        pts = [point(1, 2), point(2, 1), point(1.5, 1.5)]
        assert len(pareto_frontier(pts)) == 3

    def test_domination(self):
        pts = [point(1, 1), point(2, 2)]
        out = pareto_frontier(pts)
        assert [(p.eps, p.gamma) for p in out] == [(1, 1)]

    def test_duplicates_collapse_keeping_earliest(self):
        pts = [point(1, 1, idx=0), point(1, 1, idx=7)]
        out = pareto_frontier(pts)
        assert len(out) == 1 and out[0].t == 0

    def test_equal_eps_smaller_gamma_wins(self):
        pts = [point(1, 2), point(1, 1)]
        out = pareto_frontier(pts)
        assert [(p.eps, p.gamma) for p in out] == [(1, 1)]

    def test_matches_quadratic_oracle_on_fuzzed_sets(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 200))
            # quantized coordinates force plenty of exact ties and duplicates
            pts = [point(float(rng.integers(0, 12)) / 4,
                         float(rng.integers(0, 12)) / 4, idx=i)
                   for i in range(n)]
            ours = pareto_frontier(pts)
            ref = pareto_oracle(pts)
            assert [(p.eps, p.gamma, p.t) for p in ours] == \
                   [(p.eps, p.gamma, p.t) for p in ref]

    def test_output_sorted_and_undominated(self):
        rng = np.random.default_rng(1)
        pts = [point(float(rng.uniform(0, 1)), float(rng.uniform(0, 1)), idx=i)
               for i in range(300)]
        out = pareto_frontier(pts)
        eps = [p.eps for p in out]
        gam = [p.gamma for p in out]
        assert eps == sorted(eps)
        assert gam == sorted(gam, reverse=True)
        # every input point is dominated by or equal to some output point
        for q in pts:
            assert any(p.eps <= q.eps and p.gamma <= q.gamma for p in out)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            pareto_frontier([])

    def test_rejects_bad_coordinates(self):
        with pytest.raises(ValueError):
            point(float("nan"), 0.0)
        with pytest.raises(ValueError):
            point(-1.0, 0.0)


class TestSweep:
    def test_single_gamma_above_unfairness_is_one_point(self):
        data = planted_dataset(n=80, seed=7)
        spec = SweepSpec(gammas=[1.0], iters=10)
        result = sweep(data, spec)
        assert len(result.frontier) == 1

    def test_planted_sweep_spans_monotone_frontier(self):
        data = planted_dataset()
        spec = SweepSpec(gammas=[0.0, 0.02, 0.05], iters=120)
        result = sweep(data, spec)
        assert len(result.frontier) >= 2
        gammas = [p.gamma for p in result.frontier]
        eps = [p.eps for p in result.frontier]
        assert eps == sorted(eps)
        assert gammas == sorted(gammas, reverse=True)
        # spans from the unconstrained corner toward near-zero unfairness
        assert min(gammas) < 0.01
        assert max(gammas) > 0.03

    def test_frontier_never_dominated_by_any_traced_point(self):
        data = planted_dataset(n=100, seed=11)
        spec = SweepSpec(gammas=[0.0, 0.03], iters=60)
        result = sweep(data, spec)
        pool = collect_points(result.outputs)
        for p in result.frontier:
            for q in pool:
                assert not (q.eps <= p.eps and q.gamma <= p.gamma
                            and (q.eps < p.eps or q.gamma < p.gamma))

    def test_workers_match_shared(self, tmp_path):
        data = planted_dataset(n=60, seed=3)
        a = sweep(data, SweepSpec(gammas=[0.0, 0.02], iters=25,
                                  out_dir=str(tmp_path / "shared"), workers=1))
        b = sweep(data, SweepSpec(gammas=[0.0, 0.02], iters=25,
                                  out_dir=str(tmp_path / "workers"), workers=2))
        for fa, fb in zip(sorted(a.files), sorted(b.files)):
            assert os.path.basename(fa) == os.path.basename(fb)
            assert filecmp.cmp(fa, fb, shallow=False), (fa, fb)

    def test_byte_identical_reruns(self, tmp_path):
        data = planted_dataset(n=60, seed=3)
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        sweep(data, SweepSpec(gammas=[0.0, 0.01], iters=30, out_dir=out1))
        sweep(data, SweepSpec(gammas=[0.0, 0.01], iters=30, out_dir=out2))
        names = sorted(os.listdir(out1))
        assert names == sorted(os.listdir(out2))
        for name in names:
            assert filecmp.cmp(os.path.join(out1, name), os.path.join(out2, name),
                               shallow=False), name

    def test_trace_round_trip(self, tmp_path):
        data = planted_dataset(n=60, seed=3)
        spec = SweepSpec(gammas=[0.0, 0.02], iters=20, out_dir=str(tmp_path))
        result = sweep(data, spec)
        traces = [f for f in result.files if os.path.basename(f).startswith("trace_")]
        points = []
        for path in traces:
            points.extend(read_trace_points(path))
        redone = pareto_frontier(points)
        # 9-significant-digit serialization preserves the frontier shape
        assert len(redone) == len(result.frontier)

    def test_marginal_algorithm_traces_rich_column(self, tmp_path):
        data = planted_dataset(n=60, seed=3)
        spec = SweepSpec(gammas=[0.0], iters=10, algorithm="marginal",
                         out_dir=str(tmp_path))
        result = sweep(data, spec)
        trace = [f for f in result.files
                 if os.path.basename(f).startswith("trace_")][0]
        with open(trace) as fh:
            lines = [l for l in fh if not l.startswith("#")]
        assert lines[0].strip().endswith("rich_gamma")
        rich_points = read_trace_points(trace, use_rich=True)
        assert all(p.gamma >= 0 for p in rich_points)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(gammas=[], iters=10)
        with pytest.raises(ValueError):
            SweepSpec(gammas=[0.0], iters=10, algorithm="magic")
        with pytest.raises(ValueError):
            SweepSpec(gammas=[0.0], iters=10, workers=0)
        spec = SweepSpec(gammas=[0.03, 0.0, 0.03], iters=10)
        assert spec.gammas == [0.0, 0.03]  # sorted, deduplicated
