import filecmp
import os
import subprocess
import sys

import numpy as np
import pytest

from subfair.cli import cli_main

from conftest import planted_dataset


@pytest.fixture
def fixture_dir(tmp_path):
    out = tmp_path / "fixture"
    assert cli_main(["fixture", "--out", str(out)]) == 0
    return out


def dataset_flags(fixture_dir):
    return ["--data", str(fixture_dir / "gerrymander.csv"),
            "--protected", "race,gender", "--label", "label"]


def planted_csv(tmp_path, **kwargs):
    data = planted_dataset(**kwargs)
    path = tmp_path / "planted.csv"
    header = ",".join(data.protected_names + data.unprotected_names + ["label"])
    rows = np.column_stack([data.x, data.xp, data.y])
    lines = [header] + [",".join(repr(float(v)) for v in row[:-1]) + f",{int(row[-1])}"
                        for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestFixtureAndAudit:
    def test_fixture_emits_loadable_dataset(self, fixture_dir):
        assert (fixture_dir / "gerrymander.csv").exists()
        assert (fixture_dir / "parity_model.txt").exists()

    def test_marginal_audit_of_parity_model_reports_zero(self, fixture_dir, capsys):
        code = cli_main(["audit", *dataset_flags(fixture_dir),
                         "--model", str(fixture_dir / "parity_model.txt"),
                         "--mode", "marginal"])
        assert code == 0
        out = capsys.readouterr().out
        assert "gamma_unfairness=0" in out

    def test_heuristic_audit_finds_the_gerrymander(self, fixture_dir, capsys):
        code = cli_main(["audit", *dataset_flags(fixture_dir),
                         "--model", str(fixture_dir / "parity_model.txt"),
                         "--mode", "heuristic"])
        assert code == 0
        assert "gamma_unfairness=0.0625" in capsys.readouterr().out

    def test_audit_all_writes_reports(self, fixture_dir, tmp_path, capsys):
        out = tmp_path / "audit"
        code = cli_main(["audit", *dataset_flags(fixture_dir),
                         "--model", str(fixture_dir / "parity_model.txt"),
                         "--mode", "all", "--out", str(out)])
        assert code == 0
        assert (out / "audit.csv").exists()
        assert (out / "surface.csv").exists()
        surface = (out / "surface.csv").read_text().splitlines()
        assert surface[0] == "theta1,theta2,signed_disparity,gamma_unfairness"
        assert len(surface) == 1 + 400


class TestTrain:
    def test_gamma_one_trace_is_flat(self, fixture_dir, tmp_path, capsys):
        out = tmp_path / "run"
        code = cli_main(["train", *dataset_flags(fixture_dir),
                         "--gamma", "1.0", "--iters", "12", "--out", str(out)])
        assert code == 0
        rows = [l for l in (out / "trace.csv").read_text().splitlines()
                if not l.startswith("#")][1:]
        eps = {row.split(",")[1] for row in rows}
        assert len(eps) == 1
        assert (out / "model.txt").exists()
        assert (out / "traj.csv").exists()

    def test_marginal_algo(self, tmp_path):
        csv = planted_csv(tmp_path, n=60, seed=3)
        out = tmp_path / "m"
        code = cli_main(["train", "--data", str(csv), "--protected", "z1,z2",
                         "--label", "label", "--scaling", "none",
                         "--gamma", "0.0", "--iters", "10",
                         "--algo", "marginal", "--out", str(out)])
        assert code == 0
        header = [l for l in (out / "trace.csv").read_text().splitlines()
                  if not l.startswith("#")][0]
        assert header.endswith("rich_gamma")


class TestSweepAndFrontier:
    def test_sweep_then_frontier_roundtrip(self, tmp_path):
        csv = planted_csv(tmp_path, n=60, seed=3)
        out = tmp_path / "sweep"
        code = cli_main(["sweep", "--data", str(csv), "--protected", "z1,z2",
                         "--label", "label", "--scaling", "none",
                         "--gamma", "0.0", "--gamma", "0.02",
                         "--iters", "15", "--out", str(out)])
        assert code == 0
        # pool in the sweep's own order (gamma ascending) so shared-prefix
        # duplicate points keep the same earliest provenance
        traces = [str(out / "trace_subgroup_g0.csv"),
                  str(out / "trace_subgroup_g0.02.csv")]
        assert all(os.path.exists(t) for t in traces)
        pooled = tmp_path / "pooled.csv"
        code = cli_main(["frontier", *traces, "--out", str(pooled)])
        assert code == 0
        assert filecmp.cmp(pooled, out / "frontier.csv", shallow=False)

    def test_single_point_frontier(self, tmp_path):
        trace = tmp_path / "trace_one.csv"
        trace.write_text(
            "# subfair trace\n# algo=subgroup gamma=0.5 C=10 iters=1\n"
            "t,eps_mix,gamma_mix,group_id,auditor_zero,eps_last\n"
            "0,0.25,0.013,0,1,0.25\n", encoding="utf-8")
        out = tmp_path / "front.csv"
        assert cli_main(["frontier", str(trace), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1] == "0.25,0.013,0.5,0,subgroup"

    def test_sweep_determinism_bytes(self, tmp_path):
        csv = planted_csv(tmp_path, n=60, seed=3)
        args = ["--data", str(csv), "--protected", "z1,z2", "--label", "label",
                "--scaling", "none", "--gamma", "0.0", "--gamma", "0.01",
                "--iters", "12"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli_main(["sweep", *args, "--out", str(a)]) == 0
        assert cli_main(["sweep", *args, "--out", str(b)]) == 0
        for name in sorted(os.listdir(a)):
            assert filecmp.cmp(a / name, b / name, shallow=False), name


class TestSurface:
    def test_surface_sequence(self, tmp_path, capsys):
        csv = planted_csv(tmp_path, n=60, seed=3)
        out = tmp_path / "surf"
        code = cli_main(["surface", "--data", str(csv), "--protected", "z1,z2",
                         "--label", "label", "--scaling", "none",
                         "--gamma", "0.0", "--iters", "20",
                         "--attrs", "z1,z2", "--checkpoints", "0,5,19",
                         "--out", str(out)])
        assert code == 0
        assert (out / "surface_t0.csv").exists()
        assert (out / "surface_t19.csv").exists()
        summary = (out / "surface_summary.csv").read_text().splitlines()
        assert summary[0] == "t,max_gamma_unfairness,frac_above_threshold"
        assert len(summary) == 4


class TestExitCodes:
    def test_bad_flags_exit_2(self, capsys):
        assert cli_main(["train", "--nonsense"]) == 2
        assert cli_main([]) == 2

    def test_runtime_failure_exit_1(self, capsys):
        code = cli_main(["train", "--data", "/nonexistent.csv",
                         "--gamma", "0.0"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_bad_model_file_exit_1(self, fixture_dir, tmp_path, capsys):
        empty = tmp_path / "empty.txt"
        empty.write_text("# nothing\n")
        code = cli_main(["audit", *dataset_flags(fixture_dir),
                         "--model", str(empty)])
        assert code == 1

    def test_console_script_entry(self, tmp_path):
        out = tmp_path / "fx"
        proc = subprocess.run([sys.executable, "-m", "subfair.cli",
                               "fixture", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert (out / "gerrymander.csv").exists()


class TestConfigFile:
    def test_ini_config_with_flag_overrides(self, tmp_path, fixture_dir):
        ini = tmp_path / "data.ini"
        ini.write_text("[dataset]\nprotected = race, gender\nlabel = label\n",
                       encoding="utf-8")
        out = tmp_path / "run"
        code = cli_main(["train", "--data", str(fixture_dir / "gerrymander.csv"),
                         "--config", str(ini), "--gamma", "1.0",
                         "--iters", "3", "--out", str(out)])
        assert code == 0

    def test_missing_config_file(self, fixture_dir):
        code = cli_main(["train", *dataset_flags(fixture_dir),
                         "--config", "/nope.ini", "--gamma", "0.0"])
        assert code == 1
