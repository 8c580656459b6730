"""End-to-end tests for the config-driven runner: exit codes and artifacts."""

import json

import numpy as np
import pytest

from infosub.cli import OUTPUT_ENV, main, resolve_config
from infosub.numerics import make_rng

TINY_SUBTRACTION = """
[subtraction]
z_dim = 2
pretrain_epochs = 5
total_epochs = 15
critic_steps = 1
batch_size = 32
predictor_epochs = 10
generator_hidden = [16, 16]
critic_hidden = [16, 16]
predictor_hidden = [16]
"""


def fair_config(tmp_path, extra=""):
    text = ("experiment = \"fair_synth\"\nlabel = \"t\"\nseed = 1\n"
            + TINY_SUBTRACTION + "\n[data]\nn = 200\n" + extra)
    path = tmp_path / "exp.toml"
    path.write_text(text)
    return path


def run_dir(tmp_path, experiment, label="t"):
    return tmp_path / "out" / experiment / label


class TestValidate:
    def test_valid_config_exit_zero(self, tmp_path):
        assert main(["validate", "--config", str(fair_config(tmp_path))]) == 0

    def test_missing_file_exit_two(self, tmp_path, capsys):
        assert main(["validate", "--config", str(tmp_path / "nope.toml")]) == 2
        assert "unreadable" in capsys.readouterr().err

    def test_broken_toml_exit_two(self, tmp_path, capsys):
        path = tmp_path / "broken.toml"
        path.write_text("experiment = [unterminated")
        assert main(["validate", "--config", str(path)]) == 2
        assert "unreadable" in capsys.readouterr().err

    def test_unknown_experiment_named(self, tmp_path, capsys):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "teleport"\n')
        assert main(["validate", "--config", str(path)]) == 2
        assert "experiment" in capsys.readouterr().out

    def test_all_violations_listed(self, tmp_path, capsys):
        path = tmp_path / "exp.toml"
        path.write_text(
            'experiment = "fair_synth"\n'
            'label = "a/b"\n'
            'bogus = 1\n'
            '[subtraction]\n'
            'z_dim = 0\n'
            'mystery = 2\n'
            '[oracle]\n'
            'ksg_neighbors = 0\n')
        assert main(["validate", "--config", str(path)]) == 2
        out = capsys.readouterr().out
        for needle in ("label", "bogus", "z_dim", "subtraction.mystery",
                       "oracle.ksg_neighbors"):
            assert needle in out, f"missing {needle!r} in:\n{out}"

    def test_validate_touches_nothing(self, tmp_path, monkeypatch):
        path = fair_config(tmp_path)
        monkeypatch.chdir(tmp_path)
        main(["validate", "--config", str(path)])
        assert sorted(p.name for p in tmp_path.iterdir()) == ["exp.toml"]

    def test_split_rejected_for_synthetic(self, tmp_path, capsys):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "fair_synth"\n[split]\nmode = "iid"\n')
        assert main(["validate", "--config", str(path)]) == 2
        assert "split" in capsys.readouterr().out


class TestResolve:
    def test_defaults_materialized(self):
        resolved, violations = resolve_config({"experiment": "fair_synth"})
        assert violations == []
        assert resolved["subtraction"]["leak_weight"] == 1.0
        assert resolved["subtraction"]["z_dim"] == 10
        assert resolved["oracle"]["ksg_neighbors"] >= 1
        assert resolved["data"]["n"] == 1500

    def test_output_precedence(self, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, "envroot")
        resolved, _ = resolve_config({"experiment": "sweep"})
        assert resolved["output"] == "envroot"
        resolved, _ = resolve_config({"experiment": "sweep",
                                      "output": "cfgroot"})
        assert resolved["output"] == "cfgroot"
        resolved, _ = resolve_config({"experiment": "sweep",
                                      "output": "cfgroot"},
                                     output_override="cli")
        assert resolved["output"] == "cli"

    def test_default_output_root(self, monkeypatch):
        monkeypatch.delenv(OUTPUT_ENV, raising=False)
        resolved, _ = resolve_config({"experiment": "sweep"})
        assert resolved["output"] == "runs"

    def test_seed_override_wins(self):
        resolved, _ = resolve_config({"experiment": "sweep", "seed": 3},
                                     seed_override=9)
        assert resolved["seed"] == 9
        assert resolved["subtraction"]["seed"] == 9

    def test_experiment_specific_defaults(self):
        resolved, violations = resolve_config({"experiment": "lotka_volterra"})
        assert violations == []
        sub = resolved["subtraction"]
        assert sub["leak_weight"] == 1.0
        assert sub["noise_start"] == 0.5
        assert sub["critic_steps"] == 4
        # user config still outranks the per-experiment layer
        resolved, _ = resolve_config({"experiment": "lotka_volterra",
                                      "subtraction": {"noise_start": 0.0}})
        assert resolved["subtraction"]["noise_start"] == 0.0


class TestRunFailure:
    def test_invalid_config_no_artifacts(self, tmp_path, capsys):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "fair_synth"\n[subtraction]\nz_dim = 0\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 2
        assert "z_dim" in capsys.readouterr().err
        assert not (tmp_path / "out").exists()

    def test_runtime_error_exit_one(self, tmp_path, capsys):
        bad_csv = tmp_path / "adult.csv"
        bad_csv.write_text("not,enough,fields\n1,2,3\n")
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "adult"\nlabel = "t"\n'
                        + TINY_SUBTRACTION
                        + f'\n[data]\ncsv = "{bad_csv}"\n'
                        '[split]\ntrain_n = 60\ntest_n = 40\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 1
        assert run_dir(tmp_path, "adult").joinpath("config.resolved").exists()


@pytest.fixture(scope="module")
def done(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("fair")
    path = fair_config(tmp_path)
    code = main(["run", "--config", str(path),
                 "--output", str(tmp_path / "out")])
    return code, tmp_path


class TestFairSynthRun:
    def test_exit_zero(self, done):
        assert done[0] == 0

    def test_artifacts_present(self, done):
        out = run_dir(done[1], "fair_synth")
        for name in ("config.resolved", "dataset.csv", "trace.csv",
                     "report.json", "report.txt"):
            assert (out / name).exists(), name
        for name in ("generator", "reconstructor", "critic_full",
                     "critic_leak"):
            assert (out / "checkpoints" / f"{name}.mlp").exists(), name

    def test_trace_rows_cover_epochs(self, done):
        lines = run_dir(done[1], "fair_synth").joinpath(
            "trace.csv").read_text().splitlines()
        assert len(lines) == 16  # header + one row per epoch

    def test_report_cells_finite(self, done):
        payload = json.loads(run_dir(done[1], "fair_synth").joinpath(
            "report.json").read_text())
        info = payload["info"]
        for cell in ("i_xy", "i_zy", "i_zx", "i_zxy", "i_zy_given_x"):
            assert np.isfinite(info[cell]), cell
        assert payload["seed"] == 1

    def test_resolved_records_defaults(self, done):
        text = run_dir(done[1], "fair_synth").joinpath(
            "config.resolved").read_text()
        assert "leak_weight = 1.0" in text
        assert 'experiment = "fair_synth"' in text

    def test_rerun_from_resolved_reproduces_trace(self, done):
        out = run_dir(done[1], "fair_synth")
        before = out.joinpath("trace.csv").read_bytes()
        dataset_before = out.joinpath("dataset.csv").read_bytes()
        assert main(["run", "--config", str(out / "config.resolved")]) == 0
        assert out.joinpath("trace.csv").read_bytes() == before
        assert out.joinpath("dataset.csv").read_bytes() == dataset_before

    def test_seed_flag_changes_trace(self, done, tmp_path):
        path = fair_config(tmp_path)
        code = main(["run", "--config", str(path), "--seed", "2",
                     "--output", str(tmp_path / "out")])
        assert code == 0
        moved = run_dir(tmp_path, "fair_synth").joinpath(
            "trace.csv").read_bytes()
        original = run_dir(done[1], "fair_synth").joinpath(
            "trace.csv").read_bytes()
        assert moved != original


class TestGaussianOracleRun:
    def test_tiny_run(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text(
            'experiment = "gaussian_oracle"\nlabel = "t"\n'
            '[data]\nrhos = [0.9]\nn = 400\ncritic_steps = 60\n'
            'hidden = [16, 16]\nbatch_size = 128\neval_perms = 2\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 0
        out = run_dir(tmp_path, "gaussian_oracle")
        payload = json.loads(out.joinpath("report.json").read_text())
        row = payload["rows"][0]
        assert row["rho"] == 0.9
        assert abs(row["ksg_err"]) < 0.15
        assert np.isfinite(row["smile_nats"])
        assert out.joinpath("trace.csv").exists()


class TestSweepRun:
    def test_tiny_run(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text(
            'experiment = "sweep"\nlabel = "t"\n'
            + TINY_SUBTRACTION
            + '\n[data]\nleak_weights = [0.0, 1.0]\nn = 250\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 0
        out = run_dir(tmp_path, "sweep")
        lines = out.joinpath("sweep.csv").read_text().splitlines()
        assert len(lines) == 3  # header + one row per weight
        payload = json.loads(out.joinpath("report.json").read_text())
        assert [p["leak_weight"] for p in payload["points"]] == [0.0, 1.0]
        assert out.joinpath("checkpoints", "trace_weight1.csv").exists()


class TestVennRun:
    def test_tiny_run(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "venn"\nlabel = "t"\nseed = 1\n'
                        + TINY_SUBTRACTION)
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 0
        out = run_dir(tmp_path, "venn")
        payload = json.loads(out.joinpath("report.json").read_text())
        assert set(payload["base"]) == {"i_g_s", "i_g_w", "i_g_sw"}
        names = ["beyond_both", "shared_S_only", "shared_W_only", "shared_all"]
        assert list(payload["sectors"]) == names
        for name in names:
            assert out.joinpath("checkpoints", f"{name}.mlp").exists()
            assert out.joinpath("checkpoints", f"trace_{name}.csv").exists()
        assert "beyond_both" in out.joinpath("report.txt").read_text()


def write_adult_fixture(path, n=120):
    rng = make_rng(0)
    rows = []
    for i in range(n):
        sex = "Female" if i % 2 == 0 else "Male"
        income = "<=50K" if (i * 13) % 10 < 6 else ">50K"
        work = ("Private", "Self-emp", "Gov")[i % 3]
        rows.append(
            f"{20 + (i % 40)}, {work}, {10000 + i}, Bachelors, "
            f"{8 + (i % 8)}, Single, Craft, Husband, White, {sex}, "
            f"{float(rng.integers(0, 500))}, 0, {30 + (i % 20)}, "
            f"United-States, {income}")
    path.write_text("\n".join(rows) + "\n")


def write_covertype_fixture(path, n=200):
    rng = make_rng(1)
    rows = []
    for i in range(n):
        cont = [f"{v:.3f}" for v in rng.normal(size=10)]
        area = ["0"] * 4
        area[i % 2] = "1"  # two domains populated
        soil = ["0"] * 40
        soil[i % 40] = "1"
        label = str(1 + (i % 7))
        rows.append(",".join(cont + area + soil + [label]))
    path.write_text("\n".join(rows) + "\n")


class TestAdultRun:
    def test_tiny_run(self, tmp_path):
        csv = tmp_path / "adult.csv"
        write_adult_fixture(csv)
        path = tmp_path / "exp.toml"
        path.write_text(
            'experiment = "adult"\nlabel = "t"\n'
            + TINY_SUBTRACTION
            + f'\n[data]\ncsv = "{csv}"\n'
            '[split]\ntrain_n = 60\ntest_n = 40\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 0
        out = run_dir(tmp_path, "adult")
        payload = json.loads(out.joinpath("report.json").read_text())
        assert set(payload["accuracy"]) == {"x_features", "z_features"}
        assert set(payload["fairness"]) == {"x_features", "z_features"}
        gaps = payload["fairness"]["z_features"]
        assert np.isfinite(gaps["gap_rms"])
        assert (out / "checkpoints" / "predictor.mlp").exists()
        text = out.joinpath("report.txt").read_text()
        assert "Gap RMS" in text

    def test_missing_csv_rejected(self, tmp_path, capsys):
        path = tmp_path / "exp.toml"
        path.write_text('experiment = "adult"\n')
        assert main(["validate", "--config", str(path)]) == 2
        assert "data.csv" in capsys.readouterr().out


class TestCovertypeRun:
    def test_tiny_run(self, tmp_path):
        csv = tmp_path / "cover.csv"
        write_covertype_fixture(csv)
        path = tmp_path / "exp.toml"
        path.write_text(
            'experiment = "covertype"\nlabel = "t"\n'
            + TINY_SUBTRACTION
            + f'\n[data]\ncsv = "{csv}"\nsubsample = 80\n')
        code = main(["run", "--config", str(path),
                     "--output", str(tmp_path / "out")])
        assert code == 0
        out = run_dir(tmp_path, "covertype")
        payload = json.loads(out.joinpath("report.json").read_text())
        assert set(payload["accuracy"]) == {"x_features", "z_features",
                                            "xz_features"}
        for v in payload["accuracy"].values():
            assert 0.0 <= v <= 1.0
        assert payload["train_rows"] == 80
