import json

import pytest

from cstomo.cli import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, main

CANONICAL_GHZ_WORDS = "XXXX,XXYY,XYXY,XYYX,YXXY,YXYX,YYXX,YYYY,ZZZZ"


def run(*argv):
    return main(list(argv))


@pytest.fixture
def dataset_file(tmp_path):
    path = tmp_path / "data.json"
    code = run(
        "simulate", "--state", "dephased-ghz", "--n", "2", "--dephase", "0.3",
        "--shots", "650", "--seed", "11", "--output", str(path),
    )
    assert code == EXIT_OK
    return path


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run(
                "simulate", "--state", "ghz", "--n", "2", "--seed", "3",
                "--output", str(out),
            ) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("simulate", "--state", "ghz", "--n", "2", "--seed", "3", "--output", str(a))
        run("simulate", "--state", "ghz", "--n", "2", "--seed", "4", "--output", str(b))
        assert a.read_bytes() != b.read_bytes()

    def test_explicit_settings(self, tmp_path):
        out = tmp_path / "d.json"
        assert run(
            "simulate", "--state", "mixed", "--n", "2", "--settings", "XX,ZZ",
            "--output", str(out),
        ) == EXIT_OK
        payload = json.loads(out.read_text())
        assert [r["word"] for r in payload["records"]] == ["XX", "ZZ"]

    def test_csv_format(self, tmp_path, capsys):
        assert run(
            "simulate", "--state", "ghz", "--n", "1", "--format", "csv"
        ) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "word,outcome_index,count"

    def test_missing_state(self):
        assert run("simulate", "--n", "2") == EXIT_INVALID


class TestReconstruct:
    def test_auto_epsilon(self, dataset_file, tmp_path, capsys):
        out = tmp_path / "rec.json"
        code = run(
            "reconstruct", "--input", str(dataset_file), "--auto-epsilon",
            "--output", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["status"] == "converged"
        assert payload["estimate"]["dim"] == 4

    def test_zero_epsilon_infeasible(self, dataset_file):
        assert run(
            "reconstruct", "--input", str(dataset_file), "--epsilon", "0"
        ) == EXIT_INFEASIBLE

    def test_tiny_epsilon_infeasible(self, dataset_file):
        assert run(
            "reconstruct", "--input", str(dataset_file), "--epsilon", "1e-9"
        ) == EXIT_INFEASIBLE

    def test_missing_epsilon_flags(self, dataset_file):
        assert run("reconstruct", "--input", str(dataset_file)) == EXIT_INVALID

    def test_missing_file(self):
        assert run(
            "reconstruct", "--input", "/nonexistent.json", "--auto-epsilon"
        ) == EXIT_INVALID

    def test_unknown_command(self):
        assert run("frobnicate") == EXIT_INVALID


class TestCrossval:
    def test_small_run(self, dataset_file, tmp_path):
        out = tmp_path / "cv.json"
        code = run(
            "crossval", "--input", str(dataset_file), "--m-values", "6",
            "--multipliers", "1.0,2.0", "--folds", "3", "--repetitions", "1",
            "--seed", "5", "--output", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert len(payload["grid"]) == 2


class TestDfe:
    def test_ghz_end_to_end(self, tmp_path):
        data = tmp_path / "ghz.json"
        assert run(
            "simulate", "--state", "dephased-ghz", "--n", "4", "--dephase", "0.3",
            "--settings", CANONICAL_GHZ_WORDS, "--shots", "650", "--seed", "21",
            "--output", str(data),
        ) == EXIT_OK
        out = tmp_path / "dfe.json"
        assert run(
            "dfe", "--input", str(data), "--target", "ghz", "--output", str(out)
        ) == EXIT_OK
        payload = json.loads(out.read_text())
        # dephasing 0.3 puts the squared overlap at (1 + 0.7) / 2 = 0.85
        assert 0.75 <= payload["f2"] <= 0.95
        assert payload["std_f2"] > 0.0
        assert sorted(payload["settings"]) == CANONICAL_GHZ_WORDS.split(",")

    def test_missing_settings(self, dataset_file):
        assert run(
            "dfe", "--input", str(dataset_file), "--target", "ghz"
        ) != EXIT_OK


class TestBootstrap:
    def test_small_run(self, tmp_path):
        from cstomo import dephased_ghz

        est_path = tmp_path / "est.json"
        est_path.write_text(dephased_ghz(2, 0.3).to_json())
        out = tmp_path / "boot.json"
        code = run(
            "bootstrap", "--estimate", str(est_path), "--repetitions", "4",
            "--seed", "2", "--output", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["repetitions"] == 4
        assert 0.0 <= payload["fidelity_mean"] <= 1.0


class TestSweeps:
    def test_sweep_m(self, dataset_file, tmp_path):
        out = tmp_path / "sweep.json"
        code = run(
            "sweep-m", "--input", str(dataset_file), "--m-values", "6,9",
            "--draws", "2", "--seed", "1", "--output", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert [c["m"] for c in payload["cells"]] == [6, 9]

    def test_sweep_grid(self, tmp_path):
        out = tmp_path / "grid.json"
        code = run(
            "sweep-grid", "--state", "dephased-ghz", "--n", "2", "--dephase", "0.3",
            "--m-values", "6", "--multipliers", "1.0", "--repetitions", "2",
            "--seed", "1", "--output", str(out),
        )
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert len(payload["cells"]) == 1
