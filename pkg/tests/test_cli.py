import json

import numpy as np
import pytest

from conftest import make_recording, stim
from painmon.cli import main
from painmon.ingest import read_epochs, write_bundle, write_epochs
from painmon.evaluation import SynthConfig, synth_generate


@pytest.fixture()
def bundle(tmp_path):
    markers = []
    pos = 3000
    for i in range(6):
        markers.append(stim("S30" if i % 2 else "S70", pos))
        pos += 4500
    rec = make_recording(n_channels=6, seconds=70.0, markers=markers)
    return write_bundle(rec, tmp_path / "sess01")


@pytest.fixture()
def small_cache(tmp_path):
    es = synth_generate(SynthConfig(n_subjects=3, epochs_per_class=4,
                                    epoch_seconds=2.0, seed=5))
    path = tmp_path / "epochs.bin"
    write_epochs(path, es)
    return path


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag(self):
        assert main(["ingest"]) == 1

    def test_missing_file_is_data_error(self, tmp_path):
        assert main(["ingest", "--bundle", str(tmp_path / "nope.vhdr")]) == 2

    def test_corrupt_cache_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"garbage")
        assert main(["featurize", "--epochs", str(bad),
                     "--matrix-out", str(tmp_path / "m.bin")]) == 2


class TestPipelineFlow:
    def test_ingest(self, bundle, tmp_path, capsys):
        out = tmp_path / "epochs.bin"
        assert main(["ingest", "--bundle", str(bundle),
                     "--epochs-out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "epochs=6" in printed
        assert len(read_epochs(out)) == 6

    def test_preprocess(self, bundle, tmp_path, capsys):
        out = tmp_path / "clean.bin"
        assert main(["preprocess", "--bundle", str(bundle),
                     "--epochs-out", str(out),
                     "--ptp-threshold", "1e9"]) == 0
        es = read_epochs(out)
        assert es.fs_hz == 500.0
        assert len(es) == 6

    def test_featurize_train_importance(self, small_cache, tmp_path, capsys):
        matrix = tmp_path / "features.bin"
        manifest_txt = tmp_path / "manifest.txt"
        assert main(["featurize", "--epochs", str(small_cache),
                     "--matrix-out", str(matrix),
                     "--manifest-out", str(manifest_txt)]) == 0
        assert manifest_txt.exists()
        header = capsys.readouterr().err
        assert "manifest=" in header

        model_path = tmp_path / "model.bin"
        assert main(["train", "--matrix", str(matrix), "--algorithm",
                     "gaussian_nb", "--model-out", str(model_path),
                     "--seed", "3"]) == 0
        assert model_path.exists()

        report_dir = tmp_path / "imp"
        assert main(["importance", "--matrix", str(matrix),
                     "--model", str(model_path), "--repeats", "2",
                     "--report-out", str(report_dir)]) == 0
        assert (report_dir / "importance.tsv").exists()
        assert (report_dir / "importance.png").exists()

    def test_train_hyper_overrides(self, small_cache, tmp_path):
        matrix = tmp_path / "features.bin"
        main(["featurize", "--epochs", str(small_cache),
              "--matrix-out", str(matrix)])
        model_path = tmp_path / "knn.bin"
        assert main(["train", "--matrix", str(matrix), "--algorithm", "knn",
                     "--hyper", "k=3", "--model-out", str(model_path)]) == 0
        from painmon.models import load_model
        assert load_model(model_path).hyperparams["k"] == 3

    def test_evaluate_writes_reports_and_figures(self, small_cache, tmp_path,
                                                 capsys):
        report_dir = tmp_path / "report"
        assert main(["evaluate", "--epochs", str(small_cache),
                     "--algorithms", "gaussian_nb,linear_discriminant",
                     "--report-out", str(report_dir), "--seed", "7"]) == 0
        printed = capsys.readouterr().out
        assert "Clinical Grade" in printed
        assert (report_dir / "report.tsv").exists()
        assert (report_dir / "report.json").exists()
        assert (report_dir / "accuracy.png").exists()
        assert (report_dir / "confusion.png").exists()
        payload = json.loads((report_dir / "report.json").read_text())
        assert set(payload["algorithms"]) == {"gaussian_nb",
                                              "linear_discriminant"}

    def test_evaluate_unknown_algorithm(self, small_cache, tmp_path):
        assert main(["evaluate", "--epochs", str(small_cache),
                     "--algorithms", "quantum_svm",
                     "--report-out", str(tmp_path / "r")]) == 2

    def test_synth_deterministic(self, tmp_path):
        a = tmp_path / "a.bin"
        b = tmp_path / "b.bin"
        for out in (a, b):
            assert main(["synth", "--epochs-out", str(out), "--subjects", "3",
                         "--epochs-per-class", "2", "--seed", "11"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_importance_manifest_gate(self, small_cache, tmp_path):
        matrix = tmp_path / "features.bin"
        main(["featurize", "--epochs", str(small_cache),
              "--matrix-out", str(matrix)])
        model_path = tmp_path / "model.bin"
        main(["train", "--matrix", str(matrix), "--algorithm", "gaussian_nb",
              "--model-out", str(model_path)])
        # A matrix built under a different feature config must be refused.
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(
            {"welch": {"segment_seconds": 0.5, "overlap": 0.5}}))
        other_matrix = tmp_path / "other.bin"
        main(["featurize", "--epochs", str(small_cache),
              "--matrix-out", str(other_matrix), "--config", str(cfg_path)])
        assert main(["importance", "--matrix", str(other_matrix),
                     "--model", str(model_path),
                     "--report-out", str(tmp_path / "x")]) == 2


class TestDataDirEnv:
    def test_relative_paths_resolve_against_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PAINMON_DATA_DIR", str(tmp_path))
        assert main(["synth", "--epochs-out", "cohort.bin", "--subjects", "3",
                     "--epochs-per-class", "2", "--seed", "1"]) == 0
        assert (tmp_path / "cohort.bin").exists()
        assert main(["featurize", "--epochs", "cohort.bin",
                     "--matrix-out", "cohort.fmx"]) == 0
        assert (tmp_path / "cohort.fmx").exists()

    def test_absolute_paths_untouched(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PAINMON_DATA_DIR", str(tmp_path / "elsewhere"))
        out = tmp_path / "direct.bin"
        assert main(["synth", "--epochs-out", str(out), "--subjects", "3",
                     "--epochs-per-class", "2", "--seed", "1"]) == 0
        assert out.exists()
