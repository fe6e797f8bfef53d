import json

import numpy as np
import pytest

from ordinalcps import (
    CalibratedPredictor,
    DatasetFormatError,
    PredictorFormatError,
    SynthSpec,
    load_dataset_csv,
    load_predictor,
    run_trials,
    save_dataset_csv,
    save_predictor,
    synth_generate,
    write_report,
)
from ordinalcps.harness import TrialReport
from ordinalcps.io import DatasetFileSpec, REPORT_CSV_HEADER

ROW = "0.1,0.2,0.4,0.2,0.1"


def _write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadDatasetCsv:
    def test_two_rows_no_header(self, tmp_path):
        path = _write(tmp_path, f"{ROW},3\n{ROW},3\n")
        d = load_dataset_csv(DatasetFileSpec(path, has_header=False))
        assert d.n == 2 and d.K == 5
        # default spec sniffs the absence of a header from the first field
        assert load_dataset_csv(path).n == 2

    def test_header_and_comments_skipped(self, tmp_path):
        path = _write(tmp_path, f"# config: {{}}\np_1,p_2,p_3,p_4,p_5,label\n{ROW},3\n")
        d = load_dataset_csv(path)
        assert d.n == 1

    def test_label_out_of_range_names_row(self, tmp_path):
        path = _write(tmp_path, f"{ROW},3\n{ROW},6\n", "bad.csv")
        with pytest.raises(DatasetFormatError, match="row 2.*out of range"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))

    def test_bad_mass_names_row(self, tmp_path):
        path = _write(tmp_path, "0.1,0.2,0.4,0.2,0.08,3\n", "bad.csv")
        with pytest.raises(DatasetFormatError, match="row 1.*mass"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))

    def test_non_numeric_and_arity(self, tmp_path):
        path = _write(tmp_path, f"{ROW},3\n0.1,x,0.4,0.2,0.2,3\n", "bad.csv")
        with pytest.raises(DatasetFormatError, match="row 2"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))
        path = _write(tmp_path, f"{ROW},3\n0.5,0.5,1\n", "bad2.csv")
        with pytest.raises(DatasetFormatError, match="row 2.*fields"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))

    def test_non_integer_label(self, tmp_path):
        path = _write(tmp_path, f"{ROW},3.5\n", "bad.csv")
        with pytest.raises(DatasetFormatError, match="row 1.*integer"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))

    def test_empty_file(self, tmp_path):
        path = _write(tmp_path, "", "empty.csv")
        with pytest.raises(DatasetFormatError, match="no data rows"):
            load_dataset_csv(DatasetFileSpec(path, has_header=False))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetFormatError, match="no such file"):
            load_dataset_csv(tmp_path / "nope.csv")

    def test_expected_k_enforced(self, tmp_path):
        path = _write(tmp_path, f"{ROW},3\n")
        with pytest.raises(DatasetFormatError, match="fields"):
            load_dataset_csv(DatasetFileSpec(path, expected_k=4, has_header=False))

    def test_round_trip_bit_exact(self, tmp_path):
        d = synth_generate(SynthSpec(k=13, n=120, sigma_range=(0.7, 6.0), seed=99))
        path = tmp_path / "round.csv"
        save_dataset_csv(d, path)
        loaded = load_dataset_csv(path)
        assert np.array_equal(loaded.scores, d.scores)
        assert np.array_equal(loaded.labels, d.labels)

    def test_loading_never_renormalizes(self, tmp_path):
        path = _write(tmp_path, "0.5000004,0.5,1\n", "edge.csv")
        d = load_dataset_csv(DatasetFileSpec(path, has_header=False))
        assert d.scores[0, 0] == 0.5000004


class TestPredictorRoundTrip:
    def _pred(self, tau):
        return CalibratedPredictor(
            method="min-rcps",
            tau_hat=tau,
            lam=0.003,
            alpha=0.1,
            n_cal=1000,
            K=50,
            diagnostics={"monotone_fraction": 1.0, "coverage_count": 905,
                         "target_count": 901, "search_iters": 30},
        )

    def test_field_for_field(self, tmp_path):
        path = tmp_path / "pred.json"
        pred = self._pred(0.87234982374)
        save_predictor(pred, path)
        loaded = load_predictor(path)
        assert loaded == pred

    def test_tiny_nudge_survives_exactly(self, tmp_path):
        path = tmp_path / "pred.json"
        save_predictor(self._pred(0.1 + 1e-12), path)
        assert load_predictor(path).tau_hat == 0.1 + 1e-12

    def test_exact_key_set_and_order(self, tmp_path):
        path = tmp_path / "pred.json"
        save_predictor(self._pred(0.5), path)
        doc = json.loads(path.read_text())
        assert list(doc) == [
            "format_version", "method", "K", "alpha", "lambda", "tau_hat",
            "n_cal", "diagnostics",
        ]
        assert doc["format_version"] == 1
        assert doc["lambda"] == 0.003

    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "pred.json"
        save_predictor(self._pred(0.5), path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(PredictorFormatError, match="format_version"):
            load_predictor(path)

    def test_schema_violations_rejected(self, tmp_path):
        path = tmp_path / "pred.json"
        save_predictor(self._pred(0.5), path)
        doc = json.loads(path.read_text())
        del doc["tau_hat"]
        path.write_text(json.dumps(doc))
        with pytest.raises(PredictorFormatError, match="schema"):
            load_predictor(path)
        doc = json.loads(save_and_read(self._pred(0.5), tmp_path))
        doc["extra"] = 1
        path.write_text(json.dumps(doc))
        with pytest.raises(PredictorFormatError, match="schema"):
            load_predictor(path)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "pred.json"
        path.write_text("{not json")
        with pytest.raises(PredictorFormatError, match="JSON"):
            load_predictor(path)


def save_and_read(pred, tmp_path):
    path = tmp_path / "pred.json"
    save_predictor(pred, path)
    return path.read_text()


class TestReports:
    @pytest.fixture
    def report(self):
        d = synth_generate(SynthSpec(k=8, n=200, seed=55))
        return run_trials(d, ["min-cps", "naive-cdf"], 0.1, 0.0, n_trials=2, base_seed=1)

    def test_csv_layout(self, report, tmp_path):
        path = tmp_path / "report.csv"
        write_report(report, path, "csv", config_line="# config: {}")
        lines = path.read_text().splitlines()
        assert lines[0] == "# config: {}"
        assert lines[1] == REPORT_CSV_HEADER
        assert len(lines) == 2 + 4  # 2 trials x 2 methods

    def test_empty_report_is_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_report(TrialReport(records=()), path, "csv")
        assert path.read_text() == REPORT_CSV_HEADER + "\n"

    def test_json_and_csv_agree_on_shared_fields(self, report, tmp_path):
        jpath = tmp_path / "report.json"
        cpath = tmp_path / "report.csv"
        write_report(report, jpath, "json")
        write_report(report, cpath, "csv")
        doc = json.loads(jpath.read_text())
        rows = [l.split(",") for l in cpath.read_text().splitlines()[1:]]
        assert len(doc["trials"]) == len(rows)
        for trial, row in zip(doc["trials"], rows):
            assert trial["trial_id"] == int(row[0])
            assert trial["method"] == row[2]
            assert trial["coverage"] == float(row[5])
            assert trial["avg_set_size"] == float(row[6])
        assert doc["metadata"]["std_divisor"] == "n-1"
        assert {a["method"] for a in doc["aggregates"]} == {"min-cps", "naive-cdf"}

    def test_unknown_format_rejected(self, report, tmp_path):
        with pytest.raises(ValueError):
            write_report(report, tmp_path / "x.xml", "xml")
