import csv
import json

import pytest

from engage_miner.cli import main


def _run_pipeline(out_dir, n=80, seed=3, strength=1.0, capsys=None):
    assert main(["synth", "--n", str(n), "--seed", str(seed),
                 "--implication-strength", str(strength),
                 "--out-dir", str(out_dir)]) == 0
    assert main(["etl", "--out-dir", str(out_dir)]) == 0
    assert main(["cluster", "--out-dir", str(out_dir)]) == 0
    assert main(["mine", "--out-dir", str(out_dir)]) == 0
    if capsys is not None:
        capsys.readouterr()


class TestPipeline:
    def test_end_to_end_contains_planted_rule(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        doc = json.loads((tmp_path / "report.json").read_text())
        planted = {
            "antecedent": [
                {"attribute": "engagement_level", "value": "H"},
                {"attribute": "quiz1", "value": "90+"},
            ],
            "consequent": [{"attribute": "course_grade", "value": "90+"}],
        }
        match = [
            r
            for r in doc["rules"]
            if r["antecedent"] == planted["antecedent"]
            and r["consequent"] == planted["consequent"]
        ]
        assert match and match[0]["confidence"] == 1.0 and match[0]["lift"] > 1.0

    def test_config_echo_matches_flags(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        assert main(["mine", "--out-dir", str(tmp_path), "--min-support", "0.15",
                     "--min-confidence", "0.95"]) == 0
        capsys.readouterr()
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["config"]["min_support"] == 0.15
        assert doc["config"]["min_confidence"] == 0.95

    def test_every_rule_row_satisfies_printed_thresholds(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        doc = json.loads((tmp_path / "report.json").read_text())
        cfg = doc["config"]
        assert doc["rules"], "pipeline should find rules on planted data"
        for r in doc["rules"]:
            assert r["support"] >= cfg["min_support"]
            assert r["confidence"] >= cfg["min_confidence"]
            assert r["lift"] > cfg["min_lift"]

    def test_algorithm_agreement_identical_bytes(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        outputs = {}
        for algo in ("apriori", "fpgrowth"):
            assert main(["mine", "--out-dir", str(tmp_path), "--algorithm", algo,
                         "--format", "csv"]) == 0
            outputs[algo] = capsys.readouterr().out
        assert outputs["apriori"] == outputs["fpgrowth"]

    def test_report_rerender_matches_mine_output(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        assert main(["mine", "--out-dir", str(tmp_path), "--format", "text"]) == 0
        mined = capsys.readouterr().out
        assert main(["report", "--out-dir", str(tmp_path), "--format", "text"]) == 0
        assert capsys.readouterr().out == mined

    def test_report_to_file(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        out = tmp_path / "rules.csv"
        assert main(["report", "--out-dir", str(tmp_path), "--format", "csv",
                     "--out", str(out)]) == 0
        assert out.read_text().startswith("antecedent,consequent,")

    def test_features_have_18_columns(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        with open(tmp_path / "features.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows[0]) == 18
        assert all(len(r) == 18 for r in rows[1:])

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        _run_pipeline(tmp_path, capsys=capsys)
        first = {
            name: (tmp_path / name).read_bytes()
            for name in ("engagement_raw.csv", "levels.csv", "features.csv", "report.json")
        }
        assert main(["etl", "--out-dir", str(tmp_path)]) == 0
        assert main(["cluster", "--out-dir", str(tmp_path)]) == 0
        assert main(["mine", "--out-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        for name, payload in first.items():
            assert (tmp_path / name).read_bytes() == payload, name


class TestSequencesCommand:
    def test_patterns_csv_written(self, tmp_path, capsys):
        assert main(["synth", "--n", "20", "--seed", "1", "--out-dir", str(tmp_path)]) == 0
        assert main(["sequences", "--out-dir", str(tmp_path), "--min-support", "0.9",
                     "--max-len", "2"]) == 0
        out = capsys.readouterr().out
        assert "extension" in out  # labeled as such
        with open(tmp_path / "patterns.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["pattern", "support"]
        assert len(rows) > 1


class TestErrors:
    def test_missing_input_exits_1(self, tmp_path, capsys):
        assert main(["mine", "--out-dir", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["mine", "--out-dir", str(tmp_path), "--algorithm", "magic"])
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["dance"])
        assert exc.value.code == 2

    def test_data_error_cites_row(self, tmp_path, capsys):
        assert main(["synth", "--n", "5", "--seed", "0", "--out-dir", str(tmp_path)]) == 0
        grades = tmp_path / "grades.csv"
        lines = grades.read_text().splitlines()
        lines[1] = lines[1].rsplit(",", 1)[0] + ",150.0"
        grades.write_text("\n".join(lines) + "\n")
        assert main(["etl", "--out-dir", str(tmp_path)]) == 1
        assert "row 2" in capsys.readouterr().err

    def test_keep_partial_includes_grade_only_students(self, tmp_path, capsys):
        _run_pipeline(tmp_path, n=30, capsys=capsys)
        grades = tmp_path / "grades.csv"
        with open(grades, "a", newline="") as fh:
            fh.write("zz99,50,50,50,50,50,50,50\n")
        assert main(["mine", "--out-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        with open(tmp_path / "reconciliation.csv", newline="") as fh:
            recon = list(csv.reader(fh))
        assert ["zz99", "missing-events"] in recon
        with open(tmp_path / "features.csv", newline="") as fh:
            ids = [r[0] for r in csv.reader(fh)][1:]
        assert "zz99" not in ids
        assert main(["mine", "--out-dir", str(tmp_path), "--keep-partial"]) == 0
        capsys.readouterr()
        with open(tmp_path / "features.csv", newline="") as fh:
            ids = [r[0] for r in csv.reader(fh)][1:]
        assert "zz99" in ids
