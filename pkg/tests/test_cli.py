import json

import pytest

from entropylens.cli import run


@pytest.fixture
def toy6_args(data_dir):
    return ["--input", str(data_dir / "toy6.csv"),
            "--schema", str(data_dir / "toy6.schema.json")]


@pytest.fixture
def toy6_hier_args(data_dir):
    return ["--input", str(data_dir / "toy6.csv"),
            "--schema", str(data_dir / "toy6_hier.schema.json")]


class TestAnalyze:
    def test_json_golden(self, toy6_args, capsys):
        code = run(["analyze", *toy6_args, "--epsilon0", "0.4",
                    "--k-max", "3", "--format", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["minimal_risky"] == [["age"], ["sex", "zip"]]

    def test_table_default_format(self, toy6_args, capsys):
        assert run(["analyze", *toy6_args, "--epsilon0", "0.4"]) == 0
        assert "{age}" in capsys.readouterr().out

    def test_fail_on_risk(self, toy6_args):
        assert run(["analyze", *toy6_args, "--epsilon0", "0.4",
                    "--fail-on-risk"]) == 2

    def test_epsilon0_out_of_range_is_usage_error(self, toy6_args):
        with pytest.raises(SystemExit) as exc:
            run(["analyze", *toy6_args, "--epsilon0", "1.5"])
        assert exc.value.code == 64

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 64

    def test_missing_file_is_data_error(self, data_dir, capsys):
        code = run(["analyze", "--input", str(data_dir / "toy6.csv"),
                    "--schema", str(data_dir / "toy6.schema.json"),
                    "--aux", "not_a_column"])
        assert code == 65
        assert "UnknownColumn" in capsys.readouterr().err

    def test_output_file(self, toy6_args, tmp_path):
        out = tmp_path / "bundle.json"
        assert run(["analyze", *toy6_args, "--epsilon0", "0.4",
                    "--format", "json", "--output", str(out)]) == 0
        assert json.loads(out.read_text())["minimal_risky"]

    def test_env_override(self, toy6_args, capsys, monkeypatch):
        monkeypatch.setenv("ENTROPYLENS_EPSILON0", "0.4")
        monkeypatch.setenv("ENTROPYLENS_FORMAT", "json")
        assert run(["analyze", *toy6_args]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["config"]["epsilon0"] == 0.4


class TestPlan:
    def test_hide(self, toy6_args, capsys):
        assert run(["plan", "hide", *toy6_args]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["vault_columns"] == ["ssn"]
        assert doc["surrogate_column_name"] == "local_id"

    def test_hide_apply_writes_tables(self, toy6_args, tmp_path):
        assert run(["plan", "hide", *toy6_args, "--apply",
                    "--output-dir", str(tmp_path),
                    "--output", str(tmp_path / "plan.json")]) == 0
        vault = (tmp_path / "toy6.vault.csv").read_text()
        working = (tmp_path / "toy6.working.csv").read_text()
        assert "ssn" in vault.splitlines()[0]
        assert "ssn" not in working.splitlines()[0]
        assert "local_id" in working.splitlines()[0]

    def test_separate(self, toy6_args, capsys):
        assert run(["plan", "separate", *toy6_args, "--epsilon0", "0.4",
                    "--k-max", "3"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["groups"] == [["zip"], ["sex"]]
        assert doc["unseparable"] == ["age"]
        assert doc["violations"] == []

    def test_minimize(self, toy6_args, capsys):
        assert run(["plan", "minimize", *toy6_args, "--epsilon0", "0.4"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["strip_columns"] == []

    def test_abstract(self, toy6_hier_args, capsys):
        assert run(["plan", "abstract", *toy6_hier_args, "--epsilon0", "0.4",
                    "--k-max", "3"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["target_met"] is True
        assert doc["achieved"] > 0.4


class TestWhatif:
    def test_generalize(self, toy6_hier_args, capsys):
        assert run(["whatif", *toy6_hier_args, "--epsilon0", "0.4",
                    "--k-max", "3", "--transform", "generalize",
                    "--column", "age", "--level", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["after"]["min_epsilon"] >= doc["before"]["min_epsilon"]

    def test_generalize_requires_column(self, toy6_hier_args):
        with pytest.raises(SystemExit) as exc:
            run(["whatif", *toy6_hier_args, "--transform", "generalize"])
        assert exc.value.code == 64

    def test_hide(self, toy6_args, capsys):
        assert run(["whatif", *toy6_args, "--epsilon0", "0.4",
                    "--transform", "hide"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["before"]["min_epsilon"] == doc["after"]["min_epsilon"]


class TestLink:
    def test_link_analyze(self, toy6_args, data_dir, capsys):
        code = run(["link", *toy6_args,
                    "--linked-input", str(data_dir / "employer.csv"),
                    "--linked-schema", str(data_dir / "employer.schema.json"),
                    "--epsilon0", "0.4", "--k-max", "3", "--format", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        names = [c["name"] for c in doc["dataset"]["columns"]]
        assert "employer.employer_zip" in names
        assert [["age"], ["sex", "zip"]] == [
            s for s in doc["minimal_risky"] if "employer.employer_zip" not in s
        ]
