import json
import os

import pytest
from click.testing import CliRunner

from app import VerifierApp, cli
from config.settings import REPORT_DIR


@pytest.fixture
def invoke():
    runner = CliRunner()
    return lambda *args: runner.invoke(cli, list(args))


class TestVerify:
    def test_passing_suite(self, invoke, tmp_path):
        path = tmp_path / "report.json"
        result = invoke("verify", "lattice-identities", "--order", "1", "--json", str(path))
        assert result.exit_code == 0, result.output
        assert "3 passed, 0 failed, 0 skipped" in result.output
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["passed"]
        assert data["config"]["order"] == "1"

    def test_slope_option(self, invoke):
        result = invoke("verify", "k-canonical", "--slope", "1/4", "--order", "1")
        assert result.exit_code == 0, result.output
        assert "s=1/4" in result.output

    def test_failing_control_exits_one(self, invoke):
        result = invoke("verify", "duality", "--preset", "broken-odd", "--order", "1", "--slope", "1/4")
        assert result.exit_code == 1
        assert "0 passed" in result.output

    def test_denominator_reaches_the_engines(self, invoke):
        result = invoke("verify", "k-limit", "--denominator", "96", "--slope", "1/48", "--order", "1")
        assert result.exit_code == 0, result.output
        assert "opposite s=1/48" in result.output
        assert "2 passed, 0 failed" in result.output

    @pytest.mark.parametrize(
        "args",
        [
            ("verify", "nope"),
            ("verify", "duality", "--order", "abc"),
            ("verify", "duality", "--denominator", "50"),
            ("verify", "duality", "--preset", "nope"),
            ("verify", "k-limit", "--slope", "1/48"),
            ("verify", "k-limit", "--denominator", "96", "--slope", "1/96"),
        ],
    )
    def test_bad_arguments_exit_two(self, invoke, args):
        assert invoke(*args).exit_code == 2

    def test_bare_report_name_goes_to_report_dir(self):
        assert VerifierApp.report_path("run.json") == os.path.join(REPORT_DIR, "run.json")
        assert VerifierApp.report_path("out/run.json") == "out/run.json"

    def test_list_suites(self, invoke):
        result = invoke("verify", "--list-suites")
        assert result.exit_code == 0
        assert "geometry:" in result.output
        assert "property-a" in result.output


class TestInspection:
    def test_limits(self, invoke):
        result = invoke("limits", "--slope", "1/4")
        assert result.exit_code == 0
        assert "matches the closed form" in result.output

    def test_canonical(self, invoke):
        result = invoke("canonical", "--slope", "1/4")
        assert result.exit_code == 0
        assert "transition to the stable basis" in result.output
        assert "on the wall" in invoke("canonical", "--slope", "1/2").output

    def test_limits_on_a_finer_lattice(self, invoke):
        result = invoke("limits", "--slope", "1/48", "--denominator", "96")
        assert result.exit_code == 0, result.output
        assert "matches the closed form" in result.output

    @pytest.mark.parametrize("command", ["limits", "canonical"])
    @pytest.mark.parametrize("slope", ["1/5", "1/48"])
    def test_off_lattice_slope_is_usage_error(self, invoke, command, slope):
        result = invoke(command, "--slope", slope)
        assert result.exit_code == 2
        assert "lattice" in result.output

    def test_classes(self, invoke):
        result = invoke("classes", "--window", "1")
        assert result.exit_code == 0
        assert "[2]: 18 labels" in result.output
        assert "[1,1]: 9 labels" in result.output


class TestHistory:
    def test_empty(self, invoke, tmp_path):
        result = invoke("history", "--db", str(tmp_path / "runs.db"))
        assert result.exit_code == 0
        assert "no recorded runs" in result.output

    def test_record_and_export(self, invoke, tmp_path):
        db = str(tmp_path / "runs.db")
        result = invoke("verify", "lattice-identities", "--order", "1", "--record", "--db", db)
        assert "recorded as run 1" in result.output
        assert "ok" in invoke("history", "--db", db).output
        output = tmp_path / "run.xlsx"
        result = invoke("export", "1", "--output", str(output), "--db", db)
        assert result.exit_code == 0, result.output
        assert output.exists()
        assert invoke("export", "7", "--db", db).exit_code == 2
