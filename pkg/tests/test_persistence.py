import json

import pytest

from utils.database import DatabaseManager
from utils.excel_manager import ExcelManager
from utils.reports import CheckReport


@pytest.fixture
def reports():
    return [
        CheckReport(suite="duality", check="duality", order="96/48", detail={"note": 1}),
        CheckReport(suite="wall", check="s=1", status="fail", residual_sample=["a - 1"]),
        CheckReport(suite="numeric", check="engine", status="skip"),
    ]


@pytest.fixture
def db(tmp_path):
    manager = DatabaseManager(str(tmp_path / "runs.db"))
    yield manager
    manager.close()


class TestDatabaseManager:
    def test_save_and_read_back(self, db, reports):
        run_id = db.save_run({"preset": "theta", "order": "2", "suites": ["duality", "wall"]}, reports)
        run = db.get_run(run_id)
        assert (run.passed, run.failed, run.skipped) == (1, 1, 1)
        assert not run.ok
        assert run.suites == "duality,wall"
        assert json.loads(run.config)["preset"] == "theta"

        results = db.get_run_results(run_id)
        assert [r.suite for r in results] == ["duality", "numeric", "wall"]
        assert results[2].to_dict()["residual_sample"] == ["a - 1"]
        assert results[0].to_dict()["detail"] == {"note": 1}

    def test_recent_runs_newest_first(self, db, reports):
        first = db.save_run({}, reports[:1])
        second = db.save_run({}, reports[:1])
        assert [r.id for r in db.get_recent_runs()] == [second, first]
        assert db.get_run(second).ok

    def test_missing_run(self, db):
        assert db.get_run(42) is None


class TestExcelManager:
    def test_round_trip(self, tmp_path, reports):
        excel = ExcelManager(str(tmp_path / "out" / "runs.xlsx"))
        excel.save_results(reports, run_id=3)
        df = excel.get_all_results()
        assert list(df["check"]) == ["duality", "s=1", "engine"]
        assert set(df["run_id"]) == {3}
        failures = excel.get_failures()
        assert list(failures["suite"]) == ["wall"]
        assert failures.iloc[0]["residual_sample"] == "a - 1"

    def test_missing_workbook(self, tmp_path):
        df = ExcelManager(str(tmp_path / "none.xlsx")).get_all_results()
        assert df.empty

    def test_frame_from_stored_results(self, tmp_path, reports):
        db = DatabaseManager(str(tmp_path / "runs.db"))
        try:
            run_id = db.save_run({}, reports)
            df = ExcelManager.to_frame(db.get_run_results(run_id), run_id)
        finally:
            db.close()
        assert len(df) == 3
        assert df.iloc[0]["detail"] == '{"note": 1}'
