import json
import time
from fractions import Fraction

import pytest

from series.lattice import lattice
from utils.reports import CheckReport, ReportManager, make_report, order_label, shortfall


def report(status="pass", suite="s", check="c"):
    return CheckReport(suite=suite, check=check, status=status)


class TestCheckReport:
    def test_unknown_status(self):
        with pytest.raises(ValueError):
            report("maybe")

    def test_residual_sample_is_capped(self):
        r = make_report("s", "c", [f"t{i}" for i in range(25)], time.perf_counter())
        assert r.failed
        assert len(r.residual_sample) == 10

    def test_skip(self):
        r = make_report("s", "c", [], time.perf_counter(), skip="not applicable")
        assert r.status == "skip"
        assert r.residual_sample == ["not applicable"]
        assert not r.failed

    def test_failures_beat_a_skip_reason(self):
        r = make_report("s", "c", ["x != y"], time.perf_counter(), skip="not applicable")
        assert r.failed
        assert r.residual_sample == ["x != y"]

    def test_shortfall(self):
        assert shortfall(Fraction(1, 2), 2) == "compared only below q^1/2, q^2 was requested"
        assert shortfall(2, 2) is None
        assert shortfall(float("inf"), 2) is None
        assert shortfall(Fraction(1, 2), None) is None

    def test_order_label(self):
        assert order_label(Fraction(97, 48)) == "97/48"
        assert order_label(2) == "96/48"
        assert order_label(float("inf")) == "inf"
        assert order_label(None) is None
        with lattice(96):
            assert order_label(Fraction(1, 96)) == "1/96"

    def test_to_dict_plain_detail(self):
        r = make_report("s", "c", [], time.perf_counter(), detail={"x": Fraction(1, 3), "y": float("inf")})
        assert r.to_dict()["detail"] == {"x": "1/3", "y": "inf"}


class TestReportManager:
    def test_counts(self):
        manager = ReportManager([report(), report("fail"), report("skip")])
        assert manager.counts() == {"pass": 1, "fail": 1, "skip": 1}
        assert not manager.all_passed

    def test_skips_do_not_fail_a_run(self):
        assert ReportManager([report(), report("skip")]).all_passed

    def test_json(self, tmp_path):
        manager = ReportManager([report(suite="b"), report(suite="a")])
        path = manager.save_json(str(tmp_path / "out" / "report.json"), {"order": Fraction(2)})
        data = json.loads(open(path, encoding="utf-8").read())
        assert [r["suite"] for r in data["reports"]] == ["a", "b"]
        assert data["config"] == {"order": "2"}
        assert data["passed"]

    def test_table_lists_failures(self):
        failing = CheckReport(suite="s", check="c", status="fail", residual_sample=["q^(1/2)"])
        table = ReportManager([failing]).render_table()
        assert "s/c:" in table
        assert "q^(1/2)" in table
