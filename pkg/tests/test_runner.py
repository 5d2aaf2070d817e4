from fractions import Fraction

import pytest

from config.settings import RunConfig
from utils.errors import ConfigError, NoCanonicalSolutionError
from utils.runner import SuiteRunner, Task


def runner(**changes):
    return SuiteRunner(RunConfig(**dict({"order": Fraction(1), "threads": 2}, **changes)))


class TestSuiteRunner:
    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            runner(seed=-1)

    def test_lattice_identities(self):
        manager = runner().run(["lattice-identities"])
        assert sorted(r.check for r in manager.reports) == ["cancelation", "fab-symmetry", "r-matching"]
        assert manager.all_passed

    def test_slopes_are_filtered_by_suite(self):
        r = runner(slopes=(Fraction(1, 4), Fraction(1, 2)))
        assert [s.value for s in r.slopes_for("k-canonical")] == [Fraction(1, 4)]
        assert [s.value for s in r.slopes_for("wall")] == [Fraction(1, 2)]

    def test_default_slopes(self):
        assert len(runner().slopes_for("wall")) == 5

    def test_wall_without_walls_is_skipped(self):
        manager = runner(slopes=(Fraction(1, 4),)).run(["wall"])
        (report,) = manager.reports
        assert report.status == "skip"
        assert manager.all_passed

    def test_canonical_at_one_slope(self):
        manager = runner(slopes=(Fraction(1, 4),)).run(["k-canonical"])
        assert len(manager.reports) == 4
        assert manager.all_passed

    def test_engine_canonical_suite(self):
        r = runner(slopes=(Fraction(1, 4), Fraction(1, 2)))
        assert [s.value for s in r.slopes_for("k-canonical-engine")] == [Fraction(1, 4)]
        manager = r.run(["k-canonical-engine"])
        assert [x.check for x in manager.reports][0] == "engine s=1/4"
        assert len(manager.reports) == 5
        assert manager.all_passed

    def test_runs_on_the_configured_lattice(self):
        manager = runner(denominator=96, slopes=(Fraction(1, 48),)).run(["k-limit"])
        assert [x.check for x in manager.reports] == ["s=1/48", "opposite s=1/48"]
        assert manager.all_passed

    def test_tasks_expand_groups(self):
        tasks = runner().tasks(["identities"])
        assert {t.suite for t in tasks} == {"theta-id", "h-constraints", "lattice-identities"}

    def test_errors_become_failed_reports(self):
        def broken():
            raise NoCanonicalSolutionError(3)

        def crashing():
            raise KeyError("x")

        r = runner()
        (report,) = r._execute(Task("k-canonical", "s=1/4", broken))
        assert report.failed
        assert "v-degree bound 3" in report.residual_sample[0]
        (report,) = r._execute(Task("k-canonical", "s=1/4", crashing))
        assert report.failed
        assert report.residual_sample[0].startswith("KeyError")
