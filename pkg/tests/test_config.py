from fractions import Fraction

import pytest

from config.presets import PRESETS, control_presets, get_preset
from config.settings import RunConfig, parse_rational
from config.suites import DEFAULT_SLOPES, GROUPS, SUITES, get_suite, resolve_suites, suites_in_group
from utils.errors import ConfigError, UnknownSuiteError


class TestParseRational:
    @pytest.mark.parametrize("text, value", [("3", Fraction(3)), ("1/4", Fraction(1, 4)), (" -3/4 ", Fraction(-3, 4)), (2, Fraction(2))])
    def test_parses(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("text", ["a/b", "1/0", ""])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_rational(text)


class TestRunConfig:
    def test_defaults_validate(self):
        config = RunConfig(order=Fraction(2))
        assert config.validate() is config

    @pytest.mark.parametrize(
        "changes",
        [
            {"denominator": 50},
            {"denominator": 0},
            {"order": Fraction(0)},
            {"order": Fraction(1, 5)},
            {"slopes": (Fraction(1, 5),)},
            {"slopes": (Fraction(1, 48),)},
            {"preset": "nope"},
            {"threads": 0},
            {"seed": -1},
            {"points": 0},
            {"qmag": 1.0},
        ],
    )
    def test_rejects(self, changes):
        config = RunConfig(**{"order": Fraction(2), **changes})
        with pytest.raises(ConfigError):
            config.validate()

    def test_finer_lattice(self):
        RunConfig(denominator=96, order=Fraction(1, 96), slopes=(Fraction(1, 48), Fraction(1, 16))).validate()
        with pytest.raises(ConfigError):
            RunConfig(denominator=96, slopes=(Fraction(1, 96),)).validate()

    def test_to_dict(self):
        data = RunConfig(order=Fraction(97, 48), slopes=(Fraction(1, 4),)).to_dict()
        assert data["order"] == "97/48"
        assert data["slopes"] == ["1/4"]
        assert data["preset"] == "theta"


class TestSuites:
    def test_every_suite_has_a_group(self):
        assert {suite["group"] for suite in SUITES.values()} == set(GROUPS)

    def test_resolve_all(self):
        assert resolve_suites(["all"]) == list(SUITES)

    def test_resolve_groups_keep_order(self):
        names = resolve_suites(["duality", "elliptic"])
        assert names[0] == "duality"
        assert names.count("duality") == 1
        assert set(names) == set(suites_in_group("elliptic"))

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuiteError) as info:
            resolve_suites(["nope"])
        assert info.value.name == "nope"
        with pytest.raises(UnknownSuiteError):
            get_suite("nope")

    def test_default_slopes(self):
        assert all(Fraction(1, 4) != s for s in DEFAULT_SLOPES["wall"])
        assert Fraction(1, 2) in DEFAULT_SLOPES["wall"]


class TestPresets:
    def test_controls(self):
        assert control_presets() == ["broken-odd", "broken-f1", "broken-c2"]

    def test_get_preset(self):
        assert get_preset("theta") is PRESETS["theta"]
        with pytest.raises(ConfigError):
            get_preset("nope")
