from fractions import Fraction

import pytest

from elliptic.checks import (
    ELLIPTIC_CHECKS,
    check_duality,
    check_k_limit_normalization,
    check_property_a,
    e2_f1_leading,
    elliptic_suite,
    predicted_leading,
    run_elliptic_check,
)
from elliptic.family import FCoeffs, GMatrix, build_family, default_budgets, upsilon_series
from geometry.limits import Slope
from geometry.model import P2, P11
from series.lattice import INF, Budgets, Monomial
from series.theta import theta01, theta_tilde
from utils.errors import FCoeffsError

PROPERTY_A_SLOPES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
ONE = ("one", 1, 0)
ZERO = ("zero", 0, 0)


def failures(reports):
    return [(r.check, r.residual_sample) for r in reports if r.failed]


class TestFCoeffs:
    def test_preset_orders(self):
        assert FCoeffs.from_preset("theta").c == (0, 0, Fraction(5, 4))
        assert FCoeffs.from_preset("minimal").c == (0, 0, INF)
        assert FCoeffs.from_preset("shifted").c == (0, Fraction(1, 2), Fraction(5, 4))

    @pytest.mark.parametrize(
        "specs, invariant",
        [
            ((ZERO, ONE, ZERO), "nonzero"),
            ((ONE, ("one", 2, 0), ZERO), "leading"),
            ((ONE, ONE, ("one", 1, Fraction(1, 4))), "dominance"),
            ((ONE, ONE, ("one", 1, 1)), "half-integrality"),
        ],
    )
    def test_invariants(self, specs, invariant):
        with pytest.raises(FCoeffsError) as info:
            FCoeffs(specs)
        assert info.value.invariant == invariant

    def test_controls_build_but_do_not_validate(self):
        f = FCoeffs.from_preset("broken-c2")
        assert f.control
        with pytest.raises(FCoeffsError):
            f.validate()

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            FCoeffs((ONE, ("theta2", 1, 0), ZERO))

    def test_v_symmetry(self):
        assert FCoeffs.from_preset("theta").is_v_symmetric()

    def test_describe(self):
        assert FCoeffs.from_preset("theta").describe() == ("1", "theta_0(v)", "q^(1)*theta_1(v)")

    def test_h_builders(self):
        h = FCoeffs.from_preset("theta").h_builders()
        assert sorted(h) == [0, 2, 4, 6]
        assert sorted(FCoeffs.from_preset("broken-odd").h_builders()) == [1, 2, 6]


class TestFamily:
    def test_upsilon_of_minimal(self):
        ups = upsilon_series(FCoeffs.from_preset("minimal"), 2)
        assert ups.equal_up_to(theta01(0, Monomial.of(v=1), 2))[0]

    def test_e11_is_a_theta(self, minimal_family):
        for p in (P2, P11):
            arg = Monomial.of(z=1) * minimal_family.model.O(p, 1)
            ok, residual = minimal_family.e11[p].equal_up_to(theta_tilde(arg, 2))
            assert ok, residual.render()

    def test_budgets(self, minimal_family):
        assert minimal_family.budgets == Budgets.of(a=1, z=1, v=1)
        assert default_budgets([Fraction(-3, 2)]).z == Fraction(3, 2)

    def test_dual_matrix_swaps_points(self, minimal_family):
        E = minimal_family.matrix()
        Ed = minimal_family.dual_matrix()
        assert Ed[0][0] == E[1][1].swap_az()
        assert Ed[0][1] == E[1][0].swap_az()

    def test_gmatrix(self, model):
        G = GMatrix()
        assert (G[P2], G[P11]) == (3, 1)
        assert G.factor(model, P2, P2) == Monomial.of(-1, q=Fraction(-3, 2), z=-3) * model.O(P2, -1)


class TestDuality:
    def test_minimal(self, minimal_family):
        report = check_duality(minimal_family)
        assert report.passed, report.residual_sample

    def test_theta(self, theta_family):
        report = check_duality(theta_family)
        assert report.passed, report.residual_sample

    def test_odd_class_breaks_duality(self):
        fam = build_family(FCoeffs.from_preset("broken-odd"), 1, Budgets())
        assert check_duality(fam).failed

    def test_short_family_is_skipped_at_a_higher_order(self, model):
        fam = build_family(FCoeffs.from_preset("minimal"), Fraction(1, 4), Budgets(), model)
        report = check_duality(fam, order=2)
        assert report.status == "skip"
        assert "q^2 was requested" in report.residual_sample[0]

    def test_short_control_still_fails(self):
        fam = build_family(FCoeffs.from_preset("broken-odd"), 1, Budgets())
        assert check_duality(fam, order=2).failed


class TestEllipticChecks:
    @pytest.mark.parametrize("name", [n for n in ELLIPTIC_CHECKS if n not in ("duality", "property-a")])
    def test_minimal(self, minimal_family, name):
        reports = run_elliptic_check(minimal_family, name)
        assert reports
        assert not failures(reports)

    @pytest.mark.parametrize("name", [n for n in ELLIPTIC_CHECKS if n not in ("duality", "property-a")])
    def test_theta(self, theta_family, name):
        assert not failures(run_elliptic_check(theta_family, name))

    def test_unknown_check(self, minimal_family):
        with pytest.raises(ValueError):
            run_elliptic_check(minimal_family, "nope")

    def test_suite_builds_once(self):
        reports = elliptic_suite(FCoeffs.from_preset("minimal"), 1, names=("duality", "qdiff-z"))
        assert [r.suite for r in reports] == ["duality", "qdiff-z"]


class TestPropertyA:
    @pytest.mark.parametrize("s", PROPERTY_A_SLOPES)
    def test_minimal(self, minimal_family, s):
        report = check_property_a(minimal_family, s)
        assert report.passed, report.residual_sample

    @pytest.mark.parametrize("s", PROPERTY_A_SLOPES)
    def test_theta(self, theta_family, s):
        report = check_property_a(theta_family, s)
        assert report.passed, report.residual_sample

    def test_labels_land_in_their_classes(self, theta_family):
        report = check_property_a(theta_family, Fraction(1, 4))
        assert set(report.detail["label"]) == {P2, P11}

    def test_normalization(self, theta_family):
        assert check_k_limit_normalization(theta_family).passed
        with pytest.raises(ValueError):
            check_k_limit_normalization(theta_family, Fraction(3, 4))

    def test_dominance_of_f1(self, theta_family):
        _, orders = predicted_leading(theta_family, Fraction(1, 4))
        assert orders[0] < orders[1]

    def test_upper_half_uses_shifted_z_exponent(self):
        s = Slope.of(Fraction(3, 4))
        _, _, terms = e2_f1_leading(s, 0)
        assert terms == [(1, -1, Fraction(5, 2), Fraction(3, 2))]
