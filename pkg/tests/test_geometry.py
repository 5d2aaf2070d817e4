from fractions import Fraction

import pytest

from geometry.limits import (
    GENERIC,
    HALF_WALL,
    INTEGER_WALL,
    Slope,
    check_k_limits,
    check_opposite_limits,
    k_stab,
    k_stab_closed_form,
    stab_minus,
    wall_denominators_ok,
)
from geometry.model import P2, P11, check_dual_pair_axioms, hilb2_model
from geometry.stab import check_sigma_duality, check_stab_normalization, stab_suite
from series.lattice import A, Monomial
from utils.errors import LatticeError


class TestDualPairModel:
    def test_points_are_exchanged(self, model):
        assert model.dim_X == 2
        assert model.dual(P2) == P11
        assert model.dual(P11) == P2
        assert model.eps(P2) == 1
        assert model.eps(P11) == -1

    def test_hilb2_axioms(self, model):
        reports = check_dual_pair_axioms(model)
        assert {r.check for r in reports} >= {"cocharacters", "weight-pairing", "parity", "kappa"}
        assert all(r.passed for r in reports), [r.residual_sample for r in reports if r.failed]

    def test_flop_pair_axioms(self, flop_model):
        reports = check_dual_pair_axioms(flop_model)
        assert all(r.passed for r in reports), [r.residual_sample for r in reports if r.failed]

    def test_wrong_kappa_is_rejected(self):
        reports = {r.check: r for r in check_dual_pair_axioms(hilb2_model(kappa=(1, 2)))}
        assert reports["kappa"].failed
        assert reports["cocharacters"].passed

    def test_sqrt_kappa_squares_to_kappa(self, model):
        lam, alpha = model.kappa
        for p in (P2, P11):
            root = model.sqrt_L_kappa(p)
            assert root * root == model.L(p, lam, alpha)
            assert root * model.sqrt_L_kappa(p, -1) == Monomial.of()

    def test_repelling_weights(self, model):
        (w,) = model.N_minus(P2)
        assert w.exponent("a") == -2


class TestStableBasis:
    def test_triangular(self, stab):
        assert stab.restriction(P2, P11).is_zero
        assert not stab.restriction(P11, P2).is_zero

    def test_normalization(self, model, stab):
        assert check_stab_normalization(model, stab).passed

    def test_sigma_duality(self, model, stab):
        assert check_sigma_duality(model, stab).passed

    def test_suite(self, model):
        reports = stab_suite(model, order=1)
        assert len(reports) == 7
        assert all(r.passed for r in reports), [(r.check, r.residual_sample) for r in reports if r.failed]


class TestSlope:
    @pytest.mark.parametrize(
        "value, kind",
        [("1/4", GENERIC), ("-3/4", GENERIC), ("0", INTEGER_WALL), ("-1", INTEGER_WALL), ("1/2", HALF_WALL), ("-3/2", HALF_WALL)],
    )
    def test_classification(self, value, kind):
        assert Slope.of(value).classification == kind

    def test_floor_and_half(self):
        s = Slope.of(Fraction(-1, 4))
        assert s.m == -1
        assert not s.lower_half
        assert Slope.of(Fraction(5, 4)).lower_half

    def test_lattice(self):
        assert Slope.of(Fraction(1, 24)).check_lattice(48)
        assert Slope.of(Fraction(1, 48)).check_lattice(96)
        for value in (Fraction(1, 5), Fraction(1, 16), Fraction(1, 48)):
            with pytest.raises(LatticeError):
                Slope.of(value).check_lattice(48)


class TestKLimits:
    def test_generic_closed_form(self):
        S = k_stab_closed_form(Fraction(1, 4))
        assert S[1, 0] == 0
        assert S[0, 0] == A - 1 / A

    @pytest.mark.parametrize("s", [Fraction(1, 4), Fraction(-3, 4), Fraction(1, 2), Fraction(1)])
    def test_engine_matches_closed_form(self, model, s):
        (report,) = check_k_limits(model, [s])
        assert report.passed, report.residual_sample

    def test_opposite_chamber(self, model, flop_model):
        (report,) = check_opposite_limits(model, flop_model, [Fraction(1, 4)])
        assert report.passed, report.residual_sample

    def test_opposite_is_an_involution(self):
        S = k_stab_closed_form(Fraction(3, 4))
        assert stab_minus(stab_minus(S)) == S

    def test_generic_limit_is_free_of_z(self, model):
        S = k_stab(model, Fraction(1, 4))
        assert all(S[i, j].is_free_of("z") for i in range(2) for j in range(2))

    def test_wall_denominators(self):
        assert wall_denominators_ok(k_stab_closed_form(1))
        assert wall_denominators_ok(k_stab_closed_form(Fraction(1, 2)))
