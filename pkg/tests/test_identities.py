from fractions import Fraction

import pytest
import sympy

from elliptic.family import FCoeffs
from elliptic.identities import (
    class_placeholders,
    FABFunction,
    cancelation_sum,
    check_cancelation,
    check_fab_symmetry,
    check_h_constraints,
    check_r_matching,
    check_theta_identity,
    invertibility_leading,
)


class TestThetaIdentity:
    @pytest.mark.parametrize("eps", [0, 1])
    def test_holds(self, eps):
        report = check_theta_identity(eps, 2)
        assert report.passed, report.residual_sample
        assert report.check == f"eps={eps}"

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            check_theta_identity(2)


class TestLatticeIdentities:
    def test_fab_reflection(self):
        f = FABFunction(1, -2)
        assert f(Fraction(1, 2), Fraction(1, 3), 0) == f(Fraction(1, 2), Fraction(-4, 3), 0)
        assert check_fab_symmetry().passed

    def test_integer_sum_vanishes(self):
        f = FABFunction(0, 0)
        assert cancelation_sum(f, Fraction(1, 6), Fraction(1, 3), 0, 6) == {}

    def test_sums_cancel_in_pairs(self):
        f = FABFunction(2, 1)
        plus = cancelation_sum(f, 0, 0, Fraction(1, 3), 6)
        minus = cancelation_sum(f, 0, 0, Fraction(-1, 3), 6)
        assert plus
        assert plus == {e: -x for e, x in minus.items()}

    def test_cancelation(self):
        assert check_cancelation(radius=4, window=range(-1, 2)).passed

    def test_r_matching(self):
        report = check_r_matching()
        assert report.passed, report.residual_sample


class TestHConstraints:
    def test_constraints(self):
        reports = check_h_constraints(order=1)
        assert [r.check for r in reports] == ["parity-and-pairs", "upsilon", "invertibility"]
        assert all(r.passed for r in reports), [(r.check, r.residual_sample) for r in reports if r.failed]
        assert len(reports[0].detail["free"]) == 2

    def test_placeholders_follow_the_family(self):
        x, symbols = class_placeholders(FCoeffs.from_preset("theta"))
        h0, h2 = symbols
        assert x == {0: h0, 4: h0, 2: h2, 6: h2}
        x, (h2,) = class_placeholders(FCoeffs.from_preset("minimal"))
        assert x == {2: h2, 6: h2}
        x, (h1,) = class_placeholders(FCoeffs.from_preset("broken-odd"))
        assert x == {1: h1, 2: -h1, 6: -h1}
        assert all(isinstance(s, sympy.Symbol) for s in symbols)

    @pytest.mark.parametrize("preset", ["minimal", "shifted"])
    def test_family_coefficients_satisfy_the_constraints(self, preset):
        reports = check_h_constraints(order=1, f=FCoeffs.from_preset(preset))
        assert all(r.passed for r in reports), [(r.check, r.residual_sample) for r in reports if r.failed]

    def test_odd_class_control_fails(self):
        reports = check_h_constraints(order=1, f=FCoeffs.from_preset("broken-odd"))
        upsilon = next(r for r in reports if r.check == "upsilon")
        assert upsilon.failed
        assert any("leave the ([1,1],[2]) solutions" in line for line in upsilon.residual_sample)

    def test_determinant_leading_term(self):
        order, piece = invertibility_leading(Fraction(1, 4))
        assert order == Fraction(1, 8)
        assert not piece.is_exact_zero
