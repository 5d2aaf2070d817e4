from fractions import Fraction

import pytest

from geometry.model import P2, P11
from klcanon.bar import (
    KClass,
    bar_apply,
    bar_data,
    canonical_solve,
    check_canonical,
    check_engine_canonical,
    check_interval_independence,
    default_degree_bound,
    transition_matrices,
)
from klcanon.closed_forms import canonical_closed_form, canonical_generic_closed_form, transition_closed_form
from klcanon.walls import (
    CanLabel,
    check_classes,
    check_periodicity,
    check_wall,
    dual_class_map,
    label_of,
    same_class,
    wall_crossing_map,
    xi_classes,
)
from series.lattice import A, V

GENERIC_SLOPES = [Fraction(1, 4), Fraction(3, 4), Fraction(-3, 4), Fraction(5, 4)]
WALLS = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(-1, 2)]


class TestCanonicalBasis:
    @pytest.mark.parametrize("s", GENERIC_SLOPES)
    def test_solver_matches_closed_form(self, s):
        E = canonical_solve(bar_data(s), default_degree_bound(s))
        assert E == canonical_generic_closed_form(s)

    @pytest.mark.parametrize("s", GENERIC_SLOPES)
    def test_check_canonical(self, s):
        reports = check_canonical(s)
        assert [r.check for r in reports] == [f"solve s={s}", f"transition s={s}", f"bar s={s}", f"v-limit s={s}"]
        assert all(r.passed for r in reports), [r.residual_sample for r in reports if r.failed]

    def test_transition_matrices(self):
        s = Fraction(1, 4)
        bd = bar_data(s)
        T, T_minus = transition_matrices(canonical_generic_closed_form(s), bd)
        shown, shown_minus = transition_closed_form(s)
        assert T == shown
        assert T_minus == shown_minus
        assert T_minus == T.bar_v()
        assert T[0, 1] == -1 / (V * A)

    def test_bar_is_an_involution(self):
        bd = bar_data(Fraction(1, 4))
        x = KClass((A, V * A))
        assert bar_apply(bd, bar_apply(bd, x)) == x

    def test_engine_bar_data(self, model):
        s = Fraction(1, 4)
        assert bar_data(s, engine=True, model=model).S_plus == bar_data(s).S_plus

    @pytest.mark.parametrize("s", [Fraction(1, 4), Fraction(-3, 4)])
    def test_canonical_basis_from_engine_limits(self, model, s):
        reports = check_engine_canonical(s, model)
        assert [r.check for r in reports][:2] == [f"engine s={s}", f"solve s={s}"]
        assert len(reports) == 5
        assert all(r.passed for r in reports), [(r.check, r.residual_sample) for r in reports if r.failed]

    def test_interval_independence(self):
        assert check_interval_independence(Fraction(1, 8), Fraction(3, 8)).passed
        with pytest.raises(ValueError):
            check_interval_independence(Fraction(1, 4), Fraction(3, 4))

    def test_wall_slope_has_no_generic_form(self):
        with pytest.raises(ValueError):
            canonical_generic_closed_form(Fraction(1, 2))


class TestWalls:
    @pytest.mark.parametrize("s", WALLS)
    def test_check_wall(self, s):
        reports = check_wall(s)
        assert len(reports) == 2
        assert all(r.passed for r in reports), [r.residual_sample for r in reports if r.failed]

    def test_beta_max(self):
        assert dict(wall_crossing_map(Fraction(1)).beta_max) == {P2: 1, P11: 1}
        assert dict(wall_crossing_map(Fraction(1, 2)).beta_max) == {P2: 0, P11: 2}

    def test_generic_slope_is_not_a_wall(self):
        with pytest.raises(ValueError):
            wall_crossing_map(Fraction(1, 4))

    @pytest.mark.parametrize("s", [Fraction(1, 4), Fraction(1), Fraction(-1, 2)])
    def test_periodicity(self, s):
        assert check_periodicity(s).passed


class TestLabels:
    def test_label_of_canonical_columns(self):
        E = canonical_closed_form(Fraction(1, 4))
        assert label_of(KClass.column(E, 0)) == CanLabel(1, -1, -1)
        assert label_of(KClass.column(E, 1)) == CanLabel(0, -1, 0)

    def test_label_exponent_range(self):
        with pytest.raises(ValueError):
            CanLabel(2, 0, 0)

    def test_two_classes(self):
        partition = xi_classes(window=1)
        assert len(partition.classes) == 2
        assert partition.point_of(CanLabel(0, 0, 0)) == P11
        assert partition.point_of(CanLabel(1, 0, 0)) == P2
        assert partition.point_of(CanLabel(-1, 1, -1)) == P2

    def test_same_class(self):
        assert same_class(CanLabel(0, 0, 0), CanLabel(0, 2, 1))
        assert not same_class(CanLabel(0, 0, 0), CanLabel(1, 0, 0))

    def test_dual_class_map(self):
        image = dual_class_map(CanLabel(0, 1, 1))
        assert image.var == "z"
        assert image.eps != 0
        assert dual_class_map(CanLabel(-1, 0, 2)).eps == 0

    def test_check_classes(self):
        report = check_classes(window=2)
        assert report.passed, report.residual_sample
        assert report.detail["iota"] == [P2, P11] or report.detail["iota"] == [P11, P2]
