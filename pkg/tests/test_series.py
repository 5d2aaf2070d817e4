from fractions import Fraction
from functools import partial

import numpy as np
import pytest
import sympy

from series.lattice import (
    A,
    INF,
    Q,
    V,
    Z,
    Budgets,
    Monomial,
    Series,
    bar_v,
    lattice,
    lattice_denominator,
    mul,
    product_to_order,
    substitute,
    to_lattice,
)
from series.laurent import LaurentFraction, LaurentMatrix
from series.theta import (
    ThetaFraction,
    euler,
    tf_equal,
    tf_mul,
    tf_scale,
    tf_substitute,
    tf_swap_az,
    theta01,
    theta_product,
    theta_tilde,
    theta_tilde_order,
)
from utils.errors import BudgetExceededError, LatticeError, SingularMatrixError, UnrepresentableError

HALF = Fraction(1, 2)


def mono(coeff=1, **exps):
    return Monomial.of(coeff, **exps)


class TestLattice:
    def test_to_lattice(self):
        assert to_lattice(Fraction(1, 4)) == 12
        assert to_lattice(-3) == -144
        assert to_lattice(Fraction(1, 96), 96) == 1

    def test_off_lattice_exponent(self):
        with pytest.raises(LatticeError):
            to_lattice(Fraction(1, 5))
        with pytest.raises(LatticeError):
            Series.monomial(q=Fraction(1, 7))

    def test_denominator_must_be_multiple_of_48(self):
        with pytest.raises(LatticeError):
            Series({}, denominator=50)

    def test_mixed_lattices_rejected(self):
        with pytest.raises(LatticeError):
            Series.one(48) + Series.one(96)

    def test_lattice_context(self):
        assert lattice_denominator() == 48
        with lattice(96):
            assert lattice_denominator() == 96
            assert Series.one().denominator == 96
            assert to_lattice(Fraction(1, 96)) == 1
            assert euler(1).denominator == 96
        assert lattice_denominator() == 48
        with pytest.raises(LatticeError):
            with lattice(50):
                pass
        assert lattice_denominator() == 48

    def test_coarse_monomials_are_lifted(self):
        coarse = mono(a=HALF, v=-1)
        with lattice(96):
            fine = Monomial.of(q=Fraction(1, 96), a=HALF)
            assert coarse.on(96) == coarse
            assert coarse.on(96).a == 48
            assert (coarse * fine).denominator == 96
            assert coarse.to_series().denominator == 96
            assert (Series.one() * coarse).coefficient(a=HALF, v=-1) == 1
            shifted = coarse.shift("a", Fraction(1, 48))
            assert shifted.exponent("q") == Fraction(1, 96)
            assert theta_tilde(coarse, 1).denominator == 96
        assert len({coarse, coarse.on(96)}) == 1
        with pytest.raises(LatticeError):
            mono(a=1).on(72)

    def test_terms_at_watermark_are_dropped(self):
        x = Series({(0, 0, 0, 0): 1, (48, 0, 0, 0): 3, (96, 0, 0, 0): 5}, watermark=96)
        assert len(x) == 2
        assert x.order == 2
        assert x.coefficient(q=1) == 3
        assert x.coefficient(q=2) == 0

    def test_budget_keeps_terms_a_shift_can_lower(self):
        x = Series({(120, 48, 0, 0): 1, (120, 0, 0, 0): 1}, watermark=96, budgets=Budgets.of(a=1))
        assert x.coefficient(q=Fraction(5, 2), a=1) == 1
        assert x.coefficient(q=Fraction(5, 2)) == 0

    def test_shift_consumes_budget(self):
        x = Series({(0, 48, 0, 0): 1}, watermark=96, budgets=Budgets.of(a=1))
        y = x.shift("a", 1)
        assert y.coefficient(q=1, a=1) == 1
        assert y.budgets.a == 0
        with pytest.raises(BudgetExceededError) as info:
            y.shift("a", Fraction(1, 4))
        assert info.value.variable == "a"

    def test_shift_beyond_budget(self):
        x = Series({(0, 48, 0, 0): 1}, watermark=96, budgets=Budgets.of(z=2))
        with pytest.raises(BudgetExceededError):
            x.shift("a", 1)

    def test_exact_series_shift_freely(self):
        x = Series.monomial(a=1, v=2)
        y = x.shift("a", 5).shift("v", -1)
        assert y.coefficient(q=3, a=1, v=2) == 1

    def test_addition_takes_lower_watermark(self):
        x = Series({(0, 0, 0, 0): 1}, watermark=96)
        y = Series({(24, 0, 0, 0): 2}, watermark=48)
        total = x + y
        assert total.order == 1
        assert total.coefficient(q=HALF) == 2

    def test_multiplication_watermark(self):
        x = Series({(24, 0, 0, 0): 1}, watermark=72)
        product = x * x
        assert product.order == 2
        assert product.coefficient(q=1) == 1

    def test_multiplication_by_exact(self):
        x = Series({(0, 0, 0, 0): 1, (48, 0, 0, 0): 1}, watermark=96)
        y = Series.from_sympy(1 - Q)
        product = x * y
        assert product.order == 2
        assert product.coefficient() == 1
        assert product.coefficient(q=1) == 0

    def test_from_sympy(self):
        x = Series.from_sympy(sympy.sqrt(Q) * A - 3 * V / Z)
        assert x.is_exact
        assert x.coefficient(q=HALF, a=1) == 1
        assert x.coefficient(z=-1, v=1) == -3

    def test_from_sympy_rejects_other_symbols(self):
        with pytest.raises(UnrepresentableError):
            Series.from_sympy(sympy.Symbol("w") * A)

    def test_inexact_coefficient_rejected(self):
        with pytest.raises(UnrepresentableError):
            Series.constant(0.5)

    def test_remaps(self):
        x = Series.monomial(2, a=1, z=-1, v=1)
        assert x.swap_az().coefficient(a=-1, z=1, v=1) == 2
        assert x.bar_v().coefficient(a=1, z=-1, v=-1) == 2
        assert x.invert("a").coefficient(a=-1, z=-1, v=1) == 2

    def test_leading(self):
        x = Series({(24, 0, 0, 48): 2, (24, 0, 0, -48): 1, (48, 0, 0, 0): 7}, watermark=96)
        order, piece = x.leading()
        assert order == HALF
        assert piece.is_exact
        assert piece.coefficient(v=1) == 2
        assert piece.coefficient(v=-1) == 1
        assert len(piece) == 2

    def test_leading_of_undetermined_series(self):
        order, piece = Series({}, watermark=96).leading()
        assert order is None
        assert piece.is_exact_zero

    def test_equal_up_to(self):
        x = Series({(0, 0, 0, 0): 1, (48, 0, 0, 0): 1}, watermark=96)
        y = Series({(0, 0, 0, 0): 1}, watermark=48)
        ok, residual = x.equal_up_to(y)
        assert ok
        assert not residual.terms
        ok, residual = x.equal_up_to(Series.zero())
        assert not ok
        assert residual.coefficient() == 1

    def test_truncate(self):
        x = Series.from_sympy(1 + Q + Q**2)
        y = x.truncate(Fraction(3, 2))
        assert y.order == Fraction(3, 2)
        assert len(y) == 2

    def test_monomial_powers(self):
        assert mono(a=1).sqrt() == mono(a=HALF)
        with pytest.raises(LatticeError):
            mono(a=Fraction(1, 48)).sqrt()
        with pytest.raises(UnrepresentableError):
            mono(2, a=1).sqrt()

    def test_product_to_order(self):
        a, z = mono(a=1), mono(z=1)
        product = product_to_order([partial(theta_tilde, a), partial(theta_tilde, z)], 1)
        assert product.order == 1
        direct = theta_tilde(a, 2) * theta_tilde(z, 2)
        assert product.equal_up_to(direct)[0]


CASES = 1000


def random_series(rng, watermark=2, budgets=None, spread=2):
    """1 to 4 terms with q-exponents in quarters below the watermark and a, z, v exponents within spread"""
    D = lattice_denominator()
    top = 12 if watermark == INF else 4 * watermark
    terms = {}
    for _ in range(rng.integers(1, 5)):
        key = (int(rng.integers(-2, top)) * D // 4,) + tuple(int(e) * D for e in rng.integers(-spread, spread + 1, 3))
        terms[key] = int(rng.choice([-3, -2, -1, 1, 2, 3]))
    W = INF if watermark == INF else to_lattice(watermark)
    return Series(terms, W, budgets)


def agree(x, y):
    ok, residual = x.equal_up_to(y)
    assert ok, residual.render(4)


class TestRingLaws:
    def test_addition_and_multiplication_commute(self):
        rng = np.random.default_rng(11)
        for _ in range(CASES):
            x, y = random_series(rng), random_series(rng)
            agree(x + y, y + x)
            agree(mul(x, y), mul(y, x))

    def test_associativity(self):
        rng = np.random.default_rng(12)
        for _ in range(CASES):
            x, y, z = (random_series(rng) for _ in range(3))
            agree((x + y) + z, x + (y + z))
            agree(mul(mul(x, y), z), mul(x, mul(y, z)))

    def test_distributivity(self):
        rng = np.random.default_rng(13)
        for _ in range(CASES):
            x, y, z = (random_series(rng) for _ in range(3))
            agree(mul(x, y + z), mul(x, y) + mul(x, z))

    @pytest.mark.parametrize("var, amount", [("a", 1), ("z", -1), ("v", HALF)])
    def test_shift_is_a_ring_homomorphism(self, var, amount):
        rng = np.random.default_rng(14)
        budgets = Budgets.of(**{var: abs(amount)})
        image = Monomial.of(q=amount, **{var: 1})
        for _ in range(CASES):
            x, y = (random_series(rng, budgets=budgets, spread=1) for _ in range(2))
            agree(substitute(x + y, var, image), substitute(x, var, image) + substitute(y, var, image))
            agree(substitute(mul(x, y), var, image), mul(substitute(x, var, image), substitute(y, var, image)))

    def test_bar_is_a_ring_homomorphism(self):
        rng = np.random.default_rng(15)
        for _ in range(CASES):
            x, y = random_series(rng), random_series(rng)
            agree(bar_v(x + y), bar_v(x) + bar_v(y))
            agree(bar_v(mul(x, y)), mul(bar_v(x), bar_v(y)))
            assert bar_v(bar_v(x)) == x

    def test_truncation_is_sound(self):
        rng = np.random.default_rng(16)
        for _ in range(CASES):
            x, y = random_series(rng, watermark=INF), random_series(rng, watermark=INF)
            exact = mul(x, y)
            low = mul(x.truncate(1), y.truncate(1))
            high = mul(x.truncate(3), y.truncate(3))
            assert low.order <= high.order
            agree(low, exact)
            agree(high, exact)
            agree(low, high)


class TestTheta:
    def test_theta_tilde_coefficients(self):
        x = theta_tilde(mono(a=1), 2)
        assert x.coefficient(q=Fraction(1, 8), a=HALF) == 1
        assert x.coefficient(q=Fraction(1, 8), a=-HALF) == -1
        assert x.coefficient(q=Fraction(9, 8), a=Fraction(3, 2)) == -1

    def test_triple_product(self):
        a = mono(a=1)
        product = (theta_product(a, 2) * euler(2)).shift_q(Fraction(1, 8))
        ok, residual = product.equal_up_to(theta_tilde(a, 2))
        assert ok, residual.render()

    def test_quasi_periodicity(self):
        a = mono(a=1)
        shifted = theta_tilde(a, 2, Budgets.of(a=1)).shift("a", 1)
        expected = theta_tilde(a, 2) * mono(-1, q=-HALF, a=-1)
        ok, residual = shifted.equal_up_to(expected)
        assert ok, residual.render()

    def test_negated_argument_is_unrepresentable(self):
        with pytest.raises(UnrepresentableError):
            theta_tilde(mono(-1, a=1), 1)

    def test_theta_tilde_order(self):
        assert theta_tilde_order(mono(a=1)) == Fraction(1, 8)
        assert theta_tilde_order(mono(a=1, q=-1)) == Fraction(-3, 8)

    def test_theta01(self):
        v = mono(v=1)
        t0 = theta01(0, v, 2)
        assert t0.coefficient() == 1
        assert t0.coefficient(q=1, v=2) == 1
        assert t0.coefficient(q=1, v=-2) == 1
        t1 = theta01(1, v, 2)
        assert t1.coefficient(q=Fraction(1, 4), v=1) == 1
        assert t1.coefficient(q=Fraction(1, 4), v=-1) == 1
        assert t1.coefficient(q=Fraction(9, 4), v=3) == 0
        with pytest.raises(ValueError):
            theta01(2, v, 1)

    def test_euler(self):
        e = euler(3)
        assert [e.coefficient(q=k) for k in range(3)] == [1, -1, -1]
        assert euler(8).coefficient(q=5) == 1
        assert euler(8).coefficient(q=7) == 1


class TestThetaFraction:
    def test_cleared_denominators(self):
        a, z = mono(a=1), mono(z=1)
        x = ThetaFraction(theta_tilde(a, 2) * theta_tilde(z, 2), (z,))
        y = ThetaFraction(theta_tilde(a, 2))
        result = tf_equal(x, y)
        assert result.equal
        assert result.order == Fraction(17, 8)

    def test_detects_difference(self):
        a = mono(a=1)
        result = tf_equal(ThetaFraction(theta_tilde(a, 2)), ThetaFraction(theta_tilde(a, 2).scale(2)))
        assert not result.equal
        assert result.residual.terms

    def test_bookkeeping(self):
        a = mono(a=1)
        left = ThetaFraction(theta_tilde(a, 2), (), -1, Fraction(-1, 8))
        right = ThetaFraction(theta_tilde(a, 2)).with_bookkeeping(euler_pow=-1, qshift=Fraction(-1, 8))
        assert tf_equal(left, right).equal

    def test_helpers(self):
        a, z = mono(a=1), mono(z=1)
        x = ThetaFraction(theta_tilde(a, 2))
        y = ThetaFraction(theta_tilde(z, 2))
        assert tf_equal(tf_swap_az(x), y).equal
        assert tf_equal(tf_mul(x, y), ThetaFraction(mul(theta_tilde(a, 2), theta_tilde(z, 2)))).equal
        assert tf_equal(tf_scale(x, 2), ThetaFraction(theta_tilde(a, 2).scale(2))).equal
        assert tf_equal(tf_substitute(x, "a", mono(a=-1)), ThetaFraction(theta_tilde(a, 2).scale(-1))).equal

    def test_constant_denominator_rejected(self):
        with pytest.raises(ValueError):
            ThetaFraction(Series.one(), (mono(),))


class TestLaurent:
    def test_equality_by_cross_multiplication(self):
        assert LaurentFraction(A**2 - 1, A - 1) == LaurentFraction(A + 1)
        assert not LaurentFraction(A) == LaurentFraction(Z)

    def test_is_laurent(self):
        assert LaurentFraction(A, V**2).is_laurent()
        assert not LaurentFraction(1, 1 - V).is_laurent()

    def test_bar_and_swap(self):
        x = LaurentFraction(V * A - 1 / Z)
        assert x.bar_v() == LaurentFraction(A / V - 1 / Z)
        assert x.swap_az() == LaurentFraction(V * Z - 1 / A)

    def test_degree(self):
        assert LaurentFraction(V**3 + V**-1, V).degree("v") == 2

    def test_matrix_inverse(self):
        M = LaurentMatrix([[A, V], [1, V * A]])
        assert M @ M.inverse() == LaurentMatrix.identity()

    def test_singular_matrix(self):
        with pytest.raises(SingularMatrixError):
            LaurentMatrix([[A, A], [1, 1]]).inverse()

    def test_mismatches(self):
        M = LaurentMatrix([[A, 0], [0, 1]])
        assert M.mismatches(LaurentMatrix([[A, 1], [0, 1]])) == [(0, 1)]
