"""K-theory limits of the elliptic stable basis at rational slopes."""
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import sympy

from config.settings import parse_rational, slope_fits
from geometry.model import DualPairModel, mono
from geometry.stab import StabMatrix, stab_builder
from series.lattice import A, V, Z, Budgets, Monomial, Series, lattice_denominator
from series.laurent import SWAP, LaurentFraction, LaurentMatrix
from series.theta import theta_tilde, theta_tilde_order
from utils.errors import DivergentLimitError, LatticeError
from utils.reports import make_report

logger = logging.getLogger(__name__)

GENERIC = "generic"
INTEGER_WALL = "integer-wall"
HALF_WALL = "half-integer-wall"

# K-limit prefactor (-v^-1/2)^(dim X / 2)
PREFACTOR = mono(-1, v=Fraction(-1, 2))

LIMIT_MARGIN = Fraction(1, 4)


@dataclass(frozen=True)
class Slope:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def of(cls, value):
        if isinstance(value, Slope):
            return value
        if isinstance(value, str):
            return cls(parse_rational(value))
        return cls(Fraction(value))

    @property
    def classification(self):
        if (2 * self.value).denominator != 1:
            return GENERIC
        return INTEGER_WALL if self.value.denominator == 1 else HALF_WALL

    @property
    def is_generic(self):
        return self.classification == GENERIC

    @property
    def m(self):
        return math.floor(self.value)

    @property
    def lower_half(self):
        """True on m < s < m + 1/2"""
        return self.value - self.m < Fraction(1, 2)

    def check_lattice(self, denominator=None):
        denominator = lattice_denominator() if denominator is None else denominator
        if not slope_fits(self.value, denominator):
            raise LatticeError(f"slope {self.value} shifts z^(1/2) off the 1/{denominator} lattice")
        return self

    def __str__(self):
        return str(self.value)


def _normalized(slice_: Series):
    """(monomial m, slice / m) with m the first term of the slice"""
    first = slice_.monomials()[0]
    lead = Monomial(1, *first.key, first.denominator)
    return lead, slice_ * lead.inverse()


def laurent_ratio(num: Series, den: Series, prefactor: Monomial = None):
    """prefactor * num / den for exact slices"""
    if num.is_exact_zero:
        return LaurentFraction(0)
    ln, num = _normalized(num)
    ld, den = _normalized(den)
    factor = ln / ld
    if prefactor is not None:
        factor = factor * prefactor
    return LaurentFraction(factor.to_sympy() * num.to_sympy(), den.to_sympy())


def k_limit(num: Series, den: Series, s, prefactor: Monomial = None):
    """lim_{q->0} delta_z^{-s}(num / den)"""
    s = Slope.of(s)
    if s.value:
        num = num.shift("z", -s.value)
        den = den.shift("z", -s.value)
    ld, d0 = den.leading()
    if ld is None:
        raise ValueError(f"denominator has no determined terms below q^{den.order}")
    ln, n0 = num.leading()
    if ln is None:
        if num.order > ld:
            return LaurentFraction(0)
        raise ValueError(f"numerator undetermined below q^{num.order}, need beyond q^{ld}")
    if ln < ld:
        raise DivergentLimitError(ln, ld)
    if ln > ld:
        return LaurentFraction(0)
    return laurent_ratio(n0, d0, prefactor)


def _den_leading(args):
    """(order, slice) of prod tt(args) at its least q-order"""
    order = Fraction(0)
    piece = Series.one()
    for arg in args:
        low = theta_tilde_order(arg)
        _, lead = theta_tilde(arg, low + Fraction(1, lattice_denominator())).leading()
        order += low
        piece = piece * lead
    return order, piece


def _limit_entry(model: DualPairModel, stab: StabMatrix, p, at, s: Slope):
    """twisted K-limit of Stab(p)|_at / theta(v N_p!,-) at slope s"""
    entry = stab.restriction(p, at)
    if entry.is_zero:
        return LaurentFraction(0)
    args = tuple(w * mono(v=1) for w in model.N_dual_minus(p))
    tf = entry.with_den(*args).with_bookkeeping(euler_pow=len(args), qshift=Fraction(len(args), 8))
    if s.value:
        tf = tf.shift("z", -s.value)
    ld, d0 = _den_leading(tf.den_args)
    num = tf.num.shift_q(tf.qshift)
    ln, n0 = num.leading()
    if ln is None:
        if num.order > ld:
            return LaurentFraction(0)
        raise ValueError(f"Stab({p})|_{at}: numerator undetermined below q^{num.order}")
    if ln < ld:
        raise DivergentLimitError(ln, ld)
    if ln > ld:
        return LaurentFraction(0)
    return laurent_ratio(n0, d0, PREFACTOR)


def limit_order(model: DualPairModel, stab: StabMatrix, s: Slope):
    """Numerator order needed to read every entry's limit at slope s"""
    need = Fraction(0)
    for p, at, entry in stab.entries():
        if entry.is_zero:
            continue
        args = [w * mono(v=1) for w in model.N_dual_minus(p)] + list(entry.den_args)
        shifted = [arg.shift("z", -s.value) for arg in args]
        ld = sum((theta_tilde_order(arg) for arg in shifted), Fraction(0))
        need = max(need, ld - entry.qshift - Fraction(len(args) - len(entry.den_args), 8))
    return need + LIMIT_MARGIN


def k_stab(model: DualPairModel, s, stab: StabMatrix = None):
    """sqrt(L(kappa)) (x) Stab^K_s as a matrix with columns Stab^K_s(p) restricted to each point"""
    s = Slope.of(s)
    budgets = Budgets.of(a=0, z=abs(s.value), v=0)
    build = stab_builder(model)
    trial = stab if stab is not None else build(model, Fraction(1, 2), budgets)
    need = limit_order(model, trial, s)
    if stab is None or stab.order < need or any(
        x.num.budgets.z < abs(s.value) for _, _, x in stab.entries() if not x.is_zero
    ):
        logger.debug("building stable basis to order %s for slope %s", need, s)
        stab = build(model, max(need, Fraction(1, lattice_denominator())), budgets)
    points = model.point_ids
    columns = [[_limit_entry(model, stab, p, at, s) for at in points] for p in points]
    return LaurentMatrix.from_columns(columns)


def k_stab_closed_form(s):
    """Twisted K-theoretic stable basis at slope s in closed form (columns [2], [1,1])"""
    s = Slope.of(s)
    m = s.m
    kind = s.classification
    if kind == GENERIC:
        k = 2 * m if s.lower_half else 2 * m + 1
        a_pow = -2 * m if s.lower_half else -2 * m - 2
        col2 = [V**k * (A - 1 / A), 0]
        col11 = [V**k * A**a_pow * (V - 1 / V), V**k * (V * A - 1 / (V * A))]
    elif kind == INTEGER_WALL:
        k = 2 * m
        col2 = [V**k * (A - 1 / A) * (1 - V**-2 * Z**-2) / (1 - Z**-2 / V), 0]
        col11 = [
            V**k * A ** (-2 * m) * (V - 1 / V) * (1 + A / Z) * (1 - 1 / (A * Z)) / (1 - V * Z**-2),
            V**k * (V * A - 1 / (V * A)) * (1 - Z**-2) / (1 - V * Z**-2),
        ]
    else:
        k = 2 * m + 1
        col2 = [V**k * (A - 1 / A) * (1 - V**-2 * Z**-2) / (1 - Z**-2 / V), 0]
        col11 = [
            V**k * A ** (-2 * m - 1) * (V - 1 / V) * (1 / A + 1 / Z) * (1 - A / Z) / (1 - V * Z**-2),
            V**k * (V * A - 1 / (V * A)) * (1 - Z**-2) / (1 - V * Z**-2),
        ]
    return LaurentMatrix.from_columns([col2, col11])


def stab_minus(S: LaurentMatrix):
    """Opposite-chamber matrix: swap * S|_{a -> 1/a} * swap"""
    return SWAP @ S.invert("a") @ SWAP


def check_k_limits(model: DualPairModel, slopes, suite="k-limit"):
    """Engine limits against the closed forms, plus z-independence at generic slopes"""
    reports = []
    for value in slopes:
        s = Slope.of(value)
        started = time.perf_counter()
        computed = k_stab(model, s)
        expected = k_stab_closed_form(s)
        failures = []
        for i, j in computed.mismatches(expected):
            failures.append(f"[{model.point_ids[i]}, {model.point_ids[j]}] = {computed[i, j].render()}")
        if s.is_generic:
            for i in range(computed.size):
                for j in range(computed.size):
                    if not computed[i, j].is_free_of("z"):
                        failures.append(f"entry ({i}, {j}) depends on z at generic slope {s}")
        reports.append(make_report(suite, f"s={s}", failures, started, detail={"slope": str(s), "kind": s.classification}))
    return reports


def check_opposite_limits(model: DualPairModel, flop_model: DualPairModel, slopes, suite="k-limit"):
    """K-limits of the opposite chamber equal the swap conjugation of the a-inverted matrix"""
    reports = []
    for value in slopes:
        s = Slope.of(value)
        started = time.perf_counter()
        computed = k_stab(flop_model, s)
        expected = stab_minus(k_stab_closed_form(s))
        failures = [f"entry {ij}" for ij in computed.mismatches(expected)]
        reports.append(make_report(suite, f"opposite s={s}", failures, started))
    return reports


def wall_denominators_ok(S: LaurentMatrix):
    """Every reduced denominator is a monomial times powers of (1 - v^{+-1} z^{-2})"""
    allowed = [sympy.expand((1 - V * Z**-2) * Z**2), sympy.expand((1 - Z**-2 / V) * Z**2 * V)]
    for i in range(S.size):
        for j in range(S.size):
            den = S[i, j].cancel().den
            for factor, _ in sympy.factor_list(den)[1]:
                if factor.is_Symbol:
                    continue
                if not any(sympy.simplify(factor / f).is_number for f in allowed):
                    return False
    return True
