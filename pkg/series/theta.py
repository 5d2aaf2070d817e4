"""Theta functions as substitution-sound lattice sums.

All theta arithmetic goes through the sum form

    tt(x) = sum_m (-1)^m q^((m+1/2)^2/2) x^(m+1/2) = q^(1/8) (q;q) theta(x)

and theta(x) itself is tt(x) with the bookkeeping factor q^(-1/8) (q;q)^(-1).
Quotients by thetas are kept structurally in ThetaFraction and compared by
cross-multiplication.
"""
import logging
from collections import Counter, namedtuple
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Tuple

from series.lattice import (
    INF,
    Budgets,
    Monomial,
    Series,
    _reach,
    lattice_denominator,
    lattice_radius,
    product_to_order,
    to_lattice,
)
from utils.errors import LatticeError, UnrepresentableError

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

Comparison = namedtuple("Comparison", ["equal", "residual", "order"])


def _coerce_budgets(budgets):
    if budgets is None:
        return Budgets()
    if isinstance(budgets, Budgets):
        return budgets.finite()
    return Budgets.of(*budgets)


def _check_arg(arg):
    if arg.coeff == -1:
        raise UnrepresentableError(f"theta of the negated monomial {arg} is not a lattice sum")
    if arg.coeff != 1:
        raise ValueError(f"theta arguments must have coefficient +-1, got {arg.coeff}")


def _scaled(e, t, what):
    value = e * t
    if value.denominator != 1:
        raise LatticeError(f"{what} exponent leaves the lattice at index {t}")
    return value.numerator


def theta_tilde(arg: Monomial, order, budgets=None):
    """Sum form tt(arg), exact below `order` under any shift within `budgets`"""
    _check_arg(arg)
    budgets = _coerce_budgets(budgets)
    arg = arg.lifted()
    D = arg.denominator
    W = to_lattice(order, D)
    eq = arg.q
    r = _reach(arg.key, budgets)
    bound = lattice_radius(Fraction(D, 2), abs(eq) + r, W)
    terms = {}
    for m in range(-bound - 1, bound + 1):
        t = Fraction(2 * m + 1, 2)
        e_q = D * t * t / 2 + eq * t
        if e_q - abs(t) * r >= W:
            continue
        key = (
            _scaled(1, e_q, "q"),
            _scaled(arg.a, t, "a"),
            _scaled(arg.z, t, "z"),
            _scaled(arg.v, t, "v"),
        )
        terms[key] = terms.get(key, 0) + (-1) ** (m % 2)
    return Series(terms, W, budgets, D)


def theta_tilde_order(arg: Monomial):
    """Least q-exponent of tt(arg) as a Fraction"""
    shift = Fraction(arg.q, arg.denominator)
    centre = -shift
    best = None
    base = int(centre) - 2
    for m in range(base, base + 5):
        t = m + HALF
        value = t * t / 2 + shift * t
        if best is None or value < best:
            best = value
    return best


def theta_product(arg: Monomial, order):
    """Product form (x^1/2 - x^-1/2) prod_{m>=1} (1 - q^m x)(1 - q^m/x)"""
    _check_arg(arg)
    if arg.q != 0:
        raise UnrepresentableError("the product form is only expanded for arguments free of q")
    arg = arg.lifted()
    D = arg.denominator
    W = to_lattice(order, D)
    half = arg ** HALF
    result = Series({half.key: 1, half.inverse().key: -1}, W, Budgets(), D)
    x = arg.key
    inv = tuple(-e for e in x)
    m = 1
    while m * D < W:
        factor = Series(
            {
                (0, 0, 0, 0): 1,
                (m * D,) + x[1:]: -1,
                (m * D,) + inv[1:]: -1,
                (2 * m * D, 0, 0, 0): 1,
            },
            denominator=D,
        )
        result = (result * factor).truncate(order)
        m += 1
    return result


def euler(order, denominator=None):
    """(q;q)_inf by the pentagonal number theorem"""
    D = lattice_denominator() if denominator is None else denominator
    W = to_lattice(order, D)
    terms = {}
    k = 0
    while True:
        grew = False
        for j in ((k, -k) if k else (0,)):
            e = j * (3 * j - 1) // 2
            if e * D < W:
                terms[(e * D, 0, 0, 0)] = (-1) ** (j % 2)
                grew = True
        if not grew and k > 0:
            break
        k += 1
    return Series(terms, W, Budgets(), D)


def theta01(kind, arg: Monomial, order, budgets=None):
    """theta_0(x) = sum q^(l^2) x^(2l), theta_1(x) = sum q^((l+1/2)^2) x^(2l+1)"""
    if kind not in (0, 1):
        raise ValueError(f"kind must be 0 or 1, got {kind}")
    _check_arg(arg)
    budgets = _coerce_budgets(budgets)
    arg = arg.lifted()
    D = arg.denominator
    W = to_lattice(order, D)
    eq = arg.q
    r = _reach(arg.key, budgets)
    bound = lattice_radius(D, 2 * (abs(eq) + r), W)
    terms = {}
    offset = Fraction(kind, 2)
    for l in range(-bound - 1, bound + 1):
        t = l + offset
        e_q = D * t * t + 2 * t * eq
        if e_q - 2 * abs(t) * r >= W:
            continue
        key = (
            _scaled(1, e_q, "q"),
            _scaled(arg.a, 2 * t, "a"),
            _scaled(arg.z, 2 * t, "z"),
            _scaled(arg.v, 2 * t, "v"),
        )
        terms[key] = terms.get(key, 0) + 1
    return Series(terms, W, budgets, D)


def _arg_sort_key(arg):
    return arg.exponents()


@dataclass(frozen=True)
class ThetaFraction:
    """q^qshift (q;q)^euler_pow * num / prod tt(den_args)"""

    num: Series
    den_args: Tuple[Monomial, ...] = ()
    euler_pow: int = 0
    qshift: Fraction = Fraction(0)

    def __post_init__(self):
        for arg in self.den_args:
            _check_arg(arg)
            if arg.is_constant:
                raise ValueError(f"degenerate denominator theta argument {arg}")
        object.__setattr__(self, "den_args", tuple(sorted(self.den_args, key=_arg_sort_key)))
        object.__setattr__(self, "qshift", Fraction(self.qshift))

    @classmethod
    def of(cls, num: Series):
        return cls(num)

    @property
    def denominator(self):
        return self.num.denominator

    @property
    def is_zero(self):
        return self.num.is_exact_zero

    def __mul__(self, other):
        if isinstance(other, ThetaFraction):
            return ThetaFraction(
                self.num * other.num,
                self.den_args + other.den_args,
                self.euler_pow + other.euler_pow,
                self.qshift + other.qshift,
            )
        return ThetaFraction(self.num * other, self.den_args, self.euler_pow, self.qshift)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor):
        return ThetaFraction(self.num.scale(factor), self.den_args, self.euler_pow, self.qshift)

    def with_den(self, *args):
        return ThetaFraction(self.num, self.den_args + tuple(args), self.euler_pow, self.qshift)

    def with_bookkeeping(self, euler_pow=0, qshift=0):
        """Multiply by q^qshift (q;q)^euler_pow"""
        return ThetaFraction(self.num, self.den_args, self.euler_pow + euler_pow, self.qshift + Fraction(qshift))

    def substitute(self, var, image):
        return ThetaFraction(
            self.num.substitute(var, image),
            tuple(arg.substitute(var, image) for arg in self.den_args),
            self.euler_pow,
            self.qshift,
        )

    def shift(self, var, amount):
        if amount == 0:
            return self
        return ThetaFraction(
            self.num.shift(var, amount),
            tuple(arg.shift(var, amount) for arg in self.den_args),
            self.euler_pow,
            self.qshift,
        )

    def apply_shift(self, shift):
        result = self
        for var, amount in shift.items():
            result = result.shift(var, amount)
        return result

    def remap(self, mapping):
        return ThetaFraction(
            self.num.remap(mapping),
            tuple(arg.remap(mapping) for arg in self.den_args),
            self.euler_pow,
            self.qshift,
        )

    def swap_az(self):
        return ThetaFraction(
            self.num.swap_az(), tuple(arg.swap_az() for arg in self.den_args), self.euler_pow, self.qshift
        )

    def invert(self, var):
        return ThetaFraction(
            self.num.invert(var), tuple(arg.invert(var) for arg in self.den_args), self.euler_pow, self.qshift
        )

    def bar_v(self):
        return self.invert("v")

    def restrict_budgets(self, **budgets):
        return ThetaFraction(self.num.restrict_budgets(**budgets), self.den_args, self.euler_pow, self.qshift)

    def __repr__(self):
        den = " ".join(f"tt({arg})" for arg in self.den_args) or "1"
        return (
            f"ThetaFraction(q^({self.qshift}) (q;q)^{self.euler_pow} "
            f"[{self.num.render(limit=6)}] / [{den}])"
        )


def theta_fraction(arg: Monomial, order, budgets=None):
    """theta(arg) = q^(-1/8) (q;q)^(-1) tt(arg)"""
    return ThetaFraction(theta_tilde(arg, order, budgets), (), -1, Fraction(-1, 8))


def tf_mul(x, y):
    return x * y


def tf_scale(x, factor):
    return x.scale(factor)


def tf_substitute(x, var, image):
    return x.substitute(var, image)


def tf_swap_az(x):
    return x.swap_az()


def _denominator_factor(args, euler_power, order, denominator):
    builders = [partial(theta_tilde, arg, budgets=None) for arg in args]
    builders += [partial(euler, denominator=denominator)] * euler_power
    if not builders:
        return Series.one(denominator)
    return product_to_order(builders, order)


def _cleared(num, args, euler_power, qshift, target):
    """num * prod tt(args) * (q;q)^euler_power * q^qshift, exact below target"""
    D = num.denominator
    if num.is_exact_zero:
        return Series.zero(D)
    if not args and euler_power == 0:
        return num.shift_q(qshift)
    low = num.restrict_budgets(a=0, z=0, v=0).lower_bound()
    need = target - qshift - low
    factor = _denominator_factor(args, euler_power, need, D)
    return (num * factor).shift_q(qshift)


def tf_equal(x: ThetaFraction, y: ThetaFraction, order=None):
    """Compare two theta fractions by clearing denominators on both sides"""
    if x.denominator != y.denominator:
        raise LatticeError("theta fractions on different lattices")
    if x.is_zero and y.is_zero:
        return Comparison(True, Series.zero(x.denominator), INF)
    dx, dy = Counter(x.den_args), Counter(y.den_args)
    common = dx & dy
    only_x = sorted((dx - common).elements(), key=_arg_sort_key)
    only_y = sorted((dy - common).elements(), key=_arg_sort_key)
    euler_base = min(x.euler_pow, y.euler_pow)
    shift_base = min(x.qshift, y.qshift)
    lhs_shift, rhs_shift = x.qshift - shift_base, y.qshift - shift_base
    lhs_euler, rhs_euler = x.euler_pow - euler_base, y.euler_pow - euler_base

    def reach(tf, args, shift):
        if tf.num.is_exact_zero:
            return INF
        if tf.num.is_exact and not args:
            return INF
        extra = sum((theta_tilde_order(arg) for arg in args), Fraction(0))
        return tf.num.order + extra + shift

    target = min(reach(x, only_y, lhs_shift), reach(y, only_x, rhs_shift))
    if order is not None:
        target = min(target, Fraction(order))
    if target == INF:
        if only_x or only_y or lhs_euler or rhs_euler:
            raise ValueError("an explicit order is needed to compare exact numerators with theta denominators")
        ok, residual = x.num.shift_q(lhs_shift).equal_up_to(y.num.shift_q(rhs_shift))
        return Comparison(ok, residual, INF)
    lhs = _cleared(x.num, only_y, lhs_euler, lhs_shift, target)
    rhs = _cleared(y.num, only_x, rhs_euler, rhs_shift, target)
    lhs = lhs.truncate(target) if lhs.order > target else lhs
    rhs = rhs.truncate(target) if rhs.order > target else rhs
    ok, residual = lhs.equal_up_to(rhs)
    achieved = min(lhs.order, rhs.order)
    logger.debug("theta fraction comparison at order %s: %s", achieved, "equal" if ok else "different")
    return Comparison(ok, residual, achieved)
