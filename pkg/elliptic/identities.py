"""Theta and lattice identities behind the construction of the family.

The five-theta identity, the f_AB reflection and the cancelation sums it
implies, the linear constraints duality puts on the lattice-class
coefficients h_lambda, and the matching of the three leading-exponent
functions r_1, r_2, r_3.
"""
import itertools
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import sympy

from elliptic.family import CLASSES, HALF, FCoeffs, class_piece
from geometry.model import P2, P11, hilb2_model
from series.lattice import Budgets, Monomial, Series, lattice_radius, product_to_order, to_lattice
from series.theta import theta01, theta_tilde
from utils.reports import make_report, residual_terms

logger = logging.getLogger(__name__)


def _m(**exps):
    return Monomial.of(**exps)


# -- five-theta identity ---------------------------------------------------------


def _product(args, eps_arg, eps, order):
    builders = [partial(theta_tilde, arg, budgets=Budgets()) for arg in args]
    builders.append(partial(theta01, eps, eps_arg, budgets=Budgets()))
    return product_to_order(builders, order)


def theta_identity_sides(eps, order):
    """Both sides times q^(1/2) (q;q)^4, i.e. with every theta replaced by its sum form tt"""
    left = _product(
        (_m(v=-1, a=1), _m(v=1, z=1), _m(z=1, a=1), _m(v=2, z=-1, a=1)), _m(v=1, z=1, a=-1), eps, order
    ) + _product(
        (_m(v=-1, a=1), _m(v=1, z=1), _m(z=1, a=1), _m(v=2, z=1, a=-1)), _m(v=1, z=-1, a=1), eps, order
    )
    right = _product(
        (_m(a=-2), _m(v=1, z=2, a=-1), _m(v=-1, z=1), _m(v=-2)), _m(v=1), eps, order
    ) + _product(
        (_m(z=-2), _m(v=1, z=1, a=-2), _m(v=-1, a=-1), _m(v=-2)), _m(v=1), eps, order
    )
    return left, right


def check_theta_identity(eps, order=2, suite="theta-id"):
    if eps not in (0, 1):
        raise ValueError(f"eps must be 0 or 1, got {eps}")
    started = time.perf_counter()
    left, right = theta_identity_sides(eps, Fraction(order))
    ok, residual = left.equal_up_to(right)
    failures = [] if ok else residual_terms(residual)
    return make_report(suite, f"eps={eps}", failures, started, order=min(left.order, right.order))


# -- f_AB and the cancelation sums ------------------------------------------------------


@dataclass(frozen=True)
class FABFunction:
    """f_AB(b, c, d) = 21/2 b^2 + ((A+B)/2 - 3) b + A^2/8 - AB/12 + B^2/8 + 1/4 + 3/2 (c+1/2)^2 + 3 d^2"""

    A: int
    B: int

    def __call__(self, b, c, d):
        A, B = Fraction(self.A), Fraction(self.B)
        b, c, d = Fraction(b), Fraction(c), Fraction(d)
        return (
            Fraction(21, 2) * b * b
            + ((A + B) / 2 - 3) * b
            + A * A / 8
            - A * B / 12
            + B * B / 8
            + Fraction(1, 4)
            + Fraction(3, 2) * (c + HALF) ** 2
            + 3 * d * d
        )

    def symbolic(self):
        b, c, d = sympy.symbols("b c d")
        half = sympy.Rational(1, 2)
        A, B = sympy.Integer(self.A), sympy.Integer(self.B)
        expr = (
            sympy.Rational(21, 2) * b**2
            + ((A + B) / 2 - 3) * b
            + A**2 / 8
            - A * B / 12
            + B**2 / 8
            + sympy.Rational(1, 4)
            + sympy.Rational(3, 2) * (c + half) ** 2
            + 3 * d**2
        )
        return expr, (b, c, d)


PARAMETER_WINDOW = range(-2, 3)
SIXTHS = tuple(Fraction(k, 6) for k in range(-6, 7))


def check_fab_symmetry(window=PARAMETER_WINDOW, suite="lattice-identities"):
    """f_AB(b, -1-c, d) = f_AB(b, c, d) symbolically and on a grid of sixths"""
    started = time.perf_counter()
    failures = []
    for A, B in itertools.product(window, window):
        f = FABFunction(A, B)
        expr, (b, c, d) = f.symbolic()
        if sympy.expand(expr.subs(c, -1 - c) - expr) != 0:
            failures.append(f"f_{A},{B} is not symmetric under c -> -1-c")
            continue
        for b0, c0, d0 in itertools.product(SIXTHS[::3], SIXTHS, SIXTHS[::2]):
            if f(b0, -1 - c0, d0) != f(b0, c0, d0):
                failures.append(f"f_{A},{B}({b0}, {c0}, {d0})")
                break
    return make_report(suite, "fab-symmetry", failures, started)


def cancelation_sum(f: FABFunction, b, d, lam, radius):
    """{exponent: coefficient} of sum over c in Z + lam, |c + 1/2| <= radius, of (-1)^[c] q^f(b, c, d)"""
    lam = Fraction(lam)
    total = {}
    bound = int(radius) + 2
    for k in range(-bound, bound + 1):
        c = k + lam
        if abs(c + HALF) > radius:
            continue
        e = f(b, c, d)
        total[e] = total.get(e, 0) + (-1) ** (k % 2)
    return {e: x for e, x in total.items() if x}


LAMBDAS = (Fraction(0), Fraction(1, 6), Fraction(1, 3), HALF, Fraction(2, 3))


def check_cancelation(radius=6, window=PARAMETER_WINDOW, suite="lattice-identities"):
    """The sum over Z + lam equals minus the sum over Z - lam on reflection-symmetric windows"""
    started = time.perf_counter()
    failures = []
    for A, B in itertools.product(window, window):
        f = FABFunction(A, B)
        for b, d, lam in itertools.product(SIXTHS[4:9], SIXTHS[4:9], LAMBDAS):
            plus = cancelation_sum(f, b, d, lam, radius)
            minus = cancelation_sum(f, b, d, -lam, radius)
            if plus != {e: -x for e, x in minus.items()}:
                failures.append(f"A={A} B={B} b={b} d={d} lam={lam}")
    return make_report(suite, "cancelation", failures, started)


# -- r-functions ------------------------------------------------------------------------

_M = sympy.Symbol("m")

R_FUNCTIONS = {
    "r1": sympy.Rational(3, 2) * (_M + sympy.Rational(1, 6)) ** 2,
    "r2": sympy.Rational(3, 2) * (_M - sympy.Rational(1, 6)) ** 2,
    "r3": sympy.Rational(1, 2) * (_M + sympy.Rational(1, 2)) ** 2,
}


def _r(name, value):
    return R_FUNCTIONS[name].subs(_M, value)


def r_matchings():
    """Pairs of expressions in m that must agree"""
    m = _M
    half = sympy.Rational(1, 2)
    return {
        "r1-r2": (_r("r1", m) - (3 * m + half) * m, _r("r2", m) - (3 * m - half) * m),
        "r1-r2 shifted": (
            _r("r1", m) - (3 * m + half) * (m + half),
            _r("r2", m + 1) - (3 * m + sympy.Rational(5, 2)) * (m + half),
        ),
        "r3": (_r("r3", m) - (m + half) * m, _r("r3", m - 1) - (m - half) * m),
    }


def check_r_matching(window=range(-4, 5), suite="lattice-identities"):
    started = time.perf_counter()
    failures = []
    for name, (lhs, rhs) in r_matchings().items():
        if sympy.expand(lhs - rhs) != 0:
            failures.append(f"{name}: {sympy.expand(lhs - rhs)}")
            continue
        for value in window:
            if lhs.subs(_M, value) != rhs.subs(_M, value):
                failures.append(f"{name} at m={value}")
    return make_report(suite, "r-matching", failures, started)


# -- h-constraints ------------------------------------------------------------------------


def _collect(equations, series: Series, weight, watermark):
    for key, coeff in series.items():
        if key[0] < watermark:
            equations[key] = equations.get(key, 0) + weight * sympy.Rational(Fraction(coeff).numerator, Fraction(coeff).denominator)


def _solve(equations, unknowns):
    solutions = sympy.linsolve([e for e in equations.values() if e != 0], unknowns)
    if not isinstance(solutions, sympy.FiniteSet) or len(solutions) == 0:
        return None
    (values,) = tuple(solutions)
    return dict(zip(unknowns, values))


def odd_and_pair_constraints(order=1, model=None):
    """Solve sum_i x_i (G_i + swap G_i) = 0 at [1,1]: returns (solution, free symbols)"""
    model = model or hilb2_model()
    x = sympy.symbols("x0:8")
    W = to_lattice(order)
    equations = {}
    for i in CLASSES:
        G = class_piece(model, P11, i, order, Budgets())
        _collect(equations, G + G.swap_az(), x[i], W)
    solution = _solve(equations, x)
    if solution is None:
        return None, set(), x
    free = set().union(*(sympy.sympify(value).free_symbols for value in solution.values()))
    return solution, free, x


def _theta_coefficients(kind, order):
    series = theta01(kind, Monomial.of(v=1), order)
    return {(key[0], key[3]): coeff for key, coeff in series.items()}


UPSILON_V_RANGE = range(-2, 3)


def class_placeholders(f: FCoeffs, order=1):
    """x_lambda = h_lambda of the family as symbols, shared by classes whose h agree up to sign.

    Returns ({lambda: expression}, the placeholder symbols).
    """
    seen = []
    x_values = {}
    for lam, build in sorted(f.h_builders(Budgets()).items()):
        h = build(Fraction(order) + 2)
        if h.is_exact_zero:
            continue
        for series, symbol in seen:
            if h.equal_up_to(series)[0]:
                x_values[lam] = symbol
                break
            if h.equal_up_to(-series)[0]:
                x_values[lam] = -symbol
                break
        else:
            symbol = sympy.Symbol(f"h{lam}")
            seen.append((h, symbol))
            x_values[lam] = symbol
    return x_values, tuple(symbol for _, symbol in seen)


def upsilon_constraints(order=1, model=None, f: FCoeffs = None):
    """Solve the ([2],[2]) duality component for h^[2], the [2] class coefficients and Upsilon.

    The [1,1] class coefficients x_lambda are the h_lambda of `f` as placeholders, with an
    E11 coefficient 1.  Returns (solution, f symbol, y, u, x_values, placeholders).
    """
    model = model or hilb2_model()
    order = Fraction(order)
    zero = Budgets()
    x_values, placeholders = class_placeholders(f or FCoeffs.from_preset("theta"), order)
    W = to_lattice(order)
    f = sympy.Symbol("f")
    y = sympy.symbols("y0:8")
    steps = range(0, int(8 * (order - Fraction(1, 4))) + 1)
    u = {(k, j): sympy.Symbol(f"u_{k}_{j + 2}") for k in steps for j in UPSILON_V_RANGE}

    e11_dual = theta_tilde(Monomial.of(z=1, v=2, a=1), order, zero).swap_az()
    e11 = theta_tilde(Monomial.of(z=1, v=2, a=-1), order, zero)

    equations = {}
    for i in CLASSES:
        G = class_piece(model, P2, i, order, zero)
        _collect(equations, G * e11_dual, y[i], W)
    for i, value in x_values.items():
        G_dual = class_piece(model, P11, i, order, zero).swap_az()
        _collect(equations, e11 * G_dual, f * value, W)
    stab = product_to_order(
        [partial(theta_tilde, Monomial.of(a=-2), budgets=zero), partial(theta_tilde, Monomial.of(v=-2, z=-2), budgets=zero)],
        order,
    )
    for (k, j), symbol in u.items():
        _collect(equations, stab * Monomial.of(q=Fraction(k, 8), v=j), -symbol, W)

    unknowns = (f,) + tuple(y) + tuple(u.values())
    return _solve(equations, unknowns), f, y, u, x_values, placeholders


def invertibility_leading(c, order=2):
    """Leading (order, slice) of S_e^2 - S_o^2 with S_e, S_o the sums of q^((m-c)^2) v^(2m) over even, odd m"""
    c = Fraction(c)
    radius = lattice_radius(1, 2 * abs(c), order) + 1
    even, odd = {}, {}
    for m in range(-radius, radius + 1):
        e = (m - c) ** 2
        if e >= order:
            continue
        key = (to_lattice(e), 0, 0, to_lattice(2 * m))
        (even if m % 2 == 0 else odd)[key] = 1
    W = to_lattice(order)
    S_e = Series(even, W)
    S_o = Series(odd, W)
    return (S_e * S_e - S_o * S_o).leading()


def fits_pairs(pairs, free, x, x_values):
    """True when some value of the free parameters puts every x_lambda at the family's h_lambda"""
    equations = [sympy.expand(pairs[x[i]] - x_values.get(i, 0)) for i in CLASSES]
    if not free:
        return all(e == 0 for e in equations)
    fit = sympy.linsolve(equations, sorted(free, key=str))
    return isinstance(fit, sympy.FiniteSet) and len(fit) > 0


def check_h_constraints(order=1, suite="h-constraints", f: FCoeffs = None):
    """Constraints on h_lambda from the ([1,1],[2]) and ([2],[2]) duality components, the latter
    fed with the [1,1] class coefficients of `f`"""
    reports = []

    started = time.perf_counter()
    failures = []
    pairs, free, x = odd_and_pair_constraints(order)
    if pairs is None:
        failures.append("no solution")
    else:
        for i in CLASSES:
            if i % 2 and pairs[x[i]] != 0:
                failures.append(f"h_{i} = {pairs[x[i]]} for odd {i}")
        for i, j in ((0, 4), (2, 6)):
            if sympy.simplify(pairs[x[i]] - pairs[x[j]]) != 0:
                failures.append(f"h_{i} != h_{j}")
        if len(free) != 2:
            failures.append(f"{len(free)} free parameters, expected 2")
    detail = {"free": sorted(str(s) for s in free)}
    reports.append(make_report(suite, "parity-and-pairs", failures, started, order=order, detail=detail))

    started = time.perf_counter()
    failures = []
    solution, e11_coeff, y, u, x_values, placeholders = upsilon_constraints(order, f=f)
    if pairs is not None and not fits_pairs(pairs, free, x, x_values):
        shown = ", ".join(f"h_{i} = {v}" for i, v in sorted(x_values.items()))
        failures.append(f"[1,1] class coefficients {shown} leave the ([1,1],[2]) solutions")
    if solution is None:
        failures.append("no solution")
    else:
        for i in CLASSES:
            target = solution[e11_coeff] * x_values.get(i, 0)
            if sympy.simplify(solution[y[i]] - target) != 0:
                failures.append(f"h[2]_{i} = {solution[y[i]]}, expected {target}")
        top = Fraction(max(k for k, _ in u) + 1, 8)
        theta0, theta1 = _theta_coefficients(0, top), _theta_coefficients(1, top)
        y0, y2 = solution[y[0]], solution[y[2]]
        for (k, j), symbol in u.items():
            key = (to_lattice(Fraction(k, 8)), to_lattice(j))
            expected = y0 * theta1.get(key, 0) - y2 * theta0.get(key, 0)
            if sympy.simplify(solution[symbol] - expected) != 0:
                failures.append(f"Upsilon at q^({Fraction(k, 8)}) v^{j}: {solution[symbol]} vs {expected}")
        free = set().union(*(sympy.sympify(v).free_symbols for v in solution.values())) - set(placeholders)
        if free != {e11_coeff}:
            failures.append(f"free parameters {sorted(str(s) for s in free)}, expected f only")
    detail = {"x": {lam: str(value) for lam, value in sorted(x_values.items())}}
    reports.append(make_report(suite, "upsilon", failures, started, order=order, detail=detail))

    started = time.perf_counter()
    failures = []
    detail = {}
    for c in (Fraction(-1, 4), Fraction(1, 4)):
        low, piece = invertibility_leading(c)
        if low is None:
            failures.append(f"determinant vanishes to order 2 at c={c}")
        else:
            detail[str(c)] = f"q^({low}) ({piece.render()})"
    reports.append(make_report(suite, "invertibility", failures, started, detail=detail))
    return reports

