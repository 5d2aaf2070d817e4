"""The elliptic canonical family of Hilb^2 built from a coefficient triple (f0, f1, f2).

Restrictions are lattice sums in q, a, z, v.  With O(x)|_p = v^(2x) a^(-eps_p x),

    E([1,1])|_p = f0 * sum_m (-1)^m q^((m+1/2)^2/2) z^(m+1/2) O(m+1/2)|_p
    E([2])|_p   = f1 * piece_0 + f2 * piece_1,
    piece_i     = sum_{l,m} (-1)^m q^((l+i/2)^2 + (m+1/2)^2/2)
                  v^(-2l-i+2m+1) z^(2l+i+m+1/2) O(2l+i-m-1/2)|_p,
    Upsilon     = f0 (f1 theta_0(v) + f2 theta_1(v)).
"""
import itertools
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Dict, NamedTuple, Optional, Tuple

from geometry.model import P2, P11, POINTS, DualPairModel, hilb2_model
from series.lattice import INF, Budgets, Monomial, Series, lattice_radius, product_to_order, to_lattice
from series.theta import theta01
from utils.errors import FCoeffsError

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
KINDS = ("one", "zero", "theta0", "theta1")

# lattice classes of the E([2]) expansion, h_lambda for lambda in Z/8
CLASSES = tuple(range(8))


class FCoeffSpec(NamedTuple):
    """coeff * q^q_shift * X with X one of 1, 0, theta_0(v), theta_1(v)"""

    kind: str
    coeff: Fraction = Fraction(1)
    q_shift: Fraction = Fraction(0)

    @classmethod
    def parse(cls, raw):
        if isinstance(raw, FCoeffSpec):
            return raw
        kind, *rest = raw
        if kind not in KINDS:
            raise ValueError(f"unknown coefficient kind '{kind}'")
        coeff = Fraction(rest[0]) if rest else Fraction(1)
        q_shift = Fraction(rest[1]) if len(rest) > 1 else Fraction(0)
        return cls(kind, coeff, q_shift)

    @property
    def is_zero(self):
        return self.kind == "zero" or self.coeff == 0

    def realize(self, order, budgets=None, denominator=None):
        if self.is_zero:
            return Series.zero(denominator)
        if self.kind == "one":
            return Series.monomial(self.coeff, q=self.q_shift, denominator=denominator)
        kind = 0 if self.kind == "theta0" else 1
        arg = Monomial.of(v=1, denominator=denominator)
        base = theta01(kind, arg, Fraction(order) - self.q_shift, budgets)
        return base.scale(self.coeff).shift_q(self.q_shift)

    def describe(self):
        if self.is_zero:
            return "0"
        body = {"one": "1", "theta0": "theta_0(v)", "theta1": "theta_1(v)"}[self.kind]
        prefix = "" if self.coeff == 1 else f"{self.coeff}*"
        shift = "" if self.q_shift == 0 else f"q^({self.q_shift})*"
        return f"{prefix}{shift}{body}"


def _leading(series):
    order, piece = series.leading()
    return (INF, piece) if order is None else (order, piece)


@dataclass(frozen=True)
class FCoeffs:
    """The coefficient triple of the family, each f_i a series in v and q"""

    specs: Tuple[FCoeffSpec, FCoeffSpec, FCoeffSpec]
    name: str = "custom"
    control: bool = False
    inject_odd: bool = False

    def __post_init__(self):
        specs = tuple(FCoeffSpec.parse(x) for x in self.specs)
        if len(specs) != 3:
            raise ValueError("a coefficient triple has exactly three entries")
        object.__setattr__(self, "specs", specs)
        if not self.control:
            self.validate()

    @classmethod
    def from_preset(cls, name):
        from config.presets import get_preset

        preset = get_preset(name)
        return cls(
            tuple(preset["f"]),
            name=name,
            control=preset.get("control", False),
            inject_odd=preset.get("inject_odd", False),
        )

    def series(self, i, order, budgets=None):
        return self.specs[i].realize(order, budgets)

    def builder(self, i, budgets=None):
        return partial(self.series, i, budgets=budgets)

    def leading(self, i):
        """(c_i, f_{i,0}(v)); c_i is inf for the zero coefficient"""
        spec = self.specs[i]
        if spec.is_zero:
            return INF, Series.zero()
        return _leading(self.series(i, spec.q_shift + 2))

    @property
    def c(self):
        return tuple(self.leading(i)[0] for i in range(3))

    def validate(self):
        """Raise FCoeffsError on the first violated invariant"""
        for i in range(3):
            spec = self.specs[i]
            if spec.is_zero:
                if i < 2:
                    raise FCoeffsError("nonzero", f"f{i} must not vanish")
                continue
            c, lead = self.leading(i)
            f = self.series(i, c + 2)
            for term in f.monomials():
                if (2 * (term.exponent("q") - c)).denominator != 1:
                    raise FCoeffsError("single-valued", f"q^-c{i} f{i} has the term {term}")
            if i < 2 and not lead.equal_up_to(Series.one())[0]:
                raise FCoeffsError("leading", f"f{i} has leading slice {lead.render()}, not 1")
        c0, c1, c2 = self.c
        if c2 != INF:
            if c2 < c1 + Fraction(3, 4):
                raise FCoeffsError("dominance", f"c2 = {c2} is below c1 + 3/4 = {c1 + Fraction(3, 4)}")
            if (2 * (c2 - c1 + Fraction(1, 4))).denominator != 1:
                raise FCoeffsError("half-integrality", f"c2 - c1 + 1/4 = {c2 - c1 + Fraction(1, 4)}")
        return self

    def is_v_symmetric(self, order=2):
        """f_i(1/v) = f_i(v) below q^order for all three coefficients"""
        return all(self.series(i, order).bar_v().equal_up_to(self.series(i, order))[0] for i in range(3))

    def h_builders(self, budgets=None):
        """h_lambda of the lattice-class expansion: h_0 = h_4 = f2, h_2 = h_6 = -f1"""
        f1, f2 = self.builder(1, budgets), self.builder(2, budgets)

        def negated(order):
            return -f1(order)

        builders = {0: f2, 4: f2, 2: negated, 6: negated}
        if self.specs[2].is_zero:
            builders = {2: negated, 6: negated}
        if self.inject_odd:
            builders[1] = lambda order: Series.one()
        return builders

    def describe(self):
        return tuple(spec.describe() for spec in self.specs)


@dataclass(frozen=True)
class GMatrix:
    """G_mu in the z-shift equations delta_z E(mu) = -q^(-G/2) z^(-G) O(-1) E(mu)"""

    values: Tuple[Tuple[str, int], ...] = ((P2, 3), (P11, 1))

    def __getitem__(self, mu):
        return dict(self.values)[mu]

    def factor(self, model: DualPairModel, mu, p):
        G = self[mu]
        return -(Monomial.of(q=Fraction(-G, 2), z=-G) * model.O(p, -1))


# -- lattice sums ------------------------------------------------------------


def _spread(budgets):
    return max(1.0, float(max(budgets.finite())))


def lattice_sum(term, quads, weight, order, budgets=None, denominator=None):
    """Sum term(*index) over a box holding every index whose term can matter below `order`.

    `term` returns (coeff, e_q, e_a, e_z, e_v) or None.  `quads` bound the quadratic part of
    e_q from below per index and `weight` bounds both the linear part of e_q and the growth
    of the a, z, v exponents per unit of index.
    """
    budgets = Budgets() if budgets is None else budgets.finite()
    W = to_lattice(order, denominator)
    linear = weight * _spread(budgets)
    slack = sum(linear * linear / (4 * float(q)) for q in quads) + linear + 1
    radii = [lattice_radius(q, linear, float(order) + slack) for q in quads]
    terms = {}
    for index in itertools.product(*(range(-r, r + 1) for r in radii)):
        value = term(*index)
        if value is None:
            continue
        coeff, *exps = value
        key = tuple(to_lattice(e, denominator) for e in exps)
        terms[key] = terms.get(key, 0) + coeff
    return Series(terms, W, budgets, denominator)


def _line(model: DualPairModel, p):
    """(a, v) exponents of O(1)|_p"""
    O = model.O(p, 1)
    return O.exponent("a"), O.exponent("v")


def _sign(k):
    return -1 if k % 2 else 1


def e11_piece(model, p, order, budgets=None):
    """sum_m (-1)^m q^((m+1/2)^2/2) z^(m+1/2) O(m+1/2)|_p"""
    la, lv = _line(model, p)

    def term(m):
        t = m + HALF
        return _sign(m), t * t / 2, la * t, t, lv * t

    return lattice_sum(term, (HALF,), 5, order, budgets)


def e2_piece(model, p, i, order, budgets=None):
    """The lattice sum multiplying f1 (i = 0) or f2 (i = 1) in E([2])|_p"""
    la, lv = _line(model, p)
    shift = Fraction(i, 2)

    def term(l, m):
        x = 2 * l + i - m - HALF
        e_q = (l + shift) ** 2 + (m + HALF) ** 2 / 2
        e_v = -2 * l - i + 2 * m + 1 + lv * x
        return _sign(m), e_q, la * x, 2 * l + i + m + HALF, e_v

    return lattice_sum(term, (1, HALF), 8, order, budgets)


def h_form_piece(model, p, i, order, budgets=None):
    """The same sums with the line bundle written out, as the h_0 / h_2 terms of E([2])|_p"""
    eps = model.eps(p)

    def term(l, m):
        if i == 1:
            e_q = (l + HALF) ** 2 + (m + HALF) ** 2 / 2
            return _sign(m), e_q, -(2 * l - m + HALF) * eps, 2 * l + m + 3 * HALF, 2 * l + 1
        e_q = Fraction(l * l) + (m + HALF) ** 2 / 2
        return _sign(m), e_q, -(2 * l - m - HALF) * eps, 2 * l + m + HALF, 2 * l

    return lattice_sum(term, (1, HALF), 8, order, budgets)


def class_piece(model, p, lam, order, budgets=None):
    """sum over L - 3M + 3 = lam (mod 8) of (-1)^(M+1) q^((L+M+1)^2/16 + (L-M)^2/8)
    v^((L+M+1)/2) z^(M+1/2) a^(-(L+1/2) eps_p)"""
    eps = model.eps(p)

    def term(L, M):
        if (L - 3 * M + 3 - lam) % 8:
            return None
        e_q = Fraction((L + M + 1) ** 2, 16) + Fraction((L - M) ** 2, 8)
        return -_sign(M), e_q, -(L + HALF) * eps, M + HALF, Fraction(L + M + 1, 2)

    return lattice_sum(term, (Fraction(1, 8), Fraction(1, 8)), 2, order, budgets)


def e2_lambda_piece(model, p, lam, order, budgets=None):
    """sum_m (-1)^m q^(3/2 (m+lam)^2) z^(3(m+lam)) O(m+lam)|_p"""
    la, lv = _line(model, p)
    lam = Fraction(lam)

    def term(m):
        t = m + lam
        return _sign(m), 3 * t * t / 2, la * t, 3 * t, lv * t

    return lattice_sum(term, (Fraction(3, 2),), 9, order, budgets)


def g_piece(model, p, lam, order, budgets=None):
    """sum_l q^(12 (l+lam)^2) v^(4(l+lam)) a^(-8 (l+lam) eps_p)"""
    eps = model.eps(p)
    lam = Fraction(lam)

    def term(l):
        t = l + lam
        return 1, 12 * t * t, -8 * t * eps, 0, 4 * t

    return lattice_sum(term, (12,), 36, order, budgets)


# -- the family ----------------------------------------------------------------


@dataclass
class EllCanonicalFamily:
    f: FCoeffs
    order: Fraction
    budgets: Budgets
    model: DualPairModel
    e2: Dict[str, Series]
    e11: Dict[str, Series]
    upsilon: Series
    _pieces: Dict[tuple, Series] = field(default_factory=dict, repr=False)

    def restriction(self, mu, p):
        return (self.e2 if mu == P2 else self.e11)[p]

    def matrix(self):
        """rows by restriction point, columns by basis element"""
        return tuple(tuple(self.restriction(mu, p) for mu in POINTS) for p in POINTS)

    def dual_matrix(self):
        """E^! with E^!(mu)|_(p^!) the a <-> z swap of E(mu)|_p: entry (j, k) is swap(E)[1-j][1-k]"""
        E = self.matrix()
        n = len(POINTS)
        return tuple(tuple(E[n - 1 - j][n - 1 - k].swap_az() for k in range(n)) for j in range(n))

    def piece(self, name, *args, order=None, budgets=None):
        """Memoized lattice pieces: 'e11', 'e2' (i), 'h' (i), 'class' (lam), 'e2-lambda' (lam), 'g' (lam)"""
        order = Fraction(self.order if order is None else order)
        budgets = self.budgets if budgets is None else budgets
        key = (name, args, order, budgets)
        if key not in self._pieces:
            builders = {
                "e11": e11_piece,
                "e2": e2_piece,
                "h": h_form_piece,
                "class": class_piece,
                "e2-lambda": e2_lambda_piece,
                "g": g_piece,
            }
            self._pieces[key] = builders[name](self.model, *args, order, budgets)
        return self._pieces[key]

    def F(self, k, p, order=None, budgets=None):
        """sum_lambda h_lambda g_(lambda/8 - k eps_p / 3) at p"""
        order = Fraction(self.order if order is None else order)
        eps = self.model.eps(p)
        total = Series.zero()
        for lam, h in sorted(self.f.h_builders(budgets or self.budgets).items()):
            shift = Fraction(lam, 8) - Fraction(k * eps, 3)
            build = partial(self._piece_at, "g", p, shift, budgets=budgets)
            total = total + product_to_order([h, build], order)
        return total

    def _piece_at(self, name, *args, budgets=None):
        *rest, order = args
        return self.piece(name, *rest, order=order, budgets=budgets)

    def map(self, fn):
        """A family whose restrictions are fn applied to these"""
        return EllCanonicalFamily(
            self.f,
            self.order,
            self.budgets,
            self.model,
            {p: fn(x) for p, x in self.e2.items()},
            {p: fn(x) for p, x in self.e11.items()},
            self.upsilon,
        )


def default_budgets(slopes=()):
    """Unit a and v shifts plus the largest |s| of the slope window (at least 1) on z"""
    z = max([Fraction(1)] + [abs(Fraction(s)) for s in slopes])
    return Budgets.of(a=1, z=z, v=1)


def upsilon_series(f: FCoeffs, order, budgets=None):
    """f0 (f1 theta_0(v) + f2 theta_1(v))"""
    arg = Monomial.of(v=1)
    total = Series.zero()
    for i, kind in ((1, 0), (2, 1)):
        if f.specs[i].is_zero:
            continue
        builders = [f.builder(0, budgets), f.builder(i, budgets), partial(theta01, kind, arg, budgets=budgets)]
        total = total + product_to_order(builders, order)
    return total


def build_family(f: FCoeffs, order, budgets=None, model: Optional[DualPairModel] = None):
    """E([2]), E([1,1]) and Upsilon exact below `order` under shifts within `budgets`"""
    started = time.perf_counter()
    order = Fraction(order)
    budgets = default_budgets() if budgets is None else budgets
    model = model or hilb2_model()
    family = EllCanonicalFamily(f, order, budgets, model, {}, {}, Series.zero())
    for p in POINTS:
        piece11 = partial(family._piece_at, "e11", p, budgets=budgets)
        family.e11[p] = product_to_order([f.builder(0, budgets), piece11], order)
        e2 = Series.zero()
        for i in (0, 1):
            if f.specs[i + 1].is_zero:
                continue
            piece = partial(family._piece_at, "e2", p, i, budgets=budgets)
            e2 = e2 + product_to_order([f.builder(i + 1, budgets), piece], order)
        if f.inject_odd:
            e2 = e2 + family.piece("class", p, 1)
        family.e2[p] = e2
    family.upsilon = upsilon_series(f, order, budgets)
    logger.debug(
        "built family %s to order %s in %.1f ms (%d, %d terms at [2])",
        f.name,
        order,
        (time.perf_counter() - started) * 1000,
        len(family.e2[P2]),
        len(family.e11[P2]),
    )
    return family
