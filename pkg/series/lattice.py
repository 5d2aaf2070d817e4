"""Exact truncated q-series with Laurent monomials in a, z, v.

Every exponent lives on the lattice (1/D)Z and is stored as its integer
numerator.  A series carries a watermark W and per-variable shift budgets
(S_a, S_z, S_v).  A stored term with exponent quadruple (e_q, e_a, e_z, e_v)
satisfies

    e_q - (|e_a| S_a + |e_z| S_z + |e_v| S_v) < W

and its coefficient is exact.  Any term not stored has e_q at or above W
even after substituting var -> q^s var with |s| up to the budget, so the
series stays exact below W under every admitted substitution.
"""
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Dict, NamedTuple, Sequence, Tuple

import sympy

from config.settings import DENOMINATOR
from utils.errors import BudgetExceededError, LatticeError, UnrepresentableError

logger = logging.getLogger(__name__)

INF = math.inf
VARIABLES = ("q", "a", "z", "v")
SHIFTABLE = ("a", "z", "v")
_INDEX = {name: i for i, name in enumerate(VARIABLES)}

Q, A, Z, V = sympy.symbols("q a z v")
SYMBOLS = {"q": Q, "a": A, "z": Z, "v": V}

Key = Tuple[int, int, int, int]

_ACTIVE = {"denominator": DENOMINATOR}


def check_denominator(denominator):
    if not isinstance(denominator, int) or denominator <= 0 or denominator % 48 != 0:
        raise LatticeError(f"denominator {denominator} is not a positive multiple of 48")
    return denominator


def lattice_denominator():
    """Denominator new series and monomials are built on"""
    return _ACTIVE["denominator"]


@contextmanager
def lattice(denominator):
    """Build every series inside the block on the 1/denominator lattice.

    Monomials made on a coarser lattice (module constants) are lifted when
    they meet a series or a monomial on the finer one.
    """
    check_denominator(denominator)
    previous = _ACTIVE["denominator"]
    _ACTIVE["denominator"] = denominator
    logger.debug("exponent lattice 1/%d", denominator)
    try:
        yield denominator
    finally:
        _ACTIVE["denominator"] = previous


def _resolve(denominator):
    return lattice_denominator() if denominator is None else denominator


def to_lattice(value, denominator=None):
    """Numerator of a rational exponent on the 1/denominator lattice"""
    denominator = _resolve(denominator)
    scaled = Fraction(value) * denominator
    if scaled.denominator != 1:
        raise LatticeError(f"exponent {value} is not on the 1/{denominator} lattice")
    return scaled.numerator


def _normal(coeff):
    if isinstance(coeff, Fraction) and coeff.denominator == 1:
        return coeff.numerator
    return coeff


def _exact_number(value):
    if isinstance(value, (int, Fraction)):
        return _normal(value)
    if isinstance(value, sympy.Rational):
        return _normal(Fraction(int(value.p), int(value.q)))
    raise UnrepresentableError(f"coefficient {value!r} is not an exact rational")


def _budget(value):
    if value is None:
        return Fraction(0)
    if value == INF:
        return INF
    value = Fraction(value)
    if value < 0:
        raise ValueError(f"budgets must be nonnegative, got {value}")
    return value


class Budgets(NamedTuple):
    """Admissible |q-shift| per variable"""

    a: object = Fraction(0)
    z: object = Fraction(0)
    v: object = Fraction(0)

    @classmethod
    def of(cls, a=None, z=None, v=None):
        return cls(_budget(a), _budget(z), _budget(v))

    @classmethod
    def uniform(cls, value):
        return cls.of(value, value, value)

    @classmethod
    def exact(cls):
        return cls(INF, INF, INF)

    def get(self, var):
        return getattr(self, var)

    def meet(self, other):
        return Budgets(*(min(x, y) for x, y in zip(self, other)))

    def with_value(self, var, value):
        return self._replace(**{var: _budget(value)})

    def finite(self):
        return Budgets(*(Fraction(0) if x == INF else x for x in self))

    def to_dict(self):
        return {
            name: "inf" if value == INF else [value.numerator, value.denominator]
            for name, value in zip(SHIFTABLE, self)
        }

    @classmethod
    def from_dict(cls, data):
        values = []
        for name in SHIFTABLE:
            raw = data.get(name, 0)
            if raw == "inf":
                values.append(INF)
            elif isinstance(raw, list):
                values.append(Fraction(*raw))
            else:
                values.append(raw)
        return cls.of(*values)


def _reach(key, budgets):
    """Largest q-exponent drop of a term under admitted shifts"""
    total = 0
    for e, s in zip(key[1:], budgets):
        if e:
            total += abs(e) * s
    return total


def _render_term(coeff, key, denominator):
    factors = []
    for name, e in zip(VARIABLES, key):
        if e == 0:
            continue
        exp = Fraction(e, denominator)
        if exp == 1:
            factors.append(name)
        elif exp.denominator == 1:
            factors.append(f"{name}^{exp.numerator}")
        else:
            factors.append(f"{name}^({exp})")
    body = "*".join(factors)
    coeff = Fraction(coeff)
    if not body:
        return str(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return f"-{body}"
    return f"{coeff}*{body}"


@dataclass(frozen=True, eq=False)
class Monomial:
    """A single term coeff * q^e_q a^e_a z^e_z v^e_v with lattice numerators"""

    coeff: object = 1
    q: int = 0
    a: int = 0
    z: int = 0
    v: int = 0
    denominator: int = None

    def __post_init__(self):
        if self.denominator is None:
            object.__setattr__(self, "denominator", lattice_denominator())

    @classmethod
    def of(cls, coeff=1, q=0, a=0, z=0, v=0, denominator=None):
        denominator = _resolve(denominator)
        return cls(
            _exact_number(Fraction(coeff)),
            to_lattice(q, denominator),
            to_lattice(a, denominator),
            to_lattice(z, denominator),
            to_lattice(v, denominator),
            denominator,
        )

    @property
    def key(self):
        return (self.q, self.a, self.z, self.v)

    def exponent(self, var):
        return Fraction(getattr(self, var), self.denominator)

    @property
    def is_constant(self):
        return self.a == 0 and self.z == 0 and self.v == 0

    def exponents(self):
        return tuple(Fraction(e, self.denominator) for e in self.key)

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.coeff == other.coeff and self.exponents() == other.exponents()

    def __hash__(self):
        return hash((Fraction(self.coeff), self.exponents()))

    def on(self, denominator):
        """The same monomial on the finer 1/denominator lattice"""
        if denominator == self.denominator:
            return self
        if denominator % self.denominator:
            raise LatticeError(f"1/{self.denominator} does not refine to 1/{denominator}")
        k = denominator // self.denominator
        return Monomial(self.coeff, *(e * k for e in self.key), denominator)

    def lifted(self):
        """On the active lattice when that refines the own one"""
        active = lattice_denominator()
        return self.on(active) if active % self.denominator == 0 else self

    def _align(self, other):
        d = max(self.denominator, other.denominator)
        return self.on(d), other.on(d)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Monomial(_normal(Fraction(self.coeff) * Fraction(other)), *self.key, self.denominator)
        if not isinstance(other, Monomial):
            return NotImplemented
        x, y = self._align(other)
        key = tuple(i + j for i, j in zip(x.key, y.key))
        return Monomial(_normal(Fraction(x.coeff) * Fraction(y.coeff)), *key, x.denominator)

    __rmul__ = __mul__

    def __neg__(self):
        return Monomial(_normal(-Fraction(self.coeff)), *self.key, self.denominator)

    def inverse(self):
        return Monomial(_normal(1 / Fraction(self.coeff)), *(-e for e in self.key), self.denominator)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, power):
        power = Fraction(power)
        if power.denominator != 1 and self.coeff != 1:
            raise UnrepresentableError(f"fractional power of a monomial with coefficient {self.coeff}")
        key = []
        for e in self.key:
            scaled = e * power
            if scaled.denominator != 1:
                raise LatticeError(f"power {power} of {self} leaves the lattice")
            key.append(scaled.numerator)
        coeff = Fraction(self.coeff) ** int(power) if power.denominator == 1 else 1
        return Monomial(_normal(coeff), *key, self.denominator)

    def sqrt(self):
        return self ** Fraction(1, 2)

    def substitute(self, var, image):
        x, image = self._align(image)
        idx = _INDEX[var]
        sign, shift = _shift_image(var, image, x.denominator)
        e = x.key[idx]
        dq = e * shift
        if dq.denominator != 1:
            raise LatticeError(f"shift {shift} of {var}^{Fraction(e, x.denominator)} leaves the lattice")
        key = list(x.key)
        key[0] += dq.numerator
        key[idx] = sign * e
        return Monomial(x.coeff, *key, x.denominator)

    def shift(self, var, amount):
        x = self.lifted()
        return x.substitute(var, shift_image(var, amount, x.denominator))

    def remap(self, mapping):
        key = [self.q, 0, 0, 0]
        for old, (new, sign) in mapping.items():
            key[_INDEX[new]] = sign * self.key[_INDEX[old]]
        return Monomial(self.coeff, *key, self.denominator)

    def swap_az(self):
        return self.remap(SWAP_AZ)

    def invert(self, var):
        return self.remap(_inversion(var))

    def to_series(self):
        x = self.lifted()
        return Series({x.key: x.coeff}, denominator=x.denominator)

    def to_sympy(self):
        expr = sympy.Rational(Fraction(self.coeff).numerator, Fraction(self.coeff).denominator)
        for name, e in zip(VARIABLES, self.key):
            if e:
                expr *= SYMBOLS[name] ** sympy.Rational(e, self.denominator)
        return expr

    def __str__(self):
        return _render_term(self.coeff, self.key, self.denominator)


ThetaArg = Monomial
Term = Monomial

SWAP_AZ = {"a": ("z", 1), "z": ("a", 1), "v": ("v", 1)}


def _inversion(var):
    mapping = {name: (name, 1) for name in SHIFTABLE}
    mapping[var] = (var, -1)
    return mapping


def shift_image(var, amount, denominator=None):
    """Image monomial of var -> q^amount var"""
    return Monomial.of(q=amount, denominator=denominator, **{var: 1})


def _shift_image(var, image, denominator):
    if image.denominator != denominator:
        raise LatticeError("substitution image on a different lattice")
    if image.coeff != 1:
        raise UnrepresentableError("substitution images must have coefficient 1")
    for other in SHIFTABLE:
        if other != var and getattr(image, other) != 0:
            raise ValueError(f"image of {var} may only involve q and {var}")
    own = getattr(image, var)
    if abs(own) != denominator:
        raise ValueError(f"image of {var} must be q^s {var} or q^s {var}^-1")
    return own // denominator, Fraction(image.q, denominator)


@dataclass(frozen=True)
class QDiffShift:
    """Simultaneous q-shifts (a, z, v) -> (q^a a, q^z z, q^v v)"""

    a: Fraction = Fraction(0)
    z: Fraction = Fraction(0)
    v: Fraction = Fraction(0)

    def __post_init__(self):
        for name in SHIFTABLE:
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def __add__(self, other):
        return QDiffShift(self.a + other.a, self.z + other.z, self.v + other.v)

    def __neg__(self):
        return QDiffShift(-self.a, -self.z, -self.v)

    def items(self):
        return [(name, getattr(self, name)) for name in SHIFTABLE if getattr(self, name) != 0]

    def size(self, var):
        return abs(getattr(self, var))


class Series:
    """Exact truncated q-series, immutable after construction"""

    __slots__ = ("_terms", "_watermark", "_budgets", "_denominator")

    def __init__(self, terms=None, watermark=INF, budgets=None, denominator=None):
        denominator = check_denominator(_resolve(denominator))
        if watermark != INF:
            watermark = int(watermark)
        if budgets is None:
            budgets = Budgets.exact() if watermark == INF else Budgets()
        elif not isinstance(budgets, Budgets):
            budgets = Budgets.of(*budgets)
        if watermark != INF:
            budgets = budgets.finite()
        clean = {}
        for key, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            if watermark != INF and key[0] - _reach(key, budgets) >= watermark:
                continue
            clean[tuple(key)] = _normal(coeff)
        self._terms = clean
        self._watermark = watermark
        self._budgets = budgets
        self._denominator = denominator

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, denominator=None):
        return cls({}, INF, None, denominator)

    @classmethod
    def one(cls, denominator=None):
        return cls.constant(1, denominator)

    @classmethod
    def constant(cls, value, denominator=None):
        return cls({(0, 0, 0, 0): _exact_number(value)}, INF, None, denominator)

    @classmethod
    def monomial(cls, coeff=1, q=0, a=0, z=0, v=0, denominator=None):
        return Monomial.of(coeff, q, a, z, v, denominator).to_series()

    @classmethod
    def from_sympy(cls, expr, denominator=None):
        """Exact series from a sympy Laurent polynomial in q, a, z, v"""
        terms = {}
        for term in sympy.Add.make_args(sympy.expand(expr)):
            if term == 0:
                continue
            coeff, rest = term.as_coeff_Mul()
            key = [0, 0, 0, 0]
            for base, exp in rest.as_powers_dict().items():
                if base == 1:
                    continue
                if base not in SYMBOLS.values():
                    raise UnrepresentableError(f"factor {base} is not one of q, a, z, v")
                if not exp.is_Rational:
                    raise UnrepresentableError(f"exponent {exp} is not rational")
                key[_INDEX[str(base)]] += to_lattice(Fraction(int(exp.p), int(exp.q)), denominator)
            key = tuple(key)
            terms[key] = terms.get(key, 0) + _exact_number(coeff)
        return cls(terms, INF, None, denominator)

    @classmethod
    def from_dict(cls, data):
        denominator = data["denominator"]
        watermark = INF if data["watermark"] == "inf" else data["watermark"]["num"]
        terms = {}
        for term in data["terms"]:
            key = (term["q"], term["a"], term["z"], term["v"])
            terms[key] = Fraction(*term["c"])
        return cls(terms, watermark, Budgets.from_dict(data.get("budgets", {})), denominator)

    # -- accessors ----------------------------------------------------------

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    @property
    def watermark(self):
        return self._watermark

    @property
    def order(self):
        """Watermark in q units"""
        if self._watermark == INF:
            return INF
        return Fraction(self._watermark, self._denominator)

    @property
    def budgets(self):
        return self._budgets

    @property
    def denominator(self):
        return self._denominator

    @property
    def is_exact(self):
        return self._watermark == INF

    @property
    def is_exact_zero(self):
        return self.is_exact and not self._terms

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self._terms == other._terms
            and self._watermark == other._watermark
            and self._budgets == other._budgets
            and self._denominator == other._denominator
        )

    __hash__ = None

    def coefficient(self, q=0, a=0, z=0, v=0):
        key = tuple(to_lattice(x, self._denominator) for x in (q, a, z, v))
        return self._terms.get(key, 0)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Series):
            if other._denominator != self._denominator:
                raise LatticeError(
                    f"lattice mismatch: 1/{self._denominator} vs 1/{other._denominator}"
                )
            return other
        if isinstance(other, Monomial):
            m = other.on(self._denominator)
            return Series({m.key: m.coeff}, denominator=self._denominator)
        return Series.constant(other, self._denominator)

    def _rebuild(self, terms, watermark=None, budgets=None):
        return Series(
            terms,
            self._watermark if watermark is None else watermark,
            self._budgets if budgets is None else budgets,
            self._denominator,
        )

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, 0) + coeff
        return Series(
            terms,
            min(self._watermark, other._watermark),
            self._budgets.meet(other._budgets),
            self._denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return self._rebuild({key: -c for key, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, factor):
        factor = _exact_number(factor)
        if factor == 0:
            return Series.zero(self._denominator)
        return self._rebuild({key: c * factor for key, c in self._terms.items()})

    def _lower_bound(self, budgets):
        low = self._watermark
        for key in self._terms:
            value = key[0] - _reach(key, budgets)
            if value < low:
                low = value
        return low

    def lower_bound(self):
        """Least value of e_q - reach over all (stored or not) terms, in q units"""
        low = self._lower_bound(self._budgets.finite())
        return low if low == INF else Fraction(low, self._denominator)

    def _valued(self, budgets):
        return sorted(
            (key[0] - _reach(key, budgets), key, coeff) for key, coeff in self._terms.items()
        )

    def __mul__(self, other):
        if isinstance(other, Monomial):
            other = self._coerce(other)
        if not isinstance(other, Series):
            return self.scale(other)
        other = self._coerce(other)
        budgets = self._budgets.meet(other._budgets)
        acc: Dict[Key, object] = {}
        if self.is_exact and other.is_exact:
            for kx, cx in self._terms.items():
                for ky, cy in other._terms.items():
                    key = (kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2], kx[3] + ky[3])
                    acc[key] = acc.get(key, 0) + cx * cy
            return Series(acc, INF, budgets, self._denominator)

        bound = min(
            self._watermark + other._lower_bound(budgets),
            other._watermark + self._lower_bound(budgets),
        )
        watermark = bound if bound == INF else math.floor(bound)
        xs = self._valued(budgets)
        ys = other._valued(budgets)
        if ys:
            y_low = ys[0][0]
            for vx, kx, cx in xs:
                if vx + y_low >= watermark:
                    break
                for vy, ky, cy in ys:
                    if vx + vy >= watermark:
                        break
                    key = (kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2], kx[3] + ky[3])
                    acc[key] = acc.get(key, 0) + cx * cy
        return Series(acc, watermark, budgets, self._denominator)

    __rmul__ = __mul__

    def __pow__(self, power):
        if not isinstance(power, int) or power < 0:
            raise ValueError("series powers must be nonnegative integers")
        result = Series.one(self._denominator)
        for _ in range(power):
            result = result * self
        return result

    def shift_q(self, amount):
        """Multiply by q^amount"""
        n = to_lattice(amount, self._denominator)
        watermark = self._watermark if self._watermark == INF else self._watermark + n
        terms = {(k[0] + n,) + k[1:]: c for k, c in self._terms.items()}
        return self._rebuild(terms, watermark)

    # -- substitutions ------------------------------------------------------

    def substitute(self, var, image):
        """Substitute var -> q^s var^(+-1), consuming |s| of the var budget"""
        if var not in SHIFTABLE:
            raise ValueError(f"cannot substitute '{var}'")
        image = image.on(self._denominator)
        sign, shift = _shift_image(var, image, self._denominator)
        budget = self._budgets.get(var)
        if abs(shift) > budget:
            raise BudgetExceededError(var, shift, budget)
        idx = _INDEX[var]
        terms = {}
        for key, coeff in self._terms.items():
            dq = key[idx] * shift
            if dq.denominator != 1:
                raise LatticeError(
                    f"shift {shift} of {var}^{Fraction(key[idx], self._denominator)} leaves the lattice"
                )
            new = list(key)
            new[0] += dq.numerator
            new[idx] = sign * key[idx]
            terms[tuple(new)] = coeff
        remaining = budget if budget == INF else budget - abs(shift)
        return self._rebuild(terms, budgets=self._budgets.with_value(var, remaining))

    def shift(self, var, amount):
        """delta_var^amount: var -> q^amount var"""
        if amount == 0:
            return self
        return self.substitute(var, shift_image(var, amount, self._denominator))

    def apply_shift(self, shift: QDiffShift):
        result = self
        for var, amount in shift.items():
            result = result.shift(var, amount)
        return result

    def remap(self, mapping):
        """Permute and/or invert a, z, v; watermark preserved, budgets follow their variable"""
        terms = {}
        for key, coeff in self._terms.items():
            new = [key[0], 0, 0, 0]
            for old, (target, sign) in mapping.items():
                new[_INDEX[target]] = sign * key[_INDEX[old]]
            terms[tuple(new)] = coeff
        values = {target: self._budgets.get(old) for old, (target, _) in mapping.items()}
        return self._rebuild(terms, budgets=Budgets(values["a"], values["z"], values["v"]))

    def invert(self, var):
        return self.remap(_inversion(var))

    def swap_az(self):
        return self.remap(SWAP_AZ)

    def bar_v(self):
        return self.invert("v")

    def restrict_budgets(self, a=None, z=None, v=None):
        """Lower budgets (never raise them); watermark kept"""
        current = self._budgets
        lowered = Budgets(
            current.a if a is None else min(current.a, _budget(a)),
            current.z if z is None else min(current.z, _budget(z)),
            current.v if v is None else min(current.v, _budget(v)),
        )
        return self._rebuild(self._terms, budgets=lowered)

    def truncate(self, order):
        watermark = to_lattice(order, self._denominator)
        return self._rebuild(self._terms, watermark=min(self._watermark, watermark))

    # -- extraction ---------------------------------------------------------

    def leading(self):
        """(least q-order, exact coefficient slice) or (None, empty) if undetermined or zero"""
        if not self._terms:
            return None, Series.zero(self._denominator)
        low = min(key[0] for key in self._terms)
        if low >= self._watermark:
            return None, Series.zero(self._denominator)
        piece = {(0,) + key[1:]: c for key, c in self._terms.items() if key[0] == low}
        return Fraction(low, self._denominator), Series(piece, INF, None, self._denominator)

    def coefficient_slice(self, order):
        n = to_lattice(order, self._denominator)
        if n >= self._watermark:
            raise ValueError(f"slice at q^{order} lies at or above the watermark {self.order}")
        piece = {(0,) + key[1:]: c for key, c in self._terms.items() if key[0] == n}
        return Series(piece, INF, None, self._denominator)

    def q_orders(self):
        """Sorted distinct q-exponents below the watermark"""
        return sorted({Fraction(k[0], self._denominator) for k in self._terms if k[0] < self._watermark})

    def equal_up_to(self, other):
        """(True, empty) iff self - other has no terms below the common watermark"""
        diff = self - self._coerce(other)
        bad = {key: c for key, c in diff._terms.items() if key[0] < diff._watermark}
        return not bad, Series(bad, diff._watermark, diff._budgets, self._denominator)

    def is_free_of(self, *names):
        idx = [_INDEX[name] for name in names]
        return all(key[i] == 0 for key in self._terms for i in idx)

    # -- interchange --------------------------------------------------------

    def to_sympy(self):
        expr = sympy.Integer(0)
        for key, coeff in self._terms.items():
            expr += Monomial(coeff, *key, self._denominator).to_sympy()
        return expr

    def monomials(self):
        return [Monomial(c, *key, self._denominator) for key, c in sorted(self._terms.items())]

    def to_dict(self):
        terms = []
        for key, coeff in sorted(self._terms.items()):
            coeff = Fraction(coeff)
            terms.append({
                "c": [coeff.numerator, coeff.denominator],
                "q": key[0], "a": key[1], "z": key[2], "v": key[3],
            })
        return {
            "denominator": self._denominator,
            "watermark": "inf" if self.is_exact else {"num": self._watermark},
            "budgets": self._budgets.to_dict(),
            "terms": terms,
        }

    def render_terms(self, limit=None):
        keys = sorted(self._terms)
        if limit is not None:
            keys = keys[:limit]
        return [_render_term(self._terms[k], k, self._denominator) for k in keys]

    def render(self, limit=None):
        parts = self.render_terms(limit)
        text = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        if limit is not None and len(self._terms) > limit:
            text += " + ..."
        if not self.is_exact:
            text += f" + O(q^({self.order}))"
        return text

    def __repr__(self):
        return f"Series({self.render(limit=8)})"


def add(x, y):
    return x + y


def mul(x, y):
    return x * y


def substitute(x, var, image):
    return x.substitute(var, image)


def bar_v(x):
    return x.bar_v()


def leading(x):
    return x.leading()


def equal_up_to(x, y):
    return x.equal_up_to(y)


def lattice_radius(quad, linear, order):
    """Largest |t| with quad*t^2 - linear*|t| < order (quad > 0), rounded up with slack"""
    quad, linear, order = float(quad), float(linear), float(order)
    disc = linear * linear + 4.0 * quad * order
    if disc < 0:
        return -1
    return int(math.ceil((linear + math.sqrt(disc)) / (2.0 * quad))) + 1


def product_to_order(builders: Sequence[Callable[[Fraction], Series]], order, attempts=6):
    """Multiply lazily built factors so the product is exact below `order`"""
    order = Fraction(order)
    needs = [order] * len(builders)
    factors = [build(order) for build in builders]
    for attempt in range(attempts):
        bounds = [f.lower_bound() for f in factors]
        finite = [b for b in bounds if b != INF]
        if len(finite) < len(bounds):
            # an exact zero factor absorbs everything
            return Series.zero(factors[0].denominator)
        total = sum(finite)
        for i, build in enumerate(builders):
            need = order - (total - bounds[i])
            if need > needs[i]:
                needs[i] = need
                factors[i] = build(need)
        product = factors[0]
        for factor in factors[1:]:
            product = product * factor
        if product.order >= order:
            return product.truncate(order)
        deficit = order - product.order
        logger.debug("product reached %s, below %s; raising factor orders", product.order, order)
        needs = [n + deficit for n in needs]
        factors = [build(n) for build, n in zip(builders, needs)]
    raise LatticeError(f"could not build product to order {order}")
