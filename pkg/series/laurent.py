"""Exact Laurent-polynomial fractions in a, z, v for K-theory level objects."""
import logging

import sympy

from series.lattice import A, SYMBOLS, V, Z, Series
from utils.errors import SingularMatrixError

logger = logging.getLogger(__name__)

VARS = (A, Z, V)


def _sym(value):
    if isinstance(value, LaurentFraction):
        return value.expr
    if isinstance(value, Series):
        if not value.is_exact:
            raise ValueError("only exact series convert to Laurent fractions")
        return value.to_sympy()
    return sympy.sympify(value)


class LaurentFraction:
    """num/den with num, den Laurent polynomials; equality by cross multiplication"""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = _sym(num), _sym(den)
        n1, d1 = sympy.fraction(sympy.together(num))
        n2, d2 = sympy.fraction(sympy.together(den))
        num, den = sympy.expand(n1 * d2), sympy.expand(d1 * n2)
        if den == 0:
            raise ZeroDivisionError("Laurent fraction with zero denominator")
        self.num = num
        self.den = den

    @classmethod
    def of(cls, value):
        return value if isinstance(value, LaurentFraction) else cls(value)

    @property
    def expr(self):
        return self.num / self.den

    @property
    def is_zero(self):
        return self.num == 0

    def __add__(self, other):
        other = LaurentFraction.of(other)
        return LaurentFraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return LaurentFraction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-LaurentFraction.of(other))

    def __rsub__(self, other):
        return LaurentFraction.of(other) - self

    def __mul__(self, other):
        other = LaurentFraction.of(other)
        return LaurentFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = LaurentFraction.of(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero Laurent fraction")
        return LaurentFraction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return LaurentFraction.of(other) / self

    def __eq__(self, other):
        try:
            other = LaurentFraction.of(other)
        except (sympy.SympifyError, TypeError):
            return NotImplemented
        return sympy.expand(self.num * other.den - other.num * self.den) == 0

    __hash__ = None

    def subs(self, mapping):
        return LaurentFraction(self.num.subs(mapping, simultaneous=True), self.den.subs(mapping, simultaneous=True))

    def bar_v(self):
        return self.subs({V: 1 / V})

    def invert(self, name):
        sym = SYMBOLS[name]
        return self.subs({sym: 1 / sym})

    def swap_az(self):
        return self.subs({A: Z, Z: A})

    def cancel(self):
        n, d = sympy.fraction(sympy.cancel(self.expr))
        return LaurentFraction(n, d)

    def is_laurent(self):
        """True when the reduced denominator is a single monomial"""
        _, den = sympy.fraction(sympy.cancel(sympy.together(self.expr)))
        return len(sympy.Add.make_args(sympy.expand(den))) == 1

    def degree(self, name):
        """Degree in one variable of num minus that of den, for Laurent expressions"""
        sym = SYMBOLS[name]
        return _degree(self.num, sym) - _degree(self.den, sym)

    def is_free_of(self, name):
        return not self.cancel().expr.has(SYMBOLS[name])

    def render(self):
        reduced = self.cancel()
        num = sympy.sstr(sympy.expand(reduced.num), order="lex")
        if reduced.den == 1:
            return num
        return f"({num}) / ({sympy.sstr(sympy.expand(reduced.den), order='lex')})"

    def __repr__(self):
        return f"LaurentFraction({self.render()})"


def _degree(expr, sym):
    terms = sympy.Add.make_args(sympy.expand(expr))
    powers = [t.as_powers_dict().get(sym, 0) for t in terms if t != 0]
    return max(powers) if powers else -sympy.oo


class LaurentMatrix:
    """Square matrix of Laurent fractions indexed by fixed points"""

    __slots__ = ("entries",)

    def __init__(self, rows):
        self.entries = tuple(tuple(LaurentFraction.of(x) for x in row) for row in rows)
        size = len(self.entries)
        if any(len(row) != size for row in self.entries):
            raise ValueError("Laurent matrices must be square")

    @classmethod
    def identity(cls, size=2):
        return cls([[1 if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def from_sympy(cls, matrix):
        return cls([[matrix[i, j] for j in range(matrix.shape[1])] for i in range(matrix.shape[0])])

    @classmethod
    def from_columns(cls, columns):
        size = len(columns)
        return cls([[columns[j][i] for j in range(size)] for i in range(size)])

    @property
    def size(self):
        return len(self.entries)

    def __getitem__(self, index):
        i, j = index
        return self.entries[i][j]

    def column(self, j):
        return [row[j] for row in self.entries]

    def to_sympy(self):
        return sympy.Matrix([[x.expr for x in row] for row in self.entries])

    def __matmul__(self, other):
        n = self.size
        return LaurentMatrix(
            [[sum((self[i, k] * other[k, j] for k in range(n)), LaurentFraction(0)) for j in range(n)] for i in range(n)]
        )

    def scale(self, factor):
        return LaurentMatrix([[x * factor for x in row] for row in self.entries])

    def determinant(self):
        return LaurentFraction(sympy.cancel(self.to_sympy().det()))

    def inverse(self):
        if self.determinant().is_zero:
            raise SingularMatrixError("matrix is singular over the fraction field")
        inv = self.to_sympy().inv()
        return LaurentMatrix.from_sympy(inv.applyfunc(sympy.cancel))

    def map(self, fn):
        return LaurentMatrix([[fn(x) for x in row] for row in self.entries])

    def subs(self, mapping):
        return self.map(lambda x: x.subs(mapping))

    def bar_v(self):
        return self.map(LaurentFraction.bar_v)

    def invert(self, name):
        return self.map(lambda x: x.invert(name))

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix) or other.size != self.size:
            return NotImplemented
        return all(x == y for rx, ry in zip(self.entries, other.entries) for x, y in zip(rx, ry))

    __hash__ = None

    def mismatches(self, other):
        """Index pairs where two matrices differ"""
        return [
            (i, j) for i in range(self.size) for j in range(self.size) if not self[i, j] == other[i, j]
        ]

    def render(self, labels=None):
        labels = labels or [str(i) for i in range(self.size)]
        lines = []
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                lines.append(f"[{labels[i]}, {labels[j]}] = {x.render()}")
        return "\n".join(lines)

    def __repr__(self):
        return f"LaurentMatrix({self.render()})"


SWAP = LaurentMatrix([[0, 1], [1, 0]])
