class VerificationError(Exception):
    """Base class for errors raised by the verification engine"""


class LatticeError(VerificationError):
    """An exponent is off the 1/D lattice or two operands use different lattices"""


class BudgetExceededError(VerificationError):
    """A q-shift substitution exceeds the budget a series was built with"""

    def __init__(self, variable, shift, budget):
        self.variable = variable
        self.shift = shift
        self.budget = budget
        super().__init__(
            f"shift {shift} on '{variable}' exceeds the declared budget {budget}; "
            f"rebuild the operand with a larger budget"
        )


class UnrepresentableError(VerificationError):
    """The requested object needs exponents or coefficients outside the engine's ring"""


class DivergentLimitError(VerificationError):
    """The q -> 0 limit of a quotient does not exist"""

    def __init__(self, num_order, den_order):
        self.num_order = num_order
        self.den_order = den_order
        super().__init__(
            f"numerator leading order {num_order} is below denominator leading order {den_order}"
        )


class SingularMatrixError(VerificationError):
    pass


class NoCanonicalSolutionError(VerificationError):
    """No bar-invariant unitriangular solution within the searched v-degree window"""

    def __init__(self, degree_bound, reason=""):
        self.degree_bound = degree_bound
        message = f"no canonical basis found with v-degree bound {degree_bound}"
        if reason:
            message += f": {reason}"
        super().__init__(message)


class FCoeffsError(VerificationError):
    """An (f0, f1, f2) triple violates one of the family's invariants"""

    def __init__(self, invariant, message):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class ConfigError(VerificationError):
    pass


class UnknownSuiteError(ConfigError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown suite '{name}'")
