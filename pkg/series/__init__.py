from .lattice import Budgets, Monomial, QDiffShift, Series, ThetaArg, Term, product_to_order
from .laurent import LaurentFraction, LaurentMatrix
from .theta import ThetaFraction, euler, tf_equal, theta01, theta_fraction, theta_product, theta_tilde
