from .checks import ELLIPTIC_CHECKS, check_duality, check_property_a, elliptic_suite, run_elliptic_check
from .family import EllCanonicalFamily, FCoeffs, GMatrix, build_family, default_budgets, upsilon_series
from .identities import FABFunction, check_h_constraints, check_theta_identity
