from .limits import Slope, k_limit, k_stab, k_stab_closed_form, stab_minus
from .model import P2, P11, POINTS, DualPairModel, FixedPoint, flop_pair_model, hilb2_model
from .stab import StabMatrix, stab_ell, stab_ell_flop, unstab
