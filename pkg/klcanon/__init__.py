from .bar import BarData, KClass, bar_apply, bar_data, canonical_solve, transition_matrices
from .closed_forms import canonical_closed_form, transition_closed_form
from .walls import CanLabel, canonical_wall, label_of, same_class, wall_crossing_map, xi_classes
