"""Time-limited balanced truncation with L2 output-error bounds."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .balancing import BalancedRealization, ReducedModel, balance, tl_singular_values, truncate
from .bounds import (
    BoundBreakdown,
    GlobalConstant,
    corollary_bound,
    distinct_groups,
    global_constant,
    hinf_limit_bound,
    theorem_bound,
)
from .gramians import GramianPair, gramians_infinite, gramians_lyapunov, gramians_quadrature
from .simulation import (
    Signal,
    Trajectory,
    builtin_inputs,
    l2_norm,
    normalize_input,
    simulate,
    verify_bound,
)
from .system import SimilarityTransform, StateSpace, apply_transform, heat_rod, random_stable
