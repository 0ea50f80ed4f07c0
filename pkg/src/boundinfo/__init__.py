"""Exact simulation of bound information, its activation and its quantum analogue.

Classical distributions are held as exact rationals; quantum states as
dense numpy arrays with explicit qubit labels.
"""

from .distribution import (
    EVE,
    PUBLIC,
    JointDistribution,
    RegisterSpec,
    announce,
    apply_local_function,
    bit,
    factorizes,
    is_multipartite_sbit,
    is_sbit,
    make_distribution,
    marginalize,
    post_select,
    product,
    tables_equal,
)
from .errors import BoundInfoError
from .measures import (
    EveChannel,
    MeasureValue,
    conditional_mutual_information,
    entropy,
    intrinsic_information_search,
    intrinsic_information_upper,
    mutual_information,
)
from .protocols import (
    ProtocolTranscript,
    classical_teleport,
    distill_pair_from_five,
    distribute_secret,
    multipartite_from_pairwise,
    smolin_table,
    superactivate_pair,
    symmetrized_five,
    unlock,
)
from .quantum import (
    DensityOperator,
    StateVector,
    bell_measure,
    bell_state,
    ghz_extend,
    ghz_state,
    measure,
    partial_trace,
    partial_transpose,
    purify,
    quantum_superactivation,
    quantum_teleport,
    quantum_unlock,
    smolin_state,
)
from .tables import get_table

__version__ = "0.1.0"
