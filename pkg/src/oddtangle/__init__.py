"""Odd-n residual entanglement: tau, its qubit-swapped variants and their average R."""
from .invariants import InvariantValue, all_tau_i, big_r, sigma_y_bilinear, tau, tau3_forms, tau_i
from .state import (
    LocalOperatorChain,
    PureState,
    QubitPermutation,
    apply_local_operators,
    apply_qubit_permutation,
    compose_permutations,
    ghz,
    normalize,
    parse_state,
    permutation_from_cycles,
    random_state,
    tensor_product,
    transposition,
    w_state,
)

__version__ = "0.1.0"
