"""Tunneling splitting of a double-well Schroedinger operator on a ring with flux."""

from .potential import (
    PotentialSpec,
    builtin_potential,
    from_function,
    tabulated_potential,
    validate_double_well,
)
from .agmon import AgmonConstants, agmon_constants, leading_interaction, predicted_gap_even
from .spectral import (
    assemble_circle,
    assemble_dirichlet,
    circle_gap,
    ground_state_single_well,
    hermitian_eigs,
    one_well_state,
)
from .wkb import build_quasimode, transport_amplitude, wkb_residual, wkb_vs_numeric
from .interaction import (
    build_cutoff,
    interaction_wronskian,
    overlap_matrix,
    quasimode_basis,
    splitting_estimate,
)

__version__ = "0.1.0"
