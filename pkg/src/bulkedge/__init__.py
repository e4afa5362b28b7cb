"""Topological invariants of Hermitian operator families.

Bulk Chern numbers of Bloch families on tori, edge indices of half-line
operator families via Fermi-point sign counting, spectral flow of circle
families, and the exactly solvable four-band model underpinning them.
"""

from .bloch import (
    BlochFamily,
    ChernResult,
    SpectralProjector,
    check_ai_symmetry,
    first_chern_number,
    negative_projector,
    second_chern_number,
    second_chern_two_resolution,
)
from .catalog import CatalogEntry, get_entry, stabilized, with_broken_time_reversal
from .clifford import (
    GradedCliffordRep,
    UngradedCliffordRep,
    clifford_mu,
    graded_tensor,
    iterated_suspension,
    standard_graded_rep,
    standard_ungraded_rep,
    suspension,
)
from .fermi import (
    EdgeFamily,
    EvennessReport,
    FermiPoint,
    certify_local_block,
    check_evenness,
    edge_index,
    find_fermi_points,
    sign_at,
    spectral_flow,
    verify_bulk_edge,
)
from .localmodel import (
    EdgeVector,
    KernelClassification,
    KernelKind,
    LocalModelParams,
    discriminant,
    effective_hamiltonian,
    h_loc,
    kernel_classification,
    local_blocks,
    local_symbol,
    transfer_matrix,
)
from .report import InvariantReport
from .toeplitz import (
    BlockSymbol,
    LowEnergyWindow,
    TruncatedToeplitz,
    fredholm_check,
    low_energy_window,
    symbol_from_bulk,
    truncate,
)

__version__ = "0.1.0"
