"""Exact diagonalization and entanglement analysis of the variable-range
transverse-field Ising chain."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ContractError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    FitError,
    LrisingError,
    ParameterError,
    UndefinedSqueezingError,
)
from .lattice import (  # noqa: E402
    ALL_LABELS,
    INF,
    ChainParams,
    CollectiveLabel,
    build_collective,
    build_hamiltonian,
    coupling_strength,
)
from .eigensolver import (  # noqa: E402
    GapResult,
    SpectrumResult,
    full_spectrum,
    ground_state,
    lowest_eigenpairs,
    mass_gap,
    solve,
)
from .observables import connected_correlations, expectation, order_parameters  # noqa: E402
from .entanglement import (  # noqa: E402
    qfi_degenerate_limit,
    qfi_from_correlations,
    qfi_pure,
    qfi_thermal,
    spin_squeezing,
    thermal_lower_bound,
    tomography,
)

__all__ = [
    "ALL_LABELS", "INF", "CapacityError", "ChainParams", "CollectiveLabel", "ContractError",
    "ConvergenceError", "DegenerateInputError", "DomainError", "FitError", "GapResult",
    "LrisingError", "ParameterError", "SpectrumResult", "UndefinedSqueezingError",
    "build_collective", "build_hamiltonian", "connected_correlations", "coupling_strength",
    "expectation", "full_spectrum", "ground_state", "lowest_eigenpairs", "mass_gap",
    "order_parameters", "qfi_degenerate_limit", "qfi_from_correlations", "qfi_pure",
    "qfi_thermal", "solve", "spin_squeezing", "thermal_lower_bound", "tomography",
]
