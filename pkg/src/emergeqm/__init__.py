"""Deterministic cellular automaton with fast and slow variables, and the
quantum description that emerges from it."""

from .core import (
    FastConfig,
    ModelSpec,
    OntBasisState,
    SignedPermutation,
    SwitchTerm,
    TorusLattice,
    advance,
    build_step_unitary,
    classical_step,
    inverse_step,
    step_permutation,
)
from .emergent import (
    deviation_curve,
    effective_hamiltonian,
    ladder_report,
    projected_propagator,
    quasi_energy_spectrum,
)
from .errors import (
    CapacityError,
    CoprimeError,
    DuplicateLocationError,
    EmergeError,
    ModelError,
    ParseError,
    RangeError,
    SimultaneousFiringWarning,
    ToleranceError,
)
from .modelfile import load_model, parse_model, write_model

__version__ = "0.1.0"
