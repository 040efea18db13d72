"""Relativistic Bogoliubov transforms of field modes and truncated Fock-space interferometry."""

from . import errors, kernels
from .errors import (
    DegenerateMomentumError,
    FrameInvarianceError,
    InvalidOverlapError,
    NumericalError,
    RangeError,
    RelqiError,
    SingularityError,
    TruncationError,
    UnsupportedMapError,
    ValidationError,
)
from .experiments import (
    ExperimentReport,
    SweepReport,
    frame_invariance_sweep,
    random_boosts,
    random_lorentz,
    twin_electron,
    twin_photon,
)
from .fields import (
    DiracSpinor,
    ModeTransformMatrix,
    PolarizationBasis,
    antifermion_bogoliubov,
    antifermion_spinor,
    dirac_bogoliubov,
    dirac_spinor,
    em_bogoliubov,
    em_gauge_fix,
    em_polarization_basis,
    frame_map,
    mode_transform,
    scalar_bogoliubov,
    spin_matrix,
    vector_bogoliubov,
    vector_polarization_basis,
)
from .fock import (
    CreationPolynomial,
    DetectionStatistics,
    FockState,
    ReducedState,
    annihilate,
    apply_bogoliubov,
    basis_state,
    create,
    number_statistics,
    partial_trace,
    prepare,
    vacuum,
)
from .interferometer import (
    BosonicBilinearH,
    FermionicBilinearH,
    beam_splitter,
    evolve,
    expectation,
    heisenberg_transform,
    mode_overlap_map,
    transport_hamiltonian,
)
from .lorentz import (
    METRIC,
    BoostDecomposition,
    FourVector,
    LorentzTransform,
    apply,
    boost,
    compose,
    decompose,
    identity,
    mass_shell,
    rotation,
    standard_boost,
)
from .modes import BogoliubovMap, ModeLabel

__version__ = "0.1.0"
