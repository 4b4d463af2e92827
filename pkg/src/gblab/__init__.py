"""Gupta-Bleuler photons on a truncated indefinite-metric Fock space."""

__version__ = "0.1.0"

from .fock import (  # noqa: E402
    FockBasis,
    FockError,
    Mode,
    Operator,
    Polarization,
    State,
    annihilator,
    build_basis,
    creator,
    eta_adjoint,
    metric,
    photon_modes,
    physical_expectation,
    physical_inner,
)
from .algebra import hamiltonian, su2_generators, su11_generators, verify_algebra  # noqa: E402
from .coherent import CoherentSpec, PhysicalStateSpec, coherent_state_series, physical_state  # noqa: E402
from .expr import evaluate, parse, print_canonical  # noqa: E402
