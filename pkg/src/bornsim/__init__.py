"""Open-quantum-system simulator for photon-counting probability measurement.

A single measurement component is a two-level quantum dot coupled to one
photon mode with Lindblad photon dissipation.  The package provides the
operator algebra, JC/Rabi Hamiltonians and dressed states, a deterministic
fixed-step master-equation integrator, photon-counting observables, and the
closed-form predictions used as independent oracles.
"""

from .model import JC, RABI, BornState, DressedBasis, ModelParams
from .dynamics import TimeGrid, Trajectory, evolve, lindblad_rhs, steady_state
from .observables import (
    CurrentMethod,
    accumulated_energy,
    dressed_populations,
    energy_current,
    measured_probability,
    photon_number,
)

__all__ = [
    "JC",
    "RABI",
    "BornState",
    "DressedBasis",
    "ModelParams",
    "TimeGrid",
    "Trajectory",
    "evolve",
    "lindblad_rhs",
    "steady_state",
    "CurrentMethod",
    "accumulated_energy",
    "dressed_populations",
    "energy_current",
    "measured_probability",
    "photon_number",
]

__version__ = "0.1.0"
