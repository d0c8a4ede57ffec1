"""Bound states of one-dimensional piecewise-constant wells.

Three analytic routes (wavefunction matching, transfer matrices, quantum wave
impedance and the Green's function built from it) plus an independent
finite-difference oracle.
"""
from .classical import BoundState, dispersion_residual, find_bound_states, normalization, wavefunction
from .greens import eigenfunction_density, green_diagonal
from .impedance import bound_state_residual_imp, find_bound_states_imp
from .potential import PotentialProfile, UnitSystem, load_profile, wavenumber
from .transfer import bound_state_residual_tm, find_bound_states_tm, total_transfer

__version__ = "0.1.0"

__all__ = [
    "BoundState",
    "PotentialProfile",
    "UnitSystem",
    "bound_state_residual_imp",
    "bound_state_residual_tm",
    "dispersion_residual",
    "eigenfunction_density",
    "find_bound_states",
    "find_bound_states_imp",
    "find_bound_states_tm",
    "green_diagonal",
    "load_profile",
    "normalization",
    "total_transfer",
    "wavefunction",
    "wavenumber",
]
