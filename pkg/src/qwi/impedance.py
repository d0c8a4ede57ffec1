"""Quantum wave impedance treatment of the three-region well.

A region with exponent rate q (kappa or i*k) has characteristic impedance
``z = (hbar/m) q``.  Transforming the far-side load through a uniform region
of length L gives the input impedance

    Z_in = z0 (z_load + z0 tanh(i k L)) / (z0 + z_load tanh(i k L))

written below with cos/sin so that a propagating region never hits a
tangent pole.  Bound states satisfy ``Z_in(0) = -z1`` with ``z_load = z3``.
Inside the well the impedances seen from either side are
``z2 tanh(i k2 x + phi)`` with phi_L, phi_R from the boundary data; at a bound
state the two phases agree modulo i*pi and ``cos^2(k2 x + theta)`` with
``theta = -i phi_L`` gives the density shape.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .classical import DEFAULT_RESOLUTION, BoundState
from .errors import EnergyWindowError, PoleError
from .potential import (
    EVANESCENT,
    PROPAGATING,
    PotentialProfile,
    RegionWaveNumber,
    UnitSystem,
    three_region,
    well_wavenumbers,
)
from .roots import find_roots

POLE_RTOL = 1e-30


@dataclass(frozen=True)
class CharacteristicImpedance:
    value: complex
    region_kind: str

    def __post_init__(self):
        v = complex(self.value)
        if self.region_kind == EVANESCENT and not (v.imag == 0 and v.real > 0):
            raise ValueError(f"evanescent impedance must be real positive, got {v!r}")
        if self.region_kind == PROPAGATING and not (v.real == 0 and v.imag > 0):
            raise ValueError(f"propagating impedance must be positive imaginary, got {v!r}")
        if self.region_kind not in (EVANESCENT, PROPAGATING):
            raise ValueError(f"unknown region kind {self.region_kind!r}")

    def __complex__(self) -> complex:
        return complex(self.value)


class PhasePair(NamedTuple):
    phi_L: complex
    phi_R: complex


def characteristic_impedance(region: RegionWaveNumber, units: UnitSystem) -> CharacteristicImpedance:
    if region.magnitude <= 0:
        raise ValueError("characteristic impedance of a zero wavenumber is undefined")
    if region.kind not in (PROPAGATING, EVANESCENT):
        raise ValueError(f"unknown region kind {region.kind!r}")
    return CharacteristicImpedance(units.impedance_factor * region.exponent_rate, region.kind)


def input_impedance(z0, z_load, k, length):
    """Impedance at distance ``length`` in front of ``z_load`` along a region with
    characteristic impedance ``z0`` and wavenumber ``k``.

    ``k`` may be complex (``k = -i kappa`` turns cos/sin into cosh/sinh for an
    evanescent region).  Raises :class:`PoleError` when the denominator vanishes.
    """
    z0 = complex(z0)
    z_load = complex(z_load)
    c = cmath.cos(k * length)
    s = cmath.sin(k * length)
    num = z_load * c + 1j * z0 * s
    den = z0 * c + 1j * z_load * s
    if abs(den) <= POLE_RTOL * max(abs(num), abs(z0) * (abs(c) + abs(s))):
        raise PoleError(f"input impedance pole (denominator {den!r})")
    return z0 * num / den


def _well_impedances(profile, units, E):
    well = three_region(profile)
    kappa1, k2, kappa3 = well_wavenumbers(well, units, E)
    f = units.impedance_factor
    return well, f * kappa1 + 0j, 1j * f * k2, f * kappa3 + 0j, k2


def bound_state_residual_imp(profile: PotentialProfile, units: UnitSystem, E):
    """Im of (Z_in + z1) times the input-impedance denominator.

    Clearing the denominator removes the poles of Z_in; the result equals
    ``(hbar/m)^2`` times the matching residual.  Vectorised over ``E``.
    """
    well, z1, z2, z3, k2 = _well_impedances(profile, units, E)
    c = np.cos(k2 * well.width)
    s = np.sin(k2 * well.width)
    den = z2 * c + 1j * z3 * s
    cleared = z2 * (z3 * c + 1j * z2 * s) + z1 * den
    out = cleared.imag
    return float(out) if np.ndim(out) == 0 else out


def find_bound_states_imp(profile: PotentialProfile, units: UnitSystem,
                          resolution: int = DEFAULT_RESOLUTION) -> list[BoundState]:
    well = three_region(profile)
    if not well.has_window:
        return []
    lo, hi = well.window
    roots = find_roots(lambda e: bound_state_residual_imp(profile, units, e), lo, hi, resolution)
    return [
        BoundState(
            energy=e,
            method="impedance",
            index=n,
            norm_constant=density_amplitude(profile, units, e),
            phase=real_phase(phases(profile, units, e)),
            residual=bound_state_residual_imp(profile, units, e),
        )
        for n, e in enumerate(roots)
    ]


def _phases(kappa1, k2, kappa3, a) -> PhasePair:
    phi_L = -0.5 * np.log((1j * kappa1 + k2) / (k2 - 1j * kappa1))
    phi_R = -0.5 * np.log(np.exp(2j * k2 * a) * (k2 - 1j * kappa3) / (k2 + 1j * kappa3))
    return PhasePair(phi_L, phi_R)


def phases(profile: PotentialProfile, units: UnitSystem, E) -> PhasePair:
    """phi_L and phi_R on the principal branch of the logarithm."""
    well = three_region(profile)
    kappa1, k2, kappa3 = well_wavenumbers(well, units, E)
    pair = _phases(kappa1 + 0j, k2 + 0j, kappa3 + 0j, well.width)
    if np.ndim(pair.phi_L) == 0:
        return PhasePair(complex(pair.phi_L), complex(pair.phi_R))
    return pair


def wrap_phase(theta: float) -> float:
    """Representative of theta modulo pi in (-pi/2, pi/2]."""
    t = math.remainder(theta, math.pi)
    return math.pi / 2 if t == -math.pi / 2 else t


def phase_mismatch(pair: PhasePair) -> float:
    """Distance of phi_L - phi_R from the lattice i*pi*Z."""
    d = complex(pair.phi_L) - complex(pair.phi_R)
    return math.hypot(d.real, wrap_phase(d.imag))


def real_phase(pair: PhasePair) -> float:
    """theta = -i phi_L reduced modulo pi; real for real energies in the window."""
    return wrap_phase((-1j * complex(pair.phi_L)).real)


def density_amplitude(profile: PotentialProfile, units: UnitSystem, E: float) -> float:
    """2 / (a + (kappa1 + kappa3)/(kappa1 kappa3)), the peak of the in-well density."""
    well = three_region(profile)
    kappa1, _, kappa3 = well_wavenumbers(well, units, E)
    return float(2.0 / (well.width + (kappa1 + kappa3) / (kappa1 * kappa3)))


def well_density(profile: PotentialProfile, units: UnitSystem, state: BoundState, x):
    """Closed-form |psi(x)|^2 inside the well, vectorised over x."""
    well = three_region(profile)
    xi = np.asarray(x, dtype=float) - well.origin
    if np.any((xi < 0) | (xi > well.width)):
        raise EnergyWindowError("well_density is defined only for 0 <= x - x0 <= a")
    _, k2, _ = well_wavenumbers(well, units, state.energy)
    theta = real_phase(phases(profile, units, state.energy))
    out = density_amplitude(profile, units, state.energy) * np.cos(k2 * xi + theta) ** 2
    return float(out) if np.ndim(out) == 0 else out


def well_wavefunction(profile: PotentialProfile, units: UnitSystem, state: BoundState, x):
    """Signed in-well amplitude sqrt(amplitude) cos(k2 x + theta) with psi(0) > 0."""
    well = three_region(profile)
    xi = np.asarray(x, dtype=float) - well.origin
    _, k2, _ = well_wavenumbers(well, units, state.energy)
    theta = real_phase(phases(profile, units, state.energy))
    amp = math.sqrt(density_amplitude(profile, units, state.energy))
    # theta lies in (-pi/2, pi/2], so cos(theta) >= 0 at the left interface
    return amp * np.cos(k2 * xi + theta)
