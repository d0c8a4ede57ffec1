"""Bound states of the three-region well by direct wavefunction matching.

Regions are ``x < 0`` (level U1), ``0 <= x <= a`` (U2) and ``x > a`` (U3) in
the well's local coordinate; a profile whose first boundary is not at the
origin is shifted transparently.  The decaying solutions are

    psi1 = C11 exp(kappa1 x)
    psi2 = C21 cos(k2 x) + C22 sin(k2 x)
    psi3 = C32 exp(-kappa3 x)

and continuity of psi and psi' at both interfaces fixes everything up to C11,
which is chosen positive and normalising.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InconsistentStateError
from .potential import PotentialProfile, UnitSystem, three_region, well_wavenumbers
from .roots import find_roots

DEFAULT_RESOLUTION = 4096
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class BoundState:
    energy: float
    method: str
    index: int
    norm_constant: float | None = None
    phase: float | None = None
    residual: float = 0.0


class MatchingCoefficients(NamedTuple):
    c11: float
    c21: float
    c22: float
    c32: float


def _residual(kappa1, k2, kappa3, a):
    return k2 * (kappa1 + kappa3) * np.cos(k2 * a) + (kappa1 * kappa3 - k2**2) * np.sin(k2 * a)


def residual_scale(kappa1, k2, kappa3):
    """Magnitude of the two coefficients of the residual, used for relative checks."""
    return k2 * (kappa1 + kappa3) + np.abs(kappa1 * kappa3 - k2**2)


def dispersion_residual(profile: PotentialProfile, units: UnitSystem, E):
    """k2 (kappa1 + kappa3) cos(k2 a) + (kappa1 kappa3 - k2^2) sin(k2 a).

    Continuous on the open window ``(U2, min(U1, U3))`` and vanishing exactly at
    the bound-state energies.  Vectorised over ``E``.
    """
    well = three_region(profile)
    kappa1, k2, kappa3 = well_wavenumbers(well, units, E)
    out = _residual(kappa1, k2, kappa3, well.width)
    return float(out) if np.ndim(out) == 0 else out


def relative_residual(profile: PotentialProfile, units: UnitSystem, E: float) -> float:
    well = three_region(profile)
    kappa1, k2, kappa3 = well_wavenumbers(well, units, E)
    return float(abs(_residual(kappa1, k2, kappa3, well.width)) / residual_scale(kappa1, k2, kappa3))


def well_phase(profile: PotentialProfile, units: UnitSystem, E: float) -> float:
    """Phase phi with psi2 proportional to cos(k2 x + phi): cos(phi) > 0, tan(phi) = -kappa1/k2."""
    kappa1, k2, _ = well_wavenumbers(three_region(profile), units, E)
    return float(-np.arctan(kappa1 / k2))


def effective_width(profile: PotentialProfile, units: UnitSystem, E: float) -> float:
    """a + (kappa1 + kappa3)/(kappa1 kappa3): well width plus both penetration depths."""
    well = three_region(profile)
    kappa1, _, kappa3 = well_wavenumbers(well, units, E)
    return float(well.width + (kappa1 + kappa3) / (kappa1 * kappa3))


def find_bound_states(profile: PotentialProfile, units: UnitSystem,
                      resolution: int = DEFAULT_RESOLUTION) -> list[BoundState]:
    """Every root of :func:`dispersion_residual`, ascending.

    An empty window (``min(U1, U3) <= U2``) has no bound states and returns [].
    """
    well = three_region(profile)
    if not well.has_window:
        return []
    lo, hi = well.window
    roots = find_roots(lambda e: dispersion_residual(profile, units, e), lo, hi, resolution)
    return [
        BoundState(
            energy=e,
            method="classical",
            index=n,
            norm_constant=normalization(profile, units, e),
            phase=well_phase(profile, units, e),
            residual=dispersion_residual(profile, units, e),
        )
        for n, e in enumerate(roots)
    ]


def normalization(profile: PotentialProfile, units: UnitSystem, E_n: float) -> float:
    """|C11|^2 from the closed form 1/|C11|^2 = (1 + kappa1^2/k2^2)(a + (kappa1+kappa3)/(kappa1 kappa3))/2.

    The closed form only holds on the dispersion relation, so ``E_n`` is
    rejected unless its relative residual is below ``RESIDUAL_RTOL``.
    """
    well = three_region(profile)
    kappa1, k2, kappa3 = well_wavenumbers(well, units, E_n)
    rel = abs(_residual(kappa1, k2, kappa3, well.width)) / residual_scale(kappa1, k2, kappa3)
    if rel > RESIDUAL_RTOL:
        raise InconsistentStateError(
            f"E = {E_n!r} is not a bound-state energy (relative residual {rel:.3e})"
        )
    inv = 0.5 * (1.0 + kappa1**2 / k2**2) * (well.width + (kappa1 + kappa3) / (kappa1 * kappa3))
    return float(1.0 / inv)


def normalization_terms(profile: PotentialProfile, units: UnitSystem, E: float) -> float:
    """1/|C11|^2 as the sum of the three integrated pieces, before any use of the
    dispersion relation: left tail, well interior and right tail."""
    well = three_region(profile)
    kappa1, k2, kappa3 = (float(v) for v in well_wavenumbers(well, units, E))
    a = well.width
    r = kappa1 / k2
    left = 1.0 / (2.0 * kappa1)
    inner = (
        (1.0 - r**2) * math.sin(2 * k2 * a) / (4.0 * k2)
        - kappa1 / (2.0 * k2**2) * math.cos(2 * k2 * a)
        + 0.5 * (a + r**2 * a + kappa1 / k2**2)
    )
    right = (math.cos(k2 * a) + r * math.sin(k2 * a)) ** 2 / (2.0 * kappa3)
    return left + inner + right


def matching_coefficients(profile: PotentialProfile, units: UnitSystem, E_n: float) -> MatchingCoefficients:
    well = three_region(profile)
    kappa1, k2, kappa3 = (float(v) for v in well_wavenumbers(well, units, E_n))
    a = well.width
    c11 = math.sqrt(normalization(profile, units, E_n))
    r = kappa1 / k2
    c32 = c11 * math.exp(kappa3 * a) * (math.cos(k2 * a) + r * math.sin(k2 * a))
    return MatchingCoefficients(c11, c11, r * c11, c32)


def matching_matrix(profile: PotentialProfile, units: UnitSystem, E: float) -> np.ndarray:
    """The 4x4 homogeneous system acting on (C11, C21, C22, C32)."""
    well = three_region(profile)
    kappa1, k2, kappa3 = (float(v) for v in well_wavenumbers(well, units, E))
    a = well.width
    c, s, d = math.cos(k2 * a), math.sin(k2 * a), math.exp(-kappa3 * a)
    return np.array([
        [1.0, -1.0, 0.0, 0.0],
        [kappa1, 0.0, -k2, 0.0],
        [0.0, c, s, -d],
        [0.0, -k2 * s, k2 * c, kappa3 * d],
    ])


def wavefunction(profile: PotentialProfile, units: UnitSystem, state: BoundState, x,
                 derivative: bool = False):
    """Normalised real psi(x) (or psi'(x)) for a bound state, vectorised over x."""
    well = three_region(profile)
    E = state.energy
    kappa1, k2, kappa3 = (float(v) for v in well_wavenumbers(well, units, E))
    a = well.width
    c11 = math.sqrt(normalization(profile, units, E))
    r = kappa1 / k2
    xi = np.asarray(x, dtype=float) - well.origin
    edge = c11 * (math.cos(k2 * a) + r * math.sin(k2 * a))  # psi(a)
    left = xi < 0
    right = xi > a
    inner = ~(left | right)
    out = np.empty_like(xi)
    if derivative:
        out[left] = c11 * kappa1 * np.exp(kappa1 * xi[left])
        out[inner] = c11 * k2 * (-np.sin(k2 * xi[inner]) + r * np.cos(k2 * xi[inner]))
        out[right] = -kappa3 * edge * np.exp(-kappa3 * (xi[right] - a))
    else:
        out[left] = c11 * np.exp(kappa1 * xi[left])
        out[inner] = c11 * (np.cos(k2 * xi[inner]) + r * np.sin(k2 * xi[inner]))
        out[right] = edge * np.exp(-kappa3 * (xi[right] - a))
    return float(out) if out.ndim == 0 else out
