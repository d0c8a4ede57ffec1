"""Diagonal Green's function of the three-region well from side impedances.

With Z = (hbar/m) psi'/psi, the impedance built from the left boundary data
(decay at -inf) and the one built from the right (decay at +inf) differ at x
by the jump of the Green's function derivative, giving

    G(x, x, E) = (2/hbar) / (z_right(x, E) - z_left(x, E)).

Near an eigenvalue G ~ |psi_n(x)|^2 / (E - E_n), so evaluating at
``E_n - i eps`` and keeping ``eps * Im G`` recovers the normalised density
once the O(eps) remainder is extrapolated away.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, EnergyWindowError, PoleError
from .impedance import _phases, density_amplitude
from .potential import PotentialProfile, UnitSystem, three_region

DEFAULT_EPS_SCHEDULE = (1e-4, 1e-5, 1e-6, 1e-7)
EXTRAPOLATION_RTOL = 1e-4
POLE_ATOL = 1e-15
EIGEN_POLE_RTOL = 1e-8
NODE_SHIFT = 1e-9


@dataclass(frozen=True)
class GreensProbe:
    x: float
    energy: complex
    z_left: complex
    z_right: complex
    interval: tuple[float, float]
    green: complex

    @property
    def eps(self) -> float:
        return -self.energy.imag


def _complex_wavenumbers(well, units, E: complex):
    """Principal square roots: Re kappa > 0 keeps the outer solutions decaying."""
    c = units.wave_factor
    kappa1 = c * np.sqrt(complex(well.u1 - E))
    k2 = c * np.sqrt(complex(E - well.u2))
    kappa3 = c * np.sqrt(complex(well.u3 - E))
    return kappa1, k2, kappa3


def _check(well, x, E: complex):
    lo, hi = well.window
    if not lo < E.real < hi:
        raise EnergyWindowError(f"Re E = {E.real!r} outside the bound-state window ({lo!r}, {hi!r})")
    if E.imag > 0:
        raise ValueError("the imaginary part of the energy must be <= 0")
    xi = np.asarray(x, dtype=float) - well.origin
    if np.any((xi <= 0) | (xi >= well.width)):
        raise EnergyWindowError("side impedances are evaluated strictly inside the well")
    return xi


def _side_impedances(well, units, xi, E: complex):
    kappa1, k2, kappa3 = _complex_wavenumbers(well, units, E)
    phi_L, phi_R = _phases(kappa1, k2, kappa3, well.width)
    z2 = 1j * units.impedance_factor * k2
    u_left = 1j * k2 * xi + phi_L
    u_right = 1j * k2 * xi + phi_R
    pole = (np.abs(np.cosh(u_left)) < POLE_ATOL) | (np.abs(np.cosh(u_right)) < POLE_ATOL)
    return z2 * np.tanh(u_left), z2 * np.tanh(u_right), z2, pole


def side_impedances(profile: PotentialProfile, units: UnitSystem, x, E: complex):
    """(z_left, z_right) at x inside the well for a complex energy with Im E <= 0."""
    well = three_region(profile)
    E = complex(E)
    xi = _check(well, x, E)
    z_left, z_right, _, pole = _side_impedances(well, units, xi, E)
    if np.any(pole):
        raise PoleError("impedance pole at the sample point (psi vanishes there)")
    if np.ndim(z_left) == 0:
        return complex(z_left), complex(z_right)
    return z_left, z_right


def green_diagonal(profile: PotentialProfile, units: UnitSystem, x, E: complex):
    """G(x, x, E) = (2/hbar)/(z_right - z_left); Im G > 0 just below a real eigenvalue."""
    well = three_region(profile)
    E = complex(E)
    xi = _check(well, x, E)
    z_left, z_right, z2, pole = _side_impedances(well, units, xi, E)
    if np.any(pole):
        raise PoleError("impedance pole at the sample point (psi vanishes there)")
    gap = z_right - z_left
    # only a real energy can sit on a pole; roots are known to ~1e-12, hence the loose tolerance
    if E.imag == 0 and np.any(np.abs(gap) <= EIGEN_POLE_RTOL * abs(z2)):
        raise PoleError(f"Green's function pole: E = {E!r} is an eigenvalue")
    out = (2.0 / units.hbar) / gap
    return complex(out) if np.ndim(out) == 0 else out


def probe(profile: PotentialProfile, units: UnitSystem, x: float, E: complex) -> GreensProbe:
    well = three_region(profile)
    z_left, z_right = side_impedances(profile, units, x, E)
    g = green_diagonal(profile, units, x, E)
    return GreensProbe(float(x), complex(E), z_left, z_right,
                       (well.origin, well.origin + well.width), g)


def _density_at(well, units, xi, E_n: float, eps: float):
    E = complex(E_n, -eps)
    z_left, z_right, _, pole = _side_impedances(well, units, xi, E)
    if np.any(pole):
        # step off the node of psi; the density there is ~0 either way
        xi = np.where(pole, xi + NODE_SHIFT * well.width, xi)
        z_left, z_right, _, _ = _side_impedances(well, units, xi, E)
    return eps * ((2.0 / units.hbar) / (z_right - z_left)).imag


def eigenfunction_density(profile: PotentialProfile, units: UnitSystem, x, E_n: float,
                          eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE):
    """|psi_n(x)|^2 in the well from eps Im G(x, x, E_n - i eps), extrapolated to eps -> 0.

    Consecutive pairs of the schedule are combined by linear Richardson
    extrapolation; the last extrapolant is returned.  ``E_n`` must already be
    a bound-state energy.
    """
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 2 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_schedule must hold at least two strictly decreasing positive values")
    well = three_region(profile)
    xi = _check(well, x, complex(E_n))
    samples = [_density_at(well, units, xi, E_n, e) for e in eps]
    extrapolated = [
        (e0 * d1 - e1 * d0) / (e0 - e1)
        for (e0, d0), (e1, d1) in zip(zip(eps, samples), zip(eps[1:], samples[1:]))
    ]
    scale = density_amplitude(profile, units, E_n)
    for prev, cur in zip(extrapolated, extrapolated[1:]):
        spread = float(np.max(np.abs(cur - prev)))
        if spread > EXTRAPOLATION_RTOL * scale:
            raise ConvergenceError(
                f"extrapolants differ by {spread:.3e} (> {EXTRAPOLATION_RTOL:g} of peak {scale:.3e})"
            )
    out = extrapolated[-1]
    return float(out) if np.ndim(out) == 0 else out
