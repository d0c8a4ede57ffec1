"""Piecewise-constant potentials, the unit system and region wavenumbers.

A profile with boundaries ``x_0 < ... < x_{N-2}`` and ``N`` potential levels
describes ``N`` regions; the first and last regions are semi-infinite.  The
three-region well used throughout the analytic solvers is
``boundaries = [x0, x0 + a]``, ``values = [U1, U2, U3]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateWavenumberError,
    EnergyWindowError,
    ProfileError,
    UnsupportedProfileError,
)

PROPAGATING = "propagating"
EVANESCENT = "evanescent"


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ProfileError(f"hbar must be positive, got {self.hbar!r}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ProfileError(f"mass must be positive, got {self.mass!r}")

    @property
    def wave_factor(self) -> float:
        """sqrt(2m)/hbar, so that a wavenumber is ``wave_factor * sqrt(|E - U|)``."""
        return math.sqrt(2.0 * self.mass) / self.hbar

    @property
    def impedance_factor(self) -> float:
        """hbar/m, the scale between an exponent rate and an impedance."""
        return self.hbar / self.mass


def validate_profile(profile: Any) -> None:
    """Raise :class:`ProfileError` naming the first violated profile invariant.

    Accepts anything with ``boundaries`` and ``values`` sequences, so raw
    parsed input can be checked before a :class:`PotentialProfile` exists.
    """
    boundaries = list(profile.boundaries)
    values = list(profile.values)
    if len(values) < 2:
        raise ProfileError(f"a profile needs at least 2 regions, got {len(values)}")
    if len(values) != len(boundaries) + 1:
        raise ProfileError(
            "length mismatch: expected len(potentials) == len(boundaries) + 1, "
            f"got {len(values)} potentials and {len(boundaries)} boundaries"
        )
    for name, seq in (("boundaries", boundaries), ("potentials", values)):
        for i, v in enumerate(seq):
            if not math.isfinite(v):
                raise ProfileError(f"{name}[{i}] is not finite: {v!r}")
    for i in range(1, len(boundaries)):
        if not boundaries[i] > boundaries[i - 1]:
            raise ProfileError(
                f"non-monotone boundaries: boundaries[{i}] = {boundaries[i]!r} "
                f"is not greater than boundaries[{i - 1}] = {boundaries[i - 1]!r}"
            )


@dataclass(frozen=True)
class PotentialProfile:
    boundaries: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        validate_profile(self)

    @property
    def n_regions(self) -> int:
        return len(self.values)

    @property
    def widths(self) -> tuple[float, ...]:
        """Widths of the finite interior regions."""
        b = self.boundaries
        return tuple(b[i + 1] - b[i] for i in range(len(b) - 1))

    def region_index(self, x):
        """Region containing ``x``; a point on a boundary belongs to the left region."""
        return np.searchsorted(np.asarray(self.boundaries), x, side="left")

    def potential_at(self, x):
        return np.asarray(self.values)[self.region_index(x)]

    def bound_window(self) -> tuple[float, float]:
        """Open energy interval that can hold bound states (may be empty)."""
        return min(self.values), min(self.values[0], self.values[-1])

    def to_dict(self) -> dict:
        return {"boundaries": list(self.boundaries), "potentials": list(self.values)}


class RegionWaveNumber(NamedTuple):
    kind: str
    magnitude: float

    @property
    def complex_value(self) -> complex:
        """q = k for a propagating region, q = i*kappa for an evanescent one."""
        if self.kind == PROPAGATING:
            return complex(self.magnitude, 0.0)
        return complex(0.0, self.magnitude)

    @property
    def exponent_rate(self) -> complex:
        """Rate r with local solutions exp(+-r x): i*k when propagating, kappa when evanescent."""
        if self.kind == PROPAGATING:
            return complex(0.0, self.magnitude)
        return complex(self.magnitude, 0.0)


def wavenumber(profile: PotentialProfile, units: UnitSystem, region_index: int, E: float) -> RegionWaveNumber:
    if not 0 <= region_index < profile.n_regions:
        raise IndexError(f"region index {region_index} out of range for {profile.n_regions} regions")
    u = profile.values[region_index]
    if E == u:
        raise DegenerateWavenumberError(
            f"E = {E!r} equals the potential of region {region_index}; wavenumber is zero"
        )
    kind = PROPAGATING if E > u else EVANESCENT
    return RegionWaveNumber(kind, units.wave_factor * math.sqrt(abs(E - u)))


def exponent_rates(values: Sequence[float], units: UnitSystem, E) -> np.ndarray:
    """Vectorised exponent rates for every region.

    Returns a complex array of shape ``E.shape + (len(values),)``: kappa (real)
    where E < U and i*k where E > U.
    """
    E = np.asarray(E, dtype=float)
    u = np.asarray(values, dtype=float)
    d = E[..., None] - u
    if np.any(d == 0):
        hit = np.argwhere(d == 0)[0]
        raise DegenerateWavenumberError(
            f"energy equals the potential of region {int(hit[-1])}; wavenumber is zero"
        )
    mag = units.wave_factor * np.sqrt(np.abs(d))
    return np.where(d < 0, mag + 0j, 1j * mag)


class ThreeRegionWell(NamedTuple):
    u1: float
    u2: float
    u3: float
    width: float
    origin: float

    @property
    def window(self) -> tuple[float, float]:
        return self.u2, min(self.u1, self.u3)

    @property
    def has_window(self) -> bool:
        lo, hi = self.window
        return hi > lo


def three_region(profile: PotentialProfile) -> ThreeRegionWell:
    if profile.n_regions != 3:
        raise UnsupportedProfileError(
            f"method supports the 3-region well only, profile has {profile.n_regions} regions"
        )
    u1, u2, u3 = profile.values
    x0, x1 = profile.boundaries
    return ThreeRegionWell(u1, u2, u3, x1 - x0, x0)


def well_wavenumbers(well: ThreeRegionWell, units: UnitSystem, E):
    """(kappa1, k2, kappa3) inside the bound-state window, vectorised over E."""
    E = np.asarray(E, dtype=float)
    lo, hi = well.window
    if np.any(~((E > lo) & (E < hi))):
        bad = E[~((E > lo) & (E < hi))].flat[0]
        raise EnergyWindowError(f"E = {bad!r} outside the bound-state window ({lo!r}, {hi!r})")
    c = units.wave_factor
    return c * np.sqrt(well.u1 - E), c * np.sqrt(E - well.u2), c * np.sqrt(well.u3 - E)


def profile_from_dict(data: dict) -> tuple[PotentialProfile, UnitSystem]:
    try:
        boundaries = [float(b) for b in data["boundaries"]]
        values = [float(v) for v in data["potentials"]]
    except KeyError as exc:
        raise ProfileError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ProfileError(f"non-numeric entry: {exc}") from None
    units = UnitSystem(float(data.get("hbar", 1.0)), float(data.get("mass", 1.0)))
    return PotentialProfile(boundaries, values), units


def load_profile(path: str | Path) -> tuple[PotentialProfile, UnitSystem]:
    """Read a JSON profile; :class:`json.JSONDecodeError` carries line/column."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ProfileError("profile JSON must be an object")
    return profile_from_dict(data)


def dump_profile(profile: PotentialProfile, units: UnitSystem) -> dict:
    out = profile.to_dict()
    out.update(hbar=units.hbar, mass=units.mass)
    return out
