"""Transfer matrices for piecewise-constant profiles.

Each region carries an exponent rate ``q`` (kappa where evanescent, i*k where
propagating) so its local solutions are ``exp(+q x)`` and ``exp(-q x)``.
Interface matrices map amplitudes across a discontinuity and propagation
matrices carry them through a region.  Every factor is symmetric, and the
total matrix

    T = I(q_{N-2}, q_{N-1}) ... I(q1, q2) M(q1, w1) I(q0, q1)
      = [I(q0, q1) M(q1, w1) I(q1, q2) ... I(q_{N-2}, q_{N-1})]^T

maps the amplitudes (A, B) of exp(+q x), exp(-q x) in the first region onto
those in the last.  A bound state needs no growing term on the right when
only the decaying term is present on the left, i.e. T[0, 0] = 0.  Long evanescent
regions make the entries grow exponentially, so products are kept as a
normalised 2x2 block times ``exp(log_scale)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classical import DEFAULT_RESOLUTION, BoundState
from .errors import DegenerateWavenumberError, EnergyWindowError
from .potential import PotentialProfile, UnitSystem, exponent_rates
from .roots import find_roots


@dataclass(frozen=True)
class TransferMatrix:
    """A (batch of) 2x2 complex matrices equal to ``data * exp(log_scale)``."""

    data: np.ndarray
    log_scale: np.ndarray | float = 0.0

    def to_array(self) -> np.ndarray:
        return self.data * np.exp(np.asarray(self.log_scale))[..., None, None]

    @property
    def m11(self):
        return self.to_array()[..., 0, 0]

    @property
    def m12(self):
        return self.to_array()[..., 0, 1]

    @property
    def m21(self):
        return self.to_array()[..., 1, 0]

    @property
    def m22(self):
        return self.to_array()[..., 1, 1]

    def det(self):
        d = self.data
        raw = d[..., 0, 0] * d[..., 1, 1] - d[..., 0, 1] * d[..., 1, 0]
        return raw * np.exp(2.0 * np.asarray(self.log_scale))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(self.data @ other.data, np.asarray(self.log_scale) + other.log_scale)

    def renormalized(self) -> "TransferMatrix":
        peak = np.max(np.abs(self.data), axis=(-2, -1))
        peak = np.where(peak > 0, peak, 1.0)
        return TransferMatrix(self.data / peak[..., None, None], np.asarray(self.log_scale) + np.log(peak))

    def allclose(self, other: "TransferMatrix", rtol: float) -> bool:
        """Entrywise agreement relative to the largest entry, compared on a common scale."""
        shift = np.asarray(self.log_scale) - np.asarray(other.log_scale)
        mine = self.data * np.exp(shift)[..., None, None]
        scale = np.max(np.abs(other.data), axis=(-2, -1))
        diff = np.max(np.abs(mine - other.data), axis=(-2, -1))
        return bool(np.all(diff <= rtol * scale))


def _matrix(m11, m12, m21, m22) -> np.ndarray:
    m11, m12, m21, m22 = np.broadcast_arrays(*(np.asarray(m, dtype=complex) for m in (m11, m12, m21, m22)))
    return np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)


def interface_matrix(q_left, q_right) -> TransferMatrix:
    """Amplitude map across a discontinuity between exponent rates q_left and q_right."""
    q_left = np.asarray(q_left, dtype=complex)
    q_right = np.asarray(q_right, dtype=complex)
    if np.any(q_right == 0):
        raise DegenerateWavenumberError("interface with zero wavenumber on the right side")
    diag = 0.5 * (q_left + q_right) / q_right
    off = 0.5 * (q_right - q_left) / q_right
    return TransferMatrix(_matrix(diag, off, off, diag))


def propagation_matrix(q, length) -> TransferMatrix:
    """diag(exp(q L), exp(-q L)); for q = i k this is the plane-wave phase."""
    length = np.asarray(length, dtype=float)
    if np.any(length < 0):
        raise ValueError("region length must be non-negative")
    phase = np.asarray(q, dtype=complex) * length
    zero = np.zeros_like(phase)
    return TransferMatrix(_matrix(np.exp(phase), zero, zero, np.exp(-phase)))


def chain(matrices: Iterable[TransferMatrix]) -> TransferMatrix:
    """Left-to-right product, renormalising after every factor."""
    result = None
    for m in matrices:
        result = m.renormalized() if result is None else (result @ m).renormalized()
    if result is None:
        raise ValueError("empty matrix chain")
    return result


def _factors(rates: np.ndarray, widths: Sequence[float]):
    n = rates.shape[-1]
    for j in range(n - 1):
        if j > 0:
            yield propagation_matrix(rates[..., j], widths[j - 1])
        yield interface_matrix(rates[..., j], rates[..., j + 1])


def stack_transfer(values: Sequence[float], widths: Sequence[float], units: UnitSystem, E) -> TransferMatrix:
    """Total matrix for region levels ``values`` with interior ``widths``.

    Unlike a :class:`PotentialProfile` this accepts zero-width interior
    regions, which must leave the product unchanged.
    """
    if len(widths) != len(values) - 2:
        raise ValueError(f"need {len(values) - 2} interior widths, got {len(widths)}")
    rates = exponent_rates(values, units, E)
    # region order reversed: the rightmost factor acts first on the left amplitudes
    return chain(reversed(list(_factors(rates, widths))))


def total_transfer(profile: PotentialProfile, units: UnitSystem, E) -> TransferMatrix:
    return stack_transfer(profile.values, profile.widths, units, E)


def _check_window(profile: PotentialProfile, E) -> None:
    lo, hi = profile.bound_window()
    E = np.asarray(E, dtype=float)
    inside = (E > lo) & (E < hi)
    if not np.all(inside):
        bad = E[~inside].flat[0]
        raise EnergyWindowError(f"E = {bad!r} outside the bound-state window ({lo!r}, {hi!r})")


def residual_factor(profile: PotentialProfile, units: UnitSystem, E):
    """Positive rescaling 2 |q_last| prod_interior |q_j| applied to T11.

    For the three-region well this is 2 k2 kappa3, which turns T11 into the
    pole-free matching residual.
    """
    rates = np.abs(exponent_rates(profile.values, units, E))
    return 2.0 * rates[..., -1] * np.prod(rates[..., 1:-1], axis=-1)


def bound_state_residual_tm(profile: PotentialProfile, units: UnitSystem, E):
    """Re(T11) times :func:`residual_factor`; zero exactly at bound states."""
    _check_window(profile, E)
    t = total_transfer(profile, units, E)
    with np.errstate(over="ignore"):
        out = t.data[..., 0, 0].real * np.exp(np.asarray(t.log_scale)) * residual_factor(profile, units, E)
    return float(out) if np.ndim(out) == 0 else out


def find_bound_states_tm(profile: PotentialProfile, units: UnitSystem,
                         resolution: int = DEFAULT_RESOLUTION) -> list[BoundState]:
    """Bound states of an arbitrary N-region profile from T11 = 0."""
    lo, hi = profile.bound_window()
    if hi <= lo:
        return []
    levels = np.asarray(profile.values)

    def residual(E):
        E = np.asarray(E, dtype=float)
        # scan nodes landing exactly on an interior level would be degenerate
        E = np.where(np.isin(E, levels), np.nextafter(E, np.inf), E)
        return bound_state_residual_tm(profile, units, E)

    roots = find_roots(residual, lo, hi, resolution)
    return [
        BoundState(energy=e, method="transfer", index=n, residual=bound_state_residual_tm(profile, units, e))
        for n, e in enumerate(roots)
    ]
