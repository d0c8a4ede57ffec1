"""Finite-difference eigensolver used to check the analytic methods.

The Hamiltonian -(hbar^2/2m) d^2/dx^2 + U(x) is discretised with central
differences on a uniform grid with hard walls at both ends.  The resulting
symmetric tridiagonal matrix is solved by Sturm-sequence bisection, and the
eigenvectors by inverse iteration.  Nothing here touches the analytic
solvers: the only input from them is where to put the walls.

The grid is laid out so that the outermost interfaces fall on grid nodes and
any cell cut by an interface carries the cell-averaged potential, which keeps
the eigenvalue error at O(h^2) for a discontinuous potential.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from .potential import PotentialProfile, UnitSystem

DEFAULT_POINTS = 20001
MARGIN_DECAY_LENGTHS = 40.0
TAIL_DENSITY_LIMIT = 1e-10
BISECT_RTOL = 1e-14


class TruncationWarning(UserWarning):
    """The hard walls sit close enough to cut into an eigenvector's tail."""


@dataclass(frozen=True)
class DiscretizedProblem:
    x_min: float
    x_max: float
    n_points: int
    h: float
    diagonal: np.ndarray
    offdiagonal: float
    margin: float

    @property
    def x(self) -> np.ndarray:
        """Full grid including the two wall nodes."""
        return self.x_min + self.h * np.arange(self.n_points)

    @property
    def x_interior(self) -> np.ndarray:
        return self.x[1:-1]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply the interior operator to a vector of length n_points - 2."""
        out = self.diagonal * v
        out[1:] += self.offdiagonal * v[:-1]
        out[:-1] += self.offdiagonal * v[1:]
        return out


class OracleState(NamedTuple):
    energy: float
    vector: np.ndarray  # on the full grid, zero at both walls


def margin_rule(profile: PotentialProfile, units: UnitSystem, energies: Sequence[float]) -> float:
    """40 decay lengths of the slowest-decaying outer tail among ``energies``."""
    if len(energies) == 0:
        raise ValueError("margin_rule needs at least one expected energy")
    top = max(energies)
    outer = min(profile.values[0], profile.values[-1])
    if not top < outer:
        raise ValueError(f"energy {top!r} is not below both outer levels")
    kappa = units.wave_factor * math.sqrt(outer - top)
    return MARGIN_DECAY_LENGTHS / kappa


def _cell_mean(profile: PotentialProfile, lo: float, hi: float) -> float:
    edges = [lo] + [b for b in profile.boundaries if lo < b < hi] + [hi]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        total += float(profile.potential_at(0.5 * (a + b))) * (b - a)
    return total / (hi - lo)


def _layout(profile: PotentialProfile, n_points: int, margin: float):
    """(x_min, h) with x_min < b0 - margin and x_max > b_last + margin.

    The outermost interfaces land on nodes and the spare cells are split evenly
    between the two sides, so a mirror-symmetric profile gets a symmetric grid.
    """
    first, last = profile.boundaries[0], profile.boundaries[-1]
    span = last - first
    cells = n_points - 1
    if span > 0:
        m = int(span / ((span + 2.0 * margin) / cells))
        while m >= 1:
            h = span / m
            side, odd = divmod(cells - m, 2)
            if not odd and side * h > margin:
                return first - side * h, h
            m -= 1
        h = (span + 2.0 * margin) / (cells - 2)
        return first - margin - h, h
    side = cells // 2
    h = margin / (side - 1)
    return first - side * h, h


def discretize(profile: PotentialProfile, units: UnitSystem, n_points: int = DEFAULT_POINTS,
               margin: float = 1.0) -> DiscretizedProblem:
    if n_points < 64:
        raise ValueError(f"n_points must be >= 64, got {n_points}")
    if not margin > 0:
        raise ValueError("margin must be positive")
    x_min, h = _layout(profile, n_points, margin)
    x = x_min + h * np.arange(n_points)
    u = np.asarray(profile.potential_at(x), dtype=float)
    for b in profile.boundaries:
        for i in np.flatnonzero(np.abs(x - b) < 0.5 * h):
            u[i] = _cell_mean(profile, x[i] - 0.5 * h, x[i] + 0.5 * h)
    kinetic = units.hbar**2 / (units.mass * h**2)
    return DiscretizedProblem(
        x_min=float(x[0]),
        x_max=float(x[-1]),
        n_points=n_points,
        h=h,
        diagonal=kinetic + u[1:-1],
        offdiagonal=-0.5 * kinetic,
        margin=margin,
    )


@njit(cache=True)
def _sturm_count(diag, off2, pivmin, lam):
    """Number of eigenvalues strictly below lam (negative pivots of T - lam I)."""
    count = 0
    d = diag[0] - lam
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0:
        count += 1
    for i in range(1, diag.size):
        d = diag[i] - lam - off2 / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


@njit(cache=True)
def _bisect_eigenvalues(diag, off2, pivmin, lo, hi, n, atol):
    out = np.empty(n)
    for j in range(n):
        a = lo
        b = hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if b - a <= max(atol, 1e-14 * max(abs(a), abs(b))) or mid == a or mid == b:
                break
            if _sturm_count(diag, off2, pivmin, mid) > j:
                b = mid
            else:
                a = mid
        out[j] = 0.5 * (a + b)
        lo = a  # eigenvalues come out in ascending order
    return out


@njit(cache=True)
def _shifted_solve(diag, off, shift, rhs, pivmin):
    """Thomas algorithm for (T - shift I) y = rhs with constant off-diagonal."""
    n = diag.size
    c = np.empty(n)
    y = np.empty(n)
    d = diag[0] - shift
    if abs(d) < pivmin:
        d = pivmin
    c[0] = off / d
    y[0] = rhs[0] / d
    for i in range(1, n):
        d = diag[i] - shift - off * c[i - 1]
        if abs(d) < pivmin:
            d = pivmin
        c[i] = off / d
        y[i] = (rhs[i] - off * y[i - 1]) / d
    for i in range(n - 2, -1, -1):
        y[i] -= c[i] * y[i + 1]
    return y


def sturm_count(problem: DiscretizedProblem, lam: float) -> int:
    off2 = problem.offdiagonal**2
    return int(_sturm_count(problem.diagonal, off2, _pivmin(problem), float(lam)))


def _pivmin(problem: DiscretizedProblem) -> float:
    return np.finfo(float).tiny * max(1.0, problem.offdiagonal**2)


def _eigenvector(problem: DiscretizedProblem, lam: float) -> np.ndarray:
    n = problem.diagonal.size
    v = np.ones(n) + np.linspace(0.0, 1e-3, n)
    for _ in range(3):
        v = _shifted_solve(problem.diagonal, problem.offdiagonal, lam, v, _pivmin(problem))
        v /= np.max(np.abs(v))
    lead = np.flatnonzero(np.abs(v) > 1e-6)[0]
    if v[lead] < 0:
        v = -v
    full = np.zeros(problem.n_points)
    full[1:-1] = v / math.sqrt(problem.h * float(v @ v))
    return full


def tail_density(vector: np.ndarray) -> float:
    """Largest density next to a wall relative to the peak density."""
    peak = float(np.max(vector**2))
    return max(vector[1] ** 2, vector[-2] ** 2) / peak


def eigenvalues_below(problem: DiscretizedProblem, E_cut: float) -> list[OracleState]:
    """All eigenpairs of the discrete operator with energy below ``E_cut``.

    Vectors are normalised so that ``sum(|psi_i|^2) h = 1``.  A
    :class:`TruncationWarning` is issued when a tail reaches the walls.
    """
    off2 = problem.offdiagonal**2
    pivmin = _pivmin(problem)
    n = int(_sturm_count(problem.diagonal, off2, pivmin, float(E_cut)))
    if n == 0:
        return []
    lo = float(np.min(problem.diagonal)) - 2.0 * abs(problem.offdiagonal) - 1.0
    norm = float(np.max(np.abs(problem.diagonal))) + 2.0 * abs(problem.offdiagonal)
    atol = 4.0 * np.finfo(float).eps * norm
    energies = _bisect_eigenvalues(problem.diagonal, off2, pivmin, lo, float(E_cut), n, atol)
    states = [OracleState(float(e), _eigenvector(problem, float(e))) for e in energies]
    worst = max(tail_density(s.vector) for s in states)
    if worst > TAIL_DENSITY_LIMIT:
        warnings.warn(
            f"wall truncation: tail density {worst:.2e} exceeds {TAIL_DENSITY_LIMIT:g}; widen the margin",
            TruncationWarning,
            stacklevel=2,
        )
    return states


def solve(profile: PotentialProfile, units: UnitSystem, expected: Sequence[float],
          n_points: int = DEFAULT_POINTS) -> tuple[DiscretizedProblem, list[OracleState]]:
    """Discretise with the margin rule for ``expected`` energies and return the
    eigenpairs below the lower outer level."""
    problem = discretize(profile, units, n_points, margin_rule(profile, units, expected))
    cut = min(profile.values[0], profile.values[-1])
    return problem, eigenvalues_below(problem, cut)


def convergence_order(err_coarse: float, err_fine: float, h_coarse: float, h_fine: float) -> float:
    return math.log(abs(err_coarse) / abs(err_fine)) / math.log(h_coarse / h_fine)
