import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, trapezoid
from scipy.optimize import brentq

from qwi import classical, oracle
from qwi.classical import BoundState
from qwi.errors import EnergyWindowError, InconsistentStateError
from qwi.potential import PotentialProfile, UnitSystem

from conftest import random_well

# Values for U1=5, U2=-10, U3=8, a=2 (hbar = m = 1), cross-checked below against
# the finite-difference oracle and a quadrature normalisation.
WELL_ENERGIES = [-9.108322717866862, -6.4657893371154245, -2.1976553626135056, 3.280997092285512]


def _symmetric_roots(depth, a):
    """Even/odd conditions k tan(ka/2) = kappa and -k cot(ka/2) = kappa of a well
    U = 0 inside, U = depth outside, solved by bracketing in k."""
    kmax = math.sqrt(2 * depth)

    def even(k):
        return k * math.sin(k * a / 2) - math.sqrt(kmax**2 - k**2) * math.cos(k * a / 2)

    def odd(k):
        return -k * math.cos(k * a / 2) - math.sqrt(kmax**2 - k**2) * math.sin(k * a / 2)

    grid = np.linspace(1e-9, kmax * (1 - 1e-12), 20001)
    roots = []
    for g in (even, odd):
        vals = [g(k) for k in grid]
        for k0, k1, v0, v1 in zip(grid, grid[1:], vals, vals[1:]):
            if v0 == 0 or v0 * v1 < 0:
                roots.append(brentq(g, k0, k1, xtol=1e-15, rtol=1e-15))
    return sorted(k**2 / 2 for k in roots)


def test_asym_well_roots(asym_well, units):
    states = classical.find_bound_states(asym_well, units)
    np.testing.assert_allclose([s.energy for s in states], WELL_ENERGIES, rtol=0, atol=1e-10)
    assert [s.index for s in states] == [0, 1, 2, 3]
    assert all(s.method == "classical" for s in states)


def test_residual_sign_changes_match_oracle_count(asym_well, units):
    E = np.linspace(-10, 5, 10002)[1:-1]
    f = classical.dispersion_residual(asym_well, units, E)
    changes = int(np.count_nonzero(np.sign(f[:-1]) != np.sign(f[1:])))
    problem = oracle.discretize(asym_well, units, 20001, margin=10.0)
    assert changes == len(oracle.eigenvalues_below(problem, 5.0)) == 4


def test_asym_well_against_fd(asym_well, units):
    problem, states = oracle.solve(asym_well, units, WELL_ENERGIES)
    fd = np.array([s.energy for s in states])
    assert problem.h < 5e-3
    np.testing.assert_allclose(fd, WELL_ENERGIES, atol=1e-3)


@pytest.mark.parametrize("depth,a", [(10.0, 1.0), (50.0, 2.0), (3.0, 4.0)])
def test_symmetric_well_matches_even_odd_conditions(depth, a, units):
    profile = PotentialProfile([0.0, a], [depth, 0.0, depth])
    found = [s.energy for s in classical.find_bound_states(profile, units)]
    np.testing.assert_allclose(found, _symmetric_roots(depth, a), rtol=0, atol=1e-10)


def test_deep_symmetric_well_approaches_box(units):
    profile = PotentialProfile([0.0, 1.0], [1e6, 0.0, 1e6])
    k_a = [math.sqrt(2 * s.energy) for s in classical.find_bound_states(profile, units, resolution=2**18)[:3]]
    np.testing.assert_allclose(k_a, [math.pi, 2 * math.pi, 3 * math.pi], rtol=3e-3)


def test_empty_window(units):
    assert classical.find_bound_states(PotentialProfile([0.0, 1.0], [-1.0, -1.0, 3.0]), units) == []
    assert classical.find_bound_states(PotentialProfile([0.0, 1.0], [-2.0, -1.0, 3.0]), units) == []


def test_residual_domain(asym_well, units):
    with pytest.raises(EnergyWindowError):
        classical.dispersion_residual(asym_well, units, 6.0)
    with pytest.raises(EnergyWindowError):
        classical.dispersion_residual(asym_well, units, -11.0)


def test_residual_generic_point_nonzero(units):
    # k2 a = pi/2 with kappa1 kappa3 = k2^2: only the second coefficient vanishes
    k2 = math.pi / 2
    u2 = -k2**2 / 2
    u = k2**2 / 2  # kappa1 = kappa3 = k2 at E = 0
    profile = PotentialProfile([0.0, 1.0], [u, u2, u])
    f = classical.dispersion_residual(profile, units, 0.0)
    assert f == pytest.approx(k2 * 2 * k2 * math.cos(math.pi / 2), abs=1e-14)
    assert abs(classical.dispersion_residual(profile, units, 0.1)) > 0.1


def _quad_inverse_norm(kappa1, k2, kappa3, a):
    r = kappa1 / k2
    left = quad(lambda x: math.exp(2 * kappa1 * x), -np.inf, 0, epsabs=0, epsrel=1e-12)[0]
    inner = quad(lambda x: (math.cos(k2 * x) + r * math.sin(k2 * x)) ** 2, 0, a, epsabs=0, epsrel=1e-12)[0]
    right = (math.cos(k2 * a) + r * math.sin(k2 * a)) ** 2 * quad(
        lambda x: math.exp(-2 * kappa3 * x), 0, np.inf, epsabs=0, epsrel=1e-12)[0]
    return left + inner + right


def test_ground_state_normalisation_against_quadrature(asym_well, units):
    E0 = WELL_ENERGIES[0]
    kappa1, k2, kappa3 = math.sqrt(2 * (5 - E0)), math.sqrt(2 * (E0 + 10)), math.sqrt(2 * (8 - E0))
    expected = 1.0 / _quad_inverse_norm(kappa1, k2, kappa3, 2.0)
    assert classical.normalization(asym_well, units, E0) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_equals_term_by_term(seed):
    profile, units = random_well(np.random.default_rng(seed))
    for s in classical.find_bound_states(profile, units):
        closed = 1.0 / classical.normalization(profile, units, s.energy)
        terms = classical.normalization_terms(profile, units, s.energy)
        assert closed == pytest.approx(terms, rel=1e-10)


def test_normalisation_rejects_non_root(asym_well, units):
    with pytest.raises(InconsistentStateError):
        classical.normalization(asym_well, units, 0.0)


def test_infinite_well_limit_of_normalisation(units):
    profile = PotentialProfile([0.0, 1.0], [1e8, 0.0, 1e8])
    s = classical.find_bound_states(profile, units, resolution=2**20)[0]
    kappa1 = math.sqrt(2 * (1e8 - s.energy))
    k2 = math.sqrt(2 * s.energy)
    limit = 0.5 * (1 + kappa1**2 / k2**2) * 1.0
    assert 1.0 / classical.normalization(profile, units, s.energy) == pytest.approx(limit, rel=1e-3)


def test_matching_coefficients(asym_well, units):
    E = WELL_ENERGIES[2]
    c = classical.matching_coefficients(asym_well, units, E)
    kappa1, k2, kappa3 = math.sqrt(2 * (5 - E)), math.sqrt(2 * (E + 10)), math.sqrt(2 * (8 - E))
    assert c.c11 > 0
    assert c.c21 == c.c11
    assert c.c22 == pytest.approx(kappa1 / k2 * c.c11)
    expected = c.c11 * math.exp(2 * kappa3) * (math.cos(2 * k2) + kappa1 / k2 * math.sin(2 * k2))
    assert c.c32 == pytest.approx(expected, rel=1e-12)


def test_continuity(asym_well, units):
    for s in classical.find_bound_states(asym_well, units):
        for x0 in (0.0, 2.0):
            lo, hi = np.nextafter(x0, -np.inf), np.nextafter(x0, np.inf)
            psi = classical.wavefunction(asym_well, units, s, np.array([lo, x0, hi]))
            dpsi = classical.wavefunction(asym_well, units, s, np.array([lo, x0, hi]), derivative=True)
            scale = np.max(np.abs(classical.wavefunction(asym_well, units, s, np.linspace(-1, 3, 401))))
            assert abs(psi[0] - psi[2]) <= 1e-12 * scale
            assert abs(dpsi[0] - dpsi[2]) <= 1e-10 * np.max(np.abs(dpsi))


def test_in_well_density_factor_two_form(asym_well, units):
    x = np.linspace(0, 2, 1001)
    for s in classical.find_bound_states(asym_well, units):
        E = s.energy
        kappa1, k2, kappa3 = math.sqrt(2 * (5 - E)), math.sqrt(2 * (E + 10)), math.sqrt(2 * (8 - E))
        norm = math.sqrt(1 + kappa1**2 / k2**2)
        phi = math.atan2(-(kappa1 / k2) / norm, 1 / norm)
        closed = 2 / (2 + (kappa1 + kappa3) / (kappa1 * kappa3)) * np.cos(k2 * x + phi) ** 2
        np.testing.assert_allclose(classical.wavefunction(asym_well, units, s, x) ** 2, closed, atol=1e-12)
        assert s.phase == pytest.approx(phi, abs=1e-14)


def test_density_integrates_to_one(asym_well, units):
    for s in classical.find_bound_states(asym_well, units):
        f = lambda x: classical.wavefunction(asym_well, units, s, x) ** 2  # noqa: E731
        total = sum(quad(f, lo, hi, epsabs=1e-12, limit=200)[0] for lo, hi in ((-np.inf, 0), (0, 2), (2, np.inf)))
        assert total == pytest.approx(1.0, abs=1e-8)


def test_orthogonality_and_nodes(asym_well, units):
    states = classical.find_bound_states(asym_well, units)
    kappa = min(math.sqrt(2 * (5 - states[-1].energy)), math.sqrt(2 * (8 - states[-1].energy)))
    span = 40 / kappa
    x = np.linspace(-span, 2 + span, 400001)
    psi = [classical.wavefunction(asym_well, units, s, x) for s in states]
    for i in range(len(states)):
        for j in range(i):
            assert abs(trapezoid(psi[i] * psi[j], x)) < 1e-6
    inside = np.linspace(0, 2, 20001)[1:-1]
    for s in states:
        v = classical.wavefunction(asym_well, units, s, inside)
        assert np.count_nonzero(np.sign(v[:-1]) != np.sign(v[1:])) == s.index


def test_matching_determinant_vanishes(asym_well, units):
    for s in classical.find_bound_states(asym_well, units):
        m = classical.matching_matrix(asym_well, units, s.energy)
        assert abs(np.linalg.det(m)) < 1e-8 * np.linalg.norm(m) ** 4
    # expanding the determinant along the C32 column gives exp(-kappa3 a) f(E)
    for E in np.linspace(-9.9, 4.9, 37):
        kappa3 = math.sqrt(2 * (8 - E))
        det = np.linalg.det(classical.matching_matrix(asym_well, units, E))
        f = classical.dispersion_residual(asym_well, units, E)
        assert det == pytest.approx(math.exp(-2 * kappa3) * f, rel=1e-9, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_found_roots_have_small_relative_residual(seed):
    profile, units = random_well(np.random.default_rng(seed))
    states = classical.find_bound_states(profile, units)
    energies = [s.energy for s in states]
    assert energies == sorted(energies) and len(set(energies)) == len(energies)
    lo, hi = profile.bound_window()
    for s in states:
        assert lo < s.energy < hi
        assert classical.relative_residual(profile, units, s.energy) < 1e-8


def test_wavefunction_scalar_input(asym_well, units):
    s = BoundState(WELL_ENERGIES[0], "classical", 0)
    assert isinstance(classical.wavefunction(asym_well, units, s, 1.0), float)
