"""Exception types shared across the solvers."""


class ProfileError(ValueError):
    """A potential profile or unit system violates its invariants."""


class DegenerateWavenumberError(ValueError):
    """The energy coincides with a region potential, so the wavenumber is zero."""


class EnergyWindowError(ValueError):
    """Energy lies outside the bound-state window of the profile."""


class UnsupportedProfileError(ValueError):
    """The method only handles the three-region well."""


class InconsistentStateError(ValueError):
    """An energy passed as a bound state does not satisfy the dispersion relation."""


class PoleError(ArithmeticError):
    """An impedance or Green's function evaluation hit a pole."""


class ConvergenceError(ArithmeticError):
    """Extrapolation over the imaginary-energy schedule did not settle."""
