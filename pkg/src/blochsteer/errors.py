"""Exception types shared across the package."""


class BlochSteerError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(BlochSteerError, ValueError):
    """An input violates a documented precondition or invariant."""


class InternalConsistencyError(BlochSteerError, RuntimeError):
    """A computation produced values that indicate a broken implementation,
    e.g. imaginary residues far above rounding level in a real-valued result."""


class NoChimneyError(ValidationError):
    """The drift vector vanishes, so the purity-growth region degenerates
    to the origin and no apogee exists."""


class SingularIntegrandError(BlochSteerError, ArithmeticError):
    """An integrand blew up at a quadrature node.  Carries the offending
    abscissa in ``x``."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DivergenceError(BlochSteerError, ArithmeticError):
    """An ODE integration produced a non-finite state.  Carries the failing
    time in ``t``."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NoConvergenceError(BlochSteerError, RuntimeError):
    """No multistart candidate reached the residual tolerance while staying
    feasible.  Carries the best infeasible diagnostics."""

    def __init__(self, message, best_nu=None, best_coefficients=None):
        super().__init__(message)
        self.best_nu = best_nu
        self.best_coefficients = best_coefficients


class SimulationError(BlochSteerError, RuntimeError):
    """Forward simulation failed to reach the target state."""
