"""Self-contained numerical kernels.

Fixed-step RK4 integration, Simpson-panel quadrature (the RK4 rule applied to
I' = f(x)), a Nelder-Mead simplex minimizer with fminsearch-style
initialization, central finite differences, and seeded uniform sampling for
reproducible multistart searches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, SingularIntegrandError, ValidationError


@dataclass(frozen=True)
class Grid:
    """Uniform panels on [x0, xf]; decreasing orientation is allowed."""

    x0: float
    xf: float
    n_panels: int

    def __post_init__(self):
        if self.x0 == self.xf:
            raise ValidationError("grid endpoints must differ")
        if self.n_panels < 2:
            raise ValidationError("at least 2 panels are required")

    @property
    def panel_width(self) -> float:
        return (self.xf - self.x0) / self.n_panels

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x0, self.xf, self.n_panels + 1)

    def sample_points(self) -> np.ndarray:
        """Panel endpoints and midpoints: the 2N+1 quadrature abscissae."""
        xs = self.x0 + 0.5 * self.panel_width * np.arange(2 * self.n_panels + 1)
        xs[-1] = self.xf
        return xs

    def sample_weights(self) -> np.ndarray:
        """Simpson weights matching :meth:`sample_points`."""
        w = np.full(2 * self.n_panels + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (self.panel_width / 6.0)


@dataclass(frozen=True)
class OptimizerConfig:
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    max_iterations: int | None = None  # defaults to 200 * dimension
    initial_scale: float = 0.05        # fminsearch-style 5% vertex perturbation

    def __post_init__(self):
        if self.x_tolerance <= 0 or self.f_tolerance <= 0:
            raise ValidationError("tolerances must be positive")


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool


class RandomSource:
    """A seeded uniform stream.  Identical seeds give identical draws.

    Parallel consumers must not share one source; derive independent children
    with :meth:`split`, whose rule (child seed = first word of
    SeedSequence([seed, index])) is fixed so results stay reproducible."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._generator = np.random.default_rng(np.random.SeedSequence(self.seed))

    def uniform(self, low: float, high: float, size=None):
        return self._generator.uniform(low, high, size)

    def split(self, index: int) -> "RandomSource":
        child = int(np.random.SeedSequence([self.seed, int(index)]).generate_state(1)[0])
        return RandomSource(child)


def sample_linf_ball(rng: RandomSource, dim: int, radius: float) -> np.ndarray:
    """Uniform draw from the l-infinity ball: independent U[-radius, radius]."""
    if radius <= 0:
        raise ValidationError("radius must be positive")
    return np.asarray(rng.uniform(-radius, radius, int(dim)), dtype=float)


def rk4_integrate(rhs, t0: float, tf: float, y0, step: float):
    """Classic fixed-step RK4; the final step is shortened to land on tf.

    Returns (times, states) with states stacked row-wise."""
    if step <= 0:
        raise ValidationError("step must be positive")
    if tf <= t0:
        raise ValidationError("tf must exceed t0")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    t = float(t0)
    times = [t]
    states = [y.copy()]
    while t < tf - 1e-15 * max(1.0, abs(tf)):
        h = min(step, tf - t)
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"state became non-finite at t = {t:.6g}", t=t)
        times.append(t)
        states.append(y.copy())
    return np.asarray(times), np.vstack(states)


def quadrature(f, grid: Grid) -> float:
    """Integral of f over the grid via the Simpson panel rule.

    This is exactly RK4 applied to I' = f(x): for an x-only right-hand side
    the four stages collapse to endpoint/midpoint/endpoint with Simpson
    weights, so the rule inherits 4th-order convergence."""
    xs = grid.sample_points()
    try:
        values = np.asarray(f(xs), dtype=float)
        if values.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.asarray([float(f(x)) for x in xs])
    bad = ~np.isfinite(values)
    if np.any(bad):
        x_bad = float(xs[np.argmax(bad)])
        raise SingularIntegrandError(
            f"integrand is non-finite at x = {x_bad:.9g}", x=x_bad)
    return float(grid.sample_weights() @ values)


def fd_gradient(f, c, h: float) -> np.ndarray:
    """Central differences; component i uses step h * max(1, |c_i|)."""
    if h <= 0:
        raise ValidationError("step must be positive")
    c = np.asarray(c, dtype=float)
    grad = np.empty_like(c)
    for i in range(c.size):
        hi = h * max(1.0, abs(c[i]))
        up = c.copy()
        dn = c.copy()
        up[i] += hi
        dn[i] -= hi
        grad[i] = (f(up) - f(dn)) / (2.0 * hi)
    return grad


def nelder_mead(objective, start, config: OptimizerConfig | None = None) -> NelderMeadResult:
    """Nelder-Mead with the standard coefficient set (1, 2, 1/2, 1/2).

    The initial simplex perturbs each coordinate by ``initial_scale``
    relatively (0.00025 absolutely at zero coordinates), mirroring fminsearch
    so that multistart runs are reproducible across platforms.  Non-finite
    objective values during the search are treated as +inf; a non-finite value
    at the start point is an error."""
    config = config or OptimizerConfig()
    x0 = np.atleast_1d(np.asarray(start, dtype=float))
    n = x0.size
    max_iter = config.max_iterations or 200 * n

    def safe(x):
        v = float(objective(x))
        return v if np.isfinite(v) else np.inf

    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise ValidationError("objective is non-finite at the start point")

    simplex = [x0.copy()]
    for i in range(n):
        vertex = x0.copy()
        if vertex[i] != 0.0:
            vertex[i] *= 1.0 + config.initial_scale
        else:
            vertex[i] = 0.00025 * (config.initial_scale / 0.05)
        simplex.append(vertex)
    simplex = np.vstack(simplex)
    values = np.array([f0] + [safe(v) for v in simplex[1:]])

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]
        if (np.max(np.abs(simplex[1:] - simplex[0])) < config.x_tolerance
                and np.max(np.abs(values[1:] - values[0])) < config.f_tolerance):
            converged = True
            break
        iterations += 1
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + (centroid - simplex[-1])
        f_r = safe(reflected)
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - simplex[-1])
            f_e = safe(expanded)
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            if f_r < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
                f_c = safe(contracted)
                accept = f_c <= f_r
            else:
                contracted = centroid - 0.5 * (centroid - simplex[-1])
                f_c = safe(contracted)
                accept = f_c < values[-1]
            if accept:
                simplex[-1], values[-1] = contracted, f_c
            else:
                for j in range(1, n + 1):
                    simplex[j] = simplex[0] + 0.5 * (simplex[j] - simplex[0])
                    values[j] = safe(simplex[j])

    order = np.argsort(values, kind="stable")
    simplex = simplex[order]
    values = values[order]
    return NelderMeadResult(x=simplex[0].copy(), fun=float(values[0]),
                            iterations=iterations, converged=converged)
