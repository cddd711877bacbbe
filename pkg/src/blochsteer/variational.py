"""Direct variational solver for the steering problems.

The trial curve y(x) (and z(x) in the spatial case) is expanded over the
pinned polynomial basis

    y(x) = line through the endpoints + sum_i c_i (x - x0)(x - xf)^i,

so every coefficient vector interpolates the boundary states exactly.  The
cost functionals are rewritten as x-integrals,

    time:    integral (x + y y' [+ z z']) / f(q) dx,
    energy:  integral |u|^2 (x + y y' [+ z z']) / f(q) dx,

with the controls recovered pointwise from the curve's slopes.  Stationarity
is enforced by driving nu(c) = |grad_c I| to (approximately) zero with
Nelder-Mead from many random starts and keeping the best feasible candidate.

Singular or retrograde (dt/dx <= 0) quadrature nodes turn the functional into
the graded penalty 1e10 + (number of bad nodes) so the simplex can walk back
to feasibility instead of dying on an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bloch import DissipationModel, _as_vec3, bloch_rhs
from .chimney import BoundaryConditions, purity_derivative
from .errors import (NoConvergenceError, SimulationError, SingularIntegrandError,
                     ValidationError)
from .numerics import (Grid, OptimizerConfig, RandomSource, nelder_mead,
                       sample_linf_ball)

PENALTY_BASE = 1e10
_F_SINGULAR_TOL = 1e-12
_FD_STEP = 1e-6


@dataclass(frozen=True)
class ProblemSpec:
    """One steering instance: model, objective, endpoints and solver settings."""

    model: DissipationModel
    dimension: int
    objective: str  # "time" | "energy"
    bounds: BoundaryConditions
    order: int
    grid: Grid
    multistart: int
    seed: int
    start_radius: float = 2.0
    zeroed_control: int = 1
    nu_tolerance: float = 1e-4
    restarts: int = 8
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValidationError("dimension must be 2 or 3")
        if self.objective not in ("time", "energy"):
            raise ValidationError(f"unknown objective {self.objective!r}")
        if self.order < 1:
            raise ValidationError("ansatz order must be at least 1")
        if self.multistart < 1:
            raise ValidationError("at least one start is required")
        if self.zeroed_control not in (1, 2, 3):
            raise ValidationError("zeroed_control must be 1, 2 or 3")
        x0, xf = self.bounds.q0[0], self.bounds.qf[0]
        if abs(xf - x0) < 1e-6:
            raise ValidationError(
                "endpoint x-coordinates are (nearly) equal; x cannot serve as the "
                "independent variable for this model")
        if abs(self.grid.x0 - x0) > 1e-12 or abs(self.grid.xf - xf) > 1e-12:
            raise ValidationError("grid endpoints must match the boundary states")
        self.model.diagonal_rates()  # solver formulas need a diagonal B

    @property
    def num_coefficients(self) -> int:
        return self.order if self.dimension == 2 else 2 * self.order


@dataclass(frozen=True)
class BasisCurve:
    """Trial curve: coefficients over the endpoint-pinned polynomial basis."""

    coefficients: np.ndarray
    x0: float
    xf: float
    y0: float
    yf: float
    z0: float | None = None
    zf: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           np.asarray(self.coefficients, dtype=float))

    @property
    def order(self) -> int:
        n = self.coefficients.size
        return n if self.z0 is None else n // 2


@dataclass
class Solution:
    """Converged coefficients plus diagnostics."""

    spec: ProblemSpec
    coefficients: np.ndarray
    nu: float
    elapsed_time: float
    energy: float
    objective_value: float
    profile: dict
    feasible: bool
    starts_used: int
    start_index: int
    stage: str = "stationarity"  # or "descent" (fallback protocol)


@dataclass
class TimeTrajectory:
    t: np.ndarray
    q: np.ndarray
    u: np.ndarray
    purity: np.ndarray


def basis_eval(i: int, x, x0: float, xf: float, y0: float, yf: float):
    """Value and derivative of the i-th basis function.

    i = 0 is the endpoint-interpolating line; i >= 1 are (x-x0)(x-xf)^i,
    which vanish at both endpoints."""
    x = np.asarray(x, dtype=float)
    if i == 0:
        slope = (yf - y0) / (xf - x0)
        return y0 + slope * (x - x0), np.broadcast_to(slope, x.shape).copy()
    value = (x - x0) * (x - xf) ** i
    deriv = (x - xf) ** i + i * (x - x0) * (x - xf) ** (i - 1)
    return value, deriv


def curve_eval(curve: BasisCurve, x):
    """Evaluate y, y' (and z, z' for spatial curves) at x."""
    c = curve.coefficients
    y, yp = basis_eval(0, x, curve.x0, curve.xf, curve.y0, curve.yf)
    m = curve.order
    for i in range(1, m + 1):
        v, d = basis_eval(i, x, curve.x0, curve.xf, curve.y0, curve.yf)
        y = y + c[i - 1] * v
        yp = yp + c[i - 1] * d
    if curve.z0 is None:
        return y, yp
    z, zp = basis_eval(0, x, curve.x0, curve.xf, curve.z0, curve.zf)
    for i in range(1, m + 1):
        v, d = basis_eval(i, x, curve.x0, curve.xf, curve.z0, curve.zf)
        z = z + c[m + i - 1] * v
        zp = zp + c[m + i - 1] * d
    return y, yp, z, zp


# ---------------------------------------------------------------------------
# pointwise Lagrangians and control recovery
# ---------------------------------------------------------------------------

def _coeffs(model: DissipationModel):
    a = model.diagonal_rates()
    return a, model.b


def lagrangian_time(q, qprime, model: DissipationModel) -> float:
    """dt/dx = (x + y y' [+ z z']) / f(q)."""
    q = _as_vec3(q)
    qprime = np.atleast_1d(np.asarray(qprime, dtype=float))
    f = purity_derivative(q, model)
    if abs(f) < _F_SINGULAR_TOL:
        raise SingularIntegrandError(
            f"purity derivative vanishes at x = {q[0]:.9g}", x=float(q[0]))
    num = q[0] + q[1] * qprime[0]
    if qprime.size > 1:
        num += q[2] * qprime[1]
    return float(num / f)


def control_from_slope_2d(q, yprime: float, model: DissipationModel) -> float:
    """u3 reproducing slope y' at q; inverse of dy/dx = (b2+a2 y+u x)/(b1+a1 x-u y)."""
    q = _as_vec3(q)
    a, b = _coeffs(model)
    x, y = q[0], q[1]
    denom = x + y * yprime
    if abs(denom) < _F_SINGULAR_TOL:
        raise SingularIntegrandError(
            f"x + y y' vanishes at x = {x:.9g}", x=float(x))
    return float(-(b[1] + a[1] * y - yprime * (b[0] + a[0] * x)) / denom)


def lagrangian_energy_2d(q, yprime: float, model: DissipationModel) -> float:
    """u^2 dt/dx, written directly in terms of the curve."""
    q = _as_vec3(q)
    a, b = _coeffs(model)
    x, y = q[0], q[1]
    num = x + y * yprime
    f = purity_derivative(q, model)
    if abs(num) < _F_SINGULAR_TOL or abs(f) < _F_SINGULAR_TOL:
        raise SingularIntegrandError(
            f"energy integrand is singular at x = {x:.9g}", x=float(x))
    return float((b[1] + a[1] * y - yprime * (b[0] + a[0] * x)) ** 2 / (num * f))


def _slope_system(q, yprime, zprime, model):
    """Linear system for u from y'(dx/dt) = dy/dt, z'(dx/dt) = dz/dt.

    Row r, column k: coefficient of u_k; right-hand side from the drift."""
    a, b = _coeffs(model)
    x, y, z = q
    rows = np.array([
        [z, yprime * z, -(yprime * y + x)],
        [-y, zprime * z + x, -zprime * y],
    ])
    rhs = np.array([
        (b[1] + a[1] * y) - yprime * (b[0] + a[0] * x),
        (b[2] + a[2] * z) - zprime * (b[0] + a[0] * x),
    ])
    return rows, rhs


def controls_from_slope_3d(q, yprime: float, zprime: float,
                           model: DissipationModel,
                           zeroed_control: int = 1) -> np.ndarray:
    """Recover the two active controls (the third is held at zero).

    Solves the 2x2 elimination of the slope equations; for zeroed_control = 1
    the determinant is x^2 + x y y' + x z z'.  The returned vector is
    sign-consistent with :func:`blochsteer.bloch.bloch_rhs`, so substituting
    it back reproduces (y', z') and forward integration retraces the curve."""
    q = _as_vec3(q)
    rows, rhs = _slope_system(q, yprime, zprime, model)
    keep = [k for k in range(3) if k != zeroed_control - 1]
    A = rows[:, keep]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < _F_SINGULAR_TOL:
        raise SingularIntegrandError(
            f"control elimination is singular at x = {q[0]:.9g}", x=float(q[0]))
    u = np.zeros(3)
    u[keep[0]] = (rhs[0] * A[1, 1] - A[0, 1] * rhs[1]) / det
    u[keep[1]] = (A[0, 0] * rhs[1] - rhs[0] * A[1, 0]) / det
    return u


def lagrangian_energy_3d(q, qprime, model: DissipationModel,
                         zeroed_control: int = 1) -> float:
    """|u|^2 dt/dx with one control zeroed."""
    q = _as_vec3(q)
    yprime, zprime = np.asarray(qprime, dtype=float)
    u = controls_from_slope_3d(q, yprime, zprime, model, zeroed_control)
    return float(u @ u) * lagrangian_time(q, (yprime, zprime), model)


# ---------------------------------------------------------------------------
# discretized functional
# ---------------------------------------------------------------------------

class _Discretization:
    """Everything about a spec that does not depend on the coefficients.

    Basis values are precomputed at the quadrature abscissae, so evaluating
    the functional for a batch of coefficient vectors reduces to two matrix
    products plus elementwise arithmetic."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.a, self.b = _coeffs(spec.model)
        self.xs = spec.grid.sample_points()
        self.weights = spec.grid.sample_weights()
        x0, xf = spec.grid.x0, spec.grid.xf
        m = spec.order
        d = self.xs - x0
        e = self.xs - xf
        self.phi = np.empty((self.xs.size, m))
        self.dphi = np.empty((self.xs.size, m))
        for i in range(1, m + 1):
            self.phi[:, i - 1] = d * e ** i
            self.dphi[:, i - 1] = e ** i + i * d * e ** (i - 1)
        q0, qf = spec.bounds.q0, spec.bounds.qf
        self.y_slope = (qf[1] - q0[1]) / (xf - x0)
        self.y_line = q0[1] + self.y_slope * d
        if spec.dimension == 3:
            self.z_slope = (qf[2] - q0[2]) / (xf - x0)
            self.z_line = q0[2] + self.z_slope * d
        self.node_slice = slice(0, None, 2)  # panel endpoints within xs

    def curves(self, C: np.ndarray):
        """Y, Y' (and Z, Z') for a batch of coefficient columns."""
        m = self.spec.order
        Y = self.y_line[:, None] + self.phi @ C[:m]
        Yp = self.y_slope + self.dphi @ C[:m]
        if self.spec.dimension == 2:
            return Y, Yp, None, None
        Z = self.z_line[:, None] + self.phi @ C[m:]
        Zp = self.z_slope + self.dphi @ C[m:]
        return Y, Yp, Z, Zp

    def terms(self, C: np.ndarray):
        a, b = self.a, self.b
        X = self.xs[:, None]
        Y, Yp, Z, Zp = self.curves(C)
        f = b[0] * X + a[0] * X ** 2 + b[1] * Y + a[1] * Y ** 2
        num = X + Y * Yp
        if Z is not None:
            f = f + b[2] * Z + a[2] * Z ** 2
            num = num + Z * Zp
        with np.errstate(divide="ignore", invalid="ignore"):
            dtdx = num / f
        bad = (np.abs(f) < _F_SINGULAR_TOL) | ~np.isfinite(dtdx) | (dtdx <= 0.0)
        return {"X": X, "Y": Y, "Yp": Yp, "Z": Z, "Zp": Zp,
                "f": f, "num": num, "dtdx": dtdx, "bad": bad}

    def controls(self, terms):
        """Control samples (U1, U2, U3) and the singularity mask."""
        a, b = self.a, self.b
        X, Y, Yp = terms["X"], terms["Y"], terms["Yp"]
        if self.spec.dimension == 2:
            num = terms["num"]
            with np.errstate(divide="ignore", invalid="ignore"):
                U3 = -((b[1] + a[1] * Y) - Yp * (b[0] + a[0] * X)) / num
            singular = (np.abs(num) < _F_SINGULAR_TOL) | ~np.isfinite(U3)
            zero = np.zeros_like(U3)
            return zero, zero.copy(), U3, singular
        Z, Zp = terms["Z"], terms["Zp"]
        drift = b[0] + a[0] * X
        r1 = (b[1] + a[1] * Y) - Yp * drift
        r2 = (b[2] + a[2] * Z) - Zp * drift
        cols = [Z, Yp * Z, -(Yp * Y + X), -Y, Zp * Z + X, -Zp * Y]
        keep = [k for k in range(3) if k != self.spec.zeroed_control - 1]
        A11, A12 = cols[keep[0]], cols[keep[1]]
        A21, A22 = cols[3 + keep[0]], cols[3 + keep[1]]
        det = A11 * A22 - A12 * A21
        with np.errstate(divide="ignore", invalid="ignore"):
            Ua = (r1 * A22 - A12 * r2) / det
            Ub = (A11 * r2 - r1 * A21) / det
        singular = (np.abs(det) < _F_SINGULAR_TOL) | ~np.isfinite(Ua) | ~np.isfinite(Ub)
        U = [np.zeros_like(det), np.zeros_like(det), np.zeros_like(det)]
        U[keep[0]] = Ua
        U[keep[1]] = Ub
        return U[0], U[1], U[2], singular

    def functional_batch(self, C: np.ndarray) -> np.ndarray:
        terms = self.terms(C)
        bad = terms["bad"]
        if self.spec.objective == "time":
            L = terms["dtdx"]
        else:
            U1, U2, U3, singular = self.controls(terms)
            bad = bad | singular
            L = (U1 ** 2 + U2 ** 2 + U3 ** 2) * terms["dtdx"]
        L = np.where(bad, 0.0, L)
        L = np.where(np.isfinite(L), L, 0.0)
        values = self.weights @ L
        n_bad = np.count_nonzero(bad, axis=0)
        return np.where(n_bad > 0, PENALTY_BASE + n_bad, values)

    def gradient(self, c: np.ndarray) -> np.ndarray:
        """Central finite differences of the functional, batched."""
        c = np.asarray(c, dtype=float)
        n = c.size
        h = _FD_STEP * np.maximum(1.0, np.abs(c))
        C = np.repeat(c[:, None], 2 * n, axis=1)
        idx = np.arange(n)
        C[idx, 2 * idx] += h
        C[idx, 2 * idx + 1] -= h
        F = self.functional_batch(C)
        return (F[0::2] - F[1::2]) / (2.0 * h)

    def residual(self, c: np.ndarray) -> float:
        # an infeasible center point must repel the stationarity search:
        # report the graded penalty itself, not the (flat) gradient of it
        center = float(self.functional_batch(np.asarray(c, dtype=float)[:, None])[0])
        if center >= PENALTY_BASE:
            return center
        return float(np.linalg.norm(self.gradient(c)))

    def costs(self, c: np.ndarray):
        """(t_f, E) for a feasible coefficient vector."""
        terms = self.terms(np.asarray(c, dtype=float)[:, None])
        U1, U2, U3, singular = self.controls(terms)
        if np.any(terms["bad"]) or np.any(singular):
            xs_bad = self.xs[(terms["bad"] | singular)[:, 0]]
            raise SingularIntegrandError(
                f"curve is infeasible at x = {xs_bad[0]:.9g}", x=float(xs_bad[0]))
        dtdx = terms["dtdx"][:, 0]
        usq = (U1 ** 2 + U2 ** 2 + U3 ** 2)[:, 0]
        return float(self.weights @ dtdx), float(self.weights @ (usq * dtdx))

    def feasible(self, c: np.ndarray) -> bool:
        terms = self.terms(np.asarray(c, dtype=float)[:, None])
        if np.any(terms["bad"]):
            return False
        _, _, _, singular = self.controls(terms)
        return not np.any(singular)

    def node_profile(self, c: np.ndarray) -> dict:
        """Per-node samples at the panel endpoints."""
        terms = self.terms(np.asarray(c, dtype=float)[:, None])
        U1, U2, U3, _ = self.controls(terms)
        s = self.node_slice
        profile = {
            "x": self.xs[s].copy(),
            "y": terms["Y"][s, 0],
            "yp": terms["Yp"][s, 0],
            "u1": U1[s, 0],
            "u2": U2[s, 0],
            "u3": U3[s, 0],
            "dtdx": terms["dtdx"][s, 0],
            "f": terms["f"][s, 0],
        }
        if self.spec.dimension == 3:
            profile["z"] = terms["Z"][s, 0]
            profile["zp"] = terms["Zp"][s, 0]
        return profile


def functional(spec: ProblemSpec, c) -> float:
    """Cost integral of the trial curve; penalty-valued when infeasible."""
    disc = _Discretization(spec)
    return float(disc.functional_batch(np.asarray(c, dtype=float)[:, None])[0])


def residual_nu(spec: ProblemSpec, c) -> float:
    """nu(c) = |grad_c I|_2; near-roots mark stationary trial curves."""
    return _Discretization(spec).residual(np.asarray(c, dtype=float))


def evaluate_costs(spec: ProblemSpec, c):
    """Elapsed time and control energy of a feasible curve, on the spec grid."""
    return _Discretization(spec).costs(np.asarray(c, dtype=float))


def solve(spec: ProblemSpec) -> Solution:
    """Multistart stationarity search.

    Each start draws coefficients uniformly from the l-infinity ball, then
    drives nu to a minimum with Nelder-Mead (re-seeded up to ``restarts``
    times, mirroring the usual fminsearch restart idiom).  Candidates must be
    feasible with nu below tolerance; the best objective value wins, ties
    resolved toward the lower start index.

    When no start converges, a fallback stage descends the cost functional
    directly and certifies the minimizers with a looser residual bound; the
    returned solution carries ``stage = "descent"`` in that case."""
    disc = _Discretization(spec)
    n = spec.num_coefficients
    config = spec.optimizer
    if config.max_iterations is None:
        config = OptimizerConfig(x_tolerance=config.x_tolerance,
                                 f_tolerance=config.f_tolerance,
                                 max_iterations=200 * n,
                                 initial_scale=config.initial_scale)
    master = RandomSource(spec.seed)
    candidates = []
    best_bad = (np.inf, None)
    for k in range(spec.multistart):
        c = sample_linf_ball(master.split(k), n, spec.start_radius)
        previous = np.inf
        result = None
        for _ in range(max(1, spec.restarts)):
            result = nelder_mead(disc.residual, c, config)
            c = result.x
            if result.fun < spec.nu_tolerance:
                break
            if result.fun > 0.7 * previous:
                break  # restarting the simplex has stopped paying off
            previous = result.fun
        nu = result.fun
        if nu < spec.nu_tolerance and disc.feasible(c):
            t_f, energy = disc.costs(c)
            value = t_f if spec.objective == "time" else energy
            candidates.append((value, k, c, nu, t_f, energy))
        elif nu < best_bad[0]:
            best_bad = (nu, c)
    stage = "stationarity"
    if not candidates:
        # Fallback: when no start reaches stationarity (some coefficient
        # spaces leave the gradient-norm landscape with only narrow, badly
        # conditioned valleys), descend the cost functional itself and then
        # polish the residual.  Feasible local minima of the cost are
        # stationary points, so a loose residual bound is enough to certify
        # them; the price is that this finds minimizers rather than the full
        # set of stationary curves.
        stage = "descent"
        fallback_tol = 100.0 * spec.nu_tolerance
        descent_config = OptimizerConfig(
            x_tolerance=config.x_tolerance, f_tolerance=config.f_tolerance,
            max_iterations=2 * config.max_iterations,
            initial_scale=config.initial_scale)

        def cost(c):
            return float(disc.functional_batch(
                np.asarray(c, dtype=float)[:, None])[0])

        for k in range(min(spec.multistart, max(4, spec.multistart // 4))):
            c = sample_linf_ball(master.split(k), n, spec.start_radius)
            descended = nelder_mead(cost, c, descent_config)
            polished = nelder_mead(disc.residual, descended.x, descent_config)
            c, nu = polished.x, polished.fun
            if nu < fallback_tol and disc.feasible(c):
                t_f, energy = disc.costs(c)
                value = t_f if spec.objective == "time" else energy
                candidates.append((value, k, c, nu, t_f, energy))
            elif nu < best_bad[0]:
                best_bad = (nu, c)
    if not candidates:
        raise NoConvergenceError(
            f"no feasible stationary curve after {spec.multistart} starts "
            f"(best nu = {best_bad[0]:.3e})",
            best_nu=best_bad[0], best_coefficients=best_bad[1])
    value, k, c, nu, t_f, energy = min(candidates, key=lambda t: (t[0], t[1]))
    return Solution(spec=spec, coefficients=c, nu=nu, elapsed_time=t_f,
                    energy=energy, objective_value=value,
                    profile=disc.node_profile(c), feasible=True,
                    starts_used=spec.multistart, start_index=k, stage=stage)


def forward_simulate(spec: ProblemSpec, solution: Solution,
                     steps_per_tf: int = 4000) -> TimeTrajectory:
    """Re-integrate the Bloch dynamics under the recovered control profile.

    The controls are monotone-cubic interpolants of the per-node samples in x
    and are held at their terminal values beyond the endpoint (the terminal
    control pins the final state as a near-fixed point).  Integration stops
    when x crosses the target abscissa."""
    from scipy.interpolate import PchipInterpolator

    q0 = _as_vec3(spec.bounds.q0)
    qf = _as_vec3(spec.bounds.qf)
    if np.linalg.norm(qf - q0) < 1e-12:
        return TimeTrajectory(t=np.zeros(1), q=q0[None, :].copy(),
                              u=np.zeros((1, 3)),
                              purity=np.array([0.5 * (1 + q0 @ q0)]))
    prof = solution.profile
    xs = prof["x"]
    sign = 1.0 if xs[-1] > xs[0] else -1.0
    xs_sorted = xs if sign > 0 else xs[::-1]
    lo, hi = xs_sorted[0], xs_sorted[-1]
    interps = []
    for name in ("u1", "u2", "u3"):
        samples = prof[name] if sign > 0 else prof[name][::-1]
        interps.append(PchipInterpolator(xs_sorted, samples, extrapolate=False))

    def control_at(x):
        xc = min(max(x, lo), hi)
        return np.array([float(f(xc)) for f in interps])

    def rhs(_, q):
        return bloch_rhs(q, control_at(q[0]), spec.model)

    t_f = solution.elapsed_time
    dt = t_f / steps_per_tf
    t, q = 0.0, q0.copy()
    ts, qs, us = [0.0], [q0.copy()], [control_at(q0[0])]
    target = qf[0]
    t_max = 3.0 * t_f
    reached = False
    while t < t_max:
        k1 = rhs(t, q)
        k2 = rhs(t, q + 0.5 * dt * k1)
        k3 = rhs(t, q + 0.5 * dt * k2)
        k4 = rhs(t, q + dt * k3)
        q_next = q + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t_next = t + dt
        if not np.all(np.isfinite(q_next)):
            raise SimulationError(f"state diverged at t = {t_next:.6g}")
        if sign * (q_next[0] - target) >= 0.0:
            # crossed the target abscissa inside this step: linear cut
            frac = (target - q[0]) / (q_next[0] - q[0])
            frac = min(max(frac, 0.0), 1.0)
            t = t + frac * dt
            q = q + frac * (q_next - q)
            ts.append(t)
            qs.append(q.copy())
            us.append(control_at(q[0]))
            reached = True
            break
        t, q = t_next, q_next
        ts.append(t)
        qs.append(q.copy())
        us.append(control_at(q[0]))
    if not reached:
        f_end = purity_derivative(q, spec.model)
        raise SimulationError(
            f"trajectory failed to reach x = {target:.6g} within t = {t_max:.4g} "
            f"(final x = {q[0]:.6g}, f(q) = {f_end:.3e})")
    qs = np.vstack(qs)
    return TimeTrajectory(t=np.asarray(ts), q=qs, u=np.vstack(us),
                          purity=0.5 * (1.0 + np.sum(qs ** 2, axis=1)))


def endpoint_controls(solution: Solution) -> np.ndarray:
    """Control vector at the terminal node of the recovered profile."""
    prof = solution.profile
    return np.array([prof["u1"][-1], prof["u2"][-1], prof["u3"][-1]])


def terminal_fixed_point(solution: Solution) -> np.ndarray:
    """Stationary state under the held terminal control: -(B + uhat)^-1 b."""
    from .chimney import fixed_point

    return fixed_point(solution.spec.model, endpoint_controls(solution))


def make_problem(model: DissipationModel, objective: str, order: int,
                 epsilon: float = 1e-3, delta: float = 1e-3,
                 grid_panels: int = 1000, multistart: int | None = None,
                 seed: int = 0, start_radius: float = 2.0,
                 zeroed_control: int = 1, nu_tolerance: float = 1e-4,
                 restarts: int = 3,
                 optimizer: OptimizerConfig | None = None) -> ProblemSpec:
    """Assemble a ProblemSpec from a model: apogee, endpoints, grid, defaults."""
    from .chimney import boundary_conditions, find_apogee

    geometry = find_apogee(model)
    bounds = boundary_conditions(geometry, epsilon, delta)
    if multistart is None:
        multistart = 25 if model.dimension == 2 else 50
    grid = Grid(x0=float(bounds.q0[0]), xf=float(bounds.qf[0]),
                n_panels=grid_panels)
    return ProblemSpec(model=model, dimension=model.dimension,
                       objective=objective, bounds=bounds, order=order,
                       grid=grid, multistart=multistart, seed=seed,
                       start_radius=start_radius, zeroed_control=zeroed_control,
                       nu_tolerance=nu_tolerance, restarts=restarts,
                       optimizer=optimizer or OptimizerConfig())
