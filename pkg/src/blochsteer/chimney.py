"""Geometry of the purity-growth region.

The purity derivative f(q) = <q, b + Bq> is independent of the controls, so
the region U = {f >= 0} ("escape chimney") bounds what any control can
achieve.  Its boundary ellipsoid has radial graph g(qhat) = -<qhat,b>/<qhat,B qhat>
over the unit sphere; the apogee -- the point of U with maximal norm -- is the
state of maximal achievable purity and the target of the steering problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import DissipationModel, _as_vec3, bloch_rhs, require_contracting
from .errors import NoChimneyError, ValidationError
from .numerics import OptimizerConfig, nelder_mead

_APOGEE_STARTS = 16


@dataclass(frozen=True)
class ChimneyGeometry:
    model: DissipationModel
    apogee: np.ndarray
    apogee_radius: float

    def max_purity(self) -> float:
        return 0.5 * (1.0 + self.apogee_radius ** 2)


@dataclass(frozen=True)
class BoundaryConditions:
    """Endpoints of the steering problem: q0 = eps b/|b|, qf = (1-delta) apogee."""

    q0: np.ndarray
    qf: np.ndarray
    epsilon: float
    delta: float


def purity_derivative(q, model: DissipationModel) -> float:
    """f(q) = <q, b + Bq>; the control-independent rate r dr/dt."""
    q = _as_vec3(q)
    return float(q @ (model.b + model.B @ q))


def in_chimney(q, model: DissipationModel) -> bool:
    return purity_derivative(q, model) >= 0.0


def radial_root(qhat, model: DissipationModel) -> float:
    """Nonzero root g(qhat) of f(r qhat) = <qhat,B qhat> r^2 + <qhat,b> r."""
    qhat = _as_vec3(qhat)
    if abs(np.linalg.norm(qhat) - 1.0) > 1e-10:
        raise ValidationError(f"direction must be unit length, got |q| = {np.linalg.norm(qhat):.12f}")
    denom = float(qhat @ (model.B @ qhat))
    if denom >= 0.0:
        raise ValidationError(
            f"<qhat, B qhat> = {denom:.3e} >= 0: dissipation is degenerate along qhat")
    return -float(qhat @ model.b) / denom


def _unit_from_angles(angles, dimension):
    if dimension == 2:
        (theta,) = angles
        return np.array([np.cos(theta), np.sin(theta), 0.0])
    phi, theta = angles  # polar, azimuth
    s = np.sin(phi)
    return np.array([s * np.cos(theta), s * np.sin(theta), np.cos(phi)])


def _grid_scan(model: DissipationModel):
    """Dense angular scan of g; the certification oracle for the apogee search."""
    b, B = model.b, model.B
    if model.dimension == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, 2000, endpoint=False)
        qs = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
    else:
        phi = np.linspace(0.0, np.pi, 180)
        theta = np.linspace(0.0, 2.0 * np.pi, 360, endpoint=False)
        P, T = np.meshgrid(phi, theta, indexing="ij")
        s = np.sin(P)
        qs = np.column_stack([(s * np.cos(T)).ravel(),
                              (s * np.sin(T)).ravel(),
                              np.cos(P).ravel()])
    num = qs @ b
    den = np.einsum("ij,jk,ik->i", qs, B, qs)
    g = -num / den
    return qs, g


def find_apogee(model: DissipationModel) -> ChimneyGeometry:
    """Maximize g over the unit sphere (circle for planar models).

    Nelder-Mead polish from evenly spaced angular starts, certified against a
    dense grid scan.  When symmetric maxima tie, the lexicographically largest
    point wins, so the output is deterministic.
    """
    require_contracting(model)
    bnorm = np.linalg.norm(model.b[:model.dimension])
    if bnorm == 0.0:
        raise NoChimneyError("b = 0: the chimney degenerates to the origin")

    def neg_g(angles):
        qhat = _unit_from_angles(angles, model.dimension)
        return float(qhat @ model.b) / float(qhat @ (model.B @ qhat))

    config = OptimizerConfig(x_tolerance=1e-12, f_tolerance=1e-14,
                             max_iterations=2000)
    if model.dimension == 2:
        starts = [(t,) for t in np.linspace(0.0, 2.0 * np.pi, _APOGEE_STARTS,
                                            endpoint=False)]
    else:
        polar = np.linspace(np.pi / 4, 3 * np.pi / 4, 2)
        azim = np.linspace(0.0, 2.0 * np.pi, _APOGEE_STARTS // 2, endpoint=False)
        starts = [(p, t) for p in polar for t in azim]

    candidates = []
    for s in starts:
        result = nelder_mead(neg_g, np.asarray(s, dtype=float), config)
        candidates.append((-result.fun, _unit_from_angles(result.x, model.dimension)))
    g_best = max(g for g, _ in candidates)
    # resolve near-ties toward the lexicographically largest apogee point
    tied = [qhat for g, qhat in candidates if g >= g_best - 1e-9]
    points = sorted((tuple(np.round(g_best * qh, 12)) for qh in tied), reverse=True)
    apogee = np.array(points[0])

    qs, g_grid = _grid_scan(model)
    grid_max = float(np.max(g_grid))
    if g_best < grid_max - 1e-6:
        raise ValidationError(
            f"apogee search (g = {g_best:.8f}) fell below the grid oracle ({grid_max:.8f})")
    radius = float(np.linalg.norm(apogee))
    if radius > 1.0 + 1e-6:
        raise ValidationError(
            f"apogee radius {radius:.6f} exceeds the Bloch ball; the model is invalid")
    return ChimneyGeometry(model=model, apogee=apogee, apogee_radius=radius)


def boundary_conditions(geometry: ChimneyGeometry, epsilon: float,
                        delta: float) -> BoundaryConditions:
    if epsilon <= 0.0 or delta <= 0.0:
        raise ValidationError("epsilon and delta must be positive")
    if delta >= 1.0:
        raise ValidationError("delta must be below 1; qf = (1 - delta) * apogee")
    model = geometry.model
    bnorm = np.linalg.norm(model.b)
    q0 = epsilon * model.b / bnorm
    qf = (1.0 - delta) * geometry.apogee
    if purity_derivative(q0, model) <= 0.0:
        raise ValidationError(
            f"q0 for epsilon = {epsilon} is not strictly inside the chimney")
    return BoundaryConditions(q0=q0, qf=qf, epsilon=float(epsilon), delta=float(delta))


def cross_matrix(u) -> np.ndarray:
    """The matrix uhat with uhat q = u x q."""
    u = _as_vec3(u)
    return np.array([[0.0, -u[2], u[1]],
                     [u[2], 0.0, -u[0]],
                     [-u[1], u[0], 0.0]])


def fixed_point(model: DissipationModel, u) -> np.ndarray:
    """Stationary state q* = -(B + uhat)^-1 b under constant control u.

    Planar models require u1 = u2 = 0 and solve on the active 2x2 block."""
    u = _as_vec3(u)
    M = model.B + cross_matrix(u)
    if model.dimension == 2:
        if abs(u[0]) > 0 or abs(u[1]) > 0:
            raise ValidationError("planar models admit only the u3 control")
        block = M[:2, :2]
        try:
            xy = np.linalg.solve(block, -model.b[:2])
        except np.linalg.LinAlgError as exc:
            raise ValidationError(f"B + uhat is singular: {exc}") from exc
        q = np.array([xy[0], xy[1], 0.0])
    else:
        try:
            q = np.linalg.solve(M, -model.b)
        except np.linalg.LinAlgError as exc:
            raise ValidationError(f"B + uhat is singular: {exc}") from exc
    residual = np.max(np.abs(bloch_rhs(q, u, model)))
    if residual > 1e-10 * max(1.0, np.max(np.abs(model.b))):
        raise ValidationError(f"fixed-point residual {residual:.3e} too large")
    return q
