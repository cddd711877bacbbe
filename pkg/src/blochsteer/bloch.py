"""Two-level open-system dynamics and its Bloch-ball representation.

A two-level density matrix is identified with a point q of the closed unit
ball via rho = (I + q . sigma)/2.  Markovian dissipation described by
traceless jump operators {L_j} maps onto an affine drift

    dq/dt = b + B q + u x q,        B = A - tr(A) I,

with A and b built from the Pauli coefficients of the L_j.  This module
provides both right-hand sides (density-matrix and Bloch-vector form) so the
conversion can be cross-validated numerically.

Conventions, fixed once for the whole package:

* Jump-operator coefficients live in the orthonormal Pauli basis:
  l_k = tr(sigma_k L)/sqrt(2), i.e. L = sum_k l_k sigma_k/sqrt(2).
* Hamiltonian control coefficients use H = h0 I + (1/2) sum_k u_k sigma_k,
  i.e. u_k = tr(sigma_k H).  Only the traceless part of H moves the state.
* The cross product u x q is the ordinary right-handed one.

With these normalizations the two right-hand sides agree exactly; the
half-trace coefficient convention would leave a global factor of two between
them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, ValidationError

SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)

_HERMITICITY_TOL = 1e-12
_DISCARD_TOL = 1e-12   # imaginary residue silently dropped below this
_RESIDUE_TOL = 1e-9    # imaginary residue treated as an implementation bug above this


def _as_vec3(q) -> np.ndarray:
    """Coerce a length-2 or length-3 array-like to a real 3-vector."""
    v = np.asarray(q, dtype=float)
    if v.shape == (2,):
        v = np.array([v[0], v[1], 0.0])
    if v.shape != (3,):
        raise ValidationError(f"expected a 2- or 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class LindbladOperator:
    """A traceless 2x2 jump operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"jump operator must be 2x2, got {m.shape}")
        residual = abs(m[0, 0] + m[1, 1])
        if residual > _HERMITICITY_TOL:
            raise ValidationError(
                f"jump operator must be traceless; |trace| = {residual:.3e}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class HamiltonianControl:
    """Control Hamiltonian H = h0 I + (1/2) sum_k u_k sigma_k.

    h0 is retained for completeness but never influences the dynamics."""

    h0: float = 0.0
    u: np.ndarray = None

    def __post_init__(self):
        u = np.zeros(3) if self.u is None else np.asarray(self.u, dtype=float)
        if u.shape != (3,):
            raise ValidationError(f"control vector must have 3 components, got {u.shape}")
        if not np.all(np.isfinite(u)) or not np.isfinite(self.h0):
            raise ValidationError("control coefficients must be finite")
        object.__setattr__(self, "u", u)

    def matrix(self) -> np.ndarray:
        return self.h0 * IDENTITY_2 + 0.5 * sum(
            uk * sk for uk, sk in zip(self.u, PAULI))


@dataclass(frozen=True)
class DensityMatrix:
    """A physical two-level state: Hermitian, unit trace, PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError(f"density matrix must be 2x2, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _HERMITICITY_TOL:
            raise ValidationError("density matrix must be Hermitian")
        if abs(m[0, 0] + m[1, 1] - 1.0) > _HERMITICITY_TOL:
            raise ValidationError("density matrix must have unit trace")
        if np.min(np.linalg.eigvalsh(m)) < -_HERMITICITY_TOL:
            raise ValidationError("density matrix must be positive semi-definite")
        object.__setattr__(self, "matrix", m)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class BlochVector:
    """A point of the closed unit ball (planar points are padded with z=0)."""

    q: np.ndarray

    def __post_init__(self):
        v = _as_vec3(self.q)
        if np.linalg.norm(v) > 1.0 + 1e-9:
            raise ValidationError(
                f"Bloch vector has norm {np.linalg.norm(v):.6f} > 1")
        object.__setattr__(self, "q", v)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.q, dtype=dtype)

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.q))


@dataclass(frozen=True)
class DissipationModel:
    """The affine drift (b, B) of the Bloch-ball dynamics.

    ``A`` is the positive semi-definite attenuation matrix when the model was
    built from jump operators, and None when (B, b) were supplied directly.
    ``dimension`` is 2 for planar reductions (third row/column of B and b
    zeroed); the planar solvers then act on the (x, y) slice.
    """

    A: np.ndarray | None
    b: np.ndarray
    B: np.ndarray
    dimension: int = 3

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if b.shape != (3,) or B.shape != (3, 3):
            raise ValidationError("drift must consist of a 3-vector and a 3x3 matrix")
        if np.max(np.abs(B - B.T)) > 1e-9:
            raise ValidationError("drift matrix B must be symmetric")
        if self.dimension not in (2, 3):
            raise ValidationError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.dimension == 2:
            if np.max(np.abs(B[2, :])) > 0 or np.max(np.abs(B[:, 2])) > 0 or b[2] != 0:
                raise ValidationError(
                    "planar models must have the third row/column of B and b[2] zeroed")
        A = self.A
        if A is not None:
            A = np.asarray(A, dtype=float)
            if np.max(np.abs(A - A.T)) > 1e-9:
                raise ValidationError("attenuation matrix A must be symmetric")
            if np.min(np.linalg.eigvalsh(A)) < -1e-12:
                raise ValidationError("attenuation matrix A must be positive semi-definite")
            if np.max(np.abs(B - (A - np.trace(A) * np.eye(3)))) > 1e-12:
                raise ValidationError("B must equal A - tr(A) I")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "B", B)

    @classmethod
    def from_attenuation(cls, A, b) -> "DissipationModel":
        A = np.asarray(A, dtype=float)
        B = A - np.trace(A) * np.eye(3)
        return cls(A=A, b=np.asarray(b, dtype=float), B=B)

    @classmethod
    def from_drift(cls, B, b, dimension=3) -> "DissipationModel":
        """Build a model directly from (B, b), skipping the attenuation matrix."""
        return cls(A=None, b=_as_vec3(b), B=np.asarray(B, dtype=float),
                   dimension=dimension)

    @classmethod
    def planar(cls, a, b) -> "DissipationModel":
        """Planar shorthand: B = diag(a1, a2, 0), b = (b1, b2, 0)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != (2,) or b.shape != (2,):
            raise ValidationError("planar shorthand takes a = [a1, a2], b = [b1, b2]")
        return cls.from_drift(np.diag([a[0], a[1], 0.0]), [b[0], b[1], 0.0],
                              dimension=2)

    @classmethod
    def from_lindblad(cls, operators) -> "DissipationModel":
        ls = [pauli_decompose(op) for op in operators]
        return build_dissipation(ls)

    def diagonal_rates(self) -> np.ndarray:
        """The diagonal (a1, a2, a3) of B; raises when B is not diagonal."""
        off = self.B - np.diag(np.diagonal(self.B))
        if np.max(np.abs(off)) > 1e-12:
            raise ValidationError(
                "B is not diagonal; rotate the model to principal axes first")
        return np.diagonal(self.B).copy()


def require_contracting(model: DissipationModel, tol: float = -1e-10) -> None:
    """Demand that the active block of B be strictly negative definite.

    The chimney geometry and the variational solvers divide by <q, B q>, so a
    zero eigenvalue of B is a hard error rather than a silent degeneracy.
    """
    d = model.dimension
    top = np.max(np.linalg.eigvalsh(model.B[:d, :d]))
    if top > tol:
        raise ValidationError(
            f"B must be strictly negative definite on the active {d}x{d} block; "
            f"largest eigenvalue {top:.3e}")


def pauli_decompose(operator) -> np.ndarray:
    """Coefficients of a traceless 2x2 operator in the orthonormal Pauli basis.

    Returns l with l_k = tr(sigma_k L)/sqrt(2), so L = sum l_k sigma_k/sqrt(2).
    """
    if isinstance(operator, LindbladOperator):
        m = operator.matrix
    else:
        m = np.asarray(operator, dtype=complex)
        residual = abs(m[0, 0] + m[1, 1])
        if residual > _HERMITICITY_TOL:
            raise ValidationError(
                f"operator must be traceless; |trace| = {residual:.3e}")
    return np.array([np.trace(s @ m) for s in PAULI]) / np.sqrt(2.0)


def pauli_reconstruct(l) -> np.ndarray:
    """Inverse of :func:`pauli_decompose`."""
    l = np.asarray(l, dtype=complex)
    return sum(lk * sk for lk, sk in zip(l, PAULI)) / np.sqrt(2.0)


def build_dissipation(ls) -> DissipationModel:
    """Assemble (A, b, B) from jump-operator coefficient vectors.

    A = (1/2) sum_j (l_j conj(l_j)^T + conj(l_j) l_j^T),  b = i sum_j l_j x conj(l_j).
    """
    ls = [np.asarray(l, dtype=complex) for l in ls]
    if not ls:
        raise ValidationError("at least one coefficient vector is required")
    A = np.zeros((3, 3), dtype=complex)
    b = np.zeros(3, dtype=complex)
    for l in ls:
        lbar = l.conj()
        A += 0.5 * (np.outer(l, lbar) + np.outer(lbar, l))
        b += 1j * np.cross(l, lbar)
    residue = max(np.max(np.abs(A.imag)), np.max(np.abs(b.imag)))
    if residue > _RESIDUE_TOL:
        raise InternalConsistencyError(
            f"imaginary residue {residue:.3e} in (A, b); complex arithmetic is broken")
    if residue > _DISCARD_TOL:
        # between the discard and error thresholds: rounding noise, drop it
        pass
    return DissipationModel.from_attenuation(A.real, b.real)


def bloch_rhs(q, u, model: DissipationModel) -> np.ndarray:
    """dq/dt = b + B q + u x q."""
    q = _as_vec3(q)
    u = _as_vec3(u)
    return model.b + model.B @ q + np.cross(u, q)


def lindblad_rhs(rho, hamiltonian, operators) -> np.ndarray:
    """drho/dt = [-iH, rho] + sum_j (L rho L+ - {L+L, rho}/2)."""
    if isinstance(rho, DensityMatrix):
        rho = rho.matrix
    rho = np.asarray(rho, dtype=complex)
    if isinstance(hamiltonian, HamiltonianControl):
        H = hamiltonian.matrix()
    else:
        H = np.asarray(hamiltonian, dtype=complex)
    out = -1j * (H @ rho - rho @ H)
    for op in operators:
        L = op.matrix if isinstance(op, LindbladOperator) else np.asarray(op, dtype=complex)
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def density_from_bloch(q) -> DensityMatrix:
    """rho = (I + q . sigma)/2."""
    q = _as_vec3(q)
    m = 0.5 * (IDENTITY_2 + sum(qk * sk for qk, sk in zip(q, PAULI)))
    return DensityMatrix(m)


def bloch_from_density(rho) -> np.ndarray:
    """q_k = tr(sigma_k rho).  Accepts any Hermitian 2x2 matrix, so it also
    maps (traceless) time derivatives of density matrices."""
    if isinstance(rho, DensityMatrix):
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValidationError("input matrix is not Hermitian")
    return np.array([np.trace(s @ m).real for s in PAULI])


def purity(q) -> float:
    """P2 = (1 + |q|^2)/2."""
    q = _as_vec3(q)
    return 0.5 * (1.0 + float(q @ q))


def principal_axes(model: DissipationModel):
    """Rotate a model so that B becomes diagonal with descending eigenvalues.

    Returns (rotated_model, R) with q_new = R q_old.  The rotation is fixed
    deterministically by making each eigenvector's largest-magnitude component
    positive and forcing det(R) = +1.
    """
    w, V = np.linalg.eigh(model.B)
    order = np.argsort(w)[::-1]
    V = V[:, order]
    for j in range(3):
        k = np.argmax(np.abs(V[:, j]))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    if np.linalg.det(V) < 0:
        V[:, 2] = -V[:, 2]
    R = V.T
    B_new = R @ model.B @ R.T
    B_new = 0.5 * (B_new + B_new.T)
    b_new = R @ model.b
    A_new = None if model.A is None else R @ model.A @ R.T
    if A_new is None:
        rotated = DissipationModel.from_drift(B_new, b_new, dimension=model.dimension)
    else:
        rotated = DissipationModel.from_attenuation(0.5 * (A_new + A_new.T), b_new)
    return rotated, R
