"""Exact linear algebra on the permutation-symmetric (Dicke) subspace.

An ensemble of N qubits restricted to its symmetric sector is an
(N+1)-dimensional space labelled by the excitation number k (number of
qubits in |e>, the sigma_z = +1 state).  The collective spin has j = N/2
and J_z eigenvalue m = k - N/2, so J_z is diagonal ascending in k.

Matrices here are dense; callers that need to scale to large N use the
matrix-free ``apply_*`` helpers instead of forming operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, ValidationError

NORM_TOL = 1e-12
UNIT_AXIS_TOL = 1e-12
ANTIHERMITIAN_TOL = 1e-10


def as_unit_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise ValidationError(f"axis must be a 3-vector, got shape {axis.shape}")
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > UNIT_AXIS_TOL:
        raise ValidationError(f"axis must be unit length within {UNIT_AXIS_TOL}, |axis| = {norm}")
    return axis


@dataclass(frozen=True)
class DickeState:
    """Symmetric N-qubit pure state: amplitudes c_k over excitation number k."""

    n_qubits: int
    amplitudes: np.ndarray
    normalization_defect: float = 0.0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be >= 1")
        if self.amplitudes.shape != (self.n_qubits + 1,):
            raise DimensionMismatchError(
                f"expected {self.n_qubits + 1} amplitudes, got {self.amplitudes.shape}"
            )
        self.amplitudes.flags.writeable = False

    @classmethod
    def from_amplitudes(cls, n_qubits: int, amplitudes) -> "DickeState":
        """Normalizing constructor; records how far the input was from unit norm."""
        amps = np.asarray(amplitudes, dtype=complex).copy()
        if not np.all(np.isfinite(amps.view(float))):
            raise ValidationError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(n_qubits, amps / norm, normalization_defect=abs(norm - 1.0))

    @property
    def dim(self) -> int:
        return self.n_qubits + 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class CollectiveOperator:
    """Dense collective-spin operator in the Dicke basis."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.flags.writeable = False


@dataclass(frozen=True)
class CollectiveOps:
    x: CollectiveOperator
    y: CollectiveOperator
    z: CollectiveOperator
    plus: CollectiveOperator
    minus: CollectiveOperator


def jz_eigenvalues(n_qubits: int) -> np.ndarray:
    """m_k = k - N/2 for k = 0..N."""
    return np.arange(n_qubits + 1, dtype=float) - n_qubits / 2.0


def ladder_up_coeffs(n_qubits: int) -> np.ndarray:
    """<k+1|J_+|k> = sqrt((N-k)(k+1)) for k = 0..N-1."""
    k = np.arange(n_qubits, dtype=float)
    return np.sqrt((n_qubits - k) * (k + 1.0))


def build_collective_ops(n_qubits: int) -> CollectiveOps:
    """Dense J_x, J_y, J_z, J_+, J_- on the (N+1)-dimensional Dicke space."""
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    m = jz_eigenvalues(n_qubits)
    c = ladder_up_coeffs(n_qubits)
    jz = np.diag(m).astype(complex)
    jp = np.diag(c, -1).astype(complex)
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    wrap = lambda mat: CollectiveOperator(n_qubits, mat)
    return CollectiveOps(wrap(jx), wrap(jy), wrap(jz), wrap(jp), wrap(jm))


# Matrix-free applications, used on amplitude arrays directly so moment
# extraction stays O(N) for N up to ~1e5.

def apply_jz(amps: np.ndarray) -> np.ndarray:
    return jz_eigenvalues(len(amps) - 1) * amps


def apply_jplus(amps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    out[1:] = ladder_up_coeffs(len(amps) - 1) * amps[:-1]
    return out


def apply_jminus(amps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(amps)
    out[:-1] = ladder_up_coeffs(len(amps) - 1) * amps[1:]
    return out


def apply_jx(amps: np.ndarray) -> np.ndarray:
    return (apply_jplus(amps) + apply_jminus(amps)) / 2.0


def apply_jy(amps: np.ndarray) -> np.ndarray:
    return (apply_jplus(amps) - apply_jminus(amps)) / 2.0j


def unitary_exp(generator: np.ndarray) -> np.ndarray:
    """exp(G) for anti-Hermitian G, via Hermitian eigendecomposition of iG."""
    g = np.asarray(generator, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValidationError("generator must be square")
    scale = max(1.0, float(np.max(np.abs(g))))
    defect = float(np.max(np.abs(g + g.conj().T)))
    if defect > ANTIHERMITIAN_TOL * scale:
        raise ValidationError(
            f"generator is not anti-Hermitian: max|G + G^dag| = {defect}"
        )
    h = 1.0j * g  # Hermitian
    evals, evecs = scipy.linalg.eigh(h)
    return (evecs * np.exp(-1.0j * evals)) @ evecs.conj().T


def axis_dot_j(n_qubits: int, axis) -> np.ndarray:
    """Dense n . J for a unit 3-vector n = (n_x, n_y, n_z)."""
    axis = as_unit_axis(axis)
    m = jz_eigenvalues(n_qubits)
    c = ladder_up_coeffs(n_qubits)
    mat = np.diag(axis[2] * m).astype(complex)
    # J_x, J_y contributions live on the first off-diagonals.
    off = 0.5 * (axis[0] - 1.0j * axis[1]) * c
    mat += np.diag(off, -1)
    mat += np.diag(off.conj(), 1)
    return mat


def rotation_unitary(n_qubits: int, axis, angle: float) -> np.ndarray:
    """exp(-i * angle * (axis . J)) on the Dicke space."""
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    jn = axis_dot_j(n_qubits, axis)
    return unitary_exp(-1.0j * float(angle) * jn)


def inner(a: DickeState, b: DickeState) -> complex:
    """<a|b> = sum_k conj(a_k) b_k."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"states live on {a.n_qubits} and {b.n_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))
