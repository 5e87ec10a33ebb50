"""Probe-state factory: coherent, twisted (OAT/TAT), cat, and GHZ states.

All constructors return normalized :class:`~spinsense.dicke.DickeState`
vectors.  Binomial weights are evaluated in the log domain so coherent
amplitudes stay finite up to N ~ 1e5.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .dicke import DickeState, jz_eigenvalues, unitary_exp
from .errors import DegenerateCatError, ValidationError

StateKind = Literal["coherent", "oat", "tat", "cat", "ghz"]

OAT_UNIT_MODULUS_TOL = 1e-9
TAT_MAX_QUBITS = 4000  # dense sector eigendecomposition stays desk-scale


def log_binomial(n: int, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _coherent_amplitudes(z: complex, n_qubits: int) -> np.ndarray:
    """c_k = sqrt(C(N,k)) z^k (1+|z|^2)^(-N/2), evaluated via logs."""
    k = np.arange(n_qubits + 1, dtype=float)
    if z == 0:
        amps = np.zeros(n_qubits + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = (
        0.5 * log_binomial(n_qubits, k)
        + k * np.log(abs(z))
        - 0.5 * n_qubits * np.log1p(abs(z) ** 2)
    )
    phase = k * np.angle(z)
    # Shift by the peak so exp() cannot overflow; renormalize afterwards.
    log_mag -= log_mag.max()
    amps = np.exp(log_mag) * np.exp(1.0j * phase)
    return amps / np.linalg.norm(amps)


def spin_coherent(z: complex, n_qubits: int) -> DickeState:
    """Product state ((|g> + z|e>)/sqrt(1+|z|^2))^(x N) in the Dicke basis."""
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    z = complex(z)
    if not np.isfinite(z.real) or not np.isfinite(z.imag):
        raise ValidationError("z must be finite")
    return DickeState.from_amplitudes(n_qubits, _coherent_amplitudes(z, n_qubits))


def oat_state(z: complex, chi: float, n_qubits: int) -> DickeState:
    """One-axis twisted state exp(-i chi J_z^2)|z,N> with |z| = 1."""
    z = complex(z)
    if abs(abs(z) - 1.0) > OAT_UNIT_MODULUS_TOL:
        raise ValidationError(f"one-axis twisting requires |z| = 1, got |z| = {abs(z)}")
    if not np.isfinite(chi):
        raise ValidationError("chi must be finite")
    seed = spin_coherent(z, n_qubits)
    m = jz_eigenvalues(n_qubits)
    return DickeState.from_amplitudes(n_qubits, np.exp(-1.0j * chi * m**2) * seed.amplitudes)


@lru_cache(maxsize=4)
def _tat_even_sector(n_qubits: int):
    """Eigendecomposition of the TAT generator restricted to even excitation.

    J_+^2 - J_-^2 is real antisymmetric and couples k to k +/- 2 only, so
    exp(chi (J_+^2 - J_-^2)) acting on |0,N> lives in the even-k sector.
    With D = diag(i^j) the compressed i(J_+^2 - J_-^2) becomes a real
    symmetric tridiagonal matrix, which is cheap to diagonalize once per N.
    """
    ks = np.arange(0, n_qubits + 1, 2)
    # <k+2| J_+^2 |k> = sqrt((N-k)(k+1)(N-k-1)(k+2))
    kk = ks[:-1].astype(float)
    b = np.sqrt(
        (n_qubits - kk) * (kk + 1.0) * (n_qubits - kk - 1.0) * (kk + 2.0)
    )
    b = b[kk + 2 <= n_qubits]
    diag = np.zeros(len(ks))
    evals, evecs = scipy.linalg.eigh_tridiagonal(diag, -b)
    d_phase = 1.0j ** np.arange(len(ks))
    return ks, evals, evecs, d_phase


def tat_state(chi: float, n_qubits: int) -> DickeState:
    """Two-axis twisted state exp(chi (J_+^2 - J_-^2))|0,N>."""
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    if not np.isfinite(chi):
        raise ValidationError("chi must be finite")
    if n_qubits > TAT_MAX_QUBITS:
        raise ValidationError(
            f"tat_state is limited to N <= {TAT_MAX_QUBITS} (dense matrix exponential)"
        )
    ks, evals, evecs, d_phase = _tat_even_sector(n_qubits)
    v0 = evecs[0, :]  # V^T e_0;  D e_0 = e_0
    compressed = d_phase.conj() * (evecs @ (np.exp(-1.0j * chi * evals) * v0))
    amps = np.zeros(n_qubits + 1, dtype=complex)
    amps[ks] = compressed
    return DickeState.from_amplitudes(n_qubits, amps)


def tat_generator(chi: float, n_qubits: int) -> np.ndarray:
    """Dense chi (J_+^2 - J_-^2); anti-Hermitian, for cross-checks."""
    c = np.sqrt(
        (n_qubits - np.arange(n_qubits, dtype=float))
        * (np.arange(n_qubits, dtype=float) + 1.0)
    )
    jp = np.diag(c, -1).astype(complex)
    jp2 = jp @ jp
    return chi * (jp2 - jp2.conj().T)


def tat_state_dense(chi: float, n_qubits: int) -> DickeState:
    """Reference TAT construction through the generic unitary exponential."""
    u = unitary_exp(tat_generator(chi, n_qubits))
    amps = u[:, 0].copy()
    return DickeState.from_amplitudes(n_qubits, amps)


def spin_cat(z: complex, n_qubits: int) -> DickeState:
    """Superposition of |0,N> and |z,N>, normalized with the exact overlap.

    The asymptotic 1/sqrt(2) prefactor is only correct once <0,N|z,N>
    vanishes; small-N tests need the exact norm.
    """
    z = complex(z)
    if z == 0:
        raise DegenerateCatError("z = 0 collapses the cat onto a single branch")
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    ground = _coherent_amplitudes(0.0, n_qubits)
    excited = _coherent_amplitudes(z, n_qubits)
    return DickeState.from_amplitudes(n_qubits, ground + excited)


def ghz_state(n_qubits: int) -> DickeState:
    """(|0,N> + |N,N>)/sqrt(2): equal superposition of all-ground and all-excited."""
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")
    amps = np.zeros(n_qubits + 1, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return DickeState.from_amplitudes(n_qubits, amps)


@dataclass(frozen=True)
class StateSpec:
    """Declarative probe-state description, as used by sweep configs."""

    kind: StateKind
    n_qubits: int
    z: complex = 1.0 + 0.0j
    chi: Optional[float] = None

    def __post_init__(self):
        z = complex(self.z)
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            raise ValidationError("z must be finite")
        if self.chi is not None and not np.isfinite(self.chi):
            raise ValidationError("chi must be finite")
        if self.kind in ("oat", "tat") and self.chi is None:
            raise ValidationError(f"{self.kind} state requires chi")

    def build(self) -> DickeState:
        if self.kind == "coherent":
            return spin_coherent(self.z, self.n_qubits)
        if self.kind == "oat":
            return oat_state(self.z, self.chi, self.n_qubits)
        if self.kind == "tat":
            return tat_state(self.chi, self.n_qubits)
        if self.kind == "cat":
            return spin_cat(self.z, self.n_qubits)
        if self.kind == "ghz":
            return ghz_state(self.n_qubits)
        raise ValidationError(f"unknown state kind {self.kind!r}")
