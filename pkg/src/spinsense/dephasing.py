"""Independent per-qubit dephasing and exact collective moments.

The noise channel multiplies single-qubit coherences (in the eigenbasis of
axis . sigma) by a decay factor d(t); populations are untouched.  Because a
permutation-symmetric state is fully described at the one- and two-body
level by its reduced density matrices, first and second collective moments
of the dephased, field-rotated ensemble follow exactly from the 2x2 and
4x4 RDMs -- no 2^N object is ever formed.

The field rotation exp(-i w t J_n) acts on moment tensors through the
adjoint SO(3) rotation R(w t) about n, which also gives analytic
w-derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from scipy.special import gammaln

from .dicke import (
    DickeState,
    apply_jx,
    apply_jy,
    apply_jz,
    as_unit_axis,
)
from .errors import (
    DimensionMismatchError,
    UnsupportedConfigurationError,
    ValidationError,
)

NoiseKind = Literal["gaussian_nonmarkovian", "exponential_markovian", "none"]

# Pauli matrices in the (|g>, |e>) ordering used for all amplitude arrays:
# index 0 is the sigma_z = -1 ground state, matching m = k - N/2.
PAULI = {
    "I": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}
_AXES = ("x", "y", "z")
AXIS_Z = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class DephasingModel:
    """Dephasing noise: kind, rate gamma, and the dephasing basis axis."""

    kind: NoiseKind
    gamma: float = 0.0
    axis: Tuple[float, float, float] = AXIS_Z

    def __post_init__(self):
        if self.kind not in ("gaussian_nonmarkovian", "exponential_markovian", "none"):
            raise ValidationError(f"unknown noise kind {self.kind!r}")
        if self.gamma < 0 or not np.isfinite(self.gamma):
            raise ValidationError("gamma must be finite and >= 0")
        object.__setattr__(self, "axis", tuple(float(c) for c in as_unit_axis(self.axis)))

    @classmethod
    def gaussian(cls, gamma: float, axis=AXIS_Z) -> "DephasingModel":
        return cls("gaussian_nonmarkovian", gamma, tuple(axis))

    @classmethod
    def markovian(cls, gamma: float, axis=AXIS_Z) -> "DephasingModel":
        return cls("exponential_markovian", gamma, tuple(axis))

    @classmethod
    def none(cls, axis=AXIS_Z) -> "DephasingModel":
        return cls("none", 0.0, tuple(axis))

    def decay_exponent(self, t: float) -> float:
        """Coherence decay exponent: (gamma t)^2 (gaussian) or gamma t (markovian)."""
        if t < 0:
            raise ValidationError("t must be >= 0")
        if self.kind == "gaussian_nonmarkovian":
            return (self.gamma * t) ** 2
        if self.kind == "exponential_markovian":
            return self.gamma * t
        return 0.0

    def decay(self, t: float) -> float:
        """d(t) = exp(-decay_exponent); underflow clamps to full dephasing."""
        return float(np.exp(-self.decay_exponent(t)))

    def axis_array(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=float)


@dataclass(frozen=True)
class CollectiveMoments:
    """First/second collective-spin moments and their field derivatives.

    ``second`` is the symmetrized matrix S_ab = <J_a J_b + J_b J_a>/2;
    derivative entries are with respect to the field omega at the
    evaluation point used to build them.
    """

    n_qubits: int
    first: np.ndarray
    second: np.ndarray
    dfirst_domega: np.ndarray
    dsecond_domega: np.ndarray

    def covariance(self) -> np.ndarray:
        return self.second - np.outer(self.first, self.first)

    def variance_along(self, direction) -> float:
        d = np.asarray(direction, dtype=float)
        return float(max(d @ self.covariance() @ d, 0.0))

    def mean_along(self, direction) -> float:
        return float(np.asarray(direction, dtype=float) @ self.first)


def _pure_first_and_jj(state: DickeState):
    """<J_a> and the full complex second-moment matrix <J_a J_b>."""
    amps = state.amplitudes
    v = [apply_jx(amps), apply_jy(amps), apply_jz(amps)]
    first = np.array([np.vdot(amps, va).real for va in v])
    jj = np.array([[np.vdot(va, vb) for vb in v] for va in v])
    return first, jj


def reduced_density_1(state: DickeState) -> np.ndarray:
    """Single-qubit RDM of a symmetric state, from its first moments.

    By permutation symmetry <sigma_a> = 2 <J_a>/N for every qubit, and the
    Bloch decomposition rho_1 = (I + <sigma> . sigma)/2 is exact.
    """
    first, _ = _pure_first_and_jj(state)
    bloch = 2.0 * first / state.n_qubits
    rho = 0.5 * PAULI["I"].copy()
    for a, comp in zip(_AXES, bloch):
        rho += 0.5 * comp * PAULI[a]
    return rho


def _pair_correlators(state: DickeState):
    """Q_ab = <sigma_a^(1) sigma_b^(2)> for one qubit pair, plus <sigma_a>."""
    n = state.n_qubits
    first, jj = _pure_first_and_jj(state)
    bloch = 2.0 * first / n
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    q = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            single = 0.25 * n * (1.0 if a == b else 0.0) + 0.5j * sum(
                eps[a, b, c] * first[c] for c in range(3)
            )
            q[a, b] = ((jj[a, b] - single) * 4.0 / (n * (n - 1))).real
    return bloch, q


def reduced_density_2(state: DickeState) -> np.ndarray:
    """Two-qubit RDM of a symmetric state, from first and pair moments."""
    if state.n_qubits < 2:
        raise DimensionMismatchError("two-qubit RDM requires N >= 2")
    bloch, q = _pair_correlators(state)
    rho = 0.25 * np.kron(PAULI["I"], PAULI["I"])
    for a, name_a in enumerate(_AXES):
        rho += 0.25 * bloch[a] * np.kron(PAULI[name_a], PAULI["I"])
        rho += 0.25 * bloch[a] * np.kron(PAULI["I"], PAULI[name_a])
        for b, name_b in enumerate(_AXES):
            rho += 0.25 * q[a, b] * np.kron(PAULI[name_a], PAULI[name_b])
    return rho


def axis_sigma(axis) -> np.ndarray:
    axis = as_unit_axis(axis)
    return axis[0] * PAULI["x"] + axis[1] * PAULI["y"] + axis[2] * PAULI["z"]


def apply_local_dephasing(rdm: np.ndarray, model: DephasingModel, t: float) -> np.ndarray:
    """Dephase a 1- or 2-qubit density matrix, independently per qubit.

    Kraus form {sqrt(p) I, sqrt(1-p) axis.sigma} with p = (1 + d(t))/2
    reproduces the off-diagonal decay d(t) in the axis eigenbasis.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    rho = np.asarray(rdm, dtype=complex)
    if rho.shape == (2, 2):
        n_factors = 1
    elif rho.shape == (4, 4):
        n_factors = 2
    else:
        raise DimensionMismatchError("rdm must be 2x2 or 4x4")
    d = model.decay(t)
    if d == 1.0:
        return rho.copy()
    p = 0.5 * (1.0 + d)
    m = axis_sigma(model.axis)
    for i in range(n_factors):
        ops = [m if j == i else PAULI["I"] for j in range(n_factors)]
        full = ops[0] if n_factors == 1 else np.kron(ops[0], ops[1])
        rho = p * rho + (1.0 - p) * (full @ rho @ full)
    return rho


def _rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """SO(3) rotation by `angle` about `axis` (Rodrigues form)."""
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def _cross_matrix(axis: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )


def dephased_pair_moments(state: DickeState, model: DephasingModel, t: float):
    """First vector and symmetrized second-moment matrix after dephasing."""
    n = state.n_qubits
    rho1 = apply_local_dephasing(reduced_density_1(state), model, t)
    first = 0.5 * n * np.array(
        [np.trace(PAULI[a] @ rho1).real for a in _AXES]
    )
    second = 0.25 * n * np.eye(3)
    if n >= 2:
        rho2 = apply_local_dephasing(reduced_density_2(state), model, t)
        pair = np.array(
            [
                [np.trace(np.kron(PAULI[a], PAULI[b]) @ rho2).real for b in _AXES]
                for a in _AXES
            ]
        )
        second = second + 0.25 * n * (n - 1) * 0.5 * (pair + pair.T)
    return first, second


def collective_moments(
    state: DickeState,
    model: DephasingModel,
    sense_axis,
    omega: float,
    t: float,
) -> CollectiveMoments:
    """Moments of rho_t = exp(-i w t J_n) E^(x N)(psi) exp(+i w t J_n).

    The dephasing basis must coincide with the sensing axis (the channel is
    defined in the basis diagonalizing n . sigma); anything else is
    rejected rather than guessed at.
    """
    axis = as_unit_axis(sense_axis)
    if t < 0:
        raise ValidationError("t must be >= 0")
    if model.kind != "none" and not np.allclose(model.axis_array(), axis, atol=1e-9):
        raise UnsupportedConfigurationError(
            "dephasing axis must equal the sensing axis; "
            f"got model axis {model.axis} vs sensing axis {tuple(axis)}"
        )
    first0, second0 = dephased_pair_moments(state, model, t)
    rot = _rotation_matrix(axis, omega * t)
    cross = _cross_matrix(axis)
    first = rot @ first0
    second = rot @ second0 @ rot.T
    dfirst = t * (cross @ first)
    dsecond = t * (cross @ second - second @ cross)
    return CollectiveMoments(state.n_qubits, first, second, dfirst, dsecond)


def pure_state_moments(state: DickeState) -> CollectiveMoments:
    """Noise-free, field-free moments of a pure probe state."""
    return collective_moments(state, DephasingModel.none(), AXIS_Z, 0.0, 0.0)


def coherent_sandwich(
    x: complex,
    y: complex,
    w: complex,
    v: complex,
    n_qubits: int,
    model: DephasingModel,
    omega: float,
    t: float,
) -> complex:
    """<x,N| exp(-i w t J_z) E^(x N)(|y,N><w,N|) exp(+i w t J_z) |v,N>.

    Everything factorizes over qubits, so the result is the N-th power of a
    single-qubit transfer bracket -- exact at any N.  Requires the
    dephasing axis to be z (the cat-readout geometry).
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    for label in (x, y, w, v):
        label = complex(label)
        if not (np.isfinite(label.real) and np.isfinite(label.imag)):
            raise ValidationError("coherent labels must be finite")
    if model.kind != "none" and not np.allclose(
        np.abs(model.axis_array()), [0.0, 0.0, 1.0], atol=1e-9
    ):
        raise UnsupportedConfigurationError(
            "coherent_sandwich supports dephasing along z only"
        )
    x, y, w, v = complex(x), complex(y), complex(w), complex(v)
    d = model.decay(t)
    phase = np.exp(-1.0j * omega * t)
    numer = (
        1.0
        + d * np.conj(w) * v / phase
        + d * y * np.conj(x) * phase
        + y * np.conj(w) * np.conj(x) * v
    )
    lognorm = 0.5 * (
        np.log1p(abs(x) ** 2)
        + np.log1p(abs(y) ** 2)
        + np.log1p(abs(w) ** 2)
        + np.log1p(abs(v) ** 2)
    )
    # complex log keeps b^N stable for large N; single-valued for integer N
    log_bracket = np.log(complex(numer)) - lognorm
    return complex(np.exp(n_qubits * log_bracket))


def cross_branch_weight(z: complex, n_qubits: int, model: DephasingModel, t: float) -> float:
    """Dephasing weight of the |z,N><0,N| cross term.

    E^(x N)(|z,N><0,N|) = weight * |z d(t),N><0,N| with
    weight = ((1 + |z|^2 d^2)/(1 + |z|^2))^(N/2).
    """
    d = model.decay(t)
    return float(
        np.exp(
            0.5
            * n_qubits
            * (np.log1p(abs(z) ** 2 * d * d) - np.log1p(abs(z) ** 2))
        )
    )


def dephasing_factor_matrix(n_qubits: int, d: float) -> np.ndarray:
    """Schur multipliers of the dephasing channel compressed to the Dicke sector.

    For a symmetric-supported rho, the symmetric-sector block of
    E^(x N)(rho) is rho with each Dicke matrix element (k, k') multiplied by

        lambda_{k k'} = sum_a C(k,a) C(N-k, k'-a) d^(k + k' - 2a) / C(N, k') ,

    the string-pair average of d^(Hamming distance).  Exact; evaluated in
    the log domain.
    """
    if not 0.0 <= d <= 1.0:
        raise ValidationError("decay factor d must lie in [0, 1]")
    n = n_qubits
    lam = np.empty((n + 1, n + 1))
    log_d = np.log(d) if d > 0 else -np.inf
    for k in range(n + 1):
        for kp in range(k, n + 1):
            a = np.arange(max(0, k + kp - n), min(k, kp) + 1)
            logs = (
                log_binomial_vec(k, a)
                + log_binomial_vec(n - k, kp - a)
                - log_binomial_scalar(n, kp)
            )
            hamming = k + kp - 2 * a
            if d == 0.0:
                terms = np.where(hamming == 0, np.exp(logs), 0.0)
                val = terms.sum()
            else:
                val = float(np.exp(logs + hamming * log_d).sum())
            lam[k, kp] = lam[kp, k] = val
    return lam


def log_binomial_vec(n: int, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def log_binomial_scalar(n: int, k: int) -> float:
    return float(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))
