"""Full 2^N-Hilbert-space reference implementation (N <= 10).

Ground truth for every scalable path: embedding of symmetric states,
per-qubit Kraus dephasing, field rotations, collective moments,
cat-readout probabilities, and mixed-state quantum Fisher information.
Nothing here shares numerical kernels with the Dicke-basis code; the whole
point is independence.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import comb

from .dicke import DickeState, as_unit_axis
from .dephasing import DephasingModel
from .errors import OracleScaleError, ValidationError

MAX_ORACLE_QUBITS = 10

# basis bit 0 = |g> (sigma_z = -1), bit 1 = |e>; popcount counts excitations
_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}


def _check_scale(n_qubits: int):
    if n_qubits > MAX_ORACLE_QUBITS:
        raise OracleScaleError(f"oracle is capped at N <= {MAX_ORACLE_QUBITS}")
    if n_qubits < 1:
        raise ValidationError("n_qubits must be >= 1")


@dataclass(frozen=True)
class FullState:
    """Density matrix on the full 2^N space."""

    n_qubits: int
    rho: np.ndarray

    def __post_init__(self):
        dim = 2**self.n_qubits
        if self.rho.shape != (dim, dim):
            raise ValidationError(f"expected {dim}x{dim} density matrix")

    def trace_defect(self) -> float:
        return abs(np.trace(self.rho) - 1.0)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho).min())


@lru_cache(maxsize=16)
def _popcounts(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits, dtype=np.uint32)
    return np.array([bin(i).count("1") for i in idx])


def single_qubit_op(n_qubits: int, site: int, op: np.ndarray) -> np.ndarray:
    """op acting on one site (site 0 = most significant factor)."""
    full = np.array([[1.0 + 0.0j]])
    for i in range(n_qubits):
        full = np.kron(full, op if i == site else _SIGMA["I"])
    return full


@lru_cache(maxsize=256)
def _axis_site_op(n_qubits: int, site: int, axis: tuple) -> np.ndarray:
    m2 = axis[0] * _SIGMA["x"] + axis[1] * _SIGMA["y"] + axis[2] * _SIGMA["z"]
    return single_qubit_op(n_qubits, site, m2)


@lru_cache(maxsize=16)
def _symmetrized_pair_ops(n_qubits: int):
    jx, jy, jz = full_collective_ops(n_qubits)
    ops = (jx, jy, jz)
    return tuple(
        tuple(0.5 * (ops[a] @ ops[b] + ops[b] @ ops[a]) for b in range(3))
        for a in range(3)
    )


@lru_cache(maxsize=16)
def full_collective_ops(n_qubits: int):
    """(J_x, J_y, J_z) on the 2^N space, as sums of sigma/2 per site."""
    _check_scale(n_qubits)
    dim = 2**n_qubits
    ops = []
    for name in ("x", "y", "z"):
        total = np.zeros((dim, dim), dtype=complex)
        for site in range(n_qubits):
            total += 0.5 * single_qubit_op(n_qubits, site, _SIGMA[name])
        ops.append(total)
    return tuple(ops)


def embed_dicke_vector(state: DickeState) -> np.ndarray:
    """Expand Dicke amplitudes over computational basis strings."""
    _check_scale(state.n_qubits)
    n = state.n_qubits
    pop = _popcounts(n)
    weights = np.array([comb(n, int(k), exact=True) for k in range(n + 1)], dtype=float)
    psi = state.amplitudes[pop] / np.sqrt(weights[pop])
    return psi


def embed_dicke(state: DickeState) -> FullState:
    psi = embed_dicke_vector(state)
    return FullState(state.n_qubits, np.outer(psi, psi.conj()))


def product_coherent_vector(z: complex, n_qubits: int) -> np.ndarray:
    """((|g> + z|e>)/sqrt(1+|z|^2))^(x N) built literally by Kronecker products."""
    _check_scale(n_qubits)
    single = np.array([1.0, z], dtype=complex) / np.sqrt(1.0 + abs(z) ** 2)
    psi = np.array([1.0 + 0.0j])
    for _ in range(n_qubits):
        psi = np.kron(psi, single)
    return psi


def oracle_dephase(full: FullState, model: DephasingModel, t: float) -> FullState:
    """Apply E^(x N): per-qubit Kraus pair {sqrt(p) I, sqrt(1-p) axis.sigma}."""
    if t < 0:
        raise ValidationError("t must be >= 0")
    d = model.decay(t)
    p = 0.5 * (1.0 + d)
    rho = full.rho.copy()
    for site in range(full.n_qubits):
        m_full = _axis_site_op(full.n_qubits, site, model.axis)
        rho = p * rho + (1.0 - p) * (m_full @ rho @ m_full)
    return FullState(full.n_qubits, rho)


def rotation_full(n_qubits: int, axis, angle: float) -> np.ndarray:
    """exp(-i angle J_n) as a Kronecker power of the 2x2 rotation."""
    axis = as_unit_axis(axis)
    m2 = axis[0] * _SIGMA["x"] + axis[1] * _SIGMA["y"] + axis[2] * _SIGMA["z"]
    half = np.cos(angle / 2.0) * _SIGMA["I"] - 1.0j * np.sin(angle / 2.0) * m2
    u = np.array([[1.0 + 0.0j]])
    for _ in range(n_qubits):
        u = np.kron(u, half)
    return u


def oracle_rotate(full: FullState, axis, angle: float) -> FullState:
    u = rotation_full(full.n_qubits, axis, angle)
    return FullState(full.n_qubits, u @ full.rho @ u.conj().T)


def oracle_evolved(
    state: DickeState, model: DephasingModel, sense_axis, omega: float, t: float
) -> FullState:
    """rho_t = exp(-i w t J_n) E^(x N)(|psi><psi|) exp(+i w t J_n), brute force."""
    full = embed_dicke(state)
    full = oracle_dephase(full, model, t)
    return oracle_rotate(full, sense_axis, omega * t)


def oracle_moments(full: FullState):
    """(first, symmetrized second) collective moments by direct trace."""
    ops = full_collective_ops(full.n_qubits)
    pair_ops = _symmetrized_pair_ops(full.n_qubits)
    first = np.array([_fast_trace(op, full.rho) for op in ops])
    second = np.array(
        [[_fast_trace(pair_ops[a][b], full.rho) for b in range(3)] for a in range(3)]
    )
    return first, second


def _fast_trace(op: np.ndarray, rho: np.ndarray) -> float:
    # tr(A B) = sum_ij A_ij B_ji without forming the product
    return float(np.sum(op * rho.T).real)


def oracle_expectation(full: FullState, observable: np.ndarray) -> float:
    return float(np.trace(observable @ full.rho).real)


def oracle_cat_probability(
    z: complex, n_qubits: int, omega: float, t: float, model: DephasingModel
) -> float:
    """Cat-readout sigma_y probability, with the coherence transfer computed
    by brute-force channel application on the 2^N space.

    P_+ = 1/2 + Im[ tr( E_rot(|z><0|) R^dag ) ] / 2, where R is the
    collective rotation with R|0,N> = |z,N>.
    """
    _check_scale(n_qubits)
    psi_z = product_coherent_vector(z, n_qubits)
    psi_0 = product_coherent_vector(0.0, n_qubits)
    cross = np.outer(psi_z, psi_0.conj())
    # rotate then dephase; the two commute for axis-z noise
    u = rotation_full(n_qubits, (0, 0, 1), omega * t)
    cross = u @ cross @ u.conj().T
    d = model.decay(t)
    p = 0.5 * (1.0 + d)
    rho = cross.copy()
    for site in range(n_qubits):
        m_full = _axis_site_op(n_qubits, site, model.axis)
        rho = p * rho + (1.0 - p) * (m_full @ rho @ m_full)
    # R with R|0,N> = |z,N>: per-qubit rotation taking |g> to (|g>+z|e>)/norm
    if z == 0:
        raise ValidationError("cat readout requires z != 0")
    theta = 2.0 * np.arctan(abs(z))
    phi = np.angle(z)
    nvec = (-np.sin(phi), -np.cos(phi), 0.0)
    r = rotation_full(n_qubits, nvec, theta)
    transfer = np.trace(rho @ r.conj().T)
    return float(0.5 + 0.5 * transfer.imag)


def oracle_qfi(rho: np.ndarray, generator: np.ndarray, eps: float = 1e-12) -> float:
    """F = 2 sum_{ij} (lam_i - lam_j)^2 |G_ij|^2 / (lam_i + lam_j)."""
    evals, evecs = np.linalg.eigh(rho)
    g = evecs.conj().T @ generator @ evecs
    f = 0.0
    for i in range(len(evals)):
        for j in range(len(evals)):
            s = evals[i] + evals[j]
            if s > eps:
                f += 2.0 * (evals[i] - evals[j]) ** 2 * abs(g[i, j]) ** 2 / s
    return float(f)


def oracle_min_transverse_variance(full: FullState):
    """Minimal Var(J_r) over unit r orthogonal to the mean spin, plus |<J>|."""
    first, second = oracle_moments(full)
    norm = np.linalg.norm(first)
    if norm == 0.0:
        raise ValidationError("mean spin vanishes")
    m = first / norm
    cov = second - np.outer(first, first)
    # orthonormal transverse frame
    seed = np.eye(3)[int(np.argmin(np.abs(m)))]
    e1 = np.cross(seed, m)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(m, e1)
    block = np.array([[e @ cov @ f for f in (e1, e2)] for e in (e1, e2)])
    return float(np.linalg.eigvalsh(block).min()), float(norm)


def oracle_xi_squared(full: FullState) -> float:
    var_min, mean = oracle_min_transverse_variance(full)
    return float(full.n_qubits * var_min / mean**2)
