import numpy as np
import pytest

from spinsense import states


def taylor_expm(a: np.ndarray) -> np.ndarray:
    """Reference matrix exponential: scaling and squaring + Taylor to convergence.

    Deliberately independent of any library expm so it can serve as an
    oracle for unitary_exp.
    """
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, ord=np.inf)
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300)))) + 1)
    small = a / (2**squarings)
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 60):
        term = term @ small / k
        result = result + term
        if np.max(np.abs(term)) < 1e-20:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def partial_trace_keep_first(rho: np.ndarray, n_qubits: int, keep: int) -> np.ndarray:
    """Trace out all but the first `keep` qubits of a 2^N density matrix."""
    dim_keep = 2**keep
    dim_rest = 2 ** (n_qubits - keep)
    reshaped = rho.reshape(dim_keep, dim_rest, dim_keep, dim_rest)
    return np.einsum("ajbj->ab", reshaped)


def build_state(kind: str, n: int, z: complex = 1.0, chi: float = 0.2):
    if kind == "coherent":
        return states.spin_coherent(z, n)
    if kind == "oat":
        return states.oat_state(z / abs(z) if z != 0 else 1.0, chi, n)
    if kind == "tat":
        return states.tat_state(chi, n)
    if kind == "cat":
        return states.spin_cat(z if z != 0 else 1.0, n)
    if kind == "ghz":
        return states.ghz_state(n)
    raise ValueError(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
