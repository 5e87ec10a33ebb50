"""Estimators and uncertainty bounds for collective-spin field sensing.

Covers the squeezing parameter, deterministic estimator/sensing direction
selection, error propagation through exact dephased moments, the
exposure-time bound f(t) and power-law schedules, the closed-form
cat-state readout, and exact quantum Fisher information at oracle scale.

All derivative-based uncertainties are evaluated at omega = 0 unless a
configuration says otherwise; the linear-response formulas hold for
N * omega * t << 1 and omega = 0 also kills the tan(omega t) corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence, Tuple

import numpy as np

from .dicke import DickeState, as_unit_axis
from .dephasing import (
    CollectiveMoments,
    DephasingModel,
    collective_moments,
    pure_state_moments,
)
from .errors import (
    NoMeanSpinError,
    NumericalError,
    ValidationError,
)
from .fitting import FitResult, fit_power_law
from .states import oat_state, tat_state

UncertaintyMethod = Literal[
    "moment_propagation", "cat_closed_form", "f_bound", "qfi_bound"
]

MEAN_SPIN_REL_TOL = 1e-9
EIGEN_TIE_REL_TOL = 1e-9
DEFAULT_CAT_SCHEDULE_S = 0.1  # t = s/(gamma sqrt(N)) keeps N (gamma t)^2 = s^2 << 1


@dataclass(frozen=True)
class SensingConfig:
    """Geometry and timing of one sensing run.

    ``sense_axis`` n sets both the field direction and the dephasing basis;
    ``estimator_axis`` r must be orthogonal to the mean-spin axis m.
    """

    sense_axis: Tuple[float, float, float]
    estimator_axis: Tuple[float, float, float]
    mean_axis: Tuple[float, float, float]
    t: float
    total_time: float
    omega: float = 0.0

    def __post_init__(self):
        n = as_unit_axis(self.sense_axis)
        r = as_unit_axis(self.estimator_axis)
        m = as_unit_axis(self.mean_axis)
        if abs(float(r @ m)) > 1e-9:
            raise ValidationError(f"estimator axis must be orthogonal to mean axis; r.m = {r @ m}")
        if self.t <= 0:
            raise ValidationError("exposure time t must be > 0")
        if self.total_time < self.t:
            raise ValidationError("total time T must be >= t")
        object.__setattr__(self, "sense_axis", tuple(map(float, n)))
        object.__setattr__(self, "estimator_axis", tuple(map(float, r)))
        object.__setattr__(self, "mean_axis", tuple(map(float, m)))

    @property
    def mu(self) -> float:
        return self.total_time / self.t


@dataclass(frozen=True)
class UncertaintyRecord:
    """delta_omega = sqrt(variance/mu) / |signal slope| plus its ingredients."""

    delta_omega: float
    variance_used: float
    signal_slope: float
    mu: float
    method: UncertaintyMethod


def _propagated_record(variance: float, slope: float, mu: float, method) -> UncertaintyRecord:
    variance = max(variance, 0.0)
    if slope == 0.0:
        return UncertaintyRecord(math.inf, variance, 0.0, mu, method)
    return UncertaintyRecord(
        delta_omega=math.sqrt(variance / mu) / abs(slope),
        variance_used=variance,
        signal_slope=slope,
        mu=mu,
        method=method,
    )


def mean_spin_direction(moments: CollectiveMoments) -> np.ndarray:
    """Unit vector along <J>; undefined when the mean spin vanishes."""
    norm = float(np.linalg.norm(moments.first))
    if norm <= MEAN_SPIN_REL_TOL * moments.n_qubits:
        raise NoMeanSpinError(
            f"|<J>| = {norm} vanishes relative to N = {moments.n_qubits}; "
            "mean-spin estimators are undefined for this state"
        )
    return moments.first / norm


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Pick v or -v, whichever is lexicographically larger as a tuple."""
    return v if tuple(v) >= tuple(-v) else -v


def _lexicographic_max(candidates) -> np.ndarray:
    best = None
    for v in candidates:
        v = _canonical_sign(v)
        if best is None or tuple(v) > tuple(best):
            best = v
    return best


def transverse_frame(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis of the plane orthogonal to m."""
    m = as_unit_axis(m)
    seed = np.eye(3)[int(np.argmin(np.abs(m)))]
    e1 = np.cross(seed, m)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(m, e1)
    return e1, e2


def min_variance_direction(moments: CollectiveMoments, m) -> np.ndarray:
    """r minimizing Var(J_r) over the plane orthogonal to m.

    Ties (isotropic transverse variance) resolve to the lexicographically
    largest sign-canonical candidate, so the choice is deterministic.
    """
    e1, e2 = transverse_frame(np.asarray(m, dtype=float))
    cov = moments.covariance()
    block = np.array([[e @ cov @ f for f in (e1, e2)] for e in (e1, e2)])
    evals, evecs = np.linalg.eigh(block)
    scale = max(abs(evals[-1]), 1.0)
    candidates = [
        evecs[0, i] * e1 + evecs[1, i] * e2
        for i in range(2)
        if evals[i] <= evals[0] + EIGEN_TIE_REL_TOL * scale
    ]
    return _lexicographic_max(candidates)


def sensing_direction(moments: CollectiveMoments, m=None, r=None) -> np.ndarray:
    """n maximizing Var(J_n): top eigenvector of the covariance matrix."""
    cov = moments.covariance()
    evals, evecs = np.linalg.eigh(cov)
    scale = max(abs(evals[-1]), 1.0)
    candidates = [
        evecs[:, i]
        for i in range(3)
        if evals[i] >= evals[-1] - EIGEN_TIE_REL_TOL * scale
    ]
    return _lexicographic_max(candidates)


def squeezing_parameter_from_moments(moments: CollectiveMoments) -> float:
    """xi_W^2 = N Var(J_r) / E(J_m)^2 with r the minimal-variance transverse axis."""
    m = mean_spin_direction(moments)
    r = min_variance_direction(moments, m)
    mean = moments.mean_along(m)
    return float(moments.n_qubits * moments.variance_along(r) / mean**2)


def squeezing_parameter(state: DickeState) -> float:
    """Squeezing parameter of a pure probe state."""
    return squeezing_parameter_from_moments(pure_state_moments(state))


def choose_sensing_geometry(state: DickeState) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(m, r, n): mean-spin, minimal-variance estimator, maximal-variance sensing axes."""
    moments = pure_state_moments(state)
    m = mean_spin_direction(moments)
    r = min_variance_direction(moments, m)
    n = sensing_direction(moments, m, r)
    return m, r, n


def make_sensing_config(
    state: DickeState, t: float, total_time: float, omega: float = 0.0
) -> SensingConfig:
    m, r, n = choose_sensing_geometry(state)
    return SensingConfig(tuple(n), tuple(r), tuple(m), t, total_time, omega)


def uncertainty_moment_propagation(
    state: DickeState, model: DephasingModel, config: SensingConfig
) -> UncertaintyRecord:
    """Error propagation of the J_r estimator through the exact dephased moments."""
    moments = collective_moments(
        state, model, config.sense_axis, config.omega, config.t
    )
    r = np.asarray(config.estimator_axis)
    variance = moments.variance_along(r)
    slope = float(r @ moments.dfirst_domega)
    return _propagated_record(variance, slope, config.mu, "moment_propagation")


def f_bound(state: DickeState, t: float, gamma: float, total_time: float) -> float:
    """Exposure-time bound f(t) on delta_omega for gaussian dephasing.

    f(t) = sqrt( 2 {Var_psi(J_r) + N (e^(2 (gamma t)^2) - 1)/4}
                 / (T t E_psi(J_m)^2) ),
    with the pure-state moments of psi; valid at omega = 0 where the
    tan(omega t) correction vanishes and the regime condition holds.
    """
    if t <= 0:
        raise ValidationError("t must be > 0")
    moments = pure_state_moments(state)
    m = mean_spin_direction(moments)
    r = min_variance_direction(moments, m)
    return f_bound_value(
        moments.variance_along(r),
        moments.mean_along(m),
        state.n_qubits,
        t,
        gamma,
        total_time,
    )


def f_bound_value(
    var_r: float, mean_m: float, n_qubits: int, t: float, gamma: float, total_time: float
) -> float:
    """f(t) from raw moments; also used for synthetic scaling studies."""
    if t <= 0:
        raise ValidationError("t must be > 0")
    noise = 0.25 * n_qubits * math.expm1(2.0 * (gamma * t) ** 2)
    return math.sqrt(2.0 * (var_r + noise) / (total_time * t * mean_m**2))


def schedule_exposure(n_qubits: int, s1: float, alpha: float) -> float:
    """Power-law exposure schedule t = alpha * N^(-s1)."""
    if s1 < 0:
        raise ValidationError("s1 must be >= 0")
    if alpha <= 0:
        raise ValidationError("alpha must be > 0")
    return float(alpha * n_qubits ** (-s1))


def cat_exposure_time(n_qubits: int, gamma: float, s: float = DEFAULT_CAT_SCHEDULE_S) -> float:
    """t = s/(gamma sqrt(N)): the s1 = 1/2 schedule with alpha = s/gamma."""
    if gamma <= 0:
        raise ValidationError("cat schedule needs gamma > 0")
    return schedule_exposure(n_qubits, 0.5, s / gamma)


def _cat_log_bracket(z: complex, omega: float, t: float, model: DephasingModel) -> complex:
    """log of the per-qubit coherence-transfer bracket B(omega)."""
    d = model.decay(t)
    zsq = abs(z) ** 2
    numer = 1.0 + d * zsq * np.exp(-1.0j * omega * t)
    return complex(np.log(numer) - np.log1p(zsq))


def cat_readout_probability(
    z: complex, n_qubits: int, omega: float, t: float, model: DephasingModel
) -> float:
    """sigma_y = +1 probability of the cat-state readout sequence.

    P_+ = 1/2 + Im[ W_d <z,N | z d e^(-i w t), N> ] / 2, where W_d is the
    dephasing weight of the cross branch; equivalently 1/2 plus half the
    imaginary part of the N-th power of a single-qubit bracket.  With no
    dephasing this reduces exactly to 1/2 + Im[<z|z e^(-i w t)>]/2.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    z = complex(z)
    transfer = np.exp(n_qubits * _cat_log_bracket(z, omega, t, model))
    return float(0.5 + 0.5 * transfer.imag)


def cat_readout_slope(
    z: complex, n_qubits: int, omega: float, t: float, model: DephasingModel
) -> float:
    """Analytic d P_+ / d omega."""
    z = complex(z)
    d = model.decay(t)
    zsq = abs(z) ** 2
    log_b = _cat_log_bracket(z, omega, t, model)
    db = -1.0j * t * d * zsq * np.exp(-1.0j * omega * t) / (1.0 + zsq)
    deriv = n_qubits * np.exp((n_qubits - 1) * log_b) * db
    return float(deriv.imag * 0.5)


def cat_uncertainty(
    z: complex,
    n_qubits: int,
    t: float,
    total_time: float,
    model: DephasingModel,
    omega: float = 0.0,
) -> UncertaintyRecord:
    """Exact cat-state uncertainty, by default at omega = 0.

    The estimator is the readout projector, so Var = P(1-P); at omega = 0
    the bracket is real, P = 1/2 exactly, and Var = 1/4.
    """
    if t <= 0:
        raise ValidationError("t must be > 0")
    if total_time < t:
        raise ValidationError("total time T must be >= t")
    p = cat_readout_probability(z, n_qubits, omega, t, model)
    slope = cat_readout_slope(z, n_qubits, omega, t, model)
    return _propagated_record(p * (1.0 - p), slope, total_time / t, "cat_closed_form")


def cat_uncertainty_linearized(
    z: complex, n_qubits: int, t: float, total_time: float
) -> float:
    """Small-noise closed form (1+|z|^2)/(N t |z|^2) * sqrt(t/T)."""
    zsq = abs(complex(z)) ** 2
    if zsq == 0:
        raise ValidationError("z must be nonzero")
    return float((1.0 + zsq) / (n_qubits * t * zsq) * math.sqrt(t / total_time))


def qfi_exact(rho: np.ndarray, generator: np.ndarray, eps: float = 1e-12) -> float:
    """Quantum Fisher information of rho for the family e^(-i G x) rho e^(i G x).

    F = 2 sum_{i,j : lam_i + lam_j > eps} |<i|d rho|j>|^2 / (lam_i + lam_j)
    with d rho = -i [G, rho]; in the eigenbasis |d rho_ij| =
    |lam_i - lam_j| |G_ij|.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] > 2**10:
        raise ValidationError("qfi_exact is an oracle-scale routine (dim <= 1024)")
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_defect > 1e-9:
        raise ValidationError(f"rho is not Hermitian: defect {herm_defect}")
    evals, evecs = np.linalg.eigh(rho)
    if evals.min() < -1e-8:
        raise ValidationError(f"rho is not PSD: min eigenvalue {evals.min()}")
    g = evecs.conj().T @ np.asarray(generator, dtype=complex) @ evecs
    lam_sum = evals[:, None] + evals[None, :]
    lam_diff = evals[:, None] - evals[None, :]
    mask = lam_sum > eps
    contrib = np.zeros_like(lam_sum)
    contrib[mask] = lam_diff[mask] ** 2 * np.abs(g[mask]) ** 2 / lam_sum[mask]
    return float(2.0 * contrib.sum())


def golden_section_minimize(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-6,
    max_iter: int = 200,
) -> Tuple[float, float]:
    """Golden-section minimum of a unimodal fn on [lo, hi]; returns (x, fn(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * max(abs(a), abs(b), 1e-300):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return (c, fc) if fc < fd else (d, fd)


def _log_grid_minimize(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    coarse_points: int = 80,
    rel_tol: float = 1e-6,
) -> Tuple[float, float]:
    """Coarse log-grid scan to bracket the minimum, then golden-section refine.

    +inf objective values are allowed (the zero-slope flag reads as
    "infinitely bad"); NaNs are not.
    """
    grid = np.geomspace(lo, hi, coarse_points)
    values = np.array([fn(x) for x in grid])
    if np.any(np.isnan(values)):
        raise NumericalError("objective returned NaN on the scan grid")
    idx = int(np.argmin(values))
    if not np.isfinite(values[idx]):
        raise NumericalError("objective is infinite over the whole scan bracket")
    if idx in (0, len(grid) - 1):
        raise NumericalError(
            f"minimum at scan-bracket edge (x = {grid[idx]}); widen the bracket"
        )
    x, v = golden_section_minimize(
        lambda u: fn(math.exp(u)),
        math.log(grid[idx - 1]),
        math.log(grid[idx + 1]),
        rel_tol=rel_tol,
    )
    return math.exp(x), v


def optimal_twisting(
    kind: Literal["oat", "tat"],
    n_qubits: int,
    z: complex = 1.0,
    chi_max: float = math.pi,
) -> Tuple[float, float]:
    """(chi, Var(J_r)) minimizing the transverse variance over chi in (0, pi]."""

    def var_r(chi: float) -> float:
        state = (
            oat_state(z, chi, n_qubits) if kind == "oat" else tat_state(chi, n_qubits)
        )
        moments = pure_state_moments(state)
        try:
            m = mean_spin_direction(moments)
        except NoMeanSpinError:
            return 1e300  # over-twisted: penalize, never optimal
        r = min_variance_direction(moments, m)
        return moments.variance_along(r)

    return _log_grid_minimize(var_r, 1e-6, chi_max)


def optimize_exposure_time(
    delta_of_t: Callable[[float], float],
    gamma: float,
    rel_tol: float = 1e-6,
) -> Tuple[float, float]:
    """Minimize delta_omega over t in [1e-4/gamma, 1e2/gamma] (log bracket)."""
    if gamma <= 0:
        raise ValidationError("t-optimization bracket is expressed in units of 1/gamma")
    return _log_grid_minimize(delta_of_t, 1e-4 / gamma, 1e2 / gamma, rel_tol=rel_tol)


def markovian_comparison(
    state_kind: Literal["cat"],
    n_grid: Sequence[int],
    total_time: float,
    z: complex = 1.0,
    gamma: float = 1.0,
) -> FitResult:
    """SQL-reversion check: exponential dephasing with per-N optimized t.

    Only the cat closed form is exercised here; squeezed-state scaling runs
    go through the sweep harness.
    """
    if len(n_grid) < 3:
        raise ValidationError("need >= 3 grid points for a fit")
    model = DephasingModel.markovian(gamma)
    deltas = []
    for n in n_grid:
        _, best = optimize_exposure_time(
            lambda t: cat_uncertainty(z, n, t, total_time, model).delta_omega,
            gamma,
        )
        deltas.append(best)
    return fit_power_law(np.asarray(n_grid, dtype=float), np.asarray(deltas))
