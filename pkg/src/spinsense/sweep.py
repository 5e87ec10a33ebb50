"""Parameter sweeps over probe size N, exponent fits, and CSV/SVG emission.

A sweep evaluates one probe family on a log grid of ensemble sizes and
records the estimation uncertainty per point: the closed form for cat
states, moment propagation for coherent/squeezed states.  Rows are merged
in N order whatever the execution order, so repeated runs are
byte-identical in the emitted CSV regardless of the worker count.

The JSON configuration is strict: unknown keys are rejected.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .dephasing import DephasingModel
from .errors import SpinSenseError, ValidationError
from .fitting import FitResult, fit_power_law
from .metrology import (
    SensingConfig,
    cat_uncertainty,
    choose_sensing_geometry,
    optimal_twisting,
    optimize_exposure_time,
    pure_state_moments,
    mean_spin_direction,
    min_variance_direction,
    schedule_exposure,
    squeezing_parameter,
    uncertainty_moment_propagation,
)
from .states import StateSpec

CSV_HEADER = "state,noise,N,t,gamma,omega,chi,z_re,z_im,delta_omega,xi2,var_r,mean_m,status"

MIN_GRID_POINTS = 3
MIN_GRID_DECADES = 2.0
POINTS_PER_DECADE = 10


class StateTemplate(BaseModel):
    """Probe family; n_qubits is filled in per grid point."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["coherent", "oat", "tat", "cat", "ghz"]
    z: Tuple[float, float] = (1.0, 0.0)
    chi: Optional[float] = None
    chi_opt: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.kind in ("oat", "tat") and self.chi is None and not self.chi_opt:
            raise ValueError(f"{self.kind} needs chi or chi_opt")
        if self.chi is not None and self.chi_opt:
            raise ValueError("give either chi or chi_opt, not both")
        return self

    @property
    def z_complex(self) -> complex:
        return complex(self.z[0], self.z[1])


class NoiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian_nonmarkovian", "exponential_markovian", "none"]
    gamma: float = 0.0
    axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    def build(self, axis=None) -> DephasingModel:
        return DephasingModel(self.kind, self.gamma, tuple(axis) if axis is not None else self.axis)


class Schedule(BaseModel):
    """Either a power law t = alpha N^(-s1) or per-point optimization of t."""

    model_config = ConfigDict(extra="forbid")

    s1: Optional[float] = None
    alpha: Optional[float] = None
    optimize_t: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.optimize_t:
            if self.s1 is not None or self.alpha is not None:
                raise ValueError("optimize_t excludes s1/alpha")
        else:
            if self.s1 is None or self.alpha is None:
                raise ValueError("schedule needs s1 and alpha (or optimize_t)")
        return self


class OutputPaths(BaseModel):
    model_config = ConfigDict(extra="forbid")

    csv: Optional[str] = None
    plot: Optional[str] = None


class SweepSpec(BaseModel):
    """One Fig.-2-style scaling experiment, fully explicit."""

    model_config = ConfigDict(extra="forbid")

    state: StateTemplate
    noise: NoiseSpec
    n_grid: List[int]
    schedule: Schedule
    T: float = Field(gt=0)
    omega_eval: float = 0.0
    outputs: Optional[OutputPaths] = None

    @field_validator("n_grid")
    @classmethod
    def _grid(cls, grid):
        if len(grid) < MIN_GRID_POINTS:
            raise ValueError(f"n_grid needs >= {MIN_GRID_POINTS} points")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if grid[0] < 1:
            raise ValueError("n_grid entries must be >= 1")
        span = math.log10(grid[-1] / grid[0])
        if span < MIN_GRID_DECADES - 1e-9:
            raise ValueError(
                f"n_grid spans {span:.2f} decades; fit runs need >= {MIN_GRID_DECADES}"
            )
        return grid

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.schedule.optimize_t and self.noise.gamma <= 0:
            raise ValueError("optimize_t brackets t in units of 1/gamma; needs gamma > 0")
        return self


def log_grid(n_min: int, n_max: int, points_per_decade: int = POINTS_PER_DECADE) -> List[int]:
    """Default logarithmic N grid, deduplicated after rounding."""
    decades = math.log10(n_max / n_min)
    count = max(MIN_GRID_POINTS, int(round(decades * points_per_decade)) + 1)
    raw = np.geomspace(n_min, n_max, count)
    grid = sorted({int(round(x)) for x in raw})
    return grid


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep; mirrors the CSV schema."""

    state: str
    noise: str
    n_qubits: int
    t: float
    gamma: float
    omega: float
    chi: float
    z_re: float
    z_im: float
    delta_omega: float
    xi2: float
    var_r: float
    mean_m: float
    status: str


def _squeezed_delta(state_spec: StateSpec, noise: NoiseSpec, t, total_time, omega):
    """Moment-propagation uncertainty with the dephasing basis locked to n."""
    state = state_spec.build()
    m, r, n = choose_sensing_geometry(state)
    config = SensingConfig(tuple(n), tuple(r), tuple(m), t, total_time, omega)
    model = noise.build(axis=tuple(n))
    record = uncertainty_moment_propagation(state, model, config)
    moments = pure_state_moments(state)
    return record, moments.variance_along(r), moments.mean_along(m)


def _evaluate_point(spec: SweepSpec, n: int) -> SweepRow:
    template = spec.state
    z = template.z_complex
    chi = math.nan
    xi2 = math.nan
    var_r = math.nan
    mean_m = math.nan
    t_used = math.nan
    delta = math.nan
    status = "ok"
    try:
        if template.kind in ("oat", "tat"):
            if template.chi_opt:
                chi, _ = optimal_twisting(template.kind, n, z=z if template.kind == "oat" else 1.0)
            else:
                chi = float(template.chi)
        state_spec = StateSpec(
            kind=template.kind,
            n_qubits=n,
            z=z,
            chi=None if math.isnan(chi) else chi,
        )

        if template.kind == "cat":
            model = spec.noise.build()
            if spec.schedule.optimize_t:
                t_used, delta = optimize_exposure_time(
                    lambda t: cat_uncertainty(z, n, t, spec.T, model, spec.omega_eval).delta_omega,
                    spec.noise.gamma,
                )
            else:
                t_used = schedule_exposure(n, spec.schedule.s1, spec.schedule.alpha)
                delta = cat_uncertainty(z, n, t_used, spec.T, model, spec.omega_eval).delta_omega
        else:
            if spec.schedule.optimize_t:
                def objective(t):
                    rec, _, _ = _squeezed_delta(state_spec, spec.noise, t, spec.T, spec.omega_eval)
                    return rec.delta_omega

                t_used, delta = optimize_exposure_time(objective, spec.noise.gamma)
                _, var_r, mean_m = _squeezed_delta(state_spec, spec.noise, t_used, spec.T, spec.omega_eval)
            else:
                t_used = schedule_exposure(n, spec.schedule.s1, spec.schedule.alpha)
                record, var_r, mean_m = _squeezed_delta(
                    state_spec, spec.noise, t_used, spec.T, spec.omega_eval
                )
                delta = record.delta_omega

        try:
            probe = state_spec.build()
            xi2 = squeezing_parameter(probe)
            if math.isnan(var_r):
                moments = pure_state_moments(probe)
                m_axis = mean_spin_direction(moments)
                r_axis = min_variance_direction(moments, m_axis)
                var_r = moments.variance_along(r_axis)
                mean_m = moments.mean_along(m_axis)
        except SpinSenseError:
            pass  # xi2 undefined for this state; row stays valid
    except SpinSenseError as exc:
        status = f"{type(exc).__name__}: {exc}"
    return SweepRow(
        state=template.kind,
        noise=spec.noise.kind,
        n_qubits=n,
        t=t_used,
        gamma=spec.noise.gamma,
        omega=spec.omega_eval,
        chi=chi,
        z_re=z.real,
        z_im=z.imag,
        delta_omega=delta,
        xi2=xi2,
        var_r=var_r,
        mean_m=mean_m,
        status=status,
    )


def run_sweep(spec: SweepSpec, jobs: Optional[int] = None) -> List[SweepRow]:
    """Evaluate every grid point (in parallel) and merge rows sorted by N.

    Per-point failures are recorded in the row's status field; they do not
    abort the sweep.
    """
    workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    if workers == 1:
        rows = [_evaluate_point(spec, n) for n in spec.n_grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: _evaluate_point(spec, n), spec.n_grid))
    return sorted(rows, key=lambda row: row.n_qubits)


def fit_exponent(rows: Sequence[SweepRow], x_column: str, y_column: str) -> FitResult:
    """Least-squares power-law fit over the ok-status rows of a sweep."""
    column_map = {"N": "n_qubits", "n": "n_qubits", "n_qubits": "n_qubits"}
    def get(row, name):
        attr = column_map.get(name, name)
        return getattr(row, attr)

    ok = [row for row in rows if row.status == "ok"]
    x = np.array([get(row, x_column) for row in ok], dtype=float)
    y = np.array([get(row, y_column) for row in ok], dtype=float)
    return fit_power_law(x, y)


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17e")


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                _format_value(v)
                for v in (
                    row.state,
                    row.noise,
                    row.n_qubits,
                    row.t,
                    row.gamma,
                    row.omega,
                    row.chi,
                    row.z_re,
                    row.z_im,
                    row.delta_omega,
                    row.xi2,
                    row.var_r,
                    row.mean_m,
                    row.status.replace(",", ";"),
                )
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(rows: Sequence[SweepRow], path: str) -> None:
    """Write the sweep table; full double precision, deterministic bytes."""
    if not rows:
        raise ValidationError("refusing to write an empty sweep table")
    text = rows_to_csv(rows)
    with open(path, "w", newline="") as handle:
        handle.write(text)


def rows_from_csv_text(text: str) -> List[SweepRow]:
    import csv as _csv
    import io as _io

    reader = _csv.DictReader(_io.StringIO(text))
    if reader.fieldnames != CSV_HEADER.split(","):
        raise ValidationError("unexpected CSV header")
    rows = []
    for rec in reader:
        rows.append(
            SweepRow(
                state=rec["state"],
                noise=rec["noise"],
                n_qubits=int(rec["N"]),
                t=float(rec["t"]),
                gamma=float(rec["gamma"]),
                omega=float(rec["omega"]),
                chi=float(rec["chi"]),
                z_re=float(rec["z_re"]),
                z_im=float(rec["z_im"]),
                delta_omega=float(rec["delta_omega"]),
                xi2=float(rec["xi2"]),
                var_r=float(rec["var_r"]),
                mean_m=float(rec["mean_m"]),
                status=rec["status"],
            )
        )
    return rows


def parse_csv(path: str) -> List[SweepRow]:
    with open(path, newline="") as handle:
        return rows_from_csv_text(handle.read())


def emit_plot(rows: Sequence[SweepRow], path: str) -> None:
    """Log-log uncertainty plot with SQL (-1/2, black) and Heisenberg (-1, blue) guides."""
    if not rows:
        raise ValidationError("refusing to plot an empty sweep table")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [row for row in rows if row.status == "ok" and np.isfinite(row.delta_omega)]
    if not ok:
        raise ValidationError("no valid rows to plot")
    n = np.array([row.n_qubits for row in ok], dtype=float)
    delta = np.array([row.delta_omega for row in ok], dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.loglog(n, delta, "o-", color="tab:red", label=f"{ok[0].state} probe")
    anchor = delta[0] * np.sqrt(n[0])
    ax.loglog(n, anchor / np.sqrt(n), "-", color="black", label=r"SQL $N^{-1/2}$")
    anchor_h = delta[0] * n[0]
    ax.loglog(n, anchor_h / n, "-", color="tab:blue", label=r"Heisenberg $N^{-1}$")
    ax.set_xlabel("number of probe qubits N")
    ax.set_ylabel(r"estimation uncertainty $\delta\omega$")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
