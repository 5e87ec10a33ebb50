"""Request/response schemas of the HTTP API.

Everything is strict (unknown keys rejected).  Quantities that can be
undefined for a given probe (squeezing parameter, mean-spin axes) are
nullable; sweep tables travel as CSV text so non-finite entries and byte
determinism survive the wire.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..sweep import SweepSpec

Vector3 = Tuple[float, float, float]


class StateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["coherent", "oat", "tat", "cat", "ghz"]
    n: int = Field(ge=1)
    z: Tuple[float, float] = (1.0, 0.0)
    chi: Optional[float] = None
    chi_opt: bool = False


class MomentsModel(BaseModel):
    first: Vector3
    second: List[List[float]]


class AxesModel(BaseModel):
    mean: Optional[Vector3] = None
    estimator: Optional[Vector3] = None
    sensing: Vector3


class StateResponse(BaseModel):
    kind: str
    n: int
    chi_used: Optional[float] = None
    moments: MomentsModel
    xi2: Optional[float] = None
    axes: AxesModel


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: SweepSpec
    jobs: Optional[int] = Field(default=None, ge=1)


class FitRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    csv: str
    x: str = "N"
    y: str = "delta_omega"


class FitResponse(BaseModel):
    slope: float
    intercept: float
    max_abs_residual: float
    n_points: int


class ProtocolRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=1)
    z: Tuple[float, float] = (1.0, 0.0)
    mode: Literal["ideal_gate", "time_domain"] = "ideal_gate"
    rabi_ratio: float = Field(default=0.05, gt=0)
    omega_t: float = 0.0
    gamma_t: float = Field(default=0.0, ge=0)
    noise_kind: Literal["gaussian_nonmarkovian", "exponential_markovian", "none"] = (
        "gaussian_nonmarkovian"
    )


class ProtocolResponse(BaseModel):
    p_plus: float
    prep_fidelity: float
    mode: str
    branch_residual: float


class ErrorBody(BaseModel):
    kind: Literal["config", "numerical"]
    message: str
