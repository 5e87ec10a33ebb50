"""FastAPI application exposing states, sweeps, fits, and the pulse protocol."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..dephasing import DephasingModel
from ..errors import (
    NoMeanSpinError,
    NumericalError,
    SpinSenseError,
)
from ..metrology import (
    mean_spin_direction,
    min_variance_direction,
    optimal_twisting,
    pure_state_moments,
    sensing_direction,
    squeezing_parameter,
)
from ..protocol import branch_coefficients, prepare_cat, readout_phase
from ..states import StateSpec
from ..sweep import fit_exponent, rows_from_csv_text, rows_to_csv, run_sweep
from .models import (
    AxesModel,
    ErrorBody,
    FitRequest,
    FitResponse,
    MomentsModel,
    ProtocolRequest,
    ProtocolResponse,
    StateRequest,
    StateResponse,
    SweepRequest,
)

_NUMERICAL = (NumericalError, NoMeanSpinError)


def create_app() -> FastAPI:
    app = FastAPI(title="spinsense", version=__version__)

    @app.exception_handler(SpinSenseError)
    async def _domain_error(request: Request, exc: SpinSenseError):
        kind = "numerical" if isinstance(exc, _NUMERICAL) else "config"
        body = ErrorBody(kind=kind, message=str(exc))
        return JSONResponse(status_code=422, content={"detail": body.model_dump()})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/state", response_model=StateResponse)
    def analyze_state(request: StateRequest) -> StateResponse:
        z = complex(request.z[0], request.z[1])
        chi_used = request.chi
        if request.kind in ("oat", "tat") and request.chi_opt:
            chi_used, _ = optimal_twisting(
                request.kind, request.n, z=z if request.kind == "oat" else 1.0
            )
        spec = StateSpec(kind=request.kind, n_qubits=request.n, z=z, chi=chi_used)
        state = spec.build()
        moments = pure_state_moments(state)
        xi2 = None
        mean_axis = None
        estimator_axis = None
        try:
            m = mean_spin_direction(moments)
            r = min_variance_direction(moments, m)
            mean_axis = tuple(float(v) for v in m)
            estimator_axis = tuple(float(v) for v in r)
            xi2 = squeezing_parameter(state)
        except NoMeanSpinError:
            pass
        n_axis = tuple(float(v) for v in sensing_direction(moments))
        return StateResponse(
            kind=request.kind,
            n=request.n,
            chi_used=chi_used,
            moments=MomentsModel(
                first=tuple(float(v) for v in moments.first),
                second=[[float(v) for v in row] for row in moments.second],
            ),
            xi2=xi2,
            axes=AxesModel(mean=mean_axis, estimator=estimator_axis, sensing=n_axis),
        )

    @app.post("/sweep", response_class=PlainTextResponse)
    def sweep(request: SweepRequest) -> str:
        rows = run_sweep(request.config, jobs=request.jobs)
        return rows_to_csv(rows)

    @app.post("/fit", response_model=FitResponse)
    def fit(request: FitRequest) -> FitResponse:
        rows = rows_from_csv_text(request.csv)
        result = fit_exponent(rows, request.x, request.y)
        return FitResponse(
            slope=result.slope,
            intercept=result.intercept,
            max_abs_residual=result.max_abs_residual,
            n_points=result.n_points,
        )

    @app.post("/protocol", response_model=ProtocolResponse)
    def protocol(request: ProtocolRequest) -> ProtocolResponse:
        z = complex(request.z[0], request.z[1])
        prep = prepare_cat(
            request.n, z, mode=request.mode, rabi_ratio=request.rabi_ratio
        )
        # omega_t and gamma_t are the dimensionless products; use t = 1.
        model = DephasingModel(request.noise_kind, request.gamma_t)
        p_plus = readout_phase(prep.state, omega=request.omega_t, t=1.0, model=model)
        _, _, residual = branch_coefficients(prep.state)
        return ProtocolResponse(
            p_plus=p_plus,
            prep_fidelity=prep.fidelity,
            mode=prep.mode,
            branch_residual=residual,
        )

    return app


app = create_app()
