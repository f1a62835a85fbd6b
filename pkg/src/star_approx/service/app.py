"""FastAPI service wrapping the core package.

Sweeps and verification runs are compute-bound jobs; the service form
lets one warm process serve repeated requests (interactive exploration,
CI verification) while the CLI stays a thin client. Error mapping:
configuration problems are 400/404/422, numerical failures 500 with a
typed payload.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    ConfigError,
    CrossingError,
    ExpressionError,
    NumericalError,
    StarApproxError,
    UnresolvedFunctionError,
)
from ..problems import ZOO, list_problems, load_config
from ..sweep import run_bounds, run_sweep
from ..verify import run_suite
from .models import (
    BoundsResponse,
    BoundsRowModel,
    CheckModel,
    HealthResponse,
    ProblemConfigModel,
    ProblemInfo,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    VerifyRequest,
    VerifyResponse,
)

NUMERICAL_ERRORS = (NumericalError, UnresolvedFunctionError, CrossingError)


def create_app() -> FastAPI:
    app = FastAPI(title="star-approx",
                  description="Polynomial approximation of propagators of "
                              "non-autonomous linear ODE systems, with "
                              "verified error bounds.",
                  version=__version__)

    @app.exception_handler(ConfigError)
    @app.exception_handler(ExpressionError)
    async def _config_error(request, exc):
        return JSONResponse(status_code=400,
                            content={"error": {"type": type(exc).__name__,
                                               "message": str(exc)}})

    @app.exception_handler(NumericalError)
    @app.exception_handler(UnresolvedFunctionError)
    @app.exception_handler(CrossingError)
    async def _numerical_error(request, exc):
        return JSONResponse(status_code=500,
                            content={"error": {"type": type(exc).__name__,
                                               "message": str(exc),
                                               "kind": "numerical"}})

    @app.exception_handler(StarApproxError)
    async def _other_error(request, exc):
        return JSONResponse(status_code=500,
                            content={"error": {"type": type(exc).__name__,
                                               "message": str(exc)}})

    @app.get("/api/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/api/problems", response_model=list[ProblemInfo])
    def problems():
        return [ProblemInfo(**p) for p in list_problems()]

    @app.get("/api/problems/{name}", response_model=ProblemConfigModel)
    def problem_config(name: str):
        if name not in ZOO:
            return JSONResponse(status_code=404,
                                content={"error": {
                                    "type": "UnknownProblem",
                                    "message": f"no bundled problem {name!r}"}})
        return ProblemConfigModel.from_config(load_config(name))

    @app.post("/api/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest):
        cfg = request.resolve()
        result = run_sweep(cfg, threads=request.threads,
                           include_timing=request.include_timing)
        rows = [SweepRowModel(
            n=r.n, measured_l2=r.measured_l2, peano_baker_l2=r.peano_baker_l2,
            channel_bound=r.channel_bound, En_bound=r.en_bound,
            bernstein_fixed=r.bernstein_fixed, bernstein_opt=r.bernstein_opt,
            commutation_residual=r.commutation_residual, wall_ms=r.wall_ms)
            for r in result.rows]
        return SweepResponse(rows=rows, manifest=result.manifest,
                             csv=result.csv_text,
                             bound_asserted=result.bound_asserted)

    @app.post("/api/bounds", response_model=BoundsResponse)
    def bounds(request: SweepRequest):
        cfg = request.resolve()
        result = run_bounds(cfg)
        return BoundsResponse(
            rows=[BoundsRowModel(**r) for r in result.rows],
            spectral_interval=result.j, manifest=result.manifest,
            csv=result.csv_text)

    @app.post("/api/verify", response_model=VerifyResponse)
    def verify(request: VerifyRequest):
        try:
            result = run_suite(request.suite)
        except ValueError as exc:
            return JSONResponse(status_code=404,
                                content={"error": {"type": "UnknownSuite",
                                                   "message": str(exc)}})
        return VerifyResponse(
            suite=result.suite, passed=result.passed,
            checks=[CheckModel(name=c.name, passed=c.passed, ms=c.ms,
                               detail=c.detail) for c in result.checks])

    return app
