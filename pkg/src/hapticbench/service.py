"""HTTP session service: the live counterpart of the simulated session loop.

JSON over HTTP with session-scoped ids; every mutation lands in the
append-only journal before the response is sent, so a crashed service resumes
mid-session after a restart. Payloads use the same schemas as the exported
session logs and fit reports.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .config import WorkbenchConfig
from .errors import (
    DegenerateDataError,
    InvalidSpecError,
    NonIdentifiableError,
    ProtocolViolationError,
    SchemaViolationError,
    SessionCompleteError,
)
from .journal import SessionStore
from .sessions import next_trial, trials_from_log
from .session_io import canonical_json_bytes, log_to_dict, plan_from_dict
from .stats.psychometric import fit_report


class PlanPayload(BaseModel):
    reference_um: float
    comparisons_um: list[float]
    reps: int
    seed: int
    per_grit: int = 2


class CreateSessionPayload(BaseModel):
    participant_id: str = ""
    condition_label: str = ""
    plan: PlanPayload


class ResponsePayload(BaseModel):
    trial_index: int
    choice: str
    rt_ms: float | None = Field(default=None, ge=0)


def _error(status_code: int, kind: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": kind, "detail": detail})


def create_app(config: WorkbenchConfig | None = None) -> FastAPI:
    config = config or WorkbenchConfig()
    store = SessionStore(config.data_dir)
    store.load_existing()

    app = FastAPI(title="hapticbench session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    phases = {"stim1_ms": config.stim_ms, "gap_ms": config.gap_ms, "stim2_ms": config.stim_ms}

    @app.exception_handler(ProtocolViolationError)
    async def _protocol(_, exc):
        return _error(409, "protocol-violation", str(exc))

    @app.exception_handler(SessionCompleteError)
    async def _complete(_, exc):
        return _error(409, "session-complete", str(exc))

    @app.exception_handler(NonIdentifiableError)
    async def _nonident(_, exc):
        return _error(409, "non-identifiable", str(exc))

    @app.exception_handler(DegenerateDataError)
    async def _degenerate(_, exc):
        return _error(409, "degenerate-data", str(exc))

    @app.exception_handler(KeyError)
    async def _missing(_, exc):
        return _error(404, "not-found", f"unknown session id {exc}")

    @app.post("/sessions")
    def create_session(payload: CreateSessionPayload):
        try:
            plan = plan_from_dict(
                payload.plan.model_dump(), condition_label=payload.condition_label
            )
        except (InvalidSpecError, SchemaViolationError) as exc:
            return _error(422, "invalid-plan", str(exc))
        session_id = store.create(plan, payload.participant_id)
        return {"id": session_id, "total_trials": plan.total_trials, "phases": phases}

    @app.get("/sessions/{session_id}/trial")
    def get_trial(session_id: str):
        log = store.get(session_id)
        trial = next_trial(log)
        first_grit, first_rep = trial.first_stimulus(log.plan.reference)
        second_grit, second_rep = trial.second_stimulus(log.plan.reference)
        return {
            "trial_index": trial.index,
            "total_trials": log.plan.total_trials,
            "answered": log.answered,
            "first": {
                "p_grade": first_grit.p_grade,
                "particle_um": first_grit.particle_um,
                "replicate": first_rep,
            },
            "second": {
                "p_grade": second_grit.p_grade,
                "particle_um": second_grit.particle_um,
                "replicate": second_rep,
            },
            "phases": phases,
        }

    @app.post("/sessions/{session_id}/response")
    def post_response(session_id: str, payload: ResponsePayload):
        log = store.record(session_id, payload.trial_index, payload.choice, payload.rt_ms)
        return {"answered": log.answered, "status": log.status}

    @app.get("/sessions/{session_id}/fit")
    def get_fit(session_id: str, link: str | None = None, bootstrap: int | None = None,
                seed: int | None = None):
        log = store.get(session_id)
        kwargs = dict(
            link=link or config.link,
            n_resamples=config.bootstrap_resamples if bootstrap is None else bootstrap,
            seed=config.bootstrap_seed if seed is None else seed,
        )
        try:
            report = fit_report(trials_from_log(log), **kwargs)
        except DegenerateDataError as exc:
            # the point fit stands even when resampled refits keep failing
            report = fit_report(trials_from_log(log), **{**kwargs, "n_resamples": 0})
            report["ci_error"] = str(exc)
        report["answered"] = log.answered
        report["total_trials"] = log.plan.total_trials
        return report

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        log = store.get(session_id)
        return Response(
            content=canonical_json_bytes(log_to_dict(log)), media_type="application/json"
        )

    return app


def serve(config: WorkbenchConfig, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=config.service_port)
